//! Closed-form beamspace-modulation quantities.
//!
//! Every candidate covariance is `Σ_i = I + (1 / (n_rf_eff σ_n²)) H F_i F_iᴴ Hᴴ`.
//! Because the columns of `F_i` are right singular vectors of `H`, its
//! determinant factors over the selected singular values, and all
//! distribution/capacity formulas reduce to softmax and log-sum-exp over the
//! per-candidate `log₂ det Σ_i`. Nothing is ever exponentiated to linear scale.

use std::f64::consts::LN_2;

use crate::beamspace::{BeamspaceDecomposition, CandidateSet};

/// Signal-to-noise ratio under unit total transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSpec {
    pub snr_db: f64,
    /// `σ_n² = 10^(−snr_db / 10)`.
    pub noise_variance: f64,
}

impl SnrSpec {
    pub fn from_db(snr_db: f64) -> Self {
        SnrSpec {
            snr_db,
            noise_variance: 10f64.powf(-snr_db / 10.0),
        }
    }
}

/// Per-stream effective gain `σ_j² / (n_rf_eff σ_n²)`.
pub fn stream_gain(singular_value: f64, snr: SnrSpec, n_rf_eff: usize) -> f64 {
    singular_value * singular_value / (n_rf_eff as f64 * snr.noise_variance)
}

/// `log₂ det Σ_i = Σ_{j ∈ S_i} log₂(1 + σ_j² / (n_rf_eff σ_n²))`.
pub fn candidate_log2det(
    decomp: &BeamspaceDecomposition,
    subset: &[usize],
    snr: SnrSpec,
    n_rf_eff: usize,
) -> f64 {
    subset
        .iter()
        .map(|&j| stream_gain(decomp.singular_values[j], snr, n_rf_eff).ln_1p() / LN_2)
        .sum()
}

#[derive(Debug, Clone)]
pub struct CandidateStats {
    pub log2_dets: Vec<f64>,
    pub snr: SnrSpec,
    pub candidates: CandidateSet,
}

impl CandidateStats {
    pub fn new(decomp: &BeamspaceDecomposition, candidates: &CandidateSet, snr: SnrSpec) -> Self {
        let log2_dets = candidates
            .subsets
            .iter()
            .map(|s| candidate_log2det(decomp, s, snr, candidates.n_rf_eff))
            .collect();
        CandidateStats {
            log2_dets,
            snr,
            candidates: candidates.clone(),
        }
    }

    /// Stats from raw `log₂ det` values, for analysis of arbitrary candidate sets.
    pub fn from_log2_dets(log2_dets: Vec<f64>, snr: SnrSpec) -> Self {
        let k = log2_dets.len();
        CandidateStats {
            log2_dets,
            snr,
            candidates: CandidateSet {
                subsets: (0..k).map(|i| vec![i]).collect(),
                n_rf: 1,
                n_rf_eff: 1,
                truncated: false,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.log2_dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log2_dets.is_empty()
    }

    fn max_log2det(&self) -> f64 {
        self.log2_dets
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Probability vector over the beamformer candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationDistribution {
    pub probabilities: Vec<f64>,
}

impl ActivationDistribution {
    /// Normalizes non-negative weights onto the simplex.
    pub fn from_weights(weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        ActivationDistribution {
            probabilities: weights.iter().map(|w| w / total).collect(),
        }
    }

    /// All mass on candidate `index`.
    pub fn point_mass(k: usize, index: usize) -> Self {
        let mut probabilities = vec![0.0; k];
        probabilities[index] = 1.0;
        ActivationDistribution { probabilities }
    }

    pub fn uniform(k: usize) -> Self {
        ActivationDistribution {
            probabilities: vec![1.0 / k as f64; k],
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Indices of the `n` most probable candidates, most probable first.
    pub fn top(&self, n: usize) -> Vec<(usize, f64)> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| self.probabilities[b].total_cmp(&self.probabilities[a]));
        order
            .into_iter()
            .take(n)
            .map(|i| (i, self.probabilities[i]))
            .collect()
    }
}

/// Capacity-achieving activation: `p_i* = det Σ_i / Σ_k det Σ_k`.
pub fn activation_probabilities(stats: &CandidateStats) -> ActivationDistribution {
    let top = stats.max_log2det();
    let weights: Vec<f64> = stats.log2_dets.iter().map(|&l| (l - top).exp2()).collect();
    ActivationDistribution::from_weights(&weights)
}

/// `C_BM^A = log₂ Σ_i det Σ_i`.
pub fn asymptotic_capacity(stats: &CandidateStats) -> f64 {
    let top = stats.max_log2det();
    let sum: f64 = stats.log2_dets.iter().map(|&l| (l - top).exp2()).sum();
    top + sum.log2()
}

/// `C_BBS = log₂ max_i det Σ_i`.
pub fn bbs_capacity(stats: &CandidateStats) -> f64 {
    stats.max_log2det()
}

/// `R̃(p) = Σ_i p_i (log₂ det Σ_i − log₂ p_i)`, with `0 · log 0 = 0`.
pub fn se_upper_bound(p: &ActivationDistribution, stats: &CandidateStats) -> f64 {
    p.probabilities
        .iter()
        .zip(&stats.log2_dets)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &l)| pi * (l - pi.log2()))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityReport {
    pub c_bm_asymptotic: f64,
    pub c_bbs: f64,
    pub se_upper_bound_at_p: f64,
    /// `c_bm_asymptotic − c_bbs`.
    pub gap: f64,
}

impl CapacityReport {
    pub fn from_stats(stats: &CandidateStats) -> Self {
        let p = activation_probabilities(stats);
        let c_bm_asymptotic = asymptotic_capacity(stats);
        let c_bbs = bbs_capacity(stats);
        CapacityReport {
            c_bm_asymptotic,
            c_bbs,
            se_upper_bound_at_p: se_upper_bound(&p, stats),
            gap: c_bm_asymptotic - c_bbs,
        }
    }
}

pub fn capacity_report(
    decomp: &BeamspaceDecomposition,
    candidates: &CandidateSet,
    snr: SnrSpec,
) -> CapacityReport {
    CapacityReport::from_stats(&CandidateStats::new(decomp, candidates, snr))
}
