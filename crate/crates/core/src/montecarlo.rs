//! Monte-Carlo estimate of the beamspace-modulation spectral efficiency.
//!
//! Under BM with Gaussian symbols the received vector (in unit-noise units)
//! follows a zero-mean complex Gaussian mixture whose `i`-th component has
//! covariance `Σ_i = I + Σ_{j ∈ S_i} g_j u_j u_jᴴ`, with `u_j` the left singular
//! vectors of the channel. The spectral efficiency is `h(y) − N_r log₂(πe)`,
//! and `h(y)` is estimated by the sample mean of `−log₂ f(y)`.
//!
//! Component densities are evaluated through the low-rank structure:
//! `yᴴ Σ_i⁻¹ y = ‖y‖² − Σ_j g_j / (1 + g_j) |u_jᴴ y|²` and
//! `ln det Σ_i = Σ_j ln(1 + g_j)`, so no `N_r × N_r` matrix is ever formed.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` uses a ChaCha8 stream
//! keyed by `(seed, c)`, and chunk statistics are merged in chunk order.
//! The estimate is therefore bit-identical for a given seed whatever the
//! number of worker threads.

use std::f64::consts::{E, FRAC_1_SQRT_2, LN_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::beamspace::{BeamspaceDecomposition, CandidateSet};
use crate::capacity::{
    activation_probabilities, stream_gain, ActivationDistribution, CandidateStats, SnrSpec,
};
use crate::exec::{map_indexed, Execution};
use crate::{CMatrix, Error, Result, C64};

/// Samples per independently seeded chunk.
pub const CHUNK_SIZE: usize = 4096;
/// Default number of Monte-Carlo samples per operating point.
pub const DEFAULT_SAMPLES: usize = 200_000;
/// Smallest accepted sample count.
pub const MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone)]
pub struct MixtureComponent {
    /// Indices into the model basis.
    pub subset: Vec<usize>,
    /// Effective gains `g_j`, aligned with `subset`.
    pub gains: Vec<f64>,
    /// `ln det Σ_i`.
    ln_det: f64,
    /// `g_j / (1 + g_j)`, aligned with `subset`.
    shrink: Vec<f64>,
    /// `g_j.sqrt()`, aligned with `subset`.
    amplitude: Vec<f64>,
}

impl MixtureComponent {
    fn new(subset: Vec<usize>, gains: Vec<f64>) -> Self {
        let ln_det = gains.iter().map(|g| g.ln_1p()).sum();
        let shrink = gains.iter().map(|g| g / (1.0 + g)).collect();
        let amplitude = gains.iter().map(|g| g.sqrt()).collect();
        MixtureComponent {
            subset,
            gains,
            ln_det,
            shrink,
            amplitude,
        }
    }

    pub fn log2_det(&self) -> f64 {
        self.ln_det / LN_2
    }

    /// Dense covariance `I + Σ_j g_j u_j u_jᴴ`.
    pub fn covariance(&self, basis: &CMatrix) -> CMatrix {
        let n = basis.nrows();
        let mut sigma = CMatrix::identity(n, n);
        for (&j, &g) in self.subset.iter().zip(&self.gains) {
            let u = basis.column(j);
            sigma += (&u * u.adjoint()).scale(g);
        }
        sigma
    }
}

/// Complex Gaussian mixture describing the received signal under BM.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    components: Vec<MixtureComponent>,
    weights: ActivationDistribution,
    /// `N_r × m` orthonormal columns spanning every component's signal subspace.
    basis: CMatrix,
    // basis transposed into row-major real/imaginary planes for projections
    basis_re: Vec<f64>,
    basis_im: Vec<f64>,
    ln_weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl MixtureModel {
    /// Builds a mixture from explicit parts.
    ///
    /// `basis` must have orthonormal columns; each component lists basis
    /// column indices and the matching non-negative gains.
    pub fn from_parts(
        basis: CMatrix,
        components: Vec<(Vec<usize>, Vec<f64>)>,
        weights: ActivationDistribution,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        if weights.len() != components.len() {
            return Err(Error::InvalidArgument(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.probabilities.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidArgument("weights must be non-negative".into()));
        }
        let total: f64 = weights.probabilities.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidArgument("weights must have positive finite sum".into()));
        }
        let weights = ActivationDistribution::from_weights(&weights.probabilities);

        let m = basis.ncols();
        let components = components
            .into_iter()
            .map(|(subset, gains)| {
                if subset.len() != gains.len() {
                    return Err(Error::InvalidArgument("subset/gain length mismatch".into()));
                }
                if let Some(&index) = subset.iter().find(|&&j| j >= m) {
                    return Err(Error::IndexOutOfRange { index, dof: m });
                }
                if gains.iter().any(|g| !(*g >= 0.0 && g.is_finite())) {
                    return Err(Error::InvalidArgument("gains must be finite and >= 0".into()));
                }
                Ok(MixtureComponent::new(subset, gains))
            })
            .collect::<Result<Vec<_>>>()?;

        let n = basis.nrows();
        let mut basis_re = vec![0.0; m * n];
        let mut basis_im = vec![0.0; m * n];
        for j in 0..m {
            for k in 0..n {
                let z = basis[(k, j)];
                basis_re[j * n + k] = z.re;
                basis_im[j * n + k] = z.im;
            }
        }
        let ln_weights = weights
            .probabilities
            .iter()
            .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
            .collect();
        let mut acc = 0.0;
        let cumulative = weights
            .probabilities
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();

        Ok(MixtureModel {
            components,
            weights,
            basis,
            basis_re,
            basis_im,
            ln_weights,
            cumulative,
        })
    }

    /// Mixture for the candidates of `decomp` activated with `weights`.
    pub fn new(
        decomp: &BeamspaceDecomposition,
        candidates: &CandidateSet,
        snr: SnrSpec,
        weights: ActivationDistribution,
    ) -> Result<Self> {
        let pool = candidates.pool_size();
        if pool > decomp.rank() {
            return Err(Error::IndexOutOfRange {
                index: pool - 1,
                dof: decomp.rank(),
            });
        }
        let basis = decomp.left_vectors.columns(0, pool).into_owned();
        let components = candidates
            .subsets
            .iter()
            .map(|s| {
                let gains = s
                    .iter()
                    .map(|&j| stream_gain(decomp.singular_values[j], snr, candidates.n_rf_eff))
                    .collect();
                (s.clone(), gains)
            })
            .collect();
        Self::from_parts(basis, components, weights)
    }

    /// Mixture under the capacity-achieving activation `p*`.
    pub fn optimal(
        decomp: &BeamspaceDecomposition,
        candidates: &CandidateSet,
        snr: SnrSpec,
    ) -> Result<Self> {
        let p = activation_probabilities(&CandidateStats::new(decomp, candidates, snr));
        Self::new(decomp, candidates, snr, p)
    }

    /// Mixture that always transmits on candidate 0 (the strongest beamspace).
    pub fn best_beamspace(
        decomp: &BeamspaceDecomposition,
        candidates: &CandidateSet,
        snr: SnrSpec,
    ) -> Result<Self> {
        let p = ActivationDistribution::point_mass(candidates.len(), 0);
        Self::new(decomp, candidates, snr, p)
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn weights(&self) -> &ActivationDistribution {
        &self.weights
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    fn draw_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.cumulative[self.cumulative.len() - 1];
        let i = self.cumulative.partition_point(|&c| c <= u);
        if i < self.components.len() {
            i
        } else {
            // u landed on the rounding slack above the last positive weight
            self.weights
                .probabilities
                .iter()
                .rposition(|&p| p > 0.0)
                .unwrap_or(0)
        }
    }

    fn sample_into<R: Rng + ?Sized>(&self, i: usize, rng: &mut R, re: &mut [f64], im: &mut [f64]) {
        let n = self.ambient_dim();
        for k in 0..n {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            re[k] = a * FRAC_1_SQRT_2;
            im[k] = b * FRAC_1_SQRT_2;
        }
        let comp = &self.components[i];
        for (&j, &amp) in comp.subset.iter().zip(&comp.amplitude) {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            let zr = a * FRAC_1_SQRT_2 * amp;
            let zi = b * FRAC_1_SQRT_2 * amp;
            let ur = &self.basis_re[j * n..(j + 1) * n];
            let ui = &self.basis_im[j * n..(j + 1) * n];
            for k in 0..n {
                re[k] += ur[k] * zr - ui[k] * zi;
                im[k] += ur[k] * zi + ui[k] * zr;
            }
        }
    }

    /// Natural-log density, using `proj` as scratch for `|u_jᴴ y|²`.
    fn ln_density(&self, re: &[f64], im: &[f64], proj: &mut [f64]) -> f64 {
        let n = self.ambient_dim();
        let norm2: f64 = re.iter().zip(im).map(|(a, b)| a * a + b * b).sum();
        for (j, slot) in proj.iter_mut().enumerate() {
            let ur = &self.basis_re[j * n..(j + 1) * n];
            let ui = &self.basis_im[j * n..(j + 1) * n];
            let (mut cr, mut ci) = (0.0, 0.0);
            for k in 0..n {
                cr += ur[k] * re[k] + ui[k] * im[k];
                ci += ur[k] * im[k] - ui[k] * re[k];
            }
            *slot = cr * cr + ci * ci;
        }
        let mut top = f64::NEG_INFINITY;
        let mut exps = Vec::with_capacity(self.components.len());
        for (comp, &lw) in self.components.iter().zip(&self.ln_weights) {
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let captured: f64 = comp
                .subset
                .iter()
                .zip(&comp.shrink)
                .map(|(&j, &s)| s * proj[j])
                .sum();
            let e = lw - comp.ln_det + captured;
            top = top.max(e);
            exps.push(e);
        }
        let lse = top + exps.iter().map(|e| (e - top).exp()).sum::<f64>().ln();
        -(n as f64) * PI.ln() - norm2 + lse
    }
}

fn split(y: &[C64]) -> (Vec<f64>, Vec<f64>) {
    (y.iter().map(|z| z.re).collect(), y.iter().map(|z| z.im).collect())
}

/// Draws `y ~ CN(0, Σ_i)`: `y = Σ_{j∈S_i} √g_j u_j z_j + w` with standard
/// circular `z_j` and `w`.
pub fn sample_component<R: Rng + ?Sized>(model: &MixtureModel, i: usize, rng: &mut R) -> Vec<C64> {
    let n = model.ambient_dim();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    model.sample_into(i, rng, &mut re, &mut im);
    re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect()
}

/// `log₂ f(y)` for the mixture density `f = Σ_i p_i f_i`.
pub fn log2_mixture_density(model: &MixtureModel, y: &[C64]) -> f64 {
    let (re, im) = split(y);
    let mut proj = vec![0.0; model.basis.ncols()];
    model.ln_density(&re, &im, &mut proj) / LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeEstimate {
    /// Spectral efficiency, bits/s/Hz.
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl SeEstimate {
    /// Estimated differential entropy `h(y)` in bits (unit-noise domain).
    pub fn entropy(&self, ambient_dim: usize) -> f64 {
        self.mean + noise_entropy(ambient_dim)
    }
}

/// `N_r log₂(πe)`, the entropy of unit-variance circular complex noise.
pub fn noise_entropy(ambient_dim: usize) -> f64 {
    ambient_dim as f64 * (PI * E).log2()
}

/// Running mean / sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

fn chunk_moments(model: &MixtureModel, seed: u64, chunk: usize, len: usize) -> Moments {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    let n = model.ambient_dim();
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    let mut proj = vec![0.0; model.basis.ncols()];
    let mut moments = Moments::default();
    for _ in 0..len {
        let i = model.draw_component(&mut rng);
        model.sample_into(i, &mut rng, &mut re, &mut im);
        moments.push(-model.ln_density(&re, &im, &mut proj) / LN_2);
    }
    moments
}

/// Spectral efficiency `E[−log₂ f(y)] − N_r log₂(πe)` estimated from
/// `n_samples` draws, using the default execution strategy.
pub fn estimate_se(model: &MixtureModel, n_samples: usize, seed: u64) -> Result<SeEstimate> {
    estimate_se_with(model, n_samples, seed, Execution::default())
}

pub fn estimate_se_with(
    model: &MixtureModel,
    n_samples: usize,
    seed: u64,
    execution: Execution,
) -> Result<SeEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "n_samples must be at least {MIN_SAMPLES}, got {n_samples}"
        )));
    }
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let chunks = map_indexed(n_chunks, execution, |c| {
        let len = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
        chunk_moments(model, seed, c, len)
    });
    let total = chunks.into_iter().fold(Moments::default(), Moments::merge);
    if !total.mean.is_finite() {
        return Err(Error::Numerical("non-finite log-density encountered".into()));
    }
    let variance = total.m2 / (total.n - 1) as f64;
    Ok(SeEstimate {
        mean: total.mean - noise_entropy(model.ambient_dim()),
        std_error: (variance / total.n as f64).sqrt(),
        n_samples,
        seed,
    })
}
