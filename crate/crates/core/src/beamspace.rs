//! Beamspace decomposition of a channel and beamformer candidate sets.

use crate::channel::{ChannelMatrix, SceneConfig};
use crate::exec::{map_indexed, Execution};
use crate::{CMatrix, Error, Result};

/// Default relative amplitude threshold for counting DoFs (−40 dB in power).
pub const DEFAULT_DOF_THRESHOLD: f64 = 0.01;
/// Default cap on the number of beamformer candidates.
pub const DEFAULT_CANDIDATE_CAP: usize = 4096;

/// Full SVD of a channel, `H = U diag(σ) Vᴴ`, with the effective DoF count.
#[derive(Debug, Clone)]
pub struct BeamspaceDecomposition {
    /// Descending, length `min(N_t, N_r)`.
    pub singular_values: Vec<f64>,
    /// `N_r × min(N_t, N_r)`.
    pub left_vectors: CMatrix,
    /// `N_t × min(N_t, N_r)`.
    pub right_vectors: CMatrix,
    pub dof: usize,
    pub dof_threshold: f64,
}

/// Number of singular values at or above `threshold · σ_1`.
pub fn count_dof(singular_values: &[f64], threshold: f64) -> usize {
    match singular_values.first() {
        Some(&top) if top > 0.0 => {
            let floor = threshold * top;
            singular_values.iter().filter(|&&s| s >= floor).count()
        }
        _ => 0,
    }
}

/// Permutation sorting `values` descending; ties keep their original order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn check_channel(entries: &CMatrix) -> Result<()> {
    if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("channel has non-finite entries".into()));
    }
    if entries.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
        return Err(Error::ZeroChannel);
    }
    Ok(())
}

pub fn decompose(h: &ChannelMatrix, dof_threshold: f64) -> Result<BeamspaceDecomposition> {
    decompose_matrix(&h.entries, dof_threshold)
}

/// [`decompose`] for a bare matrix.
pub fn decompose_matrix(h: &CMatrix, dof_threshold: f64) -> Result<BeamspaceDecomposition> {
    check_channel(h)?;
    let svd = h.clone().svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Numerical("SVD did not return singular vectors".into()));
    };
    let raw: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending_order(&raw);
    let singular_values: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    let left_vectors = u.select_columns(order.iter());
    let right_vectors = v_t.adjoint().select_columns(order.iter());
    let dof = count_dof(&singular_values, dof_threshold);
    Ok(BeamspaceDecomposition {
        singular_values,
        left_vectors,
        right_vectors,
        dof,
        dof_threshold,
    })
}

/// Effective DoF of a channel, skipping singular-vector computation.
pub fn channel_dof(h: &ChannelMatrix, dof_threshold: f64) -> Result<usize> {
    check_channel(&h.entries)?;
    let mut sv: Vec<f64> = h.entries.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(count_dof(&sv, dof_threshold))
}

/// Effective DoF of the two-ray channel at each of `distances`, with the
/// scatterer placed at its default position for every distance.
pub fn dof_versus_distance(
    template: &SceneConfig,
    distances: &[f64],
    dof_threshold: f64,
) -> Result<Vec<(f64, usize)>> {
    map_indexed(distances.len(), Execution::default(), |k| {
        let d = distances[k];
        let h = template.at_distance(d).two_ray_channel()?;
        Ok((d, channel_dof(&h, dof_threshold)?))
    })
    .into_iter()
    .collect()
}

impl BeamspaceDecomposition {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// Right singular vectors indexed by `subset`, as an `N_t × |subset|` beamformer.
    pub fn beamformer(&self, subset: &[usize]) -> Result<CMatrix> {
        if let Some(&index) = subset.iter().find(|&&j| j >= self.dof) {
            return Err(Error::IndexOutOfRange {
                index,
                dof: self.dof,
            });
        }
        Ok(self.right_vectors.select_columns(subset.iter()))
    }
}

pub fn beamformer(decomp: &BeamspaceDecomposition, subset: &[usize]) -> Result<CMatrix> {
    decomp.beamformer(subset)
}

/// The beamformer candidates: index subsets into the singular values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub subsets: Vec<Vec<usize>>,
    pub n_rf: usize,
    pub n_rf_eff: usize,
    /// Set when the candidate cap restricted the pool of singular vectors.
    pub truncated: bool,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// Number of leading singular vectors used by at least one candidate.
    pub fn pool_size(&self) -> usize {
        self.subsets
            .iter()
            .flat_map(|s| s.iter())
            .max()
            .map_or(0, |&m| m + 1)
    }
}

/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc · (n − i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        acc = match acc.checked_mul(num) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // rightmost position that can still advance
        let Some(pos) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            break;
        };
        current[pos] += 1;
        for i in pos + 1..k {
            current[i] = current[i - 1] + 1;
        }
    }
    out
}

/// Enumerates beamformer candidates of size `min(n_rf, dof)` drawn from the
/// `dof` strongest right singular vectors.
///
/// When the full count exceeds `cap`, the pool is restricted to the `m`
/// strongest vectors with `m` the largest value keeping `binomial(m, n_rf_eff) <= cap`.
pub fn enumerate_candidates(decomp: &BeamspaceDecomposition, n_rf: usize, cap: usize) -> CandidateSet {
    let n_rf = n_rf.max(1);
    let cap = cap.max(1) as u128;
    let dof = decomp.dof.max(1);
    let n_rf_eff = n_rf.min(dof);
    let mut pool = dof;
    let truncated = binomial(dof, n_rf_eff) > cap;
    if truncated {
        pool = n_rf_eff;
        while pool < dof && binomial(pool + 1, n_rf_eff) <= cap {
            pool += 1;
        }
    }
    CandidateSet {
        subsets: combinations(pool, n_rf_eff),
        n_rf,
        n_rf_eff,
        truncated,
    }
}
