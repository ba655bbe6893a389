#![allow(dead_code)]

use nalgebra::DMatrix;
use nfbm::channel::{ArraySpec, SceneConfig};
use nfbm::{CMatrix, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let a: f64 = StandardNormal.sample(rng);
        let b: f64 = StandardNormal.sample(rng);
        C64::new(a, b)
    })
}

/// Symmetric `n × n` half-wavelength scene at 30 GHz with the default scatterer.
pub fn square_scene(n: usize, distance: f64) -> SceneConfig {
    let freq = 30e9;
    let a = ArraySpec::half_wavelength(n, freq);
    SceneConfig::with_default_scatterer(freq, a.clone(), a, distance)
}

/// `log₂ det A` of a Hermitian positive-definite matrix via Cholesky.
pub fn dense_log2det(a: &CMatrix) -> f64 {
    let chol = a.clone().cholesky().expect("positive definite");
    let l = chol.l();
    2.0 * (0..a.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>() / std::f64::consts::LN_2
}

/// Uniform point on the probability simplex of dimension `k`.
pub fn random_simplex(k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    let e: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}
