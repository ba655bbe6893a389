//! Beamspace modulation (BM) capacity analysis for near-field XL-MIMO links.
//!
//! The crate builds spherical-wave two-ray channels between parallel uniform
//! linear arrays, decomposes them into beamspace (singular vectors), and
//! compares hopping among beamformer candidates with det-proportional
//! activation probabilities against always transmitting on the strongest
//! beamspace. Quantities are available in closed form ([`capacity`]) and as
//! Monte-Carlo estimates of the true spectral efficiency ([`montecarlo`]).
//!
//! ```
//! use nfbm::channel::{ArraySpec, SceneConfig};
//! use nfbm::beamspace::{decompose, enumerate_candidates};
//! use nfbm::capacity::{capacity_report, SnrSpec};
//!
//! let freq = 30e9;
//! let array = ArraySpec::half_wavelength(16, freq);
//! let scene = SceneConfig::with_default_scatterer(freq, array.clone(), array, 0.1);
//! let h = scene.two_ray_channel().unwrap().normalized();
//! let decomp = decompose(&h, 0.01).unwrap();
//! let candidates = enumerate_candidates(&decomp, 1, 4096);
//! let report = capacity_report(&decomp, &candidates, SnrSpec::from_db(30.0));
//! assert!(report.c_bm_asymptotic >= report.c_bbs);
//! ```

pub mod beamspace;
pub mod capacity;
pub mod channel;
mod error;
pub mod exec;
pub mod experiments;
pub mod montecarlo;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
