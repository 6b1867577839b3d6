//! Gaussian samplers (fBM and random Fourier series), shared-noise coupling,
//! Cameron–Martin elements, cCYR constants and exact Malliavin gradients of
//! signature coefficients.
//!
//! Every sampler is a pure function of `(seed, sample index)`.

mod fbm;
mod fourier;
mod malliavin;
mod model_spec;
mod rng;

pub use fbm::{fbm_covariance, FbmBackend, FbmSampler, FBMSpec, DENSE_MAX_POINTS};
pub use fourier::{
    ccyr_constant_upper, ccyr_empirical, cm_element_path, coupled_pair, expected_sup_distance,
    expected_sup_distance_exact, fourier_distance_driver, kl_truncation, CameronMartinElement,
    CcyrReport, FourierCoefficients, FourierGaussianModel,
};
pub use malliavin::{
    hypercontractivity_ratio, malliavin_grad_sq, malliavin_gradient, poincare_check,
    PoincareReport, MAX_GRADIENT_WORD,
};
pub use model_spec::{CoefficientSpec, GridSpec, Model, ModelKind, ModelSpec};
pub use rng::{standard_normals, RngSeed};

use crate::error::Result;
use crate::paths::{Path, TimeGrid};

/// Anything that draws sample paths from `(seed, index)`.
pub trait PathSampler: Sync {
    fn dim(&self) -> usize;
    fn grid(&self) -> &TimeGrid;
    fn sample(&self, seed: u64, index: u64) -> Result<Path>;
}
