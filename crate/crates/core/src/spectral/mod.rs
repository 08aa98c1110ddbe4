//! Periodic vector fields on `[0, 2π)³` with pseudo-spectral operators.

mod fft;
mod field;
mod grid;
mod norms;
mod ops;
mod random;

use thiserror::Error;

pub use fft::{plan, Fft3};
pub use field::{FourierField, RealField, SpectralScalar, SpectralTensor};
pub use grid::Grid;
pub use norms::{lq_norm, lq_norm_samples, sobolev_seminorm};
pub use ops::{
    curl, dealias, divergence, ensure_divergence_free, gradient, gradient_part, leray_project,
    low_pass, nonlinear_term, relative_divergence, transport_term, DIVERGENCE_TOLERANCE,
};
pub(crate) use ops::{nonlinear_term_unchecked, transport_term_with_real};
pub use random::random_rough_field;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("grid size {0} must be a power of two and at least 8")]
    InvalidGrid(usize),
    #[error("field is not divergence free (relative divergence {0:e})")]
    NotDivergenceFree(f64),
    #[error("roughness exponent must be positive, got {0}")]
    InvalidRoughness(f64),
}
