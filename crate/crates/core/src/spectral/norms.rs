use crate::exponent_calculus::Exponent;

use super::field::FourierField;
use super::ops::gradient;
use super::Grid;

/// Grid quadrature `(Σ |f|^q · cell volume)^{1/q}` of pointwise magnitudes;
/// the maximum for `q = ∞`.
pub fn lq_norm_samples(samples: &[f64], grid: Grid, q: &Exponent) -> f64 {
    if q.is_infinite() {
        return samples.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let qf = q.to_f64();
    let sum: f64 = samples.iter().map(|v| v.abs().powf(qf)).sum();
    (sum * grid.cell_volume()).powf(1.0 / qf)
}

/// `‖f‖_q` of the Euclidean magnitude of a vector field.
pub fn lq_norm(f: &FourierField, q: &Exponent) -> f64 {
    lq_norm_samples(&f.to_real().magnitude(), f.grid, q)
}

/// `‖∇f‖_q` with the Frobenius norm taken pointwise.
pub fn sobolev_seminorm(f: &FourierField, q: &Exponent) -> f64 {
    lq_norm_samples(&gradient(f).frobenius(), f.grid, q)
}
