use crate::exponent_calculus::{DerivativeOrder, Exponent};
use crate::solver::Trajectory;
use crate::spectral::{lq_norm, sobolev_seminorm};

/// Trapezoid weights for `len` points of spacing `dt`.
pub fn trapezoid_weights(len: usize, dt: f64) -> Vec<f64> {
    (0..len)
        .map(|i| if i == 0 || i + 1 == len { 0.5 * dt } else { dt })
        .collect()
}

/// `(∫ a(t)^r dt)^{1/r}` from per-snapshot space norms `a(t_i)`; the maximum
/// for `r = ∞`.
pub fn mixed_norm_of_series(values: &[f64], dt: f64, r: &Exponent) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(*v));
    }
    if values.len() < 2 {
        return 0.0;
    }
    let rf = r.to_f64();
    let total: f64 = values
        .iter()
        .zip(trapezoid_weights(values.len(), dt))
        .map(|(v, w)| w * v.powf(rf))
        .sum();
    total.powf(1.0 / rf)
}

/// `‖u‖_{L^r(L^q)}` or `‖∇u‖_{L^r(L^q)}` over the trajectory.
pub fn mixed_norm(traj: &Trajectory, r: &Exponent, q: &Exponent, derivative: DerivativeOrder) -> f64 {
    let values: Vec<f64> = traj
        .fields
        .iter()
        .map(|f| match derivative {
            DerivativeOrder::Velocity => lq_norm(f, q),
            DerivativeOrder::Gradient => sobolev_seminorm(f, q),
        })
        .collect();
    mixed_norm_of_series(&values, traj.dt, r)
}
