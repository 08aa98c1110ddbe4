use serde::Serialize;

use super::norms::trapezoid_weights;
use super::LedgerError;
use crate::mollifier::{gradient_pairing, mollify, mollify_derivative};
use crate::solver::{Mode, Trajectory};
use crate::spectral::{low_pass, nonlinear_term_unchecked, FourierField};

/// `ν ∫₀^{t_i} ‖∇u‖² ds` at every snapshot, trapezoid in time.
pub fn cumulative_dissipation(traj: &Trajectory) -> Vec<f64> {
    let ens = traj.enstrophies();
    let mut out = Vec::with_capacity(ens.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in ens.windows(2) {
        acc += 0.5 * traj.dt * (w[0] + w[1]);
        out.push(traj.viscosity * acc);
    }
    out
}

/// `½‖u(t_i)‖² + ν∫₀^{t_i}‖∇u‖² − ½‖u₀‖²` at every snapshot. Negative values
/// mean more energy was lost than dissipated.
pub fn balance_residuals(traj: &Trajectory) -> Vec<f64> {
    let e = traj.energies();
    cumulative_dissipation(traj)
        .iter()
        .zip(&e)
        .map(|(d, ei)| ei + d - e[0])
        .collect()
}

pub fn balance_residual(traj: &Trajectory, t: f64) -> Result<f64, LedgerError> {
    let i = traj.index_of(t).ok_or(LedgerError::NotOnGrid(t))?;
    Ok(balance_residuals(traj)[i])
}

/// `(P[(u·∇)u], u)` at every snapshot.
pub fn flux_series(traj: &Trajectory) -> Vec<f64> {
    traj.fields
        .iter()
        .map(|u| nonlinear_term_unchecked(u).0.inner(u))
        .collect()
}

/// Time-integrated flux `∫ ((u·∇)u, φ) dt` and its three-way splitting
///
/// ```text
/// ((u·∇)u, (u_m)_ε) = ((u·∇)u, (u_m)_ε − (u)_ε) + ((u·∇)u, (u)_ε − u) + ((u·∇)u, u)
/// ```
///
/// with `u_m` the spectral truncation of `u` to `|k| ≤ m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FluxSplitting {
    pub eps: Option<f64>,
    pub approx_radius: Option<f64>,
    /// `∫ ((u·∇)u, u) dt`.
    pub unmollified: f64,
    /// `∫ ((u·∇)u, (u)_ε) dt`.
    pub mollified: Option<f64>,
    pub approximation_term: Option<f64>,
    pub mollifier_term: Option<f64>,
    pub total: Option<f64>,
}

/// Without `eps` only the unmollified integral is computed. `approx_radius`
/// defaults to half the dealiasing cutoff.
pub fn flux_integral(
    traj: &Trajectory,
    eps: Option<f64>,
    approx_radius: Option<f64>,
) -> Result<FluxSplitting, LedgerError> {
    let w = trapezoid_weights(traj.len(), traj.dt);
    let nl: Vec<FourierField> = traj
        .fields
        .iter()
        .map(|u| nonlinear_term_unchecked(u).0)
        .collect();
    let integrate = |g: &dyn Fn(usize) -> f64| -> f64 {
        if traj.len() < 2 {
            return 0.0;
        }
        (0..traj.len()).map(|i| w[i] * g(i)).sum()
    };
    let unmollified = integrate(&|i| nl[i].inner(&traj.fields[i]));
    let Some(eps) = eps else {
        return Ok(FluxSplitting {
            eps: None,
            approx_radius: None,
            unmollified,
            mollified: None,
            approximation_term: None,
            mollifier_term: None,
            total: None,
        });
    };
    let radius = approx_radius.unwrap_or(traj.grid.dealias_cutoff() as f64 / 2.0);
    let smooth = mollify(traj, eps)?.trajectory;
    let approx = mollify(&traj.map_fields(|f| low_pass(f, radius)), eps)?.trajectory;
    let mollified = integrate(&|i| nl[i].inner(&smooth.fields[i]));
    let approximation_term = integrate(&|i| nl[i].inner(&approx.fields[i].sub(&smooth.fields[i])));
    let mollifier_term = integrate(&|i| nl[i].inner(&smooth.fields[i].sub(&traj.fields[i])));
    Ok(FluxSplitting {
        eps: Some(eps),
        approx_radius: Some(radius),
        unmollified,
        mollified: Some(mollified),
        approximation_term: Some(approximation_term),
        mollifier_term: Some(mollifier_term),
        total: Some(approximation_term + mollifier_term + unmollified),
    })
}

/// Difference of the two sides of the regularized weak identity with the
/// self-mollified test function `φ = (u)_ε`:
///
/// ```text
/// (u(t₀), φ(t₀)) − (u₀, φ(0)) − ∫₀^{t₀} [(u, ∂_t φ) − ((u·∇)u, φ) − ν(∇u, ∇φ)] dt
/// ```
///
/// The nonlinear term is included only for Navier–Stokes trajectories.
pub fn hopf_identity_residual(
    traj: &Trajectory,
    eps: f64,
    t0: f64,
    mode: Mode,
) -> Result<f64, LedgerError> {
    let lo = traj.t0 + eps;
    let hi = traj.t_end() - eps;
    if t0 <= lo || t0 >= hi {
        return Err(LedgerError::Window { t0, lo, hi });
    }
    let i0 = traj.index_of(t0).ok_or(LedgerError::NotOnGrid(t0))?;
    let phi = mollify(traj, eps)?.trajectory;
    let dphi = mollify_derivative(traj, eps)?;
    let w = trapezoid_weights(i0 + 1, traj.dt);
    let mut integral = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let u = &traj.fields[i];
        let mut integrand = u.inner(&dphi[i]) - traj.viscosity * gradient_pairing(u, &phi.fields[i]);
        if mode == Mode::NavierStokes {
            integrand -= nonlinear_term_unchecked(u).0.inner(&phi.fields[i]);
        }
        integral += wi * integrand;
    }
    let lhs = traj.fields[i0].inner(&phi.fields[i0]);
    let rhs = traj.fields[0].inner(&phi.fields[0]) + integral;
    Ok(lhs - rhs)
}
