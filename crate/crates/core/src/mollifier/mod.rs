//! Friederichs mollification in time on uniformly sampled trajectories.
//!
//! `(Φ)_ε(t_i) = Σ_j w_j k_ε(t_i − t_j) Φ_j / S`, with trapezoid weights `w_j`
//! on the trajectory interval and `S` the discrete mass of the full kernel
//! stencil, so interior values reproduce constants to round-off. Within `ε`
//! of either end the kernel is cut by the interval and sees less mass; those
//! indices are reported, not corrected.

mod kernel;

use std::ops::RangeInclusive;

use thiserror::Error;

pub use kernel::{normalization, profile, profile_derivative, MollifierKernel};

use crate::solver::Trajectory;
use crate::spectral::FourierField;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MollifierError {
    #[error("mollifier width must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("width {eps} is not resolved by time step {dt} (need eps > 2 dt)")]
    UnderResolved { eps: f64, dt: f64 },
    #[error("width {eps} is not smaller than the time span {span}")]
    TooWide { eps: f64, span: f64 },
    #[error("time {t} is outside the admissible window [{lo}, {hi}]")]
    Window { t: f64, lo: f64, hi: f64 },
    #[error("mollification needs at least two snapshots")]
    TooShort,
}

/// Precomputed discrete convolution on a uniform grid of `len` points.
#[derive(Clone, Debug)]
pub struct TimeStencil {
    pub eps: f64,
    pub dt: f64,
    len: usize,
    half: usize,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl TimeStencil {
    pub fn new(len: usize, dt: f64, eps: f64) -> Result<Self, MollifierError> {
        let kernel = MollifierKernel::new(eps)?;
        if len < 2 {
            return Err(MollifierError::TooShort);
        }
        let span = (len - 1) as f64 * dt;
        if eps <= 2.0 * dt {
            return Err(MollifierError::UnderResolved { eps, dt });
        }
        if eps >= span {
            return Err(MollifierError::TooWide { eps, span });
        }
        let (mut values, mut slopes) = kernel.stencil(dt);
        let mass: f64 = values.iter().sum::<f64>() * dt;
        values.iter_mut().for_each(|v| *v /= mass);
        slopes.iter_mut().for_each(|v| *v /= mass);
        let half = values.len() / 2;
        Ok(TimeStencil {
            eps,
            dt,
            len,
            half,
            values,
            slopes,
        })
    }

    pub fn for_trajectory(traj: &Trajectory, eps: f64) -> Result<Self, MollifierError> {
        Self::new(traj.len(), traj.dt, eps)
    }

    fn weight(&self, j: usize) -> f64 {
        if j == 0 || j + 1 == self.len {
            0.5 * self.dt
        } else {
            self.dt
        }
    }

    /// `(j, w_j k_ε(t_i − t_j)/S)` over the stencil, in increasing `j`.
    pub fn row(&self, i: usize) -> Vec<(usize, f64)> {
        self.row_from(i, &self.values)
    }

    /// Same with `k_ε'`, giving `∂_t (Φ)_ε(t_i)`.
    pub fn derivative_row(&self, i: usize) -> Vec<(usize, f64)> {
        self.row_from(i, &self.slopes)
    }

    fn row_from(&self, i: usize, taps: &[f64]) -> Vec<(usize, f64)> {
        let lo = i.saturating_sub(self.half);
        let hi = (i + self.half).min(self.len - 1);
        (lo..=hi)
            .filter_map(|j| {
                // tap index m + M holds k(m Δt) with m = i − j
                let tap = taps[i + self.half - j];
                (tap != 0.0).then(|| (j, self.weight(j) * tap))
            })
            .collect()
    }

    /// Indices whose kernel support stays inside the interval.
    pub fn interior(&self) -> RangeInclusive<usize> {
        let m = (self.eps / self.dt).ceil() as usize;
        m..=self.len.saturating_sub(m + 1)
    }

    /// Kernel mass seen from index `i`: 1 in the interior, ½ at the ends.
    pub fn mass(&self, i: usize) -> f64 {
        self.row(i).iter().map(|(_, w)| w).sum()
    }
}

fn combine(fields: &[FourierField], row: &[(usize, f64)]) -> FourierField {
    let mut out = FourierField::zeros(fields[0].grid);
    for &(j, w) in row {
        out.add_scaled(&fields[j], w);
    }
    out
}

/// A mollified trajectory together with the indices where it is reliable.
#[derive(Clone, Debug)]
pub struct Mollified {
    pub trajectory: Trajectory,
    pub eps: f64,
    pub interior: RangeInclusive<usize>,
}

pub fn mollify(traj: &Trajectory, eps: f64) -> Result<Mollified, MollifierError> {
    let st = TimeStencil::for_trajectory(traj, eps)?;
    let fields = (0..traj.len())
        .map(|i| combine(&traj.fields, &st.row(i)))
        .collect();
    Ok(Mollified {
        trajectory: Trajectory {
            fields,
            ..traj.clone()
        },
        eps,
        interior: st.interior(),
    })
}

/// `∂_t (u)_ε` at every snapshot time.
pub fn mollify_derivative(traj: &Trajectory, eps: f64) -> Result<Vec<FourierField>, MollifierError> {
    let st = TimeStencil::for_trajectory(traj, eps)?;
    Ok((0..traj.len())
        .map(|i| combine(&traj.fields, &st.derivative_row(i)))
        .collect())
}

/// Scalar version of [`mollify`] on a uniform grid of spacing `dt`.
pub fn mollify_series(values: &[f64], dt: f64, eps: f64) -> Result<Vec<f64>, MollifierError> {
    let st = TimeStencil::new(values.len(), dt, eps)?;
    Ok((0..values.len())
        .map(|i| st.row(i).iter().map(|&(j, w)| w * values[j]).sum())
        .collect())
}

fn check_window(traj: &Trajectory, t: f64, lo: f64, hi: f64) -> Result<usize, MollifierError> {
    if t <= lo || t >= hi {
        return Err(MollifierError::Window { t, lo, hi });
    }
    traj.index_of(t).ok_or(MollifierError::Window { t, lo, hi })
}

/// `(u(t), (u)_ε(t)) − ½‖u(t)‖²` for `t ∈ (ε, T−ε)`. The kernel sees full
/// mass there, so a slowly varying trajectory gives about `+½‖u(t)‖²`.
pub fn mollifier_energy_pairing(traj: &Trajectory, eps: f64, t: f64) -> Result<f64, MollifierError> {
    let st = TimeStencil::for_trajectory(traj, eps)?;
    let i = check_window(traj, t, traj.t0 + eps, traj.t_end() - eps)?;
    let u = &traj.fields[i];
    let m = combine(&traj.fields, &st.row(i));
    Ok(u.inner(&m) - 0.5 * u.norm_sq())
}

/// Endpoint convention: mollify over `[t0, t]` only, so the kernel sees half
/// its mass at `t`, and return `(u(t), (u)_ε(t)) − ½‖u(t)‖²`. Zero for
/// constant trajectories, `O(ε)` for Lipschitz ones.
pub fn endpoint_energy_pairing(traj: &Trajectory, eps: f64, t: f64) -> Result<f64, MollifierError> {
    let i = check_window(traj, t, traj.t0 + eps, traj.t_end() + traj.dt)?;
    let st = TimeStencil::new(i + 1, traj.dt, eps)?;
    let u = &traj.fields[i];
    let m = combine(&traj.fields[..=i], &st.row(i));
    Ok(u.inner(&m) - 0.5 * u.norm_sq())
}

/// `∫₀ᵀ (u, ∂_t (u)_ε) dt` by the trapezoid rule. With an even kernel the
/// double sum is antisymmetric, so it vanishes up to round-off.
pub fn even_kernel_cancellation(traj: &Trajectory, eps: f64) -> Result<f64, MollifierError> {
    let st = TimeStencil::for_trajectory(traj, eps)?;
    let mut total = 0.0;
    for i in 0..traj.len() {
        let d = combine(&traj.fields, &st.derivative_row(i));
        total += st.weight(i) * traj.fields[i].inner(&d);
    }
    Ok(total)
}

/// `∫₀ᵀ (∇u, (∇u)_ε) dt − ∫₀ᵀ ‖∇u‖² dt`. Mollification acts per Fourier
/// mode, so it commutes exactly with the spatial gradient.
pub fn dissipation_pairing_gap(traj: &Trajectory, eps: f64) -> Result<f64, MollifierError> {
    let st = TimeStencil::for_trajectory(traj, eps)?;
    let mut total = 0.0;
    for i in 0..traj.len() {
        let u = &traj.fields[i];
        let m = combine(&traj.fields, &st.row(i));
        total += st.weight(i) * (gradient_pairing(u, &m) - u.enstrophy());
    }
    Ok(total)
}

/// `(∇a, ∇b) = (2π)³ Σ |k|² Re â·conj b̂`.
pub fn gradient_pairing(a: &FourierField, b: &FourierField) -> f64 {
    let g = a.grid;
    let mut total = 0.0;
    for (x, y) in a.comps.iter().zip(&b.comps) {
        for (idx, (p, q)) in x.iter().zip(y).enumerate() {
            let k = g.wavevector(idx);
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            total += g.mode_weight(k[0]) * k2 * (p * q.conj()).re;
        }
    }
    total * g.volume()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Provenance;
    use crate::spectral::Grid;

    fn series(len: usize, dt: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..len).map(|i| f(i as f64 * dt)).collect()
    }

    #[test]
    fn reproduces_constants_and_lines_inside() {
        let dt = 1e-3;
        let eps = 0.02;
        let len = 501;
        let st = TimeStencil::new(len, dt, eps).unwrap();
        let ones = mollify_series(&vec![2.5; len], dt, eps).unwrap();
        let line = mollify_series(&series(len, dt, |t| t), dt, eps).unwrap();
        for i in st.interior() {
            assert!((ones[i] - 2.5).abs() < 1e-14);
            assert!((line[i] - i as f64 * dt).abs() < 1e-14);
        }
        // half mass at the ends
        assert!((st.mass(0) - 0.5).abs() < 1e-14);
        assert!((st.mass(len - 1) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn interior_error_is_second_order() {
        let dt = 1e-3;
        let len = 1001;
        let f = |t: f64| (3.0 * t).sin();
        let err = |eps: f64| {
            let st = TimeStencil::new(len, dt, eps).unwrap();
            let m = mollify_series(&series(len, dt, f), dt, eps).unwrap();
            st.interior()
                .filter(|&i| (0.2..=0.8).contains(&(i as f64 * dt)))
                .map(|i| (m[i] - f(i as f64 * dt)).abs())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.08) / err(0.04);
        assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn derivative_of_a_line_converges_to_its_slope() {
        let g = Grid::new(8).unwrap();
        let u = FourierField::from_fn(g, |x, y, _| [x.sin() * y.cos(), -x.cos() * y.sin(), 0.0]);
        let err = |dt: f64| {
            let len = (0.5 / dt).round() as usize + 1;
            let fields = (0..len).map(|i| u.scaled(3.0 * i as f64 * dt)).collect();
            let traj = Trajectory::new(g, 1.0, 0.0, dt, fields, Provenance::default()).unwrap();
            let d = mollify_derivative(&traj, 0.1).unwrap();
            let st = TimeStencil::for_trajectory(&traj, 0.1).unwrap();
            st.interior()
                .map(|i| d[i].sub(&u.scaled(3.0)).norm_sq().sqrt() / (3.0 * u.norm_sq().sqrt()))
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(0.01), err(0.005));
        assert!(coarse < 1e-2 && fine < coarse / 4.0, "{coarse} {fine}");
    }

    #[test]
    fn rejects_unresolved_or_wide_kernels() {
        assert!(matches!(
            TimeStencil::new(100, 0.01, 0.02),
            Err(MollifierError::UnderResolved { .. })
        ));
        assert!(matches!(
            TimeStencil::new(11, 0.01, 0.2),
            Err(MollifierError::TooWide { .. })
        ));
        assert!(matches!(TimeStencil::new(1, 0.01, 0.2), Err(MollifierError::TooShort)));
    }

    fn constant_trajectory() -> Trajectory {
        let g = Grid::new(8).unwrap();
        let u = FourierField::from_fn(g, |x, y, _| [x.sin() * y.cos(), -x.cos() * y.sin(), 0.0]);
        Trajectory::new(g, 1.0, 0.0, 0.01, vec![u; 51], Provenance::default()).unwrap()
    }

    #[test]
    fn pairings_on_constant_trajectory() {
        let traj = constant_trajectory();
        let half = 0.5 * traj.fields[0].norm_sq();
        let inner = mollifier_energy_pairing(&traj, 0.1, 0.25).unwrap();
        assert!((inner - half).abs() < 1e-12 * half);
        let end = endpoint_energy_pairing(&traj, 0.1, 0.3).unwrap();
        assert!(end.abs() < 1e-12 * half);
        assert!(matches!(
            mollifier_energy_pairing(&traj, 0.1, 0.05),
            Err(MollifierError::Window { .. })
        ));
        let c = even_kernel_cancellation(&traj, 0.1).unwrap();
        assert!(c.abs() < 1e-12 * half);
    }
}
