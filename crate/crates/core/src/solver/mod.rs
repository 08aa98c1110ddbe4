//! Integrating-factor RK4 for Navier–Stokes, Stokes, and Oseen flows on the
//! periodic box.
//!
//! With `E = exp(−ν|k|² dt)` applied mode by mode and `N(v, t)` the projected
//! explicit part, one step is the Lawson scheme
//!
//! ```text
//! k1 = N(u, t)
//! k2 = N(E½ (u + dt/2 k1), t + dt/2)
//! k3 = N(E½ u + dt/2 k2, t + dt/2)
//! k4 = N(E u + dt E½ k3, t + dt)
//! u' = E u + dt/6 (E k1 + 2 E½ (k2 + k3) + k4)
//! ```
//!
//! so the viscous decay of every mode is exact.

mod config;
mod trajectory;

use thiserror::Error;

pub use config::{single_mode, taylor_green, taylor_green_3d, InitialCondition, Mode, SolverConfig};
pub use trajectory::{reverse, Provenance, Trajectory};

use crate::mollifier::{mollify, MollifierError};
use crate::snapshot::SnapshotError;
use crate::spectral::{
    ensure_divergence_free, leray_project, low_pass, nonlinear_term_unchecked,
    transport_term_with_real, FourierField, Grid, SpectralError,
};

/// Largest admitted Courant number `‖u‖_∞ dt / Δx`.
pub const CFL_LIMIT: f64 = 0.5;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("step {step}: dt {dt} exceeds the CFL limit {limit}")]
    Cfl { step: usize, dt: f64, limit: f64 },
    #[error("non-finite values after step {step}")]
    NonFinite { step: usize },
    #[error("invalid trajectory: {0}")]
    Trajectory(String),
    #[error("incompatible inputs: {0}")]
    Mismatch(String),
    #[error("{0}: {1}")]
    Io(String, #[source] std::io::Error),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Snapshot(#[from] SnapshotError),
    #[error(transparent)]
    Mollifier(#[from] MollifierError),
}

impl SolverError {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, SolverError::Cfl { .. } | SolverError::NonFinite { .. })
    }
}

/// Time-dependent input: frozen in time or sampled from a trajectory.
#[derive(Clone, Copy)]
enum Source<'a> {
    Frozen(&'a FourierField),
    Series(&'a Trajectory),
}

impl Source<'_> {
    fn at(&self, t: f64) -> Result<FourierField, SolverError> {
        match self {
            Source::Frozen(f) => Ok((*f).clone()),
            Source::Series(traj) => traj.sample(t),
        }
    }
}

struct Stepper<'a> {
    dt: f64,
    mode: Mode,
    full: Vec<f64>,
    half: Vec<f64>,
    transport: Option<Source<'a>>,
    forcing: Option<Source<'a>>,
    dx: f64,
}

fn decay(grid: Grid, viscosity: f64, dt: f64) -> Vec<f64> {
    (0..grid.spec_len())
        .map(|idx| {
            let k = grid.wavevector(idx);
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            (-viscosity * k2 * dt).exp()
        })
        .collect()
}

fn apply(f: &FourierField, factors: &[f64]) -> FourierField {
    let mut out = f.clone();
    for comp in &mut out.comps {
        comp.iter_mut().zip(factors).for_each(|(c, s)| *c *= *s);
    }
    out
}

impl<'a> Stepper<'a> {
    fn new(
        grid: Grid,
        viscosity: f64,
        dt: f64,
        mode: Mode,
        transport: Option<Source<'a>>,
        forcing: Option<Source<'a>>,
    ) -> Self {
        Stepper {
            dt,
            mode,
            full: decay(grid, viscosity, dt),
            half: decay(grid, viscosity, 0.5 * dt),
            transport,
            forcing,
            dx: grid.dx(),
        }
    }

    fn check_cfl(&self, speed: f64, step: usize) -> Result<(), SolverError> {
        let limit = if speed > 0.0 { CFL_LIMIT * self.dx / speed } else { f64::INFINITY };
        if self.dt > limit {
            return Err(SolverError::Cfl {
                step,
                dt: self.dt,
                limit,
            });
        }
        Ok(())
    }

    fn rhs(&self, v: &FourierField, t: f64, guard: Option<usize>) -> Result<FourierField, SolverError> {
        let mut out = match self.mode {
            Mode::NavierStokes => {
                let (n, u_real) = nonlinear_term_unchecked(v);
                if let Some(step) = guard {
                    self.check_cfl(u_real.max_magnitude(), step)?;
                }
                n.scaled(-1.0)
            }
            Mode::Stokes => FourierField::zeros(v.grid),
            Mode::Oseen => match self.transport {
                Some(src) => {
                    let b = src.at(t)?;
                    let (product, b_real) = transport_term_with_real(&b, v);
                    if let Some(step) = guard {
                        self.check_cfl(b_real.max_magnitude(), step)?;
                    }
                    leray_project(&product).scaled(-1.0)
                }
                None => FourierField::zeros(v.grid),
            },
        };
        if let Some(src) = self.forcing {
            out.add_scaled(&leray_project(&src.at(t)?), 1.0);
        }
        Ok(out)
    }

    fn step(&self, u: &FourierField, t: f64, index: usize) -> Result<FourierField, SolverError> {
        let dt = self.dt;
        let k1 = self.rhs(u, t, Some(index))?;
        let mut a = u.clone();
        a.add_scaled(&k1, 0.5 * dt);
        let k2 = self.rhs(&apply(&a, &self.half), t + 0.5 * dt, None)?;
        let mut b = apply(u, &self.half);
        b.add_scaled(&k2, 0.5 * dt);
        let k3 = self.rhs(&b, t + 0.5 * dt, None)?;
        let mut c = apply(u, &self.full);
        c.add_scaled(&apply(&k3, &self.half), dt);
        let k4 = self.rhs(&c, t + dt, None)?;

        let mut out = apply(u, &self.full);
        out.add_scaled(&apply(&k1, &self.full), dt / 6.0);
        let mut mid = k2;
        mid.add_scaled(&k3, 1.0);
        out.add_scaled(&apply(&mid, &self.half), dt / 3.0);
        out.add_scaled(&k4, dt / 6.0);
        if !out.norm_sq().is_finite() {
            return Err(SolverError::NonFinite { step: index });
        }
        Ok(out)
    }
}

/// One step with transport and forcing frozen over the step. A missing
/// transport in Oseen mode is the zero field.
pub fn step(
    u: &FourierField,
    dt: f64,
    viscosity: f64,
    mode: Mode,
    transport: Option<&FourierField>,
    forcing: Option<&FourierField>,
) -> Result<FourierField, SolverError> {
    if !(dt > 0.0 && dt.is_finite()) || !(viscosity >= 0.0 && viscosity.is_finite()) {
        return Err(SolverError::Config(format!("invalid dt {dt} or viscosity {viscosity}")));
    }
    ensure_divergence_free(u)?;
    if let Some(b) = transport {
        ensure_divergence_free(b)?;
    }
    for other in transport.iter().chain(forcing.iter()) {
        if other.grid != u.grid {
            return Err(SolverError::Mismatch("inputs live on different grids".into()));
        }
    }
    let stepper = Stepper::new(
        u.grid,
        viscosity,
        dt,
        mode,
        transport.map(Source::Frozen),
        forcing.map(Source::Frozen),
    );
    stepper.step(u, 0.0, 0)
}

fn check_series(name: &str, traj: &Trajectory, grid: Grid, t_end: f64) -> Result<(), SolverError> {
    if traj.grid != grid {
        return Err(SolverError::Mismatch(format!(
            "{name} is on n={}, solver on n={}",
            traj.grid.n(),
            grid.n()
        )));
    }
    let tol = 1e-9 * t_end.max(1.0);
    if traj.t0.abs() > tol || (traj.t_end() - t_end).abs() > tol {
        return Err(SolverError::Mismatch(format!(
            "{name} covers [{}, {}], solver needs [0, {t_end}]",
            traj.t0,
            traj.t_end()
        )));
    }
    Ok(())
}

pub fn solve(config: &SolverConfig) -> Result<Trajectory, SolverError> {
    solve_driven(config, None, None)
}

/// Runs a configuration with an optional transport (Oseen mode only) and an
/// optional forcing, both sampled linearly in time.
pub fn solve_driven(
    config: &SolverConfig,
    transport: Option<&Trajectory>,
    forcing: Option<&Trajectory>,
) -> Result<Trajectory, SolverError> {
    config.validate()?;
    let grid = config.grid()?;
    let steps = config.steps()?;
    if transport.is_some() && config.mode != Mode::Oseen {
        return Err(SolverError::Config("a transport field needs mode = \"oseen\"".into()));
    }
    if let Some(b) = transport {
        check_series("transport", b, grid, config.t_end)?;
    }
    if let Some(f) = forcing {
        check_series("forcing", f, grid, config.t_end)?;
    }
    let mut u = config.initial.build(grid)?;
    ensure_divergence_free(&u)?;
    let stepper = Stepper::new(
        grid,
        config.viscosity,
        config.dt,
        config.mode,
        transport.map(Source::Series),
        forcing.map(Source::Series),
    );
    let mut fields = Vec::with_capacity(steps / config.stride + 1);
    fields.push(u.clone());
    for n in 0..steps {
        u = stepper.step(&u, n as f64 * config.dt, n)?;
        if (n + 1) % config.stride == 0 {
            fields.push(u.clone());
        }
    }
    Trajectory::new(
        grid,
        config.viscosity,
        0.0,
        config.dt * config.stride as f64,
        fields,
        Provenance {
            config_hash: config.hash(),
            seed: config.initial.seed(),
        },
    )
}

/// Solves `∂_t Ψ + νΔΨ + (b·∇)Ψ − ∇Ξ = f`, `Ψ(T) = 0`, by running the
/// time-reversed Oseen problem forward with transport `−b̃` and forcing `−f̃`
/// from zero and reversing the result. The initial condition and mode of
/// `config` are ignored.
pub fn solve_final_value(
    config: &SolverConfig,
    transport: &Trajectory,
    forcing: &Trajectory,
) -> Result<Trajectory, SolverError> {
    let grid = config.grid()?;
    check_series("transport", transport, grid, config.t_end)?;
    check_series("forcing", forcing, grid, config.t_end)?;
    let flip = |traj: &Trajectory| {
        let mut out = traj.map_fields(|f| f.scaled(-1.0));
        out.fields.reverse();
        out
    };
    let (b, f) = (flip(transport), flip(forcing));
    let cfg = SolverConfig {
        initial: InitialCondition::Zero,
        mode: Mode::Oseen,
        ..config.clone()
    };
    let mut w = solve_driven(&cfg, Some(&b), Some(&f))?;
    w.fields.reverse();
    Ok(w)
}

/// `u_(ε)`: spectral low-pass `|k| ≤ 1/ε` followed by time mollification.
pub fn spacetime_smooth(traj: &Trajectory, eps: f64) -> Result<Trajectory, SolverError> {
    if !(eps > 0.0) || 1.0 / eps > (traj.grid.n() / 2) as f64 {
        return Err(SolverError::Config(format!(
            "smoothing width {eps} is below the grid spacing scale 2/n = {}",
            2.0 / traj.grid.n() as f64
        )));
    }
    let filtered = traj.map_fields(|f| low_pass(f, 1.0 / eps));
    Ok(mollify(&filtered, eps)?.trajectory)
}
