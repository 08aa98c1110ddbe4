use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SolverError;
use crate::spectral::{
    leray_project, random_rough_field, FourierField, Grid, SpectralError,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    NavierStokes,
    Stokes,
    Oseen,
}

fn unit() -> f64 {
    1.0
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialCondition {
    Zero,
    /// `A (sin x cos y, −cos x sin y, 0)`, decaying as `e^{−2νt}`.
    TaylorGreen {
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `A (sin x cos y cos z, −cos x sin y cos z, 0)`.
    TaylorGreen3d {
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `A â cos(k·x)` with `â ⊥ k`.
    SingleMode {
        k: [i64; 3],
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// Rough random field rescaled to root-mean-square speed `rms`.
    Rough {
        sigma: f64,
        seed: u64,
        #[serde(default = "unit")]
        rms: f64,
    },
    Snapshot { path: PathBuf },
}

impl InitialCondition {
    pub fn seed(&self) -> Option<u64> {
        match self {
            InitialCondition::Rough { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn build(&self, grid: Grid) -> Result<FourierField, SolverError> {
        let field = match *self {
            InitialCondition::Zero => FourierField::zeros(grid),
            InitialCondition::TaylorGreen { amplitude } => taylor_green(grid, amplitude),
            InitialCondition::TaylorGreen3d { amplitude } => taylor_green_3d(grid, amplitude),
            InitialCondition::SingleMode { k, amplitude } => single_mode(grid, k, amplitude)?,
            InitialCondition::Rough { sigma, seed, rms } => {
                let mut f = random_rough_field(sigma, seed, grid)?;
                let now = (f.norm_sq() / grid.volume()).sqrt();
                if now > 0.0 {
                    f.scale(rms / now);
                }
                f
            }
            InitialCondition::Snapshot { ref path } => {
                let snap = crate::snapshot::read_file(path)?;
                if snap.field.grid != grid {
                    return Err(SolverError::Mismatch(format!(
                        "{} has n={}, config has n={}",
                        path.display(),
                        snap.field.grid.n(),
                        grid.n()
                    )));
                }
                leray_project(&FourierField::from_real(&snap.field))
            }
        };
        Ok(field)
    }
}

pub fn taylor_green(grid: Grid, amplitude: f64) -> FourierField {
    FourierField::from_fn(grid, |x, y, _| {
        [amplitude * x.sin() * y.cos(), -amplitude * x.cos() * y.sin(), 0.0]
    })
}

pub fn taylor_green_3d(grid: Grid, amplitude: f64) -> FourierField {
    FourierField::from_fn(grid, |x, y, z| {
        [
            amplitude * x.sin() * y.cos() * z.cos(),
            -amplitude * x.cos() * y.sin() * z.cos(),
            0.0,
        ]
    })
}

pub fn single_mode(grid: Grid, k: [i64; 3], amplitude: f64) -> Result<FourierField, SolverError> {
    let h = (grid.n() / 2) as i64;
    if k == [0, 0, 0] || k.iter().any(|c| c.abs() >= h) {
        return Err(SolverError::Config(format!(
            "wavevector {k:?} is zero or not resolved on n={}",
            grid.n()
        )));
    }
    let kf = k.map(|c| c as f64);
    let axis = if k[0] == 0 && k[1] == 0 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
    let mut a = [
        kf[1] * axis[2] - kf[2] * axis[1],
        kf[2] * axis[0] - kf[0] * axis[2],
        kf[0] * axis[1] - kf[1] * axis[0],
    ];
    let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    a.iter_mut().for_each(|c| *c *= amplitude / norm);
    Ok(FourierField::from_fn(grid, |x, y, z| {
        let phase = (kf[0] * x + kf[1] * y + kf[2] * z).cos();
        [a[0] * phase, a[1] * phase, a[2] * phase]
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub viscosity: f64,
    pub initial: InitialCondition,
    /// Record every `stride`-th step.
    #[serde(default = "one")]
    pub stride: usize,
    #[serde(default)]
    pub mode: Mode,
}

impl SolverConfig {
    pub fn grid(&self) -> Result<Grid, SolverError> {
        Grid::new(self.n).map_err(|e: SpectralError| SolverError::Config(e.to_string()))
    }

    /// Number of time steps; `t_end` must be a whole number of steps.
    pub fn steps(&self) -> Result<usize, SolverError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SolverError::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(SolverError::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(SolverError::Config(format!(
                "t_end {} is not a multiple of dt {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.grid()?;
        let steps = self.steps()?;
        if !(self.viscosity > 0.0 && self.viscosity.is_finite()) {
            return Err(SolverError::Config(format!(
                "viscosity must be positive, got {}",
                self.viscosity
            )));
        }
        if self.stride == 0 || steps % self.stride != 0 {
            return Err(SolverError::Config(format!(
                "stride {} must divide the step count {steps}",
                self.stride
            )));
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
