use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::snapshot::{self, Snapshot};
use crate::spectral::{relative_divergence, FourierField, Grid, DIVERGENCE_TOLERANCE};

/// Where a trajectory came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: Option<u64>,
}

/// Uniformly spaced snapshots `u(t0 + i·dt)`. Times are derived from the
/// index, so time reversal is an exact involution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub viscosity: f64,
    pub t0: f64,
    pub dt: f64,
    pub fields: Vec<FourierField>,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn new(
        grid: Grid,
        viscosity: f64,
        t0: f64,
        dt: f64,
        fields: Vec<FourierField>,
        provenance: Provenance,
    ) -> Result<Self, SolverError> {
        if fields.is_empty() {
            return Err(SolverError::Trajectory("no snapshots".into()));
        }
        if fields.len() > 1 && !(dt > 0.0 && dt.is_finite()) {
            return Err(SolverError::Trajectory(format!("invalid spacing {dt}")));
        }
        for (i, f) in fields.iter().enumerate() {
            if f.grid != grid {
                return Err(SolverError::Trajectory(format!("snapshot {i} is on another grid")));
            }
            let div = relative_divergence(f);
            if div > DIVERGENCE_TOLERANCE {
                return Err(SolverError::Trajectory(format!(
                    "snapshot {i} is not divergence free ({div:e})"
                )));
            }
        }
        Ok(Trajectory {
            grid,
            viscosity,
            t0,
            dt,
            fields,
            provenance,
        })
    }

    /// Builds a trajectory from explicit times, which must be uniform to 1e−12.
    pub fn from_times(
        grid: Grid,
        viscosity: f64,
        times: &[f64],
        fields: Vec<FourierField>,
        provenance: Provenance,
    ) -> Result<Self, SolverError> {
        if times.len() != fields.len() || times.is_empty() {
            return Err(SolverError::Trajectory("times and fields differ in length".into()));
        }
        let t0 = times[0];
        let dt = if times.len() > 1 {
            (times[times.len() - 1] - t0) / (times.len() - 1) as f64
        } else {
            0.0
        };
        for (i, t) in times.iter().enumerate() {
            let expected = t0 + i as f64 * dt;
            if (t - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                return Err(SolverError::Trajectory(format!(
                    "times are not uniform at index {i}"
                )));
            }
        }
        Self::new(grid, viscosity, t0, dt, fields, provenance)
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.time(i)).collect()
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn span(&self) -> f64 {
        (self.len() - 1) as f64 * self.dt
    }

    /// Index of the snapshot at time `t`, if `t` lies on the grid.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        if self.len() == 1 {
            return ((t - self.t0).abs() <= 1e-12).then_some(0);
        }
        let x = (t - self.t0) / self.dt;
        let i = x.round();
        if i < 0.0 || i as usize >= self.len() || (x - i).abs() > 1e-9 {
            return None;
        }
        Some(i as usize)
    }

    /// Linear interpolation in time; `t` may overshoot the ends by 1e−9 of
    /// the span.
    pub fn sample(&self, t: f64) -> Result<FourierField, SolverError> {
        let n = self.len();
        if n == 1 {
            return Ok(self.fields[0].clone());
        }
        let tol = 1e-9 * self.span().max(1.0);
        if t < self.t0 - tol || t > self.t_end() + tol {
            return Err(SolverError::Mismatch(format!(
                "time {t} outside [{}, {}]",
                self.t0,
                self.t_end()
            )));
        }
        let x = ((t - self.t0) / self.dt).clamp(0.0, (n - 1) as f64);
        let i = (x.floor() as usize).min(n - 2);
        let w = x - i as f64;
        if w == 0.0 {
            return Ok(self.fields[i].clone());
        }
        let mut out = self.fields[i].scaled(1.0 - w);
        out.add_scaled(&self.fields[i + 1], w);
        Ok(out)
    }

    pub fn map_fields(&self, f: impl Fn(&FourierField) -> FourierField) -> Trajectory {
        Trajectory {
            fields: self.fields.iter().map(f).collect(),
            ..self.clone()
        }
    }

    pub fn energies(&self) -> Vec<f64> {
        self.fields.iter().map(FourierField::energy).collect()
    }

    pub fn enstrophies(&self) -> Vec<f64> {
        self.fields.iter().map(FourierField::enstrophy).collect()
    }

    /// Writes `snap_NNNNNN.nsef` files and returns their paths.
    pub fn save_dir(&self, dir: &Path) -> Result<Vec<PathBuf>, SolverError> {
        fs::create_dir_all(dir).map_err(|e| SolverError::Io(dir.display().to_string(), e))?;
        let mut paths = Vec::with_capacity(self.len());
        for (i, f) in self.fields.iter().enumerate() {
            let path = dir.join(format!("snap_{i:06}.nsef"));
            let snap = Snapshot::from_fourier(self.time(i), self.viscosity, f);
            snapshot::write_file(&path, &snap)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// Loads every `*.nsef` file of a directory in name order.
    pub fn load_dir(dir: &Path, provenance: Provenance) -> Result<Trajectory, SolverError> {
        let entries =
            fs::read_dir(dir).map_err(|e| SolverError::Io(dir.display().to_string(), e))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "nsef"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            return Err(SolverError::Trajectory(format!(
                "no snapshots in {}",
                dir.display()
            )));
        }
        let mut times = Vec::with_capacity(paths.len());
        let mut fields = Vec::with_capacity(paths.len());
        let mut meta: Option<(Grid, f64)> = None;
        for path in &paths {
            let snap = snapshot::read_file(path)?;
            let g = snap.field.grid;
            match meta {
                None => meta = Some((g, snap.viscosity)),
                Some((g0, nu0)) if g0 != g || nu0 != snap.viscosity => {
                    return Err(SolverError::Mismatch(format!(
                        "{} differs in grid or viscosity",
                        path.display()
                    )))
                }
                _ => {}
            }
            times.push(snap.time);
            fields.push(FourierField::from_real(&snap.field));
        }
        let (grid, viscosity) = meta.unwrap();
        Trajectory::from_times(grid, viscosity, &times, fields, provenance)
    }
}

/// `g̃(t) = g(T − t)` on the same time interval.
pub fn reverse(traj: &Trajectory) -> Trajectory {
    let mut out = traj.clone();
    out.fields.reverse();
    out
}
