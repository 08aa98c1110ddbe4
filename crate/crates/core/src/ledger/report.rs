use std::io::{self, Write};

use serde::Serialize;

use super::balance::{balance_residuals, cumulative_dissipation, flux_series};
use super::norms::{mixed_norm_of_series, trapezoid_weights};
use super::REFINEMENT_RATIO;
use crate::exponent_calculus::{
    classify, CriterionVerdict, DerivativeOrder, Exponent, MixedNormSpace,
};
use crate::solver::Trajectory;
use crate::spectral::{gradient, lq_norm_samples};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerRow {
    pub t: f64,
    pub energy: f64,
    pub enstrophy: f64,
    pub dissipation: f64,
    pub residual: f64,
    pub flux: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasuredSpace {
    pub space: MixedNormSpace,
    pub norm: f64,
    pub verdict: CriterionVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LedgerReport {
    pub n: usize,
    pub viscosity: f64,
    pub dt: f64,
    pub snapshots: usize,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub initial_energy: f64,
    pub max_abs_residual: f64,
    /// `∫ ((u·∇)u, u) dt`.
    pub flux_integral: f64,
    pub spaces: Vec<MeasuredSpace>,
    #[serde(skip)]
    pub rows: Vec<LedgerRow>,
}

fn frac(n: i64, d: i64) -> Exponent {
    Exponent::fraction(n, d).expect("valid exponent")
}

/// Shinbrot pairs and the energy class for `u`; one pair per gradient range
/// and the energy class for `∇u`.
pub fn default_spaces() -> Vec<MixedNormSpace> {
    vec![
        MixedNormSpace::velocity(Exponent::infinity(), frac(2, 1)),
        MixedNormSpace::velocity(frac(4, 1), frac(4, 1)),
        MixedNormSpace::velocity(frac(3, 1), frac(6, 1)),
        MixedNormSpace::velocity(frac(8, 3), frac(8, 1)),
        MixedNormSpace::gradient(frac(2, 1), frac(2, 1)),
        MixedNormSpace::gradient(frac(8, 1), frac(8, 5)),
        MixedNormSpace::gradient(frac(3, 1), frac(9, 5)),
        MixedNormSpace::gradient(frac(3, 2), frac(4, 1)),
    ]
}

pub fn criterion_report(traj: &Trajectory) -> LedgerReport {
    criterion_report_with(traj, &default_spaces())
}

pub fn criterion_report_with(traj: &Trajectory, spaces: &[MixedNormSpace]) -> LedgerReport {
    let g = traj.grid;
    let energy = traj.energies();
    let enstrophy = traj.enstrophies();
    let dissipation = cumulative_dissipation(traj);
    let residual = balance_residuals(traj);
    let flux = flux_series(traj);

    // pointwise |u| and |∇u| once per snapshot, shared by every space
    let mut norms = vec![Vec::with_capacity(traj.len()); spaces.len()];
    let need_grad = spaces.iter().any(|s| s.derivative == DerivativeOrder::Gradient);
    for f in &traj.fields {
        let mag = f.to_real().magnitude();
        let grad = need_grad.then(|| gradient(f).frobenius());
        for (space, out) in spaces.iter().zip(norms.iter_mut()) {
            let samples = match space.derivative {
                DerivativeOrder::Velocity => &mag,
                DerivativeOrder::Gradient => grad.as_ref().unwrap(),
            };
            out.push(lq_norm_samples(samples, g, &space.space_exp));
        }
    }
    let measured = spaces
        .iter()
        .zip(&norms)
        .map(|(space, series)| MeasuredSpace {
            space: space.clone(),
            norm: mixed_norm_of_series(series, traj.dt, &space.time_exp),
            verdict: classify(space),
        })
        .collect();

    let w = trapezoid_weights(traj.len(), traj.dt);
    let flux_integral = if traj.len() < 2 {
        0.0
    } else {
        flux.iter().zip(&w).map(|(f, w)| f * w).sum()
    };
    let rows = (0..traj.len())
        .map(|i| LedgerRow {
            t: traj.time(i),
            energy: energy[i],
            enstrophy: enstrophy[i],
            dissipation: dissipation[i],
            residual: residual[i],
            flux: flux[i],
        })
        .collect();
    LedgerReport {
        n: g.n(),
        viscosity: traj.viscosity,
        dt: traj.dt,
        snapshots: traj.len(),
        config_hash: traj.provenance.config_hash.clone(),
        seed: traj.provenance.seed,
        initial_energy: energy[0],
        max_abs_residual: residual.iter().fold(0.0, |m, r| m.max(r.abs())),
        flux_integral,
        spaces: measured,
        rows,
    }
}

impl LedgerReport {
    /// CSV with header `t,energy,enstrophy,dissipation,residual,flux`; numbers
    /// use the shortest representation that parses back exactly.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,energy,enstrophy,dissipation,residual,flux")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.t, r.energy, r.enstrophy, r.dissipation, r.residual, r.flux
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// How a measured norm moved between resolutions `n` and `2n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RefinementFlag {
    pub space: MixedNormSpace,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
    /// `fine/coarse ≤ 2`, the operational meaning of "finite".
    pub stable: bool,
    /// The norm grew by more than five percent.
    pub grows: bool,
}

pub fn compare_refinement(coarse: &LedgerReport, fine: &LedgerReport) -> Vec<RefinementFlag> {
    coarse
        .spaces
        .iter()
        .zip(&fine.spaces)
        .map(|(a, b)| {
            let ratio = if a.norm == 0.0 && b.norm == 0.0 { 1.0 } else { b.norm / a.norm };
            RefinementFlag {
                space: a.space.clone(),
                coarse: a.norm,
                fine: b.norm,
                ratio,
                stable: ratio.is_finite() && ratio <= REFINEMENT_RATIO,
                grows: !ratio.is_finite() || ratio > 1.05,
            }
        })
        .collect()
}
