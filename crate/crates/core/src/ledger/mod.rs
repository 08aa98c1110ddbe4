//! Energy-budget diagnostics for trajectories.

mod balance;
mod norms;
mod probe;
mod report;

use thiserror::Error;

pub use balance::{
    balance_residual, balance_residuals, cumulative_dissipation, flux_integral, flux_series,
    hopf_identity_residual, FluxSplitting,
};
pub use norms::{mixed_norm, mixed_norm_of_series, trapezoid_weights};
pub use probe::{compare_probes, oseen_regularity_probe, probe_forcing, OseenProbe, ProbeComparison, ProbeRow};
pub use report::{
    compare_refinement, criterion_report, criterion_report_with, default_spaces, LedgerReport,
    LedgerRow, MeasuredSpace, RefinementFlag,
};

use crate::exponent_calculus::ExponentError;
use crate::mollifier::MollifierError;
use crate::solver::SolverError;

/// Value ratio between resolutions `n` and `2n` accepted as refinement stable.
pub const REFINEMENT_RATIO: f64 = 2.0;

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("time {0} is not a snapshot time")]
    NotOnGrid(f64),
    #[error("time {t0} is outside the admissible window ({lo}, {hi})")]
    Window { t0: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Mollifier(#[from] MollifierError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}
