//! Exact arithmetic over Lebesgue exponents: Hölder and Sobolev relations,
//! energy-equality criteria, scaling weights, and the Oseen bootstrap.

mod bootstrap;
mod criteria;
mod exponent;
mod region;

pub use bootstrap::{
    bootstrap_step, bootstrap_trace, closed_form_forcing, shinbrot_endgame, BootstrapStep,
    BootstrapTrace, Endgame, StopReason, DEFAULT_MAX_STEPS,
};
pub use bootstrap::iterate as bootstrap_iterate;
pub use criteria::{
    classify, general_scaling_exponent, gradient_case, gradient_ranges_time_exponent,
    holder_conjugate, proof_case_theta, scaling_weight, sobolev_exponent, star_exponent,
    CriterionCheck, CriterionVerdict, DerivativeOrder, GradientCase, GradientRangesCheck,
    MixedNormSpace, ProofCase, ScalingKind, SobolevExponent,
};
pub use exponent::{fmt_rational, int, parse_rational, ratio, Exponent, ExponentPair, Rational};
pub use region::{region_at, region_diagram, write_region_csv, Region, RegionGrid, RegionRow};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExponentError {
    #[error("malformed exponent {0:?}: expected an integer, a fraction n/d, or inf")]
    Parse(String),
    #[error("exponent {0} is below 1")]
    BelowOne(String),
    #[error("{op}: {value} outside {range}")]
    OutOfRange {
        op: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("iteration stopped: {0}")]
    IterationStopped(String),
    #[error("below Shinbrot regime: 1/r + 1/s = {0} > 1/2")]
    BelowShinbrotRegime(String),
}
