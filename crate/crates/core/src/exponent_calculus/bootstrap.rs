//! Regularity exchange for the Oseen adjoint problem.
//!
//! Each step applies Hölder's inequality with the transport class `L^r L^s` to
//! the current gradient class, giving the forcing class `(α_n, β_n)`, and then
//! maximal regularity followed by the mixed-derivative embedding turns the
//! forcing class back into a gradient class `(star(α_n), β_n)`.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::criteria::{holder_conjugate, star_exponent, MixedNormSpace};
use super::exponent::{fmt_rational, int, ratio, Exponent, ExponentPair, Rational};
use super::ExponentError;

pub const DEFAULT_MAX_STEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootstrapStep {
    pub forcing: ExponentPair,
    pub next_grad: ExponentPair,
}

impl BootstrapStep {
    /// True once any produced exponent reached `1` or `∞`, which ends the
    /// iteration.
    pub fn leaves_open_range(&self) -> bool {
        [
            &self.forcing.time,
            &self.forcing.space,
            &self.next_grad.time,
            &self.next_grad.space,
        ]
        .iter()
        .any(|e| !e.is_interior())
    }
}

fn holder_product(a: &Exponent, b: &Exponent) -> Result<Exponent, ExponentError> {
    let inv = a.reciprocal() + b.reciprocal();
    if inv > Rational::one() {
        return Err(ExponentError::IterationStopped(format!(
            "Hölder product of {a} and {b} drops below 1"
        )));
    }
    Exponent::from_reciprocal(inv)
}

pub fn bootstrap_step(
    grad: &ExponentPair,
    r: &Exponent,
    s: &Exponent,
) -> Result<BootstrapStep, ExponentError> {
    for e in [&grad.time, &grad.space, r, s] {
        if e.is_one() {
            return Err(ExponentError::OutOfRange {
                op: "bootstrap_step",
                value: e.to_string(),
                range: "(1, ∞]",
            });
        }
    }
    let forcing = ExponentPair::new(
        holder_product(r, &grad.time)?,
        holder_product(s, &grad.space)?,
    );
    if forcing.time.is_one() {
        return Err(ExponentError::IterationStopped(
            "forcing time exponent reached 1".into(),
        ));
    }
    let next_grad = ExponentPair::new(star_exponent(&forcing.time)?, forcing.space.clone());
    Ok(BootstrapStep { forcing, next_grad })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    TargetReached,
    ExponentLeftOpenRange,
    MaxSteps,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::TargetReached => "target-reached",
            StopReason::ExponentLeftOpenRange => "exponent-left-(1,inf)",
            StopReason::MaxSteps => "max-steps",
        })
    }
}

/// Gradient classes start at the energy class `(2, 2)` as `gradient_seq[0]`;
/// `forcing_seq[i]` is the forcing class of step `n = i + 1` and
/// `gradient_seq[i + 1]` the gradient class it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BootstrapTrace {
    pub r: Exponent,
    pub s: Exponent,
    pub gradient_seq: Vec<ExponentPair>,
    pub forcing_seq: Vec<ExponentPair>,
    pub stop_reason: StopReason,
}

impl BootstrapTrace {
    /// `1/r + 1/s`.
    pub fn gamma(&self) -> Rational {
        self.r.reciprocal() + self.s.reciprocal()
    }
}

/// Iterates [`bootstrap_step`] from the energy class. Transports with
/// `1/r + 1/s > 1/2` are rejected.
pub fn bootstrap_trace(
    r: &Exponent,
    s: &Exponent,
    max_steps: usize,
) -> Result<BootstrapTrace, ExponentError> {
    let gamma = r.reciprocal() + s.reciprocal();
    if gamma > ratio(1, 2) {
        return Err(ExponentError::BelowShinbrotRegime(fmt_rational(&gamma)));
    }
    iterate(r, s, max_steps)
}

/// Same iteration without the regime check; used when a measured transport is
/// probed against a class it may not belong to.
pub fn iterate(
    r: &Exponent,
    s: &Exponent,
    max_steps: usize,
) -> Result<BootstrapTrace, ExponentError> {
    let two = Exponent::integer(2).unwrap();
    let target_space = holder_conjugate(s);
    let mut trace = BootstrapTrace {
        r: r.clone(),
        s: s.clone(),
        gradient_seq: vec![ExponentPair::new(two.clone(), two)],
        forcing_seq: Vec::new(),
        stop_reason: StopReason::MaxSteps,
    };
    while trace.forcing_seq.len() < max_steps {
        let grad = trace.gradient_seq.last().unwrap();
        let step = match bootstrap_step(grad, r, s) {
            Ok(step) => step,
            Err(ExponentError::IterationStopped(_)) => {
                trace.stop_reason = StopReason::ExponentLeftOpenRange;
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        let reached = step.forcing.space <= target_space;
        let leaves = step.leaves_open_range();
        trace.forcing_seq.push(step.forcing);
        trace.gradient_seq.push(step.next_grad);
        if reached {
            trace.stop_reason = StopReason::TargetReached;
            return Ok(trace);
        }
        if leaves {
            trace.stop_reason = StopReason::ExponentLeftOpenRange;
            return Ok(trace);
        }
    }
    Ok(trace)
}

/// `(s/(s−n), 2s/(2n+s))`: the forcing class after `n` steps when
/// `1/r + 1/s = 1/2`, written directly in terms of `s`.
pub fn closed_form_forcing(s: &Rational, n: u64) -> Result<ExponentPair, ExponentError> {
    let n = int(n as i64);
    if *s <= n {
        return Err(ExponentError::OutOfRange {
            op: "closed_form_forcing",
            value: fmt_rational(s),
            range: "s > n",
        });
    }
    Ok(ExponentPair::new(
        Exponent::new(s / (s - &n))?,
        Exponent::new(int(2) * s / (int(2) * &n + s))?,
    ))
}

/// Final interpolation between two consecutive bootstrap classes that lands on
/// the dual class `L^{2s/(2+s)} L^{s/(s−1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endgame {
    pub s: Rational,
    /// `N = [s/2] − 1`.
    pub steps: u64,
    /// `θ = ([s/2] + 1) − s/2`; equals one for even `s`.
    pub theta: Rational,
    pub target: MixedNormSpace,
    pub lower: ExponentPair,
    pub upper: ExponentPair,
    pub even: bool,
}

impl Endgame {
    pub fn render(&self) -> String {
        format!(
            "N={} theta={} target L^{{{}}}L^{{{}}}",
            self.steps,
            fmt_rational(&self.theta),
            self.target.time_exp,
            self.target.space_exp
        )
    }
}

pub fn shinbrot_endgame(s: &Exponent) -> Result<Endgame, ExponentError> {
    let sv = match s.value() {
        Some(v) if v > int(4) => v,
        _ => {
            return Err(ExponentError::OutOfRange {
                op: "shinbrot_endgame",
                value: s.to_string(),
                range: "(4, ∞)",
            })
        }
    };
    let half = &sv / int(2);
    let floor_half = half.numer().div_floor(half.denom());
    let floor_half_q = Rational::from_integer(floor_half.clone());
    let steps = (&floor_half_q - int(1))
        .to_integer()
        .to_u64()
        .expect("s > 4 gives N ≥ 1");
    let theta = &floor_half_q + int(1) - &half;
    let even = half.denom().is_one();
    let target = MixedNormSpace::velocity(
        Exponent::new(int(2) * &sv / (int(2) + &sv))?,
        holder_conjugate(s),
    );
    let lower = closed_form_forcing(&sv, steps)?;
    let upper = if even {
        lower.clone()
    } else {
        closed_form_forcing(&sv, steps + 1)?
    };
    debug_assert!(theta > Rational::zero() && theta <= Rational::one());
    Ok(Endgame {
        s: sv,
        steps,
        theta,
        target,
        lower,
        upper,
        even,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(n: i64, d: i64) -> Exponent {
        Exponent::fraction(n, d).unwrap()
    }

    fn pair(a: (i64, i64), b: (i64, i64)) -> ExponentPair {
        ExponentPair::fractions(a, b).unwrap()
    }

    #[test]
    fn step_examples() {
        let st = bootstrap_step(&pair((2, 1), (2, 1)), &e(3, 1), &e(6, 1)).unwrap();
        assert_eq!(st.forcing, pair((6, 5), (3, 2)));
        assert_eq!(st.next_grad, pair((3, 1), (3, 2)));
        assert!(!st.leaves_open_range());

        let st = bootstrap_step(&pair((3, 1), (3, 2)), &e(3, 1), &e(6, 1)).unwrap();
        assert_eq!(st.forcing, pair((3, 2), (6, 5)));
        assert_eq!(st.next_grad, pair((6, 1), (6, 5)));

        let inf = Exponent::infinity();
        let st = bootstrap_step(&pair((2, 1), (2, 1)), &inf, &inf).unwrap();
        assert_eq!(st.forcing, pair((2, 1), (2, 1)));
        assert_eq!(st.next_grad, ExponentPair::new(inf, e(2, 1)));
        assert!(st.leaves_open_range());
    }

    #[test]
    fn step_rejects_endpoint_inputs() {
        assert!(bootstrap_step(&pair((1, 1), (2, 1)), &e(3, 1), &e(6, 1)).is_err());
        assert!(matches!(
            bootstrap_step(&pair((3, 2), (2, 1)), &e(3, 2), &e(6, 1)),
            Err(ExponentError::IterationStopped(_))
        ));
    }

    #[test]
    fn trace_examples() {
        let t = bootstrap_trace(&e(3, 1), &e(6, 1), DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(t.forcing_seq, vec![pair((6, 5), (3, 2)), pair((3, 2), (6, 5))]);
        assert_eq!(t.stop_reason, StopReason::TargetReached);

        let t = bootstrap_trace(&e(4, 1), &e(4, 1), DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(t.forcing_seq, vec![pair((4, 3), (4, 3))]);
        assert_eq!(t.stop_reason, StopReason::TargetReached);

        let t = bootstrap_trace(&e(10, 3), &e(5, 1), DEFAULT_MAX_STEPS).unwrap();
        assert_eq!(t.forcing_seq, vec![pair((5, 4), (10, 7)), pair((5, 3), (10, 9))]);
        assert_eq!(t.stop_reason, StopReason::TargetReached);
    }

    #[test]
    fn trace_rejects_subcritical_transport() {
        assert!(matches!(
            bootstrap_trace(&e(2, 1), &e(4, 1), 8),
            Err(ExponentError::BelowShinbrotRegime(_))
        ));
    }

    #[test]
    fn trace_bounded_transport_exits() {
        let inf = Exponent::infinity();
        let t = bootstrap_trace(&inf, &inf, 8).unwrap();
        assert_eq!(t.forcing_seq.len(), 1);
        assert_eq!(t.stop_reason, StopReason::ExponentLeftOpenRange);
    }

    #[test]
    fn trace_respects_max_steps() {
        let t = bootstrap_trace(&e(3, 1), &e(6, 1), 1).unwrap();
        assert_eq!(t.forcing_seq.len(), 1);
        assert_eq!(t.stop_reason, StopReason::MaxSteps);
    }

    #[test]
    fn endgame_examples() {
        let g = shinbrot_endgame(&e(6, 1)).unwrap();
        assert_eq!(g.steps, 2);
        assert_eq!(g.theta, int(1));
        assert_eq!(g.target, MixedNormSpace::velocity(e(3, 2), e(6, 5)));
        assert_eq!(g.render(), "N=2 theta=1 target L^{3/2}L^{6/5}");

        let g = shinbrot_endgame(&e(5, 1)).unwrap();
        assert_eq!((g.steps, g.theta.clone()), (1, ratio(1, 2)));
        assert_eq!(g.target, MixedNormSpace::velocity(e(10, 7), e(5, 4)));

        let g = shinbrot_endgame(&e(9, 2)).unwrap();
        assert_eq!((g.steps, g.theta.clone()), (1, ratio(3, 4)));
        assert_eq!(g.target, MixedNormSpace::velocity(e(18, 13), e(9, 7)));

        assert!(shinbrot_endgame(&e(4, 1)).is_err());
        assert!(shinbrot_endgame(&Exponent::infinity()).is_err());
    }
}
