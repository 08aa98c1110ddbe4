use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use super::exponent::{fmt_rational, int, ratio, Exponent, Rational};
use super::ExponentError;

/// Hölder conjugate `q'` with `1/q + 1/q' = 1`.
pub fn holder_conjugate(q: &Exponent) -> Exponent {
    Exponent::from_reciprocal(Rational::one() - q.reciprocal())
        .expect("conjugate of an exponent in [1, ∞] stays in [1, ∞]")
}

/// Result of the three-dimensional Sobolev embedding `W^{1,q} ⊂ L^{q*}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SobolevExponent {
    pub exponent: Exponent,
    /// Set at the critical `q = 3`, where the embedding holds for every finite
    /// exponent but not for `∞`.
    pub finite_only: bool,
}

/// `q* = 3q/(3−q)` for `q < 3`, and `∞` for `q ≥ 3`.
pub fn sobolev_exponent(q: &Exponent) -> SobolevExponent {
    let inv = q.reciprocal() - ratio(1, 3);
    let finite_only = inv.is_zero();
    let exponent = if inv <= Rational::zero() {
        Exponent::infinity()
    } else {
        Exponent::from_reciprocal(inv).expect("1/q - 1/3 < 1")
    };
    SobolevExponent {
        exponent,
        finite_only,
    }
}

/// Time exponent `p_*` with `1/p_* = 1/p − 1/2` (`∞` once `p ≥ 2`).
pub fn star_exponent(p: &Exponent) -> Result<Exponent, ExponentError> {
    if p.is_one() {
        return Err(ExponentError::OutOfRange {
            op: "star_exponent",
            value: p.to_string(),
            range: "(1, ∞]",
        });
    }
    let inv = p.reciprocal() - ratio(1, 2);
    if inv <= Rational::zero() {
        Ok(Exponent::infinity())
    } else {
        Exponent::from_reciprocal(inv)
    }
}

/// The three ranges of the gradient criterion for energy equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum GradientCase {
    /// `3/2 < q < 9/5`
    I,
    /// `9/5 ≤ q ≤ 3`
    II,
    /// `q > 3`
    III,
}

impl fmt::Display for GradientCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GradientCase::I => "i",
            GradientCase::II => "ii",
            GradientCase::III => "iii",
        })
    }
}

/// Case of the gradient criterion that covers `q`, or `None` for `q ≤ 3/2`.
pub fn gradient_case(q: &Exponent) -> Option<GradientCase> {
    if *q <= Exponent::fraction(3, 2).unwrap() {
        None
    } else if *q < Exponent::fraction(9, 5).unwrap() {
        Some(GradientCase::I)
    } else if *q <= Exponent::integer(3).unwrap() {
        Some(GradientCase::II)
    } else {
        Some(GradientCase::III)
    }
}

/// Smallest time exponent `p(q)` for which `∇u ∈ L^p L^q` gives energy
/// equality: `q/(2q−3)`, `5q/(5q−6)` or `1 + 2/q` depending on the range.
pub fn gradient_ranges_time_exponent(q: &Exponent) -> Result<Exponent, ExponentError> {
    let case = gradient_case(q).ok_or_else(|| ExponentError::OutOfRange {
        op: "gradient_ranges_time_exponent",
        value: q.to_string(),
        range: "(3/2, ∞]",
    })?;
    let iq = q.reciprocal().clone();
    // reciprocal of p(q) written in terms of 1/q
    let inv_p = match case {
        GradientCase::I => int(2) - int(3) * &iq,
        GradientCase::II => int(1) - ratio(6, 5) * &iq,
        GradientCase::III => (Rational::one() + int(2) * &iq).recip(),
    };
    Exponent::from_reciprocal(inv_p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeOrder {
    /// The space describes `u` itself.
    Velocity,
    /// The space describes `∇u`.
    Gradient,
}

impl DerivativeOrder {
    pub fn from_index(k: u8) -> Option<Self> {
        match k {
            0 => Some(DerivativeOrder::Velocity),
            1 => Some(DerivativeOrder::Gradient),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            DerivativeOrder::Velocity => 0,
            DerivativeOrder::Gradient => 1,
        }
    }
}

/// `L^r(0,T; W^{k,q})`, recorded as (time exponent, space exponent, k).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MixedNormSpace {
    pub time_exp: Exponent,
    pub space_exp: Exponent,
    pub derivative: DerivativeOrder,
}

impl MixedNormSpace {
    pub fn velocity(time_exp: Exponent, space_exp: Exponent) -> Self {
        MixedNormSpace {
            time_exp,
            space_exp,
            derivative: DerivativeOrder::Velocity,
        }
    }

    pub fn gradient(time_exp: Exponent, space_exp: Exponent) -> Self {
        MixedNormSpace {
            time_exp,
            space_exp,
            derivative: DerivativeOrder::Gradient,
        }
    }
}

impl fmt::Display for MixedNormSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.derivative {
            DerivativeOrder::Velocity => "u",
            DerivativeOrder::Gradient => "∇u",
        };
        write!(f, "{sym} ∈ L^{{{}}} L^{{{}}}", self.time_exp, self.space_exp)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingKind {
    /// `2/r + 3/s`
    ParabolicVelocity,
    /// `2/p + 3/q`
    ParabolicGradient,
    /// `2/r + 2/s`
    Shinbrot,
}

pub fn scaling_weight(space: &MixedNormSpace, kind: ScalingKind) -> Rational {
    let it = space.time_exp.reciprocal();
    let is = space.space_exp.reciprocal();
    match kind {
        ScalingKind::ParabolicVelocity | ScalingKind::ParabolicGradient => {
            int(2) * it + int(3) * is
        }
        ScalingKind::Shinbrot => int(2) * it + int(2) * is,
    }
}

/// Power of `λ` picked up by `‖u‖_{L^r L^s}` under
/// `u ↦ λ^α u(λ^{α+1} t, λ x)`: `α − 3/s − (α+1)/r`.
pub fn general_scaling_exponent(r: &Exponent, s: &Exponent, alpha: &Rational) -> Rational {
    alpha - int(3) * s.reciprocal() - (alpha + Rational::one()) * r.reciprocal()
}

/// Weight against threshold for one criterion; `margin = threshold − weight`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionCheck {
    pub weight: Rational,
    pub threshold: Rational,
    pub margin: Rational,
    pub satisfied: bool,
}

impl CriterionCheck {
    fn at_most(weight: Rational, threshold: Rational, side_condition: bool) -> Self {
        let margin = &threshold - &weight;
        let satisfied = side_condition && margin >= Rational::zero();
        CriterionCheck {
            weight,
            threshold,
            margin,
            satisfied,
        }
    }
}

impl Serialize for CriterionCheck {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CriterionCheck", 4)?;
        st.serialize_field("weight", &fmt_rational(&self.weight))?;
        st.serialize_field("threshold", &fmt_rational(&self.threshold))?;
        st.serialize_field("margin", &fmt_rational(&self.margin))?;
        st.serialize_field("satisfied", &self.satisfied)?;
        st.end()
    }
}

/// Position of a gradient space relative to the gradient-range criterion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradientRangesCheck {
    /// Range that `q` falls in; `None` when `q ≤ 3/2`.
    pub range: Option<GradientCase>,
    pub required_time: Option<Exponent>,
    /// `1/p(q) − 1/p`; nonnegative exactly when the criterion holds.
    pub margin: Option<Rational>,
    /// The single case that applies, or `None`.
    pub applies: Option<GradientCase>,
}

impl Serialize for GradientRangesCheck {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("GradientRangesCheck", 4)?;
        st.serialize_field("range", &self.range.map(|c| c.to_string()))?;
        st.serialize_field("required_time", &self.required_time)?;
        st.serialize_field("margin", &self.margin.as_ref().map(fmt_rational))?;
        st.serialize_field("applies", &self.applies.map(|c| c.to_string()))?;
        st.end()
    }
}

/// Exact verdicts of every criterion for one mixed-norm space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionVerdict {
    pub space: MixedNormSpace,
    /// The velocity class the verdicts below refer to: the space itself, or
    /// `(p, q*)` obtained by Sobolev embedding from a gradient space.
    pub velocity_space: MixedNormSpace,
    pub sobolev_finite_only: bool,
    pub serrin: CriterionCheck,
    pub shinbrot: CriterionCheck,
    pub leray_hopf_interpolation: CriterionCheck,
    pub leslie_shvydkoy: CriterionCheck,
    pub gradient_regularity: Option<CriterionCheck>,
    pub gradient_ranges: Option<GradientRangesCheck>,
}

pub fn classify(space: &MixedNormSpace) -> CriterionVerdict {
    let (velocity_space, sobolev_finite_only) = match space.derivative {
        DerivativeOrder::Velocity => (space.clone(), false),
        DerivativeOrder::Gradient => {
            let emb = sobolev_exponent(&space.space_exp);
            (
                MixedNormSpace::velocity(space.time_exp.clone(), emb.exponent),
                emb.finite_only,
            )
        }
    };

    let r = &velocity_space.time_exp;
    let s = &velocity_space.space_exp;
    let serrin = CriterionCheck::at_most(
        scaling_weight(&velocity_space, ScalingKind::ParabolicVelocity),
        int(1),
        true,
    );
    let shinbrot = CriterionCheck::at_most(
        scaling_weight(&velocity_space, ScalingKind::Shinbrot),
        int(1),
        *s >= Exponent::integer(4).unwrap(),
    );
    let leray_hopf_interpolation = CriterionCheck::at_most(
        scaling_weight(&velocity_space, ScalingKind::ParabolicVelocity),
        ratio(3, 2),
        true,
    );
    let leslie_shvydkoy =
        CriterionCheck::at_most(r.reciprocal() + s.reciprocal(), ratio(1, 2), true);

    let (gradient_regularity, gradient_ranges) = match space.derivative {
        DerivativeOrder::Velocity => (None, None),
        DerivativeOrder::Gradient => {
            let q = &space.space_exp;
            let above = *q > Exponent::fraction(3, 2).unwrap();
            let gr = CriterionCheck::at_most(
                scaling_weight(space, ScalingKind::ParabolicGradient),
                int(2),
                above,
            );
            let range = gradient_case(q);
            let required_time = range.and_then(|_| gradient_ranges_time_exponent(q).ok());
            let margin = required_time
                .as_ref()
                .map(|p_req| p_req.reciprocal() - space.time_exp.reciprocal());
            let applies = match &margin {
                Some(m) if *m >= Rational::zero() => range,
                _ => None,
            };
            (
                Some(gr),
                Some(GradientRangesCheck {
                    range,
                    required_time,
                    margin,
                    applies,
                }),
            )
        }
    };

    CriterionVerdict {
        space: space.clone(),
        velocity_space,
        sobolev_finite_only,
        serrin,
        shinbrot,
        leray_hopf_interpolation,
        leslie_shvydkoy,
        gradient_regularity,
        gradient_ranges,
    }
}

/// Interpolation cases of the nonlinear-term estimate, one per range of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofCase {
    /// `3/2 < q < 9/5`
    I,
    /// `9/5 ≤ q < 12/5`
    II1,
    /// `12/5 ≤ q ≤ 3`
    II2,
    /// `q > 3`
    III,
}

impl ProofCase {
    pub const ALL: [ProofCase; 4] = [ProofCase::I, ProofCase::II1, ProofCase::II2, ProofCase::III];

    pub fn contains(self, q: &Exponent) -> bool {
        let f = |n, d| Exponent::fraction(n, d).unwrap();
        match self {
            ProofCase::I => *q > f(3, 2) && *q < f(9, 5),
            ProofCase::II1 => *q >= f(9, 5) && *q < f(12, 5),
            ProofCase::II2 => *q >= f(12, 5) && *q <= f(3, 1),
            ProofCase::III => *q > f(3, 1) && !q.is_infinite(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ProofCase::I => "i",
            ProofCase::II1 => "ii1",
            ProofCase::II2 => "ii2",
            ProofCase::III => "iii",
        }
    }
}

impl std::str::FromStr for ProofCase {
    type Err = ExponentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "i" | "1" => Ok(ProofCase::I),
            "ii1" | "ii_1" => Ok(ProofCase::II1),
            "ii2" | "ii_2" => Ok(ProofCase::II2),
            "iii" | "3" => Ok(ProofCase::III),
            other => Err(ExponentError::Parse(other.to_string())),
        }
    }
}

/// Interpolation parameter used for each case:
/// `(3−2q)/(3(q−2))`, `(5q−9)/(5q−6)`, `(5q−12)/(5q−6)`, `1 − 1/q`.
pub fn proof_case_theta(case: ProofCase, q: &Exponent) -> Result<Rational, ExponentError> {
    if !case.contains(q) {
        return Err(ExponentError::OutOfRange {
            op: "proof_case_theta",
            value: q.to_string(),
            range: match case {
                ProofCase::I => "(3/2, 9/5)",
                ProofCase::II1 => "[9/5, 12/5)",
                ProofCase::II2 => "[12/5, 3]",
                ProofCase::III => "(3, ∞)",
            },
        });
    }
    let q = q.value().expect("finite in every case range");
    let theta = match case {
        ProofCase::I => (int(3) - int(2) * &q) / (int(3) * (&q - int(2))),
        ProofCase::II1 => (int(5) * &q - int(9)) / (int(5) * &q - int(6)),
        ProofCase::II2 => (int(5) * &q - int(12)) / (int(5) * &q - int(6)),
        ProofCase::III => Rational::one() - q.recip(),
    };
    Ok(theta)
}
