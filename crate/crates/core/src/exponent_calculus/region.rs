use std::fmt;
use std::io::{self, Write};

use num_traits::{One, Zero};

use super::criteria::{gradient_case, gradient_ranges_time_exponent, GradientCase};
use super::exponent::{fmt_rational, int, ratio, Exponent, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    GradientRegularity,
    Ranges(GradientCase),
    None,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::GradientRegularity => "gradient-regularity",
            Region::Ranges(GradientCase::I) => "ranges-i",
            Region::Ranges(GradientCase::II) => "ranges-ii",
            Region::Ranges(GradientCase::III) => "ranges-iii",
            Region::None => "none",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Axis ticks `i/divisions` for `0 < i < divisions`, merged with any extra
/// ticks in `(0, 1)`. The same ticks are used for `1/q` and `1/p`.
#[derive(Clone, Debug)]
pub struct RegionGrid {
    pub divisions: u32,
    pub extra_ticks: Vec<Rational>,
}

impl RegionGrid {
    pub fn new(divisions: u32) -> Self {
        RegionGrid {
            divisions,
            extra_ticks: Vec::new(),
        }
    }

    /// Grid that also passes through the reference points `q ∈ {9/5, 2, 3}`
    /// and `p ∈ {2, 3}`.
    pub fn with_landmarks(divisions: u32) -> Self {
        RegionGrid {
            divisions,
            extra_ticks: vec![ratio(1, 3), ratio(1, 2), ratio(5, 9)],
        }
    }

    pub fn ticks(&self) -> Vec<Rational> {
        let d = i64::from(self.divisions.max(1));
        let mut ticks: Vec<Rational> = (1..d).map(|i| ratio(i, d)).collect();
        ticks.extend(
            self.extra_ticks
                .iter()
                .filter(|t| **t > Rational::zero() && **t < Rational::one())
                .cloned(),
        );
        ticks.sort();
        ticks.dedup();
        ticks
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionRow {
    pub inv_q: Rational,
    pub inv_p: Rational,
    pub region: Region,
}

/// Strongest criterion met by `∇u ∈ L^p L^q`, given `(1/q, 1/p)`: the
/// scaling-invariant gradient condition `2/p + 3/q ≤ 2` first, then the
/// gradient ranges, else `None`.
pub fn region_at(inv_q: &Rational, inv_p: &Rational) -> Region {
    let three_halves_inv = ratio(2, 3);
    if *inv_q < three_halves_inv && int(2) * inv_p + int(3) * inv_q <= int(2) {
        return Region::GradientRegularity;
    }
    let Ok(q) = Exponent::from_reciprocal(inv_q.clone()) else {
        return Region::None;
    };
    match (gradient_case(&q), gradient_ranges_time_exponent(&q)) {
        (Some(case), Ok(p_req)) if inv_p <= p_req.reciprocal() => Region::Ranges(case),
        _ => Region::None,
    }
}

pub fn region_diagram(grid: &RegionGrid) -> Vec<RegionRow> {
    let ticks = grid.ticks();
    let mut rows = Vec::with_capacity(ticks.len() * ticks.len());
    for inv_q in &ticks {
        for inv_p in &ticks {
            rows.push(RegionRow {
                inv_q: inv_q.clone(),
                inv_p: inv_p.clone(),
                region: region_at(inv_q, inv_p),
            });
        }
    }
    rows
}

pub fn write_region_csv<W: Write>(rows: &[RegionRow], mut out: W) -> io::Result<()> {
    writeln!(out, "inv_q,inv_p,region")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{}",
            fmt_rational(&row.inv_q),
            fmt_rational(&row.inv_p),
            row.region
        )?;
    }
    Ok(())
}
