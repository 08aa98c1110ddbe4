use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::Serialize;

use super::norms::mixed_norm_of_series;
use super::{LedgerError, REFINEMENT_RATIO};
use crate::exponent_calculus::{
    bootstrap_iterate, closed_form_forcing, fmt_rational, ratio, Exponent, ExponentPair,
    StopReason,
};
use crate::solver::{solve_final_value, InitialCondition, Mode, SolverConfig, Trajectory};
use crate::spectral::{gradient_part, lq_norm_samples, transport_term, FourierField, Grid};

/// Divergence-free forcing `sin²(πt/T) (sin z, sin x, sin y)` on the
/// transport's time grid, built directly from its Fourier coefficients.
pub fn probe_forcing(like: &Trajectory) -> Trajectory {
    let g = like.grid;
    let span = like.span();
    let mut out = like.clone();
    for (i, f) in out.fields.iter_mut().enumerate() {
        let t = i as f64 * like.dt;
        *f = sine_triplet(g, (PI * t / span).sin().powi(2));
    }
    out
}

fn sine_triplet(g: Grid, amplitude: f64) -> FourierField {
    let mut f = FourierField::zeros(g);
    let c = Complex64::new(0.0, -0.5 * amplitude);
    let at = |k: [i64; 3]| g.spec_index(k[0] as usize, g.index_of(k[1]), g.index_of(k[2]));
    // sin z in the x component
    f.comps[0][at([0, 0, 1])] = c;
    f.comps[0][at([0, 0, -1])] = c.conj();
    // sin x in the y component; the conjugate half is implicit
    f.comps[1][at([1, 0, 0])] = c;
    // sin y in the z component
    f.comps[2][at([0, 1, 0])] = c;
    f.comps[2][at([0, -1, 0])] = c.conj();
    f
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub step: usize,
    pub pair: ExponentPair,
    /// `(s/(s−n), 2s/(2n+s))`, present when `1/r + 1/s = 1/2`.
    pub closed_form: Option<ExponentPair>,
    /// `‖(b·∇)Ψ‖` in the probed mixed norm.
    pub advection_norm: f64,
    /// `‖∇Ξ‖` in the probed mixed norm.
    pub pressure_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OseenProbe {
    pub n: usize,
    pub r: Exponent,
    pub s: Exponent,
    pub gamma: String,
    pub stop_reason: StopReason,
    /// Iterated pairs equal the closed forms; `None` off the Shinbrot line.
    pub closed_form_agrees: Option<bool>,
    /// `‖b‖_{L^r L^s}` of the transport.
    pub transport_norm: f64,
    /// Largest pressure-gradient sample over the whole run.
    pub max_pressure: f64,
    pub rows: Vec<ProbeRow>,
    pub warning: Option<String>,
}

/// Solves the final-value Oseen problem driven by `transport` and the probe
/// forcing, then measures `(b·∇)Ψ` and `∇Ξ = (I − P)[(b·∇)Ψ − f]` in every
/// forcing class of the bootstrap trace for the declared `(r, s)`.
pub fn oseen_regularity_probe(
    transport: &Trajectory,
    r: &Exponent,
    s: &Exponent,
    max_steps: usize,
) -> Result<OseenProbe, LedgerError> {
    let trace = bootstrap_iterate(r, s, max_steps)?;
    let gamma = trace.gamma();
    let on_line = gamma == ratio(1, 2);
    let warning = (gamma > ratio(1, 2)).then(|| {
        format!(
            "declared class has 1/r + 1/s = {} > 1/2; the bootstrap does not apply",
            fmt_rational(&gamma)
        )
    });
    let closed: Vec<Option<ExponentPair>> = (0..trace.forcing_seq.len())
        .map(|i| match (on_line, s.value()) {
            (true, Some(sv)) => closed_form_forcing(&sv, i as u64 + 1).ok(),
            _ => None,
        })
        .collect();
    let closed_form_agrees = on_line.then(|| {
        trace
            .forcing_seq
            .iter()
            .zip(&closed)
            .all(|(a, b)| b.as_ref() == Some(a))
    });

    let config = SolverConfig {
        n: transport.grid.n(),
        dt: transport.dt,
        t_end: transport.t_end(),
        viscosity: transport.viscosity,
        initial: InitialCondition::Zero,
        stride: 1,
        mode: Mode::Oseen,
    };
    let forcing = probe_forcing(transport);
    let psi = solve_final_value(&config, transport, &forcing)?;

    let g = transport.grid;
    let mut adv_samples = Vec::with_capacity(psi.len());
    let mut pres_samples = Vec::with_capacity(psi.len());
    let mut b_samples = Vec::with_capacity(psi.len());
    for i in 0..psi.len() {
        let b = &transport.fields[i];
        let adv = transport_term(b, &psi.fields[i]);
        let pres = gradient_part(&adv.sub(&forcing.fields[i]));
        adv_samples.push(adv.to_real().magnitude());
        pres_samples.push(pres.to_real().magnitude());
        b_samples.push(b.to_real().magnitude());
    }
    let measure = |samples: &[Vec<f64>], pair: &ExponentPair| {
        let per_time: Vec<f64> = samples
            .iter()
            .map(|v| lq_norm_samples(v, g, &pair.space))
            .collect();
        mixed_norm_of_series(&per_time, transport.dt, &pair.time)
    };
    let rows = trace
        .forcing_seq
        .iter()
        .zip(closed)
        .enumerate()
        .map(|(i, (pair, closed_form))| ProbeRow {
            step: i + 1,
            pair: pair.clone(),
            closed_form,
            advection_norm: measure(&adv_samples, pair),
            pressure_norm: measure(&pres_samples, pair),
        })
        .collect();
    let max_pressure = pres_samples
        .iter()
        .flatten()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok(OseenProbe {
        n: g.n(),
        r: r.clone(),
        s: s.clone(),
        gamma: fmt_rational(&gamma),
        stop_reason: trace.stop_reason,
        closed_form_agrees,
        transport_norm: measure(&b_samples, &ExponentPair::new(r.clone(), s.clone())),
        max_pressure,
        rows,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeComparison {
    pub pair: ExponentPair,
    pub advection_ratio: f64,
    pub pressure_ratio: f64,
    pub stable: bool,
}

fn stable_ratio(coarse: f64, fine: f64) -> (f64, bool) {
    if coarse == 0.0 && fine == 0.0 {
        return (1.0, true);
    }
    let ratio = fine / coarse;
    let ok = ratio.is_finite() && ratio > 0.0 && ratio.max(1.0 / ratio) <= REFINEMENT_RATIO;
    (ratio, ok)
}

/// Pairs the rows of two probes at resolutions `n` and `2n`.
pub fn compare_probes(coarse: &OseenProbe, fine: &OseenProbe) -> Vec<ProbeComparison> {
    coarse
        .rows
        .iter()
        .zip(&fine.rows)
        .map(|(a, b)| {
            let (advection_ratio, s1) = stable_ratio(a.advection_norm, b.advection_norm);
            let (pressure_ratio, s2) = stable_ratio(a.pressure_norm, b.pressure_norm);
            ProbeComparison {
                pair: a.pair.clone(),
                advection_ratio,
                pressure_ratio,
                stable: s1 && s2 && a.advection_norm.is_finite() && a.pressure_norm.is_finite(),
            }
        })
        .collect()
}
