//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Run with `cargo test --test acceptance`. A failing criterion is reported,
//! not hidden; the summary line counts the passes.

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use nsenergy::cli::{ledger, simulate};
use nsenergy::exponent_calculus::{
    bootstrap_trace, gradient_ranges_time_exponent, holder_conjugate, proof_case_theta, ratio,
    region_diagram, shinbrot_endgame, sobolev_exponent, write_region_csv, Exponent, ExponentPair,
    ProofCase, Rational, RegionGrid, StopReason, DEFAULT_MAX_STEPS,
};
use nsenergy::ledger::{balance_residuals, compare_probes, oseen_regularity_probe};
use nsenergy::mollifier::{
    dissipation_pairing_gap, even_kernel_cancellation, gradient_pairing, mollify, MollifierKernel,
};
use nsenergy::solver::{
    solve, spacetime_smooth, taylor_green, InitialCondition, Mode, Provenance, SolverConfig,
    Trajectory,
};
use nsenergy::spectral::{dealias, random_rough_field, transport_term, Grid};
use num_traits::{One, Zero};

type Outcome = (bool, String);

fn q(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

fn exp(v: &Rational) -> Exponent {
    Exponent::new(v.clone()).unwrap()
}

/// Reduced fractions `a/b` with `b ≤ max_den` and `lo < a/b < hi`.
fn rationals(lo: &Rational, hi: &Rational, max_den: i64) -> Vec<Rational> {
    let mut out = Vec::new();
    for b in 1..=max_den {
        for a in 1..=(hi.to_integer().try_into().unwrap_or(0i64) + 1) * b {
            let v = q(a, b);
            if *v.denom() == b.into() && v > *lo && v < *hi {
                out.push(v);
            }
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let samples = rationals(&q(1, 1), &q(8, 1), 120);
    let mut failures = 0usize;
    let mut checks = 0usize;
    let mut all: Vec<Exponent> = samples.iter().map(exp).collect();
    all.push(Exponent::one());
    all.push(Exponent::infinity());
    for e in &all {
        checks += 1;
        if holder_conjugate(&holder_conjugate(e)) != *e {
            failures += 1;
        }
        if *e < exp(&q(3, 1)) {
            checks += 1;
            let star = sobolev_exponent(e).exponent;
            if *star.reciprocal() != e.reciprocal() - q(1, 3) {
                failures += 1;
            }
        }
    }
    // both one-sided formulas agree at the range boundaries
    let case_i = |v: &Rational| v / (Rational::from_integer(2.into()) * v - q(3, 1));
    let case_ii = |v: &Rational| q(5, 1) * v / (q(5, 1) * v - q(6, 1));
    let case_iii = |v: &Rational| q(1, 1) + q(2, 1) / v;
    let joints = [
        (case_i(&q(9, 5)), case_ii(&q(9, 5)), q(3, 1)),
        (case_ii(&q(3, 1)), case_iii(&q(3, 1)), q(5, 3)),
    ];
    for (left, right, want) in &joints {
        checks += 1;
        if left != want || right != want {
            failures += 1;
        }
    }
    checks += 2;
    if gradient_ranges_time_exponent(&exp(&q(9, 5))).unwrap() != exp(&q(3, 1)) {
        failures += 1;
    }
    if gradient_ranges_time_exponent(&exp(&q(3, 1))).unwrap() != exp(&q(5, 3)) {
        failures += 1;
    }
    let mut banded = 0usize;
    for v in samples.iter().filter(|v| **v > q(3, 2) && **v < q(6, 1)) {
        let e = exp(v);
        let p = gradient_ranges_time_exponent(&e).unwrap();
        let independent = if *v < q(9, 5) {
            case_i(v)
        } else if *v <= q(3, 1) {
            case_ii(v)
        } else {
            case_iii(v)
        };
        let w = q(2, 1) * p.reciprocal() + q(3, 1) * e.reciprocal();
        checks += 2;
        banded += 1;
        if p != exp(&independent) {
            failures += 1;
        }
        if !(w > q(2, 1) && w < q(5, 2)) {
            failures += 1;
        }
        if *v > q(12, 7) {
            checks += 1;
            let star = sobolev_exponent(&e).exponent;
            if q(2, 1) * p.reciprocal() + q(2, 1) * star.reciprocal() <= q(1, 1) {
                failures += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        failures == 0 && banded >= 10_000 && secs < 1.0,
        format!(
            "{checks} exact checks over {} exponents ({banded} in the band range), {failures} failures, {secs:.2} s",
            all.len()
        ),
    )
}

fn criterion_2() -> Outcome {
    let half = q(1, 2);
    let mut failures = 0usize;
    let mut checks = 0usize;
    let ranges = [
        (ProofCase::I, q(3, 2), q(9, 5)),
        (ProofCase::II1, q(9, 5), q(12, 5)),
        (ProofCase::II2, q(12, 5), q(3, 1)),
        (ProofCase::III, q(3, 1), q(40, 1)),
    ];
    for (case, lo, hi) in ranges {
        let mut qs = rationals(&lo, &hi, 150);
        match case {
            ProofCase::II1 => qs.push(lo.clone()),
            ProofCase::II2 => qs.extend([lo.clone(), hi.clone()]),
            _ => {}
        }
        for v in qs {
            let e = exp(&v);
            let theta = proof_case_theta(case, &e).unwrap();
            let inv_conj = Rational::one() - v.recip();
            let inv_star = sobolev_exponent(&e).exponent.reciprocal().clone();
            let lhs = &inv_conj / q(2, 1);
            let holds = match case {
                ProofCase::I => lhs == &theta * &inv_star + (Rational::one() - &theta) / q(6, 1),
                ProofCase::II1 => lhs == &theta * &half + (Rational::one() - &theta) * &inv_star,
                ProofCase::II2 => {
                    &half - v.recip() == &theta * &half + (Rational::one() - &theta) * &inv_star
                }
                ProofCase::III => lhs == &theta * &half,
            };
            checks += 1;
            if !holds || theta < Rational::zero() || theta > Rational::one() {
                failures += 1;
            }
        }
    }
    (failures == 0, format!("{checks} samples over four ranges, {failures} failures"))
}

fn criterion_3() -> Outcome {
    let mut failures = Vec::new();
    for s in [q(9, 2), q(5, 1), q(6, 1), q(7, 1), q(8, 1), q(10, 1)] {
        let r = exp(&(q(1, 2) - s.recip()).recip());
        let se = exp(&s);
        let trace = bootstrap_trace(&r, &se, DEFAULT_MAX_STEPS).unwrap();
        let alpha = |n: i64| &s / (&s - q(n, 1));
        let beta = |n: i64| q(2, 1) * &s / (q(2 * n, 1) + &s);
        for (i, pair) in trace.forcing_seq.iter().enumerate() {
            let n = i as i64 + 1;
            if *pair != ExponentPair::new(exp(&alpha(n)), exp(&beta(n))) {
                failures.push(format!("s={s} n={n}: closed form"));
            }
        }
        let end = shinbrot_endgame(&se).unwrap();
        let n = (&s / q(2, 1)).floor().to_integer() - num_bigint::BigInt::one();
        let n: i64 = n.try_into().unwrap();
        let target_time = q(2, 1) * &s / (q(2, 1) + &s);
        let target_space = &s / (&s - q(1, 1));
        let even = (&s / q(2, 1)).is_integer();
        let theta = if even {
            Rational::one()
        } else {
            (q(2, 1) * (&s / q(2, 1)).floor() - &s + q(2, 1)) / q(2, 1)
        };
        if end.steps != n as u64
            || end.theta != theta
            || end.target.time_exp != exp(&target_time)
            || end.target.space_exp != exp(&target_space)
        {
            failures.push(format!("s={s}: endgame {}", end.render()));
        }
        if &theta / alpha(n) + (Rational::one() - &theta) / alpha(n + 1) != target_time.recip() {
            failures.push(format!("s={s}: blend identity"));
        }
        if even {
            let m = n + 1;
            let arrived = trace.forcing_seq.len() as i64 == m - 1
                && trace.stop_reason == StopReason::TargetReached
                && trace.forcing_seq.last()
                    == Some(&ExponentPair::new(exp(&target_time), exp(&target_space)));
            if !arrived {
                failures.push(format!("s={s}: even arrival"));
            }
        } else {
            let bracket = Rational::one() < beta(n + 1) && beta(n + 1) < target_space && target_space <= beta(n);
            if !bracket {
                failures.push(format!("s={s}: bracketing"));
            }
            if trace.stop_reason != StopReason::TargetReached || trace.forcing_seq.len() as i64 != n + 1 {
                failures.push(format!("s={s}: trace stop"));
            }
        }
    }
    let detail = if failures.is_empty() {
        "six transports on the Shinbrot line, closed forms and endgames exact".to_string()
    } else {
        failures.join("; ")
    };
    (failures.is_empty(), detail)
}

fn criterion_4() -> Outcome {
    let rows = region_diagram(&RegionGrid::with_landmarks(200));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("region.csv");
    let mut buf = Vec::new();
    write_region_csv(&rows, &mut buf).unwrap();
    fs::write(&path, &buf).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    let header_ok = lines.next() == Some("inv_q,inv_p,region");
    let parsed: Vec<(Rational, Rational, String)> = lines
        .map(|l| {
            let mut f = l.split(',');
            let a = nsenergy::exponent_calculus::parse_rational(f.next().unwrap()).unwrap();
            let b = nsenergy::exponent_calculus::parse_rational(f.next().unwrap()).unwrap();
            (a, b, f.next().unwrap().to_string())
        })
        .collect();
    let lossless = parsed.len() == rows.len()
        && parsed
            .iter()
            .zip(&rows)
            .all(|(p, r)| p.0 == r.inv_q && p.1 == r.inv_p && p.2 == r.region.label());
    let landmarks = [
        (q(5, 9), q(1, 3), "ranges-ii"),
        (q(1, 3), q(1, 2), "gradient-regularity"),
        (q(1, 2), q(1, 2), "none"),
    ];
    let found: Vec<bool> = landmarks
        .iter()
        .map(|(a, b, label)| parsed.iter().any(|p| p.0 == *a && p.1 == *b && p.2 == *label))
        .collect();
    (
        header_ok && lossless && found.iter().all(|f| *f),
        format!(
            "{} rows, round trip {}, landmarks {:?}",
            parsed.len(),
            if lossless { "exact" } else { "lossy" },
            found
        ),
    )
}

fn tg_config(n: usize, dt: f64, t_end: f64, viscosity: f64, initial: InitialCondition, stride: usize) -> SolverConfig {
    SolverConfig {
        n,
        dt,
        t_end,
        viscosity,
        initial,
        stride,
        mode: Mode::NavierStokes,
    }
}

fn final_field(cfg: &SolverConfig) -> nsenergy::spectral::FourierField {
    let steps = cfg.steps().unwrap();
    let traj = solve(&SolverConfig {
        stride: steps,
        ..cfg.clone()
    })
    .unwrap();
    traj.fields.last().unwrap().clone()
}

fn criterion_5() -> Outcome {
    let cfg = tg_config(32, 1e-3, 0.5, 1.0, InitialCondition::TaylorGreen { amplitude: 1.0 }, 1);
    let start = Instant::now();
    let traj = solve(&cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let e = traj.energies();
    let err = (0..traj.len())
        .map(|i| (e[i] - e[0] * (-4.0 * traj.time(i)).exp()).abs() / e[0])
        .fold(0.0, f64::max);
    drop(traj);

    // the 2D vortex is reproduced to round-off, so the order is read off the
    // genuinely nonlinear 3D vortex against a fine reference
    let tg3 = InitialCondition::TaylorGreen3d { amplitude: 1.0 };
    let base = tg_config(32, 0.05, 0.5, 0.1, tg3, 1);
    let reference = final_field(&SolverConfig { dt: 0.05 / 16.0, ..base.clone() });
    let coarse = final_field(&base);
    let fine = final_field(&SolverConfig { dt: 0.025, ..base.clone() });
    let e1 = coarse.sub(&reference).norm_sq().sqrt();
    let e2 = fine.sub(&reference).norm_sq().sqrt();
    let order_ratio = e1 / e2;
    (
        err <= 1e-6 && secs <= 300.0 && order_ratio >= 4.0,
        format!(
            "max relative energy error {err:.3e}, run {secs:.1} s, dt-halving ratio {order_ratio:.2} (3D vortex, errors {e1:.2e}/{e2:.2e})"
        ),
    )
}

fn criterion_6() -> Outcome {
    let grid = Grid::new(32).unwrap();
    let sigmas = [0.8, 1.5, 2.5];
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let sigma = sigmas[seed as usize % 3];
        let u = dealias(&random_rough_field(sigma, seed, grid).unwrap());
        let flux = transport_term(&u, &u).inner(&u);
        let scale = u.norm_sq() * gradient_pairing(&u, &u).sqrt();
        worst = worst.max(flux.abs() / scale);
    }
    (
        worst <= 1e-11,
        format!("20 fields, max |((u·∇)u, u)| / (‖u‖²‖∇u‖) = {worst:.2e}"),
    )
}

fn criterion_7() -> Outcome {
    let cfg = tg_config(32, 1e-3, 0.5, 1.0, InitialCondition::TaylorGreen { amplitude: 1.0 }, 1);
    let traj = solve(&cfg).unwrap();
    let e0 = traj.energies()[0];
    let tg_residual = balance_residuals(&traj).iter().fold(0.0, |m: f64, r| m.max(r.abs())) / e0;
    drop(traj);

    let stokes = |dt: f64| {
        let cfg = SolverConfig {
            mode: Mode::Stokes,
            ..tg_config(16, dt, 0.5, 1.0, InitialCondition::SingleMode { k: [1, 0, 0], amplitude: 1.0 }, 1)
        };
        let traj = solve(&cfg).unwrap();
        let r = balance_residuals(&traj);
        r.last().unwrap().abs()
    };
    let (r1, r2) = (stokes(1e-3), stokes(5e-4));
    let ratio = r1 / r2;
    let a = tg_residual <= 1e-6;
    let b = (3.5..=4.5).contains(&ratio);
    (
        a && b,
        format!(
            "TG max residual {tg_residual:.3e} E0 (limit 1e-6) {}; Stokes residual {r1:.3e} -> {r2:.3e}, ratio {ratio:.3} {}",
            if a { "ok" } else { "over" },
            if b { "ok" } else { "outside [3.5, 4.5]" }
        ),
    )
}

fn criterion_8() -> Outcome {
    // mass against an independent composite Simpson rule
    let k = MollifierKernel::new(0.3).unwrap();
    let m = 200_000;
    let h = 0.6 / m as f64;
    let mut simpson = 0.0;
    for i in 0..=m {
        let w = if i == 0 || i == m {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        simpson += w * k.eval(-0.3 + i as f64 * h);
    }
    let mass_err = (simpson * h / 3.0 - 1.0).abs();
    let even = (0..1000).all(|i| {
        let t = i as f64 * 3e-4;
        k.eval(t).to_bits() == k.eval(-t).to_bits() && k.derivative(t) == -k.derivative(-t)
    });

    // constants reproduced inside
    let grid = Grid::new(8).unwrap();
    let c = taylor_green(grid, 1.0);
    let constant = Trajectory::new(grid, 1.0, 0.0, 0.01, vec![c.clone(); 101], Provenance::default()).unwrap();
    let moll = mollify(&constant, 0.1).unwrap();
    let reproduce = moll
        .interior
        .clone()
        .map(|i| moll.trajectory.fields[i].sub(&c).norm_sq().sqrt() / c.norm_sq().sqrt())
        .fold(0.0, f64::max);

    // dissipation pairing gap against the width
    let tg = solve(&tg_config(16, 1e-3, 0.5, 1.0, InitialCondition::TaylorGreen { amplitude: 1.0 }, 1)).unwrap();
    let eps = [0.04, 0.02, 0.01];
    let gaps: Vec<f64> = eps.iter().map(|&e| dissipation_pairing_gap(&tg, e).unwrap().abs()).collect();
    let (lx, ly): (Vec<f64>, Vec<f64>) = eps.iter().zip(&gaps).map(|(e, g)| (e.ln(), g.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / 3.0;
    let my = ly.iter().sum::<f64>() / 3.0;
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);

    // bump-windowed smooth trajectory
    let window = tg.map_fields(|f| f.clone());
    let windowed = Trajectory {
        fields: window
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let s = (i as f64 / (window.len() - 1) as f64) * 2.0 - 1.0;
                f.scaled(if s.abs() < 1.0 { (-1.0 / (1.0 - s * s)).exp() } else { 0.0 })
            })
            .collect(),
        ..window
    };
    let cancel = even_kernel_cancellation(&windowed, 0.02).unwrap().abs();

    let ok = mass_err <= 1e-12 && even && reproduce <= 1e-13 && slope >= 0.8 && decreasing && cancel <= 1e-8;
    (
        ok,
        format!(
            "mass error {mass_err:.1e}, evenness {}, constants {reproduce:.1e}, gap slope {slope:.2} (gaps {:.2e} {:.2e} {:.2e}), cancellation {cancel:.1e}",
            if even { "bitwise" } else { "broken" },
            gaps[0],
            gaps[1],
            gaps[2]
        ),
    )
}

fn criterion_9() -> Outcome {
    let cfg = tg_config(32, 0.01, 0.5, 1.0, InitialCondition::TaylorGreen { amplitude: 1.0 }, 1);
    let traj = solve(&cfg).unwrap();
    let smooth = spacetime_smooth(&traj, 0.1).unwrap();
    drop(traj);
    let (r, s) = (Exponent::integer(3).unwrap(), Exponent::integer(6).unwrap());
    let coarse = oseen_regularity_probe(&smooth, &r, &s, DEFAULT_MAX_STEPS).unwrap();
    let fine_grid = Grid::new(64).unwrap();
    let fine_transport = Trajectory::new(
        fine_grid,
        smooth.viscosity,
        smooth.t0,
        smooth.dt,
        smooth.fields.iter().map(|f| f.resample(fine_grid)).collect(),
        smooth.provenance.clone(),
    )
    .unwrap();
    drop(smooth);
    let fine = oseen_regularity_probe(&fine_transport, &r, &s, DEFAULT_MAX_STEPS).unwrap();
    drop(fine_transport);
    let cmp = compare_probes(&coarse, &fine);
    let wanted = [
        ExponentPair::fractions((6, 5), (3, 2)).unwrap(),
        ExponentPair::fractions((3, 2), (6, 5)).unwrap(),
    ];
    let rows_ok = wanted.iter().all(|w| cmp.iter().any(|c| c.pair == *w && c.stable))
        && coarse.closed_form_agrees == Some(true);

    let zero = Trajectory::new(
        Grid::new(16).unwrap(),
        1.0,
        0.0,
        0.01,
        vec![nsenergy::spectral::FourierField::zeros(Grid::new(16).unwrap()); 51],
        Provenance::default(),
    )
    .unwrap();
    let zp = oseen_regularity_probe(&zero, &r, &s, DEFAULT_MAX_STEPS).unwrap();
    let ok = rows_ok && zp.max_pressure == 0.0;
    let ratios: Vec<String> = cmp
        .iter()
        .map(|c| format!("{}: adv {:.3} pres {:.3}", c.pair, c.advection_ratio, c.pressure_ratio))
        .collect();
    (
        ok,
        format!(
            "n=32 vs n=64 ratios [{}], zero-transport max |∇π| = {:e}",
            ratios.join(", "),
            zp.max_pressure
        ),
    )
}

const PIPELINE: &str = r#"
[solver]
n = 16
dt = 0.01
t_end = 0.5
viscosity = 0.05
initial = { kind = "rough", sigma = 1.5, seed = 3, rms = 0.5 }

[ledger]
mollify = [0.05]

[output]
dir = "run"
"#;

fn pipeline(threads: usize) -> Vec<(String, Vec<u8>)> {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("experiment.toml");
    fs::write(&config, PIPELINE).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        simulate(&config, None).unwrap();
        let run = dir.path().join("run");
        let probe = Some((Exponent::integer(3).unwrap(), Exponent::integer(6).unwrap()));
        ledger(&run, Some(&config), &[], probe, None).unwrap();
    });
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path().join("run"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn criterion_10() -> Outcome {
    let a = pipeline(1);
    let b = pipeline(4);
    let identical = a == b;
    let snaps = a.iter().filter(|(n, _)| n.ends_with(".nsef")).count();
    (
        identical && snaps > 0,
        format!(
            "{} files ({snaps} snapshots) compared across 1 and 4 threads: {}",
            a.len(),
            if identical { "bit-identical" } else { "differ" }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exponent suite", criterion_1),
        ("proof-theta suite", criterion_2),
        ("bootstrap suite", criterion_3),
        ("region dataset", criterion_4),
        ("solver oracle", criterion_5),
        ("discrete flux cancellation", criterion_6),
        ("energy ledger", criterion_7),
        ("mollifier suite", criterion_8),
        ("oseen probe", criterion_9),
        ("determinism", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut passed = 0;
    let mut run = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("{} {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|p| label.contains(p.as_str())) {
            continue;
        }
        run += 1;
        let start = Instant::now();
        let (ok, detail) = match panic::catch_unwind(AssertUnwindSafe(f)) {
            Ok(outcome) => outcome,
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if ok {
            passed += 1;
        }
        println!(
            "{} criterion {label}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("{passed}/{run} criteria passed");
}
