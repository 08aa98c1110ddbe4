//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the numerics fail (CFL, non-finite
//! values), 2 for usage, configuration, and I/O errors.

mod experiment;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

pub use experiment::{ExperimentConfig, Format, LedgerSection, NormRequest, OutputSection};

use crate::exponent_calculus::{
    bootstrap_trace, classify, fmt_rational, proof_case_theta, region_diagram, shinbrot_endgame,
    write_region_csv, CriterionCheck, CriterionVerdict, Exponent, ExponentError, MixedNormSpace,
    ProofCase, RegionGrid,
};
use crate::ledger::{
    balance_residuals, criterion_report_with, default_spaces, flux_integral,
    oseen_regularity_probe, FluxSplitting, LedgerError, LedgerReport, OseenProbe,
};
use crate::solver::{solve, InitialCondition, Mode, Provenance, SolverConfig, SolverError, Trajectory};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Exponent(#[from] ExponentError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Solver(e) | CliError::Ledger(LedgerError::Solver(e)) if e.is_numerical() => 1,
            _ => 2,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(io_err(path))
}

#[derive(Debug, Parser)]
#[command(name = "nsenergy", version, about = "Energy-equality exponent calculus and spectral energy ledgers")]
pub struct Cli {
    /// Overrides the seed of a rough initial condition.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact exponent arithmetic.
    Exponents {
        #[command(subcommand)]
        op: ExponentOp,
    },
    /// Runs a solver configuration and writes NSEF snapshots plus a manifest.
    Simulate { config: PathBuf },
    /// Energy ledger of a snapshot directory.
    Ledger(LedgerArgs),
}

#[derive(Debug, Subcommand)]
pub enum ExponentOp {
    /// Criterion verdicts for a velocity or gradient space.
    Classify {
        /// Velocity space `u ∈ L^r L^s`.
        #[arg(long, num_args = 2, value_names = ["R", "S"], conflicts_with = "grad")]
        vel: Option<Vec<Exponent>>,
        /// Gradient space `∇u ∈ L^p L^q`.
        #[arg(long, num_args = 2, value_names = ["P", "Q"])]
        grad: Option<Vec<Exponent>>,
        #[arg(long)]
        json: bool,
    },
    /// Interpolation parameter of a proof case (`i`, `ii1`, `ii2`, `iii`).
    Theta { case: ProofCase, q: Exponent },
    /// Bootstrap table for a transport in `L^r L^s`.
    Bootstrap {
        r: Exponent,
        s: Exponent,
        #[arg(long, default_value_t = crate::exponent_calculus::DEFAULT_MAX_STEPS)]
        max_steps: usize,
    },
    /// Final interpolation step for `s > 4`.
    Endgame { s: Exponent },
    /// Region labels over the `(1/q, 1/p)` square.
    Region {
        #[arg(long, default_value_t = 200)]
        divisions: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct LedgerArgs {
    /// Directory with `*.nsef` snapshots.
    pub dir: PathBuf,
    /// Experiment file supplying norm requests and mollifier widths.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated mollifier widths for the flux splitting.
    #[arg(long, value_delimiter = ',')]
    pub mollify: Vec<f64>,
    /// Runs the Oseen probe for a transport declared in `L^r L^s`.
    #[arg(long, num_args = 2, value_names = ["R", "S"])]
    pub oseen_probe: Option<Vec<Exponent>>,
    /// Output directory; defaults to the snapshot directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: "stdout".into(),
        source: e,
    };
    match cli.command {
        Command::Exponents { op } => exponents(op, out),
        Command::Simulate { config } => {
            let manifest = simulate(&config, cli.seed)?;
            writeln!(
                out,
                "{} snapshots, {} steps, {:.3} s, config {}",
                manifest.snapshots, manifest.steps, manifest.wall_time_s, manifest.config_hash
            )
            .map_err(io)
        }
        Command::Ledger(args) => {
            let probe = match args.oseen_probe.as_deref() {
                Some([r, s]) => Some((r.clone(), s.clone())),
                _ => None,
            };
            let outputs = ledger(
                &args.dir,
                args.config.as_deref(),
                &args.mollify,
                probe,
                args.out.as_deref(),
            )?;
            print_ledger(&outputs, out).map_err(io)
        }
    }
}

fn check_line(out: &mut dyn Write, name: &str, c: &CriterionCheck) -> std::io::Result<()> {
    writeln!(
        out,
        "{name:<26} weight {:<8} threshold {:<6} margin {:<8} {}",
        fmt_rational(&c.weight),
        fmt_rational(&c.threshold),
        fmt_rational(&c.margin),
        if c.satisfied { "yes" } else { "no" }
    )
}

fn print_verdict(v: &CriterionVerdict, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "space                      {}", v.space)?;
    writeln!(out, "velocity class             {}", v.velocity_space)?;
    if v.sobolev_finite_only {
        writeln!(out, "note                       q = 3 embeds into every finite L^r")?;
    }
    check_line(out, "serrin", &v.serrin)?;
    check_line(out, "shinbrot", &v.shinbrot)?;
    check_line(out, "leray-hopf interpolation", &v.leray_hopf_interpolation)?;
    check_line(out, "leslie-shvydkoy", &v.leslie_shvydkoy)?;
    if let Some(c) = &v.gradient_regularity {
        check_line(out, "gradient regularity", c)?;
    }
    if let Some(g) = &v.gradient_ranges {
        writeln!(
            out,
            "{:<26} case {:<4} required p {:<6} margin {:<8} {}",
            "gradient ranges",
            g.range.map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
            g.required_time.as_ref().map(|p| p.to_string()).unwrap_or_else(|| "-".into()),
            g.margin.as_ref().map(fmt_rational).unwrap_or_else(|| "-".into()),
            if g.applies.is_some() { "yes" } else { "no" }
        )?;
    }
    Ok(())
}

pub fn exponents(op: ExponentOp, out: &mut dyn Write) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: "stdout".into(),
        source: e,
    };
    match op {
        ExponentOp::Classify { vel, grad, json } => {
            let space = match (vel.as_deref(), grad.as_deref()) {
                (Some([r, s]), None) => MixedNormSpace::velocity(r.clone(), s.clone()),
                (None, Some([p, q])) => MixedNormSpace::gradient(p.clone(), q.clone()),
                _ => return Err(CliError::Usage("give exactly one of --vel R S or --grad P Q".into())),
            };
            let verdict = classify(&space);
            if json {
                let text = serde_json::to_string_pretty(&verdict).expect("verdict serializes");
                writeln!(out, "{text}").map_err(io)
            } else {
                print_verdict(&verdict, out).map_err(io)
            }
        }
        ExponentOp::Theta { case, q } => {
            let theta = proof_case_theta(case, &q)?;
            writeln!(out, "{}", fmt_rational(&theta)).map_err(io)
        }
        ExponentOp::Bootstrap { r, s, max_steps } => {
            let trace = bootstrap_trace(&r, &s, max_steps)?;
            writeln!(out, "n,alpha,beta,grad_time,grad_space").map_err(io)?;
            for (i, f) in trace.forcing_seq.iter().enumerate() {
                let g = &trace.gradient_seq[i + 1];
                writeln!(out, "{},{},{},{},{}", i + 1, f.time, f.space, g.time, g.space).map_err(io)?;
            }
            let stop = serde_json::to_string(&trace.stop_reason).expect("serializes");
            writeln!(out, "stop {}", stop.trim_matches('"')).map_err(io)
        }
        ExponentOp::Endgame { s } => {
            let e = shinbrot_endgame(&s)?;
            writeln!(out, "{}", e.render()).map_err(io)
        }
        ExponentOp::Region { divisions, out: path } => {
            if divisions < 2 {
                return Err(CliError::Usage("divisions must be at least 2".into()));
            }
            let rows = region_diagram(&RegionGrid::with_landmarks(divisions));
            match path {
                Some(path) => {
                    let mut buf = Vec::new();
                    write_region_csv(&rows, &mut buf).map_err(io)?;
                    write(&path, &buf)?;
                    writeln!(out, "{} rows written to {}", rows.len(), path.display()).map_err(io)
                }
                None => write_region_csv(&rows, out).map_err(io),
            }
        }
    }
}

/// Written next to the snapshots by `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct Manifest {
    pub config_hash: String,
    pub seed: Option<u64>,
    pub solver: SolverConfig,
    pub steps: usize,
    pub snapshots: usize,
    pub wall_time_s: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Largest relative deviation from the exact energy when the initial
    /// condition has a closed-form evolution.
    pub energy_drift: Option<f64>,
    /// Largest `|balance residual| / E₀`.
    pub max_relative_residual: f64,
}

/// Exact kinetic energy at time `t` for initial data with a known evolution.
fn exact_energy(cfg: &SolverConfig, e0: f64, t: f64) -> Option<f64> {
    let nu = cfg.viscosity;
    match (&cfg.initial, cfg.mode) {
        (InitialCondition::Zero, _) => Some(0.0),
        (InitialCondition::TaylorGreen { .. }, Mode::NavierStokes | Mode::Stokes) => {
            Some(e0 * (-4.0 * nu * t).exp())
        }
        (InitialCondition::SingleMode { k, .. }, Mode::NavierStokes | Mode::Stokes) => {
            let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
            Some(e0 * (-2.0 * nu * k2 * t).exp())
        }
        _ => None,
    }
}

pub fn simulate(config_path: &Path, seed: Option<u64>) -> Result<Manifest, CliError> {
    let mut cfg = ExperimentConfig::load(config_path)?;
    if let (Some(s), InitialCondition::Rough { seed, .. }) = (seed, &mut cfg.solver.initial) {
        *seed = s;
    }
    let start = Instant::now();
    let traj = solve(&cfg.solver)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let dir = &cfg.output.dir;
    // stale snapshots from an earlier run would be picked up by the ledger
    if dir.exists() {
        for entry in fs::read_dir(dir).map_err(io_err(dir))? {
            let path = entry.map_err(io_err(dir))?.path();
            if path.extension().is_some_and(|x| x == "nsef") {
                fs::remove_file(&path).map_err(io_err(&path))?;
            }
        }
    }
    traj.save_dir(dir)?;

    let energies = traj.energies();
    let e0 = energies[0];
    let energy_drift = (0..traj.len())
        .map(|i| exact_energy(&cfg.solver, e0, traj.time(i)).map(|e| (energies[i] - e).abs()))
        .collect::<Option<Vec<f64>>>()
        .map(|d| d.into_iter().fold(0.0, f64::max) / if e0 > 0.0 { e0 } else { 1.0 });
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let manifest = Manifest {
        config_hash: traj.provenance.config_hash.clone(),
        seed: traj.provenance.seed,
        solver: cfg.solver.clone(),
        steps: cfg.solver.steps()?,
        snapshots: traj.len(),
        wall_time_s,
        initial_energy: e0,
        final_energy: energies[energies.len() - 1],
        energy_drift,
        max_relative_residual: balance_residuals(&traj)
            .iter()
            .fold(0.0, |m: f64, r| m.max(r.abs()))
            / scale,
    };
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write(&path, json.as_bytes())?;
    Ok(manifest)
}

/// Everything the ledger command produced.
#[derive(Clone, Debug)]
pub struct LedgerOutputs {
    pub report: LedgerReport,
    pub flux: Vec<FluxSplitting>,
    pub probe: Option<OseenProbe>,
    pub files: Vec<PathBuf>,
}

fn load_trajectory(dir: &Path) -> Result<Trajectory, CliError> {
    let manifest_path = dir.join("manifest.json");
    let provenance = match fs::read_to_string(&manifest_path) {
        Ok(text) => {
            let m: Manifest = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", manifest_path.display())))?;
            Provenance {
                config_hash: m.config_hash,
                seed: m.seed,
            }
        }
        Err(_) => Provenance::default(),
    };
    Ok(Trajectory::load_dir(dir, provenance)?)
}

/// Default smoothing before an Oseen probe: four time steps or four grid
/// wavelengths, whichever is wider.
pub fn default_smooth_eps(traj: &Trajectory) -> f64 {
    (4.0 * traj.dt).max(4.0 / traj.grid.n() as f64)
}

pub fn ledger(
    dir: &Path,
    config: Option<&Path>,
    mollify: &[f64],
    probe: Option<(Exponent, Exponent)>,
    out_dir: Option<&Path>,
) -> Result<LedgerOutputs, CliError> {
    let cfg = config.map(ExperimentConfig::load).transpose()?;
    let traj = load_trajectory(dir)?;
    let spaces = match &cfg {
        Some(c) if !c.ledger.norms.is_empty() => c.spaces()?,
        _ => default_spaces(),
    };
    let widths: Vec<f64> = if mollify.is_empty() {
        cfg.as_ref().map(|c| c.ledger.mollify.clone()).unwrap_or_default()
    } else {
        mollify.to_vec()
    };
    let want = |f: Format| cfg.as_ref().is_none_or(|c| c.wants(f));
    let out_dir = out_dir.unwrap_or(dir);
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let report = criterion_report_with(&traj, &spaces);
    let mut files = Vec::new();
    if want(Format::Csv) {
        let path = out_dir.join("ledger.csv");
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(io_err(&path))?;
        write(&path, &buf)?;
        files.push(path);
    }
    if want(Format::Json) {
        let path = out_dir.join("ledger.json");
        write(&path, report.to_json().as_bytes())?;
        files.push(path);
    }

    let mut flux = vec![flux_integral(&traj, None, None)?];
    for &eps in &widths {
        flux.push(flux_integral(&traj, Some(eps), None)?);
    }
    if !widths.is_empty() && want(Format::Json) {
        let path = out_dir.join("flux.json");
        let json = serde_json::to_string_pretty(&flux).expect("flux serializes");
        write(&path, json.as_bytes())?;
        files.push(path);
    }

    let probe = match probe {
        Some((r, s)) => {
            let eps = cfg
                .as_ref()
                .and_then(|c| c.ledger.smooth_eps)
                .unwrap_or_else(|| default_smooth_eps(&traj));
            let transport = crate::solver::spacetime_smooth(&traj, eps)?;
            drop(traj);
            let p = oseen_regularity_probe(&transport, &r, &s, crate::exponent_calculus::DEFAULT_MAX_STEPS)?;
            let path = out_dir.join("probe.json");
            let json = serde_json::to_string_pretty(&p).expect("probe serializes");
            write(&path, json.as_bytes())?;
            files.push(path);
            Some(p)
        }
        None => None,
    };
    Ok(LedgerOutputs {
        report,
        flux,
        probe,
        files,
    })
}

fn print_ledger(o: &LedgerOutputs, out: &mut dyn Write) -> std::io::Result<()> {
    let r = &o.report;
    writeln!(out, "snapshots {} n {} dt {} viscosity {}", r.snapshots, r.n, r.dt, r.viscosity)?;
    writeln!(out, "initial energy {:e}", r.initial_energy)?;
    writeln!(out, "max |residual| {:e} ({:e} E0)", r.max_abs_residual, r.max_abs_residual / r.initial_energy.max(f64::MIN_POSITIVE))?;
    writeln!(out, "flux integral {:e}", r.flux_integral)?;
    for m in &r.spaces {
        writeln!(out, "{:<28} {:e}", m.space.to_string(), m.norm)?;
    }
    for f in o.flux.iter().filter(|f| f.eps.is_some()) {
        writeln!(
            out,
            "eps {} mollified {:e} approximation {:e} mollifier {:e} flux {:e}",
            f.eps.unwrap(),
            f.mollified.unwrap(),
            f.approximation_term.unwrap(),
            f.mollifier_term.unwrap(),
            f.unmollified
        )?;
    }
    if let Some(p) = &o.probe {
        if let Some(w) = &p.warning {
            writeln!(out, "warning: {w}")?;
        }
        writeln!(out, "n,alpha,beta,closed_form,advection_norm,pressure_norm")?;
        for row in &p.rows {
            let cf = row
                .closed_form
                .as_ref()
                .map(|c| format!("({} {})", c.time, c.space))
                .unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{},{},{},{},{:e},{:e}",
                row.step, row.pair.time, row.pair.space, cf, row.advection_norm, row.pressure_norm
            )?;
        }
    }
    for f in &o.files {
        writeln!(out, "wrote {}", f.display())?;
    }
    Ok(())
}
