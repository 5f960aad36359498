//! Command-line front end: single-state checks, jump classification,
//! basic-state audits, solver runs and the verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rmhd_contact::characteristics::char_spectrum;
use rmhd_contact::config::{run_scenario, write_outputs, GridSpec, Scenario, ScenarioConfig};
use rmhd_contact::eos::{hyperbolicity_report, Check};
use rmhd_contact::interface::{audit_basic_state, BasicFields, Cutoff, CutoffKind};
use rmhd_contact::jumps::{classify, rh_residuals, FrontGeometry};
use rmhd_contact::scenarios::{basic_fields, BasicKind, DEFAULT_L1};
use rmhd_contact::verification::{manufactured_study, run_criterion, CRITERIA, MMS_FINAL_TIME};
use rmhd_contact::{Error, PrimitiveState, ThermoParams};

/// Seed used when `--seed` is absent.
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "rmhd-contact", version, about = "Relativistic MHD contact discontinuities: checks, solvers and verification")]
struct Cli {
    /// JSON file with thermodynamic parameters; defaults otherwise.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Directory for machine-readable output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility of a single primitive state.
    CheckState {
        /// JSON `{pressure, velocity, magnetic, entropy}`.
        state: PathBuf,
    },
    /// Characteristic speeds of a planar state for a co-normal.
    Speeds {
        state: PathBuf,
        /// Co-normal `N1,N2`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = [1.0, 0.0])]
        normal: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        front_speed: f64,
    },
    /// Classify the discontinuity between two states.
    Classify {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// JSON `{dtphi, d2phi, d3phi}`.
        #[arg(long)]
        front: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Check the structural assumptions on a gridded basic state.
    Audit {
        /// JSON basic state; omit to audit a builtin one.
        basic: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Builtin::RayleighTaylor)]
        builtin: Builtin,
        #[arg(long, value_enum, default_value_t = CutoffArg::Quintic)]
        cutoff: CutoffArg,
        #[arg(long, value_parser = parse_grid, default_value = "32x32")]
        grid: GridSpec,
    },
    /// Run the linearized free-boundary solver from a scenario file.
    SimulateLinear(Simulate),
    /// Run the periodic nonlinear solver from a scenario file.
    SimulatePeriodic(Simulate),
    /// Run the acceptance suite.
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Comma-separated criterion numbers; all by default.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Manufactured-solution refinement study of the linearized solver.
    Convergence {
        /// Grid sizes `n` of the `n x n` levels.
        #[arg(long, value_delimiter = ',', default_values_t = [32, 64, 128])]
        levels: Vec<usize>,
        #[arg(long, default_value_t = MMS_FINAL_TIME)]
        final_time: f64,
        /// Required observed order.
        #[arg(long, default_value_t = 1.9)]
        tol: f64,
    },
}

#[derive(Args)]
struct Simulate {
    config: PathBuf,
    /// Override the scenario grid, `n1xn2`.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<GridSpec>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Constant,
    RayleighTaylor,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutoffArg {
    Quintic,
    Smooth,
}

impl From<CutoffArg> for CutoffKind {
    fn from(c: CutoffArg) -> Self {
        match c {
            CutoffArg::Quintic => CutoffKind::Quintic,
            CutoffArg::Smooth => CutoffKind::Smooth,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FrontDerivatives {
    dtphi: f64,
    d2phi: f64,
    #[serde(default)]
    d3phi: f64,
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let (a, b) = s.split_once('x').ok_or_else(|| format!("grid `{s}` is not of the form n1xn2"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("grid `{s}`: {e}"));
    Ok(GridSpec { n1: n(a)?, n2: n(b)? })
}

/// Failure of a command: configuration problems exit with 2, violated
/// properties with 1.
enum Failure {
    Config(String),
    Property(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) | Error::Parameters(_) | Error::Cfl(_) => Failure::Config(e.to_string()),
            _ => Failure::Property(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: malformed JSON: {e}", path.display())))
}

fn write_json<T: Serialize>(out: Option<&Path>, name: &str, value: &T) -> Outcome {
    let Some(dir) = out else { return Ok(()) };
    let io = |e: std::io::Error| Failure::Config(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Config(e.to_string()))?;
    std::fs::write(dir.join(name), text).map_err(io)
}

fn print_checks(checks: &[Check]) {
    println!("{:<10} {:<6} {:>12}  description", "condition", "status", "margin");
    for c in checks {
        println!("{:<10} {:<6} {:>12.4e}  {}", c.tag, if c.passed { "ok" } else { "FAIL" }, c.margin, c.description);
    }
}

fn failure_list<'a>(checks: impl Iterator<Item = &'a Check>) -> Option<String> {
    let lines: Vec<String> =
        checks.map(|c| format!("{} {} violated (margin {:.3e})", c.tag, c.description, c.margin)).collect();
    (!lines.is_empty()).then(|| lines.join("; "))
}

fn check_state(params: &ThermoParams, path: &Path, out: Option<&Path>) -> Outcome {
    let state: PrimitiveState = read_json(path)?;
    let report = hyperbolicity_report(params, &state);
    print_checks(&report.checks);
    write_json(out, "check-state.json", &report)?;
    match failure_list(report.failures()) {
        Some(msg) => Err(Failure::Property(msg)),
        None => Ok(()),
    }
}

fn speeds(params: &ThermoParams, path: &Path, normal: &[f64], front_speed: f64, out: Option<&Path>) -> Outcome {
    let &[n1, n2] = normal else {
        return Err(Failure::Config(format!("--normal needs two components, got {}", normal.len())));
    };
    let state: PrimitiveState = read_json(path)?;
    let report = hyperbolicity_report(params, &state);
    if let Some(msg) = failure_list(report.failures()) {
        return Err(Failure::Property(msg));
    }
    let spec = char_spectrum(params, &state, [n1, n2], front_speed)?;
    println!("v.N = {:.10}", spec.v_n);
    println!("{:<8} {:>16} {:>16}", "index", "lambda", "lambda - dtphi");
    for (k, (l, s)) in spec.lambdas.iter().zip(&spec.shifted).enumerate() {
        println!("{:<8} {:>16.10} {:>16.10}", k + 1, l, s);
    }
    let m = &spec.speeds;
    println!(
        "fast-: {:.10}  slow-: {:.10}  slow+: {:.10}  fast+: {:.10}",
        m.fast_minus, m.slow_minus, m.slow_plus, m.fast_plus
    );
    write_json(out, "speeds.json", &spec)
}

fn classify_pair(params: &ThermoParams, left: &Path, right: &Path, front: &Path, tol: f64, out: Option<&Path>) -> Outcome {
    let minus: PrimitiveState = read_json(left)?;
    let plus: PrimitiveState = read_json(right)?;
    let f: FrontDerivatives = read_json(front)?;
    for (side, s) in [("left", &minus), ("right", &plus)] {
        if let Some(msg) = failure_list(hyperbolicity_report(params, s).failures()) {
            return Err(Failure::Property(format!("{side} state: {msg}")));
        }
    }
    let geom = FrontGeometry::from_front(f.dtphi, f.d2phi, f.d3phi);
    let class = classify(params, &minus, &plus, &geom, tol)?;
    let residuals = rh_residuals(params, &minus, &plus, &geom)?;
    println!("{class}");
    println!("max jump-condition residual {:.3e}", residuals.max_abs());
    write_json(
        out,
        "classify.json",
        &serde_json::json!({ "class": class.to_string(), "residuals": residuals, "tol": tol }),
    )
}

fn audit(
    params: &ThermoParams,
    basic: Option<&Path>,
    builtin: Builtin,
    cutoff: CutoffKind,
    grid: GridSpec,
    out: Option<&Path>,
) -> Outcome {
    let fields: BasicFields = match basic {
        Some(p) => read_json(p)?,
        None => {
            let kind = match builtin {
                Builtin::Constant => BasicKind::Constant,
                Builtin::RayleighTaylor => BasicKind::RayleighTaylor,
            };
            basic_fields(kind, grid.n1, grid.n2, DEFAULT_L1, cutoff)
        }
    };
    let report = audit_basic_state(params, &fields, &Cutoff::new(cutoff))?;
    print_checks(&report.checks);
    for w in &report.warnings {
        println!("warning: {w}");
    }
    write_json(out, "audit.json", &report)?;
    match failure_list(report.failures()) {
        Some(msg) => Err(Failure::Property(msg)),
        None => Ok(()),
    }
}

fn simulate(params: Option<&ThermoParams>, args: &Simulate, linear: bool, out: Option<&Path>) -> Outcome {
    let mut cfg = ScenarioConfig::load(&args.config)?;
    match (&cfg.scenario, linear) {
        (Scenario::Linearized { .. }, true) | (Scenario::Periodic { .. }, false) => {}
        _ => {
            let want = if linear { "linearized" } else { "periodic" };
            return Err(Failure::Config(format!("{} is not a {want} scenario", args.config.display())));
        }
    }
    if let Some(p) = params {
        cfg.params = *p;
    }
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))?;
        let o = &mut cfg.output;
        o.csv.get_or_insert_with(|| dir.join("series.csv"));
        o.summary.get_or_insert_with(|| dir.join("summary.json"));
        o.snapshot.get_or_insert_with(|| dir.join("snapshot.bin"));
    }
    let outcome = run_scenario(&cfg)?;
    let s = &outcome.summary;
    println!("solver        {}", s.solver);
    println!("grid          {}x{}  dt = {:.4e}  steps = {}", s.grid.n1, s.grid.n2, s.grid.dt, s.grid.steps);
    println!("final time    {:.6}", s.grid.final_time);
    let rows: [(&str, Option<f64>); 6] = [
        ("final energy", s.final_energy),
        ("sup |[H_N]|", s.sup_normal_field_jump),
        ("MMS L2 error", s.manufactured_error_l2),
        ("sup |W|", s.sup_w),
        ("div H (L2)", s.final_div_h_l2),
        ("min p", s.min_pressure),
    ];
    for (name, v) in rows {
        if let Some(v) = v {
            println!("{name:<14}{v:.6e}");
        }
    }
    if let Some(g) = &s.gronwall {
        println!("gronwall      slope {:.4}  relative excess {:.4}", g.slope, g.relative_excess());
    }
    let comments = vec![
        format!("rmhd-contact {}", env!("CARGO_PKG_VERSION")),
        format!("schema_version {}", cfg.schema_version),
        format!("solver {} grid {}x{} dt {:e} steps {}", s.solver, s.grid.n1, s.grid.n2, s.grid.dt, s.grid.steps),
    ];
    write_outputs(&outcome, &cfg.output, &comments)?;
    Ok(())
}

fn verify(seed: u64, only: &[u8], out: Option<&Path>) -> Outcome {
    let ids: Vec<u8> = if only.is_empty() { CRITERIA.to_vec() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
        return Err(Failure::Config(format!("no criterion {bad}")));
    }
    println!("seed {seed}");
    let outcomes: Vec<_> = ids
        .iter()
        .map(|&id| {
            let o = run_criterion(id, seed);
            println!("{o}");
            o
        })
        .collect();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    write_json(out, "verify.json", &serde_json::json!({ "seed": seed, "criteria": outcomes }))?;
    if failed > 0 {
        Err(Failure::Property(format!("{failed} criteria failed")))
    } else {
        Ok(())
    }
}

fn convergence(levels: &[usize], final_time: f64, min_order: f64, out: Option<&Path>) -> Outcome {
    if levels.len() < 2 {
        return Err(Failure::Config("need at least two levels".into()));
    }
    let rep = manufactured_study(levels, final_time)?;
    println!("{:>6} {:>12} {:>14} {:>14} {:>14} {:>8}", "n", "h1", "L2 error", "front error", "sup [H_N]", "order");
    for (k, l) in rep.levels.iter().enumerate() {
        let order = if k == 0 { String::from("-") } else { format!("{:.3}", rep.orders[k - 1]) };
        println!(
            "{:>6} {:>12.4e} {:>14.4e} {:>14.4e} {:>14.4e} {:>8}",
            l.n, l.h1, l.error_l2, l.front_error_l2, l.sup_hn_jump, order
        );
    }
    println!("total {:.2} s", rep.seconds);
    write_json(out, "convergence.json", &rep)?;
    let worst = rep.min_order();
    if worst >= min_order {
        Ok(())
    } else {
        Err(Failure::Property(format!("observed order {worst:.3} below {min_order}")))
    }
}

fn run(cli: Cli) -> Outcome {
    let params_override: Option<ThermoParams> = match &cli.params {
        Some(p) => {
            let params: ThermoParams = read_json(p)?;
            params.validate()?;
            Some(params)
        }
        None => None,
    };
    let params = params_override.unwrap_or_default();
    let out = cli.out.as_deref();
    match &cli.command {
        Command::CheckState { state } => check_state(&params, state, out),
        Command::Speeds { state, normal, front_speed } => speeds(&params, state, normal, *front_speed, out),
        Command::Classify { left, right, front, tol } => classify_pair(&params, left, right, front, *tol, out),
        Command::Audit { basic, builtin, cutoff, grid } => {
            audit(&params, basic.as_deref(), *builtin, (*cutoff).into(), *grid, out)
        }
        Command::SimulateLinear(args) => simulate(params_override.as_ref(), args, true, out),
        Command::SimulatePeriodic(args) => simulate(params_override.as_ref(), args, false, out),
        Command::Verify { seed, only } => verify(*seed, only, out),
        Command::Convergence { levels, final_time, tol } => convergence(levels, *final_time, *tol, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Property(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
    }
}
