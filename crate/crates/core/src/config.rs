//! Versioned JSON scenario files for the two solvers, and a runner that
//! writes the CSV series, JSON summary and binary snapshot they ask for.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::interface::{BasicFields, CutoffKind};
use crate::linearized::{BasicState, Sources, ZeroSources};
use crate::scenarios::{basic_fields, periodic_planar, periodic_uniform, BasicKind, CompactSource, Manufactured, DEFAULT_L1};
use crate::solver::{
    gronwall_fit, run_linearized, run_nonlinear_periodic, write_snapshot, GronwallFit, Grid, LinearOptions, LinearRun,
    PeriodicInitial, PeriodicOptions, PeriodicRun, Snapshot, SnapshotHeader,
};
use crate::verification::{manufactured_error, GRONWALL_RELATIVE_DELTA};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub params: ThermoParams,
    pub grid: GridSpec,
    #[serde(default)]
    pub time: TimeSpec,
    pub scenario: Scenario,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n1: usize,
    pub n2: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeSpec {
    pub final_time: f64,
    pub cfl: f64,
    pub dissipation: f64,
    pub record_every: usize,
    /// Periodic solver only: fixed step count instead of `final_time`.
    pub steps: Option<usize>,
}

impl Default for TimeSpec {
    fn default() -> Self {
        TimeSpec { final_time: 1.0, cfl: 0.25, dissipation: 0.01, record_every: 1, steps: None }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case", deny_unknown_fields)]
pub enum Scenario {
    Linearized {
        basic: BasicSpec,
        #[serde(default = "default_l1")]
        l1: f64,
        #[serde(default)]
        cutoff: CutoffKind,
        sources: SourceSpec,
        /// Evolve the normal-field datum `g6`; `false` is the control run
        /// that leaves it at zero.
        #[serde(default = "yes")]
        transport_normal_field: bool,
    },
    Periodic {
        initial: InitialSpec,
    },
}

fn default_l1() -> f64 {
    DEFAULT_L1
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BasicSpec {
    Builtin(BasicKind),
    /// JSON file holding [`BasicFields`]; its grid overrides `grid`.
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    Zero,
    /// Forcing of the built-in manufactured solution; needs the constant
    /// basic state.
    Manufactured,
    Compact {
        center: [f64; 2],
        radius: f64,
        amplitude: [f64; 6],
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Smooth data with `v3 = H3 = 0` and discretely divergence-free `H`.
    Planar,
    /// Constant unknowns `(p, u1, u2, u3, H1, H2, H3, S)`.
    Uniform { state: [f64; 8] },
    /// JSON file holding [`PeriodicInitial`]; its grid overrides `grid`.
    File { path: PathBuf },
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Config(format!("scenario: {e}")))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    /// Make relative input and output paths relative to `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.scenario {
            Scenario::Linearized { basic: BasicSpec::File(p), .. } => fix(p),
            Scenario::Periodic { initial: InitialSpec::File { path } } => fix(path),
            _ => {}
        }
        for p in [&mut self.output.csv, &mut self.output.summary, &mut self.output.snapshot].into_iter().flatten() {
            fix(p);
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Machine-readable outcome of one scenario run.
#[derive(Clone, Debug, Serialize)]
pub struct ScenarioSummary {
    pub schema_version: u32,
    pub solver: &'static str,
    pub grid: Grid,
    pub records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_normal_field_jump: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gronwall: Option<GronwallFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manufactured_error_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_w: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_div_h_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_pressure: Option<f64>,
}

pub enum ScenarioRun {
    Linear(Box<LinearRun>),
    Periodic(PeriodicRun),
}

pub struct ScenarioOutcome {
    pub run: ScenarioRun,
    pub summary: ScenarioSummary,
}

const PLANAR_VARIABLES: [&str; 6] = ["p", "u1", "u2", "H1", "H2", "S"];
const FULL_VARIABLES: [&str; 8] = ["p", "u1", "u2", "u3", "H1", "H2", "H3", "S"];

pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let t = &cfg.time;
    match &cfg.scenario {
        Scenario::Linearized { basic, l1, cutoff, sources, transport_normal_field } => {
            let (fields, kind) = match basic {
                BasicSpec::Builtin(kind) => (basic_fields(*kind, cfg.grid.n1, cfg.grid.n2, *l1, *cutoff), Some(*kind)),
                BasicSpec::File(path) => (read_json::<BasicFields>(path)?, None),
            };
            let enforce_rt = kind == Some(BasicKind::RayleighTaylor);
            let basic = BasicState::new(cfg.params, fields, *cutoff, enforce_rt)?;
            if matches!(sources, SourceSpec::Manufactured) && kind != Some(BasicKind::Constant) {
                return Err(Error::Config("manufactured sources need the builtin constant basic state".into()));
            }
            let mms = matches!(sources, SourceSpec::Manufactured).then(|| Manufactured::new(&basic));
            let src: Box<dyn Sources> = match sources {
                SourceSpec::Zero => Box::new(ZeroSources),
                SourceSpec::Manufactured => Box::new(Manufactured::new(&basic)),
                SourceSpec::Compact { center, radius, amplitude } => {
                    if !(*radius > 0.0) {
                        return Err(Error::Config("compact source radius must be positive".into()));
                    }
                    Box::new(CompactSource { center: *center, radius: *radius, amplitude: *amplitude })
                }
            };
            let opts = LinearOptions {
                cfl: t.cfl,
                dissipation: t.dissipation,
                final_time: t.final_time,
                transport_normal_field: *transport_normal_field,
                record_every: t.record_every,
            };
            let run = run_linearized(&basic, src.as_ref(), &opts)?;
            let times: Vec<f64> = run.series.records.iter().map(|r| r.t).collect();
            let energy: Vec<f64> = run.series.records.iter().map(|r| r.i_total).collect();
            let max_i = energy.iter().copied().fold(0.0, f64::max);
            let gronwall = (max_i > 0.0).then(|| gronwall_fit(&times, &energy, GRONWALL_RELATIVE_DELTA * max_i));
            let manufactured_error_l2 = mms.as_ref().map(|m| manufactured_error(&basic, m, &run).0);
            let summary = ScenarioSummary {
                schema_version: SCHEMA_VERSION,
                solver: "linearized",
                grid: run.grid,
                records: run.series.records.len(),
                final_energy: energy.last().copied(),
                sup_normal_field_jump: Some(run.sup_normal_field_jump()),
                gronwall,
                manufactured_error_l2,
                sup_w: None,
                final_div_h_l2: None,
                min_pressure: None,
            };
            Ok(ScenarioOutcome { run: ScenarioRun::Linear(Box::new(run)), summary })
        }
        Scenario::Periodic { initial } => {
            let (n1, n2) = (cfg.grid.n1, cfg.grid.n2);
            let init = match initial {
                InitialSpec::Planar => periodic_planar(n1, n2),
                InitialSpec::Uniform { state } => periodic_uniform(n1, n2, *state),
                InitialSpec::File { path } => read_json::<PeriodicInitial>(path)?,
            };
            let opts = PeriodicOptions {
                cfl: t.cfl,
                dissipation: t.dissipation,
                final_time: t.final_time,
                steps: t.steps,
                record_every: t.record_every,
            };
            let run = run_nonlinear_periodic(&cfg.params, &init, &opts)?;
            let last = run.series.records.last();
            let summary = ScenarioSummary {
                schema_version: SCHEMA_VERSION,
                solver: "periodic",
                grid: run.grid,
                records: run.series.records.len(),
                final_energy: last.map(|r| r.symmetric_energy),
                sup_normal_field_jump: None,
                gronwall: None,
                manufactured_error_l2: None,
                sup_w: Some(run.sup_w()),
                final_div_h_l2: last.map(|r| r.div_h_l2),
                min_pressure: Some(run.series.records.iter().fold(f64::INFINITY, |a, r| a.min(r.min_pressure))),
            };
            Ok(ScenarioOutcome { run: ScenarioRun::Periodic(run), summary })
        }
    }
}

fn snapshot_of(run: &ScenarioRun) -> Snapshot {
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
    match run {
        ScenarioRun::Linear(r) => {
            let f = &r.final_state.fields;
            Snapshot {
                header: SnapshotHeader {
                    format: "rmhd-linearized".into(),
                    n1: r.grid.n1,
                    n2: r.grid.n2,
                    l1: r.grid.l1,
                    t: r.grid.final_time,
                    variables: names(&PLANAR_VARIABLES),
                    arrays: vec!["plus".into(), "minus".into(), "front".into()],
                },
                data: vec![
                    f.plus.iter().flatten().copied().collect(),
                    f.minus.iter().flatten().copied().collect(),
                    r.final_state.front.clone(),
                ],
            }
        }
        ScenarioRun::Periodic(r) => Snapshot {
            header: SnapshotHeader {
                format: "rmhd-periodic".into(),
                n1: r.grid.n1,
                n2: r.grid.n2,
                l1: r.grid.l1,
                t: r.grid.final_time,
                variables: names(&FULL_VARIABLES),
                arrays: vec!["fields".into()],
            },
            data: vec![r.final_fields.iter().flatten().copied().collect()],
        },
    }
}

/// Write whichever outputs `spec` names. `comments` become `# ` lines at
/// the top of the CSV.
pub fn write_outputs(outcome: &ScenarioOutcome, spec: &OutputSpec, comments: &[String]) -> Result<()> {
    if let Some(path) = &spec.csv {
        match &outcome.run {
            ScenarioRun::Linear(r) => r.series.write_csv(path, comments)?,
            ScenarioRun::Periodic(r) => r.series.write_csv(path, comments)?,
        }
    }
    if let Some(path) = &spec.summary {
        std::fs::write(path, serde_json::to_string_pretty(&outcome.summary)?)?;
    }
    if let Some(path) = &spec.snapshot {
        write_snapshot(path, &snapshot_of(&outcome.run))?;
    }
    Ok(())
}
