//! End-to-end runs of both solvers, the scenario files and the output
//! formats.

use std::path::PathBuf;

use rmhd_contact::config::{run_scenario, write_outputs, ScenarioConfig, ScenarioRun, SCHEMA_VERSION};
use rmhd_contact::interface::CutoffKind;
use rmhd_contact::linearized::ZeroSources;
use rmhd_contact::scenarios::{basic_state, periodic_planar, periodic_uniform, BasicKind, CompactSource, DEFAULT_L1};
use rmhd_contact::solver::{
    read_snapshot, run_linearized, run_nonlinear_periodic, LinearOptions, PeriodicInitial, PeriodicOptions,
};
use rmhd_contact::verification::manufactured_level;
use rmhd_contact::{Error, ThermoParams};

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn rt_basic(n: usize) -> rmhd_contact::linearized::BasicState {
    basic_state(ThermoParams::default(), BasicKind::RayleighTaylor, n, n, DEFAULT_L1, CutoffKind::Quintic).unwrap()
}

#[test]
fn zero_data_stay_zero() {
    let run = run_linearized(&rt_basic(16), &ZeroSources, &LinearOptions { final_time: 0.5, ..Default::default() })
        .unwrap();
    assert!(run.final_state.fields.all_zero());
    assert!(run.final_state.front.iter().all(|&x| x == 0.0));
    for r in &run.series.records {
        assert_eq!(r.i_total, 0.0);
        assert_eq!(r.hn_jump_max, 0.0);
        assert_eq!(r.entropy_residual, 0.0);
    }
}

#[test]
fn uniform_periodic_state_is_steady() {
    let y = [0.8, -0.3, 0.2, 0.1, 0.4, -0.6, 0.2, 0.5];
    let run =
        run_nonlinear_periodic(&ThermoParams::default(), &periodic_uniform(8, 8, y), &PeriodicOptions::default())
            .unwrap();
    assert!(run.final_fields.iter().all(|z| z == &y));
}

#[test]
fn planar_flow_stays_planar() {
    let opts = PeriodicOptions { steps: Some(20), ..Default::default() };
    let run = run_nonlinear_periodic(&ThermoParams::default(), &periodic_planar(16, 16), &opts).unwrap();
    assert_eq!(run.sup_w(), 0.0);
    assert_eq!(run.series.records.len(), 21);
}

#[test]
fn excessive_cfl_is_rejected() {
    let opts = LinearOptions { cfl: 0.6, ..Default::default() };
    assert!(matches!(run_linearized(&rt_basic(8), &ZeroSources, &opts), Err(Error::Cfl(_))));
    let opts = PeriodicOptions { cfl: 0.0, ..Default::default() };
    assert!(matches!(
        run_nonlinear_periodic(&ThermoParams::default(), &periodic_planar(8, 8), &opts),
        Err(Error::Cfl(_))
    ));
}

#[test]
fn low_pressure_aborts_the_periodic_run() {
    let y = [0.05, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0];
    let err = run_nonlinear_periodic(&ThermoParams::default(), &periodic_uniform(8, 8, y), &PeriodicOptions::default())
        .unwrap_err();
    assert!(matches!(err, Error::HyperbolicityLost { step: 0, .. }));
    assert!(err.to_string().contains("(5.1')"));
}

#[test]
fn malformed_periodic_data_is_a_config_error() {
    let init = PeriodicInitial { n1: 8, n2: 8, fields: vec![[1.0; 8]; 10] };
    assert!(matches!(
        run_nonlinear_periodic(&ThermoParams::default(), &init, &PeriodicOptions::default()),
        Err(Error::Config(_))
    ));
}

#[test]
fn constant_basic_state_fails_the_enforced_rayleigh_taylor_audit() {
    let fields = rmhd_contact::scenarios::basic_fields(BasicKind::Constant, 16, 16, DEFAULT_L1, CutoffKind::Quintic);
    let err = rmhd_contact::linearized::BasicState::new(ThermoParams::default(), fields, CutoffKind::Quintic, true)
        .unwrap_err();
    assert!(err.to_string().contains("(RTL)"), "{err}");
}

#[test]
fn compact_forcing_grows_energy_finitely() {
    let run = run_linearized(&rt_basic(24), &CompactSource::default(), &LinearOptions::default()).unwrap();
    let i: Vec<f64> = run.series.records.iter().map(|r| r.i_total).collect();
    assert!(i.iter().all(|x| x.is_finite() && *x >= 0.0));
    assert_eq!(i[0], 0.0);
    assert!(*i.last().unwrap() > 0.0);
}

#[test]
fn manufactured_error_shrinks_with_the_grid() {
    let coarse = manufactured_level(16, 0.25, true).unwrap();
    let fine = manufactured_level(32, 0.25, true).unwrap();
    assert!(fine.error_l2 < coarse.error_l2 / 3.0, "{} vs {}", coarse.error_l2, fine.error_l2);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let go = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let run = run_linearized(
                &rt_basic(16),
                &CompactSource::default(),
                &LinearOptions { final_time: 0.25, ..Default::default() },
            )
            .unwrap();
            let per = run_nonlinear_periodic(
                &ThermoParams::default(),
                &periodic_planar(16, 16),
                &PeriodicOptions { steps: Some(10), ..Default::default() },
            )
            .unwrap();
            (run.series.to_csv().unwrap(), per.series.to_csv().unwrap())
        })
    };
    assert_eq!(go(1), go(3));
}

#[test]
fn shipped_scenarios_parse() {
    let mut n = 0;
    for entry in std::fs::read_dir(scenario_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let cfg = ScenarioConfig::load(&path).unwrap();
            assert_eq!(cfg.schema_version, SCHEMA_VERSION);
            n += 1;
        }
    }
    assert!(n >= 4);
}

const SMALL_LINEAR: &str = r#"{
  "schema_version": 1,
  "grid": { "n1": 16, "n2": 16 },
  "time": { "final_time": 0.25 },
  "scenario": { "solver": "linearized", "basic": { "builtin": "constant" }, "sources": { "type": "manufactured" } }
}"#;

#[test]
fn unknown_keys_and_versions_are_rejected() {
    assert!(ScenarioConfig::from_json(SMALL_LINEAR).is_ok());
    let extra = SMALL_LINEAR.replacen("\"grid\"", "\"colour\": 1, \"grid\"", 1);
    assert!(matches!(ScenarioConfig::from_json(&extra), Err(Error::Config(_))));
    let old = SMALL_LINEAR.replacen("\"schema_version\": 1", "\"schema_version\": 0", 1);
    assert!(matches!(ScenarioConfig::from_json(&old), Err(Error::Config(_))));
    let nested = SMALL_LINEAR.replacen("\"final_time\": 0.25", "\"final_time\": 0.25, \"tmax\": 2", 1);
    assert!(ScenarioConfig::from_json(&nested).is_err());
}

#[test]
fn manufactured_sources_need_the_constant_state() {
    let text = SMALL_LINEAR.replacen("\"constant\"", "\"rayleigh_taylor\"", 1);
    let cfg = ScenarioConfig::from_json(&text).unwrap();
    assert!(matches!(run_scenario(&cfg), Err(Error::Config(_))));
}

#[test]
fn scenario_outputs_are_written_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ScenarioConfig::from_json(SMALL_LINEAR).unwrap();
    cfg.output.csv = Some("series.csv".into());
    cfg.output.summary = Some("summary.json".into());
    cfg.output.snapshot = Some("snap.bin".into());
    cfg.resolve_paths(dir.path());
    let outcome = run_scenario(&cfg).unwrap();
    assert!(outcome.summary.manufactured_error_l2.unwrap() < 1e-2);
    write_outputs(&outcome, &cfg.output, &["test".into()]).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("series.csv")).unwrap();
    assert!(csv.starts_with("# test\nstep,t,I,"));
    let ScenarioRun::Linear(run) = &outcome.run else { panic!("linearized run expected") };
    assert_eq!(csv.lines().count(), 2 + run.series.records.len());

    let snap = read_snapshot(&dir.path().join("snap.bin")).unwrap();
    assert_eq!(snap.header.arrays, ["plus", "minus", "front"]);
    assert_eq!(snap.data[0].len(), 16 * 16 * 6);
    assert_eq!(snap.data[2], run.final_state.front);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["solver"], "linearized");

    let again = run_scenario(&cfg).unwrap();
    let ScenarioRun::Linear(run2) = &again.run else { unreachable!() };
    assert_eq!(run.series.to_csv().unwrap(), run2.series.to_csv().unwrap());
}
