use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use twocolor_cli::config::SweepSection;
use twocolor_cli::{load_config, run_config, run_single, write_config, CliError, ExperimentConfig, RunMode};

fn expanded(text: &str) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml(text).unwrap();
    c.expand().unwrap();
    c
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

fn sim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).output().unwrap()
}

#[test]
fn analytic_preset_writes_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_config(&expanded("preset = \"fig2\"\n[grid]\nnz = 21"), Some(dir.path())).unwrap();
    assert_eq!(r.files.len(), 4);
    let base = read(&dir.path().join("intensity_profile.csv"));
    assert!(base.starts_with("z_over_L,I1,I2,Phi12_rad\n"));
    assert_eq!(base.lines().count(), 22);
    for f in ["solid", "dashed", "dotted"] {
        assert!(dir.path().join(format!("intensity_profile_{f}.csv")).exists());
    }
    let i1 = csv_column(&base, 1);
    let i2 = csv_column(&base, 2);
    for (a, b) in i1.iter().zip(&i2) {
        assert!((a + b - 1.0).abs() < 1e-12);
    }
}

#[test]
fn json_format_has_column_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let c = expanded("preset = \"fig3\"\n[grid]\nnz = 5\n[output]\nformat = \"json\"");
    run_config(&c, Some(dir.path())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("intensity_profile.json"))).unwrap();
    assert_eq!(v["I1"].as_array().unwrap().len(), 5);
}

const SMALL_MEMORY: &str = r#"
mode = "memory"
[medium]
kappa12_tau_l = 100.0
gamma2_tau = 0.5
gamma13_tau = 0.0
delta_p1_tau = 0.0
delta_p2_tau = 5.0
[coupling]
rabi1_tau = 3.0
rabi2_tau = 3.0
schedule = "tanh_gate"
sigma_per_tau = 2.0
t1_tau = 8.0
t2_tau = 14.0
[probe]
amp1_tau = 0.7071067811865476
amp2_tau = 0.7071067811865476
t_center_tau = 4.0
width_tau = 1.5
[grid]
nz = 41
nt = 2401
t_max_tau = 24.0
"#;

#[test]
fn memory_metrics_file() {
    let dir = tempfile::tempdir().unwrap();
    run_config(&expanded(SMALL_MEMORY), Some(dir.path())).unwrap();
    let v: serde_json::Value = serde_json::from_str(&read(&dir.path().join("metrics.json"))).unwrap();
    for k in ["eta_abs", "eta_ret", "eta", "fidelity", "phase_in_rad", "phase_out_rad", "storage_time_tau"] {
        assert!(v[k].is_number(), "{k}");
    }
    let eta = v["eta"].as_f64().unwrap();
    assert!(eta > 0.0 && eta <= 1.0);
    assert!((v["storage_time_tau"].as_f64().unwrap() - 6.0).abs() < 1e-12);
    assert!(read(&dir.path().join("evolution.csv")).starts_with("z_over_L,t_over_tau,I1,I2,"));
}

#[test]
fn reruns_are_byte_identical() {
    let c = expanded(SMALL_MEMORY);
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_config(&c, Some(a.path())).unwrap();
    run_config(&c, Some(b.path())).unwrap();
    for f in ["metrics.json", "evolution.csv"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
}

#[test]
fn empty_medium_does_not_oscillate() {
    let c = expanded("preset = \"fig4\"\n[medium]\nkappa12_tau_l = 0.0\n[grid]\nnz = 11\nt_max_tau = 8.0");
    let r = run_single(&c.validate().unwrap(), false).unwrap();
    assert!(r.metric("period_over_L").unwrap().is_nan());
    assert!(r.summary.contains("no oscillation"), "{}", r.summary);
    assert!((r.metric("transmission").unwrap() - 1.0).abs() < 1e-6);
    assert!((r.metric("I1_L").unwrap() - r.metric("I1_max").unwrap()).abs() < 1e-9);
}

#[test]
fn coupling_phase_sweep_on_symmetric_input() {
    let dir = tempfile::tempdir().unwrap();
    let c = expanded("preset = \"fig3\"\n[probe]\nvarphi12 = 0.0\n[grid]\nnz = 201");
    let s = SweepSection {
        base_mode: RunMode::Analytic,
        param: "coupling.phi1".into(),
        values: vec![0.0, PI / 2.0],
        metrics: vec!["I1_min".into(), "I1_max".into()],
    };
    twocolor_cli::sweep_config(&c, &s, dir.path()).unwrap();
    let text = read(&dir.path().join("sweep.csv"));
    assert!(text.starts_with("coupling.phi1,I1_min,I1_max,error\n"));
    let (lo, hi) = (csv_column(&text, 1), csv_column(&text, 2));
    assert!((hi[0] - lo[0]).abs() < 1e-9, "phase-matched input stays flat");
    assert!(hi[1] - lo[1] > 0.99, "quadrature input swings fully");
}

#[test]
fn single_point_sweep_matches_single_run() {
    let c = expanded("preset = \"fig4\"\n[grid]\nnz = 21\nt_max_tau = 8.0");
    let s = SweepSection {
        base_mode: RunMode::Propagate,
        param: "medium.kappa12_tau_l".into(),
        values: vec![300.0],
        metrics: vec!["I1_L".into(), "transmission".into()],
    };
    let t = twocolor_cli::run_sweep(&c, &s).unwrap();
    let mut single = c.clone();
    single.medium.kappa12_tau_l = Some(300.0);
    let r = run_single(&single.validate().unwrap(), false).unwrap();
    assert_eq!(t.rows[0].metrics, vec![r.metric("I1_L").unwrap(), r.metric("transmission").unwrap()]);
}

#[test]
fn library_errors_map_to_exit_codes() {
    let bad = ExperimentConfig::from_toml("preset = \"fig3\"\n[medium]\ngamma2_tau = -1.0").map(|mut c| {
        c.expand().unwrap();
        c
    });
    let err = run_config(&bad.unwrap(), None).unwrap_err();
    assert!(matches!(err, CliError::Config(_)));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let out = dir.path().join("out").to_string_lossy().into_owned();

    let good = write("good.toml", "preset = \"fig2\"\n[grid]\nnz = 11");
    let o = sim(&["run", "--config", &good, "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("analytic:"));

    let unknown = write("unknown.toml", "preset = \"fig2\"\n[medium]\nkapa = 1.0");
    assert_eq!(sim(&["run", "--config", &unknown]).status.code(), Some(1));
    assert_eq!(sim(&["run", "--config", &good, "--preset", "fig9"]).status.code(), Some(1));
    assert_eq!(sim(&["run", "--config", "/nonexistent/cfg.toml"]).status.code(), Some(1));

    // Window ends with most of the pulse still inside the medium.
    let short = write("short.toml", "preset = \"fig4\"\n[grid]\nnz = 11\nt_max_tau = 4.0");
    let o = sim(&["run", "--config", &short, "--out", &out]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let blocked = write("blocked", "");
    assert_eq!(sim(&["run", "--config", &good, "--out", &blocked]).status.code(), Some(2));

    let o = sim(&["sweep", "--config", &good, "--param", "coupling.phi1", "--values", "0,pi/2", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&dir.path().join("out/sweep.csv")).lines().count(), 3);
    let o = sim(&["sweep", "--config", &good, "--param", "coupling.nope", "--values", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn config_round_trip(
        preset in prop::sample::select(vec!["fig2", "fig3", "fig4", "fig5"]),
        kappa in 0.0..1000.0f64,
        gamma2 in 0.0..2.0f64,
        phi1 in -PI..PI,
        nz in 2usize..500,
    ) {
        let mut c = expanded(&format!("preset = \"{preset}\""));
        c.medium.kappa12_tau_l = Some(kappa);
        c.medium.gamma2_tau = Some(gamma2);
        c.coupling.phi1 = Some(phi1);
        c.grid.nz = Some(nz);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        write_config(&c, &path).unwrap();
        match c.validate() {
            Ok(_) => prop_assert_eq!(load_config(&path).unwrap(), c),
            Err(_) => prop_assert!(load_config(&path).is_err()),
        }
    }
}
