//! Running a resolved experiment and collecting its output files.

use std::path::{Path, PathBuf};

use twocolor_core::analytic::{intensity_profile, oscillation_rate, phase_profile, OscillationRate};
use twocolor_core::dynamics::{convergence_study, simulate, window_energy, EvolutionRecord, RecordStride, RefineAxis};
use twocolor_core::params::{CouplingDrive, Mode, ProbeInput, Schedule};
use twocolor_core::protocol::run_memory;
use twocolor_core::{AnalyticError, ProtocolError, SimError};

use crate::config::{AxisKind, Experiment, RunMode};
use crate::table::{scalars_json, Table};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("nothing to export: {0}")]
    Empty(&'static str),
    #[error("{0} runs are driven by the sweep and converge commands")]
    NotSingle(RunMode),
}

/// Named output file held in memory until the run has succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub summary: String,
    /// Scalar results, in a fixed order per mode.
    pub metrics: Vec<(&'static str, f64)>,
    pub files: Vec<OutputFile>,
}

impl RunResult {
    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }
}

const ANALYTIC_METRICS: &[&str] = &["I1_L", "I2_L", "Phi12_L_rad", "I1_min", "I1_max", "period_over_L", "v_a_m_per_s"];
const PROPAGATE_METRICS: &[&str] = &[
    "I1_L",
    "I2_L",
    "Phi12_L_rad",
    "I1_min",
    "I1_max",
    "transmission",
    "period_over_L",
    "analytic_period_over_L",
    "velocity_m_per_s",
    "v_a_m_per_s",
];
const MEMORY_METRICS: &[&str] =
    &["eta_abs", "eta_ret", "eta", "fidelity", "phase_in_rad", "phase_out_rad", "storage_time_tau"];

/// Scalars a single run of `mode` reports.
pub fn metric_names(mode: RunMode) -> &'static [&'static str] {
    match mode {
        RunMode::Analytic => ANALYTIC_METRICS,
        RunMode::Propagate => PROPAGATE_METRICS,
        RunMode::Memory => MEMORY_METRICS,
        RunMode::Sweep | RunMode::Converge => &[],
    }
}

fn constant(d: &CouplingDrive) -> CouplingDrive {
    CouplingDrive { schedule: Schedule::Constant, ..d.clone() }
}

fn or_nan<E>(r: Result<f64, E>) -> f64 {
    r.unwrap_or(f64::NAN)
}

/// Closed-form profile `z_over_L, I1, I2, Phi12_rad` on `nz` depths.
pub fn analytic_table(
    p: &ProbeInput,
    d: &CouplingDrive,
    rate: &OscillationRate,
    nz: usize,
    length: f64,
) -> Result<Table, RunError> {
    let mut t = Table::new(&["z_over_L", "I1", "I2", "Phi12_rad"]);
    for i in 0..nz {
        let z = length * i as f64 / (nz - 1) as f64;
        let (i1, i2) = intensity_profile(p, d, rate, z)?;
        t.push(vec![z / length, i1, i2, or_nan(phase_profile(p, d, rate, z))]);
    }
    Ok(t)
}

fn column_stats(t: &Table, col: usize) -> (f64, f64) {
    t.rows.iter().map(|r| r[col]).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn run_analytic(e: &Experiment) -> Result<RunResult, RunError> {
    let fmt = e.format();
    let d = constant(&e.drive);
    let rate = oscillation_rate(&e.medium, &d)?;
    let base = analytic_table(&e.probe, &d, &rate, e.grid.nz, e.medium.length)?;
    let mut files = vec![file(base.render("intensity_profile", fmt))];
    for v in &e.variants {
        let (vd, vp) = v.apply(&d);
        let t = analytic_table(&vp, &vd, &oscillation_rate(&e.medium, &vd)?, e.grid.nz, e.medium.length)?;
        files.push(file(t.render(&format!("intensity_profile_{}", v.label), fmt)));
    }
    let last = base.rows.last().expect("at least two depths");
    let (lo, hi) = column_stats(&base, 1);
    let period = or_nan(rate.period());
    let v_a = rate.v_a() * e.scales.length / e.scales.tau;
    let metrics = vec![
        ("I1_L", last[1]),
        ("I2_L", last[2]),
        ("Phi12_L_rad", last[3]),
        ("I1_min", lo),
        ("I1_max", hi),
        ("period_over_L", period),
        ("v_a_m_per_s", v_a),
    ];
    let summary = format!(
        "analytic: period {period:.4} L, v_a {v_a:.4e} m/s, I1(L) {:.4}, I2(L) {:.4}, Phi12(L) {:.4} rad",
        last[1], last[2], last[3]
    );
    Ok(RunResult { summary, metrics, files })
}

fn file((name, contents): (String, String)) -> OutputFile {
    OutputFile { name, contents }
}

/// Default subsampling: about 50 depths and 500 times.
fn record_stride(e: &Experiment, nz: usize, nt: usize) -> RecordStride {
    RecordStride {
        z: e.output.stride_z.unwrap_or(((nz - 1) / 50).max(1)),
        t: e.output.stride_t.unwrap_or(((nt - 1) / 500).max(1)),
    }
}

/// `z_over_L, t_over_tau, I1, I2, e1_re, e1_im, e2_re, e2_im, g_re, g_im`.
pub fn evolution_table(rec: &EvolutionRecord) -> Result<Table, RunError> {
    if rec.is_empty() {
        return Err(RunError::Empty("evolution record"));
    }
    let mut t = Table::new(&["z_over_L", "t_over_tau", "I1", "I2", "e1_re", "e1_im", "e2_re", "e2_im", "g_re", "g_im"]);
    for (row, &iz) in rec.z_index.iter().enumerate() {
        for col in 0..rec.t_index.len() {
            let (e1, e2, g) = (rec.e1[[row, col]], rec.e2[[row, col]], rec.g[[row, col]]);
            t.push(vec![
                rec.grid.z(iz) / rec.grid.z_max,
                rec.t_lab(row, col),
                rec.normalized_intensity(Mode::One, row, col),
                rec.normalized_intensity(Mode::Two, row, col),
                e1.re,
                e1.im,
                e2.re,
                e2.im,
                g.re,
                g.im,
            ]);
        }
    }
    Ok(t)
}

/// Peak-tracked `z_over_L, I1, I2, Phi12_rad` at every depth.
pub fn peak_table(rec: &EvolutionRecord) -> Table {
    let mut t = Table::new(&["z_over_L", "I1", "I2", "Phi12_rad"]);
    for ((p, (i1, i2)), phase) in rec.peaks.iter().zip(rec.peak_intensities()).zip(rec.peak_phases()) {
        t.push(vec![p.z / rec.grid.z_max, i1, i2, phase.unwrap_or(f64::NAN)]);
    }
    t
}

fn run_propagate(e: &Experiment, keep_fields: bool) -> Result<RunResult, RunError> {
    let grid = e.space_time_grid()?;
    let record = if keep_fields { record_stride(e, grid.nz, grid.nt) } else { RecordStride::ENDS };
    let cfg = twocolor_core::dynamics::IntegratorConfig { record, ..e.integrator };
    let rec = simulate(&e.medium, &e.drive, &e.probe, &grid, &cfg)?;
    let peaks = peak_table(&rec);
    let last = peaks.rows.last().expect("at least two depths");
    let (lo, hi) = column_stats(&peaks, 1);
    let ein = window_energy([&rec.input[0], &rec.input[1]], grid.dt, 0, grid.nt - 1);
    let eout = window_energy([&rec.output[0], &rec.output[1]], grid.dt, 0, grid.nt - 1);
    let speed = e.scales.length / e.scales.tau;
    let period = rec.spatial_period().unwrap_or(f64::NAN);
    let velocity = rec.peak_velocity().map_or(f64::NAN, |v| v * speed);
    let rate = oscillation_rate(&e.medium, &constant(&e.drive)).ok();
    let analytic_period = rate.as_ref().map_or(f64::NAN, |r| or_nan(r.period()));
    let v_a = rate.as_ref().map_or(f64::NAN, |r| r.v_a() * speed);
    let metrics = vec![
        ("I1_L", last[1]),
        ("I2_L", last[2]),
        ("Phi12_L_rad", last[3]),
        ("I1_min", lo),
        ("I1_max", hi),
        ("transmission", if ein > 0.0 { eout / ein } else { f64::NAN }),
        ("period_over_L", period),
        ("analytic_period_over_L", analytic_period),
        ("velocity_m_per_s", velocity),
        ("v_a_m_per_s", v_a),
    ];
    let summary = if period.is_nan() {
        format!(
            "propagate: no oscillation within L (analytic period {analytic_period:.4} L), velocity {velocity:.4e} m/s (v_a {v_a:.4e} m/s), I1(L) {:.4}",
            last[1]
        )
    } else {
        format!(
            "propagate: period {period:.4} L (analytic {analytic_period:.4} L), velocity {velocity:.4e} m/s (v_a {v_a:.4e} m/s), I1(L) {:.4}",
            last[1]
        )
    };
    let mut files = Vec::new();
    if keep_fields {
        files.push(file(evolution_table(&rec)?.render("evolution", e.format())));
        files.push(file(peaks.render("peak_profile", e.format())));
    }
    Ok(RunResult { summary, metrics, files })
}

fn run_memory_mode(e: &Experiment, keep_fields: bool) -> Result<RunResult, RunError> {
    let grid = e.space_time_grid()?;
    let record = if keep_fields { record_stride(e, grid.nz, grid.nt) } else { RecordStride::ENDS };
    let cfg = twocolor_core::dynamics::IntegratorConfig { record, ..e.integrator };
    let (rec, m) = run_memory(&e.medium, &e.drive, &e.probe, &grid, &cfg)?;
    let metrics = vec![
        ("eta_abs", m.eta_abs),
        ("eta_ret", m.eta_ret),
        ("eta", m.eta),
        ("fidelity", m.fidelity),
        ("phase_in_rad", m.phase_in),
        ("phase_out_rad", m.phase_out),
        ("storage_time_tau", m.storage_time),
    ];
    let summary = format!(
        "memory: eta_abs {:.4} eta_ret {:.4} eta {:.4} fidelity {:.4} storage {:.2} tau",
        m.eta_abs, m.eta_ret, m.eta, m.fidelity, m.storage_time
    );
    let mut files = vec![OutputFile { name: "metrics.json".into(), contents: scalars_json(&metrics) }];
    if keep_fields {
        files.push(file(evolution_table(&rec)?.render("evolution", e.format())));
    }
    Ok(RunResult { summary, metrics, files })
}

/// Run one analytic, propagate or memory experiment. `keep_fields = false`
/// skips the field tables (used by sweeps).
pub fn run_single(e: &Experiment, keep_fields: bool) -> Result<RunResult, RunError> {
    match e.mode {
        RunMode::Analytic => run_analytic(e),
        RunMode::Propagate => run_propagate(e, keep_fields),
        RunMode::Memory => run_memory_mode(e, keep_fields),
        m @ (RunMode::Sweep | RunMode::Converge) => Err(RunError::NotSingle(m)),
    }
}

/// Step-refinement study along one axis.
pub fn run_converge(e: &Experiment, levels: usize, axis: AxisKind) -> Result<RunResult, RunError> {
    let grid = e.space_time_grid()?;
    let gated = matches!(e.drive.schedule, Schedule::TanhGate { .. });
    let cfg = twocolor_core::dynamics::IntegratorConfig { allow_truncation: gated, ..e.integrator };
    let axis = match axis {
        AxisKind::Z => RefineAxis::Z,
        AxisKind::T => RefineAxis::T,
    };
    let rep = convergence_study(&e.medium, &e.drive, &e.probe, &grid, &cfg, levels, axis)?;
    let ratios = rep.ratios();
    let mut t = Table::new(&["level", "nz", "nt", "step", "diff_to_next", "ratio"]);
    for (k, l) in rep.levels.iter().enumerate() {
        let ratio = if k >= 1 { ratios.get(k - 1).copied().unwrap_or(f64::NAN) } else { f64::NAN };
        t.push(vec![k as f64, l.nz as f64, l.nt as f64, l.step, l.diff_to_next.unwrap_or(f64::NAN), ratio]);
    }
    let orders: Vec<String> = rep.observed_orders().iter().map(|o| format!("{o:.3}")).collect();
    let axis_name = match axis {
        RefineAxis::Z => "z",
        RefineAxis::T => "t",
    };
    let summary = format!("converge ({axis_name}): observed orders [{}]", orders.join(", "));
    let metrics = ratios.last().map(|r| vec![("last_ratio", *r)]).unwrap_or_default();
    Ok(RunResult { summary, metrics, files: vec![file(t.render("convergence", e.format()))] })
}

/// Write every file into `dir`, creating it if needed. If any write fails,
/// the files written so far are removed.
pub fn write_outputs(dir: &Path, files: &[OutputFile]) -> Result<Vec<PathBuf>, RunError> {
    if files.is_empty() {
        return Err(RunError::Empty("no output files"));
    }
    std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.into(), source })?;
    let mut written = Vec::with_capacity(files.len());
    for f in files {
        let path = dir.join(&f.name);
        if let Err(source) = std::fs::write(&path, &f.contents) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            let _ = std::fs::remove_file(&path);
            return Err(RunError::Io { path, source });
        }
        written.push(path);
    }
    Ok(written)
}
