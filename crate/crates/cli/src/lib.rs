//! Config-driven runner: closed-form profiles, numerical propagation,
//! storage and retrieval, parameter sweeps and convergence studies.

pub mod config;
pub mod run;
pub mod sweep;
pub mod table;

use std::path::{Path, PathBuf};

pub use config::{load_config, write_config, ConfigError, Experiment, ExperimentConfig, Format, RunMode};
pub use run::{run_single, write_outputs, OutputFile, RunError, RunResult};
pub use sweep::{run_sweep, SweepTable};

/// Failure of a command, split by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("simulation error: {0}")]
    Run(#[from] RunError),
}

impl CliError {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Run(_) => 2,
        }
    }
}

/// Result of a command: the one-line summary and the files written.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

fn out_dir(c: &ExperimentConfig, out: Option<&Path>) -> PathBuf {
    out.map(Path::to_path_buf).or_else(|| c.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

/// Load a config file and apply command-line overrides.
pub fn prepare(path: &Path, preset: Option<&str>, format: Option<Format>) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    let mut c = ExperimentConfig::from_toml(&text)?;
    if let Some(p) = preset {
        c.preset = Some(p.to_string());
    }
    if let Some(f) = format {
        c.output.format = Some(f);
    }
    c.expand()?;
    Ok(c)
}

/// `sim run`: the config's own mode, including sweep and converge sections.
pub fn run_config(c: &ExperimentConfig, out: Option<&Path>) -> Result<Report, CliError> {
    let e = c.validate()?;
    let dir = out_dir(c, out);
    match e.mode {
        RunMode::Sweep => {
            let s = e.sweep.clone().ok_or(ConfigError::Missing("sweep"))?;
            sweep_config(c, &s, &dir)
        }
        RunMode::Converge => {
            let cv = e.converge.clone().ok_or(ConfigError::Missing("converge"))?;
            converge_config(c, cv.levels, cv.axis, &dir)
        }
        _ => {
            let r = run_single(&e, true)?;
            let files = write_outputs(&dir, &r.files)?;
            Ok(Report { summary: r.summary, files })
        }
    }
}

/// `sim sweep`.
pub fn sweep_config(c: &ExperimentConfig, s: &config::SweepSection, dir: &Path) -> Result<Report, CliError> {
    let t = run_sweep(c, s)?;
    let failed = t.rows.iter().filter(|r| r.error.is_some()).count();
    let files = write_outputs(dir, &[t.render(c.output.format.unwrap_or_default())])?;
    let summary = format!("sweep over {}: {} points, {} failed", s.param, t.rows.len(), failed);
    Ok(Report { summary, files })
}

/// `sim converge`.
pub fn converge_config(
    c: &ExperimentConfig,
    levels: usize,
    axis: config::AxisKind,
    dir: &Path,
) -> Result<Report, CliError> {
    let mut c = c.clone();
    c.mode = Some(RunMode::Converge);
    c.converge = Some(config::ConvergeSection { levels, axis });
    let e = c.validate()?;
    let r = run::run_converge(&e, levels, axis)?;
    let files = write_outputs(dir, &r.files)?;
    Ok(Report { summary: r.summary, files })
}
