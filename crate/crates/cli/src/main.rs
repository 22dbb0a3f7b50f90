use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twocolor_cli::config::{check_sweep, AxisKind, SweepSection};
use twocolor_cli::run::metric_names;
use twocolor_cli::sweep::parse_values;
use twocolor_cli::{converge_config, prepare, run_config, sweep_config, CliError, ConfigError, Format, RunMode};

#[derive(Parser)]
#[command(name = "sim", version, about = "Two-color single-photon propagation and memory simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Z,
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// fig2, fig3, fig4, fig4_calibrated, fig5 or fig5_calibrated.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Repeat a run over a list of values of one parameter.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Dotted path such as `coupling.phi1`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; `pi` is understood, e.g. `0,pi/2`.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Comma-separated metric names; all metrics of the mode by default.
        #[arg(long)]
        metrics: Option<String>,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
    /// Halve the z or t step repeatedly and report the differences.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum, default_value = "z")]
        axis: AxisArg,
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<FormatArg>,
    },
}

fn format(f: Option<FormatArg>) -> Option<Format> {
    f.map(|f| match f {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    })
}

fn out_dir(c: &twocolor_cli::ExperimentConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| c.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cli: Cli) -> Result<twocolor_cli::Report, CliError> {
    match cli.command {
        Command::Run { config, preset, out, format: f } => {
            let c = prepare(&config, preset.as_deref(), format(f))?;
            run_config(&c, out.as_deref())
        }
        Command::Sweep { config, param, values, metrics, preset, out, format: f } => {
            let c = prepare(&config, preset.as_deref(), format(f))?;
            let mode = match c.mode {
                Some(RunMode::Sweep) => c.sweep.as_ref().map(|s| s.base_mode).ok_or(ConfigError::Missing("sweep"))?,
                Some(m) => m,
                None => return Err(ConfigError::Missing("mode").into()),
            };
            let metrics = match metrics {
                Some(m) => m.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                None => metric_names(mode).iter().map(|s| s.to_string()).collect(),
            };
            let s = SweepSection { base_mode: mode, param, values: parse_values(&values)?, metrics };
            check_sweep(&s)?;
            let dir = out_dir(&c, out);
            sweep_config(&c, &s, &dir)
        }
        Command::Converge { config, levels, axis, preset, out, format: f } => {
            let c = prepare(&config, preset.as_deref(), format(f))?;
            let axis = match axis {
                AxisArg::Z => AxisKind::Z,
                AxisArg::T => AxisKind::T,
            };
            let dir = out_dir(&c, out);
            converge_config(&c, levels, axis, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(report) => {
            println!("{}", report.summary);
            for f in &report.files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
