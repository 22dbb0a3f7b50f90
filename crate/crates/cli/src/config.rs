//! Experiment description files.
//!
//! A config is TOML with the sections `medium`, `coupling`, `probe`, `grid`,
//! `output` and the optional `sweep`, `converge` and `[[variant]]` entries.
//! All quantities are in units of `tau` and `L`, as their key suffix says.
//! A `preset` fills every field it knows; explicit keys win.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twocolor_core::dynamics::{IntegratorConfig, Interpolation, RecordStride, SpaceTimeGrid, ZStepper};
use twocolor_core::params::{validate, CouplingDrive, MediumParams, ProbeInput, RegimeWarning, Scales, Schedule};
use twocolor_core::presets::{GridSpec, Preset, PresetName, Variant};
use twocolor_core::ParamError;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("missing `{0}` (set it or pick a preset)")]
    Missing(&'static str),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("{0}")]
    Invalid(String),
}

impl From<toml::de::Error> for ConfigError {
    fn from(e: toml::de::Error) -> Self {
        ConfigError::Parse(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunMode {
    Analytic,
    Propagate,
    Memory,
    Sweep,
    Converge,
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RunMode::Analytic => "analytic",
            RunMode::Propagate => "propagate",
            RunMode::Memory => "memory",
            RunMode::Sweep => "sweep",
            RunMode::Converge => "converge",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Constant,
    TanhGate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepperKind {
    Euler,
    PredictorCorrector,
    Trapezoidal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpolationKind {
    Linear,
    Cubic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    Z,
    T,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa12_tau_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma13_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_p1_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_p2_tau: Option<f64>,
    /// Vacuum light speed in m/s; infinite when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_m_per_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length_m: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi1_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rabi2_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_per_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2_tau: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amp1_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amp2_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub varphi12: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_center_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width_tau: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nz: Option<usize>,
    /// Time samples; the stiffness minimum when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max_tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_stepper: Option<StepperKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<InterpolationKind>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride_z: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride_t: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Mode evaluated at each point.
    pub base_mode: RunMode,
    /// Dotted path such as `coupling.phi1`.
    pub param: String,
    pub values: Vec<f64>,
    pub metrics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeSection {
    pub levels: usize,
    pub axis: AxisKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSection {
    pub label: String,
    pub i1: f64,
    pub phi12: f64,
    pub varphi12: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<RunMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub medium: MediumSection,
    #[serde(default)]
    pub coupling: CouplingSection,
    #[serde(default)]
    pub probe: ProbeSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converge: Option<ConvergeSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variant: Vec<VariantSection>,
}

fn fill<T: Clone>(slot: &mut Option<T>, v: T) {
    if slot.is_none() {
        *slot = Some(v);
    }
}

pub fn default_mode(name: PresetName) -> RunMode {
    match name {
        PresetName::Fig2 | PresetName::Fig3 => RunMode::Analytic,
        PresetName::Fig4 | PresetName::Fig4Calibrated => RunMode::Propagate,
        PresetName::Fig5 | PresetName::Fig5Calibrated => RunMode::Memory,
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn preset_name(&self) -> Result<Option<PresetName>, ConfigError> {
        self.preset.as_deref().map(str::parse).transpose().map_err(|e| ConfigError::Invalid(format!("{e}")))
    }

    /// Fill every unset field the preset defines.
    pub fn expand(&mut self) -> Result<(), ConfigError> {
        let Some(name) = self.preset_name()? else {
            return Ok(());
        };
        let p = Preset::get(name);
        fill(&mut self.mode, default_mode(name));
        let m = &mut self.medium;
        fill(&mut m.kappa12_tau_l, p.medium.kappa12);
        fill(&mut m.gamma2_tau, p.medium.gamma2);
        fill(&mut m.gamma13_tau, p.medium.gamma13);
        fill(&mut m.delta_p1_tau, p.medium.delta_p1);
        fill(&mut m.delta_p2_tau, p.medium.delta_p2);
        fill(&mut m.tau_s, p.scales.tau);
        fill(&mut m.length_m, p.scales.length);
        let c = &mut self.coupling;
        fill(&mut c.rabi1_tau, p.drive.amp1);
        fill(&mut c.rabi2_tau, p.drive.amp2);
        fill(&mut c.phi1, p.drive.phi1);
        fill(&mut c.phi2, p.drive.phi2);
        match p.drive.schedule {
            Schedule::Constant => fill(&mut c.schedule, ScheduleKind::Constant),
            Schedule::TanhGate { sigma, t1, t2 } => {
                fill(&mut c.schedule, ScheduleKind::TanhGate);
                fill(&mut c.sigma_per_tau, sigma);
                fill(&mut c.t1_tau, t1);
                fill(&mut c.t2_tau, t2);
            }
        }
        let pr = &mut self.probe;
        fill(&mut pr.amp1_tau, p.probe.amp1);
        fill(&mut pr.amp2_tau, p.probe.amp2);
        fill(&mut pr.varphi12, p.probe.varphi12);
        fill(&mut pr.t_center_tau, p.probe.t_center);
        fill(&mut pr.width_tau, p.probe.width);
        let g = &mut self.grid;
        fill(&mut g.nz, p.grid.nz);
        if let Some(nt) = p.grid.nt {
            fill(&mut g.nt, nt);
        }
        fill(&mut g.t_max_tau, p.grid.t_max);
        if self.variant.is_empty() {
            self.variant = p
                .variants
                .iter()
                .map(|v| VariantSection { label: v.label.clone(), i1: v.i1, phi12: v.phi12, varphi12: v.varphi12 })
                .collect();
        }
        Ok(())
    }

    /// Check everything a run needs without running it.
    pub fn validate(&self) -> Result<Experiment, ConfigError> {
        Experiment::from_config(self)
    }
}

/// Read, expand and validate a config file.
pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
    let mut c = ExperimentConfig::from_toml(&text)?;
    c.expand()?;
    c.validate()?;
    Ok(c)
}

pub fn write_config(c: &ExperimentConfig, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, c.to_toml())
}

fn need<T: Copy>(v: Option<T>, name: &'static str) -> Result<T, ConfigError> {
    v.ok_or(ConfigError::Missing(name))
}

/// Fully resolved experiment, ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub mode: RunMode,
    pub medium: MediumParams,
    pub drive: CouplingDrive,
    pub probe: ProbeInput,
    pub grid: GridSpec,
    pub integrator: IntegratorConfig,
    pub scales: Scales,
    pub variants: Vec<Variant>,
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
    pub converge: Option<ConvergeSection>,
    pub warnings: Vec<RegimeWarning>,
}

impl Experiment {
    pub fn from_config(c: &ExperimentConfig) -> Result<Self, ConfigError> {
        let mode = need(c.mode, "mode")?;
        let m = &c.medium;
        let scales = Scales { tau: m.tau_s.unwrap_or(1.0), length: m.length_m.unwrap_or(1.0) };
        if !(scales.tau > 0.0 && scales.length > 0.0) {
            return Err(ConfigError::Invalid("medium.tau_s and medium.length_m must be positive".into()));
        }
        let c_light = match m.c_m_per_s {
            Some(v) if !(v > 0.0) => return Err(ConfigError::Invalid("medium.c_m_per_s must be positive".into())),
            Some(v) => Some(v * scales.tau / scales.length),
            None => None,
        };
        let medium = MediumParams {
            kappa12: need(m.kappa12_tau_l, "medium.kappa12_tau_l")?,
            gamma2: need(m.gamma2_tau, "medium.gamma2_tau")?,
            gamma13: need(m.gamma13_tau, "medium.gamma13_tau")?,
            delta_p1: need(m.delta_p1_tau, "medium.delta_p1_tau")?,
            delta_p2: need(m.delta_p2_tau, "medium.delta_p2_tau")?,
            length: 1.0,
            tau: 1.0,
            c_light,
        };
        medium.check()?;

        let cs = &c.coupling;
        let schedule = match cs.schedule.unwrap_or(ScheduleKind::Constant) {
            ScheduleKind::Constant => Schedule::Constant,
            ScheduleKind::TanhGate => Schedule::TanhGate {
                sigma: need(cs.sigma_per_tau, "coupling.sigma_per_tau")?,
                t1: need(cs.t1_tau, "coupling.t1_tau")?,
                t2: need(cs.t2_tau, "coupling.t2_tau")?,
            },
        };
        let drive = CouplingDrive {
            amp1: need(cs.rabi1_tau, "coupling.rabi1_tau")?,
            amp2: need(cs.rabi2_tau, "coupling.rabi2_tau")?,
            phi1: cs.phi1.unwrap_or(0.0),
            phi2: cs.phi2.unwrap_or(0.0),
            schedule,
        };
        drive.check()?;

        let ps = &c.probe;
        let probe = ProbeInput {
            amp1: need(ps.amp1_tau, "probe.amp1_tau")?,
            amp2: need(ps.amp2_tau, "probe.amp2_tau")?,
            varphi12: ps.varphi12.unwrap_or(0.0),
            t_center: need(ps.t_center_tau, "probe.t_center_tau")?,
            width: need(ps.width_tau, "probe.width_tau")?,
        };
        probe.check()?;
        if probe.peak_intensity() == 0.0 && mode != RunMode::Analytic {
            return Err(ConfigError::Invalid("probe carries no amplitude".into()));
        }

        let gs = &c.grid;
        let grid = GridSpec { nz: need(gs.nz, "grid.nz")?, nt: gs.nt, t_max: need(gs.t_max_tau, "grid.t_max_tau")? };
        if grid.nz < 2 {
            return Err(ConfigError::Invalid(format!("grid.nz must be at least 2, got {}", grid.nz)));
        }
        if !(grid.t_max > 0.0) {
            return Err(ConfigError::Invalid(format!("grid.t_max_tau must be positive, got {}", grid.t_max)));
        }
        let integrator = IntegratorConfig {
            z_stepper: match gs.z_stepper.unwrap_or(StepperKind::Trapezoidal) {
                StepperKind::Euler => ZStepper::Euler,
                StepperKind::PredictorCorrector => ZStepper::PredictorCorrector,
                StepperKind::Trapezoidal => ZStepper::Trapezoidal,
            },
            interpolation: match gs.interpolation.unwrap_or(InterpolationKind::Cubic) {
                InterpolationKind::Linear => Interpolation::Linear,
                InterpolationKind::Cubic => Interpolation::Cubic,
            },
            record: RecordStride::default(),
            allow_truncation: false,
        };

        let variants = c
            .variant
            .iter()
            .map(|v| {
                if !(0.0..=1.0).contains(&v.i1) {
                    return Err(ConfigError::Invalid(format!("variant `{}`: i1 must lie in [0, 1]", v.label)));
                }
                Ok(Variant { label: v.label.clone(), i1: v.i1, phi12: v.phi12, varphi12: v.varphi12 })
            })
            .collect::<Result<Vec<_>, _>>()?;

        if mode == RunMode::Sweep {
            let s = c.sweep.as_ref().ok_or(ConfigError::Missing("sweep"))?;
            check_sweep(s)?;
        }
        if mode == RunMode::Converge {
            let cv = c.converge.as_ref().ok_or(ConfigError::Missing("converge"))?;
            if cv.levels < 2 {
                return Err(ConfigError::Invalid(format!("converge.levels must be at least 2, got {}", cv.levels)));
            }
        }
        if matches!(mode, RunMode::Propagate | RunMode::Memory | RunMode::Converge) {
            let g = spatial_grid(&grid, &medium, &drive).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            g.check_stiffness(&medium, &drive).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        let warnings = validate(&medium, &drive, Some(&probe))?;
        Ok(Self {
            mode,
            medium,
            drive,
            probe,
            grid,
            integrator,
            scales,
            variants,
            output: c.output.clone(),
            sweep: c.sweep.clone(),
            converge: c.converge.clone(),
            warnings,
        })
    }

    pub fn space_time_grid(&self) -> Result<SpaceTimeGrid, twocolor_core::SimError> {
        spatial_grid(&self.grid, &self.medium, &self.drive)
    }

    pub fn format(&self) -> Format {
        self.output.format.unwrap_or_default()
    }
}

fn spatial_grid(g: &GridSpec, m: &MediumParams, d: &CouplingDrive) -> Result<SpaceTimeGrid, twocolor_core::SimError> {
    let nt = g.nt.unwrap_or_else(|| SpaceTimeGrid::min_time_samples(g.t_max, m, d));
    SpaceTimeGrid::unchecked(g.nz, nt, m.length, g.t_max)
}

pub fn check_sweep(s: &SweepSection) -> Result<(), ConfigError> {
    if s.values.is_empty() {
        return Err(ConfigError::Invalid("sweep.values is empty".into()));
    }
    if s.metrics.is_empty() {
        return Err(ConfigError::Invalid("sweep.metrics is empty".into()));
    }
    if matches!(s.base_mode, RunMode::Sweep | RunMode::Converge) {
        return Err(ConfigError::Invalid(format!("sweep.base_mode cannot be {}", s.base_mode)));
    }
    let known = crate::run::metric_names(s.base_mode);
    if let Some(bad) = s.metrics.iter().find(|m| !known.contains(&m.as_str())) {
        return Err(ConfigError::Invalid(format!(
            "unknown metric `{bad}` for {} runs (known: {})",
            s.base_mode,
            known.join(", ")
        )));
    }
    Ok(())
}
