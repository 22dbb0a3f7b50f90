//! Reference parameter sets, in units of `tau` and `L`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::params::{CouplingDrive, MediumParams, ProbeInput, Scales, Schedule};

pub const TAU_S: f64 = 25e-9;
pub const LENGTH_M: f64 = 0.1;
pub const KAPPA: f64 = 500.0;
/// Coupling constant giving an oscillation period of `0.1 L` at the
/// reference detuning and Rabi frequencies.
pub const KAPPA_CALIBRATED: f64 = 5027.0;
pub const GAMMA2: f64 = 0.16;
pub const GAMMA13: f64 = 1.6e-5;
pub const DELTA_P1: f64 = 0.0;
pub const DELTA_P2: f64 = 160.0;
pub const RABI: f64 = 18.0;
pub const T_CENTER: f64 = 3.5;
pub const WIDTH: f64 = 1.0;
pub const PEAK_AMP: f64 = 1.3e-3;
pub const SIGMA: f64 = 0.5;
pub const T1: f64 = 2.0 * T_CENTER;
pub const T2: f64 = 6.0 * T_CENTER;
pub const T_FINAL: f64 = 30.0;
/// Coupling constant making the analytic period exactly `L` in the
/// lossless closed-form presets.
pub const KAPPA_ONE_PERIOD: f64 = PI * DELTA_P2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetName {
    Fig2,
    Fig3,
    Fig4,
    Fig4Calibrated,
    Fig5,
    Fig5Calibrated,
}

impl PresetName {
    pub const ALL: [PresetName; 6] = [
        PresetName::Fig2,
        PresetName::Fig3,
        PresetName::Fig4,
        PresetName::Fig4Calibrated,
        PresetName::Fig5,
        PresetName::Fig5Calibrated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Fig2 => "fig2",
            PresetName::Fig3 => "fig3",
            PresetName::Fig4 => "fig4",
            PresetName::Fig4Calibrated => "fig4_calibrated",
            PresetName::Fig5 => "fig5",
            PresetName::Fig5Calibrated => "fig5_calibrated",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnknownPreset(pub String);

impl fmt::Display for UnknownPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = PresetName::ALL.iter().map(PresetName::as_str).collect();
        write!(f, "unknown preset `{}` (expected one of {})", self.0, names.join(", "))
    }
}

impl std::error::Error for UnknownPreset {}

impl FromStr for PresetName {
    type Err = UnknownPreset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetName::ALL.into_iter().find(|p| p.as_str() == s).ok_or_else(|| UnknownPreset(s.to_string()))
    }
}

/// One curve of a multi-curve figure: input share of mode 1, coupling phase
/// difference and probe phase difference.
#[derive(Clone, Debug, PartialEq)]
pub struct Variant {
    pub label: String,
    pub i1: f64,
    pub phi12: f64,
    pub varphi12: f64,
}

/// Grid size; `nt = None` picks the smallest count meeting the stiffness bound.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub nz: usize,
    pub nt: Option<usize>,
    pub t_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Preset {
    pub name: PresetName,
    pub medium: MediumParams,
    pub drive: CouplingDrive,
    pub probe: ProbeInput,
    pub grid: GridSpec,
    pub scales: Scales,
    /// Extra curves drawn on the same figure; empty for single runs.
    pub variants: Vec<Variant>,
}

/// Probe with peak amplitude [`PEAK_AMP`] in the stronger mode.
pub fn probe_with_share(i1: f64, varphi12: f64) -> ProbeInput {
    let (amp1, amp2) = if i1 >= 0.5 {
        (PEAK_AMP, PEAK_AMP * ((1.0 - i1) / i1).sqrt())
    } else {
        (PEAK_AMP * (i1 / (1.0 - i1)).sqrt(), PEAK_AMP)
    };
    ProbeInput { amp1, amp2, varphi12, t_center: T_CENTER, width: WIDTH }
}

impl Variant {
    fn new(label: &str, i1: f64, phi12: f64, varphi12: f64) -> Self {
        Self { label: label.to_string(), i1, phi12, varphi12 }
    }

    /// The base drive and probe with this variant's shares and phases.
    pub fn apply(&self, d: &CouplingDrive) -> (CouplingDrive, ProbeInput) {
        let drive = CouplingDrive { phi1: d.phi2 + self.phi12, ..d.clone() };
        (drive, probe_with_share(self.i1, self.varphi12))
    }
}

fn medium(kappa12: f64, gamma2: f64, gamma13: f64) -> MediumParams {
    MediumParams {
        kappa12,
        gamma2,
        gamma13,
        delta_p1: DELTA_P1,
        delta_p2: DELTA_P2,
        length: 1.0,
        tau: 1.0,
        c_light: None,
    }
}

fn gate() -> Schedule {
    Schedule::TanhGate { sigma: SIGMA, t1: T1, t2: T2 }
}

impl Preset {
    pub fn get(name: PresetName) -> Preset {
        let scales = Scales { tau: TAU_S, length: LENGTH_M };
        let constant = CouplingDrive::constant(RABI, RABI, 0.0, 0.0);
        let analytic_grid = GridSpec { nz: 401, nt: Some(2), t_max: 2.0 * T_CENTER };
        match name {
            PresetName::Fig2 => {
                let variants = vec![
                    Variant::new("solid", 0.99, 0.0, PI / 4.0),
                    Variant::new("dashed", 0.85, 0.0, PI / 4.0),
                    Variant::new("dotted", 0.70, 0.0, PI / 4.0),
                ];
                let (drive, probe) = variants[2].apply(&constant);
                Preset {
                    name,
                    medium: medium(KAPPA_ONE_PERIOD, 0.0, 0.0),
                    drive,
                    probe,
                    grid: analytic_grid,
                    scales,
                    variants,
                }
            }
            PresetName::Fig3 => {
                let variants = vec![
                    Variant::new("solid", 0.5, 0.0, PI / 3.0),
                    Variant::new("dashed", 0.5, PI / 2.0, PI / 3.0),
                    Variant::new("dotted", 0.5, 0.0, 0.0),
                ];
                let (drive, probe) = variants[0].apply(&constant);
                Preset {
                    name,
                    medium: medium(KAPPA_ONE_PERIOD, 0.0, 0.0),
                    drive,
                    probe,
                    grid: analytic_grid,
                    scales,
                    variants,
                }
            }
            PresetName::Fig4 | PresetName::Fig4Calibrated => {
                let (kappa, grid) = if name == PresetName::Fig4 {
                    (KAPPA, GridSpec { nz: 401, nt: None, t_max: 10.0 })
                } else {
                    (KAPPA_CALIBRATED, GridSpec { nz: 1001, nt: None, t_max: 20.0 })
                };
                Preset {
                    name,
                    medium: medium(kappa, GAMMA2, GAMMA13),
                    drive: constant,
                    probe: probe_with_share(0.7, PI / 4.0),
                    grid,
                    scales,
                    variants: Vec::new(),
                }
            }
            PresetName::Fig5 | PresetName::Fig5Calibrated => {
                let (kappa, nz) = if name == PresetName::Fig5 { (KAPPA, 401) } else { (KAPPA_CALIBRATED, 801) };
                Preset {
                    name,
                    medium: medium(kappa, GAMMA2, GAMMA13),
                    drive: CouplingDrive { schedule: gate(), ..constant },
                    probe: probe_with_share(0.5, 0.0),
                    grid: GridSpec { nz, nt: None, t_max: T_FINAL },
                    scales,
                    variants: Vec::new(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::oscillation_rate;

    #[test]
    fn literal_values() {
        let table: [(&str, f64, f64); 14] = [
            ("tau_s", TAU_S, 25e-9),
            ("t_c", T_CENTER, 3.5),
            ("length_m", LENGTH_M, 0.1),
            ("gamma2", GAMMA2, 0.16),
            ("gamma13", GAMMA13, 1.6e-5),
            ("kappa12", KAPPA, 500.0),
            ("delta_p1", DELTA_P1, 0.0),
            ("delta_p2", DELTA_P2, 160.0),
            ("rabi", RABI, 18.0),
            ("sigma", SIGMA, 0.5),
            ("t1", T1, 7.0),
            ("t2", T2, 21.0),
            ("t_f", T_FINAL, 30.0),
            ("amp", PEAK_AMP, 1.3e-3),
        ];
        for (name, got, want) in table {
            assert_eq!(got, want, "{name}");
        }
    }

    #[test]
    fn fig4_and_fig5_use_literal_sets() {
        for name in [PresetName::Fig4, PresetName::Fig5] {
            let p = Preset::get(name);
            assert_eq!(p.medium.kappa12, 500.0);
            assert_eq!(p.medium.gamma2, 0.16);
            assert_eq!(p.medium.delta_p2, 160.0);
            assert_eq!((p.drive.amp1, p.drive.amp2, p.drive.phase12()), (18.0, 18.0, 0.0));
            assert_eq!(p.scales, Scales { tau: 25e-9, length: 0.1 });
        }
        let f4 = Preset::get(PresetName::Fig4);
        assert_eq!(f4.probe.amp1, 1.3e-3);
        assert!((f4.probe.fractions().0 - 0.7).abs() < 1e-12);
        assert_eq!(f4.probe.varphi12, PI / 4.0);
        let f5 = Preset::get(PresetName::Fig5);
        assert_eq!((f5.probe.amp1, f5.probe.amp2, f5.probe.varphi12), (1.3e-3, 1.3e-3, 0.0));
        assert_eq!(f5.drive.schedule, Schedule::TanhGate { sigma: 0.5, t1: 7.0, t2: 21.0 });
        assert_eq!(f5.grid.t_max, 30.0);
    }

    #[test]
    fn calibrated_period_is_a_tenth() {
        let p = Preset::get(PresetName::Fig4Calibrated);
        let period = oscillation_rate(&p.medium, &p.drive).unwrap().period().unwrap();
        assert!((period - 0.1).abs() < 1e-3, "{period}");
        assert_eq!(Preset::get(PresetName::Fig5Calibrated).medium.kappa12, KAPPA_CALIBRATED);
    }

    #[test]
    fn closed_form_presets_have_one_period() {
        for name in [PresetName::Fig2, PresetName::Fig3] {
            let p = Preset::get(name);
            let rate = oscillation_rate(&p.medium, &p.drive).unwrap();
            assert!((rate.alpha.re.abs() - 2.0 * PI).abs() < 1e-9);
            assert_eq!(rate.alpha.im, 0.0);
            assert_eq!(p.variants.len(), 3);
        }
        let f3 = Preset::get(PresetName::Fig3);
        let (d, probe) = f3.variants[1].apply(&f3.drive);
        assert!((d.phase12() - PI / 2.0).abs() < 1e-15);
        assert_eq!(probe.varphi12, PI / 3.0);
    }

    #[test]
    fn names_round_trip() {
        for n in PresetName::ALL {
            assert_eq!(n.as_str().parse::<PresetName>().unwrap(), n);
        }
        assert!("fig9".parse::<PresetName>().unwrap_err().to_string().contains("fig4_calibrated"));
    }
}
