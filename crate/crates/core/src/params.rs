//! Medium, coupling and probe parameters.
//!
//! All downstream code is unit-agnostic: the evolution equations are
//! dimensionally consistent, so any self-consistent unit system works. The
//! presets and the CLI work in the natural system where time is measured in
//! units of the probe time scale `tau` and length in units of the medium
//! length `L`; [`nondimensionalize`] maps physical values into that system.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::ParamError;

/// Constants of the atomic medium.
///
/// Rates are angular frequencies. The complex detunings are derived on demand
/// with [`complex_detuning`] and never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MediumParams {
    /// Collective field-atom coupling, units 1/(time * length).
    pub kappa12: f64,
    /// Total decay rate of the excited level.
    pub gamma2: f64,
    /// Ground-state decoherence rate.
    pub gamma13: f64,
    /// One-photon detuning of mode 1.
    pub delta_p1: f64,
    /// One-photon detuning of mode 2.
    pub delta_p2: f64,
    /// Medium length.
    pub length: f64,
    /// Probe time scale.
    pub tau: f64,
    /// Vacuum speed of light; `None` drops the 1/c terms.
    pub c_light: Option<f64>,
}

impl MediumParams {
    pub fn check(&self) -> Result<(), ParamError> {
        non_negative("kappa12", self.kappa12)?;
        non_negative("gamma2", self.gamma2)?;
        non_negative("gamma13", self.gamma13)?;
        finite("delta_p1", self.delta_p1)?;
        finite("delta_p2", self.delta_p2)?;
        positive("length", self.length)?;
        positive("tau", self.tau)?;
        if let Some(c) = self.c_light {
            positive("c_light", c)?;
        }
        Ok(())
    }

    /// 1/c, or zero when the speed of light is treated as infinite.
    pub fn inv_c(&self) -> f64 {
        self.c_light.map_or(0.0, |c| 1.0 / c)
    }
}

/// Time dependence shared by both coupling legs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Schedule {
    Constant,
    /// Switch off around `t1` and back on around `t2` with steepness `sigma`.
    TanhGate {
        sigma: f64,
        t1: f64,
        t2: f64,
    },
}

impl Schedule {
    /// Scalar gate factor in [0, 1] multiplying both coupling amplitudes.
    pub fn factor(&self, t: f64) -> f64 {
        match *self {
            Schedule::Constant => 1.0,
            Schedule::TanhGate { sigma, t1, t2 } => 0.5 * (2.0 - (sigma * (t - t1)).tanh() + (sigma * (t - t2)).tanh()),
        }
    }
}

/// The two classical coupling beams.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingDrive {
    /// Rabi-frequency magnitude of leg 1.
    pub amp1: f64,
    /// Rabi-frequency magnitude of leg 2.
    pub amp2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub schedule: Schedule,
}

impl CouplingDrive {
    pub fn constant(amp1: f64, amp2: f64, phi1: f64, phi2: f64) -> Self {
        Self { amp1, amp2, phi1: reduce_angle(phi1), phi2: reduce_angle(phi2), schedule: Schedule::Constant }
    }

    pub fn check(&self) -> Result<(), ParamError> {
        non_negative("amp1", self.amp1)?;
        non_negative("amp2", self.amp2)?;
        finite("phi1", self.phi1)?;
        finite("phi2", self.phi2)?;
        if let Schedule::TanhGate { sigma, t1, t2 } = self.schedule {
            positive("sigma", sigma)?;
            finite("t1", t1)?;
            finite("t2", t2)?;
            if t1 >= t2 {
                return Err(ParamError::Invalid { field: "t2", value: t2, reason: "gate requires t1 < t2" });
            }
        }
        Ok(())
    }

    /// Complex amplitudes `|Omega_cj| e^{i phi_j}` at full drive.
    pub fn complex_amps(&self) -> [C64; 2] {
        [C64::from_polar(self.amp1, self.phi1), C64::from_polar(self.amp2, self.phi2)]
    }

    /// Instantaneous complex coupling values, gated by the schedule.
    pub fn at(&self, t: f64) -> [C64; 2] {
        let f = self.schedule.factor(t);
        let [c1, c2] = self.complex_amps();
        [c1 * f, c2 * f]
    }

    /// `|Omega|^2 = |Omega_c1|^2 + |Omega_c2|^2`.
    pub fn total_sq(&self) -> f64 {
        self.amp1 * self.amp1 + self.amp2 * self.amp2
    }

    /// Coupling phase difference phi_1 - phi_2, reduced to (-pi, pi].
    pub fn phase12(&self) -> f64 {
        reduce_angle(self.phi1 - self.phi2)
    }
}

/// Gaussian boundary envelopes of the two probe components.
///
/// `E_1(0,t) = amp1 e^{i varphi12} G(t)`, `E_2(0,t) = amp2 G(t)` with
/// `G(t) = exp(-(t - t_center)^2 / width^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeInput {
    pub amp1: f64,
    pub amp2: f64,
    pub varphi12: f64,
    pub t_center: f64,
    pub width: f64,
}

impl ProbeInput {
    /// Probe with a given fraction of the peak intensity in mode 1 and a
    /// total peak amplitude `amp`.
    pub fn from_fraction(i1: f64, amp: f64, varphi12: f64, t_center: f64, width: f64) -> Self {
        Self { amp1: amp * i1.sqrt(), amp2: amp * (1.0 - i1).max(0.0).sqrt(), varphi12, t_center, width }
    }

    pub fn check(&self) -> Result<(), ParamError> {
        non_negative("amp1", self.amp1)?;
        non_negative("amp2", self.amp2)?;
        finite("varphi12", self.varphi12)?;
        positive("t_center", self.t_center)?;
        positive("width", self.width)?;
        Ok(())
    }

    /// Complex peak amplitudes of the two modes.
    pub fn peak_amps(&self) -> [C64; 2] {
        [C64::from_polar(self.amp1, self.varphi12), C64::new(self.amp2, 0.0)]
    }

    pub fn envelope(&self, t: f64) -> [C64; 2] {
        let x = (t - self.t_center) / self.width;
        let shape = (-x * x).exp();
        let [a1, a2] = self.peak_amps();
        [a1 * shape, a2 * shape]
    }

    /// Normalized input intensities; they sum to one.
    pub fn fractions(&self) -> (f64, f64) {
        let total = self.amp1 * self.amp1 + self.amp2 * self.amp2;
        (self.amp1 * self.amp1 / total, self.amp2 * self.amp2 / total)
    }

    /// `|E_1^0(t_c)|^2 + |E_2^0(t_c)|^2`.
    pub fn peak_intensity(&self) -> f64 {
        self.amp1 * self.amp1 + self.amp2 * self.amp2
    }
}

/// Physical scales used to make the parameter set dimensionless.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scales {
    pub tau: f64,
    pub length: f64,
}

impl Scales {
    pub const UNIT: Scales = Scales { tau: 1.0, length: 1.0 };
}

/// Parameter set expressed in units of `tau` and `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dimensionless {
    pub medium: MediumParams,
    pub drive: CouplingDrive,
    pub probe: ProbeInput,
    pub scales: Scales,
}

/// Rescale every quantity: rates by `tau`, lengths by `L`, kappa12 by `tau*L`.
pub fn nondimensionalize(m: &MediumParams, d: &CouplingDrive, p: &ProbeInput) -> Result<Dimensionless, ParamError> {
    m.check()?;
    d.check()?;
    p.check()?;
    let s = Scales { tau: m.tau, length: m.length };
    Ok(Dimensionless {
        medium: scale_medium(m, s, false),
        drive: scale_drive(d, s.tau, false),
        probe: scale_probe(p, s.tau, false),
        scales: s,
    })
}

/// Inverse of [`nondimensionalize`].
pub fn redimensionalize(b: &Dimensionless) -> (MediumParams, CouplingDrive, ProbeInput) {
    let s = b.scales;
    (scale_medium(&b.medium, s, true), scale_drive(&b.drive, s.tau, true), scale_probe(&b.probe, s.tau, true))
}

fn rescale(x: f64, k: f64, inverse: bool) -> f64 {
    if inverse {
        x / k
    } else {
        x * k
    }
}

fn scale_medium(m: &MediumParams, s: Scales, inv: bool) -> MediumParams {
    let (tau, len) = (s.tau, s.length);
    MediumParams {
        kappa12: rescale(m.kappa12, tau * len, inv),
        gamma2: rescale(m.gamma2, tau, inv),
        gamma13: rescale(m.gamma13, tau, inv),
        delta_p1: rescale(m.delta_p1, tau, inv),
        delta_p2: rescale(m.delta_p2, tau, inv),
        length: if inv { len } else { 1.0 },
        tau: if inv { tau } else { 1.0 },
        c_light: m.c_light.map(|c| rescale(c, tau / len, inv)),
    }
}

fn scale_drive(d: &CouplingDrive, tau: f64, inv: bool) -> CouplingDrive {
    let schedule = match d.schedule {
        Schedule::Constant => Schedule::Constant,
        Schedule::TanhGate { sigma, t1, t2 } => Schedule::TanhGate {
            sigma: rescale(sigma, tau, inv),
            t1: rescale(t1, tau, !inv),
            t2: rescale(t2, tau, !inv),
        },
    };
    CouplingDrive {
        amp1: rescale(d.amp1, tau, inv),
        amp2: rescale(d.amp2, tau, inv),
        phi1: d.phi1,
        phi2: d.phi2,
        schedule,
    }
}

fn scale_probe(p: &ProbeInput, tau: f64, inv: bool) -> ProbeInput {
    ProbeInput {
        amp1: rescale(p.amp1, tau, inv),
        amp2: rescale(p.amp2, tau, inv),
        varphi12: p.varphi12,
        t_center: rescale(p.t_center, tau, !inv),
        width: rescale(p.width, tau, !inv),
    }
}

/// Mode index of a probe component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

impl TryFrom<usize> for Mode {
    type Error = ParamError;

    fn try_from(j: usize) -> Result<Self, ParamError> {
        match j {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            _ => Err(ParamError::InvalidMode(j)),
        }
    }
}

/// `Delta_pj = delta_pj + i gamma2 / 2`.
///
/// The positive imaginary part makes the optical coherences decay under
/// `d/dt beta = i Delta beta + ...`.
pub fn complex_detuning(m: &MediumParams, mode: Mode) -> C64 {
    let delta = match mode {
        Mode::One => m.delta_p1,
        Mode::Two => m.delta_p2,
    };
    C64::new(delta, 0.5 * m.gamma2)
}

/// An approximation the closed-form model relies on that the parameters
/// do not satisfy.
#[derive(Clone, Debug, PartialEq)]
pub enum RegimeWarning {
    /// `delta_p2` is not much larger than `gamma2`.
    WeakDetuning { delta_p2: f64, gamma2: f64 },
    /// Unequal coupling magnitudes or `delta_p1 != 0`.
    NotSymmetric,
    /// Pulse bandwidth too large for the transparency window.
    NotAdiabatic { bandwidth: f64, window: f64 },
}

impl std::fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegimeWarning::WeakDetuning { delta_p2, gamma2 } => {
                write!(f, "far-detuning approximation fails: |delta_p2| = {delta_p2} < 20 gamma2 = {}", 20.0 * gamma2)
            }
            RegimeWarning::NotSymmetric => {
                write!(f, "simplified oscillation rate assumes |Omega_c1| = |Omega_c2| and delta_p1 = 0")
            }
            RegimeWarning::NotAdiabatic { bandwidth, window } => write!(
                f,
                "adiabaticity: pulse bandwidth {bandwidth} is not small against the transparency window {window}"
            ),
        }
    }
}

/// Factor by which `delta_p2` must exceed `gamma2`.
pub const DETUNING_MARGIN: f64 = 20.0;
/// Required ratio between the transparency window and the pulse bandwidth.
pub const ADIABATIC_MARGIN: f64 = 10.0;

/// Check the parameter regime. Invariant violations are hard errors; failed
/// approximations come back as warnings.
pub fn validate(m: &MediumParams, d: &CouplingDrive, p: Option<&ProbeInput>) -> Result<Vec<RegimeWarning>, ParamError> {
    m.check()?;
    d.check()?;
    if let Some(p) = p {
        p.check()?;
    }

    let mut warnings = Vec::new();
    if m.delta_p2.abs() < DETUNING_MARGIN * m.gamma2 {
        warnings.push(RegimeWarning::WeakDetuning { delta_p2: m.delta_p2, gamma2: m.gamma2 });
    }
    let scale = d.amp1.max(d.amp2).max(f64::MIN_POSITIVE);
    if (d.amp1 - d.amp2).abs() > 1e-9 * scale || m.delta_p1 != 0.0 {
        warnings.push(RegimeWarning::NotSymmetric);
    }
    if let Some(p) = p {
        let bandwidth = 1.0 / p.width;
        let loss = complex_detuning(m, Mode::One).norm().max(m.gamma2);
        let window = if loss > 0.0 { d.total_sq() / loss } else { f64::INFINITY };
        if bandwidth * ADIABATIC_MARGIN > window {
            warnings.push(RegimeWarning::NotAdiabatic { bandwidth, window });
        }
    }
    Ok(warnings)
}

/// Reduce an angle to (-pi, pi].
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn finite(field: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::Invalid { field, value, reason: "must be finite" })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<(), ParamError> {
    finite(field, value)?;
    if value < 0.0 {
        return Err(ParamError::Invalid { field, value, reason: "must be non-negative" });
    }
    Ok(())
}

fn positive(field: &'static str, value: f64) -> Result<(), ParamError> {
    finite(field, value)?;
    if value <= 0.0 {
        return Err(ParamError::Invalid { field, value, reason: "must be positive" });
    }
    Ok(())
}
