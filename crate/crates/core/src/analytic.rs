//! Closed-form propagation model.
//!
//! Under the adiabatic approximation for the optical coherences the field
//! pair splits into a dark combination, proportional to the coupling vector
//! `(Omega_c1, Omega_c2)`, that travels at `v_a` unchanged, and the
//! orthogonal bright combination that picks up `e^{i alpha z}` and travels at
//! `v_b`. Everything here is a rearrangement of that statement.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::AnalyticError;
use crate::params::{complex_detuning, reduce_angle, CouplingDrive, MediumParams, Mode, ProbeInput};

/// Complex oscillation rate and group velocities of the two normal modes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OscillationRate {
    /// Re = spatial mode-exchange rate, Im = spatial damping rate.
    pub alpha: C64,
    /// `1/v_a` of the dark combination.
    pub inv_va: f64,
    /// `1/v_b` of the bright combination; complex when `gamma2 > 0`.
    pub inv_vb: C64,
}

impl OscillationRate {
    pub fn v_a(&self) -> f64 {
        1.0 / self.inv_va
    }

    pub fn v_b(&self) -> f64 {
        1.0 / self.inv_vb.re
    }

    /// Spatial period `2 pi / |Re(alpha)|` of the intensity exchange.
    pub fn period(&self) -> Result<f64, AnalyticError> {
        recovery_length(self, 1)
    }

    /// A lossless copy (`Im(alpha) = 0`), as used for the figure curves.
    pub fn lossless(&self) -> Self {
        Self { alpha: C64::new(self.alpha.re, 0.0), ..*self }
    }
}

/// Exact `alpha`, `1/v_a` and `1/v_b` from the unsimplified expressions.
pub fn oscillation_rate(m: &MediumParams, d: &CouplingDrive) -> Result<OscillationRate, AnalyticError> {
    m.check()?;
    d.check()?;
    let om2 = d.total_sq();
    if om2 == 0.0 {
        return Err(AnalyticError::NoCoupling);
    }
    let (w1, w2) = (d.amp1 * d.amp1, d.amp2 * d.amp2);
    let dp1 = complex_detuning(m, Mode::One);
    let dp2 = complex_detuning(m, Mode::Two);
    let denom = dp1 * w2 + dp2 * w1;
    if denom.norm() == 0.0 {
        return Err(AnalyticError::Singular);
    }
    let slow = m.kappa12 / om2;
    let split = (dp1 - dp2) / denom;
    Ok(OscillationRate {
        alpha: -m.kappa12 * om2 / denom,
        inv_va: m.inv_c() + slow,
        inv_vb: m.inv_c() + slow * w1 * w2 * split * split,
    })
}

/// `alpha ~ -2 kappa12 / delta_p2 + i 2 kappa12 gamma2 / delta_p2^2`, valid for
/// balanced couplings, `delta_p1 = 0` and `delta_p2 >> gamma2`.
pub fn simplified_alpha(m: &MediumParams) -> Result<C64, AnalyticError> {
    if m.delta_p2 == 0.0 {
        return Err(AnalyticError::Singular);
    }
    let k = m.kappa12;
    let d = m.delta_p2;
    Ok(C64::new(-2.0 * k / d, 2.0 * k * m.gamma2 / (d * d)))
}

/// Projectors onto the dark and bright field combinations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeProjectors {
    pub dark: [[C64; 2]; 2],
    pub bright: [[C64; 2]; 2],
}

impl ModeProjectors {
    pub fn new(d: &CouplingDrive) -> Result<Self, AnalyticError> {
        let om2 = d.total_sq();
        if om2 == 0.0 {
            return Err(AnalyticError::NoCoupling);
        }
        let c = d.complex_amps();
        let mut dark = [[C64::new(0.0, 0.0); 2]; 2];
        let mut bright = dark;
        for j in 0..2 {
            for l in 0..2 {
                dark[j][l] = c[j] * c[l].conj() / om2;
                let id = if j == l { 1.0 } else { 0.0 };
                bright[j][l] = id - dark[j][l];
            }
        }
        Ok(Self { dark, bright })
    }
}

/// The 2x2 map from entrance envelopes to envelopes at depth `z`, both taken
/// at the same retarded time.
#[derive(Clone, Copy, Debug)]
pub struct TransferMap {
    pub projectors: ModeProjectors,
    pub rate: OscillationRate,
}

impl TransferMap {
    pub fn new(m: &MediumParams, d: &CouplingDrive) -> Result<Self, AnalyticError> {
        Ok(Self { projectors: ModeProjectors::new(d)?, rate: oscillation_rate(m, d)? })
    }

    pub fn matrix(&self, z: f64) -> [[C64; 2]; 2] {
        let phase = (C64::i() * self.rate.alpha * z).exp();
        let p = &self.projectors;
        let mut out = p.dark;
        for (row, brow) in out.iter_mut().zip(p.bright.iter()) {
            for (x, b) in row.iter_mut().zip(brow.iter()) {
                *x += b * phase;
            }
        }
        out
    }

    pub fn apply(&self, z: f64, e0: [C64; 2]) -> [C64; 2] {
        mat_vec(&self.matrix(z), e0)
    }

    /// Envelopes of a Gaussian probe at `(z, t)`, delayed by `z / v_a`.
    pub fn field(&self, p: &ProbeInput, z: f64, t: f64) -> [C64; 2] {
        self.apply(z, p.envelope(t - z * self.rate.inv_va))
    }
}

fn mat_vec(m: &[[C64; 2]; 2], v: [C64; 2]) -> [C64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

/// Apply the approximate field map to boundary values taken at `t - z/v`.
///
/// For balanced couplings this is
/// `E_j = [E_j^0 (1 + e^{i alpha z}) + E_l^0 e^{i phi_jl} (1 - e^{i alpha z})] / 2`.
pub fn propagate_envelope(
    e0: [C64; 2],
    m: &MediumParams,
    d: &CouplingDrive,
    z: f64,
) -> Result<[C64; 2], AnalyticError> {
    Ok(TransferMap::new(m, d)?.apply(z, e0))
}

/// Peak-of-pulse observables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeState {
    /// Intensity of mode 1 normalized by the summed input peak intensities.
    pub i1: f64,
    pub i2: f64,
    /// `arg(E_1 E_2^*)` in (-pi, pi]; `None` where a mode vanishes.
    pub phase12: Option<f64>,
    pub amp1: C64,
    pub amp2: C64,
}

struct Decay {
    /// `e^{-Im(alpha) z}`
    e1: f64,
    /// `e^{-2 Im(alpha) z}`
    e2: f64,
    c: f64,
    s: f64,
}

impl Decay {
    fn new(rate: &OscillationRate, z: f64) -> Self {
        let e1 = (-rate.alpha.im * z).exp();
        let (s, c) = (rate.alpha.re * z).sin_cos();
        Self { e1, e2: e1 * e1, c, s }
    }
}

fn mode_intensity(a: f64, b: f64, theta: f64, k: &Decay) -> f64 {
    let own = a * a * (1.0 + k.e2 + 2.0 * k.c * k.e1);
    let other = b * b * (1.0 + k.e2 - 2.0 * k.c * k.e1);
    let cross = 2.0 * a * b * (C64::from_polar(1.0, theta) * C64::new(1.0 - k.e2, 2.0 * k.s * k.e1)).re;
    0.25 * (own + other + cross)
}

/// Normalized peak intensities `I_1(z)`, `I_2(z)` from the closed-form
/// intensity expression for balanced couplings.
///
/// The cross term carries the phase `varphi_jl - phi_jl`, the combination
/// that keeps this expression equal to `|propagate_envelope|^2`.
pub fn intensity_profile(
    p: &ProbeInput,
    d: &CouplingDrive,
    rate: &OscillationRate,
    z: f64,
) -> Result<(f64, f64), AnalyticError> {
    let total = p.peak_intensity();
    if total == 0.0 {
        return Err(AnalyticError::ZeroInput);
    }
    let k = Decay::new(rate, z);
    let theta = p.varphi12 - d.phase12();
    let i1 = mode_intensity(p.amp1, p.amp2, theta, &k);
    let i2 = mode_intensity(p.amp2, p.amp1, -theta, &k);
    Ok((i1 / total, i2 / total))
}

/// Closed-form `E_1 E_2^*` at the pulse peak.
pub fn cross_correlation(p: &ProbeInput, d: &CouplingDrive, rate: &OscillationRate, z: f64) -> C64 {
    let k = Decay::new(rate, z);
    let (a, b) = (p.amp1, p.amp2);
    let theta = p.varphi12 - d.phase12();
    let balanced = a * b * C64::new(theta.cos() * 0.5 * (1.0 + k.e2), theta.sin() * k.e1 * k.c);
    let imbalance = C64::new(0.0, k.s * k.e1 * 0.5 * (a * a - b * b));
    let loss = 0.25 * (1.0 - k.e2) * (a * a + b * b);
    (balanced + imbalance + loss) * C64::from_polar(1.0, d.phase12())
}

/// Relative phase `Phi_12(z) = arg(E_1 E_2^*)` at the pulse peak.
pub fn phase_profile(p: &ProbeInput, d: &CouplingDrive, rate: &OscillationRate, z: f64) -> Result<f64, AnalyticError> {
    let x = cross_correlation(p, d, rate, z);
    if x.norm() <= 1e-14 * p.peak_intensity() {
        return Err(AnalyticError::UndefinedPhase { z });
    }
    Ok(reduce_angle(x.arg()))
}

/// All peak observables at depth `z`, from the field map.
pub fn mode_state(p: &ProbeInput, map: &TransferMap, z: f64) -> Result<ModeState, AnalyticError> {
    let total = p.peak_intensity();
    if total == 0.0 {
        return Err(AnalyticError::ZeroInput);
    }
    let [a1, a2] = map.apply(z, p.peak_amps());
    let x = a1 * a2.conj();
    Ok(ModeState {
        i1: a1.norm_sqr() / total,
        i2: a2.norm_sqr() / total,
        phase12: (x.norm() > 1e-14 * total).then(|| reduce_angle(x.arg())),
        amp1: a1,
        amp2: a2,
    })
}

/// Remove 2 pi jumps from a sampled phase curve.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phase.len());
    let mut offset = 0.0;
    let mut prev: Option<f64> = None;
    for &x in phase {
        if let Some(p) = prev {
            let jump = x - p;
            if jump > PI {
                offset -= 2.0 * PI;
            } else if jump < -PI {
                offset += 2.0 * PI;
            }
        }
        prev = Some(x);
        out.push(x + offset);
    }
    out
}

/// Spectrum `E~(omega)` of the Gaussian probe, with the convention
/// `E(t) = int E~(omega) e^{-i omega t} d omega`.
pub fn probe_spectrum(p: &ProbeInput, omega: f64) -> [C64; 2] {
    let w = p.width;
    let shape = w / (2.0 * PI.sqrt()) * (-0.25 * w * w * omega * omega).exp();
    let carrier = C64::from_polar(shape, omega * p.t_center);
    let [a1, a2] = p.peak_amps();
    [a1 * carrier, a2 * carrier]
}

/// Propagate entrance spectra to depth `z` with the linearized two-velocity
/// transfer matrix
/// `T(omega) = P_dark e^{i omega z / v_a} + P_bright e^{i omega z / v_b} e^{i alpha z}`.
///
/// With `merge_velocities` the bright branch also uses `v_a`, which makes the
/// result the spectral image of [`propagate_envelope`].
pub fn frequency_domain_solution(
    spec: [&[C64]; 2],
    m: &MediumParams,
    d: &CouplingDrive,
    z: f64,
    omega: &[f64],
    merge_velocities: bool,
) -> Result<[Vec<C64>; 2], AnalyticError> {
    let n = omega.len();
    if spec[0].len() != n || spec[1].len() != n {
        return Err(AnalyticError::LengthMismatch);
    }
    let scale = omega.iter().fold(0.0f64, |a, w| a.max(w.abs())).max(1.0);
    if omega.iter().zip(omega.iter().rev()).any(|(a, b)| (a + b).abs() > 1e-9 * scale) {
        return Err(AnalyticError::AsymmetricGrid);
    }
    let map = TransferMap::new(m, d)?;
    let inv_vb = if merge_velocities { C64::new(map.rate.inv_va, 0.0) } else { map.rate.inv_vb };
    let mix = (C64::i() * map.rate.alpha * z).exp();
    let p = map.projectors;
    let mut out = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for (k, &w) in omega.iter().enumerate() {
        let a = C64::new(0.0, w * z * map.rate.inv_va).exp();
        let b = (C64::i() * w * z * inv_vb).exp() * mix;
        let e = [spec[0][k], spec[1][k]];
        for (j, col) in out.iter_mut().enumerate() {
            let acc = (0..2).map(|l| (p.dark[j][l] * a + p.bright[j][l] * b) * e[l]).sum();
            col.push(acc);
        }
    }
    Ok(out)
}

/// Depth `2 pi n / |Re(alpha)|` at which the input state is recovered.
pub fn recovery_length(rate: &OscillationRate, n: u32) -> Result<f64, AnalyticError> {
    if rate.alpha.re == 0.0 {
        return Err(AnalyticError::NoOscillation);
    }
    Ok(2.0 * PI * f64::from(n) / rate.alpha.re.abs())
}
