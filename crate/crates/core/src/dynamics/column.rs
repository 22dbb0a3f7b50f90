//! Time integration of the atomic variables at a fixed depth.

use num_complex::Complex64 as C64;

use crate::params::{complex_detuning, CouplingDrive, MediumParams, Mode};

use super::SpaceTimeGrid;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Optical coherences and ground-state coherence at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AtomicVars {
    pub beta1: C64,
    pub beta2: C64,
    pub g: C64,
}

impl AtomicVars {
    fn axpy(self, h: f64, k: AtomicVars) -> AtomicVars {
        AtomicVars { beta1: self.beta1 + k.beta1 * h, beta2: self.beta2 + k.beta2 * h, g: self.g + k.g * h }
    }

    fn is_finite(&self) -> bool {
        self.beta1.is_finite() && self.beta2.is_finite() && self.g.is_finite()
    }
}

/// Right-hand sides of the atomic equations:
///
/// ```text
/// d/dt beta_j = i Delta_pj beta_j + i E_j + i g Omega_cj
/// d/dt g      = i (Omega_c1^* beta_1 + Omega_c2^* beta_2) - gamma13 g
/// ```
pub fn atomic_rhs(e: [C64; 2], y: AtomicVars, m: &MediumParams, coupling: [C64; 2]) -> AtomicVars {
    let det = [complex_detuning(m, Mode::One), complex_detuning(m, Mode::Two)];
    rhs(e, y, det, m.gamma13, coupling)
}

#[inline(always)]
fn rhs(e: [C64; 2], y: AtomicVars, det: [C64; 2], gamma13: f64, c: [C64; 2]) -> AtomicVars {
    AtomicVars {
        beta1: I * (det[0] * y.beta1 + e[0] + y.g * c[0]),
        beta2: I * (det[1] * y.beta2 + e[1] + y.g * c[1]),
        g: I * (c[0].conj() * y.beta1 + c[1].conj() * y.beta2) - y.g * gamma13,
    }
}

/// How field values between time samples are obtained inside RK4 substeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Interpolation {
    /// Two-point average; limits the column integrator to second order.
    Linear,
    /// Four-point Lagrange midpoint; keeps the RK4 step fourth order.
    #[default]
    Cubic,
}

/// Values of `col` halfway between consecutive samples.
pub fn midpoints(col: &[C64], interp: Interpolation) -> Vec<C64> {
    let n = col.len();
    if n < 2 {
        return Vec::new();
    }
    if interp == Interpolation::Linear || n < 4 {
        return col.windows(2).map(|w| (w[0] + w[1]) * 0.5).collect();
    }
    let mut out = Vec::with_capacity(n - 1);
    out.push((col[0] * 5.0 + col[1] * 15.0 - col[2] * 5.0 + col[3]) / 16.0);
    for k in 1..n - 2 {
        out.push(((col[k] + col[k + 1]) * 9.0 - col[k - 1] - col[k + 2]) / 16.0);
    }
    out.push((col[n - 4] - col[n - 3] * 5.0 + col[n - 2] * 15.0 + col[n - 1] * 5.0) / 16.0);
    out
}

/// Coupling values on the time grid and at the RK4 midpoints.
#[derive(Clone, Debug)]
pub struct CouplingTable {
    at: Vec<[C64; 2]>,
    mid: Vec<[C64; 2]>,
}

impl CouplingTable {
    pub fn new(d: &CouplingDrive, grid: &SpaceTimeGrid) -> Self {
        let at = (0..grid.nt).map(|k| d.at(grid.t(k))).collect();
        let mid = (0..grid.nt - 1).map(|k| d.at(grid.t(k) + 0.5 * grid.dt)).collect();
        Self { at, mid }
    }
}

/// Atomic variables along the time axis at one depth.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicColumns {
    pub beta1: Vec<C64>,
    pub beta2: Vec<C64>,
    pub g: Vec<C64>,
}

impl AtomicColumns {
    pub fn zeros(nt: usize) -> Self {
        Self { beta1: vec![ZERO; nt], beta2: vec![ZERO; nt], g: vec![ZERO; nt] }
    }

    pub fn beta(&self) -> [&[C64]; 2] {
        [&self.beta1, &self.beta2]
    }

    /// Index of the first non-finite sample.
    pub fn first_non_finite(&self) -> Option<usize> {
        (0..self.g.len())
            .find(|&k| !AtomicVars { beta1: self.beta1[k], beta2: self.beta2[k], g: self.g[k] }.is_finite())
    }
}

/// Fixed-step RK4 from zero initial coherences, driven by the field columns.
///
/// `det` holds the complex detunings; the space marcher passes shifted values
/// to fold its implicit z-step into the time integration.
pub(crate) fn integrate(
    drive: [&[C64]; 2],
    interp: Interpolation,
    det: [C64; 2],
    gamma13: f64,
    couplings: &CouplingTable,
    dt: f64,
    out: &mut AtomicColumns,
) {
    let nt = drive[0].len();
    let mid = [midpoints(drive[0], interp), midpoints(drive[1], interp)];
    let mut y = AtomicVars::default();
    out.beta1[0] = ZERO;
    out.beta2[0] = ZERO;
    out.g[0] = ZERO;
    let h = dt;
    for k in 0..nt - 1 {
        let e0 = [drive[0][k], drive[1][k]];
        let em = [mid[0][k], mid[1][k]];
        let e1 = [drive[0][k + 1], drive[1][k + 1]];
        let (c0, cm, c1) = (couplings.at[k], couplings.mid[k], couplings.at[k + 1]);
        let k1 = rhs(e0, y, det, gamma13, c0);
        let k2 = rhs(em, y.axpy(0.5 * h, k1), det, gamma13, cm);
        let k3 = rhs(em, y.axpy(0.5 * h, k2), det, gamma13, cm);
        let k4 = rhs(e1, y.axpy(h, k3), det, gamma13, c1);
        y = AtomicVars {
            beta1: y.beta1 + (k1.beta1 + (k2.beta1 + k3.beta1) * 2.0 + k4.beta1) * (h / 6.0),
            beta2: y.beta2 + (k1.beta2 + (k2.beta2 + k3.beta2) * 2.0 + k4.beta2) * (h / 6.0),
            g: y.g + (k1.g + (k2.g + k3.g) * 2.0 + k4.g) * (h / 6.0),
        };
        out.beta1[k + 1] = y.beta1;
        out.beta2[k + 1] = y.beta2;
        out.g[k + 1] = y.g;
    }
}
