//! Space-marching integration of the coupled field and atomic equations.
//!
//! Fields are carried in the frame co-moving at `c`, where the propagation
//! equation reduces to `d/dz E_j = i kappa12 beta_j` at fixed (retarded) time.
//! Each depth is handled in two stages: the atomic variables are integrated in
//! time with RK4 from the local field column, then the field is advanced one
//! step in z from the resulting coherences.

mod column;
mod convergence;
mod grid;

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::SimError;
use crate::params::{complex_detuning, CouplingDrive, MediumParams, Mode, ProbeInput};

pub use column::{atomic_rhs, midpoints, AtomicColumns, AtomicVars, CouplingTable, Interpolation};
pub use convergence::{column_difference, convergence_study, ConvergenceLevel, ConvergenceReport, RefineAxis};
pub use grid::{max_stable_dt, SpaceTimeGrid, SAMPLES_PER_RATE};

const I: C64 = C64::new(0.0, 1.0);

/// Finite-difference scheme for the z-advance of the fields.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZStepper {
    /// `E(z+dz) = E(z) + i kappa dz beta(z)`.
    Euler,
    /// Euler predictor, trapezoidal corrector, re-evaluated once.
    PredictorCorrector,
    /// Implicit trapezoidal rule. Because the atomic response is linear and
    /// causal, the implicit equation is solved exactly by integrating the
    /// atomic equations at `z + dz` with the detunings shifted by
    /// `i kappa dz / 2`. Stable for optically thick media.
    #[default]
    Trapezoidal,
}

impl ZStepper {
    pub fn order(&self) -> u32 {
        match self {
            ZStepper::Euler => 1,
            ZStepper::PredictorCorrector | ZStepper::Trapezoidal => 2,
        }
    }
}

/// Subsampling of the stored (z, t) arrays. Boundary columns and peak
/// observables are always kept at full resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecordStride {
    pub z: usize,
    pub t: usize,
}

impl Default for RecordStride {
    fn default() -> Self {
        Self { z: 1, t: 1 }
    }
}

impl RecordStride {
    /// Keep only the entrance and exit.
    pub const ENDS: RecordStride = RecordStride { z: usize::MAX, t: usize::MAX };

    fn indices(step: usize, n: usize) -> Vec<usize> {
        let step = step.max(1);
        let mut v: Vec<usize> = (0..n).step_by(step.min(n)).collect();
        if *v.last().unwrap() != n - 1 {
            v.push(n - 1);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IntegratorConfig {
    pub z_stepper: ZStepper,
    pub interpolation: Interpolation,
    pub record: RecordStride,
    /// Accept light still leaving at the end of the window instead of
    /// failing with [`SimError::Truncated`].
    pub allow_truncation: bool,
}

/// Observables at the pulse peak of one z column.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakSample {
    pub z: f64,
    /// Time index maximizing `|E_1|^2 + |E_2|^2`.
    pub t_index: usize,
    /// Peak time in the laboratory frame.
    pub t_lab: f64,
    pub e1: C64,
    pub e2: C64,
}

impl PeakSample {
    pub fn intensity(&self) -> f64 {
        self.e1.norm_sqr() + self.e2.norm_sqr()
    }

    /// Share of the local peak intensity carried by mode 1.
    pub fn fraction1(&self) -> f64 {
        let total = self.intensity();
        if total > 0.0 {
            self.e1.norm_sqr() / total
        } else {
            0.0
        }
    }

    /// `arg(E_1 E_2^*)`, `None` if either mode vanishes.
    pub fn phase12(&self) -> Option<f64> {
        let x = self.e1 * self.e2.conj();
        (x.norm() > 1e-300).then(|| x.arg())
    }
}

/// Fields and atomic variables over the (z, t) grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionRecord {
    pub grid: SpaceTimeGrid,
    /// `1/c`, zero when the speed of light is infinite.
    pub inv_c: f64,
    /// Grid indices of the stored rows and columns.
    pub z_index: Vec<usize>,
    pub t_index: Vec<usize>,
    /// `[z, t]` arrays at the stored indices.
    pub e1: Array2<C64>,
    pub e2: Array2<C64>,
    pub beta1: Array2<C64>,
    pub beta2: Array2<C64>,
    pub g: Array2<C64>,
    /// Full-resolution boundary envelopes at z = 0.
    pub input: [Vec<C64>; 2],
    /// Full-resolution envelopes at z = z_max.
    pub output: [Vec<C64>; 2],
    /// Peak observables at every grid depth.
    pub peaks: Vec<PeakSample>,
    /// `max_t (|E_1(0,t)|^2 + |E_2(0,t)|^2)`, the normalization of `I_j`.
    pub input_peak_intensity: f64,
}

impl EvolutionRecord {
    pub fn is_empty(&self) -> bool {
        self.z_index.is_empty() || self.t_index.is_empty()
    }

    /// `I_j(z, t) = |E_j|^2` normalized by the input peak intensity.
    pub fn normalized_intensity(&self, mode: Mode, row: usize, col: usize) -> f64 {
        let e = match mode {
            Mode::One => &self.e1,
            Mode::Two => &self.e2,
        };
        if self.input_peak_intensity > 0.0 {
            e[[row, col]].norm_sqr() / self.input_peak_intensity
        } else {
            0.0
        }
    }

    /// Laboratory time of stored sample `(row, col)`.
    pub fn t_lab(&self, row: usize, col: usize) -> f64 {
        self.grid.t(self.t_index[col]) + self.grid.z(self.z_index[row]) * self.inv_c
    }

    /// Peak-normalized mode-1 intensities `I_1(z)` at every depth.
    pub fn peak_intensities(&self) -> Vec<(f64, f64)> {
        let n = self.input_peak_intensity.max(f64::MIN_POSITIVE);
        self.peaks.iter().map(|p| (p.e1.norm_sqr() / n, p.e2.norm_sqr() / n)).collect()
    }

    pub fn peak_fractions(&self) -> Vec<f64> {
        self.peaks.iter().map(PeakSample::fraction1).collect()
    }

    pub fn peak_phases(&self) -> Vec<Option<f64>> {
        self.peaks.iter().map(PeakSample::phase12).collect()
    }

    /// Spatial period of the mode-1 share at the pulse peak, from the mean
    /// spacing of upward crossings of its mean value. `None` if fewer than
    /// two crossings occur.
    pub fn spatial_period(&self) -> Option<f64> {
        let z: Vec<f64> = self.peaks.iter().map(|p| p.z).collect();
        spatial_period(&z, &self.peak_fractions())
    }

    /// Group velocity from a least-squares fit of peak time against depth.
    pub fn peak_velocity(&self) -> Option<f64> {
        let n = self.peaks.len() as f64;
        if n < 2.0 {
            return None;
        }
        let (sz, st) = self.peaks.iter().fold((0.0, 0.0), |(a, b), p| (a + p.z, b + p.t_lab));
        let (mz, mt) = (sz / n, st / n);
        let (mut num, mut den) = (0.0, 0.0);
        for p in &self.peaks {
            num += (p.z - mz) * (p.t_lab - mt);
            den += (p.z - mz) * (p.z - mz);
        }
        let slope = num / den;
        (slope > 0.0).then(|| 1.0 / slope)
    }
}

/// Mean spacing of upward crossings of the mean level of `y(z)`.
pub fn spatial_period(z: &[f64], y: &[f64]) -> Option<f64> {
    if y.len() < 3 {
        return None;
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut crossings = Vec::new();
    for k in 1..y.len() {
        let (a, b) = (y[k - 1] - mean, y[k] - mean);
        if a < 0.0 && b >= 0.0 {
            let frac = -a / (b - a);
            crossings.push(z[k - 1] + frac * (z[k] - z[k - 1]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    Some((crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64)
}

/// Trapezoidal time integral of `|E_1|^2 + |E_2|^2` over sample indices
/// `from..=to`.
pub fn window_energy(cols: [&[C64]; 2], dt: f64, from: usize, to: usize) -> f64 {
    if to <= from {
        return 0.0;
    }
    let f = |k: usize| cols[0][k].norm_sqr() + cols[1][k].norm_sqr();
    let inner: f64 = (from + 1..to).map(f).sum();
    dt * (inner + 0.5 * (f(from) + f(to)))
}

/// Integrate the atomic variables at one depth from zero initial coherences.
pub fn march_column(
    fields: [&[C64]; 2],
    m: &MediumParams,
    d: &CouplingDrive,
    grid: &SpaceTimeGrid,
    cfg: &IntegratorConfig,
) -> Result<AtomicColumns, SimError> {
    if fields[0].len() != grid.nt || fields[1].len() != grid.nt {
        return Err(SimError::Grid(format!(
            "field columns have {} and {} samples, grid has {}",
            fields[0].len(),
            fields[1].len(),
            grid.nt
        )));
    }
    let mut out = AtomicColumns::zeros(grid.nt);
    let det = [complex_detuning(m, Mode::One), complex_detuning(m, Mode::Two)];
    column::integrate(fields, cfg.interpolation, det, m.gamma13, &CouplingTable::new(d, grid), grid.dt, &mut out);
    if let Some(it) = out.first_non_finite() {
        return Err(SimError::Diverged { iz: 0, it });
    }
    Ok(out)
}

/// Explicit z-advance of a field column.
///
/// With only `beta_here` this is the Euler step; with `beta_next` (the
/// provisional coherences at `z + dz`) the two are averaged.
pub fn advance_field(
    e: [&[C64]; 2],
    beta_here: [&[C64]; 2],
    beta_next: Option<[&[C64]; 2]>,
    kappa12: f64,
    dz: f64,
) -> Result<[Vec<C64>; 2], SimError> {
    let n = e[0].len();
    let lens = [e[1].len(), beta_here[0].len(), beta_here[1].len()];
    if lens.iter().any(|&l| l != n) || beta_next.is_some_and(|b| b[0].len() != n || b[1].len() != n) {
        return Err(SimError::Grid("column length mismatch in field advance".into()));
    }
    let step = I * kappa12 * dz;
    let col = |j: usize| -> Vec<C64> {
        match beta_next {
            None => (0..n).map(|k| e[j][k] + step * beta_here[j][k]).collect(),
            Some(b) => (0..n).map(|k| e[j][k] + step * 0.5 * (beta_here[j][k] + b[j][k])).collect(),
        }
    };
    Ok([col(0), col(1)])
}

/// Boundary columns of a Gaussian probe on the grid's time axis.
pub fn probe_columns(p: &ProbeInput, grid: &SpaceTimeGrid) -> [Vec<C64>; 2] {
    let (a, b): (Vec<C64>, Vec<C64>) = (0..grid.nt)
        .map(|k| {
            let [e1, e2] = p.envelope(grid.t(k));
            (e1, e2)
        })
        .unzip();
    [a, b]
}

/// Run the full space march for a Gaussian probe.
pub fn simulate(
    m: &MediumParams,
    d: &CouplingDrive,
    p: &ProbeInput,
    grid: &SpaceTimeGrid,
    cfg: &IntegratorConfig,
) -> Result<EvolutionRecord, SimError> {
    p.check()?;
    simulate_boundary(m, d, probe_columns(p, grid), grid, cfg)
}

/// Share of the exit energy allowed in the last 5% of the window.
pub const TRUNCATION_LIMIT: f64 = 0.01;

/// Run the space march for arbitrary boundary columns at z = 0.
pub fn simulate_boundary(
    m: &MediumParams,
    d: &CouplingDrive,
    input: [Vec<C64>; 2],
    grid: &SpaceTimeGrid,
    cfg: &IntegratorConfig,
) -> Result<EvolutionRecord, SimError> {
    m.check()?;
    d.check()?;
    grid.check_stiffness(m, d)?;
    if input[0].len() != grid.nt || input[1].len() != grid.nt {
        return Err(SimError::Grid("boundary columns do not match the time grid".into()));
    }

    let nt = grid.nt;
    let det = [complex_detuning(m, Mode::One), complex_detuning(m, Mode::Two)];
    let table = CouplingTable::new(d, grid);
    // Implicit trapezoid: i * (Delta + i kappa dz / 2) = i Delta - kappa dz / 2.
    let shift = C64::new(0.0, 0.5 * m.kappa12 * grid.dz);
    let shifted = [det[0] + shift, det[1] + shift];

    let z_index = RecordStride::indices(cfg.record.z, grid.nz);
    let t_index = RecordStride::indices(cfg.record.t, nt);
    let shape = (z_index.len(), t_index.len());
    let mut rec = EvolutionRecord {
        grid: *grid,
        inv_c: m.inv_c(),
        e1: Array2::zeros(shape),
        e2: Array2::zeros(shape),
        beta1: Array2::zeros(shape),
        beta2: Array2::zeros(shape),
        g: Array2::zeros(shape),
        z_index,
        t_index,
        input_peak_intensity: (0..nt).map(|k| input[0][k].norm_sqr() + input[1][k].norm_sqr()).fold(0.0, f64::max),
        input: input.clone(),
        output: [Vec::new(), Vec::new()],
        peaks: Vec::with_capacity(grid.nz),
    };

    let mut e = input;
    let mut at = AtomicColumns::zeros(nt);
    let mut scratch = AtomicColumns::zeros(nt);
    let march = |drive: [&[C64]; 2], det: [C64; 2], out: &mut AtomicColumns, iz: usize| -> Result<(), SimError> {
        column::integrate(drive, cfg.interpolation, det, m.gamma13, &table, grid.dt, out);
        match out.first_non_finite() {
            Some(it) => Err(SimError::Diverged { iz, it }),
            None => Ok(()),
        }
    };

    march([&e[0], &e[1]], det, &mut at, 0)?;
    let mut next_row = 0;
    record_depth(&mut rec, 0, &e, &at, &mut next_row);

    for iz in 1..grid.nz {
        let step = I * m.kappa12 * grid.dz;
        match cfg.z_stepper {
            ZStepper::Euler => {
                e = advance_field([&e[0], &e[1]], at.beta(), None, m.kappa12, grid.dz)?;
                march([&e[0], &e[1]], det, &mut at, iz)?;
            }
            ZStepper::PredictorCorrector => {
                let pred = advance_field([&e[0], &e[1]], at.beta(), None, m.kappa12, grid.dz)?;
                march([&pred[0], &pred[1]], det, &mut scratch, iz)?;
                e = advance_field([&e[0], &e[1]], at.beta(), Some(scratch.beta()), m.kappa12, grid.dz)?;
                march([&e[0], &e[1]], det, &mut at, iz)?;
            }
            ZStepper::Trapezoidal => {
                let h = step * 0.5;
                for (col, beta) in e.iter_mut().zip([&at.beta1, &at.beta2]) {
                    for (x, b) in col.iter_mut().zip(beta.iter()) {
                        *x += h * b;
                    }
                }
                march([&e[0], &e[1]], shifted, &mut at, iz)?;
                for (col, beta) in e.iter_mut().zip([&at.beta1, &at.beta2]) {
                    for (x, b) in col.iter_mut().zip(beta.iter()) {
                        *x += h * b;
                    }
                }
            }
        }
        if let Some(it) = (0..nt).find(|&k| !(e[0][k].is_finite() && e[1][k].is_finite())) {
            return Err(SimError::Diverged { iz, it });
        }
        record_depth(&mut rec, iz, &e, &at, &mut next_row);
    }

    let input_energy = window_energy([&rec.input[0], &rec.input[1]], grid.dt, 0, nt - 1);
    let tail_start = ((nt - 1) as f64 * 0.95).floor() as usize;
    let tail = window_energy([&e[0], &e[1]], grid.dt, tail_start, nt - 1);
    if !cfg.allow_truncation && input_energy > 0.0 && tail > TRUNCATION_LIMIT * input_energy {
        return Err(SimError::Truncated { fraction: tail / input_energy });
    }
    rec.output = e;
    Ok(rec)
}

fn record_depth(rec: &mut EvolutionRecord, iz: usize, e: &[Vec<C64>; 2], at: &AtomicColumns, next_row: &mut usize) {
    let (mut best, mut k_best) = (-1.0, 0);
    for (k, (a, b)) in e[0].iter().zip(&e[1]).enumerate() {
        let w = a.norm_sqr() + b.norm_sqr();
        if w > best {
            best = w;
            k_best = k;
        }
    }
    let z = rec.grid.z(iz);
    rec.peaks.push(PeakSample {
        z,
        t_index: k_best,
        t_lab: rec.grid.t(k_best) + z * rec.inv_c,
        e1: e[0][k_best],
        e2: e[1][k_best],
    });
    if rec.z_index.get(*next_row) == Some(&iz) {
        let row = *next_row;
        for (col, &k) in rec.t_index.iter().enumerate() {
            rec.e1[[row, col]] = e[0][k];
            rec.e2[[row, col]] = e[1][k];
            rec.beta1[[row, col]] = at.beta1[k];
            rec.beta2[[row, col]] = at.beta2[k];
            rec.g[[row, col]] = at.g[k];
        }
        *next_row += 1;
    }
}

#[cfg(test)]
mod tests;
