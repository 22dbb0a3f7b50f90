//! Storage and retrieval with a gated coupling, and its figures of merit.
//!
//! All metrics work on the input column at `z = 0` and the output column at
//! `z = L`, split at a time `t_split`: light leaving before the split counts
//! as transmitted, light leaving after it as retrieved.

use num_complex::Complex64 as C64;

use crate::analytic::oscillation_rate;
use crate::dynamics::{simulate, window_energy, EvolutionRecord, IntegratorConfig, SpaceTimeGrid};
use crate::error::ProtocolError;
use crate::params::{CouplingDrive, MediumParams, ProbeInput, Schedule};

/// Instantaneous coupling Rabi frequencies; the gate scales both legs alike.
pub fn coupling_profile(d: &CouplingDrive, t: f64) -> [C64; 2] {
    d.at(t)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryMetrics {
    pub eta_abs: f64,
    pub eta_ret: f64,
    /// `eta_abs * eta_ret`.
    pub eta: f64,
    pub fidelity: f64,
    /// Averaged relative phase of the input, radians.
    pub phase_in: f64,
    /// Averaged relative phase of the retrieved light, radians.
    pub phase_out: f64,
    pub storage_time: f64,
}

/// A pair of field columns sampled with step `dt` from `t = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Columns<'a> {
    pub e: [&'a [C64]; 2],
    pub dt: f64,
}

impl<'a> Columns<'a> {
    pub fn new(e: [&'a [C64]; 2], dt: f64) -> Result<Self, ProtocolError> {
        if e[0].len() != e[1].len() {
            return Err(ProtocolError::Mismatch(e[0].len(), e[1].len()));
        }
        if e[0].len() < 2 || !(dt > 0.0) {
            return Err(ProtocolError::Config("columns need at least two samples and a positive step".into()));
        }
        Ok(Self { e, dt })
    }

    pub fn len(&self) -> usize {
        self.e[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Last sample index at or before `t`, clamped to the column.
    fn index(&self, t: f64) -> usize {
        ((t / self.dt + 1e-9).floor().max(0.0) as usize).min(self.len() - 1)
    }

    fn energy(&self, from: usize, to: usize) -> f64 {
        window_energy(self.e, self.dt, from, to)
    }

    /// Per-mode energies over `from..=to`.
    fn mode_energies(&self, from: usize, to: usize) -> [f64; 2] {
        let one = |j: usize| {
            if to <= from {
                return 0.0;
            }
            let f = |k: usize| self.e[j][k].norm_sqr();
            self.dt * ((from + 1..to).map(f).sum::<f64>() + 0.5 * (f(from) + f(to)))
        };
        [one(0), one(1)]
    }

    /// Trapezoidal `int E_1 E_2^* dt` over `from..=to`.
    fn cross(&self, from: usize, to: usize) -> C64 {
        if to <= from {
            return C64::new(0.0, 0.0);
        }
        let f = |k: usize| self.e[0][k] * self.e[1][k].conj();
        let inner: C64 = (from + 1..to).map(f).sum();
        (inner + (f(from) + f(to)) * 0.5) * self.dt
    }
}

fn check_pair(input: &Columns, output: &Columns) -> Result<(), ProtocolError> {
    if input.len() != output.len() {
        return Err(ProtocolError::Mismatch(input.len(), output.len()));
    }
    Ok(())
}

fn input_energy(input: &Columns, t_split: f64) -> Result<f64, ProtocolError> {
    let e = input.energy(0, input.index(t_split));
    if e > 0.0 {
        Ok(e)
    } else {
        Err(ProtocolError::ZeroEnergy("input"))
    }
}

/// `1 - E_out(0, t_split) / E_in(0, t_split)`.
pub fn absorption_efficiency(input: &Columns, output: &Columns, t_split: f64) -> Result<f64, ProtocolError> {
    check_pair(input, output)?;
    let ein = input_energy(input, t_split)?;
    Ok(1.0 - output.energy(0, output.index(t_split)) / ein)
}

/// `E_out(t_split, t_f) / E_in(0, t_split)`.
pub fn retrieval_efficiency(input: &Columns, output: &Columns, t_split: f64) -> Result<f64, ProtocolError> {
    check_pair(input, output)?;
    let ein = input_energy(input, t_split)?;
    Ok(output.energy(output.index(t_split), output.len() - 1) / ein)
}

/// Two-mode qubit read from a window of a column: amplitudes are square
/// roots of the per-mode energy fractions, the phase is `arg int E_1 E_2^* dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowState {
    pub c1: f64,
    pub c2: f64,
    pub phase: f64,
}

impl WindowState {
    fn read(cols: &Columns, from: usize, to: usize, which: &'static str) -> Result<Self, ProtocolError> {
        let [w1, w2] = cols.mode_energies(from, to);
        let total = w1 + w2;
        if !(total > 0.0) {
            return Err(ProtocolError::ZeroEnergy(which));
        }
        Ok(Self { c1: (w1 / total).sqrt(), c2: (w2 / total).sqrt(), phase: cols.cross(from, to).arg() })
    }

    /// `|<self|other>|^2`.
    pub fn overlap(&self, other: &WindowState) -> f64 {
        (C64::new(self.c1 * other.c1, 0.0) + C64::from_polar(self.c2 * other.c2, other.phase - self.phase)).norm_sqr()
    }
}

/// Input state from `(0, t_split)` and output state from `(t_split, t_f)`.
pub fn window_states(
    input: &Columns,
    output: &Columns,
    t_split: f64,
) -> Result<(WindowState, WindowState), ProtocolError> {
    check_pair(input, output)?;
    let k = input.index(t_split);
    let s_in = WindowState::read(input, 0, k, "input")?;
    let s_out = WindowState::read(output, k, output.len() - 1, "output")?;
    Ok((s_in, s_out))
}

/// Squared overlap of the normalized input and retrieved qubit states.
pub fn conditional_fidelity(input: &Columns, output: &Columns, t_split: f64) -> Result<f64, ProtocolError> {
    let (a, b) = window_states(input, output, t_split)?;
    Ok(a.overlap(&b).min(1.0))
}

/// All metrics for one pair of columns.
pub fn memory_metrics(
    input: &Columns,
    output: &Columns,
    t_split: f64,
    storage_time: f64,
) -> Result<MemoryMetrics, ProtocolError> {
    let eta_abs = absorption_efficiency(input, output, t_split)?;
    let eta_ret = retrieval_efficiency(input, output, t_split)?;
    let (s_in, s_out) = window_states(input, output, t_split)?;
    Ok(MemoryMetrics {
        eta_abs,
        eta_ret,
        eta: eta_abs * eta_ret,
        fidelity: s_in.overlap(&s_out).min(1.0),
        phase_in: s_in.phase,
        phase_out: s_out.phase,
        storage_time,
    })
}

/// Time the retrieved pulse needs to clear the medium after the gate reopens:
/// the depth still ahead of the stored excitation at `v_a`, plus two widths.
pub fn retrieval_duration(m: &MediumParams, d: &CouplingDrive, p: &ProbeInput, t1: f64) -> f64 {
    let ahead = match oscillation_rate(m, &CouplingDrive { schedule: Schedule::Constant, ..d.clone() }) {
        Ok(rate) => (m.length * rate.inv_va - (t1 - p.t_center)).max(0.0),
        Err(_) => 0.0,
    };
    ahead + 2.0 * p.width
}

/// Check the gate against the probe and the window.
pub fn check_memory_window(
    m: &MediumParams,
    d: &CouplingDrive,
    p: &ProbeInput,
    t_max: f64,
) -> Result<(f64, f64), ProtocolError> {
    let Schedule::TanhGate { t1, t2, .. } = d.schedule else {
        return Err(ProtocolError::Config("memory runs need a tanh-gated coupling".into()));
    };
    if t1 <= p.t_center {
        return Err(ProtocolError::Config(format!("gate closes at t1 = {t1} before the pulse centre {}", p.t_center)));
    }
    if t2 <= t1 {
        return Err(ProtocolError::Config(format!("gate reopens at t2 = {t2} before it closes at t1 = {t1}")));
    }
    let latest = t_max - retrieval_duration(m, d, p, t1);
    if t2 >= latest {
        return Err(ProtocolError::Config(format!(
            "gate reopens at t2 = {t2}, too late for the retrieved pulse to leave before t_max = {t_max} (need t2 < {latest:.4})"
        )));
    }
    if (t2 - t1) * m.gamma13 >= 1.0 {
        return Err(ProtocolError::Config(format!(
            "storage time {} is not shorter than the ground-state coherence time {}",
            t2 - t1,
            1.0 / m.gamma13
        )));
    }
    Ok((t1, t2))
}

/// Simulate storage and retrieval and evaluate the metrics with
/// `t_split = t_max / 2`. The window end is the measurement boundary: light
/// still leaving at `t_max` counts as not retrieved rather than as an error.
pub fn run_memory(
    m: &MediumParams,
    d: &CouplingDrive,
    p: &ProbeInput,
    grid: &SpaceTimeGrid,
    cfg: &IntegratorConfig,
) -> Result<(EvolutionRecord, MemoryMetrics), ProtocolError> {
    m.check()?;
    d.check()?;
    p.check()?;
    let (t1, t2) = check_memory_window(m, d, p, grid.t_max)?;
    let cfg = IntegratorConfig { allow_truncation: true, ..*cfg };
    let rec = simulate(m, d, p, grid, &cfg)?;
    let metrics = record_metrics(&rec, t2 - t1)?;
    Ok((rec, metrics))
}

/// Metrics of a finished record with `t_split = t_max / 2`.
pub fn record_metrics(rec: &EvolutionRecord, storage_time: f64) -> Result<MemoryMetrics, ProtocolError> {
    let dt = rec.grid.dt;
    let input = Columns::new([&rec.input[0], &rec.input[1]], dt)?;
    let output = Columns::new([&rec.output[0], &rec.output[1]], dt)?;
    memory_metrics(&input, &output, 0.5 * rec.grid.t_max, storage_time)
}
