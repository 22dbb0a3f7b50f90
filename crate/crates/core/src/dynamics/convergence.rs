//! Step-refinement studies of the space marcher.

use num_complex::Complex64 as C64;

use crate::error::SimError;
use crate::params::{CouplingDrive, MediumParams, ProbeInput};

use super::{simulate, IntegratorConfig, RecordStride, SpaceTimeGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineAxis {
    Z,
    T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceLevel {
    pub nz: usize,
    pub nt: usize,
    /// Step along the refined axis.
    pub step: f64,
    /// L2 difference of the exit fields to the next finer level.
    pub diff_to_next: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub axis: RefineAxis,
    pub levels: Vec<ConvergenceLevel>,
}

impl ConvergenceReport {
    /// Ratios of successive differences; about `2^order` in the asymptotic range.
    pub fn ratios(&self) -> Vec<f64> {
        let d: Vec<f64> = self.levels.iter().filter_map(|l| l.diff_to_next).collect();
        d.windows(2).map(|w| w[0] / w[1]).collect()
    }

    pub fn observed_orders(&self) -> Vec<f64> {
        self.ratios().iter().map(|r| r.log2()).collect()
    }
}

/// L2-in-time difference `sqrt(dt sum |a - b|^2)` between two exit columns
/// sampled on time grids that coincide after taking every `stride`-th sample
/// of `fine`.
pub fn column_difference(coarse: &[Vec<C64>; 2], fine: &[Vec<C64>; 2], stride: usize, dt: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..2 {
        for (k, a) in coarse[j].iter().enumerate() {
            acc += (a - fine[j][k * stride]).norm_sqr();
        }
    }
    (acc * dt).sqrt()
}

/// Run `levels` simulations, halving the step along `axis` each time, and
/// report the differences between successive levels. Levels run concurrently.
pub fn convergence_study(
    m: &MediumParams,
    d: &CouplingDrive,
    p: &ProbeInput,
    base: &SpaceTimeGrid,
    cfg: &IntegratorConfig,
    levels: usize,
    axis: RefineAxis,
) -> Result<ConvergenceReport, SimError> {
    if levels < 2 {
        return Err(SimError::TooFewLevels(levels));
    }
    let grids: Vec<SpaceTimeGrid> = (0..levels as u32)
        .map(|k| match axis {
            RefineAxis::Z => base.refine_z(k),
            RefineAxis::T => base.refine_t(k),
        })
        .collect();
    let cfg = IntegratorConfig { record: RecordStride::ENDS, ..*cfg };

    let outputs: Vec<Result<[Vec<C64>; 2], SimError>> = std::thread::scope(|s| {
        let handles: Vec<_> =
            grids.iter().map(|g| s.spawn(move || simulate(m, d, p, g, &cfg).map(|r| r.output))).collect();
        handles.into_iter().map(|h| h.join().expect("convergence level panicked")).collect()
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>, _>>()?;

    let levels = grids
        .iter()
        .enumerate()
        .map(|(k, g)| {
            let diff = outputs.get(k + 1).map(|fine| {
                let stride = match axis {
                    RefineAxis::Z => 1,
                    RefineAxis::T => 2,
                };
                column_difference(&outputs[k], fine, stride, g.dt)
            });
            ConvergenceLevel {
                nz: g.nz,
                nt: g.nt,
                step: match axis {
                    RefineAxis::Z => g.dz,
                    RefineAxis::T => g.dt,
                },
                diff_to_next: diff,
            }
        })
        .collect();
    Ok(ConvergenceReport { axis, levels })
}
