use crate::error::SimError;
use crate::params::{CouplingDrive, MediumParams};

/// Minimum number of time samples per period of the fastest atomic rate.
pub const SAMPLES_PER_RATE: f64 = 20.0;

/// Uniform (z, t) discretization. Sample `0` of each axis is the origin and
/// sample `n - 1` the far edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeGrid {
    pub nz: usize,
    pub nt: usize,
    pub dz: f64,
    pub dt: f64,
    pub z_max: f64,
    pub t_max: f64,
}

impl SpaceTimeGrid {
    /// Build a grid and enforce `dt <= 1 / (20 max(|delta_p2|, |Omega|, gamma2))`.
    pub fn new(
        nz: usize,
        nt: usize,
        z_max: f64,
        t_max: f64,
        m: &MediumParams,
        d: &CouplingDrive,
    ) -> Result<Self, SimError> {
        let grid = Self::unchecked(nz, nt, z_max, t_max)?;
        grid.check_stiffness(m, d)?;
        Ok(grid)
    }

    /// Grid with only the shape invariants checked.
    pub fn unchecked(nz: usize, nt: usize, z_max: f64, t_max: f64) -> Result<Self, SimError> {
        if nz < 2 || nt < 2 {
            return Err(SimError::Grid(format!("need at least 2 samples per axis, got nz={nz}, nt={nt}")));
        }
        if !(z_max > 0.0 && z_max.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(SimError::Grid(format!("extents must be positive, got z_max={z_max}, t_max={t_max}")));
        }
        Ok(Self { nz, nt, dz: z_max / (nz - 1) as f64, dt: t_max / (nt - 1) as f64, z_max, t_max })
    }

    /// Smallest `nt` meeting the stiffness bound for a window `t_max`.
    pub fn min_time_samples(t_max: f64, m: &MediumParams, d: &CouplingDrive) -> usize {
        (t_max / max_stable_dt(m, d)).ceil() as usize + 1
    }

    pub fn check_stiffness(&self, m: &MediumParams, d: &CouplingDrive) -> Result<(), SimError> {
        let bound = max_stable_dt(m, d);
        if self.dt > bound * (1.0 + 1e-9) {
            return Err(SimError::Grid(format!(
                "dt = {} exceeds the stiffness bound {bound}; use nt >= {}",
                self.dt,
                Self::min_time_samples(self.t_max, m, d)
            )));
        }
        Ok(())
    }

    pub fn z(&self, i: usize) -> f64 {
        i as f64 * self.dz
    }

    pub fn t(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Same extents with each step halved `levels` times along z.
    pub fn refine_z(&self, levels: u32) -> Self {
        let nz = (self.nz - 1) * (1 << levels) + 1;
        Self { nz, dz: self.z_max / (nz - 1) as f64, ..*self }
    }

    pub fn refine_t(&self, levels: u32) -> Self {
        let nt = (self.nt - 1) * (1 << levels) + 1;
        Self { nt, dt: self.t_max / (nt - 1) as f64, ..*self }
    }
}

/// `1 / (20 max(|delta_p2|, |Omega|, gamma2))`.
pub fn max_stable_dt(m: &MediumParams, d: &CouplingDrive) -> f64 {
    let rate = m.delta_p2.abs().max(d.total_sq().sqrt()).max(m.gamma2);
    if rate == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (SAMPLES_PER_RATE * rate)
    }
}
