//! Time integration: the linearized boundary-value problem on the
//! truncated half-strip and a periodic integrator of the full nonlinear
//! system.

mod diagnostics;
mod linear;
mod output;
mod periodic;

pub use diagnostics::{gronwall_fit, DiagnosticRecord, DiagnosticsSeries, GronwallFit, PeriodicRecord};
pub use linear::{run_linearized, LinearOptions, LinearRun};
pub use output::{read_snapshot, write_snapshot, Snapshot, SnapshotHeader};
pub use periodic::{run_nonlinear_periodic, PeriodicInitial, PeriodicOptions, PeriodicRun};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible CFL number against unit (light) speed.
pub const MAX_CFL: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub l1: f64,
    pub n1: usize,
    pub n2: usize,
    pub h1: f64,
    pub h2: f64,
    pub dt: f64,
    pub final_time: f64,
    pub steps: usize,
}

impl Grid {
    /// Time step `cfl * min(h) / max(1, speed)`, shrunk so that an integer
    /// number of steps reaches `final_time`.
    pub fn new(l1: f64, n1: usize, n2: usize, final_time: f64, cfl: f64, speed: f64) -> Result<Self> {
        if !(cfl > 0.0 && cfl <= MAX_CFL) {
            return Err(Error::Cfl(format!("CFL number {cfl} outside (0, {MAX_CFL}]")));
        }
        if !(final_time >= 0.0 && final_time.is_finite()) {
            return Err(Error::Config(format!("final time {final_time} is invalid")));
        }
        let h1 = if n1 > 1 { l1 / (n1 - 1) as f64 } else { f64::INFINITY };
        let h2 = 1.0 / n2 as f64;
        let dt_max = cfl * h1.min(h2) / speed.max(1.0);
        let steps = (final_time / dt_max).ceil() as usize;
        let dt = if steps == 0 { dt_max } else { final_time / steps as f64 };
        Ok(Grid { l1, n1, n2, h1, h2, dt, final_time, steps })
    }
}

/// Fourth difference `f(-2) - 4 f(-1) + 6 f(0) - 4 f(1) + f(2)`.
#[inline]
pub(crate) fn fourth_difference(m2: f64, m1: f64, c: f64, p1: f64, p2: f64) -> f64 {
    m2 - 4.0 * m1 + 6.0 * c - 4.0 * p1 + p2
}

/// Trapezoidal weight in `x1` for node `i` of `n1`.
#[inline]
pub(crate) fn trapezoid_weight(i: usize, n1: usize) -> f64 {
    if i == 0 || i == n1 - 1 {
        0.5
    } else {
        1.0
    }
}
