//! Ready-made basic states, sources and initial data for the solvers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eos::ThermoParams;
use crate::error::Result;
use crate::interface::{BasicFields, Cutoff, CutoffKind, FrontFunction, Strip};
use crate::linearized::{perturbation_velocity, BasicState, Sources, Vec6};
use crate::solver::PeriodicInitial;
use crate::symmetrizer::Mat6;

/// Depth of the truncated strip.
pub const DEFAULT_L1: f64 = 10.0;

/// Stored (shifted) unknowns of the constant basic state, identical on both
/// sides; `p = pbar + 0.9`.
pub const CONSTANT_STATE: [f64; 6] = [0.9, 0.0, 0.3, 1.0, 0.4, 0.0];
pub const ENTROPY_SHIFT: [f64; 2] = [0.3, -0.3];

/// Slope of the pressure ramp in the Rayleigh–Taylor scenario; the jump of
/// the normal pressure derivative is twice this.
pub const RT_SLOPE: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasicKind {
    /// Spatially constant state with a flat front.
    Constant,
    /// Pressure `pbar + 0.9 + 0.3 x1 chi(x1)` on both sides, so that
    /// `[d1 p] = 0.6`.
    RayleighTaylor,
}

pub fn basic_fields(kind: BasicKind, n1: usize, n2: usize, l1: f64, cutoff: CutoffKind) -> BasicFields {
    let strip = Strip { n1, n2 };
    let cut = Cutoff::new(cutoff);
    BasicFields::from_fn(strip, l1, ENTROPY_SHIFT, FrontFunction::flat(n2), |x1, _| {
        let mut y = CONSTANT_STATE;
        if kind == BasicKind::RayleighTaylor {
            y[0] += RT_SLOPE * x1 * cut.value(x1);
        }
        (y, y)
    })
}

pub fn basic_state(
    params: ThermoParams,
    kind: BasicKind,
    n1: usize,
    n2: usize,
    l1: f64,
    cutoff: CutoffKind,
) -> Result<BasicState> {
    let fields = basic_fields(kind, n1, n2, l1, cutoff);
    BasicState::new(params, fields, cutoff, kind == BasicKind::RayleighTaylor)
}

fn side_matrices(basic: &BasicState, plus: bool) -> (Mat6, Mat6, Mat6) {
    basic.point(plus, 0, 0).matrices(&basic.params)
}

/// Manufactured solution on the constant basic state:
/// `U'* = t^2 exp(-x1^2/4) a(x2)` per side with equal velocity components,
/// and `phi* = 0.1 t^2 sin(2 pi x2)`. The forcing is `f = L'_e U'*` and the
/// boundary data are the boundary operators applied to `(U'*, phi*)`.
pub struct Manufactured {
    matrices: [(Mat6, Mat6, Mat6); 2],
    v_hat: [f64; 3],
}

impl Manufactured {
    /// `basic` must be the constant state.
    pub fn new(basic: &BasicState) -> Self {
        Manufactured {
            matrices: [side_matrices(basic, true), side_matrices(basic, false)],
            v_hat: basic.point(true, 0, 0).velocity(),
        }
    }

    fn profile(x2: f64, plus: bool) -> ([f64; 6], [f64; 6]) {
        let w = 2.0 * PI;
        let (s, c) = (w * x2).sin_cos();
        let sg = if plus { 1.0 } else { -1.0 };
        let a = [
            0.3 * s + sg * 0.1 * c,
            0.2 * c,
            0.1 * s,
            0.2 * s + sg * 0.15 * c,
            0.1 * c - sg * 0.1 * s,
            sg * 0.2 * s,
        ];
        let da = [
            w * (0.3 * c - sg * 0.1 * s),
            -w * 0.2 * s,
            w * 0.1 * c,
            w * (0.2 * c - sg * 0.15 * s),
            -w * (0.1 * s + sg * 0.1 * c),
            w * sg * 0.2 * c,
        ];
        (a, da)
    }

    /// `U'*` at `(t, x1, x2)`.
    pub fn exact(&self, t: f64, x1: f64, x2: f64, plus: bool) -> [f64; 6] {
        let t = t.max(0.0);
        let e = (-x1 * x1 / 4.0).exp();
        Self::profile(x2, plus).0.map(|a| t * t * e * a)
    }

    pub fn exact_front(&self, t: f64, x2: f64) -> f64 {
        let t = t.max(0.0);
        0.1 * t * t * (2.0 * PI * x2).sin()
    }

    /// Boundary data divided by `t^2`, without the `dt phi*` term.
    fn boundary_shape(&self, x2: f64) -> [f64; 5] {
        let (ap, _) = Self::profile(x2, true);
        let (am, _) = Self::profile(x2, false);
        let vd = perturbation_velocity(&self.v_hat, &[ap[1], ap[2], 0.0]);
        // g5 = dt phi* + v2 d2 phi* - v_N'*; the dt phi* part is added by
        // the callers since it is not proportional to t^2.
        let w = 2.0 * PI;
        let phi_2 = 0.1 * w * (w * x2).cos();
        [ap[0] - am[0], 0.0, 0.0, ap[4] - am[4], self.v_hat[1] * phi_2 - vd[0]]
    }
}

impl Sources for Manufactured {
    fn interior(&self, t: f64, x1: f64, x2: f64, plus: bool) -> [f64; 6] {
        if t < 0.0 {
            return [0.0; 6];
        }
        let (a, da) = Self::profile(x2, plus);
        let e = (-x1 * x1 / 4.0).exp();
        let v = |f: &dyn Fn(usize) -> f64| Vec6::from_fn(|r, _| f(r));
        let u_t = v(&|k| 2.0 * t * e * a[k]);
        let u_1 = v(&|k| -0.5 * x1 * t * t * e * a[k]);
        let u_2 = v(&|k| t * t * e * da[k]);
        let (a0, a1, a2) = &self.matrices[if plus { 0 } else { 1 }];
        let r = a0 * u_t + a1 * u_1 + a2 * u_2;
        [r[0], r[1], r[2], r[3], r[4], r[5]]
    }

    fn boundary(&self, t: f64, x2: f64) -> [f64; 5] {
        if t < 0.0 {
            return [0.0; 5];
        }
        let mut g = self.boundary_shape(x2).map(|x| t * t * x);
        g[4] += 2.0 * t * 0.1 * (2.0 * PI * x2).sin();
        g
    }

    fn boundary_dt(&self, t: f64, x2: f64) -> [f64; 5] {
        if t < 0.0 {
            return [0.0; 5];
        }
        let mut g = self.boundary_shape(x2).map(|x| 2.0 * t * x);
        g[4] += 0.2 * (2.0 * PI * x2).sin();
        g
    }
}

/// Compactly supported interior forcing switched on linearly in time, with
/// no boundary data.
pub struct CompactSource {
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: [f64; 6],
}

impl Default for CompactSource {
    fn default() -> Self {
        CompactSource { center: [0.5, 0.5], radius: 0.8, amplitude: [0.5, 0.3, -0.2, 0.1, 0.2, 0.1] }
    }
}

impl Sources for CompactSource {
    fn interior(&self, t: f64, x1: f64, x2: f64, plus: bool) -> [f64; 6] {
        if t < 0.0 {
            return [0.0; 6];
        }
        // Periodic distance in x2.
        let dx2 = (x2 - self.center[1] + 0.5).rem_euclid(1.0) - 0.5;
        let r2 = ((x1 - self.center[0]).powi(2) + dx2 * dx2) / (self.radius * self.radius);
        if r2 >= 1.0 {
            return [0.0; 6];
        }
        let bump = (1.0 - r2).powi(3) * t;
        let sg = if plus { 1.0 } else { -0.5 };
        self.amplitude.map(|a| sg * a * bump)
    }

    fn boundary(&self, _: f64, _: f64) -> [f64; 5] {
        [0.0; 5]
    }

    fn boundary_dt(&self, _: f64, _: f64) -> [f64; 5] {
        [0.0; 5]
    }
}

/// Smooth planar periodic data with `W = (v3, H3) = 0`. The field is the
/// centered-difference curl of a nodal potential, so its centered
/// divergence vanishes to rounding.
pub fn periodic_planar(n1: usize, n2: usize) -> PeriodicInitial {
    let w = 2.0 * PI;
    let (h1, h2) = (1.0 / n1 as f64, 1.0 / n2 as f64);
    let potential = |x: f64, y: f64| 0.05 * (w * x).sin() * (w * y).sin() + 0.03 * (w * (x + y)).cos();
    PeriodicInitial::from_fn(n1, n2, |x, y| {
        let d2a = (potential(x, y + h2) - potential(x, y - h2)) / (2.0 * h2);
        let d1a = (potential(x + h1, y) - potential(x - h1, y)) / (2.0 * h1);
        [
            1.0 + 0.1 * (w * x).sin() * (w * y).cos(),
            0.2 * (w * y).sin(),
            0.15 * (w * x).cos(),
            0.0,
            0.5 + d2a,
            0.3 - d1a,
            0.0,
            0.1 * (w * (x + y)).cos(),
        ]
    })
}

/// Spatially uniform data.
pub fn periodic_uniform(n1: usize, n2: usize, y: [f64; 8]) -> PeriodicInitial {
    PeriodicInitial::from_fn(n1, n2, |_, _| y)
}
