//! Straightening of the free interface, the cutoff that localizes it, and
//! the admissibility audit of a gridded basic state.

use serde::{Deserialize, Serialize};

use crate::eos::{Check, ThermoParams};
use crate::error::{Error, Result};
use crate::kinematics::velocity_from_u;

/// Half-width of the plateau where the cutoff equals 1.
const PLATEAU: f64 = 1.0;
/// Width of the transition layer; the cutoff vanishes beyond `PLATEAU + WIDTH`.
const WIDTH: f64 = 4.0;
pub const CUTOFF_SUPPORT: f64 = PLATEAU + WIDTH;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffKind {
    /// `1 - (10t^3 - 15t^4 + 6t^5)`; C^2, `max|chi'| = 15/32`.
    #[default]
    Quintic,
    /// One minus the normalized integral of `exp(-1/(1-x^2))`; C^inf.
    Smooth,
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - x * x)).exp()
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// Even cutoff: 1 on `[-1, 1]`, 0 outside `[-5, 5]`, monotone in between.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cutoff {
    kind: CutoffKind,
    bump_mass: f64,
}

impl Cutoff {
    pub fn new(kind: CutoffKind) -> Self {
        Cutoff { kind, bump_mass: simpson(bump, -1.0, 1.0, 400) }
    }

    pub fn kind(&self) -> CutoffKind {
        self.kind
    }

    fn layer(s: f64) -> Option<f64> {
        let a = s.abs();
        if a <= PLATEAU || a >= CUTOFF_SUPPORT {
            None
        } else {
            Some((a - PLATEAU) / WIDTH)
        }
    }

    pub fn value(&self, s: f64) -> f64 {
        match Self::layer(s) {
            None => {
                if s.abs() <= PLATEAU {
                    1.0
                } else {
                    0.0
                }
            }
            Some(t) => match self.kind {
                CutoffKind::Quintic => 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t),
                CutoffKind::Smooth => {
                    let x = 2.0 * t - 1.0;
                    1.0 - simpson(bump, -1.0, x, 200) / self.bump_mass
                }
            },
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let Some(t) = Self::layer(s) else { return 0.0 };
        let dt_ds = s.signum() / WIDTH;
        let dchi_dt = match self.kind {
            CutoffKind::Quintic => -30.0 * t * t * (1.0 - t) * (1.0 - t),
            CutoffKind::Smooth => -2.0 * bump(2.0 * t - 1.0) / self.bump_mass,
        };
        dchi_dt * dt_ds
    }

    /// Analytic `max |chi'|`.
    pub fn max_slope(&self) -> f64 {
        match self.kind {
            CutoffKind::Quintic => 15.0 / 32.0,
            CutoffKind::Smooth => 2.0 * bump(0.0) / self.bump_mass / WIDTH,
        }
    }
}

impl Default for Cutoff {
    fn default() -> Self {
        Cutoff::new(CutoffKind::Quintic)
    }
}

/// Quintic cutoff value at `s`.
pub fn cutoff(s: f64) -> f64 {
    Cutoff::default().value(s)
}

/// `[d1 a] = d1 a+ + d1 a-`: after straightening both sides live on
/// `x1 > 0`, so the jump of the normal derivative is a sum of traces.
pub fn normal_jump(d1_plus: f64, d1_minus: f64) -> f64 {
    d1_plus + d1_minus
}

/// Front position `phi(t, x2)` sampled on a uniform periodic grid of the
/// unit circle, at one or more times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontFunction {
    pub times: Vec<f64>,
    /// `values[k][j]` is `phi(times[k], j / n2)`.
    pub values: Vec<Vec<f64>>,
}

impl FrontFunction {
    pub fn steady(values: Vec<f64>) -> Self {
        FrontFunction { times: vec![0.0], values: vec![values] }
    }

    pub fn flat(n2: usize) -> Self {
        Self::steady(vec![0.0; n2])
    }

    pub fn from_fn(n2: usize, times: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        let values = times
            .iter()
            .map(|&t| (0..n2).map(|j| f(t, j as f64 / n2 as f64)).collect())
            .collect();
        FrontFunction { times: times.to_vec(), values }
    }

    pub fn n2(&self) -> usize {
        self.values.first().map_or(0, |v| v.len())
    }

    pub fn validate(&self) -> Result<()> {
        let n2 = self.n2();
        if self.values.is_empty() || n2 < 5 {
            return Err(Error::Config("front needs at least one slice of 5 nodes".into()));
        }
        if self.times.len() != self.values.len() || self.values.iter().any(|v| v.len() != n2) {
            return Err(Error::Config("front slices have inconsistent sizes".into()));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("front times must increase".into()));
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn value(&self, k: usize, j: usize) -> f64 {
        self.values[k][j]
    }

    /// Fourth-order periodic central difference in `x2`.
    pub fn d2(&self, k: usize, j: usize) -> f64 {
        let row = &self.values[k];
        let n = row.len();
        let h = 1.0 / n as f64;
        let at = |o: isize| row[(j as isize + o).rem_euclid(n as isize) as usize];
        (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h)
    }

    /// Time derivative by second-order differences over the samples; zero
    /// for a single slice.
    pub fn dt(&self, k: usize, j: usize) -> f64 {
        let m = self.times.len();
        if m < 2 {
            return 0.0;
        }
        let (a, b) = if k == 0 {
            (0, 1)
        } else if k == m - 1 {
            (m - 2, m - 1)
        } else {
            (k - 1, k + 1)
        };
        (self.values[b][j] - self.values[a][j]) / (self.times[b] - self.times[a])
    }
}

/// The straightening maps at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StraightenedPoint {
    /// `Psi(+-) = chi(+-x1) phi`.
    pub psi: [f64; 2],
    /// `Phi(+-) = +-x1 + Psi(+-)`.
    pub phi: [f64; 2],
    pub d1_phi: [f64; 2],
    pub d2_psi: [f64; 2],
    pub dt_psi: [f64; 2],
}

/// Evaluate the straightening at time slice `k`, node `j`, depth `x1`.
/// Index 0 of each pair is the plus side.
pub fn straighten(front: &FrontFunction, cut: &Cutoff, k: usize, j: usize, x1: f64) -> Result<StraightenedPoint> {
    let sup = front.sup_norm();
    if sup > 1.0 {
        return Err(Error::FrontAdmissibility(format!("sup |phi| = {sup} exceeds 1")));
    }
    let (f, f2, ft) = (front.value(k, j), front.d2(k, j), front.dt(k, j));
    let chi = [cut.value(x1), cut.value(-x1)];
    let dchi = [cut.derivative(x1), -cut.derivative(-x1)];
    let sign = [1.0, -1.0];
    let pt = StraightenedPoint {
        psi: [chi[0] * f, chi[1] * f],
        phi: [x1 + chi[0] * f, -x1 + chi[1] * f],
        d1_phi: [sign[0] + dchi[0] * f, sign[1] + dchi[1] * f],
        d2_psi: [chi[0] * f2, chi[1] * f2],
        dt_psi: [chi[0] * ft, chi[1] * ft],
    };
    if pt.d1_phi[0] < 0.5 || pt.d1_phi[1] > -0.5 {
        return Err(Error::FrontAdmissibility(format!(
            "d1 Phi = ({}, {}) violates |d1 Phi| >= 1/2",
            pt.d1_phi[0], pt.d1_phi[1]
        )));
    }
    Ok(pt)
}

/// Node layout of the truncated half-strip `[0, L1] x T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strip {
    pub n1: usize,
    pub n2: usize,
}

impl Strip {
    pub fn h1(&self, l1: f64) -> f64 {
        l1 / (self.n1 - 1) as f64
    }

    pub fn h2(&self) -> f64 {
        1.0 / self.n2 as f64
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.n2 + j
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Gridded steady basic state in shifted planar unknowns
/// `(p - pbar, u1, u2, H1, H2, S - S_shift)` on both sides of the front.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasicFields {
    pub strip: Strip,
    pub l1: f64,
    pub plus: Vec<[f64; 6]>,
    pub minus: Vec<[f64; 6]>,
    /// Entropy shifts `(plus, minus)`.
    pub entropy_shift: [f64; 2],
    pub front: FrontFunction,
}

impl BasicFields {
    /// Build from profiles `f(x1, x2) -> (plus, minus)` with a steady front.
    pub fn from_fn(
        strip: Strip,
        l1: f64,
        entropy_shift: [f64; 2],
        front: FrontFunction,
        f: impl Fn(f64, f64) -> ([f64; 6], [f64; 6]),
    ) -> Self {
        let h1 = strip.h1(l1);
        let h2 = strip.h2();
        let mut plus = Vec::with_capacity(strip.len());
        let mut minus = Vec::with_capacity(strip.len());
        for i in 0..strip.n1 {
            for j in 0..strip.n2 {
                let (a, b) = f(i as f64 * h1, j as f64 * h2);
                plus.push(a);
                minus.push(b);
            }
        }
        BasicFields { strip, l1, plus, minus, entropy_shift, front }
    }

    pub fn validate(&self) -> Result<()> {
        self.front.validate()?;
        let s = self.strip;
        if s.n1 < 5 || s.n2 < 5 {
            return Err(Error::Config("grid needs at least 5x5 nodes".into()));
        }
        if self.plus.len() != s.len() || self.minus.len() != s.len() {
            return Err(Error::Config("basic-state arrays do not match the grid".into()));
        }
        if self.front.n2() != s.n2 {
            return Err(Error::Config("front and grid disagree on n2".into()));
        }
        if !(self.l1 > 0.0 && self.l1.is_finite()) {
            return Err(Error::Config("L1 must be positive".into()));
        }
        if self.plus.iter().chain(&self.minus).flatten().any(|x| !x.is_finite()) {
            return Err(Error::Config("basic state has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn side(&self, plus: bool) -> &[[f64; 6]] {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    /// One-sided second-order `d1` at the boundary `x1 = 0`, component `c`.
    pub fn d1_at_boundary(&self, plus: bool, j: usize, c: usize) -> f64 {
        let f = self.side(plus);
        let s = self.strip;
        let h = s.h1(self.l1);
        (4.0 * (f[s.idx(1, j)][c] - f[s.idx(0, j)][c]) - (f[s.idx(2, j)][c] - f[s.idx(0, j)][c])) / (2.0 * h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub passed: bool,
}

impl AuditReport {
    pub fn check(&self, tag: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.tag == tag)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Tolerance for the equality-type audit conditions.
pub const AUDIT_TOL: f64 = 1e-8;

/// Check every structural assumption on the basic state: relaxed
/// hyperbolicity, light speed, interface conditions and their derivative
/// versions, the normal-field margin, the Rayleigh–Taylor sign and the
/// divergence constraint.
pub fn audit_basic_state(params: &ThermoParams, basic: &BasicFields, cut: &Cutoff) -> Result<AuditReport> {
    basic.validate()?;
    let s = basic.strip;
    let h1 = s.h1(basic.l1);
    let h2 = s.h2();
    let front = &basic.front;
    let mut warnings = Vec::new();
    let sup = front.sup_norm();
    if sup > 0.5 && sup <= 1.0 {
        warnings.push(format!("sup |phi| = {sup:.3} exceeds 1/2 (allowed up to 1)"));
    }

    let mut min_p = f64::INFINITY;
    let mut min_light = f64::INFINITY;
    for y in basic.plus.iter().chain(&basic.minus) {
        min_p = min_p.min(y[0] + 0.5 * params.pbar);
        let v = velocity_from_u(&[y[1], y[2], 0.0]);
        let speed = (v[0] * v[0] + v[1] * v[1]).sqrt();
        min_light = min_light.min(1.0 - speed - 0.5 * params.nu);
    }

    let mut jump_worst: f64 = 0.0;
    let mut hn_min = f64::INFINITY;
    let mut hn_jump: f64 = 0.0;
    let mut deriv_worst: f64 = 0.0;
    let mut rt_min = f64::INFINITY;
    for j in 0..s.n2 {
        let k0 = s.idx(0, j);
        let (a, b) = (basic.plus[k0], basic.minus[k0]);
        let va = velocity_from_u(&[a[1], a[2], 0.0]);
        let vb = velocity_from_u(&[b[1], b[2], 0.0]);
        let d2 = front.d2(0, j);
        let hn = |y: &[f64; 6]| y[3] - y[4] * d2;
        let v_n = va[0] - va[1] * d2;
        let dtphi = front.dt(0, j);
        for r in [a[0] - b[0], va[0] - vb[0], va[1] - vb[1], a[3] - b[3], a[4] - b[4], dtphi - v_n] {
            jump_worst = jump_worst.max(r.abs());
        }
        hn_min = hn_min.min(hn(&a).abs()).min(hn(&b).abs());
        hn_jump = hn_jump.max((hn(&a) - hn(&b)).abs());

        // Jumps of normal derivatives: [d1 v] and [d1 H_N] in unknowns u.
        let d1 = |plus: bool, c: usize| basic.d1_at_boundary(plus, j, c);
        for c in [1, 2] {
            deriv_worst = deriv_worst.max(normal_jump(d1(true, c), d1(false, c)).abs());
        }
        let d1hn = |plus: bool| d1(plus, 3) - d1(plus, 4) * d2;
        deriv_worst = deriv_worst.max(normal_jump(d1hn(true), d1hn(false)).abs());
        rt_min = rt_min.min(normal_jump(d1(true, 0), d1(false, 0)));
    }

    // Divergence of the straightened field on the initial slice:
    // d1 (H1 - H2 d2 Psi) + d2 (H2 d1 Phi) at interior nodes.
    let mut div_worst: f64 = 0.0;
    for (side, plus) in [(0usize, true), (1, false)] {
        let f = basic.side(plus);
        let hn_at = |i: usize, j: usize| -> Result<f64> {
            let pt = straighten(front, cut, 0, j, i as f64 * h1)?;
            let y = f[s.idx(i, j)];
            Ok(y[3] - y[4] * pt.d2_psi[side])
        };
        let ht_at = |i: usize, j: usize| -> Result<f64> {
            let pt = straighten(front, cut, 0, j, i as f64 * h1)?;
            Ok(f[s.idx(i, j)][4] * pt.d1_phi[side])
        };
        if sup > 1.0 {
            break;
        }
        for i in 1..s.n1 - 1 {
            for j in 0..s.n2 {
                let jp = (j + 1) % s.n2;
                let jm = (j + s.n2 - 1) % s.n2;
                let div = (hn_at(i + 1, j)? - hn_at(i - 1, j)?) / (2.0 * h1)
                    + (ht_at(i, jp)? - ht_at(i, jm)?) / (2.0 * h2);
                div_worst = div_worst.max(div.abs());
            }
        }
    }

    let checks = vec![
        Check::new("(a5)", "relaxed hyperbolicity p >= -pbar/2", min_p, false),
        Check::new("(ls)", "light-speed margin 1 - |v| >= nu/2", min_light, false),
        Check::new("(fi)", "front bound sup |phi| <= 1", 1.0 - sup, false),
        Check::new("(a12')", "interface conditions [p] = [v] = [H] = 0, dt phi = v_N", AUDIT_TOL - jump_worst, false),
        Check::new("(cdass)", "normal field |H_N| >= kappa/2", hn_min - 0.5 * params.kappa, false),
        Check::new("(jc1')", "derivative jumps [d1 v] = [d1 H_N] = 0", AUDIT_TOL - deriv_worst, false),
        Check::new("(RTL)", "Rayleigh-Taylor sign [d1 p] >= epsilon/2", rt_min - 0.5 * params.epsilon, false),
        Check::new("(14.1)", "divergence constraint on the initial slice", AUDIT_TOL - div_worst, false),
        Check::new("(15.1)", "normal-field continuity [H_N] = 0", AUDIT_TOL - hn_jump, false),
    ];
    let passed = checks.iter().all(|c| c.passed);
    Ok(AuditReport { checks, warnings, passed })
}
