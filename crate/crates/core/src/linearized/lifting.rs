//! Lifting of inhomogeneous boundary data into the interior, and the
//! transport equation for the normal-field datum `g6`.

use rayon::prelude::*;

use super::boundary::periodic_d2;
use super::{perturbation_u, BasicState, SideFields, Vec6};

/// Interior and boundary sources of the linearized problem. Both must
/// vanish for `t < 0`.
pub trait Sources: Sync {
    /// `f` on the given side at `(t, x1, x2)`, in the form
    /// `L'_e U' = f`.
    fn interior(&self, t: f64, x1: f64, x2: f64, plus: bool) -> [f64; 6];

    /// Boundary data `(g1, ..., g5)` at `(t, x2)`.
    fn boundary(&self, t: f64, x2: f64) -> [f64; 5];

    /// Time derivative of the boundary data; fourth-order differences by
    /// default.
    fn boundary_dt(&self, t: f64, x2: f64) -> [f64; 5] {
        let d = 1e-3;
        let (a, b, c, e) = (
            self.boundary(t + 2.0 * d, x2),
            self.boundary(t + d, x2),
            self.boundary(t - d, x2),
            self.boundary(t - 2.0 * d, x2),
        );
        [0, 1, 2, 3, 4].map(|k| (-a[k] + 8.0 * b[k] - 8.0 * c[k] + e[k]) / (12.0 * d))
    }

    /// True when every source is identically zero.
    fn is_zero(&self) -> bool {
        false
    }
}

pub struct ZeroSources;

impl Sources for ZeroSources {
    fn interior(&self, _: f64, _: f64, _: f64, _: bool) -> [f64; 6] {
        [0.0; 6]
    }

    fn boundary(&self, _: f64, _: f64) -> [f64; 5] {
        [0.0; 5]
    }

    fn boundary_dt(&self, _: f64, _: f64) -> [f64; 5] {
        [0.0; 5]
    }

    fn is_zero(&self) -> bool {
        true
    }
}

/// Boundary traces `(plus, minus)` of the lift at node `j`:
/// plus side carries `p = g1`, `v = (-g5, 0)`, `H_tau = g4`, `H_N = g6`;
/// the minus side carries only the velocity `v+ - (g2, g3)`.
pub fn lift_trace(basic: &BasicState, j: usize, g: &[f64; 5], g6: f64) -> ([f64; 6], [f64; 6]) {
    let d2 = basic.d2_front(j);
    let n2 = 1.0 + d2 * d2;
    let vp = [-g[4], 0.0, 0.0];
    let vm = [vp[0] - g[1], vp[1] - g[2], 0.0];
    let up = perturbation_u(&basic.point(true, 0, j).velocity(), &vp);
    let um = perturbation_u(&basic.point(false, 0, j).velocity(), &vm);
    let h1 = (g6 + g[3] * d2) / n2;
    let h2 = (g[3] - g6 * d2) / n2;
    ([g[0], up[0], up[1], h1, h2, 0.0], [0.0, um[0], um[1], 0.0, 0.0, 0.0])
}

/// Extend boundary traces into the interior with the cutoff profile.
pub fn lift_fields(basic: &BasicState, traces: &[([f64; 6], [f64; 6])]) -> SideFields {
    let s = basic.strip();
    let h1 = s.h1(basic.l1());
    let mut out = SideFields::zeros(s.len());
    for i in 0..s.n1 {
        let chi = basic.cutoff.value(i as f64 * h1);
        if chi == 0.0 {
            continue;
        }
        for (j, (a, b)) in traces.iter().enumerate() {
            let k = s.idx(i, j);
            out.plus[k] = a.map(|x| chi * x);
            out.minus[k] = b.map(|x| chi * x);
        }
    }
    out
}

fn boundary_nodes(basic: &BasicState) -> Vec<f64> {
    let n2 = basic.strip().n2;
    (0..n2).map(|j| j as f64 / n2 as f64).collect()
}

/// `dt g6 = [f_H . N] - d2(v2+ g6)` with `f_H` the field rows of `A0^-1 f`.
pub fn g6_rate(basic: &BasicState, g6: &[f64], t: f64, sources: &dyn Sources) -> Vec<f64> {
    let s = basic.strip();
    let flux: Vec<f64> = (0..s.n2).map(|j| basic.point(true, 0, j).velocity()[1] * g6[j]).collect();
    boundary_nodes(basic)
        .iter()
        .enumerate()
        .map(|(j, &x2)| {
            let d2 = basic.d2_front(j);
            let k = s.idx(0, j);
            let field_normal = |plus: bool| {
                let f = Vec6::from_column_slice(&sources.interior(t, 0.0, x2, plus));
                let r = basic.coefficients(plus)[k].a0_inv * f;
                r[3] - r[4] * d2
            };
            field_normal(true) - field_normal(false) - periodic_d2(&flux, j)
        })
        .collect()
}

/// Lifted fields, their time derivative, and the interior source of the
/// lifted problem in rate form.
#[derive(Clone, Debug)]
pub struct Lifted {
    pub fields: SideFields,
    pub fields_dt: SideFields,
    /// `A0^-1 (f - L'_e U~)`.
    pub source: SideFields,
}

/// Lift of the boundary data at time `t` and the source of the lifted
/// problem.
pub fn lifted_source(
    basic: &BasicState,
    t: f64,
    sources: &dyn Sources,
    g6: &[f64],
    g6_dt: &[f64],
) -> Lifted {
    let s = basic.strip();
    if sources.is_zero() && g6.iter().chain(g6_dt).all(|&x| x == 0.0) {
        let z = SideFields::zeros(s.len());
        return Lifted { fields: z.clone(), fields_dt: z.clone(), source: z };
    }
    let h1 = s.h1(basic.l1());
    let x2s = boundary_nodes(basic);
    let traces: Vec<_> = (0..s.n2)
        .map(|j| lift_trace(basic, j, &sources.boundary(t, x2s[j]), g6[j]))
        .collect();
    let rates: Vec<_> = (0..s.n2)
        .map(|j| lift_trace(basic, j, &sources.boundary_dt(t, x2s[j]), g6_dt[j]))
        .collect();
    let lifted = lift_fields(basic, &traces);
    let lifted_dt = lift_fields(basic, &rates);
    let mut rate = SideFields::zeros(s.len());
    for plus in [true, false] {
        let pick = |tr: &([f64; 6], [f64; 6])| if plus { tr.0 } else { tr.1 };
        let trace: Vec<[f64; 6]> = traces.iter().map(pick).collect();
        let trace_t: Vec<[f64; 6]> = rates.iter().map(pick).collect();
        let trace_2: Vec<[f64; 6]> = (0..s.n2)
            .map(|j| {
                [0, 1, 2, 3, 4, 5].map(|c| {
                    let col: Vec<f64> = trace.iter().map(|y| y[c]).collect();
                    periodic_d2(&col, j)
                })
            })
            .collect();
        let coefs = basic.coefficients(plus);
        let v = |a: [f64; 6]| Vec6::from_column_slice(&a);
        let out: Vec<[f64; 6]> = (0..s.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / s.n2, k % s.n2);
                let x1 = i as f64 * h1;
                let c = &coefs[k];
                let mut r = c.a0_inv * v(sources.interior(t, x1, x2s[j], plus));
                let chi = basic.cutoff.value(x1);
                let dchi = basic.cutoff.derivative(x1);
                if chi != 0.0 || dchi != 0.0 {
                    let u = v(trace[j]) * chi;
                    r -= v(trace_t[j]) * chi
                        + c.k1 * (v(trace[j]) * dchi)
                        + c.k2 * (v(trace_2[j]) * chi)
                        + c.kc * u;
                }
                [r[0], r[1], r[2], r[3], r[4], r[5]]
            })
            .collect();
        *rate.side_mut(plus) = out;
    }
    Lifted { fields: lifted, fields_dt: lifted_dt, source: rate }
}
