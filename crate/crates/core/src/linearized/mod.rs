//! The linearized contact-discontinuity problem in straightened
//! coordinates: frozen coefficients of the effective interior operator,
//! the good unknown, boundary operators and the lifting of boundary data.

mod boundary;
pub(crate) use boundary::periodic_d2;
mod lifting;

pub use boundary::{
    boundary_operator_apply, boundary_quadratic_form, jump_normal_field, BoundaryClosure,
    QuadraticForms,
};
pub use lifting::{g6_rate, lift_fields, lift_trace, lifted_source, Lifted, Sources, ZeroSources};

use nalgebra::{SMatrix, SVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::interface::{audit_basic_state, straighten, AuditReport, BasicFields, Cutoff, CutoffKind, Strip};
use crate::kinematics::{du_dv, velocity_from_u};
use crate::scalar::Dual;
use crate::symmetrizer::{planar_coefficients, Mat6};

pub type Vec6 = SVector<f64, 6>;

fn mat6<T: Copy>(a: &[[T; 6]; 6], f: impl Fn(T) -> f64) -> Mat6 {
    SMatrix::from_fn(|r, c| f(a[r][c]))
}

/// `(v.du)`-corrected velocity perturbation:
/// `v' = (u' - (v.u') v) / Gamma`.
pub fn perturbation_velocity(v_hat: &[f64; 3], u_dot: &[f64; 3]) -> [f64; 3] {
    let v2: f64 = v_hat.iter().map(|x| x * x).sum();
    let g = 1.0 / (1.0 - v2).sqrt();
    let vu: f64 = (0..3).map(|i| v_hat[i] * u_dot[i]).sum();
    [0, 1, 2].map(|i| (u_dot[i] - vu * v_hat[i]) / g)
}

/// Inverse of [`perturbation_velocity`].
pub fn perturbation_u(v_hat: &[f64; 3], v_dot: &[f64; 3]) -> [f64; 3] {
    du_dv(v_hat, v_dot).expect("basic velocity below light speed")
}

/// Basic-state data at one node, unknowns unshifted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasicPoint {
    pub y: [f64; 6],
    pub d1y: [f64; 6],
    pub d2y: [f64; 6],
    pub dty: [f64; 6],
    pub psi_t: f64,
    pub psi_2: f64,
    pub d1_phi: f64,
}

impl BasicPoint {
    /// A spatially constant point with a flat front on the given side.
    pub fn constant(y: [f64; 6], plus: bool) -> Self {
        BasicPoint {
            y,
            d1y: [0.0; 6],
            d2y: [0.0; 6],
            dty: [0.0; 6],
            psi_t: 0.0,
            psi_2: 0.0,
            d1_phi: if plus { 1.0 } else { -1.0 },
        }
    }

    /// `(A0, A1~, A2)` with `A1~ = (A1 - A0 psi_t - A2 psi_2) / d1 Phi`.
    pub fn matrices(&self, params: &ThermoParams) -> (Mat6, Mat6, Mat6) {
        let [a0, a1, a2] = planar_coefficients(params, &self.y);
        let (a0, a1, a2) = (mat6(&a0, |x| x), mat6(&a1, |x| x), mat6(&a2, |x| x));
        let a1t = (a1 - a0 * self.psi_t - a2 * self.psi_2) / self.d1_phi;
        (a0, a1t, a2)
    }

    pub fn velocity(&self) -> [f64; 3] {
        velocity_from_u(&[self.y[1], self.y[2], 0.0])
    }
}

/// Directional derivatives of the coefficients and the lower-order term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientDerivative {
    pub d_a0: Mat6,
    /// Derivative of the straightened `A1~`.
    pub d_a1: Mat6,
    pub d_a2: Mat6,
    /// `C Y = (Y.grad A0) dt U + (Y.grad A1~) d1 U + (Y.grad A2) d2 U`.
    pub c_y: Vec6,
}

/// Forward-mode derivative of the assembly along `dir`.
pub fn coefficient_derivative(params: &ThermoParams, pt: &BasicPoint, dir: &[f64; 6]) -> CoefficientDerivative {
    let y: [Dual; 6] = [0, 1, 2, 3, 4, 5].map(|k| Dual::new(pt.y[k], dir[k]));
    let [a0, a1, a2] = planar_coefficients(params, &y);
    let d_a0 = mat6(&a0, |x| x.eps);
    let d_a2 = mat6(&a2, |x| x.eps);
    let d_a1 = (mat6(&a1, |x| x.eps) - d_a0 * pt.psi_t - d_a2 * pt.psi_2) / pt.d1_phi;
    let v = |a: &[f64; 6]| Vec6::from_column_slice(a);
    let c_y = d_a0 * v(&pt.dty) + d_a1 * v(&pt.d1y) + d_a2 * v(&pt.d2y);
    CoefficientDerivative { d_a0, d_a1, d_a2, c_y }
}

/// The matrix `C` (columns are `C e_k`).
pub fn lower_order_matrix(params: &ThermoParams, pt: &BasicPoint) -> Mat6 {
    let mut c = Mat6::zeros();
    if pt.dty.iter().chain(&pt.d1y).chain(&pt.d2y).all(|&x| x == 0.0) {
        return c;
    }
    for k in 0..6 {
        let mut e = [0.0; 6];
        e[k] = 1.0;
        c.set_column(k, &coefficient_derivative(params, pt, &e).c_y);
    }
    c
}

/// Frozen coefficients of `dt U = -K1 d1 U - K2 d2 U - Kc U + A0^-1 f`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeCoefficients {
    pub a0_inv: Mat6,
    pub k1: Mat6,
    pub k2: Mat6,
    pub kc: Mat6,
}

/// Perturbation fields on both sides, plus and minus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideFields {
    pub plus: Vec<[f64; 6]>,
    pub minus: Vec<[f64; 6]>,
}

impl SideFields {
    pub fn zeros(n: usize) -> Self {
        SideFields { plus: vec![[0.0; 6]; n], minus: vec![[0.0; 6]; n] }
    }

    pub fn side(&self, plus: bool) -> &Vec<[f64; 6]> {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn side_mut(&mut self, plus: bool) -> &mut Vec<[f64; 6]> {
        if plus {
            &mut self.plus
        } else {
            &mut self.minus
        }
    }

    pub fn all_zero(&self) -> bool {
        self.plus.iter().chain(&self.minus).flatten().all(|&x| x == 0.0)
    }
}

/// Perturbation `(U', phi)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationFields {
    pub fields: SideFields,
    /// Front perturbation at the boundary nodes.
    pub front: Vec<f64>,
}

/// Basic state with derived straightening data and frozen coefficients.
#[derive(Clone, Debug)]
pub struct BasicState {
    pub params: ThermoParams,
    pub fields: BasicFields,
    pub cutoff: Cutoff,
    pub audit: AuditReport,
    points: [Vec<BasicPoint>; 2],
    coefficients: [Vec<NodeCoefficients>; 2],
}

fn side_index(plus: bool) -> usize {
    if plus {
        0
    } else {
        1
    }
}

impl BasicState {
    /// Audit and freeze the basic state. The Rayleigh–Taylor sign is only
    /// required when `enforce_rayleigh_taylor` is set; every other audit
    /// condition is mandatory. The front must be steady.
    pub fn new(
        params: ThermoParams,
        fields: BasicFields,
        cutoff: CutoffKind,
        enforce_rayleigh_taylor: bool,
    ) -> Result<Self> {
        params.validate()?;
        let cutoff = Cutoff::new(cutoff);
        let audit = audit_basic_state(&params, &fields, &cutoff)?;
        let fatal: Vec<String> = audit
            .failures()
            .filter(|c| enforce_rayleigh_taylor || c.tag != "(RTL)")
            .map(|c| format!("{} {} (margin {:.3e})", c.tag, c.description, c.margin))
            .collect();
        if !fatal.is_empty() {
            return Err(Error::Audit(fatal.join("; ")));
        }
        if fields.front.times.len() != 1 {
            return Err(Error::Config("the basic front must be steady (one time slice)".into()));
        }
        let s = fields.strip;
        let mut points: [Vec<BasicPoint>; 2] = [Vec::new(), Vec::new()];
        for plus in [true, false] {
            let pts: Result<Vec<BasicPoint>> = (0..s.len())
                .into_par_iter()
                .map(|k| basic_point(&params, &fields, &cutoff, plus, k / s.n2, k % s.n2))
                .collect();
            points[side_index(plus)] = pts?;
        }
        let mut coefficients: [Vec<NodeCoefficients>; 2] = [Vec::new(), Vec::new()];
        for side in 0..2 {
            let cs: Result<Vec<NodeCoefficients>> = points[side]
                .par_iter()
                .map(|pt| {
                    let (a0, a1t, a2) = pt.matrices(&params);
                    let a0_inv = a0.cholesky().map(|c| c.inverse()).ok_or_else(|| {
                        Error::Hyperbolicity("A0 of the basic state is not positive definite".into())
                    })?;
                    let c = lower_order_matrix(&params, pt);
                    Ok(NodeCoefficients { a0_inv, k1: a0_inv * a1t, k2: a0_inv * a2, kc: a0_inv * c })
                })
                .collect();
            coefficients[side] = cs?;
        }
        Ok(BasicState { params, fields, cutoff, audit, points, coefficients })
    }

    pub fn strip(&self) -> Strip {
        self.fields.strip
    }

    pub fn l1(&self) -> f64 {
        self.fields.l1
    }

    pub fn point(&self, plus: bool, i: usize, j: usize) -> &BasicPoint {
        &self.points[side_index(plus)][self.strip().idx(i, j)]
    }

    pub fn points(&self, plus: bool) -> &[BasicPoint] {
        &self.points[side_index(plus)]
    }

    pub fn coefficients(&self, plus: bool) -> &[NodeCoefficients] {
        &self.coefficients[side_index(plus)]
    }

    pub fn d2_front(&self, j: usize) -> f64 {
        self.fields.front.d2(0, j)
    }

    /// Largest characteristic speed `|lambda(K1)|/h1`-style bound used for
    /// the time step: max over nodes of the row-sum norms of `K1`, `K2`.
    pub fn speed_bounds(&self) -> (f64, f64) {
        let mut s1: f64 = 0.0;
        let mut s2: f64 = 0.0;
        for c in self.coefficients[0].iter().chain(&self.coefficients[1]) {
            s1 = s1.max(spectral_radius(&c.k1));
            s2 = s2.max(spectral_radius(&c.k2));
        }
        (s1, s2)
    }

    /// `[d1 p]` at boundary node `j` (sum of one-sided traces).
    pub fn rt_jump(&self, j: usize) -> f64 {
        crate::interface::normal_jump(
            self.fields.d1_at_boundary(true, j, 0),
            self.fields.d1_at_boundary(false, j, 0),
        )
    }

    /// `[d1 H_tau]` at boundary node `j`.
    pub fn tangential_field_jump(&self, j: usize) -> f64 {
        let d2 = self.d2_front(j);
        let f = &self.fields;
        let side = |plus: bool| f.d1_at_boundary(plus, j, 3) * d2 + f.d1_at_boundary(plus, j, 4);
        crate::interface::normal_jump(side(true), side(false))
    }

    /// `d1 v_N` on the plus side at boundary node `j`.
    pub fn d1_normal_velocity(&self, j: usize) -> f64 {
        let pt = self.point(true, 0, j);
        let v = pt.velocity();
        let dv = perturbation_velocity(&v, &[pt.d1y[1], pt.d1y[2], 0.0]);
        dv[0] - dv[1] * self.d2_front(j)
    }
}

fn spectral_radius(m: &Mat6) -> f64 {
    m.complex_eigenvalues().iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn basic_point(
    params: &ThermoParams,
    f: &BasicFields,
    cut: &Cutoff,
    plus: bool,
    i: usize,
    j: usize,
) -> Result<BasicPoint> {
    let s = f.strip;
    let h1 = s.h1(f.l1);
    let h2 = s.h2();
    let data = f.side(plus);
    let shift = [params.pbar, 0.0, 0.0, 0.0, 0.0, f.entropy_shift[side_index(plus)]];
    let at = |i: usize, j: usize| data[s.idx(i, j)];
    let y0 = at(i, j);
    let y = [0, 1, 2, 3, 4, 5].map(|c| y0[c] + shift[c]);
    let d1y = [0, 1, 2, 3, 4, 5].map(|c| {
        if i == 0 {
            (4.0 * (at(1, j)[c] - at(0, j)[c]) - (at(2, j)[c] - at(0, j)[c])) / (2.0 * h1)
        } else if i == s.n1 - 1 {
            (4.0 * (at(i, j)[c] - at(i - 1, j)[c]) - (at(i, j)[c] - at(i - 2, j)[c])) / (2.0 * h1)
        } else {
            (at(i + 1, j)[c] - at(i - 1, j)[c]) / (2.0 * h1)
        }
    });
    let (jp, jm) = ((j + 1) % s.n2, (j + s.n2 - 1) % s.n2);
    let d2y = [0, 1, 2, 3, 4, 5].map(|c| (at(i, jp)[c] - at(i, jm)[c]) / (2.0 * h2));
    let st = straighten(&f.front, cut, 0, j, i as f64 * h1)?;
    let k = side_index(plus);
    Ok(BasicPoint {
        y,
        d1y,
        d2y,
        dty: [0.0; 6],
        psi_t: st.dt_psi[k],
        psi_2: st.d2_psi[k],
        d1_phi: st.d1_phi[k],
    })
}

/// Alinhac's good unknown `U' = U - (Psi / d1 Phi) d1 U_hat` for a front
/// perturbation `front` lifted by the cutoff.
pub fn good_unknown(basic: &BasicState, u: &SideFields, front: &[f64]) -> SideFields {
    transform(basic, u, front, -1.0)
}

/// Inverse of [`good_unknown`].
pub fn from_good_unknown(basic: &BasicState, u_dot: &SideFields, front: &[f64]) -> SideFields {
    transform(basic, u_dot, front, 1.0)
}

fn transform(basic: &BasicState, u: &SideFields, front: &[f64], sign: f64) -> SideFields {
    let s = basic.strip();
    let h1 = s.h1(basic.l1());
    let mut out = u.clone();
    for plus in [true, false] {
        let side = out.side_mut(plus);
        for i in 0..s.n1 {
            let x1 = i as f64 * h1;
            let chi = basic.cutoff.value(x1);
            for j in 0..s.n2 {
                let pt = basic.point(plus, i, j);
                let w = sign * chi * front[j] / pt.d1_phi;
                let k = s.idx(i, j);
                for c in 0..6 {
                    side[k][c] += w * pt.d1y[c];
                }
            }
        }
    }
    out
}

/// Central second-order derivative in `x1` (one-sided at the ends) and
/// periodic in `x2`, component-wise.
pub(crate) fn grid_derivatives(strip: Strip, l1: f64, f: &[[f64; 6]], i: usize, j: usize) -> ([f64; 6], [f64; 6]) {
    let h1 = strip.h1(l1);
    let h2 = strip.h2();
    let at = |i: usize, j: usize| &f[strip.idx(i, j)];
    let d1 = [0, 1, 2, 3, 4, 5].map(|c| {
        if i == 0 {
            (4.0 * (at(1, j)[c] - at(0, j)[c]) - (at(2, j)[c] - at(0, j)[c])) / (2.0 * h1)
        } else if i == strip.n1 - 1 {
            (4.0 * (at(i, j)[c] - at(i - 1, j)[c]) - (at(i, j)[c] - at(i - 2, j)[c])) / (2.0 * h1)
        } else {
            (at(i + 1, j)[c] - at(i - 1, j)[c]) / (2.0 * h1)
        }
    });
    let (jp, jm) = ((j + 1) % strip.n2, (j + strip.n2 - 1) % strip.n2);
    let d2 = [0, 1, 2, 3, 4, 5].map(|c| (at(i, jp)[c] - at(i, jm)[c]) / (2.0 * h2));
    (d1, d2)
}

/// `L'_e U = A0 dt U + A1~ d1 U + A2 d2 U + C U` on interior nodes
/// (`0 < i < n1 - 1`); boundary rows are left at zero.
pub fn effective_interior_apply(basic: &BasicState, u: &SideFields, dt_u: &SideFields) -> SideFields {
    let s = basic.strip();
    let mut out = SideFields::zeros(s.len());
    for plus in [true, false] {
        let f = u.side(plus);
        let ft = dt_u.side(plus);
        let res: Vec<[f64; 6]> = (0..s.len())
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / s.n2, k % s.n2);
                if i == 0 || i == s.n1 - 1 {
                    return [0.0; 6];
                }
                let pt = basic.point(plus, i, j);
                let (a0, a1t, a2) = pt.matrices(&basic.params);
                let c = lower_order_matrix(&basic.params, pt);
                let (d1, d2) = grid_derivatives(s, basic.l1(), f, i, j);
                let v = |a: &[f64; 6]| Vec6::from_column_slice(a);
                let r = a0 * v(&ft[k]) + a1t * v(&d1) + a2 * v(&d2) + c * v(&f[k]);
                [r[0], r[1], r[2], r[3], r[4], r[5]]
            })
            .collect();
        *out.side_mut(plus) = res;
    }
    out
}

/// The zeroth-order front terms dropped from the effective operator:
/// `-(Psi / d1 Phi) d1 { L(U_hat, Psi_hat) }`, where `L(U_hat, Psi_hat)` is
/// the basic-state residual. Vanishes when the basic state is an exact
/// solution.
pub fn dropped_terms(basic: &BasicState, front: &[f64]) -> SideFields {
    let s = basic.strip();
    let h1 = s.h1(basic.l1());
    let mut residual = SideFields::zeros(s.len());
    for plus in [true, false] {
        let r: Vec<[f64; 6]> = basic
            .points(plus)
            .iter()
            .map(|pt| {
                let (a0, a1t, a2) = pt.matrices(&basic.params);
                let v = |a: &[f64; 6]| Vec6::from_column_slice(a);
                let r = a0 * v(&pt.dty) + a1t * v(&pt.d1y) + a2 * v(&pt.d2y);
                [r[0], r[1], r[2], r[3], r[4], r[5]]
            })
            .collect();
        *residual.side_mut(plus) = r;
    }
    let mut out = SideFields::zeros(s.len());
    for plus in [true, false] {
        let res = residual.side(plus).clone();
        let o = out.side_mut(plus);
        for i in 0..s.n1 {
            let chi = basic.cutoff.value(i as f64 * h1);
            for j in 0..s.n2 {
                let (d1, _) = grid_derivatives(s, basic.l1(), &res, i, j);
                let pt = basic.point(plus, i, j);
                let w = -chi * front[j] / pt.d1_phi;
                o[s.idx(i, j)] = d1.map(|x| w * x);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::FrontFunction;

    pub(crate) fn constant_basic(n1: usize, n2: usize) -> BasicState {
        let strip = Strip { n1, n2 };
        let f = BasicFields::from_fn(strip, 10.0, [0.3, -0.3], FrontFunction::flat(n2), |_, _| {
            let y = [0.9, 0.0, 0.3, 1.0, 0.4, 0.0];
            (y, y)
        });
        BasicState::new(ThermoParams::default(), f, CutoffKind::Quintic, false).unwrap()
    }

    #[test]
    fn perturbation_velocity_examples() {
        let v = perturbation_velocity(&[0.6, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        assert!((v[0] - 0.512).abs() < 1e-15);
        assert_eq!(perturbation_velocity(&[0.0; 3], &[0.3, -0.2, 0.1]), [0.3, -0.2, 0.1]);
        // Matches the derivative of the nonlinear map v(u).
        let vh = [0.3, -0.4, 0.1];
        let (_, u) = crate::kinematics::lorentz_extend(&vh).unwrap();
        let du = [0.2, 0.7, -0.3];
        let h = 1e-6;
        let vp = velocity_from_u(&[0, 1, 2].map(|i| u[i] + h * du[i]));
        let vm = velocity_from_u(&[0, 1, 2].map(|i| u[i] - h * du[i]));
        let lin = perturbation_velocity(&vh, &du);
        for i in 0..3 {
            assert!(((vp[i] - vm[i]) / (2.0 * h) - lin[i]).abs() < 1e-6);
        }
        let back = perturbation_u(&vh, &lin);
        for i in 0..3 {
            assert!((back[i] - du[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn coefficient_derivative_matches_differences() {
        let params = ThermoParams::default();
        let pt = BasicPoint {
            y: [0.8, 0.2, -0.3, 0.9, 0.5, 0.2],
            d1y: [0.1, 0.2, -0.1, 0.3, 0.05, 0.4],
            d2y: [-0.2, 0.1, 0.3, 0.0, 0.2, 0.1],
            dty: [0.0; 6],
            psi_t: 0.1,
            psi_2: 0.3,
            d1_phi: 1.2,
        };
        let dir = [0.3, -0.1, 0.2, 0.5, -0.4, 0.7];
        let d = coefficient_derivative(&params, &pt, &dir);
        let h = 1e-6;
        let shifted = |s: f64| BasicPoint { y: [0, 1, 2, 3, 4, 5].map(|k| pt.y[k] + s * dir[k]), ..pt };
        let (p0, p1, p2) = shifted(h).matrices(&params);
        let (m0, m1, m2) = shifted(-h).matrices(&params);
        for (exact, fd) in [(d.d_a0, (p0 - m0) / (2.0 * h)), (d.d_a1, (p1 - m1) / (2.0 * h)), (d.d_a2, (p2 - m2) / (2.0 * h))] {
            let rel = (exact - fd).norm() / exact.norm().max(1e-300);
            assert!(rel < 1e-6, "{rel}");
        }
        let zero = coefficient_derivative(&params, &pt, &[0.0; 6]);
        assert_eq!(zero.c_y, Vec6::zeros());
    }

    #[test]
    fn constant_state_has_no_lower_order_term() {
        let b = constant_basic(11, 8);
        for c in b.coefficients(true).iter().chain(b.coefficients(false)) {
            assert_eq!(c.kc, Mat6::zeros());
        }
    }

    #[test]
    fn good_unknown_round_trip() {
        let strip = Strip { n1: 21, n2: 8 };
        let cut = Cutoff::default();
        let f = BasicFields::from_fn(strip, 10.0, [0.3, -0.3], FrontFunction::flat(8), |x1, _| {
            let y = [0.9 + 0.3 * x1 * cut.value(x1), 0.0, 0.3, 1.0, 0.4, 0.0];
            (y, y)
        });
        let b = BasicState::new(ThermoParams::default(), f, CutoffKind::Quintic, true).unwrap();
        let mut u = SideFields::zeros(strip.len());
        for (k, y) in u.plus.iter_mut().enumerate() {
            *y = [0.1 * k as f64, 0.2, -0.1, 0.05, 0.3, 0.01];
        }
        let front: Vec<f64> = (0..8).map(|j| 0.1 * (j as f64).sin()).collect();
        let g = good_unknown(&b, &u, &front);
        assert_ne!(g, u);
        let back = from_good_unknown(&b, &g, &front);
        for (a, c) in back.plus.iter().zip(&u.plus) {
            for k in 0..6 {
                assert!((a[k] - c[k]).abs() < 1e-13);
            }
        }
        // Constant basic state: the substitution is the identity.
        let cb = constant_basic(21, 8);
        assert_eq!(good_unknown(&cb, &u, &front), u);
        // Only the pressure gradient enters: U' = U - chi phi d1 p_hat.
        let (i, j) = (3, 2);
        let x1 = i as f64 * strip.h1(10.0);
        let want = u.plus[strip.idx(i, j)][0] - cut.value(x1) * front[j] * b.point(true, i, j).d1y[0];
        assert!((g.plus[strip.idx(i, j)][0] - want).abs() < 1e-15);
    }
}
