//! Boundary side of the linearized problem: the five interface operators,
//! the boundary quadratic form and the characteristic closure used by the
//! solver at `x1 = 0`.

use nalgebra::{DMatrix, SMatrix};
use serde::Serialize;

use super::{perturbation_velocity, BasicState, PerturbationFields, SideFields, Vec6};
use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::linalg::generalized_symmetric_eigen;
use crate::sampling::ContactSample;
use crate::symmetrizer::{assemble, to_dmatrix, Mat6};

type Mat12 = SMatrix<f64, 12, 12>;

fn velocity_of(u: &[f64; 6], v_hat: &[f64; 3]) -> [f64; 3] {
    perturbation_velocity(v_hat, &[u[1], u[2], 0.0])
}

/// Fourth-order periodic derivative of nodal values on the unit circle.
pub(crate) fn periodic_d2(f: &[f64], j: usize) -> f64 {
    let n = f.len();
    let h = 1.0 / n as f64;
    let at = |o: isize| f[(j as isize + o).rem_euclid(n as isize) as usize];
    (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h)
}

/// The five boundary rows at each boundary node:
/// `[p'] + phi [d1 p]`, `[v1']`, `[v2']`, `[H_tau'] + phi [d1 H_tau]`,
/// `dt phi + v2 d2 phi - v_N'+ - phi d1 v_N+`.
pub fn boundary_operator_apply(
    basic: &BasicState,
    pert: &PerturbationFields,
    dt_front: &[f64],
) -> Result<Vec<[f64; 5]>> {
    if let Some(c) = basic.audit.check("(jc1')") {
        if !c.passed {
            return Err(Error::Audit(format!("(jc1') {} (margin {:.3e})", c.description, c.margin)));
        }
    }
    let s = basic.strip();
    let phi = &pert.front;
    Ok((0..s.n2)
        .map(|j| {
            let k = s.idx(0, j);
            let (a, b) = (pert.fields.plus[k], pert.fields.minus[k]);
            let (pa, pb) = (basic.point(true, 0, j), basic.point(false, 0, j));
            let (va, vb) = (velocity_of(&a, &pa.velocity()), velocity_of(&b, &pb.velocity()));
            let d2 = basic.d2_front(j);
            let h_tau = |y: &[f64; 6]| y[3] * d2 + y[4];
            let v_n = va[0] - va[1] * d2;
            let v_hat2 = pa.velocity()[1];
            [
                a[0] - b[0] + phi[j] * basic.rt_jump(j),
                va[0] - vb[0],
                va[1] - vb[1],
                h_tau(&a) - h_tau(&b) + phi[j] * basic.tangential_field_jump(j),
                dt_front[j] + v_hat2 * periodic_d2(phi, j) - v_n - phi[j] * basic.d1_normal_velocity(j),
            ]
        })
        .collect())
}

/// `[H_N'] = [H1' - H2' d2 phi]` at each boundary node.
pub fn jump_normal_field(basic: &BasicState, fields: &SideFields) -> Vec<f64> {
    let s = basic.strip();
    (0..s.n2)
        .map(|j| {
            let k = s.idx(0, j);
            let d2 = basic.d2_front(j);
            let hn = |y: &[f64; 6]| y[3] - y[4] * d2;
            hn(&fields.plus[k]) - hn(&fields.minus[k])
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadraticForms {
    /// `-1/2 (A1_hat U'.U')` by matrix contraction.
    pub direct: f64,
    /// Closed form in terms of the jumps.
    pub reduced: f64,
    /// Closed form with the `[H_N']` term dropped.
    pub reduced_tangential: f64,
}

/// Boundary quadratic form at a contact point for traces `plus`, `minus`
/// (planar unknowns). The closed forms assume `[u'] = 0`.
pub fn boundary_quadratic_form(
    params: &ThermoParams,
    point: &ContactSample,
    plus: &[f64; 6],
    minus: &[f64; 6],
) -> Result<QuadraticForms> {
    let (d2, dt) = (point.d2phi, point.dtphi);
    let side = |s| -> Result<Mat6> {
        let [a0, a1, a2] = assemble(params, s)?.planar();
        Ok(a1 - a0 * dt - a2 * d2)
    };
    let (mp, mm) = (side(&point.plus)?, side(&point.minus)?);
    let (up, um) = (Vec6::from_column_slice(plus), Vec6::from_column_slice(minus));
    let direct = -0.5 * (up.dot(&(mp * up)) - um.dot(&(mm * um)));

    let v_hat = point.plus.velocity;
    let h_hat = point.plus.magnetic;
    let lorentz = 1.0 / (1.0 - v_hat[0] * v_hat[0] - v_hat[1] * v_hat[1]).sqrt();
    let norm2 = 1.0 + d2 * d2;
    let sigma2 = dt * dt / norm2;
    let vd = velocity_of(plus, &v_hat);
    let vd_n = vd[0] - vd[1] * d2;
    let h_n_hat = h_hat[0] - h_hat[1] * d2;
    let h_tau = |y: &[f64; 6]| y[3] * d2 + y[4];
    let h_n = |y: &[f64; 6]| y[3] - y[4] * d2;
    let jump_p = plus[0] - minus[0];
    let jump_ht = h_tau(plus) - h_tau(minus);
    let jump_hn = h_n(plus) - h_n(minus);
    let v_n_hat = v_hat[0] - v_hat[1] * d2;
    let v_tau_hat = v_hat[0] * d2 + v_hat[1];
    let lead = h_n_hat * vd[1] - h_hat[1] * vd_n;
    let tangential = (1.0 - sigma2) * jump_ht;
    let normal = v_n_hat * v_tau_hat / norm2 * jump_hn;
    Ok(QuadraticForms {
        direct,
        reduced: lorentz * (lead * (tangential + normal) - vd_n * jump_p),
        reduced_tangential: lorentz * (lead * tangential - vd_n * jump_p),
    })
}

/// Characteristic closure at `x1 = 0`: per boundary node, the outgoing and
/// zero-speed characteristic variables of each side are extrapolated from
/// the interior and the four interface conditions fix the rest.
#[derive(Clone, Debug)]
pub struct BoundaryClosure {
    /// Left eigenvector rows `(A0 r)^T` per node and side, 4 each.
    rows: Vec<[[[f64; 6]; 4]; 2]>,
    /// Inverse of the 12x12 system per node.
    inverse: Vec<Mat12>,
    rt_jump: Vec<f64>,
    tangential_jump: Vec<f64>,
}

impl BoundaryClosure {
    pub fn new(basic: &BasicState) -> Result<Self> {
        let s = basic.strip();
        let mut rows = Vec::with_capacity(s.n2);
        let mut inverse = Vec::with_capacity(s.n2);
        for j in 0..s.n2 {
            let mut node_rows = [[[0.0; 6]; 4]; 2];
            let mut m = Mat12::zeros();
            for (side, plus) in [(0usize, true), (1, false)] {
                let pt = basic.point(plus, 0, j);
                let (a0, a1t, _) = pt.matrices(&basic.params);
                let (vals, vecs) = generalized_symmetric_eigen(&to_dmatrix(&a1t), &to_dmatrix(&a0))?;
                let scale = vals.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
                let thr = crate::characteristics::ZERO_REL_TOL * scale;
                let picked: Vec<usize> = (0..6).filter(|&k| vals[k] <= thr).collect();
                if picked.len() != 4 {
                    return Err(Error::Precondition(format!(
                        "boundary node {j}: {} non-incoming characteristics on the {} side, expected 4",
                        picked.len(),
                        if plus { "plus" } else { "minus" }
                    )));
                }
                let a0d: DMatrix<f64> = to_dmatrix(&a0);
                for (r, &k) in picked.iter().enumerate() {
                    let l = &a0d * vecs.column(k);
                    for c in 0..6 {
                        node_rows[side][r][c] = l[c];
                        m[(4 * side + r, 6 * side + c)] = l[c];
                    }
                }
            }
            let d2 = basic.d2_front(j);
            let vp = basic.point(true, 0, j).velocity();
            let vm = basic.point(false, 0, j).velocity();
            // [p'] row.
            m[(8, 0)] = 1.0;
            m[(8, 6)] = -1.0;
            // [v1'], [v2'] rows through the linear map u' -> v'.
            for c in 0..2 {
                let mut e = [0.0; 3];
                e[c] = 1.0;
                let (a, b) = (perturbation_velocity(&vp, &e), perturbation_velocity(&vm, &e));
                for r in 0..2 {
                    m[(9 + r, 1 + c)] = a[r];
                    m[(9 + r, 7 + c)] = -b[r];
                }
            }
            // [H_tau'] row.
            m[(11, 3)] = d2;
            m[(11, 4)] = 1.0;
            m[(11, 9)] = -d2;
            m[(11, 10)] = -1.0;
            let inv = m.try_inverse().ok_or_else(|| {
                Error::Precondition(format!("boundary system singular at node {j}"))
            })?;
            rows.push(node_rows);
            inverse.push(inv);
        }
        let rt_jump = (0..s.n2).map(|j| basic.rt_jump(j)).collect();
        let tangential_jump = (0..s.n2).map(|j| basic.tangential_field_jump(j)).collect();
        Ok(BoundaryClosure { rows, inverse, rt_jump, tangential_jump })
    }

    /// Overwrite the boundary values of `fields` so that the interface
    /// conditions hold with front perturbation `front` and data
    /// `g = (g1, g2, g3, g4)` (zero when `None`).
    pub fn apply(&self, basic: &BasicState, fields: &mut SideFields, front: &[f64], data: Option<&[[f64; 4]]>) {
        let s = basic.strip();
        for j in 0..s.n2 {
            let mut rhs = SMatrix::<f64, 12, 1>::zeros();
            for (side, plus) in [(0usize, true), (1, false)] {
                let f = fields.side(plus);
                let (u1, u2) = (f[s.idx(1, j)], f[s.idx(2, j)]);
                for r in 0..4 {
                    let l = &self.rows[j][side][r];
                    rhs[4 * side + r] = (0..6).map(|c| l[c] * (2.0 * u1[c] - u2[c])).sum();
                }
            }
            let g = data.map_or([0.0; 4], |d| d[j]);
            rhs[8] = g[0] - front[j] * self.rt_jump[j];
            rhs[9] = g[1];
            rhs[10] = g[2];
            rhs[11] = g[3] - front[j] * self.tangential_jump[j];
            let x = self.inverse[j] * rhs;
            let k = s.idx(0, j);
            for c in 0..6 {
                fields.plus[k][c] = x[c];
                fields.minus[k][c] = x[6 + c];
            }
        }
    }
}
