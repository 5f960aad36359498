//! Linearized boundary-value problem on `[0, L1] x T`, both sides of the
//! front, with the front perturbation `phi` evolved at `x1 = 0`.
//!
//! The unknown is split as `U' = U~ + V`: `U~` lifts the boundary data and
//! `V` satisfies homogeneous interface conditions. `V` is advanced with
//! centered differences, fourth-order dissipation and Heun's method; the
//! interface nodes are rebuilt after every stage by [`BoundaryClosure`].

use rayon::prelude::*;
use serde::Serialize;

use super::diagnostics::{DiagnosticRecord, DiagnosticsSeries};
use super::{fourth_difference, trapezoid_weight, Grid};
use crate::error::{Error, Result};
use crate::interface::normal_jump;
use crate::linearized::{
    g6_rate, grid_derivatives, jump_normal_field, lifted_source, periodic_d2, perturbation_velocity, BasicState, BoundaryClosure,
    Lifted, PerturbationFields, SideFields, Sources, Vec6,
};
use crate::symmetrizer::Mat6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearOptions {
    pub cfl: f64,
    /// Coefficient `eps` of the `-(eps / h) delta^4` dissipation.
    pub dissipation: f64,
    pub final_time: f64,
    /// Evolve the normal-field datum `g6` by its transport equation. When
    /// false, `g6 = 0` (the inconsistent lift used as a control).
    pub transport_normal_field: bool,
    /// Record diagnostics every this many steps (the last step always).
    pub record_every: usize,
}

impl Default for LinearOptions {
    fn default() -> Self {
        LinearOptions { cfl: 0.25, dissipation: 0.01, final_time: 1.0, transport_normal_field: true, record_every: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LinearRun {
    pub grid: Grid,
    pub series: DiagnosticsSeries<DiagnosticRecord>,
    /// Final `(U', phi)` including the lift.
    pub final_state: PerturbationFields,
    /// Final homogeneous part `V`.
    pub homogeneous: SideFields,
    pub g6: Vec<f64>,
}

impl LinearRun {
    /// `sup_t max_j |[H_N(V)]|`.
    pub fn sup_normal_field_jump(&self) -> f64 {
        self.series.records.iter().fold(0.0, |a, r| a.max(r.hn_jump_max))
    }
}

struct State {
    v: SideFields,
    front: Vec<f64>,
    g6: Vec<f64>,
}

struct Rates {
    v: SideFields,
    front: Vec<f64>,
    g6: Vec<f64>,
    lifted: Lifted,
}

struct Solver<'a> {
    basic: &'a BasicState,
    sources: &'a dyn Sources,
    closure: BoundaryClosure,
    opts: LinearOptions,
    /// `A1~` at the boundary nodes, per side.
    boundary_a1: [Vec<Mat6>; 2],
}

fn v6(a: &[f64; 6]) -> Vec6 {
    Vec6::from_column_slice(a)
}

fn arr(v: Vec6) -> [f64; 6] {
    [v[0], v[1], v[2], v[3], v[4], v[5]]
}

fn check_finite(step: usize, what: &str, xs: impl IntoIterator<Item = f64>) -> Result<()> {
    if xs.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite { step, what: what.to_string() })
    }
}

impl<'a> Solver<'a> {
    fn rates(&self, t: f64, st: &State) -> Rates {
        let basic = self.basic;
        let s = basic.strip();
        let (h1, h2) = (s.h1(basic.l1()), s.h2());
        let g6_dt = if self.opts.transport_normal_field {
            g6_rate(basic, &st.g6, t, self.sources)
        } else {
            vec![0.0; s.n2]
        };
        let lifted = lifted_source(basic, t, self.sources, &st.g6, &g6_dt);
        let eps = self.opts.dissipation;
        let mut v = SideFields::zeros(s.len());
        for plus in [true, false] {
            let f = st.v.side(plus);
            let src = lifted.source.side(plus);
            let coefs = basic.coefficients(plus);
            let out: Vec<[f64; 6]> = (0..s.len())
                .into_par_iter()
                .map(|k| {
                    let (i, j) = (k / s.n2, k % s.n2);
                    if i == 0 || i == s.n1 - 1 {
                        return [0.0; 6];
                    }
                    let at = |i: usize, j: usize| &f[s.idx(i, j)];
                    let (jp, jm) = ((j + 1) % s.n2, (j + s.n2 - 1) % s.n2);
                    let (jpp, jmm) = ((j + 2) % s.n2, (j + 2 * s.n2 - 2) % s.n2);
                    let d1 = [0, 1, 2, 3, 4, 5].map(|c| (at(i + 1, j)[c] - at(i - 1, j)[c]) / (2.0 * h1));
                    let d2 = [0, 1, 2, 3, 4, 5].map(|c| (at(i, jp)[c] - at(i, jm)[c]) / (2.0 * h2));
                    let c = &coefs[k];
                    let mut r = v6(&src[k]) - c.k1 * v6(&d1) - c.k2 * v6(&d2) - c.kc * v6(&f[k]);
                    if eps != 0.0 {
                        for q in 0..6 {
                            let mut diss = fourth_difference(
                                at(i, jmm)[q],
                                at(i, jm)[q],
                                at(i, j)[q],
                                at(i, jp)[q],
                                at(i, jpp)[q],
                            ) / h2;
                            if i >= 2 && i + 2 < s.n1 {
                                diss += fourth_difference(
                                    at(i - 2, j)[q],
                                    at(i - 1, j)[q],
                                    at(i, j)[q],
                                    at(i + 1, j)[q],
                                    at(i + 2, j)[q],
                                ) / h1;
                            }
                            r[q] -= eps * diss;
                        }
                    }
                    arr(r)
                })
                .collect();
            *v.side_mut(plus) = out;
        }
        let front = self.front_rate(st);
        Rates { v, front, g6: g6_dt, lifted }
    }

    /// `dt phi = v_N(V+) - v2 d2 phi + phi d1 v_N`.
    fn front_rate(&self, st: &State) -> Vec<f64> {
        let basic = self.basic;
        let s = basic.strip();
        (0..s.n2)
            .map(|j| {
                let pt = basic.point(true, 0, j);
                let v_hat = pt.velocity();
                let y = st.v.plus[s.idx(0, j)];
                let vd = perturbation_velocity(&v_hat, &[y[1], y[2], 0.0]);
                let d2 = basic.d2_front(j);
                vd[0] - vd[1] * d2 - v_hat[1] * periodic_d2(&st.front, j)
                    + st.front[j] * basic.d1_normal_velocity(j)
            })
            .collect()
    }

    fn close(&self, st: &mut State) {
        let s = self.basic.strip();
        for plus in [true, false] {
            let f = st.v.side_mut(plus);
            for j in 0..s.n2 {
                f[s.idx(s.n1 - 1, j)] = f[s.idx(s.n1 - 2, j)];
            }
        }
        self.closure.apply(self.basic, &mut st.v, &st.front, None);
    }

    fn record(&self, step: usize, t: f64, st: &State, rates: &Rates) -> Result<DiagnosticRecord> {
        let basic = self.basic;
        let s = basic.strip();
        let (h1, h2) = (s.h1(basic.l1()), s.h2());
        let lift = &rates.lifted;
        let mut u = st.v.clone();
        let mut u_t = rates.v.clone();
        for plus in [true, false] {
            for (a, b) in u.side_mut(plus).iter_mut().zip(lift.fields.side(plus)) {
                for c in 0..6 {
                    a[c] += b[c];
                }
            }
            for (a, b) in u_t.side_mut(plus).iter_mut().zip(lift.fields_dt.side(plus)) {
                for c in 0..6 {
                    a[c] += b[c];
                }
            }
        }
        check_finite(step, "U'", u.plus.iter().chain(&u.minus).flatten().copied())?;
        check_finite(step, "phi", st.front.iter().copied())?;

        let sq = |a: &[f64; 6]| a.iter().map(|x| x * x).sum::<f64>();
        let mut h1_energy = 0.0;
        let mut tan_energy = 0.0;
        let mut xi = [0.0; 2];
        let mut entropy = 0.0;
        for (side, plus) in [(0usize, true), (1, false)] {
            let f = u.side(plus);
            let ft = u_t.side(plus);
            let coefs = basic.coefficients(plus);
            let src = lift.source.side(plus);
            let lf = lift.fields.side(plus);
            let lft = lift.fields_dt.side(plus);
            // Row sums in parallel, reduced serially in row order so the
            // result does not depend on the thread count.
            let rows: Vec<[f64; 4]> = (0..s.n1)
                .into_par_iter()
                .map(|i| {
                    let w = trapezoid_weight(i, s.n1) * h1 * h2;
                    let sigma = (i as f64 * h1).min(1.0);
                    let mut acc = [0.0; 4];
                    for j in 0..s.n2 {
                        let k = s.idx(i, j);
                        let (d1, d2) = grid_derivatives(s, basic.l1(), f, i, j);
                        let base = sq(&f[k]) + sq(&ft[k]) + sq(&d2);
                        acc[0] += w * (base + sq(&d1));
                        acc[1] += w * (base + sigma * sigma * sq(&d1));
                        let pt = basic.point(plus, i, j);
                        // Straightened divergence of the field perturbation.
                        let at = |j: usize| f[s.idx(i, j)][4];
                        let d2h2 = (at((j + 1) % s.n2) - at((j + s.n2 - 1) % s.n2)) / (2.0 * h2);
                        let div = d1[3] - pt.psi_2 * d1[4] + pt.d1_phi * d2h2;
                        acc[2] += w * div * div;
                        if i > 0 && i < s.n1 - 1 {
                            // Entropy row of the equation for U' = V + U~; the
                            // lifted source carries f - L'_e U~ already.
                            let c = &coefs[k];
                            let (l1, l2) = grid_derivatives(s, basic.l1(), lf, i, j);
                            let lifted_part =
                                v6(&lft[k]) + c.k1 * v6(&l1) + c.k2 * v6(&l2) + c.kc * v6(&lf[k]);
                            let r = v6(&ft[k]) + c.k1 * v6(&d1) + c.k2 * v6(&d2) + c.kc * v6(&f[k])
                                - v6(&src[k])
                                - lifted_part;
                            acc[3] += w * r[5] * r[5];
                        }
                    }
                    acc
                })
                .collect();
            for acc in rows {
                h1_energy += acc[0];
                tan_energy += acc[1];
                xi[side] += acc[2];
                entropy += acc[3];
            }
        }

        let hn = jump_normal_field(basic, &st.v);
        let hn_jump_l2 = (hn.iter().map(|x| x * x).sum::<f64>() * h2).sqrt();
        let hn_jump_max = hn.iter().fold(0.0_f64, |a, x| a.max(x.abs()));

        let mut front_energy = 0.0;
        let mut rt_term = 0.0;
        let mut boundary_flux = 0.0;
        let mut prop2 = 0.0;
        for j in 0..s.n2 {
            let phi = st.front[j];
            let d2phi = periodic_d2(&st.front, j);
            front_energy += h2 * (phi * phi + rates.front[j] * rates.front[j] + d2phi * d2phi);
            rt_term += h2 * basic.rt_jump(j) * phi * phi;
            let k = s.idx(0, j);
            let (up, um) = (v6(&u.plus[k]), v6(&u.minus[k]));
            boundary_flux +=
                -0.5 * h2 * (up.dot(&(self.boundary_a1[0][j] * up)) + um.dot(&(self.boundary_a1[1][j] * um)));
            let d2 = basic.d2_front(j);
            let (dp, _) = grid_derivatives(s, basic.l1(), &u.plus, 0, j);
            let (dm, _) = grid_derivatives(s, basic.l1(), &u.minus, 0, j);
            let v_hat = basic.point(true, 0, j).velocity();
            let jump_u = [normal_jump(dp[1], dm[1]), normal_jump(dp[2], dm[2])];
            let jump_un = jump_u[0] - jump_u[1] * d2;
            let v_n = v_hat[0] - v_hat[1] * d2;
            let r = jump_un - v_n * (v_hat[0] * jump_u[0] + v_hat[1] * jump_u[1]);
            prop2 += h2 * r * r;
        }
        let rec = DiagnosticRecord {
            step,
            t,
            i_total: h1_energy + front_energy,
            tan_energy,
            h1_energy,
            hn_jump_l2,
            hn_jump_max,
            xi_plus: xi[0].sqrt(),
            xi_minus: xi[1].sqrt(),
            entropy_residual: entropy.sqrt(),
            prop2_residual: prop2.sqrt(),
            rt_term,
            boundary_flux,
        };
        let vals = [
            rec.i_total,
            rec.tan_energy,
            rec.hn_jump_l2,
            rec.xi_plus,
            rec.xi_minus,
            rec.entropy_residual,
            rec.prop2_residual,
            rec.rt_term,
            rec.boundary_flux,
        ];
        check_finite(step, "diagnostics", vals)?;
        Ok(rec)
    }
}

/// Integrate the linearized problem from zero data to `opts.final_time`.
pub fn run_linearized(basic: &BasicState, sources: &dyn Sources, opts: &LinearOptions) -> Result<LinearRun> {
    let s = basic.strip();
    if s.n1 < 5 || s.n2 < 5 {
        return Err(Error::Config(format!("grid {}x{} too small (need at least 5x5)", s.n1, s.n2)));
    }
    if opts.record_every == 0 {
        return Err(Error::Config("record_every must be positive".into()));
    }
    let (s1, s2) = basic.speed_bounds();
    let grid = Grid::new(basic.l1(), s.n1, s.n2, opts.final_time, opts.cfl, s1.max(s2))?;
    let closure = BoundaryClosure::new(basic)?;
    let boundary_a1 = [true, false].map(|plus| {
        (0..s.n2).map(|j| basic.point(plus, 0, j).matrices(&basic.params).1).collect::<Vec<_>>()
    });
    let solver = Solver { basic, sources, closure, opts: *opts, boundary_a1 };

    let mut st = State { v: SideFields::zeros(s.len()), front: vec![0.0; s.n2], g6: vec![0.0; s.n2] };
    let mut series = DiagnosticsSeries::default();
    let dt = grid.dt;
    let mut last_lift = None;
    for n in 0..=grid.steps {
        let t = n as f64 * dt;
        let k1 = solver.rates(t, &st);
        if n % opts.record_every == 0 || n == grid.steps {
            series.push(solver.record(n, t, &st, &k1)?);
        }
        if n == grid.steps {
            last_lift = Some(k1.lifted);
            break;
        }
        let axpy = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x + w * y).collect() };
        let side_axpy = |a: &SideFields, b: &SideFields| {
            let f = |x: &Vec<[f64; 6]>, y: &Vec<[f64; 6]>| {
                x.iter().zip(y).map(|(p, q)| [0, 1, 2, 3, 4, 5].map(|c| p[c] + dt * q[c])).collect()
            };
            SideFields { plus: f(&a.plus, &b.plus), minus: f(&a.minus, &b.minus) }
        };
        let mut mid = State {
            v: side_axpy(&st.v, &k1.v),
            front: axpy(&st.front, &k1.front, dt),
            g6: axpy(&st.g6, &k1.g6, dt),
        };
        solver.close(&mut mid);
        let k2 = solver.rates(t + dt, &mid);
        let end = side_axpy(&mid.v, &k2.v);
        let avg = |x: &Vec<[f64; 6]>, y: &Vec<[f64; 6]>| -> Vec<[f64; 6]> {
            x.iter().zip(y).map(|(p, q)| [0, 1, 2, 3, 4, 5].map(|c| 0.5 * (p[c] + q[c]))).collect()
        };
        let mean = |x: &[f64], y: &[f64], z: &[f64]| -> Vec<f64> {
            x.iter().zip(y).zip(z).map(|((a, b), c)| 0.5 * (a + b + dt * c)).collect()
        };
        st = State {
            v: SideFields { plus: avg(&st.v.plus, &end.plus), minus: avg(&st.v.minus, &end.minus) },
            front: mean(&st.front, &mid.front, &k2.front),
            g6: mean(&st.g6, &mid.g6, &k2.g6),
        };
        solver.close(&mut st);
        check_finite(n + 1, "V", st.v.plus.iter().chain(&st.v.minus).flatten().copied())?;
    }
    let lift = last_lift.expect("loop ends on the last step");
    let mut full = st.v.clone();
    for plus in [true, false] {
        for (a, b) in full.side_mut(plus).iter_mut().zip(lift.fields.side(plus)) {
            for c in 0..6 {
                a[c] += b[c];
            }
        }
    }
    Ok(LinearRun {
        grid,
        series,
        final_state: PerturbationFields { fields: full, front: st.front },
        homogeneous: st.v,
        g6: st.g6,
    })
}
