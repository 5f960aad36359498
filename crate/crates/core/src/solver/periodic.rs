//! Quasilinear symmetric system `A0 dt U + A1 d1 U + A2 d2 U = 0` on the
//! unit torus, full eight-component unknowns `(p, u, H, S)`.

use nalgebra::SVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::diagnostics::{DiagnosticsSeries, PeriodicRecord};
use super::{fourth_difference, Grid};
use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::kinematics::velocity_from_u;
use crate::symmetrizer::{coefficients, Mat8};

type Vec8 = SVector<f64, 8>;

/// Nodal unknowns on an `n1 x n2` periodic grid, row-major `(i1, i2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicInitial {
    pub n1: usize,
    pub n2: usize,
    pub fields: Vec<[f64; 8]>,
}

impl PeriodicInitial {
    pub fn from_fn(n1: usize, n2: usize, f: impl Fn(f64, f64) -> [f64; 8]) -> Self {
        let mut fields = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                fields.push(f(i as f64 / n1 as f64, j as f64 / n2 as f64));
            }
        }
        PeriodicInitial { n1, n2, fields }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PeriodicOptions {
    pub cfl: f64,
    pub dissipation: f64,
    pub final_time: f64,
    /// Take exactly this many steps of size `cfl * h` instead of reaching
    /// `final_time`.
    pub steps: Option<usize>,
    pub record_every: usize,
}

impl Default for PeriodicOptions {
    fn default() -> Self {
        PeriodicOptions { cfl: 0.25, dissipation: 0.01, final_time: 0.2, steps: None, record_every: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicRun {
    pub grid: Grid,
    pub series: DiagnosticsSeries<PeriodicRecord>,
    pub final_fields: Vec<[f64; 8]>,
}

impl PeriodicRun {
    pub fn sup_w(&self) -> f64 {
        self.series.records.iter().fold(0.0, |a, r| a.max(r.w_max))
    }
}

struct Torus {
    n1: usize,
    n2: usize,
    h1: f64,
    h2: f64,
}

impl Torus {
    fn idx(&self, i: usize, j: usize) -> usize {
        (i % self.n1) * self.n2 + (j % self.n2)
    }

    fn derivatives(&self, f: &[[f64; 8]], i: usize, j: usize) -> ([f64; 8], [f64; 8]) {
        let (ip, im) = (self.idx(i + 1, j), self.idx(i + self.n1 - 1, j));
        let (jp, jm) = (self.idx(i, j + 1), self.idx(i, j + self.n2 - 1));
        let d1 = std::array::from_fn(|c| (f[ip][c] - f[im][c]) / (2.0 * self.h1));
        let d2 = std::array::from_fn(|c| (f[jp][c] - f[jm][c]) / (2.0 * self.h2));
        (d1, d2)
    }
}

fn to_mat8(a: &[[f64; 8]; 8]) -> Mat8 {
    Mat8::from_fn(|r, c| a[r][c])
}

/// `dt U` at every node, or the first node where `A0` is not positive
/// definite.
fn rate(
    params: &ThermoParams,
    torus: &Torus,
    eps: f64,
    f: &[[f64; 8]],
) -> std::result::Result<Vec<[f64; 8]>, usize> {
    (0..f.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / torus.n2, k % torus.n2);
            let (d1, d2) = torus.derivatives(f, i, j);
            if d1.iter().chain(&d2).all(|&x| x == 0.0) && eps == 0.0 {
                return Ok([0.0; 8]);
            }
            let [a0, a1, a2, _] = coefficients(params, &f[k], false);
            let flux = to_mat8(&a1) * Vec8::from(d1) + to_mat8(&a2) * Vec8::from(d2);
            let chol = to_mat8(&a0).cholesky().ok_or(k)?;
            let mut r = -chol.solve(&flux);
            if eps != 0.0 {
                for c in 0..8 {
                    let at = |i: usize, j: usize| f[torus.idx(i, j)][c];
                    let (n1, n2) = (torus.n1, torus.n2);
                    let diss = fourth_difference(at(i + n1 - 2, j), at(i + n1 - 1, j), at(i, j), at(i + 1, j), at(i + 2, j))
                        / torus.h1
                        + fourth_difference(at(i, j + n2 - 2), at(i, j + n2 - 1), at(i, j), at(i, j + 1), at(i, j + 2))
                            / torus.h2;
                    r[c] -= eps * diss;
                }
            }
            Ok(std::array::from_fn(|c| r[c]))
        })
        .collect()
}

fn record(
    params: &ThermoParams,
    torus: &Torus,
    step: usize,
    t: f64,
    f: &[[f64; 8]],
    dt_f: &[[f64; 8]],
    reference: &[f64; 8],
) -> PeriodicRecord {
    let w = torus.h1 * torus.h2;
    let mut div_l2 = 0.0;
    let mut div_max: f64 = 0.0;
    let mut w_max: f64 = 0.0;
    let mut entropy = 0.0;
    let mut energy = 0.0;
    let mut min_p = f64::INFINITY;
    for i in 0..torus.n1 {
        for j in 0..torus.n2 {
            let k = torus.idx(i, j);
            let y = &f[k];
            let (d1, d2) = torus.derivatives(f, i, j);
            let div = d1[4] + d2[5];
            div_l2 += w * div * div;
            div_max = div_max.max(div.abs());
            w_max = w_max.max(y[3].abs()).max(y[6].abs());
            let v = velocity_from_u(&[y[1], y[2], y[3]]);
            let s = dt_f[k][7] + v[0] * d1[7] + v[1] * d2[7];
            entropy += w * s * s;
            let [a0, ..] = coefficients(params, y, false);
            let u = Vec8::from(std::array::from_fn(|c| y[c] - reference[c]));
            energy += w * u.dot(&(to_mat8(&a0) * u));
            min_p = min_p.min(y[0]);
        }
    }
    PeriodicRecord {
        step,
        t,
        div_h_l2: div_l2.sqrt(),
        div_h_max: div_max,
        w_max,
        entropy_residual: entropy.sqrt(),
        symmetric_energy: energy,
        min_pressure: min_p,
    }
}

/// Integrate with Heun's method. Aborts when the pressure drops below
/// `3 pbar / 4`, when `A0` loses definiteness, or on non-finite values.
pub fn run_nonlinear_periodic(
    params: &ThermoParams,
    init: &PeriodicInitial,
    opts: &PeriodicOptions,
) -> Result<PeriodicRun> {
    params.validate()?;
    let (n1, n2) = (init.n1, init.n2);
    if n1 < 5 || n2 < 5 || init.fields.len() != n1 * n2 {
        return Err(Error::Config(format!("periodic grid {n1}x{n2} with {} nodes", init.fields.len())));
    }
    if opts.record_every == 0 {
        return Err(Error::Config("record_every must be positive".into()));
    }
    let torus = Torus { n1, n2, h1: 1.0 / n1 as f64, h2: 1.0 / n2 as f64 };
    if !(opts.cfl > 0.0 && opts.cfl <= super::MAX_CFL) {
        return Err(Error::Cfl(format!("CFL number {} outside (0, {}]", opts.cfl, super::MAX_CFL)));
    }
    let dt_max = opts.cfl * torus.h1.min(torus.h2);
    let (dt, steps) = match opts.steps {
        Some(steps) => (dt_max, steps),
        None => {
            let steps = (opts.final_time / dt_max).ceil() as usize;
            (if steps == 0 { dt_max } else { opts.final_time / steps as f64 }, steps)
        }
    };
    let grid = Grid { l1: 1.0, n1, n2, h1: torus.h1, h2: torus.h2, dt, final_time: steps as f64 * dt, steps };
    let floor = 0.75 * params.pbar;
    let check = |step: usize, f: &[[f64; 8]]| -> Result<()> {
        if !f.iter().flatten().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { step, what: "periodic fields".into() });
        }
        if let Some((k, y)) = f.iter().enumerate().find(|(_, y)| y[0] < floor) {
            return Err(Error::HyperbolicityLost {
                step,
                detail: format!("pressure {:.6e} below 3*pbar/4 = {floor:.6e} at node {k}", y[0]),
            });
        }
        Ok(())
    };
    let lost = |step: usize, k: usize| Error::HyperbolicityLost {
        step,
        detail: format!("A0 not positive definite at node {k}"),
    };
    let mut f = init.fields.clone();
    check(0, &f)?;
    let n = f.len() as f64;
    let reference: [f64; 8] = std::array::from_fn(|c| f.iter().map(|y| y[c]).sum::<f64>() / n);
    let eps = opts.dissipation;
    let mut series = DiagnosticsSeries::default();
    for step in 0..=grid.steps {
        let t = step as f64 * dt;
        let k1 = rate(params, &torus, eps, &f).map_err(|k| lost(step, k))?;
        if step % opts.record_every == 0 || step == grid.steps {
            series.push(record(params, &torus, step, t, &f, &k1, &reference));
        }
        if step == grid.steps {
            break;
        }
        let mid: Vec<[f64; 8]> =
            f.iter().zip(&k1).map(|(y, r)| std::array::from_fn(|c| y[c] + dt * r[c])).collect();
        check(step + 1, &mid)?;
        let k2 = rate(params, &torus, eps, &mid).map_err(|k| lost(step + 1, k))?;
        f = f
            .iter()
            .zip(&mid)
            .zip(&k2)
            .map(|((y, m), r)| std::array::from_fn(|c| 0.5 * (y[c] + m[c] + dt * r[c])))
            .collect();
        check(step + 1, &f)?;
    }
    Ok(PeriodicRun { grid, series, final_fields: f })
}
