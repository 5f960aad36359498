//! Jump conditions across a front, discontinuity classification and the
//! contact-discontinuity reduction chain.
//!
//! Brackets are `[g] = g(plus) - g(minus)`; the unit normal points from the
//! minus side into the plus side.

use serde::Serialize;

use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::kinematics::{dot, full_kinematics, Kinematics, PrimitiveState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrontGeometry {
    /// Unit normal.
    pub normal: [f64; 3],
    /// Tangent vectors (not normalized).
    pub tangents: [[f64; 3]; 2],
    /// Normal speed of the front.
    pub sigma: f64,
    /// `sqrt(1 + |grad' phi|^2)`.
    pub norm: f64,
}

impl FrontGeometry {
    /// Geometry of the front `x1 = phi(t, x2, x3)` from its derivatives.
    pub fn from_front(dtphi: f64, d2phi: f64, d3phi: f64) -> Self {
        let norm = (1.0 + d2phi * d2phi + d3phi * d3phi).sqrt();
        FrontGeometry {
            normal: [1.0 / norm, -d2phi / norm, -d3phi / norm],
            tangents: [[d2phi, 1.0, 0.0], [d3phi, 0.0, 1.0]],
            sigma: dtphi / norm,
            norm,
        }
    }

    /// Geometry from an explicit frame. `normal` must be a unit vector
    /// orthogonal to both tangents.
    pub fn from_frame(normal: [f64; 3], tangents: [[f64; 3]; 2], sigma: f64) -> Result<Self> {
        let nn = dot(&normal, &normal).sqrt();
        if (nn - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("|n| = {nn} is not 1")));
        }
        for t in &tangents {
            if dot(&normal, t).abs() > 1e-12 {
                return Err(Error::Precondition("tangent not orthogonal to normal".into()));
            }
        }
        Ok(FrontGeometry { normal, tangents, sigma, norm: 1.0 })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JumpResiduals {
    /// Mass-flux jump.
    pub mass: f64,
    pub normal_momentum: f64,
    pub tangential_momentum: [f64; 2],
    /// Jump of the normal field.
    pub normal_field: f64,
    pub tangential_induction: [f64; 2],
    pub energy: f64,
}

impl JumpResiduals {
    pub fn to_vec(&self) -> [f64; 8] {
        [
            self.mass,
            self.normal_momentum,
            self.tangential_momentum[0],
            self.tangential_momentum[1],
            self.normal_field,
            self.tangential_induction[0],
            self.tangential_induction[1],
            self.energy,
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_vec().iter().fold(0.0, |a, r| a.max(r.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.to_vec().iter().map(|r| r * r).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DiscontinuityClass {
    Contact,
    Shock,
    CurrentVortexSheet,
    Alfven,
    NotADiscontinuity,
}

impl std::fmt::Display for DiscontinuityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            DiscontinuityClass::Contact => "Contact",
            DiscontinuityClass::Shock => "Shock",
            DiscontinuityClass::CurrentVortexSheet => "CurrentVortexSheet",
            DiscontinuityClass::Alfven => "Alfven",
            DiscontinuityClass::NotADiscontinuity => "NotADiscontinuity",
        };
        f.write_str(s)
    }
}

/// Per-side quantities entering the jump conditions.
struct Side {
    k: Kinematics,
    v: [f64; 3],
    h: [f64; 3],
    p: f64,
    v_n: f64,
    h_n: f64,
    v_t: [f64; 2],
    h_t: [f64; 2],
    vh: f64,
    h2: f64,
}

fn side(params: &ThermoParams, s: &PrimitiveState, g: &FrontGeometry) -> Result<Side> {
    let k = full_kinematics(params, s)?;
    let v = s.velocity;
    let h = s.magnetic;
    Ok(Side {
        k,
        v,
        h,
        p: s.pressure,
        v_n: dot(&v, &g.normal),
        h_n: dot(&h, &g.normal),
        v_t: [dot(&v, &g.tangents[0]), dot(&v, &g.tangents[1])],
        h_t: [dot(&h, &g.tangents[0]), dot(&h, &g.tangents[1])],
        vh: dot(&v, &h),
        h2: dot(&h, &h),
    })
}

/// `rho Gamma (v.n - sigma)`.
pub fn mass_flux(params: &ThermoParams, state: &PrimitiveState, geom: &FrontGeometry) -> Result<f64> {
    let k = full_kinematics(params, state)?;
    Ok(k.rho * k.lorentz * (dot(&state.velocity, &geom.normal) - geom.sigma))
}

fn mass_flux_of(s: &Side, sigma: f64) -> f64 {
    s.k.rho * s.k.lorentz * (s.v_n - sigma)
}

/// Jump-condition residuals in the projected form.
///
/// The mass flux and the normal field entering as common factors are the
/// averages of the two sides; their own jumps are reported separately.
pub fn rh_residuals(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
) -> Result<JumpResiduals> {
    residuals_with_sign(params, minus, plus, geom, -1.0)
}

/// The same projections with the opposite sign on the `(v.H) H / (rho Gamma)`
/// momentum term and on the `q / (rho Gamma)` and `H_n [v.H]` energy terms.
/// This variant only agrees with the conservation laws when the mass flux
/// vanishes; it is kept to quantify that difference.
pub fn rh_residuals_uncorrected(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
) -> Result<JumpResiduals> {
    residuals_with_sign(params, minus, plus, geom, 1.0)
}

fn residuals_with_sign(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
    sign: f64,
) -> Result<JumpResiduals> {
    let a = side(params, minus, geom)?;
    let b = side(params, plus, geom)?;
    let jm = mass_flux_of(&a, geom.sigma);
    let jp = mass_flux_of(&b, geom.sigma);
    let j = 0.5 * (jm + jp);
    let hn = 0.5 * (a.h_n + b.h_n);
    let jump = |f: &dyn Fn(&Side) -> f64| f(&b) - f(&a);

    let coef = |s: &Side| s.k.enthalpy * s.k.lorentz + s.h2 / (s.k.rho * s.k.lorentz);
    let rg = |s: &Side| s.k.rho * s.k.lorentz;
    let g2 = |s: &Side| s.k.lorentz * s.k.lorentz;

    let normal_momentum = j * jump(&|s| coef(s) * s.v_n + sign * s.vh * s.h_n / rg(s))
        - hn * jump(&|s| s.h_n / g2(s) + s.vh * s.v_n)
        + jump(&|s| s.k.q);
    let tangential_momentum = [0, 1].map(|i| {
        j * jump(&|s| coef(s) * s.v_t[i] + sign * s.vh * s.h_t[i] / rg(s))
            - hn * jump(&|s| s.h_t[i] / g2(s) + s.vh * s.v_t[i])
    });
    let tangential_induction =
        [0, 1].map(|i| j * jump(&|s| s.h_t[i] / rg(s)) - hn * jump(&|s| s.v_t[i]));
    let energy = j * jump(&|s| s.k.enthalpy * s.k.lorentz + s.h2 / rg(s) + sign * s.k.q / rg(s))
        + sign * hn * jump(&|s| s.vh)
        + jump(&|s| s.v_n * s.k.q);
    Ok(JumpResiduals {
        mass: jp - jm,
        normal_momentum,
        tangential_momentum,
        normal_field: b.h_n - a.h_n,
        tangential_induction,
        energy,
    })
}

/// Conserved densities `(rho Gamma, momentum, energy, H)`.
pub fn conserved(params: &ThermoParams, s: &PrimitiveState) -> Result<[f64; 8]> {
    let k = full_kinematics(params, s)?;
    let (v, h) = (s.velocity, s.magnetic);
    let vh = dot(&v, &h);
    let h2 = dot(&h, &h);
    let rho_h = k.rho * k.enthalpy;
    let m = [0, 1, 2].map(|i| rho_h * k.lorentz * k.u[i] + h2 * v[i] - vh * h[i]);
    Ok([
        k.rho * k.lorentz,
        m[0],
        m[1],
        m[2],
        rho_h * k.lorentz * k.lorentz + h2 - k.q,
        h[0],
        h[1],
        h[2],
    ])
}

/// Normal fluxes matching [`conserved`].
pub fn normal_flux(params: &ThermoParams, s: &PrimitiveState, n: &[f64; 3]) -> Result<[f64; 8]> {
    let k = full_kinematics(params, s)?;
    let (v, h) = (s.velocity, s.magnetic);
    let vh = dot(&v, &h);
    let h2 = dot(&h, &h);
    let rho_h = k.rho * k.enthalpy;
    let un = dot(&k.u, n);
    let vn = dot(&v, n);
    let hn = dot(&h, n);
    let bn = dot(&k.b, n);
    let mom = [0, 1, 2].map(|i| (rho_h + k.b_sq) * un * k.u[i] - bn * k.b[i] + k.q * n[i]);
    let ind = [0, 1, 2].map(|i| vn * h[i] - hn * v[i]);
    Ok([
        k.rho * un,
        mom[0],
        mom[1],
        mom[2],
        rho_h * k.lorentz * un + h2 * vn - vh * hn,
        ind[0],
        ind[1],
        ind[2],
    ])
}

/// `[F.n] - sigma [Q]` straight from the conservation laws.
pub fn conservative_residuals(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
) -> Result<[f64; 8]> {
    let (qa, qb) = (conserved(params, minus)?, conserved(params, plus)?);
    let (fa, fb) = (normal_flux(params, minus, &geom.normal)?, normal_flux(params, plus, &geom.normal)?);
    Ok([0, 1, 2, 3, 4, 5, 6, 7].map(|i| (fb[i] - fa[i]) - geom.sigma * (qb[i] - qa[i])))
}

fn scale_of(minus: &PrimitiveState, plus: &PrimitiveState) -> f64 {
    let mut m: f64 = 1.0;
    for s in [minus, plus] {
        m = m.max(s.pressure.abs()).max(s.entropy.abs());
        for i in 0..3 {
            m = m.max(s.magnetic[i].abs());
        }
    }
    m
}

/// Classify the pair; residuals and thresholds are scaled by
/// `max(1, |state entries|)`.
pub fn classify(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
    tol: f64,
) -> Result<DiscontinuityClass> {
    let scale = scale_of(minus, plus);
    let thr = tol * scale;
    let r = rh_residuals(params, minus, plus, geom)?;
    if r.max_abs() > thr {
        return Ok(DiscontinuityClass::NotADiscontinuity);
    }
    let same = (plus.pressure - minus.pressure).abs() <= thr
        && (plus.entropy - minus.entropy).abs() <= thr
        && (0..3).all(|i| {
            (plus.velocity[i] - minus.velocity[i]).abs() <= thr
                && (plus.magnetic[i] - minus.magnetic[i]).abs() <= thr
        });
    if same {
        return Ok(DiscontinuityClass::NotADiscontinuity);
    }
    let j = 0.5 * (mass_flux(params, minus, geom)? + mass_flux(params, plus, geom)?);
    let hn = 0.5 * (dot(&minus.magnetic, &geom.normal) + dot(&plus.magnetic, &geom.normal));
    Ok(if j.abs() <= thr {
        if hn.abs() <= thr {
            DiscontinuityClass::CurrentVortexSheet
        } else {
            DiscontinuityClass::Contact
        }
    } else {
        let km = full_kinematics(params, minus)?;
        let kp = full_kinematics(params, plus)?;
        if (kp.rho - km.rho).abs() <= thr {
            DiscontinuityClass::Alfven
        } else {
            DiscontinuityClass::Shock
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionStep {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductionReport {
    pub steps: Vec<ReductionStep>,
    /// Residuals of the final contact conditions: `[p]`, `|[v]|`, `|[H]|`,
    /// `sigma - v_n`.
    pub contact_residuals: [f64; 4],
    pub satisfies_contact_conditions: bool,
}

fn norm3(a: [f64; 3]) -> f64 {
    dot(&a, &a).sqrt()
}

/// Walk the chain zero mass flux → `[v_n] = 0` → `[v_tau] = 0` →
/// `(1 - sigma^2)[H_tau] = 0` → `[H] = 0` → `[p] = 0`, reporting each step.
pub fn contact_reduction_check(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    geom: &FrontGeometry,
    tol: f64,
) -> Result<ReductionReport> {
    if geom.sigma.abs() >= 1.0 {
        return Err(Error::Causality(format!(
            "front speed |sigma| = {} is not below the speed of light",
            geom.sigma.abs()
        )));
    }
    let a = side(params, minus, geom)?;
    let b = side(params, plus, geom)?;
    let j = 0.5 * (mass_flux_of(&a, geom.sigma) + mass_flux_of(&b, geom.sigma));
    let hn = 0.5 * (a.h_n + b.h_n);
    if j.abs() > tol {
        return Err(Error::Precondition(format!("mass flux {j:.3e} is not zero")));
    }
    if hn.abs() <= tol {
        return Err(Error::Precondition("normal field vanishes; not a contact".into()));
    }
    let r = rh_residuals(params, minus, plus, geom)?;
    let dv = [0, 1, 2].map(|i| b.v[i] - a.v[i]);
    let dh = [0, 1, 2].map(|i| b.h[i] - a.h[i]);
    let jump_vt = (b.v_t[0] - a.v_t[0]).abs().max((b.v_t[1] - a.v_t[1]).abs());
    let jump_ht = (b.h_t[0] - a.h_t[0]).abs().max((b.h_t[1] - a.h_t[1]).abs());
    let raw = [
        ("[v_n] = 0 (zero mass flux)", (b.v_n - a.v_n).abs()),
        ("[v_tau] = 0 (tangential induction)", jump_vt),
        ("(1 - sigma^2)[H_tau] = 0 (tangential momentum)", (1.0 - geom.sigma * geom.sigma) * jump_ht),
        ("[H] = 0 (with [H_n] = 0)", norm3(dh)),
        ("[p] = 0 (normal momentum)", (b.p - a.p).abs()),
        ("energy condition", r.energy.abs()),
    ];
    let steps: Vec<ReductionStep> = raw
        .iter()
        .map(|&(name, residual)| ReductionStep { name, residual, passed: residual <= tol })
        .collect();
    let contact_residuals = [b.p - a.p, norm3(dv), norm3(dh), geom.sigma - b.v_n];
    let satisfies = steps.iter().all(|s| s.passed)
        && contact_residuals.iter().all(|r| r.abs() <= tol);
    Ok(ReductionReport { steps, contact_residuals, satisfies_contact_conditions: satisfies })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> ThermoParams {
        ThermoParams::default()
    }

    #[test]
    fn mass_flux_examples() {
        let g = FrontGeometry::from_front(0.0, 0.0, 0.0);
        let s = PrimitiveState::new(1.0, [0.6, 0.0, 0.0], [0.0; 3], 0.0);
        assert!((mass_flux(&p(), &s, &g).unwrap() - 0.75).abs() < 1e-14);
        let co = FrontGeometry::from_front(0.6, 0.0, 0.0);
        assert_eq!(mass_flux(&p(), &s, &co).unwrap(), 0.0);
    }

    #[test]
    fn identical_states_have_zero_residuals() {
        let s = PrimitiveState::new(0.7, [0.3, 0.1, 0.0], [1.0, 0.2, 0.0], 0.2);
        let g = FrontGeometry::from_front(0.3, 0.0, 0.0);
        assert_eq!(rh_residuals(&p(), &s, &s, &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn contact_data_and_pressure_perturbation() {
        let minus = PrimitiveState::planar(1.0, [0.2, 0.1], [1.0, 0.5], -0.3);
        let plus = PrimitiveState { entropy: 0.4, ..minus };
        let d2 = 0.2;
        let g = FrontGeometry::from_front(0.2 - 0.1 * d2, d2, 0.0);
        assert!(rh_residuals(&p(), &minus, &plus, &g).unwrap().max_abs() < 1e-12);
        let delta = 1e-3;
        let bumped = PrimitiveState { pressure: plus.pressure + delta, ..plus };
        let r = rh_residuals(&p(), &minus, &bumped, &g).unwrap();
        assert!((r.normal_momentum - delta).abs() < 1e-6);
    }

    #[test]
    fn sigma_bounded_by_front_speed() {
        for (dt, d2) in [(0.5, 0.0), (0.5, 0.7), (-0.3, 2.0)] {
            let g = FrontGeometry::from_front(dt, d2, 0.0);
            assert!(g.sigma * g.sigma <= dt * dt);
            assert_eq!(g.sigma * g.sigma == dt * dt, d2 == 0.0);
        }
    }
}
