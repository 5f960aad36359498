//! Seeded samplers for property checks and constructive jump-condition
//! solvers producing exact contact, shock and Alfvén data.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::jumps::{conservative_residuals, mass_flux, rh_residuals, FrontGeometry};
use crate::kinematics::{full_kinematics, PrimitiveState};
use crate::linalg::levenberg_marquardt;

/// A planar contact point: traces on both sides of the front
/// `x1 = phi` with slope `d2phi` and speed `dtphi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ContactSample {
    pub minus: PrimitiveState,
    pub plus: PrimitiveState,
    pub d2phi: f64,
    pub dtphi: f64,
}

impl ContactSample {
    pub fn geometry(&self) -> FrontGeometry {
        FrontGeometry::from_front(self.dtphi, self.d2phi, 0.0)
    }
}

/// Admissible-state sampler on a counter-based seeded stream.
pub struct Sampler {
    rng: ChaCha8Rng,
    params: ThermoParams,
}

impl Sampler {
    pub fn new(seed: u64, params: ThermoParams) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), params }
    }

    pub fn params(&self) -> &ThermoParams {
        &self.params
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.gen_range(lo..hi)
    }

    fn pressure(&mut self) -> f64 {
        let pbar = self.params.pbar;
        pbar * (1.0 + 1e-3) + self.rng.gen_range(0.0..3.0)
    }

    fn velocity(&mut self, dim: usize) -> [f64; 3] {
        let vmax = 1.0 - self.params.nu - 1e-3;
        loop {
            let mut v = [0.0; 3];
            for c in v.iter_mut().take(dim) {
                *c = self.rng.gen_range(-vmax..vmax);
            }
            if v.iter().map(|x| x * x).sum::<f64>().sqrt() < vmax {
                return v;
            }
        }
    }

    fn field(&mut self, dim: usize) -> [f64; 3] {
        let mut h = [0.0; 3];
        for c in h.iter_mut().take(dim) {
            *c = self.rng.gen_range(-2.0..2.0);
        }
        h
    }

    /// Admissible 3-D state: `p >= pbar`, `1 - |v| > nu`.
    pub fn state(&mut self) -> PrimitiveState {
        let p = self.pressure();
        let v = self.velocity(3);
        let h = self.field(3);
        let s = self.rng.gen_range(-1.0..1.0);
        PrimitiveState::new(p, v, h, s)
    }

    pub fn planar_state(&mut self) -> PrimitiveState {
        let p = self.pressure();
        let v = self.velocity(2);
        let h = self.field(2);
        let s = self.rng.gen_range(-1.0..1.0);
        PrimitiveState::new(p, v, h, s)
    }

    /// Arbitrary state with `p < 0`.
    pub fn negative_pressure_state(&mut self) -> PrimitiveState {
        let mut s = self.state();
        s.pressure = -self.rng.gen_range(1e-3..2.0);
        s
    }

    fn slope_and_field(&mut self) -> (f64, PrimitiveState) {
        let d2 = self.rng.gen_range(-1.0..1.0);
        loop {
            let s = self.planar_state();
            if (s.magnetic[0] - s.magnetic[1] * d2).abs() >= self.params.kappa {
                return (d2, s);
            }
        }
    }

    fn entropy_jump(&mut self) -> f64 {
        let d = self.rng.gen_range(0.1..1.0);
        if self.rng.gen_bool(0.5) {
            d
        } else {
            -d
        }
    }

    /// Contact data built directly: continuous `p, v, H`, jumping entropy,
    /// front moving with the fluid, `|H_N| >= kappa`.
    pub fn contact(&mut self) -> ContactSample {
        let (d2phi, plus) = self.slope_and_field();
        let minus = PrimitiveState { entropy: plus.entropy + self.entropy_jump(), ..plus };
        let dtphi = plus.velocity[0] - plus.velocity[1] * d2phi;
        ContactSample { minus, plus, d2phi, dtphi }
    }

    /// Contact data found by solving the jump conditions for the plus
    /// state, with the minus state, front and entropy jump fixed.
    pub fn solved_contact(&mut self) -> Result<ContactSample> {
        let (d2phi, minus) = self.slope_and_field();
        let dtphi = minus.velocity[0] - minus.velocity[1] * d2phi;
        let entropy = minus.entropy + self.entropy_jump();
        let guess = [0, 1, 2, 3, 4].map(|_| self.rng.gen_range(-0.02..0.02));
        let plus = solve_contact_plus(&self.params, &minus, d2phi, dtphi, entropy, guess)?;
        Ok(ContactSample { minus, plus, d2phi, dtphi })
    }
}

/// Solve the jump conditions with zero mass flux for the plus state
/// `(p, v1, v2, H1, H2)`, starting from the minus state offset by `offset`.
pub fn solve_contact_plus(
    params: &ThermoParams,
    minus: &PrimitiveState,
    d2phi: f64,
    dtphi: f64,
    entropy: f64,
    offset: [f64; 5],
) -> Result<PrimitiveState> {
    let geom = FrontGeometry::from_front(dtphi, d2phi, 0.0);
    let build = |x: &[f64]| PrimitiveState::planar(x[0], [x[1], x[2]], [x[3], x[4]], entropy);
    let res = |x: &[f64]| -> Option<Vec<f64>> {
        let plus = build(x);
        let r = rh_residuals(params, minus, &plus, &geom).ok()?;
        let j = mass_flux(params, &plus, &geom).ok()?;
        let mut out = r.to_vec().to_vec();
        out.push(j);
        Some(out)
    };
    let x0 = [
        minus.pressure + offset[0],
        minus.velocity[0] + offset[1],
        minus.velocity[1] + offset[2],
        minus.magnetic[0] + offset[3],
        minus.magnetic[1] + offset[4],
    ];
    let sol = levenberg_marquardt(res, &x0, 1e-14, 100);
    if !sol.converged {
        return Err(Error::Audit(format!(
            "contact solver did not converge (residual {:.3e})",
            sol.residual
        )));
    }
    Ok(build(&sol.x))
}

/// A shock across the flat front `x1 = const` from `minus` to the pressure
/// `pressure_ratio * p-`, found by continuation in the pressure ratio.
/// Returns the plus state and the shock speed.
pub fn solve_shock(
    params: &ThermoParams,
    minus: &PrimitiveState,
    pressure_ratio: f64,
) -> Result<(PrimitiveState, f64)> {
    if !minus.is_planar() {
        return Err(Error::Precondition("shock constructor expects planar data".into()));
    }
    // Start just above the fast magnetosonic speed of the minus state.
    let fast = crate::characteristics::char_spectrum_3d(params, minus, [1.0, 0.0, 0.0])?;
    let mut x = vec![
        minus.velocity[0],
        minus.velocity[1],
        minus.magnetic[0],
        minus.magnetic[1],
        minus.entropy,
        fast[7].min(0.99),
    ];
    let steps = 20;
    for i in 1..=steps {
        let ratio = 1.0 + (pressure_ratio - 1.0) * i as f64 / steps as f64;
        let p = minus.pressure * ratio;
        let res = |y: &[f64]| -> Option<Vec<f64>> {
            let plus = PrimitiveState::planar(p, [y[0], y[1]], [y[2], y[3]], y[4]);
            let geom = FrontGeometry::from_front(y[5], 0.0, 0.0);
            let c = conservative_residuals(params, minus, &plus, &geom).ok()?;
            Some(vec![c[0], c[1], c[2], c[4], c[6], y[2] - minus.magnetic[0]])
        };
        let sol = levenberg_marquardt(res, &x, 1e-13, 200);
        if !sol.converged {
            return Err(Error::Audit(format!(
                "shock solver stalled at pressure ratio {ratio:.3} (residual {:.3e})",
                sol.residual
            )));
        }
        x = sol.x;
    }
    let plus = PrimitiveState::planar(minus.pressure * pressure_ratio, [x[0], x[1]], [x[2], x[3]], x[4]);
    Ok((plus, x[5]))
}

/// Exact rotational (Alfvén) discontinuity across the flat front at rest:
/// with `H = Gamma sqrt(rho h) v`, reversing the tangential velocity and
/// field satisfies every jump condition with nonzero mass flux.
pub fn alfven_pair(
    params: &ThermoParams,
    pressure: f64,
    v_normal: f64,
    v_tangential: f64,
    entropy: f64,
) -> Result<(PrimitiveState, PrimitiveState)> {
    let probe = PrimitiveState::planar(pressure, [v_normal, v_tangential], [0.0, 0.0], entropy);
    let k = full_kinematics(params, &probe)?;
    let a = k.lorentz * (k.rho * k.enthalpy).sqrt();
    let minus = PrimitiveState::planar(
        pressure,
        [v_normal, v_tangential],
        [a * v_normal, a * v_tangential],
        entropy,
    );
    let plus = PrimitiveState::planar(
        pressure,
        [v_normal, -v_tangential],
        [a * v_normal, -a * v_tangential],
        entropy,
    );
    Ok((minus, plus))
}
