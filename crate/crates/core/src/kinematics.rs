//! Primitive states and special-relativistic kinematics (units with `c = 1`).

use serde::{Deserialize, Serialize};

use crate::eos::{self, ThermoParams};
use crate::error::{Error, Result};

/// Indices of the planar unknowns `(p, u1, u2, H1, H2, S)` inside the full
/// ordering `(p, u1, u2, u3, H1, H2, H3, S)`.
pub const PLANAR: [usize; 6] = [0, 1, 2, 4, 5, 7];

/// Fluid state in primitive form. Velocity is the 3-velocity `v`, `|v| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimitiveState {
    pub pressure: f64,
    pub velocity: [f64; 3],
    pub magnetic: [f64; 3],
    pub entropy: f64,
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm_sq(a: &[f64; 3]) -> f64 {
    dot(a, a)
}

impl PrimitiveState {
    pub fn new(pressure: f64, velocity: [f64; 3], magnetic: [f64; 3], entropy: f64) -> Self {
        PrimitiveState { pressure, velocity, magnetic, entropy }
    }

    /// Planar state: third velocity and field components pinned to zero.
    pub fn planar(pressure: f64, v: [f64; 2], h: [f64; 2], entropy: f64) -> Self {
        Self::new(pressure, [v[0], v[1], 0.0], [h[0], h[1], 0.0], entropy)
    }

    pub fn is_planar(&self) -> bool {
        self.velocity[2] == 0.0 && self.magnetic[2] == 0.0
    }

    pub fn speed(&self) -> f64 {
        norm_sq(&self.velocity).sqrt()
    }

    /// Full unknown vector `(p, u, H, S)`.
    pub fn to_unknowns(&self) -> Result<[f64; 8]> {
        let (_, u) = lorentz_extend(&self.velocity)?;
        let h = self.magnetic;
        Ok([self.pressure, u[0], u[1], u[2], h[0], h[1], h[2], self.entropy])
    }

    pub fn from_unknowns(y: &[f64; 8]) -> Self {
        let v = velocity_from_u(&[y[1], y[2], y[3]]);
        Self::new(y[0], v, [y[4], y[5], y[6]], y[7])
    }

    /// Planar unknowns `(p, u1, u2, H1, H2, S)`.
    pub fn to_planar_unknowns(&self) -> Result<[f64; 6]> {
        if !self.is_planar() {
            return Err(Error::Precondition("state is not planar (v3 or H3 nonzero)".into()));
        }
        let y = self.to_unknowns()?;
        Ok(PLANAR.map(|i| y[i]))
    }

    pub fn from_planar_unknowns(y: &[f64; 6]) -> Self {
        let mut full = [0.0; 8];
        for (k, &i) in PLANAR.iter().enumerate() {
            full[i] = y[k];
        }
        Self::from_unknowns(&full)
    }
}

/// `(Gamma, u = Gamma v)`.
pub fn lorentz_extend(v: &[f64; 3]) -> Result<(f64, [f64; 3])> {
    let v2 = norm_sq(v);
    if !(v2 < 1.0) {
        return Err(Error::LightSpeed { speed: v2.sqrt() });
    }
    let g = 1.0 / (1.0 - v2).sqrt();
    Ok((g, v.map(|c| g * c)))
}

/// Inverse of [`lorentz_extend`]: `v = u / sqrt(1 + |u|^2)`.
pub fn velocity_from_u(u: &[f64; 3]) -> [f64; 3] {
    let g = (1.0 + norm_sq(u)).sqrt();
    u.map(|c| c / g)
}

/// Magnetic 4-vector `(b0, b)` and its invariant square `B^2 = |b|^2 - b0^2`.
pub fn magnetic_four(v: &[f64; 3], h: &[f64; 3]) -> Result<(f64, [f64; 3], f64)> {
    let (g, u) = lorentz_extend(v)?;
    let b0 = dot(&u, h);
    let b = [0, 1, 2].map(|i| h[i] / g + b0 * v[i]);
    Ok((b0, b, norm_sq(&b) - b0 * b0))
}

/// `B^2` from the equivalent closed form `|H|^2/Gamma^2 + (v.H)^2`.
pub fn b_squared_closed(v: &[f64; 3], h: &[f64; 3]) -> f64 {
    let vh = dot(v, h);
    norm_sq(h) * (1.0 - norm_sq(v)) + vh * vh
}

/// Directional derivative of `u(v)` at `v` along `dv`:
/// `Gamma (dv + (u.dv) u)`.
pub fn du_dv(v: &[f64; 3], dv: &[f64; 3]) -> Result<[f64; 3]> {
    let (g, u) = lorentz_extend(v)?;
    let ud = dot(&u, dv);
    Ok([0, 1, 2].map(|i| g * (dv[i] + ud * u[i])))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Kinematics {
    pub lorentz: f64,
    pub u: [f64; 3],
    pub b0: f64,
    pub b: [f64; 3],
    pub b_sq: f64,
    /// Total pressure `p + B^2/2`.
    pub q: f64,
    pub enthalpy: f64,
    pub rho: f64,
    pub sound_speed_sq: f64,
}

pub fn full_kinematics(params: &ThermoParams, state: &PrimitiveState) -> Result<Kinematics> {
    let (lorentz, u) = lorentz_extend(&state.velocity)?;
    let (b0, b, b_sq) = magnetic_four(&state.velocity, &state.magnetic)?;
    let rho = eos::density(params, state.pressure, state.entropy)?;
    let enthalpy = eos::enthalpy(params, state.pressure, rho)?;
    let sound_speed_sq = eos::sound_speed_sq(params, state.pressure, rho)?;
    Ok(Kinematics {
        lorentz,
        u,
        b0,
        b,
        b_sq,
        q: state.pressure + 0.5 * b_sq,
        enthalpy,
        rho,
        sound_speed_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lorentz_examples() {
        let (g, u) = lorentz_extend(&[0.0; 3]).unwrap();
        assert_eq!((g, u), (1.0, [0.0; 3]));
        let (g, u) = lorentz_extend(&[0.6, 0.0, 0.0]).unwrap();
        assert!((g - 1.25).abs() < 1e-15);
        assert!((u[0] - 0.75).abs() < 1e-15);
        assert!(matches!(lorentz_extend(&[1.0, 0.0, 0.0]), Err(Error::LightSpeed { .. })));
    }

    #[test]
    fn magnetic_examples() {
        let h = [0.3, -0.2, 0.9];
        let (b0, b, b2) = magnetic_four(&[0.0; 3], &h).unwrap();
        assert_eq!(b0, 0.0);
        assert_eq!(b, h);
        assert!((b2 - norm_sq(&h)).abs() < 1e-15);

        let (b0, b, b2) = magnetic_four(&[0.6, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
        assert!((b0 - 0.75).abs() < 1e-15);
        assert!((b[0] - 1.25).abs() < 1e-15);
        assert!((b2 - 1.0).abs() < 1e-14);
        assert!((b_squared_closed(&[0.6, 0.0, 0.0], &[1.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rest_state_kinematics() {
        let k = full_kinematics(
            &ThermoParams::default(),
            &PrimitiveState::new(1.0, [0.0; 3], [0.0; 3], 0.0),
        )
        .unwrap();
        assert!((k.rho - 1.0).abs() < 1e-15);
        assert!((k.enthalpy - 5.0).abs() < 1e-14);
        assert_eq!(k.lorentz, 1.0);
        assert_eq!(k.b_sq, 0.0);
        assert_eq!(k.q, 1.0);
    }

    #[test]
    fn planar_roundtrip() {
        let s = PrimitiveState::planar(1.2, [0.3, -0.4], [1.0, 0.5], 0.2);
        let y = s.to_planar_unknowns().unwrap();
        let back = PrimitiveState::from_planar_unknowns(&y);
        for i in 0..3 {
            assert!((back.velocity[i] - s.velocity[i]).abs() < 1e-15);
        }
        let s3 = PrimitiveState::new(1.0, [0.1, 0.0, 0.1], [0.0; 3], 0.0);
        assert!(s3.to_planar_unknowns().is_err());
    }
}
