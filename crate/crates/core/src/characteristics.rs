//! Wave speeds from the symmetric pencil `(A1 N1 + A2 N2, A0)` and the
//! eigenvalue signature of the stacked two-sided boundary matrix.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::eos::{hyperbolicity_report, ThermoParams};
use crate::error::{Error, Result};
use crate::kinematics::PrimitiveState;
use crate::linalg::{generalized_symmetric_eigen, numerical_rank};
use crate::symmetrizer::{assemble, to_dmatrix, Mat6};

/// Relative threshold separating zero from nonzero eigenvalues.
pub const ZERO_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MagnetosonicSpeeds {
    pub fast_minus: f64,
    pub slow_minus: f64,
    pub slow_plus: f64,
    pub fast_plus: f64,
}

impl MagnetosonicSpeeds {
    pub fn min(&self) -> f64 {
        self.fast_minus.min(self.slow_minus).min(self.slow_plus).min(self.fast_plus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSpectrum {
    /// Ascending eigenvalues of the planar pencil.
    pub lambdas: Vec<f64>,
    /// `lambdas` minus the front speed.
    pub shifted: Vec<f64>,
    /// `v . N` of the state.
    pub v_n: f64,
    pub speeds: MagnetosonicSpeeds,
}

fn planar_mats(params: &ThermoParams, state: &PrimitiveState) -> Result<[Mat6; 3]> {
    if !state.is_planar() {
        return Err(Error::Precondition("planar spectrum needs v3 = H3 = 0".into()));
    }
    Ok(assemble(params, state)?.planar())
}

/// Eigenvalues of `det(A1 N1 + A2 N2 - lambda A0) = 0` for a planar state.
///
/// The speeds follow the ordering `lambda_1 = v_N - c_f-`,
/// `lambda_2 = v_N - c_s-`, `lambda_3 = lambda_4 = v_N`,
/// `lambda_5 = v_N + c_s+`, `lambda_6 = v_N + c_f+`.
pub fn char_spectrum(
    params: &ThermoParams,
    state: &PrimitiveState,
    n: [f64; 2],
    front_speed: f64,
) -> Result<CharSpectrum> {
    let [a0, a1, a2] = planar_mats(params, state)?;
    let k = a1 * n[0] + a2 * n[1];
    let (vals, _) = generalized_symmetric_eigen(&to_dmatrix(&k), &to_dmatrix(&a0))?;
    let lambdas: Vec<f64> = vals.iter().copied().collect();
    let v_n = state.velocity[0] * n[0] + state.velocity[1] * n[1];
    let speeds = MagnetosonicSpeeds {
        fast_minus: v_n - lambdas[0],
        slow_minus: v_n - lambdas[1],
        slow_plus: lambdas[4] - v_n,
        fast_plus: lambdas[5] - v_n,
    };
    let shifted = lambdas.iter().map(|l| l - front_speed).collect();
    Ok(CharSpectrum { lambdas, shifted, v_n, speeds })
}

/// Full 8x8 spectrum for a 3-D state and covector `n`.
pub fn char_spectrum_3d(params: &ThermoParams, state: &PrimitiveState, n: [f64; 3]) -> Result<Vec<f64>> {
    let m = assemble(params, state)?;
    let k = m.a[0] * n[0] + m.a[1] * n[1] + m.a[2] * n[2];
    let (vals, _) = generalized_symmetric_eigen(&to_dmatrix(&k), &to_dmatrix(&m.a0))?;
    Ok(vals.iter().copied().collect())
}

/// Smallest magnetosonic speed for the co-normal `n`.
pub fn speed_positivity_margin(params: &ThermoParams, state: &PrimitiveState, n: [f64; 2]) -> Result<f64> {
    Ok(char_spectrum(params, state, n, 0.0)?.speeds.min())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SignCounts {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

fn count_signs(vals: &[f64], scale: f64) -> SignCounts {
    let thr = ZERO_REL_TOL * scale;
    let mut c = SignCounts { pos: 0, neg: 0, zero: 0 };
    for &l in vals {
        if l.abs() <= thr {
            c.zero += 1;
        } else if l > 0.0 {
            c.pos += 1;
        } else {
            c.neg += 1;
        }
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundarySignature {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
    /// Numerical rank of the stacked boundary matrix.
    pub rank: usize,
    /// Ascending eigenvalues of the stacked pencil.
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of the plus-side block (`A0+^-1 M+`).
    pub plus: Vec<f64>,
    /// Eigenvalues of the minus-side block (`-A0-^-1 M-`).
    pub minus: Vec<f64>,
    pub plus_counts: SignCounts,
    pub minus_counts: SignCounts,
    pub spectral_radius: f64,
}

/// Signature of the stacked pencil without any precondition checks.
///
/// `minus` is the trace on the side `x1 < phi`, `plus` on `x1 > phi`. The
/// boundary matrix is `diag(M+, -M-)` with
/// `M = A1 - A0 dtphi - A2 d2phi`, the mass matrix `diag(A0+, A0-)`.
pub fn pencil_signature(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    d2phi: f64,
    dtphi: f64,
) -> Result<BoundarySignature> {
    let [a0p, a1p, a2p] = planar_mats(params, plus)?;
    let [a0m, a1m, a2m] = planar_mats(params, minus)?;
    let mp = a1p - a0p * dtphi - a2p * d2phi;
    let mm = -(a1m - a0m * dtphi - a2m * d2phi);
    let mut big_a0 = DMatrix::zeros(12, 12);
    let mut big_a1 = DMatrix::zeros(12, 12);
    big_a0.view_mut((0, 0), (6, 6)).copy_from(&a0p);
    big_a0.view_mut((6, 6), (6, 6)).copy_from(&a0m);
    big_a1.view_mut((0, 0), (6, 6)).copy_from(&mp);
    big_a1.view_mut((6, 6), (6, 6)).copy_from(&mm);

    let (vals, _) = generalized_symmetric_eigen(&big_a1, &big_a0)?;
    let eigenvalues: Vec<f64> = vals.iter().copied().collect();
    let (pv, _) = generalized_symmetric_eigen(&to_dmatrix(&mp), &to_dmatrix(&a0p))?;
    let (mv, _) = generalized_symmetric_eigen(&to_dmatrix(&mm), &to_dmatrix(&a0m))?;
    let plus_vals: Vec<f64> = pv.iter().copied().collect();
    let minus_vals: Vec<f64> = mv.iter().copied().collect();

    let spectral_radius = eigenvalues.iter().fold(0.0_f64, |a, l| a.max(l.abs()));
    let total = count_signs(&eigenvalues, spectral_radius);
    Ok(BoundarySignature {
        n_pos: total.pos,
        n_neg: total.neg,
        n_zero: total.zero,
        rank: numerical_rank(&big_a1, ZERO_REL_TOL),
        plus_counts: count_signs(&plus_vals, spectral_radius),
        minus_counts: count_signs(&minus_vals, spectral_radius),
        eigenvalues,
        plus: plus_vals,
        minus: minus_vals,
        spectral_radius,
    })
}

/// Residuals of the planar contact conditions between the two traces:
/// `[p]`, `[v1]`, `[v2]`, `[H_tau]`, `[H_N]` and `dtphi - v_N+`.
pub fn contact_condition_residuals(
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    d2phi: f64,
    dtphi: f64,
) -> [f64; 6] {
    let h_tau = |s: &PrimitiveState| s.magnetic[0] * d2phi + s.magnetic[1];
    let h_n = |s: &PrimitiveState| s.magnetic[0] - s.magnetic[1] * d2phi;
    let v_n = plus.velocity[0] - plus.velocity[1] * d2phi;
    [
        plus.pressure - minus.pressure,
        plus.velocity[0] - minus.velocity[0],
        plus.velocity[1] - minus.velocity[1],
        h_tau(plus) - h_tau(minus),
        h_n(plus) - h_n(minus),
        dtphi - v_n,
    ]
}

/// Boundary signature at an admissible contact point.
///
/// Requires admissible traces, the contact conditions to hold to `1e-9`,
/// and `|H_N| >= kappa` on both sides.
pub fn boundary_signature(
    params: &ThermoParams,
    minus: &PrimitiveState,
    plus: &PrimitiveState,
    d2phi: f64,
    dtphi: f64,
) -> Result<BoundarySignature> {
    for (side, s) in [("minus", minus), ("plus", plus)] {
        let r = hyperbolicity_report(params, s);
        if let Some(c) = r.failures().next() {
            return Err(Error::Hyperbolicity(format!(
                "{side} trace: {} {} (margin {:.3e})",
                c.tag, c.description, c.margin
            )));
        }
        let h_n = s.magnetic[0] - s.magnetic[1] * d2phi;
        if h_n.abs() < params.kappa {
            return Err(Error::Precondition(format!(
                "(mf.1) |H_N| = {:.3e} on the {side} side is below kappa = {}",
                h_n.abs(),
                params.kappa
            )));
        }
    }
    let res = contact_condition_residuals(minus, plus, d2phi, dtphi);
    let worst = res.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
    if worst > 1e-9 {
        return Err(Error::Precondition(format!(
            "(12') contact conditions violated by {worst:.3e}"
        )));
    }
    pencil_signature(params, minus, plus, d2phi, dtphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eos::{density, sound_speed_sq};

    #[test]
    fn gas_dynamic_rest_state() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(1.0, [0.0, 0.0], [0.0, 0.0], 0.0);
        let sp = char_spectrum(&p, &s, [1.0, 0.0], 0.0).unwrap();
        let cs = sound_speed_sq(&p, 1.0, density(&p, 1.0, 0.0).unwrap()).unwrap().sqrt();
        let l = &sp.lambdas;
        assert!(l[1..5].iter().all(|x| x.abs() < 1e-12));
        assert!((l[5] + l[0]).abs() < 1e-12);
        // With v = 0 and H = 0 the pair is exactly the sound speed.
        assert!((l[5] - cs).abs() < 1e-12);
    }

    #[test]
    fn rest_frame_reflection_symmetry() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(1.0, [0.0, 0.0], [1.0, 0.0], 0.0);
        let sp = char_spectrum(&p, &s, [1.0, 0.0], 0.0).unwrap();
        for i in 0..6 {
            assert!((sp.lambdas[i] + sp.lambdas[5 - i]).abs() < 1e-10);
        }
    }

    #[test]
    fn shifted_double_zero() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(0.8, [0.2, 0.4], [1.0, -0.3], 0.1);
        let d2 = 0.3;
        let n = [1.0, -d2];
        let vn = s.velocity[0] - s.velocity[1] * d2;
        let sp = char_spectrum(&p, &s, n, vn).unwrap();
        assert!(sp.shifted[2].abs() < 1e-10 && sp.shifted[3].abs() < 1e-10);
        assert!(sp.speeds.min() > 0.0);
    }

    #[test]
    fn tangential_field_collapses_slow_speed() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(1.0, [0.1, 0.2], [0.0, 0.8], 0.0);
        assert!(speed_positivity_margin(&p, &s, [1.0, 0.0]).unwrap() <= 1e-9);
    }

    #[test]
    fn identical_traces_split_evenly() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(1.0, [0.0, 0.3], [1.0, 0.4], 0.0);
        let sig = boundary_signature(&p, &s, &s, 0.0, 0.0).unwrap();
        assert_eq!((sig.n_pos, sig.n_neg, sig.n_zero, sig.rank), (4, 4, 4, 8));
        let even = SignCounts { pos: 2, neg: 2, zero: 2 };
        assert_eq!(sig.plus_counts, even);
        assert_eq!(sig.minus_counts, even);
    }

    #[test]
    fn small_normal_field_rejected() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(1.0, [0.0, 0.3], [0.05, 0.4], 0.0);
        assert!(matches!(boundary_signature(&p, &s, &s, 0.0, 0.0), Err(Error::Precondition(_))));
        let sig = pencil_signature(&p, &s, &s, 0.0, 0.0).unwrap();
        assert!(sig.eigenvalues.iter().filter(|l| l.abs() < 0.05).count() > 4);
    }
}
