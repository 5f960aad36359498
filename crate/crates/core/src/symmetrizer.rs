//! Symmetric coefficient matrices of the RMHD system in the unknowns
//! `(p, u1, u2, u3, H1, H2, H3, S)` and their flux decompositions.
//!
//! The assembly is written once over [`Real`] so the same code yields plain
//! matrices and, with dual numbers, their exact directional derivatives.

use nalgebra::{DMatrix, SMatrix};

use crate::eos::ThermoParams;
use crate::error::{Error, Result};
use crate::kinematics::{PrimitiveState, PLANAR};
use crate::scalar::{dot3, Real};

pub type Mat8 = SMatrix<f64, 8, 8>;
pub type Mat6 = SMatrix<f64, 6, 6>;
pub type Mat3 = SMatrix<f64, 3, 3>;

type Arr8<T> = [[T; 8]; 8];

/// Raw pieces shared by the blocks.
struct Derived<T> {
    lorentz: T,
    v: [T; 3],
    u: [T; 3],
    h: [T; 3],
    b: [T; 3],
    vh: T,
    h2: T,
    b2: T,
    rho_h: T,
    gamma_p: T,
}

fn derived<T: Real>(params: &ThermoParams, y: &[T; 8], abs_pressure: bool) -> Derived<T> {
    let g = params.gamma;
    let p = y[0];
    let u = [y[1], y[2], y[3]];
    let h = [y[4], y[5], y[6]];
    let s = y[7];
    let lorentz = (T::one() + dot3(&u, &u)).sqrt();
    let v = u.map(|c| c / lorentz);
    let p_rho = if abs_pressure && p.re() < 0.0 { -p } else { p };
    let rho = p_rho.powf(1.0 / g) * (-s).scale(1.0 / g).exp() * T::from_f64(params.a);
    // rho h = rho + gamma p / (gamma - 1); rho a^2 = gamma p.
    let rho_h = rho + p.scale(g / (g - 1.0));
    let uh = dot3(&u, &h);
    let b = [0, 1, 2].map(|i| h[i] / lorentz + uh * v[i]);
    let vh = dot3(&v, &h);
    let h2 = dot3(&h, &h);
    let b2 = h2 / (lorentz * lorentz) + vh * vh;
    Derived { lorentz, v, u, h, b, vh, h2, b2, rho_h, gamma_p: p.scale(g) }
}

fn delta<T: Real>(i: usize, k: usize) -> T {
    if i == k {
        T::one()
    } else {
        T::zero()
    }
}

/// `N_j` block (field rows, velocity columns) for a covector `n`.
fn n_block<T: Real>(d: &Derived<T>, n: &[T; 3]) -> [[T; 3]; 3] {
    let gi = T::one() / d.lorentz;
    let vn = dot3(&d.v, n);
    let hn = dot3(&d.h, n);
    let hg2 = hn / (d.lorentz * d.lorentz);
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            out[i][k] = d.b[i] * n[k] * gi - vn * d.b[i] * d.v[k] * gi - hg2 * delta::<T>(i, k);
        }
    }
    out
}

/// Terms shared by the velocity blocks of `A_j` and `G_j`: everything that
/// multiplies `H_n` or the covector itself.
fn velocity_block_common<T: Real>(d: &Derived<T>, n: &[T; 3], i: usize, k: usize) -> T {
    let gi = T::one() / d.lorentz;
    let hn = dot3(&d.h, n);
    let (v, h) = (&d.v, &d.h);
    let sym_vh = v[i] * h[k] + h[i] * v[k];
    let proj = delta::<T>(i, k) - v[i] * v[k];
    hn * gi * (sym_vh * gi * gi - (d.vh + d.vh) * proj)
        + d.vh * gi * (h[i] * n[k] + n[i] * h[k])
        - d.b2 * gi * (v[i] * n[k] + n[i] * v[k])
}

/// `A_0` and `A_j` contracted with the covector `n` (i.e. `sum_j n_j A_j`).
fn assemble_pair<T: Real>(d: &Derived<T>, n: &[T; 3]) -> (Arr8<T>, Arr8<T>) {
    let z = T::zero();
    let gi = T::one() / d.lorentz;
    let (v, u, h) = (&d.v, &d.u, &d.h);
    let vn = dot3(v, n);
    let un = dot3(u, n);
    let mut a0 = [[z; 8]; 8];
    let mut an = [[z; 8]; 8];

    a0[0][0] = d.lorentz / d.gamma_p;
    an[0][0] = un / d.gamma_p;
    for i in 0..3 {
        a0[0][1 + i] = v[i];
        a0[1 + i][0] = v[i];
        an[0][1 + i] = n[i];
        an[1 + i][0] = n[i];
    }

    let big = d.rho_h * d.lorentz + d.h2 * gi;
    let plus = d.rho_h * d.lorentz + (d.h2 + d.b2) * gi;
    let minus = d.rho_h * d.lorentz + (d.h2 - d.b2) * gi;
    let nb = n_block(d, n);
    for i in 0..3 {
        // Symmetric blocks: each entry is computed once and mirrored.
        for k in i..3 {
            let hh = h[i] * h[k] * gi;
            let dik = delta::<T>(i, k);
            let a = big * dik - plus * v[i] * v[k] - hh + d.vh * gi * (v[i] * h[k] + h[i] * v[k]);
            let aj =
                vn * (big * dik - minus * v[i] * v[k] - hh) + velocity_block_common(d, n, i, k);
            let m = (dik + u[i] * u[k]) * gi;
            for (r, c) in [(i, k), (k, i)] {
                a0[1 + r][1 + c] = a;
                an[1 + r][1 + c] = aj;
                a0[4 + r][4 + c] = m;
                an[4 + r][4 + c] = vn * m;
            }
        }
        for k in 0..3 {
            an[4 + i][1 + k] = nb[i][k];
            an[1 + k][4 + i] = nb[i][k];
        }
    }
    a0[7][7] = T::one();
    an[7][7] = vn;
    (a0, an)
}

/// Generic assembly of `(A0, A1, A2, A3)` at unknowns `y = (p, u, H, S)`.
///
/// No admissibility check; `abs_pressure` evaluates the density at `|p|`
/// so that `A0` can be probed for `p < 0`.
pub fn coefficients<T: Real>(params: &ThermoParams, y: &[T; 8], abs_pressure: bool) -> [Arr8<T>; 4] {
    let d = derived(params, y, abs_pressure);
    let e = |j: usize| [0, 1, 2].map(|i| delta::<T>(i, j));
    let (a0, a1) = assemble_pair(&d, &e(0));
    let (_, a2) = assemble_pair(&d, &e(1));
    let (_, a3) = assemble_pair(&d, &e(2));
    [a0, a1, a2, a3]
}

/// Planar `(A0, A1, A2)` at planar unknowns `(p, u1, u2, H1, H2, S)`.
pub fn planar_coefficients<T: Real>(params: &ThermoParams, y: &[T; 6]) -> [[[T; 6]; 6]; 3] {
    let z = T::zero();
    let full = [y[0], y[1], y[2], z, y[3], y[4], z, y[5]];
    let [a0, a1, a2, _] = coefficients(params, &full, false);
    let project = |a: &Arr8<T>| {
        let mut out = [[z; 6]; 6];
        for (r, &i) in PLANAR.iter().enumerate() {
            for (c, &k) in PLANAR.iter().enumerate() {
                out[r][c] = a[i][k];
            }
        }
        out
    };
    [project(&a0), project(&a1), project(&a2)]
}

fn to_mat8(a: &Arr8<f64>) -> Mat8 {
    Mat8::from_fn(|r, c| a[r][c])
}

/// The coefficient matrices of one state.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSet {
    pub a0: Mat8,
    pub a: [Mat8; 3],
}

impl MatrixSet {
    /// Velocity block of `A0`.
    pub fn block_a(&self) -> Mat3 {
        self.a0.fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// Field block of `A0`.
    pub fn block_m(&self) -> Mat3 {
        self.a0.fixed_view::<3, 3>(4, 4).into_owned()
    }

    /// Velocity block of `A_j` (`j` is 1-based).
    pub fn block_aj(&self, j: usize) -> Mat3 {
        self.a[j - 1].fixed_view::<3, 3>(1, 1).into_owned()
    }

    /// Field/velocity coupling block of `A_j` (`j` is 1-based).
    pub fn block_nj(&self, j: usize) -> Mat3 {
        self.a[j - 1].fixed_view::<3, 3>(4, 1).into_owned()
    }

    /// All matrices as a list `[A0, A1, A2, A3]`.
    pub fn all(&self) -> [&Mat8; 4] {
        [&self.a0, &self.a[0], &self.a[1], &self.a[2]]
    }

    /// 6x6 planar principal submatrices `(A0, A1, A2)`.
    pub fn planar(&self) -> [Mat6; 3] {
        let sub = |m: &Mat8| Mat6::from_fn(|r, c| m[(PLANAR[r], PLANAR[c])]);
        [sub(&self.a0), sub(&self.a[0]), sub(&self.a[1])]
    }
}

pub fn to_dmatrix<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> DMatrix<f64> {
    DMatrix::from_fn(R, C, |r, c| m[(r, c)])
}

/// Domain checks needed for the matrices to make sense (positivity of the
/// pressure, subluminal velocity, causal sound speed). Margin checks of the
/// admissibility report are deliberately not applied here.
pub fn check_domain(params: &ThermoParams, state: &PrimitiveState) -> Result<()> {
    crate::kinematics::full_kinematics(params, state).and_then(|k| {
        if k.sound_speed_sq < 1.0 {
            Ok(())
        } else {
            Err(Error::Causality(format!("c_s^2 = {} is not below 1", k.sound_speed_sq)))
        }
    })
}

pub fn assemble(params: &ThermoParams, state: &PrimitiveState) -> Result<MatrixSet> {
    check_domain(params, state)?;
    Ok(assemble_unchecked(params, state))
}

/// Assembly without domain checks; for `p < 0` the density is evaluated at
/// `|p|` (used to observe the loss of positive definiteness).
pub fn assemble_unchecked(params: &ThermoParams, state: &PrimitiveState) -> MatrixSet {
    let v = state.velocity;
    let w = (1.0 - crate::kinematics::dot(&v, &v)).max(f64::MIN_POSITIVE).sqrt();
    let u = v.map(|c| c / w);
    let h = state.magnetic;
    let y = [state.pressure, u[0], u[1], u[2], h[0], h[1], h[2], state.entropy];
    let [a0, a1, a2, a3] = coefficients(params, &y, true);
    MatrixSet { a0: to_mat8(&a0), a: [to_mat8(&a1), to_mat8(&a2), to_mat8(&a3)] }
}

/// `G_n = sum_j n_j G_j` from the explicit block formulas (independent of
/// the `A_j` assembly).
pub fn g_matrix(params: &ThermoParams, state: &PrimitiveState, n: &[f64; 3]) -> Result<Mat8> {
    check_domain(params, state)?;
    let y = state.to_unknowns()?;
    let d = derived(params, &y, false);
    let gi = 1.0 / d.lorentz;
    let (v, h) = (&d.v, &d.h);
    let vn = dot3(v, n);
    let nb = n_block(&d, n);
    let mut g = Mat8::zeros();
    for i in 0..3 {
        g[(0, 1 + i)] = n[i] - vn * v[i];
        g[(1 + i, 0)] = n[i] - vn * v[i];
        for k in i..3 {
            let sym_vh = v[i] * h[k] + h[i] * v[k];
            let x = vn * (2.0 * d.b2 * gi * v[i] * v[k] - d.vh * gi * sym_vh)
                + velocity_block_common(&d, n, i, k);
            g[(1 + i, 1 + k)] = x;
            g[(1 + k, 1 + i)] = x;
        }
        for k in 0..3 {
            g[(4 + i, 1 + k)] = nb[i][k];
            g[(1 + k, 4 + i)] = nb[i][k];
        }
    }
    Ok(g)
}

/// `G_j` for the coordinate direction `j` (1-based).
pub fn flux_part(params: &ThermoParams, state: &PrimitiveState, j: usize) -> Result<Mat8> {
    let mut n = [0.0; 3];
    n[j - 1] = 1.0;
    g_matrix(params, state, &n)
}

/// `G_N = G_1 - G_2 d2phi` for the co-normal `N = (1, -d2phi)`.
pub fn boundary_flux(params: &ThermoParams, state: &PrimitiveState, d2phi: f64) -> Result<Mat8> {
    g_matrix(params, state, &[1.0, -d2phi, 0.0])
}

/// `(A1 - A0 psi_t - A2 psi_2) / d1phi`.
pub fn straightened_a1(
    params: &ThermoParams,
    state: &PrimitiveState,
    psi_t: f64,
    psi_2: f64,
    d1phi: f64,
) -> Result<Mat8> {
    if !(d1phi.abs() >= 0.5) {
        return Err(Error::FrontAdmissibility(format!(
            "|d1 Phi| = {} is below 1/2",
            d1phi.abs()
        )));
    }
    let m = assemble(params, state)?;
    Ok((m.a[0] - m.a0 * psi_t - m.a[1] * psi_2) / d1phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state() -> PrimitiveState {
        PrimitiveState::new(0.7, [0.3, -0.2, 0.1], [0.8, -0.5, 0.3], 0.4)
    }

    #[test]
    fn rest_frame_a0_is_diagonal() {
        let p = ThermoParams::default();
        let m = assemble(&p, &PrimitiveState::new(1.0, [0.0; 3], [0.0; 3], 0.0)).unwrap();
        let diag = [0.75, 5.0, 5.0, 5.0, 1.0, 1.0, 1.0, 1.0];
        for r in 0..8 {
            for c in 0..8 {
                let want = if r == c { diag[r] } else { 0.0 };
                assert!((m.a0[(r, c)] - want).abs() < 1e-14, "A0[{r},{c}]");
            }
        }
        for j in 0..3 {
            for r in 0..8 {
                for c in 0..8 {
                    let want = if (r == 0 && c == 1 + j) || (c == 0 && r == 1 + j) { 1.0 } else { 0.0 };
                    assert!((m.a[j][(r, c)] - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn matrices_are_exactly_symmetric() {
        let m = assemble(&ThermoParams::default(), &state()).unwrap();
        for a in m.all() {
            assert_eq!(*a, a.transpose());
        }
    }

    #[test]
    fn flux_decomposition_matches() {
        let p = ThermoParams::default();
        let s = state();
        let m = assemble(&p, &s).unwrap();
        for j in 1..=3 {
            let g = flux_part(&p, &s, j).unwrap();
            let direct = m.a[j - 1] - m.a0 * s.velocity[j - 1];
            assert!((g - direct).abs().max() < 1e-12, "j = {j}");
            assert_eq!(g, g.transpose());
        }
    }

    #[test]
    fn flat_front_boundary_flux_is_g1() {
        let p = ThermoParams::default();
        let s = state();
        assert_eq!(boundary_flux(&p, &s, 0.0).unwrap(), flux_part(&p, &s, 1).unwrap());
        let d = 0.37;
        let combo = flux_part(&p, &s, 1).unwrap() - flux_part(&p, &s, 2).unwrap() * d;
        assert!((boundary_flux(&p, &s, d).unwrap() - combo).abs().max() < 1e-13);
    }

    #[test]
    fn straightened_examples() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(0.9, [0.2, 0.3], [1.0, 0.4], 0.0);
        let m = assemble(&p, &s).unwrap();
        assert_eq!(straightened_a1(&p, &s, 0.0, 0.0, 1.0).unwrap(), m.a[0]);
        let d2 = 0.25;
        let vn = s.velocity[0] - s.velocity[1] * d2;
        let a = straightened_a1(&p, &s, vn, d2, 1.0).unwrap();
        assert!((a - boundary_flux(&p, &s, d2).unwrap()).abs().max() < 1e-13);
        let half = straightened_a1(&p, &s, vn, d2, 2.0).unwrap();
        assert!((half * 2.0 - a).abs().max() < 1e-14);
        assert!(matches!(
            straightened_a1(&p, &s, 0.0, 0.0, 0.4),
            Err(Error::FrontAdmissibility(_))
        ));
    }

    #[test]
    fn planar_projection_matches_generic_planar_path() {
        let p = ThermoParams::default();
        let s = PrimitiveState::planar(0.9, [0.2, 0.3], [1.0, 0.4], -0.3);
        let full = assemble(&p, &s).unwrap().planar();
        let y = s.to_planar_unknowns().unwrap();
        let pc = planar_coefficients(&p, &y);
        for (k, m) in full.iter().enumerate() {
            for r in 0..6 {
                for c in 0..6 {
                    assert!((m[(r, c)] - pc[k][r][c]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn negative_pressure_breaks_definiteness() {
        let p = ThermoParams::default();
        let s = PrimitiveState::new(-0.2, [0.1, 0.0, 0.0], [0.5, 0.2, 0.0], 0.0);
        assert!(assemble(&p, &s).is_err());
        let m = assemble_unchecked(&p, &s);
        assert!(m.a0.cholesky().is_none());
    }
}
