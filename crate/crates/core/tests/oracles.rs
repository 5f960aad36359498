//! Hand-computed reference values for the public API.

use rmhd_contact::characteristics::{boundary_signature, char_spectrum, speed_positivity_margin};
use rmhd_contact::eos::{density, enthalpy, hyperbolicity_report, internal_energy, sound_speed_sq};
use rmhd_contact::interface::{cutoff, straighten, Cutoff, CutoffKind, FrontFunction};
use rmhd_contact::jumps::{classify, contact_reduction_check, mass_flux, rh_residuals, DiscontinuityClass, FrontGeometry};
use rmhd_contact::kinematics::{full_kinematics, lorentz_extend, magnetic_four};
use rmhd_contact::linearized::perturbation_velocity;
use rmhd_contact::symmetrizer::{assemble, boundary_flux, flux_part};
use rmhd_contact::{Error, PrimitiveState, ThermoParams};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

fn rest(p: f64) -> PrimitiveState {
    PrimitiveState::new(p, [0.0; 3], [0.0; 3], 0.0)
}

#[test]
fn polytropic_closure() {
    let p43 = ThermoParams::default();
    let p2 = ThermoParams::with_gamma(2.0);
    assert!(close(density(&p43, 1.0, 0.0).unwrap(), 1.0, 1e-15));
    assert!(close(density(&p2, 4.0, 0.0).unwrap(), 2.0, 1e-15));
    assert!(close(internal_energy(&p43, 1.0, 1.0).unwrap(), 3.0, 1e-14));
    assert!(close(internal_energy(&p2, 1.0, 1.0).unwrap(), 1.0, 1e-14));
    assert!(close(enthalpy(&p43, 1.0, 1.0).unwrap(), 5.0, 1e-14));
    assert!(close(enthalpy(&p2, 1.0, 1.0).unwrap(), 3.0, 1e-14));
    assert!(close(sound_speed_sq(&p43, 1.0, 1.0).unwrap(), 4.0 / 15.0, 1e-14));
    assert!(close(sound_speed_sq(&p2, 1.0, 1.0).unwrap(), 2.0 / 3.0, 1e-14));
    assert!(density(&p43, -1.0, 0.0).is_err());
    assert!(internal_energy(&p43, 1e-14, 1.0).unwrap() < 1e-12);
}

#[test]
fn admissibility_flags() {
    let params = ThermoParams { nu: 0.1, ..Default::default() };
    assert!(hyperbolicity_report(&params, &rest(1.0)).admissible);
    let neg = hyperbolicity_report(&params, &rest(-1.0));
    assert!(!neg.admissible);
    assert!(!neg.check("(9')").unwrap().passed);
    let fast = PrimitiveState::new(1.0, [0.99, 0.0, 0.0], [0.0; 3], 0.0);
    let r = hyperbolicity_report(&params, &fast);
    let c = r.check("(5.1\")").unwrap();
    assert!(!c.passed);
    assert!(close(c.margin, 0.01 - 0.1, 1e-12));
}

#[test]
fn lorentz_and_magnetic_four() {
    let (g, u) = lorentz_extend(&[0.0; 3]).unwrap();
    assert_eq!((g, u), (1.0, [0.0; 3]));
    let (g, u) = lorentz_extend(&[0.6, 0.0, 0.0]).unwrap();
    assert!(close(g, 1.25, 1e-15) && close(u[0], 0.75, 1e-15));
    assert!(matches!(lorentz_extend(&[1.0, 0.0, 0.0]), Err(Error::LightSpeed { .. })));

    let h = [0.3, -0.2, 0.5];
    let (b0, b, bsq) = magnetic_four(&[0.0; 3], &h).unwrap();
    assert_eq!(b0, 0.0);
    assert_eq!(b, h);
    assert!(close(bsq, 0.38, 1e-15));

    let (b0, b, bsq) = magnetic_four(&[0.6, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap();
    assert!(close(b0, 0.75, 1e-14));
    assert!(close(b[0], 1.25, 1e-14) && b[1] == 0.0 && b[2] == 0.0);
    assert!(close(bsq, 1.0, 1e-14));
}

#[test]
fn rest_state_kinematics() {
    let k = full_kinematics(&ThermoParams::default(), &rest(1.0)).unwrap();
    assert!(close(k.rho, 1.0, 1e-15));
    assert!(close(k.enthalpy, 5.0, 1e-14));
    assert_eq!(k.lorentz, 1.0);
    assert_eq!(k.b_sq, 0.0);
    assert!(close(k.q, 1.0, 1e-15));
}

#[test]
fn rest_state_symmetrizer() {
    let params = ThermoParams::default();
    let m = assemble(&params, &rest(1.0)).unwrap();
    let diag = [0.75, 5.0, 5.0, 5.0, 1.0, 1.0, 1.0, 1.0];
    for r in 0..8 {
        for c in 0..8 {
            let want = if r == c { diag[r] } else { 0.0 };
            assert!(close(m.a0[(r, c)], want, 1e-13), "A0[{r},{c}] = {}", m.a0[(r, c)]);
        }
    }
    // Only the pressure-velocity coupling survives in A_j.
    for j in 0..3 {
        for r in 0..8 {
            for c in 0..8 {
                let coupled = (r == 0 && c == 1 + j) || (c == 0 && r == 1 + j);
                if !coupled {
                    assert_eq!(m.a[j][(r, c)], 0.0);
                }
            }
        }
        assert!(m.a[j][(0, 1 + j)] != 0.0);
    }
}

#[test]
fn flat_front_flux_is_first_flux() {
    let params = ThermoParams::default();
    let s = PrimitiveState::new(1.2, [0.1, -0.2, 0.05], [0.7, 0.3, -0.1], 0.2);
    assert_eq!(boundary_flux(&params, &s, 0.0).unwrap(), flux_part(&params, &s, 1).unwrap());
}

#[test]
fn gas_dynamic_spectrum() {
    let params = ThermoParams::default();
    let spec = char_spectrum(&params, &rest(1.0), [1.0, 0.0], 0.0).unwrap();
    let l = &spec.lambdas;
    assert_eq!(l.iter().filter(|x| x.abs() < 1e-12).count(), 4);
    assert!(l[0] < 0.0 && close(l[0], -l[5], 1e-12));
    // At rest the fast speed is the sound speed.
    assert!(close(l[5], (4.0f64 / 15.0).sqrt(), 1e-10));
}

#[test]
fn rest_frame_spectrum_is_symmetric() {
    let params = ThermoParams::default();
    let s = PrimitiveState::planar(1.0, [0.0, 0.0], [1.0, 0.0], 0.0);
    let l = char_spectrum(&params, &s, [1.0, 0.0], 0.0).unwrap().lambdas;
    for i in 0..6 {
        assert!((l[i] + l[5 - i]).abs() <= 1e-10);
    }
}

#[test]
fn co_moving_front_zeroes_the_entropy_pair() {
    let params = ThermoParams::default();
    let s = PrimitiveState::planar(1.0, [0.2, 0.1], [0.8, 0.3], 0.1);
    let spec = char_spectrum(&params, &s, [1.0, 0.0], 0.2).unwrap();
    assert!(spec.shifted[2].abs() <= 1e-10 && spec.shifted[3].abs() <= 1e-10);
}

#[test]
fn tangential_field_collapses_slow_speed() {
    let params = ThermoParams::default();
    let s = PrimitiveState::planar(1.0, [0.0, 0.0], [0.0, 0.7], 0.0);
    assert!(speed_positivity_margin(&params, &s, [1.0, 0.0]).unwrap() <= 1e-9);
    let s = PrimitiveState::planar(1.0, [0.0, 0.0], [0.5, 0.7], 0.0);
    assert!(speed_positivity_margin(&params, &s, [1.0, 0.0]).unwrap() > 0.0);
}

#[test]
fn weak_normal_field_is_rejected_by_signature() {
    let params = ThermoParams::default();
    let a = PrimitiveState::planar(1.0, [0.0, 0.0], [0.01, 0.5], 0.0);
    let b = PrimitiveState::planar(1.0, [0.0, 0.0], [0.01, 0.5], 0.4);
    assert!(matches!(boundary_signature(&params, &a, &b, 0.0, 0.0), Err(Error::Precondition(_))));
}

#[test]
fn mass_flux_values() {
    let params = ThermoParams::default();
    let s = PrimitiveState::new(1.0, [0.6, 0.0, 0.0], [0.0; 3], 0.0);
    let still = FrontGeometry::from_front(0.0, 0.0, 0.0);
    assert!(close(mass_flux(&params, &s, &still).unwrap(), 0.75, 1e-14));
    let moving = FrontGeometry::from_front(0.6, 0.0, 0.0);
    assert!(mass_flux(&params, &s, &moving).unwrap().abs() < 1e-15);
}

fn contact_pair() -> (PrimitiveState, PrimitiveState, FrontGeometry) {
    let minus = PrimitiveState::new(1.0, [0.2, 0.1, -0.05], [0.8, 0.3, 0.1], 0.0);
    let mut plus = minus;
    plus.entropy = 0.7;
    // sigma = v.n for the normal (1, 0, 0).
    (minus, plus, FrontGeometry::from_front(0.2, 0.0, 0.0))
}

#[test]
fn contact_data_satisfies_jump_conditions() {
    let params = ThermoParams::default();
    let (m, p, g) = contact_pair();
    assert!(rh_residuals(&params, &m, &p, &g).unwrap().max_abs() <= 1e-12);
    assert!(rh_residuals(&params, &m, &m, &g).unwrap().max_abs() == 0.0);
    assert_eq!(classify(&params, &m, &p, &g, 1e-10).unwrap(), DiscontinuityClass::Contact);
    let rep = contact_reduction_check(&params, &m, &p, &g, 1e-10).unwrap();
    assert!(rep.satisfies_contact_conditions);
}

#[test]
fn pressure_kick_shows_in_normal_momentum() {
    let params = ThermoParams::default();
    let (m, mut p, g) = contact_pair();
    p.pressure += 1e-3;
    let r = rh_residuals(&params, &m, &p, &g).unwrap();
    assert!((r.normal_momentum.abs() - 1e-3).abs() < 1e-5, "{}", r.normal_momentum);
}

#[test]
fn tangential_field_jump_breaks_the_reduction() {
    let params = ThermoParams::default();
    let (m, mut p, g) = contact_pair();
    p.magnetic[1] += 0.05;
    let rep = contact_reduction_check(&params, &m, &p, &g, 1e-10).unwrap();
    assert!(!rep.satisfies_contact_conditions);
}

#[test]
fn vortex_sheet_classification() {
    let params = ThermoParams::default();
    let minus = PrimitiveState::new(1.0, [0.0, 0.1, 0.0], [0.0, 0.4, 0.0], 0.0);
    let plus = PrimitiveState::new(1.0, [0.0, -0.2, 0.0], [0.0, 0.6, 0.0], 0.3);
    let g = FrontGeometry::from_front(0.0, 0.0, 0.0);
    let total = |s: &PrimitiveState| full_kinematics(&params, s).unwrap().q;
    // Balance total pressure so that the jump conditions hold.
    let mut plus = plus;
    plus.pressure += total(&minus) - total(&plus);
    assert_eq!(classify(&params, &minus, &plus, &g, 1e-10).unwrap(), DiscontinuityClass::CurrentVortexSheet);
}

#[test]
fn cutoff_values() {
    assert_eq!(cutoff(0.5), 1.0);
    assert_eq!(cutoff(5.0), 0.0);
    assert_eq!(cutoff(-5.0), 0.0);
    assert!(close(cutoff(3.0), 0.5, 1e-15));
    assert_eq!(Cutoff::new(CutoffKind::Quintic).max_slope(), 15.0 / 32.0);
}

#[test]
fn straightening_oracles() {
    let cut = Cutoff::default();
    let flat = FrontFunction::flat(16);
    let pt = straighten(&flat, &cut, 0, 3, 2.5).unwrap();
    assert_eq!(pt.phi, [2.5, -2.5]);
    assert_eq!(pt.d1_phi, [1.0, -1.0]);

    let one = FrontFunction::steady(vec![1.0; 16]);
    let pt = straighten(&one, &cut, 0, 0, 0.0).unwrap();
    assert_eq!(pt.phi[0], 1.0);
    assert_eq!(pt.d1_phi[0], 1.0);

    let pt = straighten(&one, &cut, 0, 0, 10.0).unwrap();
    assert_eq!(pt.psi, [0.0, 0.0]);
    assert_eq!(pt.phi[0], 10.0);

    let big = FrontFunction::steady(vec![1.5; 16]);
    assert!(matches!(straighten(&big, &cut, 0, 0, 0.0), Err(Error::FrontAdmissibility(_))));
}

#[test]
fn perturbation_velocity_values() {
    let u = [0.3, -0.1, 0.2];
    assert_eq!(perturbation_velocity(&[0.0; 3], &u), u);
    let v = perturbation_velocity(&[0.6, 0.0, 0.0], &[1.0, 0.0, 0.0]);
    assert!(close(v[0], 0.512, 1e-14));
}
