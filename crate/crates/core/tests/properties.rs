//! Randomized invariants over admissible inputs.

use proptest::prelude::*;

use rmhd_contact::interface::{cutoff, normal_jump, Cutoff, CutoffKind};
use rmhd_contact::jumps::{classify, rh_residuals, DiscontinuityClass, FrontGeometry};
use rmhd_contact::kinematics::{b_squared_closed, lorentz_extend, magnetic_four, velocity_from_u};
use rmhd_contact::linalg::is_exactly_symmetric;
use rmhd_contact::solver::{gronwall_fit, read_snapshot, write_snapshot, Grid, Snapshot, SnapshotHeader};
use rmhd_contact::symmetrizer::{assemble, flux_part, g_matrix, to_dmatrix};
use rmhd_contact::{PrimitiveState, ThermoParams};

fn vec3(r: f64) -> impl Strategy<Value = [f64; 3]> {
    [-r..r, -r..r, -r..r]
}

/// Admissible states: `p >= pbar`, `|v| <= 0.7` (well inside `1 - nu`).
fn state() -> impl Strategy<Value = PrimitiveState> {
    (0.2..3.0f64, vec3(0.4), vec3(2.0), -1.0..1.0f64)
        .prop_map(|(p, v, h, s)| PrimitiveState::new(p, v, h, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn coefficient_matrices_are_symmetric(s in state(), n in vec3(1.0)) {
        let params = ThermoParams::default();
        let m = assemble(&params, &s).unwrap();
        for a in m.all() {
            prop_assert!(is_exactly_symmetric(&to_dmatrix(a)));
        }
        prop_assert!(m.a0.cholesky().is_some());
        prop_assert!(is_exactly_symmetric(&to_dmatrix(&g_matrix(&params, &s, &n).unwrap())));
    }

    #[test]
    fn flux_parts_subtract_convection(s in state()) {
        let params = ThermoParams::default();
        let m = assemble(&params, &s).unwrap();
        for j in 1..=3 {
            let g = flux_part(&params, &s, j).unwrap();
            prop_assert!((g - (m.a[j - 1] - m.a0 * s.velocity[j - 1])).amax() <= 1e-12);
        }
    }

    #[test]
    fn four_velocity_round_trip(u in vec3(5.0)) {
        let v = velocity_from_u(&u);
        let (_, back) = lorentz_extend(&v).unwrap();
        for i in 0..3 {
            prop_assert!((back[i] - u[i]).abs() <= 1e-13 * u[i].abs().max(1.0));
        }
    }

    #[test]
    fn magnetic_four_vector_identities(v in vec3(0.55), h in vec3(3.0)) {
        let (b0, b, bsq) = magnetic_four(&v, &h).unwrap();
        let closed = b_squared_closed(&v, &h);
        prop_assert!((bsq - closed).abs() <= 1e-12 * closed.max(1.0));
        let (g, u) = lorentz_extend(&v).unwrap();
        let ub = -g * b0 + u[0] * b[0] + u[1] * b[1] + u[2] * b[2];
        prop_assert!(ub.abs() <= 1e-12 * (g * b0.abs()).max(1.0));
    }

    #[test]
    fn cutoff_is_a_bounded_even_ramp(s in -8.0..8.0f64) {
        let c = cutoff(s);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert_eq!(c, cutoff(-s));
        for kind in [CutoffKind::Quintic, CutoffKind::Smooth] {
            let cut = Cutoff::new(kind);
            prop_assert!(cut.derivative(s).abs() <= cut.max_slope() + 1e-12);
        }
        prop_assert!(Cutoff::new(CutoffKind::Quintic).derivative(s).abs() < 0.5);
    }

    #[test]
    fn normal_jump_is_bilinear(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, k in -3.0..3.0f64) {
        prop_assert!((normal_jump(a + k * c, b) - (normal_jump(a, b) + k * c)).abs() <= 1e-12);
        prop_assert!((normal_jump(a, b + k * c) - (normal_jump(a, b) + k * c)).abs() <= 1e-12);
    }

    #[test]
    fn entropy_jumps_are_contacts(s in state(), ds in 0.05..1.0f64, d2 in -0.5..0.5f64) {
        prop_assume!(s.magnetic[0] - d2 * s.magnetic[1] > 0.2);
        let params = ThermoParams::default();
        let mut plus = s;
        plus.entropy += ds;
        // Front moving with the fluid: dt phi = v1 - d2 phi v2.
        let geom = FrontGeometry::from_front(s.velocity[0] - d2 * s.velocity[1], d2, 0.0);
        prop_assert!(rh_residuals(&params, &s, &plus, &geom).unwrap().max_abs() <= 1e-12);
        prop_assert_eq!(classify(&params, &s, &plus, &geom, 1e-10).unwrap(), DiscontinuityClass::Contact);
    }

    #[test]
    fn grid_respects_cfl(n1 in 5usize..200, n2 in 5usize..200, t in 0.01..3.0f64, cfl in 0.01..0.5f64) {
        let g = Grid::new(10.0, n1, n2, t, cfl, 1.0).unwrap();
        prop_assert!(g.dt <= cfl * g.h1.min(g.h2) * (1.0 + 1e-12));
        prop_assert!((g.steps as f64 * g.dt - t).abs() <= 1e-12 * t.max(1.0));
    }

    #[test]
    fn exponential_growth_fits_exactly(a in -3.0..3.0f64, k in -2.0..4.0f64) {
        let t: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let i: Vec<f64> = t.iter().map(|t| (a + k * t).exp()).collect();
        let fit = gronwall_fit(&t, &i, 0.0);
        prop_assert!(fit.all_finite);
        prop_assert!((fit.slope - k).abs() <= 1e-9);
        prop_assert!(fit.max_excess <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn snapshot_round_trip(values in proptest::collection::vec(-1e6..1e6f64, 4 * 5 * 6), front in proptest::collection::vec(-1.0..1.0f64, 5)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.bin");
        let snap = Snapshot {
            header: SnapshotHeader {
                format: "test".into(),
                n1: 4,
                n2: 5,
                l1: 10.0,
                t: 0.5,
                variables: ["p", "u1", "u2", "H1", "H2", "S"].map(String::from).to_vec(),
                arrays: vec!["plus".into(), "front".into()],
            },
            data: vec![values, front],
        };
        write_snapshot(&path, &snap).unwrap();
        prop_assert_eq!(read_snapshot(&path).unwrap(), snap);
    }
}

#[test]
fn truncated_snapshot_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("snap.bin");
    let snap = Snapshot {
        header: SnapshotHeader {
            format: "test".into(),
            n1: 5,
            n2: 5,
            l1: 1.0,
            t: 0.0,
            variables: vec!["p".into()],
            arrays: vec!["fields".into()],
        },
        data: vec![vec![1.0; 25]],
    };
    write_snapshot(&path, &snap).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    assert!(read_snapshot(&path).is_err());
}
