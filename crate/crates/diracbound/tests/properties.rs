//! Property tests for the algebraic invariants.

use diracbound::clifford::{twistor_params, CliffordRep};
use diracbound::geometry::{make_geometry, GeometryKind};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

proptest! {
    #[test]
    fn unit_clifford_action_is_isometric(
        n in 2usize..=3,
        raw in prop::collection::vec(-5.0f64..5.0, 3),
        sr in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let mut x: Vec<f64> = raw[..n].to_vec();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-6);
        for v in x.iter_mut() {
            *v /= norm;
        }
        let rep = CliffordRep::build(n).unwrap();
        let s = [C64::new(sr[0], sr[1]), C64::new(sr[2], sr[3])];
        let xs = rep.mult(&x, &s).unwrap();
        let before = s[0].norm_sqr() + s[1].norm_sqr();
        let after = xs[0].norm_sqr() + xs[1].norm_sqr();
        prop_assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        // Clifford relation X.(X.s) = -s for unit X
        let xxs = rep.mult(&x, &xs).unwrap();
        prop_assert!((xxs[0] + s[0]).norm() <= 1e-12);
        prop_assert!((xxs[1] + s[1]).norm() <= 1e-12);
    }

    #[test]
    fn twistor_xi_stays_in_the_closed_range(
        n in 2usize..=6,
        e1 in -10.0f64..10.0,
        e2 in -10.0f64..10.0,
    ) {
        prop_assume!(e1 != 0.0 || e2 != 0.0);
        let tp = twistor_params(e1, e2, n).unwrap();
        prop_assert!(tp.norm_sq > 0.0);
        let lo = -1.0 / (n as f64 - 1.0);
        prop_assert!(tp.xi >= lo - 1e-12 && tp.xi <= 1.0 + 1e-12);
    }

    #[test]
    fn rescale_round_trip_preserves_invariants(
        l1 in 0.2f64..4.0,
        l2 in 0.2f64..4.0,
        sigma in 0.05f64..20.0,
    ) {
        let g = make_geometry(GeometryKind::FlatTorus2 { l1, l2, spin: [1, 0] }).unwrap();
        let back = g.rescale(sigma).unwrap().rescale(1.0 / sigma).unwrap();
        let (a, b) = (g.invariants(), back.invariants());
        prop_assert!((a.volume - b.volume).abs() <= 1e-14 * a.volume.max(1.0));
        // the homothety itself transforms the volume with sigma^n
        let scaled = g.rescale(sigma).unwrap().invariants();
        prop_assert!((scaled.volume - sigma * sigma * a.volume).abs() <= 1e-12 * scaled.volume);
    }
}
