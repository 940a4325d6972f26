//! Cross-validation of the in-repo solvers against independent oracles:
//! complex Bessel series vs the ODE shooting determinants, Lanczos vs the
//! dense path on torus blocks, and the bound/gap sweep across the catalog.

use diracbound::bounds;
use diracbound::bundle::DiracBundleSpec;
use diracbound::eigensolve::shooting::{nonnormal_mode_roots, Rect, ShootingProblem};
use diracbound::eigensolve::{hermitian_eigs, lanczos::lanczos_smallest_abs};
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::identity;
use diracbound::operators::radial::{assemble_radial, reduce_modes};
use diracbound::operators::{boundary, torus, BoundaryCondition, MatrixRepr, OperatorMatrix, SymmetryFlag};
use diracbound::spectrum::{spectrum, SpectrumOptions};
use num_complex::Complex64 as C64;

/// Bessel J of integer order for complex argument by the power series;
/// accurate for moderate |z|, which covers the smallest disk roots.
fn bessel_j_complex(n: u32, z: C64) -> C64 {
    let half = z / 2.0;
    let mut term = C64::new(1.0, 0.0);
    for k in 1..=n {
        term *= half / k as f64;
    }
    let mut sum = term;
    let z2 = -half * half;
    for k in 1..80 {
        term *= z2 / (k as f64 * (k as f64 + n as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

fn disk() -> DiracBundleSpec {
    DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 }).unwrap())
}

#[test]
fn mit_roots_satisfy_the_bessel_condition() {
    // mode m, MIT(eps): J_{m+1}(lambda) = i eps J_m(lambda)
    let bc = BoundaryCondition::MitBag { sign: 1 };
    for m in [0i64, 1] {
        let modes = reduce_modes(&disk(), Some(&bc), &[m]).unwrap();
        let p = ShootingProblem {
            mode: modes[0].clone(),
            region: Rect { re_lo: 0.1, re_hi: 5.2, im_lo: -2.0, im_hi: 2.0 },
            base_steps: 2048,
        };
        let roots = nonnormal_mode_roots(&p).unwrap();
        assert!(!roots.is_empty());
        for r in &roots {
            let lhs = bessel_j_complex(m as u32 + 1, *r);
            let rhs = C64::new(0.0, 1.0) * bessel_j_complex(m as u32, *r);
            assert!(
                (lhs - rhs).norm() < 1e-9,
                "mode {m}: root {r} violates the Bessel condition by {:.2e}",
                (lhs - rhs).norm()
            );
        }
    }
}

#[test]
fn mit_conjugate_symmetry_between_signs() {
    // roots of MIT(+) are conjugates of roots of MIT(-)
    let region = Rect { re_lo: 0.1, re_hi: 5.2, im_lo: -2.0, im_hi: 2.0 };
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for (sign, out) in [(1i8, &mut plus), (-1i8, &mut minus)] {
        let bc = BoundaryCondition::MitBag { sign };
        let modes = reduce_modes(&disk(), Some(&bc), &[0]).unwrap();
        let p = ShootingProblem { mode: modes[0].clone(), region, base_steps: 2048 };
        *out = nonnormal_mode_roots(&p).unwrap();
    }
    assert_eq!(plus.len(), minus.len());
    for r in &plus {
        let conj = r.conj();
        assert!(
            minus.iter().any(|s| (s - conj).norm() < 1e-8),
            "conjugate of {r} missing from the opposite-sign spectrum"
        );
    }
}

#[test]
fn local_roots_match_the_real_bessel_oracle() {
    // local(-) in mode 0: J0 = J1; first root from the real Bessel oracle
    let f = |x: f64| diracbound::special::bessel_j(0, x) - diracbound::special::bessel_j(1, x);
    let (mut a, mut b) = (1.2f64, 1.7);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    let oracle = 0.5 * (a + b);
    let bc = BoundaryCondition::LocalChirality { sign: -1 };
    let opts = SpectrumOptions { k: 1, base_steps: 2048, ..Default::default() };
    let lam = spectrum(&disk(), Some(&bc), &opts).unwrap().smallest_abs().unwrap();
    assert!(
        (lam.norm() - oracle).abs() < 1e-9,
        "spectrum {} vs bessel oracle {oracle}",
        lam.norm()
    );
}

#[test]
fn lanczos_agrees_with_dense_on_torus_blocks() {
    // aggregate enough Fourier blocks for a ~1000-dimensional operator
    let bundle = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [1, 1] }).unwrap(),
    );
    let op = torus::assemble_dirac(&bundle, 22).unwrap();
    assert!(op.dim() >= 960, "dim {}", op.dim());
    // dense path on the same operator
    let dense = {
        let MatrixRepr::Blocks(blocks) = &op.repr else { panic!() };
        let n = op.dim();
        let mut m = diracbound::util::linalg::CMatrix::zeros(n, n);
        let mut off = 0;
        for (_, b) in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.rows;
        }
        OperatorMatrix {
            repr: MatrixRepr::Dense(m),
            symmetry: SymmetryFlag::Hermitian,
            bc: None,
            mode: None,
        }
    };
    let d = hermitian_eigs(&dense, 24, 1e-8).unwrap();
    let l = lanczos_smallest_abs(&op, 4, 1e-10, 320, 99).unwrap();
    for a in l.eigenvalues.iter() {
        let best = d.eigenvalues.iter().map(|b| (a - b).norm()).fold(f64::INFINITY, f64::min);
        assert!(best < 1e-8, "lanczos {a} unmatched by dense (best {best:.2e})");
    }
    for r in &l.residuals {
        assert!(*r < 1e-7);
    }
}

#[test]
fn bound_gap_sweep_across_the_catalog() {
    // the central property: gap = lhs - rhs >= -tol for every bound
    let tol = 1e-7;
    let opts = SpectrumOptions { k: 1, ..Default::default() };

    // closed geometries under t1/thm2
    let s2 = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::RoundSphere { n: 2, radius: 1.0 }).unwrap(),
    );
    let lam = spectrum(&s2, None, &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_t1(&s2).unwrap() >= -tol);

    let torus11 = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [1, 1] }).unwrap(),
    );
    let lam = spectrum(&torus11, None, &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_t1(&torus11).unwrap() >= -tol);

    let twisted = DiracBundleSpec::twisted(
        make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [0, 0] }).unwrap(),
        2.0 * std::f64::consts::PI,
    )
    .unwrap();
    let lam = spectrum(&twisted, None, &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_t1(&twisted).unwrap() >= -tol);

    let s3 = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::RoundSphere { n: 3, radius: 1.0 }).unwrap(),
    );
    let lam = spectrum(&s3, None, &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_thm2(&s3, 128).unwrap() >= -tol);

    // disk under all four conditions
    let d = disk();
    for sign in [1i8, -1] {
        let bc = BoundaryCondition::LocalChirality { sign };
        let lam = spectrum(&d, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
        let gap = lam.norm_sqr() - bounds::bound_t1(&d).unwrap();
        assert!(gap >= -tol, "local({sign}): gap {gap}");
    }
    {
        let bc = BoundaryCondition::MitBag { sign: 1 };
        let lam = spectrum(&d, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
        let gap = lam.norm_sqr() - bounds::bound_t1(&d).unwrap();
        assert!(gap >= -tol, "mit: gap {gap}");
    }
    for b in [-1.0f64, 0.0, 0.5] {
        let bc = BoundaryCondition::Aps { b };
        let lam = spectrum(&d, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
        let gap = lam.norm_sqr() - bounds::bound_aps(&d, b, 256).unwrap();
        assert!(gap >= -tol, "aps({b}): gap {gap}");
    }
    for b in [-1.0f64, 0.5] {
        let bc = BoundaryCondition::ModifiedAps { b, sign: 1 };
        let lam = spectrum(&d, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
        let gap = lam.norm_sqr() - bounds::bound_maps(&d, b, 256).unwrap();
        assert!(gap >= -tol, "maps({b}): gap {gap}");
    }

    // cylinder and annulus under the local condition (rhs closed forms)
    let cyl = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::Cylinder { length: 1.5, circumference: 1.0, spin: 1 })
            .unwrap(),
    );
    let bc = BoundaryCondition::LocalChirality { sign: 1 };
    let lam = spectrum(&cyl, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_t1(&cyl).unwrap() >= -tol);

    let ann = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::Annulus { r_in: 0.5, r_out: 1.5 }).unwrap(),
    );
    let lam = spectrum(&ann, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
    assert!(lam.norm_sqr() - bounds::bound_t1(&ann).unwrap() >= -tol);
}

#[test]
fn matrix_and_shooting_agree_on_annulus_and_cylinder() {
    // two independent routes to the same per-mode problems
    let cases: Vec<(DiracBundleSpec, f64)> = vec![
        (
            DiracBundleSpec::untwisted(
                make_geometry(GeometryKind::Annulus { r_in: 0.5, r_out: 1.5 }).unwrap(),
            ),
            6.0,
        ),
        (
            DiracBundleSpec::untwisted(
                make_geometry(GeometryKind::Cylinder {
                    length: 2.0,
                    circumference: 1.0,
                    spin: 1,
                })
                .unwrap(),
            ),
            7.0,
        ),
    ];
    let bc = BoundaryCondition::LocalChirality { sign: 1 };
    for (bundle, cap) in cases {
        for m in [0i64, 1] {
            let modes = reduce_modes(&bundle, Some(&bc), &[m]).unwrap();
            // per-mode floor: eigenvalues sit above the mode frequency
            let cap = cap + modes[0].w.value(modes[0].r1.max(1.0)).abs();
            let p = ShootingProblem {
                mode: modes[0].clone(),
                region: Rect { re_lo: -cap, re_hi: cap, im_lo: -0.5, im_hi: 0.5 },
                base_steps: 2048,
            };
            let roots =
                diracbound::eigensolve::shooting::real_axis_roots(&p, -cap, cap, 240).unwrap();
            assert!(!roots.is_empty());
            // the staggered matrix converges to the shooting roots at
            // second order; check the error contracts under refinement
            let err_at = |res: usize| -> f64 {
                let rm = assemble_radial(&modes[0], res).unwrap();
                let eig = &rm.eigenpairs(1).unwrap()[0];
                roots
                    .iter()
                    .map(|r| (r - eig.lambda).abs())
                    .fold(f64::INFINITY, f64::min)
            };
            let coarse = err_at(256);
            let fine = err_at(512);
            assert!(
                fine < 1e-3 && fine < 0.35 * coarse + 1e-9,
                "{:?} mode {m}: errors {coarse:.2e} -> {fine:.2e} do not contract",
                bundle.geometry.kind
            );
        }
    }
}

#[test]
fn killing_rate_fit_matches_lambda_over_n() {
    let s2 = DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::RoundSphere { n: 2, radius: 1.0 }).unwrap(),
    );
    let modes = reduce_modes(&s2, None, &[0]).unwrap();
    let rm = assemble_radial(&modes[0], 256).unwrap();
    let eig = &rm.eigenpairs(1).unwrap()[0];
    let fitted = identity::fit_killing_rate(&s2, eig);
    let expected = eig.lambda / 2.0;
    assert!(
        (fitted - expected).abs() < 1e-4,
        "fitted rate {fitted} vs -lambda/n = {expected}"
    );
    let (rep, _) = identity::check_ri(&s2, eig, fitted).unwrap();
    assert!(rep.residual < 1e-3, "RI residual {}", rep.residual);
}

#[test]
fn boundary_dirac_relation_is_exact() {
    for bundle in [
        disk(),
        DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::Annulus { r_in: 0.5, r_out: 1.0 }).unwrap(),
        ),
        DiracBundleSpec::untwisted(
            make_geometry(GeometryKind::Cylinder { length: 2.0, circumference: 1.0, spin: 1 })
                .unwrap(),
        ),
    ] {
        for model in boundary::boundary_models(&bundle).unwrap() {
            let res = boundary::dd_residual(&model, 16);
            assert!(res < 1e-12, "dd residual {res} on {model:?}");
        }
    }
}

#[test]
fn shooting_determinant_is_holomorphic() {
    let bc = BoundaryCondition::MitBag { sign: -1 };
    let modes = reduce_modes(&disk(), Some(&bc), &[0]).unwrap();
    let p = ShootingProblem {
        mode: modes[0].clone(),
        region: Rect { re_lo: 0.2, re_hi: 4.0, im_lo: -1.6, im_hi: 1.6 },
        base_steps: 1600,
    };
    for z in [C64::new(1.3, 0.4), C64::new(2.6, -0.8)] {
        let defect = p.cauchy_riemann_defect(z, 1e-5).unwrap();
        assert!(defect < 1e-6, "CR defect {defect:.2e} at {z}");
    }
}
