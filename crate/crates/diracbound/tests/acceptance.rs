//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one pass/fail line. The suite is a single sequential test so that the
//! wall-clock budget (criterion 11) is measured meaningfully.

use diracbound::bounds;
use diracbound::bundle::DiracBundleSpec;
use diracbound::eigensolve::shooting::{nonnormal_mode_roots, Rect, ShootingProblem};
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::identity;
use diracbound::operators::radial::{assemble_radial, reduce_modes};
use diracbound::operators::{boundary, BoundaryCondition};
use diracbound::spectrum::{spectrum, SpectrumOptions};
use diracbound::util::quad::fitted_order;
use diracbound::util::rng::SplitMix64;
use std::f64::consts::PI;
use std::time::Instant;

fn torus(spin: [u8; 2]) -> DiracBundleSpec {
    DiracBundleSpec::untwisted(
        make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin }).unwrap(),
    )
}

fn disk() -> DiracBundleSpec {
    DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 }).unwrap())
}

fn sphere(n: usize) -> DiracBundleSpec {
    DiracBundleSpec::untwisted(make_geometry(GeometryKind::RoundSphere { n, radius: 1.0 }).unwrap())
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!("criterion {id}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(format!("{id}: {detail}"));
        }
    }
}

#[test]
fn acceptance_suite() {
    let t0 = Instant::now();
    let mut gate = Gate { failures: Vec::new() };

    criterion_1_identity_suite(&mut gate);
    criterion_2_bochner_exactness(&mut gate);
    criterion_3_t1_equality_on_s2(&mut gate);
    criterion_4_t1_strict_on_disk(&mut gate);
    criterion_5_mit_spectral_structure(&mut gate);
    criterion_6_aps_equality(&mut gate);
    criterion_7_maps_dichotomy(&mut gate);
    criterion_8_scaling_covariance(&mut gate);
    criterion_9_thm2_round_s3(&mut gate);
    criterion_10_convergence_orders(&mut gate);

    let elapsed = t0.elapsed().as_secs_f64();
    gate.check("11", elapsed <= 300.0, format!("suite wall clock {elapsed:.1} s <= 300 s"));

    assert!(gate.failures.is_empty(), "failed criteria:\n{}", gate.failures.join("\n"));
}

fn criterion_1_identity_suite(gate: &mut Gate) {
    let t0 = Instant::now();
    let bundle = torus([0, 0]);
    let mut worst: f64 = 0.0;
    let mut worst_id = String::new();
    for i in 0..100u64 {
        let reports = identity::identity_suite_instance(&bundle, 1000 + i, 160).unwrap();
        for r in reports {
            if r.relative_residual() > worst {
                worst = r.relative_residual();
                worst_id = format!("{} (instance {i})", r.identity);
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    gate.check(
        "1",
        worst <= 1e-10 && elapsed <= 60.0,
        format!("100 instances of unw/pp2/est1/est11/est2: worst residual {worst:.2e} [{worst_id}], runtime {elapsed:.1} s"),
    );
}

fn criterion_2_bochner_exactness(gate: &mut Gate) {
    let mut worst: f64 = 0.0;
    for flux in [0.0, 2.0 * PI, 4.0 * PI] {
        let geometry =
            make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [0, 0] }).unwrap();
        let bundle = DiracBundleSpec::twisted(geometry, flux).unwrap();
        let rep = identity::check_bochner_torus(&bundle, 32).unwrap();
        worst = worst.max(rep.residual);
    }
    gate.check(
        "2",
        worst <= 1e-12,
        format!("max |D^2 - (lap + R)| over twists {{0, 2pi, 4pi}}: {worst:.2e}"),
    );
}

fn criterion_3_t1_equality_on_s2(gate: &mut Gate) {
    let bundle = sphere(2);
    let rhs = bounds::bound_t1(&bundle).unwrap();
    // shooting oracle lambda_min
    let opts = SpectrumOptions { k: 1, base_steps: 2048, ..Default::default() };
    let lam = spectrum(&bundle, None, &opts).unwrap().smallest_abs().unwrap();
    let lhs = lam.norm_sqr();
    // equality diagnostics on the discrete ground mode at resolution 512
    let modes = reduce_modes(&bundle, None, &[0]).unwrap();
    let rm = assemble_radial(&modes[0], 512).unwrap();
    let eig = &rm.eigenpairs(1).unwrap()[0];
    let diag = bounds::equality_diagnostics_mode(&bundle, eig);
    let ok = (rhs - 1.0).abs() < 1e-14
        && (lhs - 1.0).abs() <= 1e-3
        && diag.killing_residual <= 1e-4;
    gate.check(
        "3",
        ok,
        format!(
            "S^2: lambda_min^2 = {lhs:.9} in [1 +- 1e-3], rhs = {rhs}, killing residual {:.2e} <= 1e-4",
            diag.killing_residual
        ),
    );
}

fn criterion_4_t1_strict_on_disk(gate: &mut Gate) {
    let bundle = disk();
    let rhs = bounds::bound_t1(&bundle).unwrap();
    let bc = BoundaryCondition::LocalChirality { sign: 1 };
    let opts = SpectrumOptions { k: 1, base_steps: 2048, ..Default::default() };
    let lam = spectrum(&bundle, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
    let lhs = lam.norm_sqr();
    let gap = lhs - rhs;
    gate.check(
        "4",
        (rhs - 2.0).abs() < 1e-14 && lhs >= 2.0 && gap > 0.02,
        format!("disk local: rhs = {rhs}, lambda_min^2 = {lhs:.9}, gap = {gap:.4} > 0.02"),
    );
}

fn criterion_5_mit_spectral_structure(gate: &mut Gate) {
    let bundle = disk();
    // 10 smallest MIT roots all have |Im| > 1e-6
    let opts = SpectrumOptions { k: 10, base_steps: 2048, ..Default::default() };
    let mit = spectrum(&bundle, Some(&BoundaryCondition::MitBag { sign: 1 }), &opts).unwrap();
    let mut count = 0usize;
    let mut min_im = f64::INFINITY;
    for e in &mit.entries {
        for _ in 0..e.multiplicity {
            if count < 10 {
                min_im = min_im.min(e.lambda_im.abs());
                count += 1;
            }
        }
    }
    // real-spectrum conditions: complex search certifies |Im| tiny
    let mut max_im_rel: f64 = 0.0;
    for bc in [
        BoundaryCondition::LocalChirality { sign: 1 },
        BoundaryCondition::Aps { b: 0.0 },
        BoundaryCondition::ModifiedAps { b: -1.0, sign: 1 },
    ] {
        for m in [0i64, 1, -2] {
            let modes = reduce_modes(&bundle, Some(&bc), &[m]).unwrap();
            let mode = &modes[0];
            if mode.is_overdetermined() || mode.has_condition_gap().is_some() {
                continue;
            }
            let problem = ShootingProblem {
                mode: mode.clone(),
                region: Rect { re_lo: -7.3, re_hi: 7.3, im_lo: -1.5, im_hi: 1.5 },
                base_steps: 2048,
            };
            let roots = nonnormal_mode_roots(&problem).unwrap();
            let scale = roots.iter().map(|r| r.norm()).fold(0.0, f64::max).max(1e-300);
            for r in &roots {
                max_im_rel = max_im_rel.max(r.im.abs() / scale);
            }
        }
    }
    let ok = count == 10 && min_im > 1e-6 && max_im_rel <= 1e-8;
    gate.check(
        "5",
        ok,
        format!(
            "MIT: min |Im lambda| over 10 smallest = {min_im:.3e} > 1e-6; local/APS/mAPS max |Im|/|lambda| = {max_im_rel:.2e} <= 1e-8"
        ),
    );
}

fn criterion_6_aps_equality(gate: &mut Gate) {
    let bundle = disk();
    let rhs = bounds::bound_aps(&bundle, 0.5, 512).unwrap();
    let bc = BoundaryCondition::Aps { b: 0.5 };
    let opts = SpectrumOptions { k: 1, ..Default::default() };
    let lam = spectrum(&bundle, Some(&bc), &opts).unwrap().smallest_abs().unwrap();
    // constant-spinor boundary trace: a 1/2-eigensection of Dbar
    let models = boundary::boundary_models(&bundle).unwrap();
    let trace = boundary::BoundarySection {
        model: models[0],
        modes: vec![
            (0, num_complex::Complex64::new(1.0, 0.0), num_complex::Complex64::new(0.0, 0.0)),
            (-1, num_complex::Complex64::new(0.0, 0.0), num_complex::Complex64::new(1.0, 0.0)),
        ],
    };
    let dt = trace.dbar();
    let mut eig_defect: f64 = 0.0;
    for ((_, p, q), (_, dp, dq)) in trace.modes.iter().zip(dt.modes.iter()) {
        eig_defect = eig_defect.max((dp - p * 0.5).norm()).max((dq - q * 0.5).norm());
    }
    let ok = rhs.abs() <= 1e-10 && lam.norm() <= 1e-8 && eig_defect <= 1e-6;
    gate.check(
        "6",
        ok,
        format!(
            "APS b=1/2 on disk: rhs = {rhs:.2e}, lambda_min = {:.2e}, Dbar(trace) - trace/2 = {eig_defect:.2e}",
            lam.norm()
        ),
    );
}

fn criterion_7_maps_dichotomy(gate: &mut Gate) {
    let bundle = disk();
    let models = boundary::boundary_models(&bundle).unwrap();
    let mut rng = SplitMix64::new(2024);
    let mut worst_zero: f64 = 0.0;
    let mut worst_pos: f64 = 0.0;
    for trial in 0..50 {
        let raw = boundary::BoundarySection {
            model: models[0],
            modes: (-10..10).map(|m| (m, rng.complex_normal(), rng.complex_normal())).collect(),
        };
        let b_neg = [-2.0, -0.7, 0.0][trial % 3];
        let t = boundary::project_trace(
            &BoundaryCondition::ModifiedAps { b: b_neg, sign: if trial % 2 == 0 { 1 } else { -1 } },
            &raw,
        );
        worst_zero = worst_zero.max(t.dbar_pairing().abs() / t.norm_sq().max(1e-30));
        let b_pos = [0.6, 1.7][trial % 2];
        let t = boundary::project_trace(
            &BoundaryCondition::ModifiedAps { b: b_pos, sign: 1 },
            &raw,
        );
        worst_pos = worst_pos
            .max((t.dbar_pairing() - b_pos * t.norm_sq() - 1e-10) / t.norm_sq().max(1e-30));
    }
    let ok = worst_zero <= 1e-10 && worst_pos <= 0.0;
    gate.check(
        "7",
        ok,
        format!(
            "50 projected sections: b<=0 pairing defect {worst_zero:.2e} <= 1e-10, b>0 excess {worst_pos:.2e} <= 0"
        ),
    );
}

fn criterion_8_scaling_covariance(gate: &mut Gate) {
    let mut worst_spec: f64 = 0.0;
    let mut worst_rhs: f64 = 0.0;
    let disk_bc = BoundaryCondition::LocalChirality { sign: 1 };
    for sigma in [0.5f64, 2.0, 5.0] {
        let r = identity::check_scaling(&torus([1, 1]), None, sigma, 4).unwrap();
        worst_spec = worst_spec.max(r.residual);
        let r = identity::check_scaling(&disk(), Some(&disk_bc), sigma, 3).unwrap();
        worst_spec = worst_spec.max(r.residual);
        // bound right-hand sides scale as sigma^{-2}
        let base_t1 = bounds::bound_t1(&disk()).unwrap();
        let scaled_t1 = bounds::bound_t1(&disk().rescale(sigma).unwrap()).unwrap();
        worst_rhs = worst_rhs.max((scaled_t1 - base_t1 / (sigma * sigma)).abs() / base_t1.abs());
        let base_aps = bounds::bound_aps(&disk(), -0.5, 256).unwrap();
        let scaled_aps =
            bounds::bound_aps(&disk().rescale(sigma).unwrap(), -0.5 / sigma, 256).unwrap();
        worst_rhs = worst_rhs.max((scaled_aps - base_aps / (sigma * sigma)).abs() / base_aps.abs());
        let s3 = sphere(3);
        let base_vol = bounds::bound_volume(&s3, -1.0, 0.0).unwrap().rhs;
        let scaled_vol =
            bounds::bound_volume(&s3.rescale(sigma).unwrap(), -1.0 / sigma, 0.0).unwrap().rhs;
        worst_rhs = worst_rhs.max((scaled_vol - base_vol / (sigma * sigma)).abs() / base_vol);
    }
    let ok = worst_spec <= 1e-8 && worst_rhs <= 1e-8;
    gate.check(
        "8",
        ok,
        format!(
            "sigma in {{1/2, 2, 5}}: spectra deviation {worst_spec:.2e}, bound rhs deviation {worst_rhs:.2e}"
        ),
    );
}

fn criterion_9_thm2_round_s3(gate: &mut Gate) {
    let bundle = sphere(3);
    let rhs = bounds::bound_thm2(&bundle, 256).unwrap();
    let opts = SpectrumOptions { k: 1, base_steps: 2048, ..Default::default() };
    let lam = spectrum(&bundle, None, &opts).unwrap().smallest_abs().unwrap();
    let lhs = lam.norm_sqr();
    let ok = (rhs - 2.25).abs() <= 1e-10 && (lhs - 2.25).abs() <= 1e-7;
    gate.check(
        "9",
        ok,
        format!("S^3: bound_thm2 = {rhs:.12} (target 9/4 +- 1e-10), lambda_min^2 = {lhs:.9}"),
    );
}

fn criterion_10_convergence_orders(gate: &mut Gate) {
    let resolutions = [64usize, 128, 256, 512];
    // disk local mode 0 against the shooting root
    let bc = BoundaryCondition::LocalChirality { sign: 1 };
    let modes = reduce_modes(&disk(), Some(&bc), &[0]).unwrap();
    let problem = ShootingProblem {
        mode: modes[0].clone(),
        region: Rect { re_lo: 0.3, re_hi: 4.4, im_lo: -0.5, im_hi: 0.5 },
        base_steps: 2048,
    };
    let reference =
        diracbound::eigensolve::shooting::real_axis_roots(&problem, 0.3, 4.4, 64).unwrap()[0];
    let mut disk_series = Vec::new();
    let mut b1_series = Vec::new();
    for res in resolutions {
        let rm = assemble_radial(&modes[0], res).unwrap();
        let eigs = rm.eigenpairs(4).unwrap();
        let lam = eigs
            .iter()
            .map(|e| e.lambda)
            .filter(|l| *l > 0.0)
            .fold(f64::INFINITY, f64::min);
        disk_series.push(((res as f64).recip(), (lam - reference).abs()));
        let ground = &eigs[0];
        let rep = identity::check_boundary_trace(ground, "b1").unwrap();
        b1_series.push(((res as f64).recip(), rep.relative_residual()));
    }
    let disk_order = fitted_order(&disk_series);

    // sphere mode against the exact lowest eigenvalue 1
    let smodes = reduce_modes(&sphere(2), None, &[0]).unwrap();
    let mut sphere_series = Vec::new();
    for res in resolutions {
        let rm = assemble_radial(&smodes[0], res).unwrap();
        let lam = rm.eigenpairs(1).unwrap()[0].lambda.abs();
        sphere_series.push(((res as f64).recip(), (lam - 1.0).abs()));
    }
    let sphere_order = fitted_order(&sphere_series);
    let b1_order = fitted_order(&b1_series);

    let ok = disk_order >= 1.9 && sphere_order >= 1.9 && b1_order >= 1.0;
    gate.check(
        "10",
        ok,
        format!(
            "fitted orders: disk eigenvalue {disk_order:.2} >= 1.9, sphere eigenvalue {sphere_order:.2} >= 1.9, boundary identity {b1_order:.2} >= 1.0"
        ),
    );
}
