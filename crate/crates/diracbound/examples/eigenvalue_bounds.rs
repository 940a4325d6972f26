//! Lower bounds against computed spectra: the curvature-integral bound in
//! dimension 2, the Robin-variational bound on the round 3-sphere, and the
//! APS-family bounds on the disk, with equality-case diagnostics.
//!
//! Run with: cargo run --release --example eigenvalue_bounds

use diracbound::bounds;
use diracbound::bundle::DiracBundleSpec;
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::operators::BoundaryCondition;
use diracbound::spectrum::{spectrum, SpectrumOptions};
use std::f64::consts::PI;

fn main() -> diracbound::Result<()> {
    let opts = SpectrumOptions { k: 1, ..Default::default() };

    println!("dimension-2 bound |lambda|^2 >= (2 int kappa + int_b H) / Vol:");
    {
        let s2 =
            DiracBundleSpec::untwisted(make_geometry(GeometryKind::RoundSphere { n: 2, radius: 1.0 })?);
        let lam = spectrum(&s2, None, &opts)?.smallest_abs().unwrap();
        let rhs = bounds::bound_t1(&s2)?;
        println!("  unit S^2 (Killing equality):  lambda^2 = {:.9}, bound = {rhs}", lam.norm_sqr());
    }
    {
        let disk = DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 })?);
        let bc = BoundaryCondition::LocalChirality { sign: 1 };
        let lam = spectrum(&disk, Some(&bc), &opts)?.smallest_abs().unwrap();
        let rhs = bounds::bound_t1(&disk)?;
        println!(
            "  unit disk, local:             lambda^2 = {:.9}, bound = {rhs}, gap = {:.4} (H = 1 obstructs equality)",
            lam.norm_sqr(),
            lam.norm_sqr() - rhs
        );
    }
    {
        let torus = DiracBundleSpec::twisted(
            make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [0, 0] })?,
            2.0 * PI,
        )?;
        let lam = spectrum(&torus, None, &opts)?.smallest_abs().unwrap();
        let rhs = bounds::bound_t1(&torus)?;
        println!(
            "  twisted torus (B = 2 pi):     lambda^2 = {:.6}, bound = {rhs:.6} (kappa = -2 pi)",
            lam.norm_sqr()
        );
    }

    println!("\nRobin-variational bound in dimension 3:");
    {
        let s3 =
            DiracBundleSpec::untwisted(make_geometry(GeometryKind::RoundSphere { n: 3, radius: 1.0 })?);
        let lam = spectrum(&s3, None, &opts)?.smallest_abs().unwrap();
        let rhs = bounds::bound_thm2(&s3, 256)?;
        println!("  unit S^3:  lambda^2 = {:.9}, bound = {rhs:.12} (equality at 9/4)", lam.norm_sqr());
        let vb = bounds::bound_volume(&s3, -1.0, 0.0)?;
        println!(
            "  volume bound (b <= 0): lambda^2 >= {:.6}, hypotheses_ok = {}",
            vb.rhs, vb.hypotheses_ok
        );
    }

    println!("\nAPS-family bounds on the unit disk:");
    let disk = DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 })?);
    for b in [-1.0f64, 0.0, 0.5] {
        let bc = BoundaryCondition::Aps { b };
        let lam = spectrum(&disk, Some(&bc), &opts)?.smallest_abs().unwrap();
        let rhs = bounds::bound_aps(&disk, b, 256)?;
        println!(
            "  APS(b = {b:+.1}): lambda_min^2 = {:.6}, bound = {rhs:.6}, gap = {:+.6}",
            lam.norm_sqr(),
            lam.norm_sqr() - rhs
        );
    }
    println!("  (b = 1/2 is the equality case: H = 2b with a parallel spinor)");

    println!("\nNeumann weight of the 2-dimensional proof on the unit disk:");
    let sol = bounds::solve_neumann_weight(&disk, 128)?;
    let mid = sol.nodes.len() / 2;
    println!(
        "  phi(r) = r^2/2 - 1/4: discrete phi({:.2}) = {:+.6} (closed form {:+.6})",
        sol.nodes[mid],
        sol.phi[mid],
        0.5 * sol.nodes[mid] * sol.nodes[mid] - 0.25
    );
    Ok(())
}
