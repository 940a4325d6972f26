//! Equality-case diagnostics: the round spheres realize the bounds exactly
//! through Killing-type ground spinors; the disk cannot because its boundary
//! is not minimal.
//!
//! Run with: cargo run --release --example sphere_equality_case

use diracbound::bounds;
use diracbound::bundle::DiracBundleSpec;
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::identity;
use diracbound::operators::radial::{assemble_radial, reduce_modes};
use diracbound::spectrum::{spectrum, SpectrumOptions};

fn main() -> diracbound::Result<()> {
    let opts = SpectrumOptions { k: 1, ..Default::default() };

    for n in [2usize, 3] {
        let sphere =
            DiracBundleSpec::untwisted(make_geometry(GeometryKind::RoundSphere { n, radius: 1.0 })?);
        let lam = spectrum(&sphere, None, &opts)?.smallest_abs().unwrap();
        println!("unit S^{n}: lambda_min = {:+.9} (exact n/2 = {:.1})", lam.re, n as f64 / 2.0);

        let modes = reduce_modes(&sphere, None, &[0])?;
        let rm = assemble_radial(&modes[0], 512)?;
        let eig = &rm.eigenpairs(1)?[0];
        let diag = bounds::equality_diagnostics_mode(&sphere, eig);
        println!(
            "  killing residual {:.3e}, curvature residual {:.3e}, max |H| {}, |kappa - (n-1)lambda^2/n| = {:.3e}",
            diag.killing_residual,
            diag.curvature_residual,
            diag.mean_curvature_max,
            diag.kappa_relation
        );
        let fitted = identity::fit_killing_rate(&sphere, eig);
        println!(
            "  fitted Killing rate a = {fitted:+.6} against lambda/n = {:+.6}",
            eig.lambda / n as f64
        );
        let (ri, _) = identity::check_ri(&sphere, eig, fitted)?;
        println!("  curvature identity: kappa = {:.4}, (n-1) n a^2 = {:.4}", ri.lhs, ri.rhs);
    }

    println!("\nunit disk, local condition: equality is obstructed by H = 1:");
    let disk = DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 })?);
    let bc = diracbound::operators::BoundaryCondition::LocalChirality { sign: 1 };
    let lam = spectrum(&disk, Some(&bc), &opts)?.smallest_abs().unwrap();
    let rhs = bounds::bound_t1(&disk)?;
    let modes = reduce_modes(&disk, Some(&bc), &[-1])?;
    let rm = assemble_radial(&modes[0], 256)?;
    let eig = &rm.eigenpairs(1)?[0];
    let diag = bounds::equality_diagnostics_mode(&disk, eig);
    println!(
        "  lambda^2 = {:.6} > bound {rhs}; max |H| = {} != 0, killing residual {:.3}",
        lam.norm_sqr(),
        diag.mean_curvature_max,
        diag.killing_residual
    );
    Ok(())
}
