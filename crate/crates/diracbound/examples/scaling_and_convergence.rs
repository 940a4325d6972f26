//! Homothety covariance of spectra and bounds, and refinement studies of the
//! per-mode radial schemes against the shooting oracle.
//!
//! Run with: cargo run --release --example scaling_and_convergence

use diracbound::bundle::DiracBundleSpec;
use diracbound::eigensolve::shooting::{real_axis_roots, Rect, ShootingProblem};
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::identity;
use diracbound::operators::radial::{assemble_radial, reduce_modes};
use diracbound::operators::BoundaryCondition;
use diracbound::util::quad::fitted_order;

fn main() -> diracbound::Result<()> {
    let torus = DiracBundleSpec::untwisted(make_geometry(GeometryKind::FlatTorus2 {
        l1: 1.0,
        l2: 1.0,
        spin: [1, 1],
    })?);
    let disk = DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 })?);
    let local = BoundaryCondition::LocalChirality { sign: 1 };

    println!("sigma lambda(D_sigma) = lambda(D), worst relative deviation:");
    for sigma in [0.5f64, 2.0, 5.0] {
        let rt = identity::check_scaling(&torus, None, sigma, 4)?;
        let rd = identity::check_scaling(&disk, Some(&local), sigma, 3)?;
        println!("  sigma = {sigma:3}: torus {:.2e}, disk {:.2e}", rt.residual, rd.residual);
    }

    println!("\nper-mode radial scheme vs shooting root (disk, local, mode 0):");
    let modes = reduce_modes(&disk, Some(&local), &[0])?;
    let problem = ShootingProblem {
        mode: modes[0].clone(),
        region: Rect { re_lo: 0.3, re_hi: 4.4, im_lo: -0.5, im_hi: 0.5 },
        base_steps: 2048,
    };
    let reference = real_axis_roots(&problem, 0.3, 4.4, 64)?[0];
    println!("  shooting oracle root: {reference:.12}");
    let mut series = Vec::new();
    for res in [64usize, 128, 256, 512] {
        let rm = assemble_radial(&modes[0], res)?;
        let lam = rm
            .eigenpairs(4)?
            .iter()
            .map(|e| e.lambda)
            .filter(|l| *l > 0.0)
            .fold(f64::INFINITY, f64::min);
        println!("  resolution {res:4}: lambda = {lam:.12}, error = {:.3e}", (lam - reference).abs());
        series.push(((res as f64).recip(), (lam - reference).abs()));
    }
    println!("  fitted order {:.3}", fitted_order(&series));

    println!("\nBochner residual of the per-mode assemblies (S^2 mode, refining):");
    for res in [64usize, 128, 256] {
        let s2 = DiracBundleSpec::untwisted(make_geometry(GeometryKind::RoundSphere {
            n: 2,
            radius: 1.0,
        })?);
        let rep = identity::check_bochner_mode(&s2, None, 0, res)?;
        println!("  resolution {res:4}: residual = {:.3e}", rep.residual);
    }
    Ok(())
}
