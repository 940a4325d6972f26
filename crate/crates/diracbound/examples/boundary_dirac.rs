//! The induced boundary Dirac operator: exact spectra on the boundary
//! circles, the interior-boundary operator relation, and the pairing
//! dichotomy of the modified APS projector.
//!
//! Run with: cargo run --release --example boundary_dirac

use diracbound::bundle::DiracBundleSpec;
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::operators::boundary::{
    boundary_dirac_spectrum, boundary_models, dd_residual, project_trace, BoundarySection,
};
use diracbound::operators::BoundaryCondition;
use diracbound::util::rng::SplitMix64;

fn main() -> diracbound::Result<()> {
    let disk = DiracBundleSpec::untwisted(make_geometry(GeometryKind::UnitDisk { radius: 1.0 })?);
    let cyl = DiracBundleSpec::untwisted(make_geometry(GeometryKind::Cylinder {
        length: 2.0,
        circumference: 1.0,
        spin: 1,
    })?);

    println!("Dbar spectrum on the unit-disk boundary (half-integers):");
    let spec = boundary_dirac_spectrum(&disk, 8)?;
    println!("  {:?}", &spec[..8.min(spec.len())]);

    println!("\nDbar spectrum on an antiperiodic cylinder end (offset by 1/2):");
    let spec = boundary_dirac_spectrum(&cyl, 8)?;
    println!("  {:?}", &spec[..6.min(spec.len())]);

    println!("\ninterior-boundary relation sum nu.e_a.grad_a = Dbar - (n-1)H/2:");
    for bundle in [&disk, &cyl] {
        for model in boundary_models(bundle)? {
            println!(
                "  component {} (H = {:+.3}): residual {:.2e}",
                model.component,
                model.mean_curvature,
                dd_residual(&model, 16)
            );
        }
    }

    println!("\npairing dichotomy of modified-APS projected sections:");
    let models = boundary_models(&disk)?;
    let mut rng = SplitMix64::new(11);
    for b in [-1.0f64, -0.25, 0.0, 0.5, 1.5] {
        let raw = BoundarySection {
            model: models[0],
            modes: (-8..8).map(|m| (m, rng.complex_normal(), rng.complex_normal())).collect(),
        };
        let t = project_trace(&BoundaryCondition::ModifiedAps { b, sign: 1 }, &raw);
        let pairing = t.dbar_pairing();
        let norm = t.norm_sq();
        if b <= 0.0 {
            println!("  b = {b:+.2}: int <Dbar t, t> = {pairing:+.3e} (zero for b <= 0)");
        } else {
            println!(
                "  b = {b:+.2}: int <Dbar t, t> = {:+.6} <= b ||t||^2 = {:.6}",
                pairing,
                b * norm
            );
        }
    }
    Ok(())
}
