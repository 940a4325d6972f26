//! Dirac spectra on flat tori: the four spin structures of the square torus
//! and the Landau levels of a twisted bundle.
//!
//! Run with: cargo run --release --example torus_spectrum

use diracbound::bundle::DiracBundleSpec;
use diracbound::geometry::{make_geometry, GeometryKind};
use diracbound::spectrum::{spectrum, SpectrumOptions};
use std::f64::consts::PI;

fn main() -> diracbound::Result<()> {
    let opts = SpectrumOptions { k: 5, ..Default::default() };

    println!("square torus, four spin structures, 5 smallest |lambda|:");
    for spin in [[0u8, 0], [1, 0], [0, 1], [1, 1]] {
        let bundle = DiracBundleSpec::untwisted(make_geometry(GeometryKind::FlatTorus2 {
            l1: 1.0,
            l2: 1.0,
            spin,
        })?);
        let spec = spectrum(&bundle, None, &opts)?;
        let values: Vec<String> = spec
            .entries
            .iter()
            .map(|e| format!("{:+.6} (x{})", e.lambda_re, e.multiplicity))
            .collect();
        println!("  delta = ({}, {}): {}", spin[0], spin[1], values.join(", "));
    }
    println!("  reference: the antiperiodic gap is pi sqrt(2) = {:.6}", PI * 2f64.sqrt());

    println!("\ntwisted bundle with flux quanta q (Landau levels +-sqrt(2 B m)):");
    for q in [1usize, 2] {
        let b = 2.0 * PI * q as f64;
        let bundle = DiracBundleSpec::twisted(
            make_geometry(GeometryKind::FlatTorus2 { l1: 1.0, l2: 1.0, spin: [0, 0] })?,
            b,
        )?;
        let spec = spectrum(&bundle, None, &opts)?;
        let values: Vec<String> = spec
            .entries
            .iter()
            .map(|e| format!("{:+.6} (x{})", e.lambda_re, e.multiplicity))
            .collect();
        println!("  q = {q} (B = {b:.4}): {}", values.join(", "));
        println!("    kernel multiplicity {} matches the flux by the index count", q);
    }
    Ok(())
}
