//! Exact torus discretizations. Untwisted bundles diagonalize over the dual
//! lattice shifted by delta/2; twisted bundles (constant curvature B with
//! integer flux) are assembled in the exact Landau-ladder basis, where the
//! Bochner identity holds to rounding.

use super::{MatrixRepr, ModeKey, OperatorMatrix, SymmetryFlag};
use crate::bundle::DiracBundleSpec;
use crate::error::{DiracError, Result};
use crate::geometry::GeometryKind;
use crate::util::linalg::CMatrix;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub struct TorusData {
    pub l1: f64,
    pub l2: f64,
    pub spin: [u8; 2],
}

pub fn torus_data(bundle: &DiracBundleSpec) -> Result<TorusData> {
    match bundle.geometry.kind {
        GeometryKind::FlatTorus2 { l1, l2, spin } => Ok(TorusData { l1, l2, spin }),
        _ => Err(DiracError::capability("torus assembly requires a flat torus geometry")),
    }
}

/// Dual-lattice mode set for a given resolution (resolution modes per axis).
pub fn torus_modes(resolution: usize) -> Vec<(i64, i64)> {
    let half = resolution as i64 / 2;
    let lo = -half;
    let hi = resolution as i64 - half; // exclusive
    let mut out = Vec::with_capacity(resolution * resolution);
    for k1 in lo..hi {
        for k2 in lo..hi {
            out.push((k1, k2));
        }
    }
    out
}

/// Frequency vector of a mode: xi_i = 2 pi (k_i + delta_i/2) / L_i.
pub fn mode_frequency(data: &TorusData, k: (i64, i64)) -> [f64; 2] {
    [
        2.0 * PI * (k.0 as f64 + data.spin[0] as f64 / 2.0) / data.l1,
        2.0 * PI * (k.1 as f64 + data.spin[1] as f64 / 2.0) / data.l2,
    ]
}

fn dirac_block(xi: [f64; 2]) -> CMatrix {
    // i (xi_1 gamma_1 + xi_2 gamma_2) with gamma_k = i sigma_k
    CMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(-xi[0], xi[1])],
        vec![c(-xi[0], -xi[1]), c(0.0, 0.0)],
    ])
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 8 {
        return Err(DiracError::Resolution { got: resolution, min: 8 });
    }
    Ok(())
}

enum TorusOp {
    Dirac,
    ConnectionLaplacian,
    Curvature,
}

fn assemble(bundle: &DiracBundleSpec, resolution: usize, which: TorusOp) -> Result<OperatorMatrix> {
    check_resolution(resolution)?;
    let data = torus_data(bundle)?;
    let q = bundle.torus_flux()?;
    let mut blocks: Vec<(ModeKey, CMatrix)> = Vec::new();
    if q == 0 {
        for k in torus_modes(resolution) {
            let xi = mode_frequency(&data, k);
            let key = ModeKey::Fourier { k1: k.0, k2: k.1 };
            let block = match which {
                TorusOp::Dirac => dirac_block(xi),
                TorusOp::ConnectionLaplacian => {
                    let norm2 = xi[0] * xi[0] + xi[1] * xi[1];
                    CMatrix::from_rows(&[
                        vec![c(norm2, 0.0), c(0.0, 0.0)],
                        vec![c(0.0, 0.0), c(norm2, 0.0)],
                    ])
                }
                TorusOp::Curvature => CMatrix::zeros(2, 2),
            };
            blocks.push((key, block));
        }
    } else {
        // Landau towers: chirality-split ladder with levels 0..M-1 (upper)
        // and 0..M (lower); q identical towers realize the flux degeneracy.
        let b = bundle.twist;
        let m_levels = resolution;
        for tower in 0..q {
            let key = ModeKey::Tower { index: tower };
            let dim = 2 * m_levels + 1;
            let block = match which {
                TorusOp::Dirac => {
                    let mut mat = CMatrix::zeros(dim, dim);
                    let s = (2.0 * b).sqrt();
                    // upper indices 0..M-1, lower indices M..2M
                    for m in 0..m_levels {
                        let amp = s * ((m + 1) as f64).sqrt();
                        // C[m, m+1] = i s sqrt(m+1) acting on lower coefficients
                        mat[(m, m_levels + m + 1)] = c(0.0, amp);
                        mat[(m_levels + m + 1, m)] = c(0.0, -amp);
                    }
                    mat
                }
                TorusOp::ConnectionLaplacian => {
                    let mut mat = CMatrix::zeros(dim, dim);
                    for m in 0..m_levels {
                        mat[(m, m)] = c(b * (2.0 * m as f64 + 1.0), 0.0);
                    }
                    for m in 0..=m_levels {
                        mat[(m_levels + m, m_levels + m)] = c(b * (2.0 * m as f64 + 1.0), 0.0);
                    }
                    mat
                }
                TorusOp::Curvature => {
                    let mut mat = CMatrix::zeros(dim, dim);
                    for m in 0..m_levels {
                        mat[(m, m)] = c(b, 0.0);
                    }
                    for m in 0..=m_levels {
                        mat[(m_levels + m, m_levels + m)] = c(-b, 0.0);
                    }
                    mat
                }
            };
            blocks.push((key, block));
        }
    }
    Ok(OperatorMatrix {
        repr: MatrixRepr::Blocks(blocks),
        symmetry: SymmetryFlag::Hermitian,
        bc: None,
        mode: None,
    })
}

pub fn assemble_dirac(bundle: &DiracBundleSpec, resolution: usize) -> Result<OperatorMatrix> {
    assemble(bundle, resolution, TorusOp::Dirac)
}

pub fn assemble_connection_laplacian(
    bundle: &DiracBundleSpec,
    resolution: usize,
) -> Result<OperatorMatrix> {
    assemble(bundle, resolution, TorusOp::ConnectionLaplacian)
}

pub fn assemble_curvature(bundle: &DiracBundleSpec, resolution: usize) -> Result<OperatorMatrix> {
    assemble(bundle, resolution, TorusOp::Curvature)
}

/// Exact Dirac eigenvalues of the discretized torus operator, sorted by
/// modulus, with multiplicity.
pub fn exact_eigenvalues(bundle: &DiracBundleSpec, resolution: usize) -> Result<Vec<f64>> {
    let data = torus_data(bundle)?;
    let q = bundle.torus_flux()?;
    let mut out = Vec::new();
    if q == 0 {
        for k in torus_modes(resolution) {
            let xi = mode_frequency(&data, k);
            let norm = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
            out.push(norm);
            out.push(-norm);
        }
    } else {
        let b = bundle.twist;
        for _ in 0..q {
            out.push(0.0);
            for m in 1..=resolution {
                let v = (2.0 * b * m as f64).sqrt();
                out.push(v);
                out.push(-v);
            }
        }
    }
    out.sort_by(|a, b| {
        a.abs()
            .partial_cmp(&b.abs())
            .unwrap()
            .then(a.partial_cmp(b).unwrap())
    });
    Ok(out)
}
