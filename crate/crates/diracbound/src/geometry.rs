//! Model-geometry catalog with exact metric data: volumes, boundary measure,
//! scalar curvature, mean curvature, spin structures, and homothetic rescaling.

use crate::error::{DiracError, Result};
use crate::util::quad::gauss_composite;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum GeometryKind {
    /// Flat torus R^2 / (L1 Z x L2 Z) with spin structure delta in {0,1}^2.
    FlatTorus2 { l1: f64, l2: f64, spin: [u8; 2] },
    /// Round sphere S^n of radius rho, n in {2, 3}.
    RoundSphere { n: usize, radius: f64 },
    /// Flat disk of radius rho.
    UnitDisk { radius: f64 },
    /// Flat annulus rho_in < r < rho_out.
    Annulus { r_in: f64, r_out: f64 },
    /// Flat cylinder [0, L] x S^1_C with spin structure delta in {0,1}
    /// around the circumference.
    Cylinder { length: f64, circumference: f64, spin: u8 },
}

/// A catalog geometry together with the cumulative homothety factor applied
/// through `rescale` (kept for reporting; all invariants live in the scaled
/// parameters themselves).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub kind: GeometryKind,
    pub scale: f64,
}

/// One boundary circle of a catalog geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryComponent {
    /// circumference of the component
    pub length: f64,
    /// constant mean curvature w.r.t. the outward normal
    pub mean_curvature: f64,
    /// spin structure of the induced circle bundle: 0 periodic, 1 antiperiodic
    pub spin: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricInvariants {
    pub volume: f64,
    pub boundary_area: f64,
    pub scalar_curvature: f64,
    /// (component label, H) pairs; empty when closed
    pub mean_curvature: Vec<f64>,
    pub has_boundary: bool,
}

pub fn make_geometry(kind: GeometryKind) -> Result<GeometrySpec> {
    validate(&kind)?;
    Ok(GeometrySpec { kind, scale: 1.0 })
}

fn validate(kind: &GeometryKind) -> Result<()> {
    let positive = |v: f64, name: &str| -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(DiracError::parameter(format!("{name} must be strictly positive, got {v}")))
        }
    };
    match kind {
        GeometryKind::FlatTorus2 { l1, l2, spin } => {
            positive(*l1, "L1")?;
            positive(*l2, "L2")?;
            if spin[0] > 1 || spin[1] > 1 {
                return Err(DiracError::parameter("spin structure components must be 0 or 1"));
            }
        }
        GeometryKind::RoundSphere { n, radius } => {
            if *n != 2 && *n != 3 {
                return Err(DiracError::Dimension(*n));
            }
            positive(*radius, "radius")?;
        }
        GeometryKind::UnitDisk { radius } => positive(*radius, "radius")?,
        GeometryKind::Annulus { r_in, r_out } => {
            positive(*r_in, "r_in")?;
            positive(*r_out, "r_out")?;
            if r_in >= r_out {
                return Err(DiracError::parameter(format!(
                    "annulus requires r_in < r_out, got {r_in} >= {r_out}"
                )));
            }
        }
        GeometryKind::Cylinder { length, circumference, spin } => {
            positive(*length, "length")?;
            positive(*circumference, "circumference")?;
            if *spin > 1 {
                return Err(DiracError::parameter("spin structure must be 0 or 1"));
            }
        }
    }
    Ok(())
}

impl GeometrySpec {
    pub fn dim(&self) -> usize {
        match &self.kind {
            GeometryKind::RoundSphere { n, .. } => *n,
            _ => 2,
        }
    }

    pub fn invariants(&self) -> GeometricInvariants {
        match &self.kind {
            GeometryKind::FlatTorus2 { l1, l2, .. } => GeometricInvariants {
                volume: l1 * l2,
                boundary_area: 0.0,
                scalar_curvature: 0.0,
                mean_curvature: vec![],
                has_boundary: false,
            },
            GeometryKind::RoundSphere { n, radius } => {
                let volume = match n {
                    2 => 4.0 * PI * radius * radius,
                    3 => 2.0 * PI * PI * radius.powi(3),
                    _ => unreachable!(),
                };
                GeometricInvariants {
                    volume,
                    boundary_area: 0.0,
                    scalar_curvature: (*n as f64) * (*n as f64 - 1.0) / (radius * radius),
                    mean_curvature: vec![],
                    has_boundary: false,
                }
            }
            GeometryKind::UnitDisk { radius } => GeometricInvariants {
                volume: PI * radius * radius,
                boundary_area: 2.0 * PI * radius,
                scalar_curvature: 0.0,
                mean_curvature: vec![1.0 / radius],
                has_boundary: true,
            },
            GeometryKind::Annulus { r_in, r_out } => GeometricInvariants {
                volume: PI * (r_out * r_out - r_in * r_in),
                boundary_area: 2.0 * PI * (r_in + r_out),
                scalar_curvature: 0.0,
                // outward normal points away from the annulus on both circles
                mean_curvature: vec![-1.0 / r_in, 1.0 / r_out],
                has_boundary: true,
            },
            GeometryKind::Cylinder { length, circumference, .. } => GeometricInvariants {
                volume: length * circumference,
                boundary_area: 2.0 * circumference,
                scalar_curvature: 0.0,
                mean_curvature: vec![0.0, 0.0],
                has_boundary: true,
            },
        }
    }

    pub fn boundary_components(&self) -> Vec<BoundaryComponent> {
        match &self.kind {
            GeometryKind::UnitDisk { radius } => vec![BoundaryComponent {
                length: 2.0 * PI * radius,
                mean_curvature: 1.0 / radius,
                // bounding circle carries the antiperiodic structure
                spin: 1,
            }],
            GeometryKind::Annulus { r_in, r_out } => vec![
                BoundaryComponent { length: 2.0 * PI * r_in, mean_curvature: -1.0 / r_in, spin: 1 },
                BoundaryComponent { length: 2.0 * PI * r_out, mean_curvature: 1.0 / r_out, spin: 1 },
            ],
            GeometryKind::Cylinder { circumference, spin, .. } => vec![
                BoundaryComponent { length: *circumference, mean_curvature: 0.0, spin: *spin },
                BoundaryComponent { length: *circumference, mean_curvature: 0.0, spin: *spin },
            ],
            _ => vec![],
        }
    }

    /// The geometry carrying the homothetic metric sigma^2 g.
    pub fn rescale(&self, sigma: f64) -> Result<GeometrySpec> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(DiracError::parameter(format!("rescale factor must be positive, got {sigma}")));
        }
        let kind = match &self.kind {
            GeometryKind::FlatTorus2 { l1, l2, spin } => {
                GeometryKind::FlatTorus2 { l1: sigma * l1, l2: sigma * l2, spin: *spin }
            }
            GeometryKind::RoundSphere { n, radius } => {
                GeometryKind::RoundSphere { n: *n, radius: sigma * radius }
            }
            GeometryKind::UnitDisk { radius } => GeometryKind::UnitDisk { radius: sigma * radius },
            GeometryKind::Annulus { r_in, r_out } => {
                GeometryKind::Annulus { r_in: sigma * r_in, r_out: sigma * r_out }
            }
            GeometryKind::Cylinder { length, circumference, spin } => GeometryKind::Cylinder {
                length: sigma * length,
                circumference: sigma * circumference,
                spin: *spin,
            },
        };
        Ok(GeometrySpec { kind, scale: self.scale * sigma })
    }

    /// Volume by numerical quadrature, the cross-check for the closed forms.
    pub fn volume_by_quadrature(&self, cells: usize) -> f64 {
        match &self.kind {
            GeometryKind::FlatTorus2 { l1, l2, .. } => {
                // flat density: quadrature of the constant 1 is exact
                let n = cells.max(4);
                let mut acc = 0.0;
                let (h1, h2) = (l1 / n as f64, l2 / n as f64);
                for _ in 0..n {
                    for _ in 0..n {
                        acc += h1 * h2;
                    }
                }
                acc
            }
            GeometryKind::RoundSphere { n, radius } => {
                let sphere_area: f64 = match n {
                    2 => 2.0 * PI,      // azimuthal measure for n = 2 slices (circle)
                    3 => 4.0 * PI,      // S^2 slice area at unit radius
                    _ => unreachable!(),
                };
                let rn = radius.powi(*n as i32);
                let k = (*n - 1) as i32;
                sphere_area * rn * gauss_composite(0.0, PI, cells.max(8), |chi| chi.sin().powi(k))
            }
            GeometryKind::UnitDisk { radius } => {
                2.0 * PI * gauss_composite(0.0, *radius, cells.max(8), |r| r)
            }
            GeometryKind::Annulus { r_in, r_out } => {
                2.0 * PI * gauss_composite(*r_in, *r_out, cells.max(8), |r| r)
            }
            GeometryKind::Cylinder { length, circumference, .. } => {
                circumference * gauss_composite(0.0, *length, cells.max(4), |_| 1.0)
            }
        }
    }
}
