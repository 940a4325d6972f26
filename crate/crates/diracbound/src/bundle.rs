//! Dirac bundles over the model geometries: the spinor bundle of the
//! geometry, optionally twisted by a rank-1 unitary line bundle with constant
//! curvature B.

use crate::clifford::{CliffordRep, CurvatureEndo};
use crate::error::{DiracError, Result};
use crate::geometry::{GeometryKind, GeometrySpec};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracBundleSpec {
    pub geometry: GeometrySpec,
    /// Constant twist curvature B; the twist 2-form is R^twist_12 = iB.
    pub twist: f64,
}

impl DiracBundleSpec {
    pub fn untwisted(geometry: GeometrySpec) -> Self {
        DiracBundleSpec { geometry, twist: 0.0 }
    }

    pub fn twisted(geometry: GeometrySpec, twist: f64) -> Result<Self> {
        if twist != 0.0 && geometry.dim() != 2 {
            return Err(DiracError::capability(
                "line-bundle twists are supported on 2-dimensional geometries only",
            ));
        }
        Ok(DiracBundleSpec { geometry, twist })
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn clifford(&self) -> CliffordRep {
        CliffordRep::build(self.dim()).expect("catalog dimensions are 2 or 3")
    }

    /// Curvature endomorphism at a point of the geometry's domain.
    /// All catalog geometries have constant scalar curvature and constant
    /// twist, so the point only participates in the domain check.
    pub fn curvature_endomorphism(&self, x: &[f64]) -> Result<CurvatureEndo> {
        self.check_in_domain(x)?;
        let rep = self.clifford();
        CurvatureEndo::assemble(&rep, self.geometry.invariants().scalar_curvature, self.twist)
    }

    /// kappa(x); constant over the catalog.
    pub fn kappa(&self) -> f64 {
        let r = self.geometry.invariants().scalar_curvature;
        0.25 * r - self.twist.abs()
    }

    /// Flux quantum of the twist over a torus: B Vol / (2 pi) must be a
    /// nonnegative integer for a genuine line bundle.
    pub fn torus_flux(&self) -> Result<usize> {
        let GeometryKind::FlatTorus2 { l1, l2, .. } = self.geometry.kind else {
            return Err(DiracError::capability("flux quantum is defined for torus bundles"));
        };
        let q = self.twist * l1 * l2 / (2.0 * PI);
        if q < -1e-9 {
            return Err(DiracError::capability(
                "negative twist fluxes are handled by orientation reversal; pass B >= 0",
            ));
        }
        let rounded = q.round();
        if (q - rounded).abs() > 1e-9 {
            return Err(DiracError::parameter(format!(
                "twist flux B*Vol/(2 pi) = {q} is not an integer; the twist is not a line bundle"
            )));
        }
        Ok(rounded as usize)
    }

    /// sigma^2 g homothety of the bundle: lengths scale by sigma, the twist
    /// curvature by sigma^{-2} (the flux is invariant).
    pub fn rescale(&self, sigma: f64) -> Result<Self> {
        Ok(DiracBundleSpec {
            geometry: self.geometry.rescale(sigma)?,
            twist: self.twist / (sigma * sigma),
        })
    }

    fn check_in_domain(&self, x: &[f64]) -> Result<()> {
        match &self.geometry.kind {
            GeometryKind::UnitDisk { radius } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                if r > *radius * (1.0 + 1e-12) {
                    return Err(DiracError::parameter(format!("point at r = {r} outside disk")));
                }
            }
            GeometryKind::Annulus { r_in, r_out } => {
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                if r < r_in * (1.0 - 1e-12) || r > r_out * (1.0 + 1e-12) {
                    return Err(DiracError::parameter(format!("point at r = {r} outside annulus")));
                }
            }
            _ => {}
        }
        Ok(())
    }
}
