//! Numerical spectral geometry for Dirac operators on model geometries.
//!
//! The crate computes Dirac spectra on flat tori (exact Fourier and Landau
//! bases), disks, annuli, cylinders and round spheres (per-angular-mode
//! radial reductions), under MIT bag, local chirality, b-APS and modified
//! b-APS boundary conditions. On top of the spectra it evaluates eigenvalue
//! lower bounds driven by curvature integrals, Robin-type variational
//! problems and the sharp boundary Sobolev constant, and certifies the
//! weighted L2 identities the bounds rest on.
//!
//! Start with the runnable examples in `examples/`; the `diracbound` binary
//! exposes the same machinery as a batch CLI.

pub mod bundle;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod geometry;
pub mod identity;
pub mod bounds;
pub mod eigensolve;
pub mod operators;
pub mod special;
pub mod spectrum;
pub mod util;

pub use bundle::DiracBundleSpec;
pub use error::{DiracError, Result};
pub use geometry::{make_geometry, GeometryKind, GeometrySpec};
pub use operators::BoundaryCondition;
