//! Discrete Dirac operators, connection Laplacians, boundary Dirac
//! operators, and the four elliptic boundary conditions.
//!
//! Discretization strategy: exact Fourier (and, for twisted bundles, exact
//! Landau-ladder) blocks on tori; separation into angular modes with 1D
//! staggered radial grids on disk, annulus, cylinder and spheres.

pub mod boundary;
pub mod ibp;
pub mod radial;
pub mod torus;

use crate::error::{DiracError, Result};
use crate::util::linalg::{CMatrix, SymTridiag};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Boundary conditions from the four families.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    /// nu . s = sign * i s on the boundary
    MitBag { sign: i8 },
    /// vanishing of one chirality factor of the induced boundary splitting
    LocalChirality { sign: i8 },
    /// boundary trace spanned by eigensections of Dbar with eigenvalue <= b
    Aps { b: f64 },
    /// s + sign * nu.s satisfies the b-APS condition
    ModifiedAps { b: f64, sign: i8 },
}

impl BoundaryCondition {
    pub fn validate(&self) -> Result<()> {
        let sign = match self {
            BoundaryCondition::MitBag { sign } => *sign,
            BoundaryCondition::LocalChirality { sign } => *sign,
            BoundaryCondition::Aps { .. } => 1,
            BoundaryCondition::ModifiedAps { sign, .. } => *sign,
        };
        if sign != 1 && sign != -1 {
            return Err(DiracError::parameter("boundary condition sign must be +1 or -1"));
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            BoundaryCondition::MitBag { .. } => "mit",
            BoundaryCondition::LocalChirality { .. } => "local",
            BoundaryCondition::Aps { .. } => "aps",
            BoundaryCondition::ModifiedAps { .. } => "maps",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymmetryFlag {
    Hermitian,
    SkewHermitian,
    General,
}

/// Label attached to a block or a reduced 1D problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModeKey {
    /// torus Fourier mode k = (k1, k2)
    Fourier { k1: i64, k2: i64 },
    /// Landau tower index for twisted torus bundles
    Tower { index: usize },
    /// angular mode m on disk/annulus (patterns e^{im theta}, e^{i(m+1) theta})
    Angular { m: i64 },
    /// circumferential mode on the cylinder (integer index before the spin shift)
    Axial { k: i64 },
    /// sphere mode labelled by twice the slice Dirac eigenvalue
    Sphere { mu2: i64 },
    /// boundary circle mode (component index, Fourier index)
    Boundary { component: usize, j: i64 },
}

/// Matrix payload of an assembled operator.
#[derive(Clone, Debug)]
pub enum MatrixRepr {
    Dense(CMatrix),
    /// real symmetric tridiagonal in interleaved staggered coordinates
    Tridiag(SymTridiag),
    /// block diagonal with labelled small blocks
    Blocks(Vec<(ModeKey, CMatrix)>),
}

#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub repr: MatrixRepr,
    pub symmetry: SymmetryFlag,
    pub bc: Option<BoundaryCondition>,
    pub mode: Option<ModeKey>,
}

impl OperatorMatrix {
    pub fn dim(&self) -> usize {
        match &self.repr {
            MatrixRepr::Dense(m) => m.rows,
            MatrixRepr::Tridiag(t) => t.dim(),
            MatrixRepr::Blocks(bs) => bs.iter().map(|(_, b)| b.rows).sum(),
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        match &self.repr {
            MatrixRepr::Dense(m) => m.matvec(x, y),
            MatrixRepr::Tridiag(t) => {
                let n = t.dim();
                for i in 0..n {
                    let mut acc = x[i] * t.d[i];
                    if i > 0 {
                        acc += x[i - 1] * t.e[i - 1];
                    }
                    if i + 1 < n {
                        acc += x[i + 1] * t.e[i];
                    }
                    y[i] = acc;
                }
            }
            MatrixRepr::Blocks(bs) => {
                let mut off = 0;
                for (_, b) in bs {
                    b.matvec(&x[off..off + b.cols], &mut y[off..off + b.rows]);
                    off += b.rows;
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match &self.repr {
            MatrixRepr::Dense(m) => m.max_abs(),
            MatrixRepr::Tridiag(t) => t
                .d
                .iter()
                .chain(t.e.iter())
                .map(|v| v.abs())
                .fold(0.0, f64::max),
            MatrixRepr::Blocks(bs) => bs.iter().map(|(_, b)| b.max_abs()).fold(0.0, f64::max),
        }
    }

    /// max |A - A^*| over entries.
    pub fn hermitian_defect(&self) -> f64 {
        match &self.repr {
            MatrixRepr::Dense(m) => m.hermitian_defect(),
            MatrixRepr::Tridiag(_) => 0.0,
            MatrixRepr::Blocks(bs) => {
                bs.iter().map(|(_, b)| b.hermitian_defect()).fold(0.0, f64::max)
            }
        }
    }

    /// Entry-wise difference A^2 - (B + C); shapes and block labels must agree.
    /// Used by the Bochner exactness checks on block-diagonal discretizations.
    pub fn square_minus_sum(&self, b: &OperatorMatrix, c: &OperatorMatrix) -> Result<f64> {
        match (&self.repr, &b.repr, &c.repr) {
            (MatrixRepr::Blocks(ab), MatrixRepr::Blocks(bb), MatrixRepr::Blocks(cb)) => {
                if ab.len() != bb.len() || ab.len() != cb.len() {
                    return Err(DiracError::Shape("block counts differ".into()));
                }
                let mut worst: f64 = 0.0;
                for (((ka, ma), (kb, mb)), (kc, mc)) in ab.iter().zip(bb.iter()).zip(cb.iter()) {
                    if ka != kb || ka != kc {
                        return Err(DiracError::Shape("block labels differ".into()));
                    }
                    let sq = ma.matmul(ma);
                    let mut diff = sq.sub(mb);
                    diff = diff.sub(mc);
                    worst = worst.max(diff.max_abs());
                }
                Ok(worst)
            }
            _ => Err(DiracError::Shape(
                "square_minus_sum expects block-diagonal operands".into(),
            )),
        }
    }

    /// Plain-text triplet export, one `row col re im` line per stored entry.
    pub fn write_triplets<W: std::io::Write>(&self, w: &mut W) -> Result<()> {
        let mut emit = |r: usize, c: usize, z: C64| -> std::io::Result<()> {
            writeln!(w, "{} {} {:.17e} {:.17e}", r, c, z.re, z.im)
        };
        match &self.repr {
            MatrixRepr::Dense(m) => {
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        let z = m[(i, j)];
                        if z != C64::new(0.0, 0.0) {
                            emit(i, j, z)?;
                        }
                    }
                }
            }
            MatrixRepr::Tridiag(t) => {
                for i in 0..t.dim() {
                    emit(i, i, C64::new(t.d[i], 0.0))?;
                    if i + 1 < t.dim() {
                        emit(i, i + 1, C64::new(t.e[i], 0.0))?;
                        emit(i + 1, i, C64::new(t.e[i], 0.0))?;
                    }
                }
            }
            MatrixRepr::Blocks(bs) => {
                let mut off = 0;
                for (_, b) in bs {
                    for i in 0..b.rows {
                        for j in 0..b.cols {
                            let z = b[(i, j)];
                            if z != C64::new(0.0, 0.0) {
                                emit(off + i, off + j, z)?;
                            }
                        }
                    }
                    off += b.rows;
                }
            }
        }
        Ok(())
    }
}
