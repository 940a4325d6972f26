//! Gamma-matrix realizations of the Clifford relations in dimensions 2 and 3,
//! Clifford multiplication, the curvature endomorphism with its smallest
//! eigenvalue, and twistor-parameter arithmetic.
//!
//! Sign convention: e_i . e_j + e_j . e_i = -2 delta_ij, realized by
//! gamma_k = i sigma_k on rank-2 spinors. Unit vectors then act unitarily
//! and skew-adjointly.

use crate::error::{DiracError, Result};
use num_complex::Complex64 as C64;

pub type Mat2 = [[C64; 2]; 2];
pub type Spinor2 = [C64; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn mat2_zero() -> Mat2 {
    [[c(0.0, 0.0); 2]; 2]
}

pub fn mat2_id(scale: C64) -> Mat2 {
    [[scale, c(0.0, 0.0)], [c(0.0, 0.0), scale]]
}

pub fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn mat2_scale(a: &Mat2, s: C64) -> Mat2 {
    let mut out = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] * s;
        }
    }
    out
}

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_apply(a: &Mat2, s: &Spinor2) -> Spinor2 {
    [a[0][0] * s[0] + a[0][1] * s[1], a[1][0] * s[0] + a[1][1] * s[1]]
}

pub fn mat2_adjoint(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

pub fn mat2_max_abs(a: &Mat2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian 2x2 matrix, ascending.
pub fn mat2_herm_eigvals(a: &Mat2) -> (f64, f64) {
    crate::util::linalg::herm2_eigvals(a[0][0].re, a[0][1], a[1][1].re)
}

/// Gamma-matrix realization of Cl(n) with unitary, skew-adjoint generators.
#[derive(Clone, Debug)]
pub struct CliffordRep {
    pub dim: usize,
    pub rank: usize,
    gammas: Vec<Mat2>,
}

impl CliffordRep {
    /// gamma_k = i sigma_k, k = 1..n. Supported for n in {2, 3}.
    pub fn build(n: usize) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(DiracError::Dimension(n));
        }
        let i = c(0.0, 1.0);
        let sigma1: Mat2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
        let sigma2: Mat2 = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
        let sigma3: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        let all = [sigma1, sigma2, sigma3];
        let gammas = all[..n].iter().map(|s| mat2_scale(s, i)).collect();
        Ok(CliffordRep { dim: n, rank: 2, gammas })
    }

    pub fn gamma(&self, k: usize) -> &Mat2 {
        &self.gammas[k]
    }

    /// Clifford action of the tangent vector `x` as a 2x2 matrix.
    pub fn vector_action(&self, x: &[f64]) -> Result<Mat2> {
        if x.len() != self.dim {
            return Err(DiracError::Shape(format!(
                "vector has {} components, representation dimension is {}",
                x.len(),
                self.dim
            )));
        }
        let mut out = mat2_zero();
        for (xk, g) in x.iter().zip(self.gammas.iter()) {
            out = mat2_add(&out, &mat2_scale(g, c(*xk, 0.0)));
        }
        Ok(out)
    }

    /// X . s, the Clifford multiplication of a spinor by a tangent vector.
    pub fn mult(&self, x: &[f64], s: &Spinor2) -> Result<Spinor2> {
        Ok(mat2_apply(&self.vector_action(x)?, s))
    }

    /// Anticommutator defect max_{i,j} |g_i g_j + g_j g_i + 2 delta_ij|.
    pub fn relation_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let anti = mat2_add(
                    &mat2_mul(&self.gammas[i], &self.gammas[j]),
                    &mat2_mul(&self.gammas[j], &self.gammas[i]),
                );
                let target = if i == j { mat2_id(c(-2.0, 0.0)) } else { mat2_zero() };
                worst = worst.max(mat2_max_abs(&mat2_add(&anti, &mat2_scale(&target, c(-1.0, 0.0)))));
            }
        }
        worst
    }
}

/// Pointwise value of the curvature endomorphism together with its smallest
/// eigenvalue kappa.
#[derive(Clone, Debug)]
pub struct CurvatureEndo {
    pub value: Mat2,
    pub kappa: f64,
}

impl CurvatureEndo {
    /// Assemble (R/4) Id + i B gamma_1 gamma_2 for scalar curvature `r_scal`
    /// and twist curvature `b` (n = 2 twists only; pass b = 0 otherwise).
    pub fn assemble(rep: &CliffordRep, r_scal: f64, b: f64) -> Result<Self> {
        let mut value = mat2_id(c(0.25 * r_scal, 0.0));
        if b != 0.0 {
            if rep.dim != 2 {
                return Err(DiracError::capability(
                    "line-bundle twists are supported on 2-dimensional geometries only",
                ));
            }
            let g12 = mat2_mul(rep.gamma(0), rep.gamma(1));
            value = mat2_add(&value, &mat2_scale(&g12, c(0.0, b)));
        }
        let defect = mat2_max_abs(&mat2_add(&value, &mat2_scale(&mat2_adjoint(&value), c(-1.0, 0.0))));
        debug_assert!(defect < 1e-14);
        let (kappa, _) = mat2_herm_eigvals(&value);
        Ok(CurvatureEndo { value, kappa })
    }
}

/// Twistor parameters (eta1, eta2) with the derived quadratic form and xi.
#[derive(Clone, Copy, Debug)]
pub struct TwistorParams {
    pub eta1: f64,
    pub eta2: f64,
    /// eta1^2 - 2 eta1 eta2 + n eta2^2
    pub norm_sq: f64,
    /// (n eta2^2 - 2 eta1 eta2) / norm_sq, in [-1/(n-1), 1]
    pub xi: f64,
    pub n: usize,
}

pub fn twistor_params(eta1: f64, eta2: f64, n: usize) -> Result<TwistorParams> {
    if n < 2 {
        return Err(DiracError::Dimension(n));
    }
    if eta1 == 0.0 && eta2 == 0.0 {
        return Err(DiracError::parameter("twistor parameter eta must be nonzero"));
    }
    let norm_sq = eta1 * eta1 - 2.0 * eta1 * eta2 + n as f64 * eta2 * eta2;
    let xi = (n as f64 * eta2 * eta2 - 2.0 * eta1 * eta2) / norm_sq;
    Ok(TwistorParams { eta1, eta2, norm_sq, xi, n })
}
