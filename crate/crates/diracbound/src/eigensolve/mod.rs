//! In-repo eigenvalue computation: dense Hermitian solver (Householder +
//! implicit QL), Lanczos with full reorthogonalization for large operators,
//! ODE shooting with argument-principle root counting for the per-mode
//! problems, and the Robin/Rayleigh scalar solvers feeding the bounds.

pub mod lanczos;
pub mod robin;
pub mod shooting;

use crate::error::{DiracError, Result};
use crate::operators::{MatrixRepr, OperatorMatrix, SymmetryFlag};
use crate::util::linalg::hermitian_dense_eig;
use num_complex::Complex64 as C64;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolveMethod {
    ExactBlocks,
    DenseQl,
    Lanczos,
    Shooting,
    ClosedForm,
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// sorted by (|lambda|, Re, Im)
    pub eigenvalues: Vec<C64>,
    pub vectors: Option<Vec<Vec<C64>>>,
    pub residuals: Vec<f64>,
    pub method: SolveMethod,
}

impl EigenResult {
    pub fn sort(&mut self) {
        let mut idx: Vec<usize> = (0..self.eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| cmp_eigs(self.eigenvalues[a], self.eigenvalues[b]));
        self.eigenvalues = idx.iter().map(|&i| self.eigenvalues[i]).collect();
        self.residuals = idx
            .iter()
            .map(|&i| self.residuals.get(i).copied().unwrap_or(0.0))
            .collect();
        if let Some(v) = &self.vectors {
            self.vectors = Some(idx.iter().map(|&i| v[i].clone()).collect());
        }
    }

    /// Cluster multiplicities with a relative gap threshold.
    pub fn multiplicities(&self, rel_gap: f64) -> Vec<(C64, usize)> {
        let scale = self
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut out: Vec<(C64, usize)> = Vec::new();
        for z in &self.eigenvalues {
            match out.last_mut() {
                Some((rep, count)) if (z - *rep).norm() <= rel_gap * scale => *count += 1,
                _ => out.push((*z, 1)),
            }
        }
        out
    }
}

pub fn cmp_eigs(a: C64, b: C64) -> std::cmp::Ordering {
    a.norm()
        .partial_cmp(&b.norm())
        .unwrap()
        .then(a.re.partial_cmp(&b.re).unwrap())
        .then(a.im.partial_cmp(&b.im).unwrap())
}

/// k smallest-|lambda| eigenpairs of a Hermitian operator. Dense path
/// (tridiagonalization + implicit QL) up to 4096, Lanczos with full
/// reorthogonalization above.
pub fn hermitian_eigs(op: &OperatorMatrix, k: usize, tol: f64) -> Result<EigenResult> {
    if op.symmetry != SymmetryFlag::Hermitian {
        return Err(DiracError::NotHermitian { residual: f64::NAN });
    }
    let defect = op.hermitian_defect();
    let scale = op.max_abs().max(1e-300);
    if defect > 1e-12 * scale {
        return Err(DiracError::NotHermitian { residual: defect / scale });
    }
    let n = op.dim();
    if k > n {
        return Err(DiracError::Shape(format!("requested {k} pairs from dimension {n}")));
    }

    let mut result = match &op.repr {
        MatrixRepr::Blocks(blocks) => {
            let mut vals: Vec<C64> = Vec::new();
            let mut vecs: Vec<Vec<C64>> = Vec::new();
            let total = op.dim();
            let mut off = 0usize;
            for (_, b) in blocks {
                let (bv, bvec) = hermitian_dense_eig(b, true)?;
                let bvec = bvec.unwrap();
                for (j, v) in bv.iter().enumerate() {
                    vals.push(C64::new(*v, 0.0));
                    let mut full = vec![C64::new(0.0, 0.0); total];
                    for r in 0..b.rows {
                        full[off + r] = bvec[(r, j)];
                    }
                    vecs.push(full);
                }
                off += b.rows;
            }
            EigenResult {
                eigenvalues: vals,
                vectors: Some(vecs),
                residuals: Vec::new(),
                method: SolveMethod::ExactBlocks,
            }
        }
        MatrixRepr::Tridiag(t) => {
            let (vals, vecs) = t.eig(true)?;
            let vecs = vecs
                .unwrap()
                .into_iter()
                .map(|col| col.into_iter().map(|x| C64::new(x, 0.0)).collect())
                .collect();
            EigenResult {
                eigenvalues: vals.into_iter().map(|v| C64::new(v, 0.0)).collect(),
                vectors: Some(vecs),
                residuals: Vec::new(),
                method: SolveMethod::DenseQl,
            }
        }
        MatrixRepr::Dense(m) => {
            if n <= 4096 {
                let (vals, vecs) = hermitian_dense_eig(m, true)?;
                let vecs = vecs.unwrap();
                let cols = (0..n)
                    .map(|j| (0..n).map(|r| vecs[(r, j)]).collect::<Vec<C64>>())
                    .collect();
                EigenResult {
                    eigenvalues: vals.into_iter().map(|v| C64::new(v, 0.0)).collect(),
                    vectors: Some(cols),
                    residuals: Vec::new(),
                    method: SolveMethod::DenseQl,
                }
            } else {
                return lanczos::lanczos_smallest_abs(op, k, tol, 4 * k + 200, 0x5eed);
            }
        }
    };

    // residuals against the original operator, then keep the k smallest
    result.sort();
    result.eigenvalues.truncate(k.max(1).min(result.eigenvalues.len()));
    if let Some(v) = &mut result.vectors {
        v.truncate(result.eigenvalues.len());
    }
    let mut residuals = Vec::new();
    if let Some(vecs) = &result.vectors {
        for (z, v) in result.eigenvalues.iter().zip(vecs.iter()) {
            residuals.push(residual_norm(op, *z, v));
        }
    }
    result.residuals = residuals;
    for r in &result.residuals {
        if *r > tol.max(1e-9) * scale.max(1.0) {
            return Err(DiracError::Convergence { best_residual: *r });
        }
    }
    Ok(result)
}

pub fn residual_norm(op: &OperatorMatrix, lambda: C64, v: &[C64]) -> f64 {
    let mut av = vec![C64::new(0.0, 0.0); v.len()];
    op.matvec(v, &mut av);
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (a, x) in av.iter().zip(v.iter()) {
        num += (a - lambda * x).norm_sqr();
        den += x.norm_sqr();
    }
    (num / den.max(1e-300)).sqrt()
}
