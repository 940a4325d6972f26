//! Lanczos iteration with full reorthogonalization. Problem sizes here are
//! modest, so robustness wins over memory: every Krylov vector is kept and
//! re-orthogonalized against twice per step.

use super::{EigenResult, SolveMethod};
use crate::error::{DiracError, Result};
use crate::operators::OperatorMatrix;
use crate::util::linalg::SymTridiag;
use crate::util::rng::SplitMix64;
use num_complex::Complex64 as C64;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lanczos on the squared operator: returns the k smallest-|lambda|
/// eigenpairs of the Hermitian `op`, with signs recovered from Rayleigh
/// quotients of `op` itself.
pub fn lanczos_smallest_abs(
    op: &OperatorMatrix,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult> {
    let n = op.dim();
    let m_max = max_iter.min(n);
    let mut rng = SplitMix64::new(seed);
    let mut v0: Vec<C64> = (0..n).map(|_| rng.complex_normal()).collect();
    let nv = norm(&v0);
    for x in v0.iter_mut() {
        *x /= nv;
    }

    let apply_sq = |x: &[C64], scratch: &mut Vec<C64>, out: &mut Vec<C64>| {
        op.matvec(x, scratch);
        op.matvec(scratch, out);
    };

    let mut basis: Vec<Vec<C64>> = vec![v0];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    let mut w = vec![C64::new(0.0, 0.0); n];

    let scale = op.max_abs().max(1e-300);
    let mut best_residual = f64::INFINITY;

    for j in 0..m_max {
        apply_sq(&basis[j], &mut scratch, &mut w);
        if j > 0 {
            let b = betas[j - 1];
            for (wi, vi) in w.iter_mut().zip(basis[j - 1].iter()) {
                *wi -= vi * b;
            }
        }
        let alpha = dot(&basis[j], &w).re;
        for (wi, vi) in w.iter_mut().zip(basis[j].iter()) {
            *wi -= vi * alpha;
        }
        // full reorthogonalization, twice
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v.iter()) {
                    *wi -= vi * c;
                }
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);
        // Ritz convergence check on the squared spectrum
        if j + 1 >= k.max(2) {
            let tri = SymTridiag { d: alphas.clone(), e: betas.clone() };
            let (vals, vecs) = tri.eig(true)?;
            let vecs = vecs.unwrap();
            let mut converged = 0usize;
            let mut worst: f64 = 0.0;
            for i in 0..vals.len().min(k) {
                let res = beta * vecs[i].last().copied().unwrap_or(0.0).abs();
                worst = worst.max(res);
                if res <= tol.max(1e-12) * scale * scale {
                    converged += 1;
                }
            }
            best_residual = best_residual.min(worst);
            if converged >= k || beta <= 1e-14 * scale * scale {
                // assemble Ritz vectors of the smallest squared eigenvalues;
                // a Ritz vector of A^2 may mix the +-sqrt(theta) eigenspaces
                // of A, so split it through y_pm = A y -+ sqrt(theta) y
                let mut eigenvalues = Vec::new();
                let mut vectors: Vec<Vec<C64>> = Vec::new();
                let mut residuals = Vec::new();
                for i in 0..vals.len().min(k + 4) {
                    if eigenvalues.len() >= k {
                        break;
                    }
                    let mut y = vec![C64::new(0.0, 0.0); n];
                    for (coeff, v) in vecs[i].iter().zip(basis.iter()) {
                        for (yi, vi) in y.iter_mut().zip(v.iter()) {
                            *yi += vi * *coeff;
                        }
                    }
                    let ny = norm(&y);
                    for x in y.iter_mut() {
                        *x /= ny;
                    }
                    let lam_abs = vals[i].max(0.0).sqrt();
                    op.matvec(&y, &mut scratch);
                    let mut candidates: Vec<(f64, Vec<C64>)> = Vec::new();
                    if lam_abs < 1e-10 * scale {
                        candidates.push((0.0, y.clone()));
                    } else {
                        for sign in [1.0f64, -1.0] {
                            let comp: Vec<C64> = scratch
                                .iter()
                                .zip(y.iter())
                                .map(|(ay, yi)| ay + yi * (sign * lam_abs))
                                .collect();
                            let nc = norm(&comp);
                            if nc > 1e-6 {
                                candidates
                                    .push((sign * lam_abs, comp.iter().map(|z| z / nc).collect()));
                            }
                        }
                    }
                    for (lam, vect) in candidates {
                        if eigenvalues.len() >= k {
                            break;
                        }
                        let res = super::residual_norm(op, C64::new(lam, 0.0), &vect);
                        if res <= (tol.max(1e-9) * scale).max(1e-12) {
                            // skip duplicates of already-accepted pairs
                            let dup = eigenvalues
                                .iter()
                                .zip(vectors.iter())
                                .any(|(l2, v2): (&C64, &Vec<C64>)| {
                                    (C64::new(lam, 0.0) - *l2).norm() < 1e-9 * scale
                                        && dot(v2, &vect).norm() > 0.9
                                });
                            if !dup {
                                eigenvalues.push(C64::new(lam, 0.0));
                                vectors.push(vect);
                                residuals.push(res);
                            }
                        }
                    }
                }
                if eigenvalues.len() < k {
                    return Err(DiracError::Convergence { best_residual: worst });
                }
                let mut out = EigenResult {
                    eigenvalues,
                    vectors: Some(vectors),
                    residuals,
                    method: SolveMethod::Lanczos,
                };
                out.sort();
                return Ok(out);
            }
        }
        if beta <= 1e-14 * scale * scale {
            continue;
        }
        betas.push(beta);
        let next: Vec<C64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
    Err(DiracError::Convergence { best_residual })
}
