//! Dense complex linear algebra: storage, Hermitian eigensolver
//! (Householder tridiagonalization + implicit QL), and the real symmetric
//! tridiagonal solver the radial schemes feed directly.

use crate::error::{DiracError, Result};
use num_complex::Complex64 as C64;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c);
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |A - A^*| entry, the Hermitian defect.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..=i {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Real symmetric tridiagonal matrix, diag `d` and subdiag `e` (`e.len() == d.len()-1`).
#[derive(Clone, Debug)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n {
            let mut acc = self.d[i] * x[i];
            if i > 0 {
                acc += self.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.e[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// All eigenvalues, ascending; eigenvectors as columns when `with_vectors`.
    pub fn eig(&self, with_vectors: bool) -> Result<(Vec<f64>, Option<Vec<Vec<f64>>>)> {
        let n = self.dim();
        let mut d = self.d.clone();
        let mut e = self.e.clone();
        e.push(0.0);
        let mut z: Vec<Vec<f64>> = if with_vectors {
            (0..n)
                .map(|i| {
                    let mut col = vec![0.0; n];
                    col[i] = 1.0;
                    col
                })
                .collect()
        } else {
            Vec::new()
        };
        tql2(&mut d, &mut e, &mut z, n)?;
        // sort ascending, carrying columns along
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
        let vals: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
        let vecs = if with_vectors {
            Some(idx.iter().map(|&i| z[i].clone()).collect())
        } else {
            None
        };
        Ok((vals, vecs))
    }
}

/// Implicit QL with Wilkinson-style shifts on a real symmetric tridiagonal.
/// `z[i]` is the accumulated transform column attached to tridiagonal index
/// i; the plane rotations mix columns i and i+1 (may be empty).
fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>], n: usize) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(DiracError::Convergence { best_residual: e[l].abs() });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let denom = g + if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + e[l] / denom;
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if !z.is_empty() {
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for k in 0..zi.len() {
                        f = zi1[k];
                        zi1[k] = s * zi[k] + c * f;
                        zi[k] = c * zi[k] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigen-decomposition of a dense complex Hermitian matrix.
/// Returns eigenvalues ascending and, optionally, orthonormal eigenvectors
/// as columns of a CMatrix.
pub fn hermitian_dense_eig(a: &CMatrix, with_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    assert!(a.is_square());
    let n = a.rows;
    if n == 0 {
        return Ok((Vec::new(), with_vectors.then(|| CMatrix::zeros(0, 0))));
    }
    let defect = a.hermitian_defect();
    let scale = a.max_abs().max(1.0);
    if defect > 1e-12 * scale {
        return Err(DiracError::NotHermitian { residual: defect / scale });
    }

    let mut w = a.clone();
    let mut q = CMatrix::identity(n);

    // Householder reduction to Hermitian tridiagonal form.
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0f64;
        for i in k + 1..n {
            norm2 += w[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let x0 = w[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        // v = x - alpha e1
        let mut v = vec![C64::new(0.0, 0.0); n];
        for i in k + 1..n {
            v[i] = w[(i, k)];
        }
        v[k + 1] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 < 1e-300 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // p = tau * W v (restricted to the trailing block; v is zero above k+1)
        let mut p = vec![C64::new(0.0, 0.0); n];
        for i in k..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in k + 1..n {
                acc += w[(i, j)] * v[j];
            }
            p[i] = tau * acc;
        }
        // K = (tau/2) v^H p
        let mut vhp = C64::new(0.0, 0.0);
        for i in k + 1..n {
            vhp += v[i].conj() * p[i];
        }
        let kappa = 0.5 * tau * vhp;
        // q_vec = p - K v
        let mut qv = p;
        for i in k + 1..n {
            qv[i] -= kappa * v[i];
        }
        // W := W - v q^H - q v^H  (rows/cols k.. affected)
        for i in k..n {
            for j in k..n {
                let upd = v[i] * qv[j].conj() + qv[i] * v[j].conj();
                w[(i, j)] -= upd;
            }
        }
        // Q := Q (I - tau v v^H)
        for r in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in k + 1..n {
                acc += q[(r, j)] * v[j];
            }
            let acc = acc * tau;
            for j in k + 1..n {
                let vj = v[j].conj();
                q[(r, j)] -= acc * vj;
            }
        }
    }

    // Extract tridiagonal, normalizing subdiagonal phases into Q.
    let mut d: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    let mut e = vec![0.0f64; n];
    let mut ph = vec![C64::new(1.0, 0.0); n];
    for i in 0..n - 1 {
        // similarity by diag(ph) turns the subdiagonal real: conj(ph[i+1]) t ph[i] = |t|
        let t = w[(i + 1, i)];
        let abst = t.norm();
        ph[i + 1] = if abst > 0.0 { t * ph[i] / C64::new(abst, 0.0) } else { ph[i] };
        e[i] = abst;
    }
    // fold phases into Q columns
    let mut qp = q;
    for j in 0..n {
        for r in 0..n {
            let v = qp[(r, j)] * ph[j];
            qp[(r, j)] = v;
        }
    }

    // carry the columns of the complex basis through the real rotations as
    // stacked (re, im) vectors of length 2n
    let mut zcols: Vec<Vec<f64>> = if with_vectors {
        (0..n)
            .map(|j| {
                let mut col = Vec::with_capacity(2 * n);
                col.extend((0..n).map(|r| qp[(r, j)].re));
                col.extend((0..n).map(|r| qp[(r, j)].im));
                col
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut ework = e.clone();
    tql2(&mut d, &mut ework, &mut zcols, n)?;

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| d[i]).collect();
    let vecs = if with_vectors {
        let mut v = CMatrix::zeros(n, n);
        for (jj, &col) in idx.iter().enumerate() {
            for r in 0..n {
                v[(r, jj)] = C64::new(zcols[col][r], zcols[col][n + r]);
            }
        }
        Some(v)
    } else {
        None
    };
    Ok((vals, vecs))
}

/// Eigenvalues of a 2x2 Hermitian matrix [[a, b], [conj(b), c]] (a, c real).
pub fn herm2_eigvals(a: f64, b: C64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let disc = (0.5 * (a - c)).hypot(b.norm());
    (mean - disc, mean + disc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn tridiag_eig_matches_known() {
        // free Laplacian stencil: eigenvalues 2 - 2cos(k pi/(n+1))
        let n = 12;
        let t = SymTridiag { d: vec![2.0; n], e: vec![-1.0; n - 1] };
        let (vals, vecs) = t.eig(true).unwrap();
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-12, "k={k}: {v} vs {exact}");
        }
        // residual check
        let vecs = vecs.unwrap();
        for k in 0..n {
            let mut y = vec![0.0; n];
            t.matvec(&vecs[k], &mut y);
            let mut res: f64 = 0.0;
            for i in 0..n {
                res = res.max((y[i] - vals[k] * vecs[k][i]).abs());
            }
            assert!(res < 1e-12);
        }
    }

    #[test]
    fn hermitian_dense_small() {
        let a = CMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.0, -1.0), c(0.3, 0.2)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(0.5, 0.0)],
            vec![c(0.3, -0.2), c(0.5, 0.0), c(-1.0, 0.0)],
        ]);
        let (vals, vecs) = hermitian_dense_eig(&a, true).unwrap();
        let vecs = vecs.unwrap();
        // verify A v = lambda v
        for k in 0..3 {
            let x: Vec<C64> = (0..3).map(|r| vecs[(r, k)]).collect();
            let mut y = vec![c(0.0, 0.0); 3];
            a.matvec(&x, &mut y);
            for r in 0..3 {
                assert!((y[r] - vals[k] * x[r]).norm() < 1e-12);
            }
        }
        // trace check
        let tr: f64 = vals.iter().sum();
        assert!((tr - 2.0).abs() < 1e-12);
    }

    #[test]
    fn herm2_closed_form() {
        let (lo, hi) = herm2_eigvals(1.0, c(0.0, 2.0), -1.0);
        assert!((lo + 5f64.sqrt()).abs() < 1e-14);
        assert!((hi - 5f64.sqrt()).abs() < 1e-14);
    }
}
