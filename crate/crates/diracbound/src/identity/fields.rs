//! Band-limited random sections and weights on the flat torus, with exact
//! pointwise evaluation of the fields and their derivatives on sampling
//! grids. Exactness of the Fourier calculus is what pushes the identity
//! residuals down to rounding level.

use crate::util::rng::SplitMix64;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Spinor-valued trigonometric polynomial on the torus: coefficients over
/// the dual lattice shifted by the spin structure.
#[derive(Clone, Debug)]
pub struct TorusSpinor {
    pub l: [f64; 2],
    pub delta: [u8; 2],
    pub modes: Vec<(i64, i64, [C64; 2])>,
}

/// Real scalar trigonometric polynomial (Hermitian coefficient symmetry).
#[derive(Clone, Debug)]
pub struct TorusScalar {
    pub l: [f64; 2],
    pub modes: Vec<(i64, i64, C64)>,
}

/// Pointwise samples of a spinor field and its exact first derivatives.
pub struct SpinorSample {
    pub n: usize,
    pub s: Vec<[C64; 2]>,
    pub d1: Vec<[C64; 2]>,
    pub d2: Vec<[C64; 2]>,
}

/// Pointwise samples of a scalar weight with gradient and Laplacian.
pub struct ScalarSample {
    pub n: usize,
    pub phi: Vec<f64>,
    pub g1: Vec<f64>,
    pub g2: Vec<f64>,
    pub lap: Vec<f64>,
}

impl TorusSpinor {
    pub fn random(rng: &mut SplitMix64, l: [f64; 2], delta: [u8; 2], kmax: i64) -> Self {
        let mut modes = Vec::new();
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                let decay = (-((k1 * k1 + k2 * k2) as f64) / (kmax as f64)).exp();
                let coeff = [rng.complex_normal() * decay, rng.complex_normal() * decay];
                modes.push((k1, k2, coeff));
            }
        }
        TorusSpinor { l, delta, modes }
    }

    fn xi(&self, k1: i64, k2: i64) -> [f64; 2] {
        [
            2.0 * PI * (k1 as f64 + self.delta[0] as f64 / 2.0) / self.l[0],
            2.0 * PI * (k2 as f64 + self.delta[1] as f64 / 2.0) / self.l[1],
        ]
    }

    /// Exact samples on the n x n product grid (x-major ordering).
    pub fn sample(&self, n: usize) -> SpinorSample {
        let mut s = vec![[c(0.0, 0.0); 2]; n * n];
        let mut d1 = vec![[c(0.0, 0.0); 2]; n * n];
        let mut d2 = vec![[c(0.0, 0.0); 2]; n * n];
        // separable two-stage summation per k1 row
        let mut by_k1: std::collections::BTreeMap<i64, Vec<(i64, [C64; 2])>> =
            std::collections::BTreeMap::new();
        for (k1, k2, coeff) in &self.modes {
            by_k1.entry(*k1).or_default().push((*k2, *coeff));
        }
        let mut inner = vec![[c(0.0, 0.0); 2]; n];
        let mut inner_d2 = vec![[c(0.0, 0.0); 2]; n];
        for (k1, row) in by_k1 {
            for v in inner.iter_mut().chain(inner_d2.iter_mut()) {
                *v = [c(0.0, 0.0); 2];
            }
            let mut xi1 = 0.0;
            for (k2, coeff) in &row {
                let xi = self.xi(k1, *k2);
                xi1 = xi[0];
                for (j2, (t, td)) in inner.iter_mut().zip(inner_d2.iter_mut()).enumerate() {
                    let x2 = self.l[1] * j2 as f64 / n as f64;
                    let phase = c(0.0, xi[1] * x2).exp();
                    for comp in 0..2 {
                        let val = coeff[comp] * phase;
                        t[comp] += val;
                        td[comp] += val * c(0.0, xi[1]);
                    }
                }
            }
            for j1 in 0..n {
                let x1 = self.l[0] * j1 as f64 / n as f64;
                let phase = c(0.0, xi1 * x1).exp();
                for j2 in 0..n {
                    let idx = j1 * n + j2;
                    for comp in 0..2 {
                        let val = inner[j2][comp] * phase;
                        s[idx][comp] += val;
                        d1[idx][comp] += val * c(0.0, xi1);
                        d2[idx][comp] += inner_d2[j2][comp] * phase;
                    }
                }
            }
        }
        SpinorSample { n, s, d1, d2 }
    }

    /// Parseval value of int |D s|^2 from the coefficients (independent
    /// quadrature path used to decorrelate implementation errors).
    pub fn dirac_norm_sq_parseval(&self) -> f64 {
        let vol = self.l[0] * self.l[1];
        let mut acc = 0.0;
        for (k1, k2, coeff) in &self.modes {
            let xi = self.xi(*k1, *k2);
            let norm2 = xi[0] * xi[0] + xi[1] * xi[1];
            acc += norm2 * (coeff[0].norm_sqr() + coeff[1].norm_sqr());
        }
        acc * vol
    }

    pub fn l2_norm_sq_parseval(&self) -> f64 {
        let vol = self.l[0] * self.l[1];
        self.modes
            .iter()
            .map(|(_, _, coeff)| coeff[0].norm_sqr() + coeff[1].norm_sqr())
            .sum::<f64>()
            * vol
    }
}

impl TorusScalar {
    pub fn random(rng: &mut SplitMix64, l: [f64; 2], kmax: i64, amplitude: f64) -> Self {
        // Hermitian half-lattice draw gives a real field
        let mut modes = Vec::new();
        for k1 in 0..=kmax {
            let k2_lo = if k1 == 0 { 1 } else { -kmax };
            for k2 in k2_lo..=kmax {
                let decay = (-((k1 * k1 + k2 * k2) as f64) / (kmax as f64)).exp();
                let coeff = rng.complex_normal() * decay;
                modes.push((k1, k2, coeff * 0.5));
                modes.push((-k1, -k2, coeff.conj() * 0.5));
            }
        }
        let mut out = TorusScalar { l, modes };
        // normalize the sup to the requested amplitude
        let sample = out.sample(64);
        let max = sample.phi.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
        for (_, _, coeff) in out.modes.iter_mut() {
            *coeff *= amplitude / max;
        }
        out
    }

    fn xi(&self, k1: i64, k2: i64) -> [f64; 2] {
        [2.0 * PI * k1 as f64 / self.l[0], 2.0 * PI * k2 as f64 / self.l[1]]
    }

    pub fn sample(&self, n: usize) -> ScalarSample {
        let mut phi = vec![0.0f64; n * n];
        let mut g1 = vec![0.0f64; n * n];
        let mut g2 = vec![0.0f64; n * n];
        let mut lap = vec![0.0f64; n * n];
        for (k1, k2, coeff) in &self.modes {
            let xi = self.xi(*k1, *k2);
            let norm2 = xi[0] * xi[0] + xi[1] * xi[1];
            for j1 in 0..n {
                let x1 = self.l[0] * j1 as f64 / n as f64;
                let p1 = c(0.0, xi[0] * x1).exp();
                for j2 in 0..n {
                    let x2 = self.l[1] * j2 as f64 / n as f64;
                    let val = coeff * p1 * c(0.0, xi[1] * x2).exp();
                    let idx = j1 * n + j2;
                    phi[idx] += val.re;
                    g1[idx] += (val * c(0.0, xi[0])).re;
                    g2[idx] += (val * c(0.0, xi[1])).re;
                    lap[idx] -= norm2 * val.re;
                }
            }
        }
        ScalarSample { n, phi, g1, g2, lap }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_matches_grid_quadrature() {
        let mut rng = SplitMix64::new(5);
        let field = TorusSpinor::random(&mut rng, [1.0, 1.0], [0, 0], 4);
        let n = 64;
        let sample = field.sample(n);
        let vol_cell = 1.0 / (n * n) as f64;
        let mut l2 = 0.0;
        for v in &sample.s {
            l2 += (v[0].norm_sqr() + v[1].norm_sqr()) * vol_cell;
        }
        assert!((l2 - field.l2_norm_sq_parseval()).abs() < 1e-11 * l2);
    }

    #[test]
    fn scalar_gradient_consistency() {
        // divergence theorem on the torus: int lap phi = 0, int |grad phi|^2 = -int phi lap phi
        let mut rng = SplitMix64::new(9);
        let phi = TorusScalar::random(&mut rng, [1.0, 1.0], 4, 0.5);
        let n = 96;
        let s = phi.sample(n);
        let w = 1.0 / (n * n) as f64;
        let total_lap: f64 = s.lap.iter().sum::<f64>() * w;
        assert!(total_lap.abs() < 1e-12);
        let grad_sq: f64 = s
            .g1
            .iter()
            .zip(s.g2.iter())
            .map(|(a, b)| a * a + b * b)
            .sum::<f64>()
            * w;
        let minus_phi_lap: f64 = s
            .phi
            .iter()
            .zip(s.lap.iter())
            .map(|(p, l)| -p * l)
            .sum::<f64>()
            * w;
        assert!((grad_sq - minus_phi_lap).abs() < 1e-11 * grad_sq.max(1.0));
        let max_amp = s.phi.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(max_amp < 0.55);
    }
}
