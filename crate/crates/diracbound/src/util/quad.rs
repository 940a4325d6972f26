//! Quadrature helpers: periodic trapezoid, composite Gauss-Legendre cells,
//! and the log-log order fit used by convergence studies.

/// Trapezoid rule for a periodic integrand sampled at n equispaced points on
/// a period of length `period`. Spectrally accurate for analytic integrands.
pub fn trapezoid_periodic(samples: &[f64], period: f64) -> f64 {
    let n = samples.len();
    samples.iter().sum::<f64>() * period / n as f64
}

/// 6-point Gauss-Legendre nodes/weights on [-1, 1].
const GL6_X: [f64; 6] = [
    -0.932469514203152,
    -0.661209386466265,
    -0.238619186083197,
    0.238619186083197,
    0.661209386466265,
    0.932469514203152,
];
const GL6_W: [f64; 6] = [
    0.171324492379170,
    0.360761573048139,
    0.467913934572691,
    0.467913934572691,
    0.360761573048139,
    0.171324492379170,
];

/// Gauss-Legendre quadrature of `f` over [a, b] with 6 points.
pub fn gauss6<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..6 {
        acc += GL6_W[i] * f(c + h * GL6_X[i]);
    }
    acc * h
}

/// Composite Gauss-Legendre over [a, b] split into `cells` equal cells.
pub fn gauss_composite<F: FnMut(f64) -> f64>(a: f64, b: f64, cells: usize, mut f: F) -> f64 {
    let h = (b - a) / cells as f64;
    let mut acc = 0.0;
    for j in 0..cells {
        acc += gauss6(a + j as f64 * h, a + (j + 1) as f64 * h, &mut f);
    }
    acc
}

/// Least-squares slope of log2(err) against log2(h) over a refinement series.
/// Entries with non-positive error are skipped (already at rounding level).
pub fn fitted_order(series: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(h, e)| (h.log2(), e.log2()))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        // degree 11 is exact for 6-point Gauss
        let val = gauss6(0.0, 1.0, |x| x.powi(9));
        assert!((val - 0.1).abs() < 1e-14);
    }

    #[test]
    fn composite_handles_sin() {
        let val = gauss_composite(0.0, std::f64::consts::PI, 16, f64::sin);
        assert!((val - 2.0).abs() < 1e-13);
    }

    #[test]
    fn order_fit_recovers_slope() {
        let series: Vec<(f64, f64)> = (0..4)
            .map(|k| {
                let h = 0.1 / (1 << k) as f64;
                (h, 3.0 * h * h)
            })
            .collect();
        assert!((fitted_order(&series) - 2.0).abs() < 1e-10);
    }
}
