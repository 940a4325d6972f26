//! Small special-function kit: Bessel J by Miller's backward recurrence
//! (test oracle for the radial shooting problems) and exact Gamma values at
//! integer and half-integer arguments.

use std::f64::consts::PI;

/// J_n(x) for integer order and real argument, by backward recurrence with
/// the Neumann-series normalization. Accurate to near machine precision for
/// |x| up to a few tens.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let (n_abs, sign_order) = if n < 0 {
        ((-n) as usize, if n % 2 != 0 { -1.0 } else { 1.0 })
    } else {
        (n as usize, 1.0)
    };
    let (x_abs, sign_arg) = if x < 0.0 {
        (-x, if n_abs % 2 == 1 { -1.0 } else { 1.0 })
    } else {
        (x, 1.0)
    };

    let start = (n_abs.max(x_abs as usize) + 52).max(24);
    let mut jp = 0.0f64; // J_{k+1}
    let mut j = 1e-300f64; // J_k seed
    let mut result = 0.0f64;
    let mut norm = 0.0f64; // J_0 + 2 sum J_{2m}
    for k in (0..=start).rev() {
        let jm = (2.0 * (k as f64 + 1.0) / x_abs) * j - jp; // J_k from J_{k+1}, J_{k+2}
        jp = j;
        j = jm;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            result *= 1e-250;
            norm *= 1e-250;
        }
        if k == n_abs {
            result = j;
        }
        if k % 2 == 0 {
            norm += if k == 0 { j } else { 2.0 * j };
        }
    }
    sign_order * sign_arg * result / norm
}

/// Gamma(k/2) for positive integer k, exact at integers and half-integers.
pub fn gamma_half(k: u64) -> f64 {
    assert!(k >= 1, "gamma_half takes twice the argument, >= 1");
    if k % 2 == 0 {
        // Gamma(m) = (m-1)!
        let m = k / 2;
        (1..m).map(|j| j as f64).product::<f64>()
    } else {
        // Gamma(m + 1/2) = (2m)! sqrt(pi) / (4^m m!)
        let m = (k - 1) / 2;
        let mut acc = PI.sqrt();
        for j in 0..m {
            acc *= j as f64 + 0.5;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // Abramowitz & Stegun tables
        assert!((bessel_j(0, 1.0) - 0.7651976865579666).abs() < 1e-13);
        assert!((bessel_j(1, 1.0) - 0.4400505857449335).abs() < 1e-13);
        assert!((bessel_j(2, 1.0) - 0.11490348493190048).abs() < 1e-13);
        assert!((bessel_j(0, 2.404825557695773)).abs() < 1e-12); // first zero of J0
        assert!((bessel_j(5, 10.0) + 0.23406152818679364).abs() < 1e-12);
    }

    #[test]
    fn bessel_symmetries() {
        for x in [0.3, 1.7, 6.2] {
            for n in 0..6 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                assert!((bessel_j(-n, x) - sign * bessel_j(n, x)).abs() < 1e-13);
                assert!((bessel_j(n, -x) - sign * bessel_j(n, x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn bessel_recurrence_consistency() {
        for x in [0.9, 3.3, 8.0] {
            for n in 1..8 {
                let lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x);
                let rhs = 2.0 * n as f64 / x * bessel_j(n, x);
                assert!((lhs - rhs).abs() < 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half(2), 1.0); // Gamma(1)
        assert_eq!(gamma_half(6), 2.0); // Gamma(3)
        assert_eq!(gamma_half(8), 6.0); // Gamma(4)
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15); // Gamma(1/2)
        assert!((gamma_half(3) - 0.5 * PI.sqrt()).abs() < 1e-15); // Gamma(3/2)
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15); // Gamma(5/2)
    }
}
