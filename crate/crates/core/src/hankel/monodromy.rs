//! Circuit relations of the Hankel pair around z = 0.
//!
//! With S_k = sin(kπν)/sin(πν):
//!   H2(z e^{imπ}) = S_{m+1} H2(z) + e^{iπν} S_m H1(z)
//!   H1(z e^{imπ}) = −S_{m−1} H1(z) − e^{−iπν} S_m H2(z)
//! At integer ν = n the quotient is replaced by its limit k·cos(kπn)/cos(πn).

use num_complex::Complex64;
use std::f64::consts::PI;

/// sin(πx) with the argument reduced exactly, so that sin_pi(k/2) is exactly
/// 0 or ±1.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let mut r = x % 2.0;
    if r > 1.0 {
        r -= 2.0;
    } else if r < -1.0 {
        r += 2.0;
    }
    if r > 0.5 {
        r = 1.0 - r;
    } else if r < -0.5 {
        r = -1.0 - r;
    }
    (PI * r).sin()
}

/// sin(kπν)/sin(πν) for any integer k; ν is expected already snapped to an
/// integer when near one.
pub(crate) fn sine_ratio(nu: f64, k: i64) -> f64 {
    if nu == nu.round() {
        // k·cos(kπn)/cos(πn) = k·(−1)^{n(k−1)}
        let odd = (nu as i64).rem_euclid(2) == 1 && (k - 1).rem_euclid(2) == 1;
        return if odd { -(k as f64) } else { k as f64 };
    }
    sin_pi(k as f64 * nu) / sin_pi(nu)
}

/// (a, b) with H2(z e^{imπ}) = a·H2(z) + b·H1(z).
pub(crate) fn h2_circuit(nu: f64, m: i64) -> (Complex64, Complex64) {
    let a = Complex64::new(sine_ratio(nu, m + 1), 0.0);
    let b = Complex64::from_polar(1.0, PI * nu) * sine_ratio(nu, m);
    (a, b)
}

/// (c, d) with H1(z e^{imπ}) = c·H1(z) + d·H2(z).
pub(crate) fn h1_circuit(nu: f64, m: i64) -> (Complex64, Complex64) {
    let c = Complex64::new(-sine_ratio(nu, m - 1), 0.0);
    let d = -Complex64::from_polar(1.0, -PI * nu) * sine_ratio(nu, m);
    (c, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_ratio_matches_direct_quotient() {
        for nu in [0.3, 0.77, 1.41] {
            for k in -5..=9 {
                let direct = (k as f64 * PI * nu).sin() / (PI * nu).sin();
                assert!((sine_ratio(nu, k) - direct).abs() < 1e-12, "nu={nu} k={k}");
            }
        }
    }

    #[test]
    fn exact_zeros_at_rational_orders() {
        assert_eq!(sine_ratio(1.25, 4), 0.0);
        assert_eq!(sine_ratio(0.5, 2), 0.0);
        assert_eq!(sine_ratio(0.75, 4), 0.0);
        assert_eq!(sine_ratio(0.5, 3), -1.0);
    }

    #[test]
    fn integer_limit() {
        // k·cos(kπn)/cos(πn)
        assert_eq!(sine_ratio(1.0, 3), 3.0);
        assert_eq!(sine_ratio(2.0, 4), 4.0);
        assert_eq!(sine_ratio(1.0, 2), -2.0);
    }
}
