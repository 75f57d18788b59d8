//! Large-|z| Hankel expansion with termwise derivative. Beyond |arg z| = π/2
//! the dominant kind is rebuilt from the opposite half-plane so the truncated
//! series is never used across its Stokes line.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::series::Polar;
use super::{HankelKind, HankelPair};
use crate::error::{Error, Result};

/// Relative size of a term at which summation stops.
const TERM_REL: f64 = 1e-17;
/// Relative truncation error above which the expansion is refused.
pub(crate) const ACCURACY_REL: f64 = 1e-12;

fn raw(kind: HankelKind, nu: f64, z: Polar, n_terms: usize) -> Result<HankelPair> {
    let zc = z.to_complex();
    let i = Complex64::i();
    let sign = match kind {
        HankelKind::One => 1.0,
        HankelKind::Two => -1.0,
    };
    let si = i * sign;
    let inv = Complex64::from_polar(1.0 / z.rho, -z.arg);
    let four_nu2 = 4.0 * nu * nu;

    // S = Σ (±i)^k a_k z^{−k},  S' = dS/dz = −Σ k (±i)^k a_k z^{−k−1}
    let mut s = Complex64::new(1.0, 0.0);
    let mut ds = Complex64::new(0.0, 0.0);
    let mut a = 1.0f64;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    let mut estimate = 0.0;
    let mut done = false;
    for k in 1..=n_terms {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a *= (four_nu2 - odd * odd) / (8.0 * kf);
        pw *= si * inv;
        let t = pw * a;
        if a == 0.0 {
            done = true;
            estimate = 0.0;
            break;
        }
        let tn = t.norm();
        if odd > 2.0 * nu && tn > last {
            // smallest term passed; the series has started to diverge
            estimate = last;
            done = true;
            break;
        }
        s += t;
        ds -= t * inv * kf;
        last = tn;
        if tn < TERM_REL * s.norm() {
            estimate = tn;
            done = true;
            break;
        }
    }
    if !done {
        estimate = last;
    }
    let rel = estimate / s.norm();
    if rel > ACCURACY_REL {
        return Err(Error::InsufficientModulus {
            modulus: z.rho,
            target: ACCURACY_REL,
            best: rel,
        });
    }

    let omega = zc - (FRAC_PI_2 * nu + FRAC_PI_4);
    let e = (si * omega).exp();
    let pref = Complex64::from_polar((2.0 / (PI * z.rho)).sqrt(), -0.5 * z.arg);
    let value = pref * e * s;
    let deriv = pref * e * ((si - 0.5 * inv) * s + ds);
    Ok(HankelPair { value, deriv })
}

/// Asymptotic Hankel pair on the principal sheet, |arg z| ≤ π.
pub(crate) fn hankel_asymptotic(kind: HankelKind, nu: f64, z: Polar, n_terms: usize) -> Result<HankelPair> {
    let c2 = 2.0 * (PI * nu).cos();
    match kind {
        HankelKind::One if z.arg < -FRAC_PI_2 => {
            // H1(z) = 2cos(νπ) H1(w) + e^{−iνπ} H2(w),  w = z e^{iπ}
            let w = Polar {
                rho: z.rho,
                arg: z.arg + PI,
            };
            let h1 = raw(HankelKind::One, nu, w, n_terms)?;
            let h2 = raw(HankelKind::Two, nu, w, n_terms)?;
            let ph = Complex64::from_polar(1.0, -PI * nu);
            Ok(HankelPair {
                value: h1.value * c2 + ph * h2.value,
                deriv: -(h1.deriv * c2 + ph * h2.deriv),
            })
        }
        HankelKind::Two if z.arg > FRAC_PI_2 => {
            // H2(z) = 2cos(νπ) H2(w) + e^{iνπ} H1(w),  w = z e^{−iπ}
            let w = Polar {
                rho: z.rho,
                arg: z.arg - PI,
            };
            let h1 = raw(HankelKind::One, nu, w, n_terms)?;
            let h2 = raw(HankelKind::Two, nu, w, n_terms)?;
            let ph = Complex64::from_polar(1.0, PI * nu);
            Ok(HankelPair {
                value: h2.value * c2 + ph * h1.value,
                deriv: -(h2.deriv * c2 + ph * h1.deriv),
            })
        }
        _ => raw(kind, nu, z, n_terms),
    }
}
