//! Moderate-modulus Hankel kernel: K_ν(w) by Steed's continued fraction
//! (Temme's CF2) for complex w with Re w > 0 or modest |arg w|, then
//! H^(1), H^(2) through the rotation formulas to K.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::series::{j_series, Polar};
use super::{HankelKind, HankelPair};
use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;
const CF_EPS: f64 = 1e-17;

/// Below this modulus CF2 only converges near the right half-plane, so the
/// dominant kind is never taken from K with Re w < 0.
const WIDE_WINDOW_RADIUS: f64 = 8.0;

/// K_ν(w) and K'_ν(w). Converges for |w| ≥ 2 with Re w ≥ 0, and out to
/// |arg w| ≈ 2.57 once |w| ≥ 8.
pub(crate) fn bessel_k(nu: f64, w: Complex64) -> Result<HankelPair> {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mu2 = mu * mu;
    let one = Complex64::new(1.0, 0.0);

    let mut b = (one + w) * 2.0;
    let mut d = one / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let a1 = 0.25 - mu2;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    let mut converged = false;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += 2.0;
        d = one / (b + d * a);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).norm() < CF_EPS {
            converged = true;
            break;
        }
    }
    if !converged || !s.is_finite() {
        return Err(Error::ContinuedFractionNotConverged {
            order: nu,
            modulus: w.norm(),
        });
    }
    h *= a1;

    let mut kmu = (PI / (2.0 * w)).sqrt() * (-w).exp() / s;
    let mut k1 = kmu * (w + mu + 0.5 - h) / w;
    let mut order = mu;
    for _ in 0..(nl as i64) {
        let kt = k1 * (order + 1.0) * 2.0 / w + kmu;
        kmu = k1;
        k1 = kt;
        order += 1.0;
    }
    // K'_ν = (ν/w) K_ν − K_{ν+1}
    Ok(HankelPair {
        value: kmu,
        deriv: kmu * nu / w - k1,
    })
}

fn h1_via_k(nu: f64, z: Complex64) -> Result<HankelPair> {
    let i = Complex64::i();
    let k = bessel_k(nu, -i * z)?;
    let pref = Complex64::from_polar(2.0 / PI, -FRAC_PI_2 - FRAC_PI_2 * nu);
    Ok(HankelPair {
        value: pref * k.value,
        deriv: pref * k.deriv * (-i),
    })
}

fn h2_via_k(nu: f64, z: Complex64) -> Result<HankelPair> {
    let i = Complex64::i();
    let k = bessel_k(nu, i * z)?;
    let pref = Complex64::from_polar(2.0 / PI, FRAC_PI_2 + FRAC_PI_2 * nu);
    Ok(HankelPair {
        value: pref * k.value,
        deriv: pref * k.deriv * i,
    })
}

/// Hankel pair for 2 ≤ |z| on the principal sheet. The kind that is
/// recessive in the half-plane of z comes straight from K. The dominant kind
/// is 2J − H_other, except for |z| ≥ 8 where K still converges a quarter turn
/// past the half-plane and a half-turn reflection covers the negative real
/// axis, where the ascending series for J would cancel.
pub(crate) fn hankel_moderate(kind: HankelKind, nu: f64, z: Polar, max_terms: usize) -> Result<HankelPair> {
    let zc = z.to_complex();
    let (direct, reflect) = if z.rho >= WIDE_WINDOW_RADIUS {
        match kind {
            HankelKind::One => (z.arg >= -FRAC_PI_4, z.arg <= -3.0 * FRAC_PI_4),
            HankelKind::Two => (z.arg <= FRAC_PI_4, z.arg >= 3.0 * FRAC_PI_4),
        }
    } else {
        match kind {
            HankelKind::One => (z.arg >= 0.0, false),
            HankelKind::Two => (z.arg <= 0.0, false),
        }
    };
    if direct {
        return match kind {
            HankelKind::One => h1_via_k(nu, zc),
            HankelKind::Two => h2_via_k(nu, zc),
        };
    }
    if reflect {
        let c2 = 2.0 * (PI * nu).cos();
        // H1(z) = 2cos(νπ) H1(w) + e^{−iνπ} H2(w), w = z e^{iπ}, and the mirror for H2
        let (shift, phase) = match kind {
            HankelKind::One => (PI, -PI * nu),
            HankelKind::Two => (-PI, PI * nu),
        };
        let w = Complex64::from_polar(z.rho, z.arg + shift);
        let (same, other) = match kind {
            HankelKind::One => (h1_via_k(nu, w)?, h2_via_k(nu, w)?),
            HankelKind::Two => (h2_via_k(nu, w)?, h1_via_k(nu, w)?),
        };
        let ph = Complex64::from_polar(1.0, phase);
        return Ok(HankelPair {
            value: same.value * c2 + ph * other.value,
            deriv: -(same.deriv * c2 + ph * other.deriv),
        });
    }
    let other = match kind {
        HankelKind::One => h2_via_k(nu, zc)?,
        HankelKind::Two => h1_via_k(nu, zc)?,
    };
    let j = j_series(nu, z, max_terms)?;
    Ok(HankelPair {
        value: j.value * 2.0 - other.value,
        deriv: j.deriv * 2.0 - other.deriv,
    })
}
