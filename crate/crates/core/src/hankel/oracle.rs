//! Independent continuation of Bessel's equation along a circle |z| = R by
//! Taylor stepping in double-double arithmetic. Going around the origin
//! mixes a recessive solution with a dominant one whose size ratio reaches
//! e^{2R}, so f64 stepping would lose the small component.

use num_complex::Complex64;

use super::dd::{CDd, Dd};
use super::HankelPair;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 300;
const TERM_REL: f64 = 1e-32;

/// Advance (w, w') from `zc` to `zc + h` by the Taylor series of
/// z²w'' + zw' + (z² − ν²)w = 0 about zc.
fn taylor_step(nu2: Dd, zc: CDd, h: CDd, w: CDd, dw: CDd) -> Result<(CDd, CDd)> {
    // d_k = c_k h^k
    let zc2 = zc * zc;
    let h2 = h * h;
    let h3 = h2 * h;
    let h4 = h2 * h2;
    let base = zc2 - CDd::from_real(nu2);
    let mut d: Vec<CDd> = Vec::with_capacity(64);
    d.push(w);
    d.push(dw * h);
    let mut sum = w + d[1];
    let mut dsum = d[1];
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let mut acc = zc * d[k + 1] * h * Dd::from_f64((kf + 1.0) * (2.0 * kf + 1.0));
        acc = acc + (base + CDd::from_real(Dd::from_f64(kf * kf))) * d[k] * h2;
        if k >= 1 {
            acc = acc + zc * d[k - 1] * h3 * Dd::from_f64(2.0);
        }
        if k >= 2 {
            acc = acc + d[k - 2] * h4;
        }
        let next = -acc / (zc2 * Dd::from_f64((kf + 2.0) * (kf + 1.0)));
        sum = sum + next;
        dsum = dsum + next * Dd::from_f64(kf + 2.0);
        let scale = sum.norm_hi().max(dsum.norm_hi());
        if next.norm_hi() * (kf + 3.0) <= TERM_REL * scale {
            small += 1;
            if small >= 3 {
                return Ok((sum, dsum / h));
            }
        } else {
            small = 0;
        }
        d.push(next);
    }
    Err(Error::OracleFailure(format!(
        "Taylor series at z = {} did not converge in {MAX_TERMS} terms",
        zc.to_c64()
    )))
}

/// Continue a solution of Bessel's equation of order ν from z0 along the
/// circle |z| = |z0| through a total phase increment `dtheta`.
pub(crate) fn continue_on_circle(nu: f64, z0: Complex64, seed: HankelPair, dtheta: f64) -> Result<HankelPair> {
    if dtheta == 0.0 {
        return Ok(seed);
    }
    let r = z0.norm();
    if !(r > 0.0) || !dtheta.is_finite() {
        return Err(Error::OracleFailure(format!("invalid circle: |z0| = {r}, dtheta = {dtheta}")));
    }
    let theta0 = z0.arg();
    let hmax = (0.2 * r).min(1.5);
    let n = ((dtheta.abs() * r) / hmax).ceil().max(1.0) as usize;
    let nu2 = Dd::from_f64(nu) * Dd::from_f64(nu);

    let node = |j: usize| -> Complex64 {
        if j == 0 {
            z0
        } else {
            Complex64::from_polar(r, theta0 + dtheta * (j as f64) / (n as f64))
        }
    };
    let mut w = CDd::from_c64(seed.value);
    let mut dw = CDd::from_c64(seed.deriv);
    let mut zc = node(0);
    for j in 1..=n {
        let zn = node(j);
        let h = CDd::from_c64(zn) - CDd::from_c64(zc);
        let (w1, dw1) = taylor_step(nu2, CDd::from_c64(zc), h, w, dw)?;
        w = w1;
        dw = dw1;
        zc = zn;
    }
    Ok(HankelPair {
        value: w.to_c64(),
        deriv: dw.to_c64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn half_order_plane_wave_round_trip() {
        // √z·H_{1/2} ∝ e^{±iz}; use w = sin z / √z (ν = 1/2) which picks up
        // a factor −1 per full turn from the square root.
        let z0 = Complex64::new(0.0, -3.0);
        let w = z0.sin() / z0.sqrt();
        let dw = z0.cos() / z0.sqrt() - 0.5 * z0.sin() / (z0 * z0.sqrt());
        let out = continue_on_circle(0.5, z0, HankelPair { value: w, deriv: dw }, 2.0 * PI).unwrap();
        assert!((out.value + w).norm() < 1e-14 * w.norm());
        assert!((out.deriv + dw).norm() < 1e-14 * dw.norm());
    }

    #[test]
    fn empty_path_is_identity() {
        let seed = HankelPair {
            value: Complex64::new(1.0, 2.0),
            deriv: Complex64::new(-0.5, 0.1),
        };
        let out = continue_on_circle(0.3, Complex64::new(2.0, 0.0), seed, 0.0).unwrap();
        assert_eq!(out, seed);
    }
}
