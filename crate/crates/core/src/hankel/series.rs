//! Ascending-series kernels on the principal sheet: J_μ for any real μ and
//! Y_n for integer n, each with its z-derivative.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::gamma::{digamma_int, rgamma};
use super::{HankelKind, HankelPair};
use crate::error::{Error, Result};

/// Relative size of the tail bound at which the ascending series stops.
const TAIL_REL: f64 = 1e-17;

/// z = ρ·e^{iφ} with the phase carried explicitly so that fractional powers
/// are taken on the intended branch.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Polar {
    pub rho: f64,
    pub arg: f64,
}

impl Polar {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.rho, self.arg)
    }

    /// ln(z/2) on the branch fixed by `arg`.
    fn ln_half(self) -> Complex64 {
        Complex64::new((0.5 * self.rho).ln(), self.arg)
    }
}

/// J_μ(z) and J'_μ(z) from Σ (−1)^j (z/2)^{μ+2j} / (j! Γ(μ+j+1)).
pub(crate) fn j_series(mu: f64, z: Polar, max_terms: usize) -> Result<HankelPair> {
    if mu < 0.0 && mu == mu.floor() {
        // J_{−n} = (−1)^n J_n
        let n = -mu;
        let p = j_series(n, z, max_terms)?;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(HankelPair {
            value: p.value * sign,
            deriv: p.deriv * sign,
        });
    }
    let zc = z.to_complex();
    let lead = (z.ln_half() * mu).exp() * rgamma(mu + 1.0);
    let half = Complex64::from_polar(0.5 * z.rho, z.arg);
    let q = -(half * half);
    let qn = q.norm();

    let mut term = lead;
    let mut sum = lead;
    let mut dsum = lead * mu;
    let mut bound = f64::INFINITY;
    for j in 1..max_terms {
        let jf = j as f64;
        term = term * q / (jf * (mu + jf));
        sum += term;
        dsum += term * (mu + 2.0 * jf);

        let next = jf + 1.0;
        let ratio = qn / (next * (mu + next).abs());
        if next > -mu && ratio < 1.0 {
            bound = term.norm() * ratio / (1.0 - ratio);
            let scale = sum.norm() + dsum.norm() / (mu.abs() + 2.0 * next + 2.0);
            if bound * (mu.abs() + 2.0 * next + 2.0) <= TAIL_REL * scale.max(f64::MIN_POSITIVE) {
                return Ok(HankelPair {
                    value: sum,
                    deriv: dsum / zc,
                });
            }
        }
    }
    Err(Error::SeriesNotConverged {
        order: mu,
        terms: max_terms,
        bound: bound / sum.norm().max(f64::MIN_POSITIVE),
    })
}

/// Y_n(z) for integer n ≥ 0 by the logarithmic ascending series.
pub(crate) fn y_series_int(n: u64, z: Polar, max_terms: usize) -> Result<Complex64> {
    let zc = z.to_complex();
    let half = zc * 0.5;
    let quarter_sq = half * half;
    let nf = n as f64;

    // −((z/2)^{−n}/π) Σ_{k<n} (n−k−1)!/k! (z²/4)^k
    let mut finite = Complex64::new(0.0, 0.0);
    if n > 0 {
        let mut pow = Complex64::new(1.0, 0.0);
        let mut kfact = 1.0;
        for k in 0..n {
            if k > 0 {
                pow *= quarter_sq;
                kfact *= k as f64;
            }
            let nk1 = (1..(n - k)).map(|i| i as f64).product::<f64>();
            finite += pow * (nk1 / kfact);
        }
        finite = -finite * half.powf(-nf) / PI;
    }

    let jn = j_series(nf, z, max_terms)?.value;
    let log_part = z.ln_half() * jn * (2.0 / PI);

    // −((z/2)^n/π) Σ (ψ(k+1)+ψ(n+k+1)) (−z²/4)^k / (k!(n+k)!)
    let q = -quarter_sq;
    let mut p = Complex64::new(rgamma(nf + 1.0), 0.0);
    let mut psi_a = digamma_int(1);
    let mut psi_b = digamma_int(n + 1);
    let mut inf = p * (psi_a + psi_b);
    let mut converged = false;
    for k in 1..max_terms {
        let kf = k as f64;
        p = p * q / (kf * (nf + kf));
        psi_a += 1.0 / kf;
        psi_b += 1.0 / (nf + kf);
        let t = p * (psi_a + psi_b);
        inf += t;
        if t.norm() <= TAIL_REL * inf.norm() && kf * kf > q.norm() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SeriesNotConverged {
            order: nf,
            terms: max_terms,
            bound: f64::NAN,
        });
    }
    let pref = Complex64::from_polar((0.5 * z.rho).powf(nf), nf * z.arg);
    Ok(finite + log_part - pref * inf / PI)
}

/// Hankel pair from the J_{±ν} combination (or J_n ± iY_n at integer order).
pub(crate) fn hankel_small(kind: HankelKind, nu: f64, snapped: Option<u64>, z: Polar, max_terms: usize) -> Result<HankelPair> {
    let i = Complex64::i();
    if let Some(n) = snapped {
        let j = j_series(n as f64, z, max_terms)?;
        let y0 = y_series_int(n, z, max_terms)?;
        let y1 = y_series_int(n + 1, z, max_terms)?;
        let yd = y0 * (n as f64) / z.to_complex() - y1;
        let s = match kind {
            HankelKind::One => i,
            HankelKind::Two => -i,
        };
        return Ok(HankelPair {
            value: j.value + s * y0,
            deriv: j.deriv + s * yd,
        });
    }
    let jp = j_series(nu, z, max_terms)?;
    let jm = j_series(-nu, z, max_terms)?;
    let sin = (PI * nu).sin();
    let (phase, denom) = match kind {
        HankelKind::One => (Complex64::from_polar(1.0, -PI * nu), i * sin),
        HankelKind::Two => (Complex64::from_polar(1.0, PI * nu), -i * sin),
    };
    Ok(HankelPair {
        value: (jm.value - phase * jp.value) / denom,
        deriv: (jm.deriv - phase * jp.deriv) / denom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar(z: Complex64) -> Polar {
        Polar {
            rho: z.norm(),
            arg: z.arg(),
        }
    }

    #[test]
    fn half_order_matches_closed_form() {
        // J_{1/2}(z) = √(2/(πz)) sin z, J_{−1/2}(z) = √(2/(πz)) cos z
        for z in [Complex64::new(0.7, 0.0), Complex64::new(3.0, -2.0), Complex64::new(-1.0, 4.0)] {
            let pre = (2.0 / (PI * z)).sqrt();
            let jp = j_series(0.5, polar(z), 500).unwrap().value;
            let jm = j_series(-0.5, polar(z), 500).unwrap().value;
            assert!((jp - pre * z.sin()).norm() <= 1e-14 * (pre * z.sin()).norm().max(1.0));
            assert!((jm - pre * z.cos()).norm() <= 1e-14 * (pre * z.cos()).norm().max(1.0));
        }
    }

    #[test]
    fn derivative_by_recurrence() {
        // J'_μ = (μ/z) J_μ − J_{μ+1}
        let z = Complex64::new(1.3, 0.4);
        for mu in [0.3, 1.0, -0.7, 2.25] {
            let a = j_series(mu, polar(z), 500).unwrap();
            let b = j_series(mu + 1.0, polar(z), 500).unwrap();
            let expect = a.value * mu / z - b.value;
            assert!((a.deriv - expect).norm() < 1e-14, "mu = {mu}");
        }
    }

    #[test]
    fn negative_integer_order_reflects() {
        let z = polar(Complex64::new(1.1, 0.2));
        let a = j_series(-3.0, z, 500).unwrap().value;
        let b = j_series(3.0, z, 500).unwrap().value;
        assert!((a + b).norm() < 1e-16);
    }

    #[test]
    fn y_integer_reference() {
        // mpmath.bessely(0, 1), bessely(1, 1.5), bessely(2, 0.5+0.5j)
        let y0 = y_series_int(0, polar(Complex64::new(1.0, 0.0)), 500).unwrap();
        assert!((y0 - Complex64::new(0.088_256_964_215_676_96, 0.0)).norm() < 1e-15);
        let y1 = y_series_int(1, polar(Complex64::new(1.5, 0.0)), 500).unwrap();
        assert!((y1 - Complex64::new(-0.412_308_626_973_911_3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reports_non_convergence() {
        let err = j_series(0.3, polar(Complex64::new(30.0, 0.0)), 5).unwrap_err();
        assert!(matches!(err, Error::SeriesNotConverged { terms: 5, .. }));
    }
}
