//! Minimal double-double ("f64 + f64") real and complex arithmetic.
//!
//! Only what the continuation oracle needs: +, −, ×, ÷. Roughly 32
//! significant digits. Error-free transformations follow Dekker/Knuth with
//! fused multiply-add for the product.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, y: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, y.hi);
        let (t, f) = two_sum(self.lo, y.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, y: Dd) -> Dd {
        self + (-y)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, y: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, y.hi);
        let e = e + (self.hi * y.lo + self.lo * y.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, y: Dd) -> Dd {
        let q1 = self.hi / y.hi;
        let r = self - y * Dd::from_f64(q1);
        let q2 = r.hi / y.hi;
        let r = r - y * Dd::from_f64(q2);
        let q3 = r.hi / y.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::from_f64(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn from_c64(z: Complex64) -> Self {
        CDd {
            re: Dd::from_f64(z.re),
            im: Dd::from_f64(z.im),
        }
    }

    pub fn from_real(x: Dd) -> Self {
        CDd { re: x, im: Dd::ZERO }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Leading-order modulus, good enough for convergence tests.
    pub fn norm_hi(self) -> f64 {
        self.re.hi.hypot(self.im.hi)
    }

    pub fn scale(self, k: Dd) -> Self {
        CDd {
            re: self.re * k,
            im: self.im * k,
        }
    }

    pub fn recip(self) -> Self {
        let d = self.re * self.re + self.im * self.im;
        CDd {
            re: self.re / d,
            im: -(self.im / d),
        }
    }
}

impl Add for CDd {
    type Output = CDd;
    #[inline]
    fn add(self, y: CDd) -> CDd {
        CDd {
            re: self.re + y.re,
            im: self.im + y.im,
        }
    }
}

impl Sub for CDd {
    type Output = CDd;
    #[inline]
    fn sub(self, y: CDd) -> CDd {
        CDd {
            re: self.re - y.re,
            im: self.im - y.im,
        }
    }
}

impl Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Mul for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, y: CDd) -> CDd {
        CDd {
            re: self.re * y.re - self.im * y.im,
            im: self.re * y.im + self.im * y.re,
        }
    }
}

impl Mul<Dd> for CDd {
    type Output = CDd;
    #[inline]
    fn mul(self, k: Dd) -> CDd {
        self.scale(k)
    }
}

impl Div for CDd {
    type Output = CDd;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, y: CDd) -> CDd {
        self * y.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_bits_lost_in_f64() {
        let a = Dd::from_f64(1.0);
        let tiny = Dd::from_f64(1e-20);
        let s = (a + tiny) - a;
        assert_eq!(s.to_f64(), 1e-20);
    }

    #[test]
    fn division_is_inverse_of_multiplication() {
        let x = Dd::from_f64(3.0);
        let third = Dd::from_f64(1.0) / x;
        let back = third * x - Dd::from_f64(1.0);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn complex_reciprocal() {
        let z = CDd::from_c64(Complex64::new(0.3, -1.7));
        let one = z * z.recip();
        assert!((one.re.to_f64() - 1.0).abs() < 1e-30);
        assert!(one.im.to_f64().abs() < 1e-30);
    }
}
