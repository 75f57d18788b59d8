//! Bessel and Hankel functions of real order ν ≥ 0, on the principal sheet
//! and on any sheet of the logarithmic Riemann surface.
//!
//! Principal-sheet evaluation picks one of three kernels by |z|: ascending
//! series below 2, Steed's continued fraction for K_ν up to the switch
//! radius, and the Hankel asymptotic expansion beyond it. Other sheets are
//! reached through the circuit relations, never by direct asymptotics.

mod asymptotic;
mod dd;
mod gamma;
mod monodromy;
mod oracle;
mod series;
mod steed;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::riemann::SurfacePoint;
use series::Polar;

pub use gamma::{gamma, rgamma};

pub const DEFAULT_INTEGER_TOLERANCE: f64 = 1e-6;
/// Below this modulus the ascending series is used.
pub const SERIES_RADIUS: f64 = 2.0;
/// At and beyond this modulus the asymptotic expansion is used.
pub const Z_SWITCH: f64 = 18.0;
pub const ASYMPTOTIC_TERMS: usize = 40;
pub const SERIES_TERMS: usize = 500;
/// Agreement required between kernels inside the overlap annulus.
pub const OVERLAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HankelKind {
    One,
    Two,
}

impl HankelKind {
    pub fn other(self) -> HankelKind {
        match self {
            HankelKind::One => HankelKind::Two,
            HankelKind::Two => HankelKind::One,
        }
    }
}

/// A function value together with its z-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HankelPair {
    pub value: Complex64,
    pub deriv: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Order {
    nu: f64,
    integer_tolerance: f64,
}

impl Order {
    pub fn new(nu: f64) -> Result<Self> {
        Self::with_tolerance(nu, DEFAULT_INTEGER_TOLERANCE)
    }

    pub fn with_tolerance(nu: f64, integer_tolerance: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::InvalidArgument(format!("order must be finite and >= 0, got {nu}")));
        }
        if !(integer_tolerance > 0.0 && integer_tolerance < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "integer tolerance must lie in (0, 0.5), got {integer_tolerance}"
            )));
        }
        Ok(Order { nu, integer_tolerance })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn integer_tolerance(&self) -> f64 {
        self.integer_tolerance
    }

    /// round(ν) when ν is within the integer tolerance of it.
    pub fn nearest_integer(&self) -> Option<u64> {
        let n = self.nu.round();
        ((self.nu - n).abs() < self.integer_tolerance).then_some(n as u64)
    }

    /// The order actually used by the kernels: snapped to round(ν) when
    /// near-integer, so that every formula sees the same value.
    pub fn effective_nu(&self) -> f64 {
        self.nearest_integer().map_or(self.nu, |n| n as f64)
    }
}

fn principal_polar(z: Complex64) -> Result<Polar> {
    if !z.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite argument {z}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::BranchPoint);
    }
    Ok(Polar {
        rho: z.norm(),
        arg: z.arg(),
    })
}

/// J_ν(z) by its ascending series on the principal sheet.
pub fn bessel_j(order: &Order, z: Complex64, terms: usize) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Ok(Complex64::new(if order.nu == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    let p = principal_polar(z)?;
    Ok(series::j_series(order.nu, p, terms)?.value)
}

/// Evaluation without the asymptotic expansion: series below
/// [`SERIES_RADIUS`], continued fraction above.
pub fn hankel_convergent_pair(kind: HankelKind, order: &Order, z: Complex64) -> Result<HankelPair> {
    let p = principal_polar(z)?;
    convergent(kind, order, p)
}

fn convergent(kind: HankelKind, order: &Order, p: Polar) -> Result<HankelPair> {
    let nu = order.effective_nu();
    if p.rho < SERIES_RADIUS {
        series::hankel_small(kind, nu, order.nearest_integer(), p, SERIES_TERMS)
    } else {
        steed::hankel_moderate(kind, nu, p, SERIES_TERMS)
    }
}

/// Asymptotic pair with an explicit term budget.
pub fn hankel_asymptotic_pair(kind: HankelKind, order: &Order, z: Complex64, n_terms: usize) -> Result<HankelPair> {
    let p = principal_polar(z)?;
    asymptotic::hankel_asymptotic(kind, order.effective_nu(), p, n_terms)
}

pub fn hankel_asymptotic(kind: HankelKind, order: &Order, z: Complex64, n_terms: usize) -> Result<Complex64> {
    Ok(hankel_asymptotic_pair(kind, order, z, n_terms)?.value)
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Relative disagreement of the convergent and asymptotic kernels at z.
/// Fails with `RegimeDisagreement` above [`OVERLAP_TOL`].
pub fn check_regime_overlap(kind: HankelKind, order: &Order, z: Complex64) -> Result<f64> {
    let a = hankel_convergent_pair(kind, order, z)?;
    let b = hankel_asymptotic_pair(kind, order, z, ASYMPTOTIC_TERMS)?;
    let rel = relative_gap(a.value, b.value).max(relative_gap(a.deriv, b.deriv));
    if rel > OVERLAP_TOL {
        return Err(Error::RegimeDisagreement { modulus: z.norm(), rel });
    }
    Ok(rel)
}

pub fn hankel_principal_pair(kind: HankelKind, order: &Order, z: Complex64) -> Result<HankelPair> {
    let p = principal_polar(z)?;
    if p.rho < Z_SWITCH {
        return convergent(kind, order, p);
    }
    match asymptotic::hankel_asymptotic(kind, order.effective_nu(), p, ASYMPTOTIC_TERMS) {
        Ok(v) => Ok(v),
        Err(Error::InsufficientModulus { .. }) => convergent(kind, order, p),
        Err(e) => Err(e),
    }
}

pub fn hankel_principal(kind: HankelKind, order: &Order, z: Complex64) -> Result<Complex64> {
    Ok(hankel_principal_pair(kind, order, z)?.value)
}

/// (a, b) with H2(z e^{imπ}) = a·H2(z) + b·H1(z). Valid for every integer m.
pub fn monodromy_coeffs(order: &Order, m: i64) -> (Complex64, Complex64) {
    monodromy::h2_circuit(order.effective_nu(), m)
}

/// (c, d) with H1(z e^{imπ}) = c·H1(z) + d·H2(z).
pub fn h1_circuit_coeffs(order: &Order, m: i64) -> (Complex64, Complex64) {
    monodromy::h1_circuit(order.effective_nu(), m)
}

/// Matrix T with (H2, H1)(z e^{imπ}) = T·(H2, H1)(z).
pub fn transfer_matrix(order: &Order, m: i64) -> [[Complex64; 2]; 2] {
    let (a, b) = monodromy_coeffs(order, m);
    let (c, d) = h1_circuit_coeffs(order, m);
    [[a, b], [d, c]]
}

/// sin(kπν)/sin(πν) at the effective order, continuous through integers.
pub fn sine_ratio(order: &Order, k: i64) -> f64 {
    monodromy::sine_ratio(order.effective_nu(), k)
}

/// Split θ = θ₀ + mπ with θ₀ ∈ (−π, 0].
pub fn sheet_decomposition(theta: f64) -> (i64, f64) {
    let m = (theta / std::f64::consts::PI).ceil();
    (m as i64, theta - m * std::f64::consts::PI)
}

fn on_surface_with<F>(kind: HankelKind, order: &Order, p: &SurfacePoint, principal: F) -> Result<HankelPair>
where
    F: Fn(HankelKind, Complex64) -> Result<HankelPair>,
{
    let (m, theta0) = sheet_decomposition(p.theta());
    let z0 = Complex64::from_polar(p.rho(), theta0);
    if m == 0 {
        return principal(kind, z0);
    }
    let h1 = principal(HankelKind::One, z0)?;
    let h2 = principal(HankelKind::Two, z0)?;
    let (x, y, own, other) = match kind {
        HankelKind::Two => {
            let (a, b) = monodromy_coeffs(order, m);
            (a, b, h2, h1)
        }
        HankelKind::One => {
            let (c, d) = h1_circuit_coeffs(order, m);
            (c, d, h1, h2)
        }
    };
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Ok(HankelPair {
        value: x * own.value + y * other.value,
        deriv: (x * own.deriv + y * other.deriv) * sign,
    })
}

/// Value and z-derivative on the sheet selected by the unwrapped phase of `p`.
pub fn hankel_on_surface_pair(kind: HankelKind, order: &Order, p: &SurfacePoint) -> Result<HankelPair> {
    on_surface_with(kind, order, p, |k, z| hankel_principal_pair(k, order, z))
}

/// As [`hankel_on_surface_pair`], with the principal values taken strictly
/// from the asymptotic expansion (fails if |z| is too small for it).
pub fn hankel_on_surface_asymptotic_pair(
    kind: HankelKind,
    order: &Order,
    p: &SurfacePoint,
    n_terms: usize,
) -> Result<HankelPair> {
    on_surface_with(kind, order, p, |k, z| hankel_asymptotic_pair(k, order, z, n_terms))
}

pub fn hankel_on_surface(kind: HankelKind, order: &Order, p: &SurfacePoint) -> Result<Complex64> {
    Ok(hankel_on_surface_pair(kind, order, p)?.value)
}

/// Numerically continue H^(kind)_ν from z0 (principal sheet) around the
/// circle |z| = |z0| through `dtheta`, seeded with the principal values.
pub fn continuation_oracle(kind: HankelKind, order: &Order, z0: Complex64, dtheta: f64) -> Result<HankelPair> {
    let seed = hankel_principal_pair(kind, order, z0)?;
    oracle::continue_on_circle(order.effective_nu(), z0, seed, dtheta)
}

/// As [`continuation_oracle`] but from an arbitrary seed solution.
pub fn continuation_oracle_seeded(order: &Order, z0: Complex64, seed: HankelPair, dtheta: f64) -> Result<HankelPair> {
    principal_polar(z0)?;
    oracle::continue_on_circle(order.effective_nu(), z0, seed, dtheta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: Complex64, b: Complex64) -> f64 {
        relative_gap(a, b)
    }

    #[test]
    fn half_order_closed_forms() {
        let i = Complex64::i();
        let o = Order::new(0.5).unwrap();
        let z = Complex64::new(1.0, 0.0);
        let h2 = hankel_principal(HankelKind::Two, &o, z).unwrap();
        let h1 = hankel_principal(HankelKind::One, &o, z).unwrap();
        let s = (2.0 / PI).sqrt();
        assert!(rel(h2, i * s * (-i).exp()) < 1e-14);
        assert!(rel(h1, -i * s * i.exp()) < 1e-14);
    }

    #[test]
    fn wronskian_at_two() {
        let o = Order::new(0.7).unwrap();
        let z = Complex64::new(2.0, 0.0);
        let a = hankel_principal_pair(HankelKind::One, &o, z).unwrap();
        let b = hankel_principal_pair(HankelKind::Two, &o, z).unwrap();
        let w = a.value * b.deriv - a.deriv * b.value;
        let expect = Complex64::new(0.0, -4.0) / (PI * 2.0);
        assert!(rel(w, expect) < 1e-13, "{w} vs {expect}");
    }

    #[test]
    fn bessel_j_examples() {
        let o = Order::new(0.0).unwrap();
        assert_eq!(bessel_j(&o, Complex64::new(0.0, 0.0), 10).unwrap(), Complex64::new(1.0, 0.0));
        let h = Order::new(0.5).unwrap();
        let j = bessel_j(&h, Complex64::new(PI / 2.0, 0.0), 100).unwrap();
        assert!((j.re - 2.0 / PI).abs() < 1e-15 && j.im.abs() < 1e-16);
        let o3 = Order::new(0.3).unwrap();
        let z = 1e-6;
        let lead = (z / 2.0f64).powf(0.3) / gamma(1.3);
        let r = bessel_j(&o3, Complex64::new(z, 0.0), 100).unwrap().re / lead;
        assert!((r - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monodromy_examples() {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        let half = Order::new(0.5).unwrap();
        let (a, b) = monodromy_coeffs(&half, 2);
        assert!((a - c(-1.0, 0.0)).norm() < 1e-15 && b.norm() < 1e-15);
        let one = Order::new(1.0).unwrap();
        let (a, b) = monodromy_coeffs(&one, 2);
        assert!((a - c(3.0, 0.0)).norm() < 1e-14 && (b - c(2.0, 0.0)).norm() < 1e-14);
        for nu in [0.0, 0.3, 2.7] {
            let (a, b) = monodromy_coeffs(&Order::new(nu).unwrap(), 0);
            assert_eq!((a, b.norm()), (c(1.0, 0.0), 0.0));
        }
    }

    #[test]
    fn near_integer_snaps_to_limit() {
        let near = Order::new(1.0 + 1e-8).unwrap();
        let (a, b) = monodromy_coeffs(&near, 2);
        assert_eq!(a, Complex64::new(3.0, 0.0));
        assert!((b - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn surface_half_order_sign_flip() {
        let o = Order::new(0.5).unwrap();
        let p0 = SurfacePoint::new(1.0, -PI / 2.0).unwrap();
        let p2 = SurfacePoint::new(1.0, -PI / 2.0 + 2.0 * PI).unwrap();
        let v0 = hankel_on_surface(HankelKind::Two, &o, &p0).unwrap();
        let v2 = hankel_on_surface(HankelKind::Two, &o, &p2).unwrap();
        assert!(rel(v2, -v0) < 1e-14);
        assert_eq!(v0, hankel_principal(HankelKind::Two, &o, Complex64::new(0.0, -1.0)).unwrap());
    }

    #[test]
    fn surface_matches_oracle_one_turn() {
        let o = Order::new(0.7).unwrap();
        let z0 = Complex64::from_polar(3.0, -PI / 2.0);
        let p = SurfacePoint::new(3.0, -PI / 2.0 + 2.0 * PI).unwrap();
        let surf = hankel_on_surface_pair(HankelKind::Two, &o, &p).unwrap();
        let orc = continuation_oracle(HankelKind::Two, &o, z0, 2.0 * PI).unwrap();
        assert!(rel(surf.value, orc.value) < 1e-8, "{} vs {}", surf.value, orc.value);
        assert!(rel(surf.deriv, orc.deriv) < 1e-8);
    }

    #[test]
    fn rejects_branch_point_and_negative_order() {
        let o = Order::new(0.3).unwrap();
        assert!(matches!(
            hankel_principal(HankelKind::One, &o, Complex64::new(0.0, 0.0)),
            Err(Error::BranchPoint)
        ));
        assert!(Order::new(-0.1).is_err());
    }

    #[test]
    fn overlap_annulus() {
        for nu in [0.0, 0.3, 0.5, 1.0, 1.25, 2.5] {
            let o = Order::new(nu).unwrap();
            for r in [0.8, 0.9, 1.0, 1.1, 1.2] {
                for k in 0..12 {
                    let arg = -PI + 1e-3 + (2.0 * PI - 2e-3) * k as f64 / 11.0;
                    let z = Complex64::from_polar(r * Z_SWITCH, arg);
                    for kind in [HankelKind::One, HankelKind::Two] {
                        check_regime_overlap(kind, &o, z).unwrap_or_else(|e| panic!("nu={nu} z={z} {kind:?}: {e}"));
                    }
                }
            }
        }
    }
}
