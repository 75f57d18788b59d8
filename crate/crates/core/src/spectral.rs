//! Quantization of the free radial problem on knotted contours: the closed
//! form of the growing coefficient, the allowed (N, M) table, couplings, and
//! shooting/scanning through the ODE pipeline.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::contour::{build_contour, ContourPath, ContourSpec, Segment};
use crate::error::{Error, Result};
use crate::hankel::{self, HankelKind, Order, ASYMPTOTIC_TERMS};
use crate::ode::{self, Numerics, Propagation};

/// Tolerance for the bound-state test; equal to the hankel near-integer policy.
pub const BOUND_STATE_TOL: f64 = hankel::DEFAULT_INTEGER_TOLERANCE;
/// Minima with residual above this are dropped by scans.
pub const SCAN_ACCEPT: f64 = 1e-4;
pub const GOLDEN_WIDTH: f64 = 1e-8;

/// ℓ on the branch ℓ = ν − 1/2 ≥ −1/2.
pub fn ell_of(nu: f64) -> f64 {
    nu - 0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnotQuantum {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub nu: f64,
    pub ell: f64,
    pub allowed: bool,
}

impl KnotQuantum {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument(format!("N and M must be positive, got N={n}, M={m}")));
        }
        let two_n = 2.0 * n as f64;
        Ok(KnotQuantum {
            n,
            m,
            nu: m as f64 / two_n,
            ell: (m as f64 - n as f64) / two_n,
            allowed: !m.is_multiple_of(2 * n),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalChannel {
    #[serde(rename = "D")]
    pub dim: u32,
    pub m: u32,
    pub gamma: f64,
    pub kappa: f64,
}

impl PhysicalChannel {
    pub fn new(dim: u32, m: u32, gamma: f64, kappa: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if dim == 1 && m > 1 {
            return Err(Error::InvalidArgument(format!("D = 1 admits only m in {{0, 1}}, got {m}")));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!("gamma must be finite, got {gamma}")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Ok(PhysicalChannel { dim, m, gamma, kappa })
    }
}

fn shifted_wave(dim: u32, m: u32) -> f64 {
    m as f64 + (dim as f64 - 2.0) / 2.0
}

/// ν = √(γ + (m + (D−2)/2)²).
pub fn effective_order(ch: &PhysicalChannel) -> Result<f64> {
    let a = shifted_wave(ch.dim, ch.m);
    let rad = ch.gamma + a * a;
    if rad < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "gamma = {} gives complex order (nu^2 = {rad}); not supported",
            ch.gamma
        )));
    }
    Ok(rad.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coupling {
    pub gamma: f64,
    pub forbidden: bool,
}

/// γ = (M/2N)² − (m + (D−2)/2)²; `forbidden` flags M ≡ 0 mod 2N.
pub fn coupling_for_knot(dim: u32, m: u32, n: u32, big_m: u32) -> Result<Coupling> {
    let q = KnotQuantum::new(n, big_m)?;
    let a = shifted_wave(dim, m);
    Ok(Coupling {
        gamma: q.nu * q.nu - a * a,
        forbidden: !q.allowed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dichotomy {
    pub allowed_free: bool,
    #[serde(rename = "M")]
    pub big_m: Option<u64>,
}

/// The free (γ = 0) channel: ν = |m + (D−2)/2| and M = 2Nν.
pub fn dimension_dichotomy(dim: u32, m: u32, n: u32) -> Dichotomy {
    let nu = shifted_wave(dim, m).abs();
    let big_m = (2.0 * n as f64 * nu).round() as u64;
    if big_m == 0 {
        return Dichotomy {
            allowed_free: false,
            big_m: None,
        };
    }
    Dichotomy {
        allowed_free: !big_m.is_multiple_of(2 * n as u64),
        big_m: Some(big_m),
    }
}

pub fn allowed_angular_momenta(n: u32, m_max: u32) -> Result<Vec<KnotQuantum>> {
    if n == 0 || m_max == 0 {
        return Err(Error::InvalidArgument("N and M_max must be positive".into()));
    }
    (1..=m_max)
        .filter(|m| m % (2 * n) != 0)
        .map(|m| KnotQuantum::new(n, m))
        .collect()
}

/// Coefficient of the growing H^(1) after N turns, e^{iπν}·sin(2Nπν)/sin(πν).
pub fn growing_coefficient(nu: f64, n: u32) -> Result<Complex64> {
    let o = Order::new(nu)?;
    Ok(hankel::monodromy_coeffs(&o, 2 * n as i64).1)
}

/// |A| / (|A| + |a|) with (a, A) the H^(2) circuit coefficients for m = 2N.
pub fn predicted_residual(nu: f64, n: u32) -> Result<f64> {
    let o = Order::new(nu)?;
    let (a, b) = hankel::monodromy_coeffs(&o, 2 * n as i64);
    Ok(b.norm() / (b.norm() + a.norm()))
}

fn dist_to_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

pub fn is_bound_state(nu: f64, n: u32, tol: f64) -> bool {
    dist_to_int(2.0 * n as f64 * nu) < tol && dist_to_int(nu) >= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootResult {
    pub c1: Complex64,
    pub c2: Complex64,
    pub residual: f64,
    pub predicted_residual: f64,
    /// log of the overall scale of ψ at the end of the path.
    pub logscale: f64,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl ShootResult {
    pub fn ratio(&self) -> Complex64 {
        self.c1 / self.c2
    }
}

fn check_shoot_args(nu: f64, n: u32, kappa: f64, cspec: &ContourSpec) -> Result<()> {
    if !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::InvalidArgument(format!("nu must be finite and >= 0, got {nu}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    if cspec.n != n {
        return Err(Error::InvalidArgument(format!(
            "contour has N = {}, shoot asked for N = {n}",
            cspec.n
        )));
    }
    cspec.validate()
}

/// Shoot and also return the path and the full propagation record.
pub fn shoot_detailed(
    nu: f64,
    n: u32,
    kappa: f64,
    cspec: &ContourSpec,
    num: &Numerics,
) -> Result<(ShootResult, ContourPath, Propagation)> {
    check_shoot_args(nu, n, kappa, cspec)?;
    let order = Order::new(nu)?;
    let path = build_contour(cspec)?;
    let seed = ode::seed_asymptotic(HankelKind::Two, &order, path.first(), kappa, ASYMPTOTIC_TERMS)?;
    let ell = ell_of(order.effective_nu());
    let prop = ode::propagate_detailed(&path, ell, Complex64::new(kappa * kappa, 0.0), seed, num)?;
    let end = prop.final_state();
    let (s1, s2, logscale) = ode::fit_coefficients_scaled(&end, path.last(), &order, kappa)?;
    let residual = s1.norm() / (s1.norm() + s2.norm());
    let k = logscale.exp();
    if !k.is_finite() {
        return Err(Error::Overflow(logscale));
    }
    let result = ShootResult {
        c1: s1 * k,
        c2: s2 * k,
        residual,
        predicted_residual: predicted_residual(nu, n)?,
        logscale,
        steps: prop.accepted_steps,
        rejected_steps: prop.rejected_steps,
    };
    Ok((result, path, prop))
}

/// Seed the decaying H^(2) in S_0, carry it over C^(N), and fit the local
/// Hankel pair in S_{2N}.
pub fn shoot(nu: f64, n: u32, kappa: f64, cspec: &ContourSpec, num: &Numerics) -> Result<ShootResult> {
    Ok(shoot_detailed(nu, n, kappa, cspec, num)?.0)
}

/// |ψ| along the outgoing ray as (κρ, log|ψ|) pairs.
pub fn outgoing_profile(path: &ContourPath, prop: &Propagation, kappa: f64) -> Vec<(f64, f64)> {
    path.points
        .iter()
        .zip(&path.segments)
        .zip(&prop.states)
        .filter(|((_, s), _)| **s == Segment::OutgoingRay)
        .map(|((p, _), st)| (kappa * p.rho(), st.log_abs_psi()))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanMinimum {
    pub nu: f64,
    pub residual: f64,
}

/// `points` values from a to b inclusive.
pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![a];
    }
    (0..points)
        .map(|i| {
            if i + 1 == points {
                b
            } else {
                a + (b - a) * i as f64 / (points - 1) as f64
            }
        })
        .collect()
}

fn golden_section<F: Fn(f64) -> Result<f64>>(f: F, mut a: f64, mut b: f64, width: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > width {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Shooting residual on an inclusive ν grid, in parallel; every interior
/// local minimum is refined by golden-section search and kept if its
/// residual is below [`SCAN_ACCEPT`].
pub fn scan_sturmian(
    n: u32,
    kappa: f64,
    nu_min: f64,
    nu_max: f64,
    grid_points: usize,
    cspec: &ContourSpec,
    num: &Numerics,
) -> Result<Vec<ScanMinimum>> {
    if !(nu_min >= 0.0 && nu_min < nu_max && nu_max.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= nu_min < nu_max, got [{nu_min}, {nu_max}]"
        )));
    }
    if grid_points < 3 {
        return Err(Error::InvalidArgument("a scan needs at least 3 grid points".into()));
    }
    check_shoot_args(nu_min, n, kappa, cspec)?;
    let grid = linspace(nu_min, nu_max, grid_points);
    let residual = |nu: f64| shoot(nu, n, kappa, cspec, num).map(|r| r.residual);
    let values: Vec<f64> = grid.par_iter().map(|&nu| residual(nu)).collect::<Result<_>>()?;

    let brackets: Vec<(f64, f64)> = (1..grid_points - 1)
        .filter(|&i| {
            values[i] <= values[i - 1] && values[i] <= values[i + 1] && (values[i] < values[i - 1] || values[i] < values[i + 1])
        })
        .map(|i| (grid[i - 1], grid[i + 1]))
        .collect();
    let refined: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(a, b)| golden_section(residual, a, b, GOLDEN_WIDTH))
        .collect::<Result<_>>()?;
    Ok(refined
        .into_iter()
        .filter(|&(_, r)| r < SCAN_ACCEPT)
        .map(|(nu, residual)| ScanMinimum { nu, residual })
        .collect())
}

/// Whether residual minima at ν should exist: ν = M/2N with ν ∉ ℤ.
pub fn quantized_orders(n: u32, nu_min: f64, nu_max: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let two_n = 2 * n;
    let lo = (nu_min * two_n as f64).ceil().max(1.0) as u32;
    let hi = (nu_max * two_n as f64).floor() as u32;
    (lo..=hi)
        .filter(|m| m % two_n != 0)
        .map(|m| m as f64 / two_n as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn growing_coefficient_examples() {
        assert!(growing_coefficient(0.5, 1).unwrap().norm() < 1e-15);
        assert!((growing_coefficient(1.0, 1).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        for nu in [0.0, 0.37, 1.0, 2.9] {
            assert_eq!(growing_coefficient(nu, 0).unwrap().norm(), 0.0);
        }
    }

    #[test]
    fn bound_state_examples() {
        assert!(is_bound_state(0.5, 1, BOUND_STATE_TOL));
        assert!(!is_bound_state(1.0, 1, BOUND_STATE_TOL));
        assert!(is_bound_state(0.25, 2, BOUND_STATE_TOL));
        assert!(!is_bound_state(0.3, 1, BOUND_STATE_TOL));
    }

    #[test]
    fn allowed_tables() {
        let t = allowed_angular_momenta(1, 5).unwrap();
        assert_eq!(t.iter().map(|q| q.m).collect::<Vec<_>>(), vec![1, 3, 5]);
        assert_eq!(t.iter().map(|q| q.ell).collect::<Vec<_>>(), vec![0.0, 1.0, 2.0]);
        assert!(t.iter().all(|q| q.nu.fract() == 0.5));
        let t = allowed_angular_momenta(2, 5).unwrap();
        assert_eq!(t.iter().map(|q| q.m).collect::<Vec<_>>(), vec![1, 2, 3, 5]);
        assert_eq!(t.iter().map(|q| q.ell).collect::<Vec<_>>(), vec![-0.25, 0.0, 0.25, 0.75]);
    }

    #[test]
    fn effective_order_examples() {
        let nu = |d, m, g| effective_order(&PhysicalChannel::new(d, m, g, 1.0).unwrap()).unwrap();
        assert_eq!(nu(3, 0, 0.0), 0.5);
        assert_eq!(nu(2, 0, 0.25), 0.5);
        assert_eq!(nu(5, 1, 0.0), 2.5);
        assert!(effective_order(&PhysicalChannel::new(3, 0, -1.0, 1.0).unwrap()).is_err());
        assert!(PhysicalChannel::new(1, 2, 0.0, 1.0).is_err());
    }

    #[test]
    fn coupling_examples() {
        assert_eq!(coupling_for_knot(3, 0, 1, 1).unwrap().gamma, 0.0);
        assert_eq!(coupling_for_knot(2, 0, 1, 1).unwrap().gamma, 0.25);
        assert!(coupling_for_knot(3, 0, 1, 2).unwrap().forbidden);
        let g = coupling_for_knot(4, 2, 3, 5).unwrap().gamma;
        let nu = effective_order(&PhysicalChannel::new(4, 2, g, 1.0).unwrap()).unwrap();
        assert!((nu - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn dichotomy_examples() {
        assert_eq!(
            dimension_dichotomy(3, 0, 1),
            Dichotomy {
                allowed_free: true,
                big_m: Some(1)
            }
        );
        for m in 0..5 {
            for n in 1..4 {
                assert!(!dimension_dichotomy(2, m, n).allowed_free);
            }
        }
        assert_eq!(
            dimension_dichotomy(5, 1, 2),
            Dichotomy {
                allowed_free: true,
                big_m: Some(10)
            }
        );
    }

    #[test]
    fn quantized_order_list() {
        assert_eq!(quantized_orders(1, 0.0, 2.0), vec![0.5, 1.5]);
        assert_eq!(quantized_orders(2, 0.0, 1.0), vec![0.25, 0.5, 0.75]);
        assert!(quantized_orders(0, 0.0, 5.0).is_empty());
    }

    #[test]
    fn golden_section_finds_kink() {
        let (x, f) = golden_section(|x| Ok((x - 0.3).abs()), 0.2, 0.45, 1e-8).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && f < 1e-8);
    }

    proptest! {
        #[test]
        fn quantum_identity(n in 1u32..20, m in 1u32..200) {
            let q = KnotQuantum::new(n, m).unwrap();
            prop_assert!((q.nu - (q.ell + 0.5)).abs() <= 4.0 * f64::EPSILON * q.nu.max(1.0));
            prop_assert_eq!(q.allowed, q.nu.fract() != 0.0);
            prop_assert_eq!(q.allowed, is_bound_state(q.nu, n, BOUND_STATE_TOL));
        }

        #[test]
        fn zero_set_of_growing_coefficient(nu in 0.001f64..4.0, n in 1u32..4) {
            let two_n = 2 * n as i64;
            let x = nu * two_n as f64;
            let base = x.floor() as i64;
            let dist = (base - 2..=base + 3)
                .filter(|m| *m > 0 && m % two_n != 0)
                .map(|m| (nu - m as f64 / two_n as f64).abs())
                .fold(f64::INFINITY, f64::min);
            let a = growing_coefficient(nu, n).unwrap().norm();
            if dist > 0.05 {
                prop_assert!(a > 0.1, "nu={nu} N={n} |A|={a}");
            }
            if dist < 1e-9 {
                prop_assert!(a < 1e-7);
            }
        }
    }
}
