//! The map r = −i·e^{ix/2}, which lays the sheets of the r-surface side by
//! side as width-4π strips of the x-plane (u = Re x, v = Im x), and the
//! transformed equation
//!
//!   φ'' = −((κ²/4)·e^{ix} + ν²/4)·φ,   ψ = √(dr/dx)·φ.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::contour::Segment;
use crate::error::{Error, Result};
use crate::hankel::{HankelKind, Order};
use crate::ode::dopri::{self, Controller, Y};
use crate::ode::{self, centrifugal, Numerics, PropState};
use crate::riemann::SurfacePoint;
use crate::spectral::ell_of;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripPoint {
    pub u: f64,
    pub v: f64,
}

impl StripPoint {
    pub fn x(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

pub fn map_to_strip(p: &SurfacePoint) -> StripPoint {
    StripPoint {
        u: 2.0 * p.theta() + PI,
        v: -2.0 * p.rho().ln(),
    }
}

pub fn map_from_strip(q: &StripPoint) -> Result<SurfacePoint> {
    SurfacePoint::new((-0.5 * q.v).exp(), 0.5 * (q.u - PI))
}

/// ν²/4, assembled from the same centrifugal term the radial ODE uses.
pub fn strip_eigenvalue(nu: f64) -> f64 {
    (centrifugal(ell_of(nu)) + 0.25) / 4.0
}

/// (κ²/4)·e^{ix}
pub fn strip_potential(kappa: f64, x: Complex64) -> Complex64 {
    (Complex64::i() * x).exp() * (kappa * kappa / 4.0)
}

/// −φ'' − (κ²/4)e^{ix}φ − (ν²/4)φ
pub fn strip_equation_residual(nu: f64, kappa: f64, x: Complex64, phi: Complex64, phi2: Complex64) -> Complex64 {
    -phi2 - strip_potential(kappa, x) * phi - phi * strip_eigenvalue(nu)
}

/// A solution sample expressed in strip variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripSample {
    pub x: Complex64,
    pub phi: Complex64,
    pub dphi: Complex64,
}

/// φ = ψ/g and φ_x = (r'ψ_r − (i/4)ψ)/g with g = √(dr/dx) = e^{ix/4}/√2.
pub fn liouville(p: &SurfacePoint, psi: Complex64, dpsi: Complex64) -> StripSample {
    let x = map_to_strip(p).x();
    let i = Complex64::i();
    let g = (i * x / 4.0).exp() / 2f64.sqrt();
    let dr = (i * x / 2.0).exp() * 0.5;
    StripSample {
        x,
        phi: psi / g,
        dphi: (dr * dpsi - i * 0.25 * psi) / g,
    }
}

/// Integrate the strip equation along a horizontal line from `start` to
/// real part `u_end`.
pub fn integrate_strip(nu: f64, kappa: f64, start: StripSample, u_end: f64, num: &Numerics) -> Result<StripSample> {
    num.validate()?;
    let v = start.x.im;
    let lam = strip_eigenvalue(nu);
    let f = |u: f64, y: &Y| -> Y {
        let x = Complex64::new(u, v);
        [y[1], -(strip_potential(kappa, x) + lam) * y[0]]
    };
    let mut y = [start.phi, start.dphi];
    let mut ctl = Controller::new(num.rel_tol, num.abs_tol, num.max_steps);
    dopri::integrate(f, start.x.re, u_end, &mut y, &mut ctl, |_| 1.0)
        .map_err(|_| Error::InvalidArgument(format!("strip integration failed before u = {u_end}")))?;
    Ok(StripSample {
        x: Complex64::new(u_end, v),
        phi: y[0],
        dphi: y[1],
    })
}

/// Eighth-order central first-derivative weights for offsets 1..4.
const FD8: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripCheck {
    /// Largest residual relative to the size of its three terms.
    pub max_residual: f64,
    /// Largest |φ_strip − φ_radial| relative to max |φ|.
    pub max_equivalence_gap: f64,
    pub samples: usize,
}

/// Propagate √r·H^(2)_ν(κr) in r along an arc of radius ρ, transform to the
/// strip, and check the strip equation two ways: by differencing φ_x along
/// u, and by integrating the strip equation itself from the first sample.
pub fn strip_oracle(
    nu: f64,
    kappa: f64,
    rho: f64,
    theta_from: f64,
    theta_to: f64,
    samples: usize,
    num: &Numerics,
) -> Result<StripCheck> {
    if samples < 9 || !(theta_to > theta_from) {
        return Err(Error::InvalidArgument("need at least 9 samples on an increasing arc".into()));
    }
    let order = Order::new(nu)?;
    let step = (theta_to - theta_from) / (samples - 1) as f64;
    let points = (0..samples)
        .map(|j| SurfacePoint::new(rho, theta_from + step * j as f64))
        .collect::<Result<Vec<_>>>()?;
    let segments = vec![Segment::Loop; samples];
    let seed = ode::seed_on_surface(HankelKind::Two, &order, &points[0], kappa)?;
    let ell = ell_of(order.effective_nu());
    let prop = ode::propagate_samples(&points, &segments, ell, Complex64::new(kappa * kappa, 0.0), seed, num)?;

    // a common scale keeps φ finite without changing the linear relations
    let l0 = prop.states.iter().map(|s| s.logscale).fold(f64::MIN, f64::max);
    let strip: Vec<StripSample> = points
        .iter()
        .zip(&prop.states)
        .map(|(p, s): (&SurfacePoint, &PropState)| {
            let k = (s.logscale - l0).exp();
            liouville(p, s.u * k, s.du * k)
        })
        .collect();

    let h = 2.0 * step;
    let nu_eff = order.effective_nu();
    let mut max_residual: f64 = 0.0;
    for j in 4..samples - 4 {
        let d2 = FD8
            .iter()
            .enumerate()
            .map(|(k, c)| (strip[j + k + 1].dphi - strip[j - k - 1].dphi) * *c)
            .sum::<Complex64>()
            / h;
        let s = strip[j];
        let res = strip_equation_residual(nu_eff, kappa, s.x, s.phi, d2);
        let size = d2.norm() + (strip_potential(kappa, s.x) * s.phi).norm() + (s.phi * strip_eigenvalue(nu_eff)).norm();
        max_residual = max_residual.max(res.norm() / size);
    }

    let scale = strip.iter().map(|s| s.phi.norm()).fold(0.0, f64::max);
    let mut gap: f64 = 0.0;
    let mut cur = strip[0];
    for s in &strip[1..] {
        cur = integrate_strip(nu_eff, kappa, cur, s.x.re, num)?;
        gap = gap.max((cur.phi - s.phi).norm() / scale);
    }
    Ok(StripCheck {
        max_residual,
        max_equivalence_gap: gap,
        samples,
    })
}
