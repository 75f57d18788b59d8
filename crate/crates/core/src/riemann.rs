//! Points on the logarithmic Riemann surface of the radial wavefunction and
//! the asymptotic sectors in which one Hankel kind decays.
//!
//! A point is stored as a modulus and an *unwrapped* phase. Two points with
//! the same modulus whose phases differ by 2π project to the same complex
//! number but live on different sheets.

use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::hankel::HankelKind;

/// Tolerance (in units of π) used to detect the anti-Stokes lines θ = kπ.
pub const SECTOR_BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    rho: f64,
    theta: f64,
}

impl SurfacePoint {
    pub fn new(rho: f64, theta: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "surface point modulus must be positive and finite, got {rho}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::InvalidArgument(format!("phase must be finite, got {theta}")));
        }
        Ok(Self { rho, theta })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Canonical complex projection ρ·e^{iθ}.
    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.theta)
    }

    /// Index k of the open sector S_k = {θ ∈ (kπ − π, kπ)}.
    pub fn sector(&self) -> Result<i64> {
        sector_of(self)
    }

    /// The same modulus with the phase advanced by `dtheta`.
    pub fn rotated(&self, dtheta: f64) -> Self {
        Self {
            rho: self.rho,
            theta: self.theta + dtheta,
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.rho * factor, self.theta)
    }

    /// Square root with the branch fixed by the unwrapped phase.
    pub fn sqrt(&self) -> Complex64 {
        Complex64::from_polar(self.rho.sqrt(), 0.5 * self.theta)
    }
}

/// (Re, Im) of the projection; sheets are forgotten.
pub fn to_complex(p: &SurfacePoint) -> (f64, f64) {
    let z = p.to_complex();
    (z.re, z.im)
}

pub fn sector_of(p: &SurfacePoint) -> Result<i64> {
    let x = p.theta / PI;
    let nearest = x.round();
    if (x - nearest).abs() < SECTOR_BOUNDARY_TOL {
        return Err(Error::SectorBoundary {
            theta: p.theta,
            k: nearest as i64,
        });
    }
    Ok(x.floor() as i64 + 1)
}

/// Hankel kind that decays at large |r| inside sector S_k.
pub fn decaying_kind_in_sector(k: i64) -> HankelKind {
    if k.rem_euclid(2) == 0 {
        HankelKind::Two
    } else {
        HankelKind::One
    }
}
