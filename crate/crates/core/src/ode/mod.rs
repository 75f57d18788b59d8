//! Transport of the radial equation ψ'' = (ℓ(ℓ+1)/r² − E)ψ along a contour,
//! asymptotic seeding, and extraction of Hankel coefficients.

pub(crate) mod dopri;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::{ContourPath, Segment};
use crate::error::{Error, PathLocation, Result};
use crate::hankel::{self, HankelKind, Order};
use crate::riemann::SurfacePoint;
use dopri::{Controller, StepFailure, Y};

/// ℓ(ℓ+1). Every place that needs the centrifugal strength goes through here.
pub fn centrifugal(ell: f64) -> f64 {
    ell * (ell + 1.0)
}

/// ψ'' for the free radial equation at r.
pub fn rhs(r: Complex64, psi: Complex64, ell: f64, energy: Complex64) -> Result<Complex64> {
    if r == Complex64::new(0.0, 0.0) {
        return Err(Error::BranchPoint);
    }
    Ok((centrifugal(ell) / (r * r) - energy) * psi)
}

/// (ψ, dψ/dr) stored as e^{logscale}·(u, du).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropState {
    pub u: Complex64,
    pub du: Complex64,
    pub logscale: f64,
}

impl PropState {
    /// Pack true values, normalizing so that max(|u|, |du|) = 1.
    pub fn from_values(psi: Complex64, dpsi: Complex64) -> Result<Self> {
        Self::from_scaled(psi, dpsi, 0.0)
    }

    pub fn from_scaled(u: Complex64, du: Complex64, logscale: f64) -> Result<Self> {
        if !(u.is_finite() && du.is_finite() && logscale.is_finite()) {
            return Err(Error::Overflow(logscale));
        }
        let m = u.norm().max(du.norm());
        if m == 0.0 {
            return Ok(PropState { u, du, logscale });
        }
        let c = m.ln();
        let k = (-c).exp();
        Ok(PropState {
            u: u * k,
            du: du * k,
            logscale: logscale + c,
        })
    }

    pub fn psi(&self) -> Complex64 {
        self.u * self.logscale.exp()
    }

    pub fn dpsi(&self) -> Complex64 {
        self.du * self.logscale.exp()
    }

    /// log|ψ| without forming e^{logscale}.
    pub fn log_abs_psi(&self) -> f64 {
        self.u.norm().ln() + self.logscale
    }

    /// α·self + β·other in true values.
    pub fn combine(&self, alpha: Complex64, other: &PropState, beta: Complex64) -> Result<PropState> {
        let l = self.logscale.max(other.logscale);
        let a = alpha * (self.logscale - l).exp();
        let b = beta * (other.logscale - l).exp();
        Self::from_scaled(a * self.u + b * other.u, a * self.du + b * other.du, l)
    }
}

/// Wronskian ψ1·ψ2' − ψ1'·ψ2 as (scaled value, log scale).
pub fn wronskian(a: &PropState, b: &PropState) -> (Complex64, f64) {
    (a.u * b.du - a.du * b.u, a.logscale + b.logscale)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Numerics {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Renormalize when max(|u|, |du|) leaves [renorm_low, renorm_high].
    pub renorm_low: f64,
    pub renorm_high: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 1_000_000,
            renorm_low: 1e-2,
            renorm_high: 1e2,
        }
    }
}

impl Numerics {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidArgument("max_steps must be positive".into()));
        }
        if !(self.renorm_low > 0.0 && self.renorm_low < 1.0 && self.renorm_high > 1.0 && self.renorm_high.is_finite()) {
            return Err(Error::InvalidArgument("renormalization window must bracket 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Propagation {
    /// State at every sample of the path, starting with the seed.
    pub states: Vec<PropState>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl Propagation {
    pub fn final_state(&self) -> PropState {
        self.states[self.states.len() - 1]
    }
}

pub fn propagate(path: &ContourPath, ell: f64, energy: Complex64, s0: PropState, num: &Numerics) -> Result<PropState> {
    Ok(propagate_detailed(path, ell, energy, s0, num)?.final_state())
}

/// Integrate along every piece of the path, recording the state at each
/// sample. Rays are parametrized by ρ, the loop by the phase.
pub fn propagate_detailed(path: &ContourPath, ell: f64, energy: Complex64, s0: PropState, num: &Numerics) -> Result<Propagation> {
    propagate_samples(&path.points, &path.segments, ell, energy, s0, num)
}

/// As [`propagate_detailed`] over an explicit list of samples. Consecutive
/// samples must lie on the ray or arc named by the label of the later one.
pub fn propagate_samples(
    points: &[SurfacePoint],
    segments: &[Segment],
    ell: f64,
    energy: Complex64,
    s0: PropState,
    num: &Numerics,
) -> Result<Propagation> {
    num.validate()?;
    if points.len() < 2 || points.len() != segments.len() {
        return Err(Error::MalformedPath("need at least two samples, one label each".into()));
    }
    let c = centrifugal(ell);
    let mut ctl = Controller::new(num.rel_tol, num.abs_tol, num.max_steps);
    let mut y: Y = [s0.u, s0.du];
    let mut logscale = s0.logscale;
    let mut states = Vec::with_capacity(points.len());
    states.push(s0);
    // step magnitude in arclength, shared across pieces of different parametrization
    let mut h_len = 0.0;

    for i in 1..points.len() {
        let (p0, p1) = (&points[i - 1], &points[i]);
        let seg = segments[i];
        let on_piece = match seg {
            Segment::Loop => p0.rho() == p1.rho(),
            _ => p0.theta() == p1.theta(),
        };
        if !on_piece {
            return Err(Error::MalformedPath(format!(
                "samples {} and {i} are not joined by a {}",
                i - 1,
                seg.label()
            )));
        }
        let (s_from, s_to, speed) = match seg {
            Segment::Loop => (p0.theta(), p1.theta(), p1.rho()),
            _ => (p0.rho(), p1.rho(), 1.0),
        };
        if s_from != s_to {
            let theta = p1.theta();
            let rho0 = p1.rho();
            let f = |s: f64, y: &Y| -> Y {
                let (r, dr) = match seg {
                    Segment::Loop => {
                        let r = Complex64::from_polar(rho0, s);
                        (r, Complex64::i() * r)
                    }
                    _ => {
                        let e = Complex64::from_polar(1.0, theta);
                        (e * s, e)
                    }
                };
                [dr * y[1], dr * (c / (r * r) - energy) * y[0]]
            };
            ctl.h = h_len / speed;
            let ls = &mut logscale;
            let renorm = |y: &mut Y| -> f64 {
                let m = y[0].norm().max(y[1].norm());
                if m >= num.renorm_low && m <= num.renorm_high {
                    return 1.0;
                }
                let k = 1.0 / m;
                y[0] *= k;
                y[1] *= k;
                *ls += m.ln();
                k
            };
            dopri::integrate(f, s_from, s_to, &mut y, &mut ctl, renorm).map_err(|e| {
                let (s, under) = match e {
                    StepFailure::Underflow(s) => (s, true),
                    StepFailure::MaxSteps(s) => (s, false),
                };
                let r = match seg {
                    Segment::Loop => Complex64::from_polar(rho0, s),
                    _ => Complex64::from_polar(s, theta),
                };
                let location = PathLocation {
                    segment: seg.label(),
                    parameter: s,
                    re: r.re,
                    im: r.im,
                };
                if under {
                    Error::StepUnderflow(location)
                } else {
                    Error::MaxStepsExceeded {
                        max_steps: num.max_steps,
                        location,
                    }
                }
            })?;
            h_len = ctl.h * speed;
        }
        if !(y[0].is_finite() && y[1].is_finite()) {
            return Err(Error::Overflow(logscale));
        }
        states.push(PropState {
            u: y[0],
            du: y[1],
            logscale,
        });
    }
    Ok(Propagation {
        states,
        accepted_steps: ctl.accepted,
        rejected_steps: ctl.rejected,
    })
}

/// √r·H_ν(κr) and its r-derivative at a surface point, from the asymptotic
/// expansion on the sheet of `p`.
pub fn seed_asymptotic(kind: HankelKind, order: &Order, p: &SurfacePoint, kappa: f64, n_terms: usize) -> Result<PropState> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let zp = p.scaled(kappa)?;
    let h = hankel::hankel_on_surface_asymptotic_pair(kind, order, &zp, n_terms)?;
    let sr = p.sqrt();
    let psi = sr * h.value;
    let dpsi = h.value / (2.0 * sr) + sr * kappa * h.deriv;
    PropState::from_values(psi, dpsi)
}

/// √r·H_ν(κr) and its r-derivative on the sheet of `p`, any κρ.
pub fn seed_on_surface(kind: HankelKind, order: &Order, p: &SurfacePoint, kappa: f64) -> Result<PropState> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let h = hankel::hankel_on_surface_pair(kind, order, &p.scaled(kappa)?)?;
    let sr = p.sqrt();
    PropState::from_values(sr * h.value, h.value / (2.0 * sr) + sr * kappa * h.deriv)
}

/// Local Hankel basis at p: √r·H_j(κ r e^{−2πik}) with k the nearest whole
/// turn, so each basis member has its textbook asymptotics in the sector of p.
/// Returns [(B1, B1'), (B2, B2')].
pub fn local_basis(p: &SurfacePoint, order: &Order, kappa: f64) -> Result<[(Complex64, Complex64); 2]> {
    let turns = (p.theta() / (2.0 * std::f64::consts::PI)).round();
    let theta0 = p.theta() - 2.0 * std::f64::consts::PI * turns;
    let z0 = Complex64::from_polar(kappa * p.rho(), theta0);
    let sr = p.sqrt();
    let mut out = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 2];
    for (slot, kind) in out.iter_mut().zip([HankelKind::One, HankelKind::Two]) {
        let h = hankel::hankel_principal_pair(kind, order, z0)?;
        *slot = (sr * h.value, h.value / (2.0 * sr) + sr * kappa * h.deriv);
    }
    Ok(out)
}

/// Wronskian of the local basis in r; equals −4i/π for every p and κ.
pub const BASIS_WRONSKIAN: Complex64 = Complex64::new(0.0, -4.0 / std::f64::consts::PI);

/// Solve ψ = c1·B1 + c2·B2 together with the derivative row. The
/// coefficients are returned as (c1, c2, logscale): true values are
/// e^{logscale}·c.
pub fn fit_coefficients_scaled(
    state: &PropState,
    p: &SurfacePoint,
    order: &Order,
    kappa: f64,
) -> Result<(Complex64, Complex64, f64)> {
    let [(b1, d1), (b2, d2)] = local_basis(p, order, kappa)?;
    let det = b1 * d2 - b2 * d1;
    if det.norm() < 1e-8 * BASIS_WRONSKIAN.norm() || !det.is_finite() {
        return Err(Error::NearSingularFit {
            det: det.norm(),
            expected: BASIS_WRONSKIAN.norm(),
        });
    }
    let c1 = (state.u * d2 - state.du * b2) / det;
    let c2 = (b1 * state.du - d1 * state.u) / det;
    Ok((c1, c2, state.logscale))
}

pub fn fit_coefficients(state: &PropState, p: &SurfacePoint, order: &Order, kappa: f64) -> Result<(Complex64, Complex64)> {
    let (c1, c2, l) = fit_coefficients_scaled(state, p, order, kappa)?;
    let k = l.exp();
    if !k.is_finite() {
        return Err(Error::Overflow(l));
    }
    Ok((c1 * k, c2 * k))
}
