//! Dormand–Prince 5(4) with PI step-size control for a two-component complex
//! linear system in a real parameter.

use num_complex::Complex64;

pub(crate) type Y = [Complex64; 2];

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFE: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StepFailure {
    Underflow(f64),
    MaxSteps(f64),
}

#[derive(Debug, Clone)]
pub(crate) struct Controller {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    pub accepted: usize,
    pub rejected: usize,
    /// Step magnitude carried from one call to the next; 0 means unset.
    pub h: f64,
    facold: f64,
}

impl Controller {
    pub fn new(rel_tol: f64, abs_tol: f64, max_steps: usize) -> Self {
        Controller {
            rel_tol,
            abs_tol,
            max_steps,
            accepted: 0,
            rejected: 0,
            h: 0.0,
            facold: 1e-4,
        }
    }
}

#[inline]
fn axpy(y: &Y, h: f64, terms: &[(f64, &Y)]) -> Y {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (h * c);
        out[1] += k[1] * (h * c);
    }
    out
}

/// Integrate y from s0 to s1. `renorm` may rescale y after each accepted
/// step and returns the factor it applied, which is also applied to the
/// cached derivative (the system is linear).
pub(crate) fn integrate<F, R>(f: F, s0: f64, s1: f64, y: &mut Y, ctl: &mut Controller, mut renorm: R) -> Result<(), StepFailure>
where
    F: Fn(f64, &Y) -> Y,
    R: FnMut(&mut Y) -> f64,
{
    let span = s1 - s0;
    if span == 0.0 {
        return Ok(());
    }
    let dir = span.signum();
    if ctl.h <= 0.0 {
        ctl.h = 1e-3 * span.abs();
    }
    let mut s = s0;
    let mut k1 = f(s, y);
    let mut last_rejected = false;
    loop {
        let remaining = (s1 - s) * dir;
        if remaining <= 0.0 {
            return Ok(());
        }
        if ctl.accepted + ctl.rejected >= ctl.max_steps {
            return Err(StepFailure::MaxSteps(s));
        }
        let hmag = ctl.h.min(remaining);
        let last = hmag >= remaining;
        if hmag < 1e-14 * s.abs().max(1.0) && !last {
            return Err(StepFailure::Underflow(s));
        }
        let h = hmag * dir;

        let k2 = f(s + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = f(s + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(s + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(s + C5 * h, &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let s_end = if last { s1 } else { s + h };
        let k6 = f(
            s_end,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let ynew = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(s_end, &ynew);

        let mut err = 0.0;
        for i in 0..2 {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sk = ctl.abs_tol + ctl.rel_tol * y[i].norm().max(ynew[i].norm());
            err += (e.norm() / sk).powi(2);
        }
        let err = (err / 2.0).sqrt();
        if !err.is_finite() {
            ctl.rejected += 1;
            ctl.h = hmag * FAC_MIN;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(EXPO);
        let fac = (fac11 / ctl.facold.powf(BETA) / SAFE).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut hnew = hmag / fac;
        if err <= 1.0 {
            ctl.facold = err.max(1e-4);
            ctl.accepted += 1;
            *y = ynew;
            k1 = k7;
            s = s_end;
            let factor = renorm(y);
            if factor != 1.0 {
                k1[0] *= factor;
                k1[1] *= factor;
            }
            if last_rejected {
                hnew = hnew.min(hmag);
            }
            last_rejected = false;
            // a step shortened to land on s1 should not shrink the next one
            ctl.h = if last { ctl.h.max(hnew) } else { hnew };
        } else {
            ctl.rejected += 1;
            ctl.h = hmag / (fac11 / SAFE).min(1.0 / FAC_MIN);
            last_rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_both_directions() {
        // y'' = −y with y = (cos, −sin)
        let f = |_s: f64, y: &Y| [y[1], -y[0]];
        for (a, b) in [(0.0f64, 10.0f64), (10.0, 0.0)] {
            let mut y = [Complex64::new(a.cos(), 0.0), Complex64::new(-a.sin(), 0.0)];
            let mut ctl = Controller::new(1e-12, 1e-14, 100_000);
            integrate(f, a, b, &mut y, &mut ctl, |_| 1.0).unwrap();
            assert!((y[0].re - b.cos()).abs() < 1e-10, "{a}->{b}: {}", y[0]);
            assert!((y[1].re + b.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn max_steps_is_reported() {
        let f = |_s: f64, y: &Y| [y[1], -y[0]];
        let mut y = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let mut ctl = Controller::new(1e-12, 1e-14, 5);
        assert!(matches!(
            integrate(f, 0.0, 100.0, &mut y, &mut ctl, |_| 1.0),
            Err(StepFailure::MaxSteps(_))
        ));
    }
}
