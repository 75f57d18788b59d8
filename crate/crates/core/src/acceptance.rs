//! Built-in verification suite, shared by `qknot verify` and the test
//! target. Each check returns a report instead of panicking so callers can
//! print one line per criterion.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

use crate::contour::{build_contour, ContourSpec};
use crate::error::Result;
use crate::hankel::{self, HankelKind, Order};
use crate::ode::{self, centrifugal, wronskian, Numerics, PropState};
use crate::riemann::SurfacePoint;
use crate::spectral::{self, ell_of, PhysicalChannel};
use crate::unroll;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// The worst observed figure of merit, with its threshold.
    pub metric: f64,
    pub threshold: f64,
    pub seconds: f64,
    pub detail: String,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {} {}: metric {:.3e} (limit {:.1e}), {:.2} s; {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.metric,
            self.threshold,
            self.seconds,
            self.detail
        )
    }
}

fn report(id: u32, name: &'static str, start: Instant, limit: Duration, outcome: Result<(f64, f64, String)>) -> CriterionReport {
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((metric, threshold, detail)) => {
            let in_time = seconds < limit.as_secs_f64();
            let detail = if in_time {
                detail
            } else {
                format!("{detail}; exceeded {} s budget", limit.as_secs())
            };
            CriterionReport {
                id,
                name,
                passed: metric <= threshold && in_time,
                metric,
                threshold,
                seconds,
                detail,
            }
        }
        Err(e) => CriterionReport {
            id,
            name,
            passed: false,
            metric: f64::INFINITY,
            threshold: f64::NAN,
            seconds,
            detail: format!("error: {e}"),
        },
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// |Δ| / max(1, |ref|)
fn mixed(a: Complex64, reference: Complex64) -> f64 {
    (a - reference).norm() / reference.norm().max(1.0)
}

pub const MONODROMY_ORDERS: [f64; 5] = [0.3, 0.5, 0.7, 1.0, 1.25];
pub const MONODROMY_STEPS: [i64; 3] = [1, 2, 4];
pub const MONODROMY_RADII: [f64; 2] = [3.0, 8.0];

/// Circuit formulas against numerical continuation. Both kinds start on the
/// positive real axis, where they are of equal size; H^(2) also starts at
/// −i|z|, where it is recessive. A dominant seed whose continuation ends
/// recessive is not used: the f64 rounding of the seed alone is amplified
/// by about e^{2|z|} there. Returns the worst relative gap.
pub fn monodromy_gap() -> Result<f64> {
    let mut worst: f64 = 0.0;
    let starts = [(0.0, HankelKind::Two), (0.0, HankelKind::One), (-PI / 2.0, HankelKind::Two)];
    for nu in MONODROMY_ORDERS {
        let order = Order::new(nu)?;
        for m in MONODROMY_STEPS {
            for r in MONODROMY_RADII {
                for (theta0, kind) in starts {
                    let z0 = Complex64::from_polar(r, theta0);
                    let p = SurfacePoint::new(r, theta0 + m as f64 * PI)?;
                    let formula = hankel::hankel_on_surface_pair(kind, &order, &p)?;
                    let numeric = hankel::continuation_oracle(kind, &order, z0, m as f64 * PI)?;
                    worst = worst
                        .max(rel(formula.value, numeric.value))
                        .max(rel(formula.deriv, numeric.deriv));
                }
            }
        }
    }
    Ok(worst)
}

fn criterion_1() -> CriterionReport {
    let start = Instant::now();
    let out = monodromy_gap().map(|g| (g, 1e-8, format!("{} orders x {} circuits x {} radii", 5, 3, 2)));
    report(
        1,
        "monodromy formula vs continuation oracle",
        start,
        Duration::from_secs(10),
        out,
    )
}

/// Scan and compare the refined minima with the expected set. Returns the
/// worst location error (infinite if a minimum is missing or spurious).
pub fn scan_check(n: u32, nu_min: f64, nu_max: f64, expected: &[f64], excluded: &[f64]) -> Result<(f64, String)> {
    let cspec = ContourSpec::for_kappa(n, 1.0)?;
    let minima = spectral::scan_sturmian(n, 1.0, nu_min, nu_max, 400, &cspec, &Numerics::default())?;
    let found: Vec<f64> = minima.iter().map(|m| m.nu).collect();
    let mut worst: f64 = 0.0;
    for e in expected {
        let d = found.iter().map(|f| (f - e).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    for f in &found {
        let d = expected.iter().map(|e| (f - e).abs()).fold(f64::INFINITY, f64::min);
        if d > 1e-3 {
            worst = f64::INFINITY;
        }
        if excluded.iter().any(|x| (f - x).abs() < 0.05) {
            worst = f64::INFINITY;
        }
    }
    Ok((worst, format!("N={n} minima {found:?}")))
}

fn criterion_2() -> CriterionReport {
    let start = Instant::now();
    let limit = Duration::from_secs(60);
    let out = (|| {
        let t = Instant::now();
        let (a, da) = scan_check(1, 0.05, 1.95, &[0.5, 1.5], &[1.0])?;
        let ta = t.elapsed();
        let t = Instant::now();
        let (b, db) = scan_check(2, 0.05, 0.95, &[0.25, 0.5, 0.75], &[])?;
        let tb = t.elapsed();
        let slow = ta >= limit || tb >= limit;
        let metric = if slow { f64::INFINITY } else { a.max(b) };
        Ok((
            metric,
            1e-6,
            format!("{da}; {db}; {:.1} s + {:.1} s", ta.as_secs_f64(), tb.as_secs_f64()),
        ))
    })();
    report(2, "quantization set from Sturmian scans", start, 2 * limit, out)
}

pub const EQUIVALENCE_ORDERS: [f64; 4] = [0.3, 0.5, 0.75, 1.5];

/// Worst mismatch between the shooting ratio c1/c2 and the circuit ratio
/// b/a (or the residual where b = 0).
pub fn shooting_equivalence_gap() -> Result<f64> {
    let num = Numerics::default();
    let mut worst: f64 = 0.0;
    for n in [1u32, 2] {
        let cspec = ContourSpec::for_kappa(n, 1.0)?;
        for nu in EQUIVALENCE_ORDERS {
            let r = spectral::shoot(nu, n, 1.0, &cspec, &num)?;
            let (a, b) = hankel::monodromy_coeffs(&Order::new(nu)?, 2 * n as i64);
            let gap = if b.norm() < 1e-12 {
                r.residual
            } else {
                mixed(r.ratio(), b / a)
            };
            worst = worst.max(gap);
        }
    }
    Ok(worst)
}

fn criterion_3() -> CriterionReport {
    let start = Instant::now();
    let out = shooting_equivalence_gap().map(|g| (g, 1e-6, "nu in {0.3, 0.5, 0.75, 1.5}, N in {1, 2}, kappa = 1".to_string()));
    report(3, "closed form vs shooting", start, Duration::from_secs(60), out)
}

/// Spread (max − min) of the shooting residual over the (ρ0, ε) grid.
pub fn homotopy_spread(nu: f64) -> Result<f64> {
    let num = Numerics::default();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for rho0 in [0.5, 1.0, 2.0] {
        for eps in [0.05, 0.1, 0.2] {
            let c = ContourSpec::new(1, rho0, eps, 30.0, crate::contour::DEFAULT_SAMPLES)?;
            let r = spectral::shoot(nu, 1, 1.0, &c, &num)?.residual;
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    Ok(hi - lo)
}

fn criterion_4() -> CriterionReport {
    let start = Instant::now();
    let out = (|| {
        let a = homotopy_spread(0.5)?;
        let b = homotopy_spread(0.3)?;
        Ok((a.max(b), 1e-6, format!("spread {a:.2e} at nu=0.5, {b:.2e} at nu=0.3")))
    })();
    report(4, "homotopy invariance", start, Duration::from_secs(60), out)
}

/// Worst κ-dependence of c1/c2 for N ≥ 1 and worst N = 0 residual.
pub fn energy_independence() -> Result<(f64, f64)> {
    let num = Numerics::default();
    let kappas = [0.5, 1.0, 2.0];
    let mut spread: f64 = 0.0;
    for n in [1u32, 2] {
        for nu in [0.3, 0.75, 1.25] {
            let ratios = kappas
                .iter()
                .map(|&k| Ok(spectral::shoot(nu, n, k, &ContourSpec::for_kappa(n, k)?, &num)?.ratio()))
                .collect::<Result<Vec<_>>>()?;
            for r in &ratios[1..] {
                spread = spread.max(mixed(*r, ratios[0]));
            }
        }
    }
    let mut flat: f64 = 0.0;
    for nu in [0.3, 0.5, 0.8, 1.0, 1.7] {
        for &k in &kappas {
            flat = flat.max(spectral::shoot(nu, 0, k, &ContourSpec::for_kappa(0, k)?, &num)?.residual);
        }
    }
    Ok((spread, flat))
}

fn criterion_5() -> CriterionReport {
    let start = Instant::now();
    let out = energy_independence().map(|(s, f)| (s.max(f), 1e-6, format!("c1/c2 spread {s:.2e}, N=0 residual {f:.2e}")));
    report(5, "energy independence", start, Duration::from_secs(60), out)
}

/// Number of dichotomy violations and the worst coupling round-trip error.
pub fn dichotomy_check(seed: u64) -> Result<(usize, f64)> {
    let mut violations = 0;
    for dim in 2..=7u32 {
        for m in 0..6 {
            for n in 1..6 {
                let d = spectral::dimension_dichotomy(dim, m, n);
                let ok = if dim % 2 == 1 {
                    d.allowed_free && d.big_m.is_some_and(|big| big % n as u64 == 0 && (big / n as u64) % 2 == 1)
                } else {
                    !d.allowed_free
                };
                if !ok {
                    violations += 1;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut tested = 0;
    while tested < 50 {
        let dim = rng.gen_range(1..=8u32);
        let m = if dim == 1 {
            rng.gen_range(0..=1)
        } else {
            rng.gen_range(0..=6)
        };
        let n = rng.gen_range(1..=6u32);
        let big_m = rng.gen_range(1..=40u32);
        if big_m % (2 * n) == 0 {
            continue;
        }
        let g = spectral::coupling_for_knot(dim, m, n, big_m)?;
        let nu = spectral::effective_order(&PhysicalChannel::new(dim, m, g.gamma, 1.0)?)?;
        worst = worst.max((nu - big_m as f64 / (2 * n) as f64).abs());
        tested += 1;
    }
    Ok((violations, worst))
}

fn criterion_6() -> CriterionReport {
    let start = Instant::now();
    let out = dichotomy_check(0x6b6e6f74).map(|(v, w)| {
        let metric = if v > 0 { f64::INFINITY } else { w };
        (metric, 1e-12, format!("{v} dichotomy violations, round-trip error {w:.2e}"))
    });
    report(
        6,
        "dimension dichotomy and coupling round trip",
        start,
        Duration::from_secs(10),
        out,
    )
}

/// Carry e^{∓ir} over C^(3) with ℓ = 0, E = 1. Returns the relative error
/// of e^{−ir} at the end and the worst relative Wronskian drift.
pub fn plane_wave_transport(num: &Numerics) -> Result<(f64, f64)> {
    let path = build_contour(&ContourSpec::for_kappa(3, 1.0)?)?;
    let i = Complex64::i();
    let r0 = path.first().to_complex();
    let down = PropState::from_values((-i * r0).exp(), -i * (-i * r0).exp())?;
    let up = PropState::from_values((i * r0).exp(), i * (i * r0).exp())?;
    let e = Complex64::new(1.0, 0.0);
    let a = ode::propagate_detailed(&path, 0.0, e, down, num)?;
    let b = ode::propagate_detailed(&path, 0.0, e, up, num)?;
    let r1 = path.last().to_complex();
    let err = rel(a.final_state().psi(), (-i * r1).exp());
    let w = |j: usize| {
        let (w, l) = wronskian(&a.states[j], &b.states[j]);
        w * l.exp()
    };
    let w0 = w(0);
    let drift = (0..path.len()).map(|j| (w(j) - w0).norm() / w0.norm()).fold(0.0, f64::max);
    Ok((err, drift))
}

fn criterion_7() -> CriterionReport {
    let start = Instant::now();
    let num = Numerics {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        ..Numerics::default()
    };
    let out = plane_wave_transport(&num).map(|(e, d)| {
        (
            e.max(d),
            1e-9,
            format!("end error {e:.2e}, Wronskian drift {d:.2e} (rel_tol 1e-12)"),
        )
    });
    report(7, "plane-wave transport over C^(3)", start, Duration::from_secs(30), out)
}

/// Worst map round-trip error, strip-equation residual, strip/radial gap and
/// coefficient-identity error.
pub fn unroll_check(seed: u64) -> Result<(f64, f64, f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round: f64 = 0.0;
    for _ in 0..1000 {
        let rho = 10f64.powf(rng.gen_range(-3.0..3.0));
        let theta = rng.gen_range(-30.0..30.0);
        let p = SurfacePoint::new(rho, theta)?;
        let back = unroll::map_from_strip(&unroll::map_to_strip(&p))?;
        round = round
            .max((back.rho() - rho).abs() / rho)
            .max((back.theta() - theta).abs() / theta.abs().max(1.0));
    }
    let arc = unroll::strip_oracle(0.7, 1.0, 1.5, 1.5 * PI - 1.0, 1.5 * PI + 1.0, 201, &Numerics::default())?;
    let mut ident: f64 = 0.0;
    for _ in 0..200 {
        let nu: f64 = rng.gen_range(0.0..10.0);
        ident = ident
            .max((centrifugal(ell_of(nu)) + 0.25 - nu * nu).abs() / (1.0 + nu * nu))
            .max((4.0 * unroll::strip_eigenvalue(nu) - nu * nu).abs() / (1.0 + nu * nu));
    }
    Ok((round, arc.max_residual, arc.max_equivalence_gap, ident))
}

fn criterion_8() -> CriterionReport {
    let start = Instant::now();
    let out = unroll_check(0x7374726970).map(|(round, res, gap, ident)| {
        let ok = round <= 1e-14 && res <= 1e-8 && gap <= 1e-8 && ident <= 1e-14;
        let metric = if ok { res.max(gap) } else { f64::INFINITY };
        (
            metric,
            1e-8,
            format!("round trip {round:.1e}, residual {res:.2e}, strip gap {gap:.2e}, identity {ident:.1e}"),
        )
    });
    report(8, "unrolling map and strip equation", start, Duration::from_secs(30), out)
}

/// Criteria 1 to 8. The CLI determinism criterion needs the binary and is
/// checked by the test harness.
pub fn run_library_criteria() -> Vec<CriterionReport> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

pub fn run_criterion(id: u32) -> Option<CriterionReport> {
    Some(match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        _ => return None,
    })
}
