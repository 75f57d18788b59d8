//! Spiral contours C^(N): an incoming ray in S_0, a circle of radius ρ0
//! turning counterclockwise, and an outgoing ray in S_{2N}.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::riemann::SurfacePoint;

pub const DEFAULT_RHO0: f64 = 1.0;
pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_SAMPLES: usize = 400;
/// R_max defaults to this over κ.
pub const DEFAULT_KAPPA_R_MAX: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Segment {
    IncomingRay,
    Loop,
    OutgoingRay,
}

impl Segment {
    pub fn label(self) -> &'static str {
        match self {
            Segment::IncomingRay => "incoming-ray",
            Segment::Loop => "loop",
            Segment::OutgoingRay => "outgoing-ray",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourSpec {
    #[serde(rename = "N")]
    pub n: u32,
    pub rho0: f64,
    pub eps: f64,
    pub r_max: f64,
    pub n_samples: usize,
}

impl ContourSpec {
    pub fn new(n: u32, rho0: f64, eps: f64, r_max: f64, n_samples: usize) -> Result<Self> {
        let spec = ContourSpec {
            n,
            rho0,
            eps,
            r_max,
            n_samples,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Default geometry for momentum κ: ρ0 = 1, ε = 0.1, κ·R_max = 30.
    pub fn for_kappa(n: u32, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        Self::new(n, DEFAULT_RHO0, DEFAULT_EPS, DEFAULT_KAPPA_R_MAX / kappa, DEFAULT_SAMPLES)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if !(self.rho0 > 0.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must be positive, got {}", self.rho0));
        }
        if !(self.r_max > self.rho0 && self.r_max.is_finite()) {
            return bad(format!("r_max ({}) must exceed rho0 ({})", self.r_max, self.rho0));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad(format!("eps must lie in (0, 1), got {}", self.eps));
        }
        if self.n_samples < 4 {
            return bad(format!("n_samples must be at least 4, got {}", self.n_samples));
        }
        Ok(())
    }

    /// Phase of the incoming ray, −π + arctan ε.
    pub fn theta_left(&self) -> f64 {
        -PI + self.eps.atan()
    }

    /// Phase of the outgoing ray, 2πN − arctan ε.
    pub fn theta_right(&self) -> f64 {
        2.0 * PI * self.n as f64 - self.eps.atan()
    }

    pub fn arc_turn(&self) -> f64 {
        self.theta_right() - self.theta_left()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourPath {
    pub spec: ContourSpec,
    pub points: Vec<SurfacePoint>,
    /// dr/dt with t the arclength, at each sample.
    pub tangents: Vec<Complex64>,
    pub segments: Vec<Segment>,
    pub t: Vec<f64>,
}

impl ContourPath {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &SurfacePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &SurfacePoint {
        &self.points[self.points.len() - 1]
    }
}

/// Split `total` intervals over weights, at least one each.
fn allocate(total: usize, weights: [f64; 3]) -> [usize; 3] {
    let sum: f64 = weights.iter().sum();
    let spare = total - 3;
    let mut out = [1usize; 3];
    let mut used = 0;
    for k in 0..3 {
        let share = ((weights[k] / sum) * spare as f64).floor() as usize;
        out[k] += share;
        used += share;
    }
    out[1] += spare - used;
    out
}

pub fn build_contour(spec: &ContourSpec) -> Result<ContourPath> {
    spec.validate()?;
    let (tl, tr) = (spec.theta_left(), spec.theta_right());
    let log_len = (spec.r_max / spec.rho0).ln();
    let [n_in, n_arc, n_out] = allocate(spec.n_samples - 1, [log_len, spec.arc_turn(), log_len]);
    let ray_len = spec.r_max - spec.rho0;
    let arc_len = spec.rho0 * spec.arc_turn();

    let mut path = ContourPath {
        spec: *spec,
        points: Vec::with_capacity(spec.n_samples),
        tangents: Vec::with_capacity(spec.n_samples),
        segments: Vec::with_capacity(spec.n_samples),
        t: Vec::with_capacity(spec.n_samples),
    };
    let mut push = |p: SurfacePoint, tan: Complex64, seg: Segment, t: f64| {
        path.points.push(p);
        path.tangents.push(tan);
        path.segments.push(seg);
        path.t.push(t);
    };
    let log_rho = |frac: f64, from: f64, to: f64| -> f64 {
        if frac == 0.0 {
            from
        } else if frac == 1.0 {
            to
        } else {
            from * (to / from).powf(frac)
        }
    };

    let dir_in = -Complex64::from_polar(1.0, tl);
    for j in 0..=n_in {
        let rho = log_rho(j as f64 / n_in as f64, spec.r_max, spec.rho0);
        push(SurfacePoint::new(rho, tl)?, dir_in, Segment::IncomingRay, spec.r_max - rho);
    }
    for j in 1..=n_arc {
        let th = if j == n_arc {
            tr
        } else {
            tl + spec.arc_turn() * j as f64 / n_arc as f64
        };
        push(
            SurfacePoint::new(spec.rho0, th)?,
            Complex64::from_polar(1.0, th) * Complex64::i(),
            Segment::Loop,
            ray_len + spec.rho0 * (th - tl),
        );
    }
    let dir_out = Complex64::from_polar(1.0, tr);
    for j in 1..=n_out {
        let rho = log_rho(j as f64 / n_out as f64, spec.rho0, spec.r_max);
        push(
            SurfacePoint::new(rho, tr)?,
            dir_out,
            Segment::OutgoingRay,
            ray_len + arc_len + rho - spec.rho0,
        );
    }
    Ok(path)
}

/// Number of full turns, recovered from the endpoint phases; must equal N.
pub fn winding_number(path: &ContourPath) -> Result<i64> {
    if path.points.len() < 2 {
        return Err(Error::MalformedPath("fewer than two samples".into()));
    }
    let eps = path.spec.eps;
    let x = (path.last().theta() - path.first().theta() - PI + 2.0 * eps.atan()) / (2.0 * PI);
    let k = x.round();
    if (x - k).abs() > 1e-9 {
        return Err(Error::MalformedPath(format!("non-integer winding {x}")));
    }
    if k as i64 != path.spec.n as i64 {
        return Err(Error::MalformedPath(format!("winding {k} differs from N = {}", path.spec.n)));
    }
    if path.points.windows(2).any(|w| w[1].theta() < w[0].theta()) {
        return Err(Error::MalformedPath("phase decreases along the path".into()));
    }
    Ok(k as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourRecord {
    pub t: f64,
    pub rho: f64,
    pub theta: f64,
    pub re: f64,
    pub im: f64,
    pub sector: Option<i64>,
    pub segment: &'static str,
}

pub fn export_contour(path: &ContourPath) -> Vec<ContourRecord> {
    path.points
        .iter()
        .zip(&path.segments)
        .zip(&path.t)
        .map(|((p, s), &t)| {
            let z = p.to_complex();
            ContourRecord {
                t,
                rho: p.rho(),
                theta: p.theta(),
                re: z.re,
                im: z.im,
                sector: p.sector().ok(),
                segment: s.label(),
            }
        })
        .collect()
}

/// CSV with header `t,rho,theta,re,im,sector,segment`; boundary samples
/// leave the sector field empty.
pub fn write_contour_csv<W: Write>(path: &ContourPath, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for rec in export_contour(path) {
        w.serialize(&rec).map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    }
    w.flush().map_err(|e| Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(n: u32) -> ContourSpec {
        ContourSpec::new(n, 1.0, 0.1, 30.0, 200).unwrap()
    }

    #[test]
    fn sectors_at_the_ends() {
        let p = build_contour(&spec(1)).unwrap();
        assert_eq!(p.first().sector().unwrap(), 0);
        assert_eq!(p.last().sector().unwrap(), 2);
        assert_eq!(p.len(), 200);
    }

    #[test]
    fn arc_turn_one_knot() {
        let s = spec(1);
        assert!((s.arc_turn() - (3.0 * PI - 2.0 * 0.1f64.atan())).abs() < 1e-15);
    }

    #[test]
    fn flat_contour_stays_in_sector_zero() {
        let p = build_contour(&spec(0)).unwrap();
        assert!(p.points.iter().all(|q| q.sector().unwrap() == 0));
        assert_eq!(winding_number(&p).unwrap(), 0);
    }

    #[test]
    fn windings() {
        for n in [0, 1, 3] {
            assert_eq!(winding_number(&build_contour(&spec(n)).unwrap()).unwrap(), n as i64);
        }
    }

    #[test]
    fn two_turns_in_theta_range() {
        let p = build_contour(&spec(2)).unwrap();
        let span = p.last().theta() - p.first().theta();
        assert!(span > 4.0 * PI && span < 5.0 * PI);
    }

    #[test]
    fn csv_round_trip() {
        let p = build_contour(&spec(1)).unwrap();
        let mut buf = Vec::new();
        write_contour_csv(&p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,rho,theta,re,im,sector,segment\n"));
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for (row, pt) in rdr.records().zip(&p.points) {
            let row = row.unwrap();
            let re: f64 = row[3].parse().unwrap();
            let im: f64 = row[4].parse().unwrap();
            let (x, y) = crate::riemann::to_complex(pt);
            assert_eq!((re, im), (x, y));
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ContourSpec::new(1, 0.0, 0.1, 30.0, 100).is_err());
        assert!(ContourSpec::new(1, 2.0, 0.1, 1.0, 100).is_err());
        assert!(ContourSpec::new(1, 1.0, 1.5, 30.0, 100).is_err());
    }

    proptest! {
        #[test]
        fn path_invariants(n in 0u32..5, rho0 in 0.1f64..3.0, eps in 0.01f64..0.9, extra in 1.0f64..50.0, samples in 4usize..600) {
            let s = ContourSpec::new(n, rho0, eps, rho0 + extra, samples).unwrap();
            let p = build_contour(&s).unwrap();
            prop_assert_eq!(p.len(), samples);
            prop_assert!(p.points.windows(2).all(|w| w[1].theta() >= w[0].theta()));
            prop_assert!(p.t.windows(2).all(|w| w[1] >= w[0]));
            prop_assert!(p.points.iter().all(|q| q.rho() >= rho0));
            prop_assert_eq!(p.first().theta(), s.theta_left());
            prop_assert_eq!(p.last().theta(), s.theta_right());
            prop_assert_eq!(winding_number(&p).unwrap(), n as i64);
        }
    }
}
