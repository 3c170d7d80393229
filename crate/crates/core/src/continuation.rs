//! Analytic continuation of `sqrt(x'(z)^2 + y'(z)^2)` along polylines.
//!
//! The square root is carried by continuity: each step picks the determination
//! nearest the previous value and halves the step until the argument change is
//! below `pi/4`. Zeros of the squared speed are located either from the
//! epitrochoid closed form or by grid-seeded Newton iteration.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::{CurveKind, EpitrochoidParams, PlanarCurve};
use crate::error::{Error, Result};

pub const DEFAULT_REFINEMENT: f64 = 1e-2;
const MAX_HALVINGS: usize = 40;
const ZERO_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 100;
const SCAN_GRID: usize = 64;

/// `x'(z)^2 + y'(z)^2`.
pub fn speed_squared(curve: &PlanarCurve, z: Complex64) -> Complex64 {
    let (dx, dy) = curve.velocity(z);
    dx * dx + dy * dy
}

/// `(k+2)^2 (1 + a^2 - 2 a cos((k+1) z))`, `a = lambda (k+1)`.
pub fn epitrochoid_speed_squared(params: EpitrochoidParams, z: Complex64) -> Complex64 {
    let k1 = params.k as f64 + 1.0;
    let a = params.a();
    let scale = (k1 + 1.0) * (k1 + 1.0);
    scale * (1.0 + a * a - 2.0 * a * (z * k1).cos())
}

fn speed_squared_derivative(curve: &PlanarCurve, z: Complex64) -> Complex64 {
    let (dx, dy) = curve.velocity(z);
    let (ddx, ddy) = curve.acceleration(z);
    2.0 * (dx * ddx + dy * ddy)
}

/// Polyline integration/continuation path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPolyline {
    pub vertices: Vec<Complex64>,
    /// Maximum step length between refined points.
    pub refinement: f64,
}

impl PathPolyline {
    pub fn new(vertices: Vec<Complex64>) -> Result<Self> {
        Self::with_refinement(vertices, DEFAULT_REFINEMENT)
    }

    pub fn with_refinement(vertices: Vec<Complex64>, refinement: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("path needs at least one vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("consecutive path vertices must be distinct".into()));
        }
        if !(refinement > 0.0) {
            return Err(Error::InvalidParameter(format!("refinement must be positive, got {refinement}")));
        }
        Ok(PathPolyline { vertices, refinement })
    }

    /// Straight segment `a -> b`.
    pub fn segment(a: Complex64, b: Complex64) -> Result<Self> {
        if a == b {
            return Self::new(vec![a]);
        }
        Self::new(vec![a, b])
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().unwrap()
    }

    /// Vertices with every segment subdivided to steps of at most `refinement`.
    pub fn refined_points(&self) -> Vec<Complex64> {
        let mut out = vec![self.vertices[0]];
        for w in self.vertices.windows(2) {
            let (a, b) = (w[0], w[1]);
            let n = ((b - a).norm() / self.refinement).ceil().max(1.0) as usize;
            for j in 1..=n {
                out.push(a + (b - a) * (j as f64 / n as f64));
            }
        }
        out
    }

    /// Distance from `p` to the polyline.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        if self.vertices.len() == 1 {
            return (p - self.vertices[0]).norm();
        }
        self.vertices
            .windows(2)
            .map(|w| segment_distance(w[0], w[1], p))
            .fold(f64::INFINITY, f64::min)
    }

    fn bounding_box(&self, pad: f64) -> ((f64, f64), (f64, f64)) {
        let re_min = self.vertices.iter().map(|v| v.re).fold(f64::INFINITY, f64::min) - pad;
        let re_max = self.vertices.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max) + pad;
        let im_min = self.vertices.iter().map(|v| v.im).fold(f64::INFINITY, f64::min) - pad;
        let im_max = self.vertices.iter().map(|v| v.im).fold(f64::NEG_INFINITY, f64::max) + pad;
        ((re_min, re_max), (im_min, im_max))
    }
}

fn segment_distance(a: Complex64, b: Complex64, p: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = ((p - a) * d.conj()).re / len2;
    let u = u.clamp(0.0, 1.0);
    (p - (a + d * u)).norm()
}

/// A determination of the square root at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchValue {
    pub point: Complex64,
    pub value: Complex64,
    /// Sign of the seed relative to the principal root at the path start.
    pub seed_sign: i8,
}

impl BranchValue {
    /// Positive root `+sqrt(x'(t)^2 + y'(t)^2)` at a real parameter.
    pub fn real_seed(curve: &PlanarCurve, t: f64) -> Self {
        let [dx, dy] = curve.velocity_real(t);
        BranchValue {
            point: Complex64::new(t, 0.0),
            value: Complex64::new((dx * dx + dy * dy).sqrt(), 0.0),
            seed_sign: 1,
        }
    }

    /// Seed with an explicit sign relative to the principal square root.
    pub fn signed_seed(curve: &PlanarCurve, z: Complex64, sign: i8) -> Self {
        let root = speed_squared(curve, z).sqrt();
        BranchValue {
            point: z,
            value: if sign < 0 { -root } else { root },
            seed_sign: if sign < 0 { -1 } else { 1 },
        }
    }
}

/// Choose the square root of `square` nearest `reference`.
pub(crate) fn nearest_root(square: Complex64, reference: Complex64) -> Complex64 {
    let r = square.sqrt();
    if (r - reference).norm_sqr() <= (r + reference).norm_sqr() {
        r
    } else {
        -r
    }
}

/// Continue `sqrt(f)` from `start` (value `value`) to `end`, halving the
/// step until each sub-step turns the argument by less than `pi/4`.
pub(crate) fn advance_sqrt<F>(f: &F, start: Complex64, value: Complex64, end: Complex64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    advance_rec(f, start, value, end, 0)
}

fn advance_rec<F>(f: &F, start: Complex64, value: Complex64, end: Complex64, depth: usize) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let candidate = nearest_root(f(end), value);
    let turn = (candidate / value).arg().abs();
    if turn < FRAC_PI_4 && candidate.norm() > 0.0 {
        return Ok(candidate);
    }
    if depth >= MAX_HALVINGS {
        return Err(Error::BranchJump { at: end });
    }
    let mid = (start + end) * 0.5;
    let v_mid = advance_rec(f, start, value, mid, depth + 1)?;
    advance_rec(f, mid, v_mid, end, depth + 1)
}

/// Continue an arbitrary square root along a path, given the zeros of the
/// radicand that must be avoided.
pub(crate) fn continue_sqrt<F>(f: &F, path: &PathPolyline, seed: Complex64, zeros: &[Complex64]) -> Result<Vec<(Complex64, Complex64)>>
where
    F: Fn(Complex64) -> Complex64,
{
    check_clearance(path, zeros)?;
    let points = path.refined_points();
    let mut out = Vec::with_capacity(points.len());
    let mut value = seed;
    out.push((points[0], value));
    for w in points.windows(2) {
        value = advance_sqrt(f, w[0], value, w[1])?;
        out.push((w[1], value));
    }
    Ok(out)
}

pub(crate) fn check_clearance(path: &PathPolyline, zeros: &[Complex64]) -> Result<()> {
    for &zero in zeros {
        let d = path.distance_to(zero);
        if d < path.refinement {
            return Err(Error::SingularityOnPath { zero, distance: d });
        }
    }
    Ok(())
}

/// Continue `sqrt(x'^2 + y'^2)` along `path` starting from `seed`.
pub fn sqrt_along_path(curve: &PlanarCurve, path: &PathPolyline, seed: BranchValue) -> Result<Vec<BranchValue>> {
    let check = speed_squared(curve, seed.point);
    let scale = check.norm().max(1.0);
    if (seed.value * seed.value - check).norm() > 1e-10 * scale {
        return Err(Error::InvalidParameter(format!(
            "seed {} does not square to speed^2 {} at {}",
            seed.value, check, seed.point
        )));
    }
    if (seed.point - path.start()).norm() > 1e-14 {
        return Err(Error::InvalidParameter("seed point must be the path start".into()));
    }
    let ((r0, r1), (i0, i1)) = path.bounding_box(path.refinement);
    let zeros = zeros_in_box(curve, (r0, r1), (i0, i1));
    let f = |z: Complex64| speed_squared(curve, z);
    let values = continue_sqrt(&f, path, seed.value, &zeros)?;
    Ok(values
        .into_iter()
        .map(|(point, value)| BranchValue {
            point,
            value,
            seed_sign: seed.seed_sign,
        })
        .collect())
}

/// Region searched by [`singularity_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Strip {
    pub t_range: (f64, f64),
    pub s_max: f64,
}

/// Zeros of speed^2 with `|Im z| <= s_max` and real part in `t_range`
/// (half-open `[t0, t1)` for closed curves, whose zeros repeat with the period).
pub fn singularity_scan(curve: &PlanarCurve, strip: Strip) -> Vec<Complex64> {
    if !(strip.s_max > 0.0) {
        return Vec::new();
    }
    let (t0, t1) = strip.t_range;
    let mut zeros = zeros_in_box(curve, (t0, t1), (-strip.s_max, strip.s_max));
    if curve.closed {
        let eps = 1e-9 * (t1 - t0).abs().max(1.0);
        zeros.retain(|z| z.re < t1 - eps);
    }
    zeros
}

/// All zeros of speed^2 inside a closed rectangle, sorted by (Re, Im).
pub fn zeros_in_box(curve: &PlanarCurve, re: (f64, f64), im: (f64, f64)) -> Vec<Complex64> {
    let mut zeros = match curve.kind {
        CurveKind::Epitrochoid(p) => epitrochoid_zeros_in_box(curve, p, re, im),
        CurveKind::Circle => Vec::new(),
        _ => grid_newton_zeros(curve, re, im),
    };
    // Snap the real part so that conjugate pairs sort by imaginary part.
    let key = |z: &Complex64| (z.re * 1e9).round() + 0.0;
    zeros.sort_by(|a, b| key(a).total_cmp(&key(b)).then(a.im.total_cmp(&b.im)));
    zeros
}

fn in_box(z: Complex64, re: (f64, f64), im: (f64, f64), slack: f64) -> bool {
    z.re >= re.0 - slack && z.re <= re.1 + slack && z.im >= im.0 - slack && z.im <= im.1 + slack
}

/// Closed form: `Re z = 2 pi n/(k+1)`, `Im z = +-ln(max(a, 1/a))/(k+1)`,
/// then Newton polish on the series.
fn epitrochoid_zeros_in_box(curve: &PlanarCurve, p: EpitrochoidParams, re: (f64, f64), im: (f64, f64)) -> Vec<Complex64> {
    let k1 = p.k as f64 + 1.0;
    let height = p.a().ln().abs() / k1;
    let period = TAU / k1;
    let n_lo = (re.0 / period).floor() as i64 - 1;
    let n_hi = (re.1 / period).ceil() as i64 + 1;
    let mut out = Vec::new();
    for n in n_lo..=n_hi {
        for sign in [-1.0, 1.0] {
            let guess = Complex64::new(n as f64 * period, sign * height);
            let z = newton_polish(curve, guess).unwrap_or(guess);
            if in_box(z, re, im, 1e-12) {
                out.push(z);
            }
        }
    }
    out
}

fn newton_polish(curve: &PlanarCurve, guess: Complex64) -> Option<Complex64> {
    let mut z = guess;
    let scale = speed_scale(curve, guess);
    for _ in 0..NEWTON_MAX_ITERS {
        let f = speed_squared(curve, z);
        if f.norm() < ZERO_TOL * scale.max(1.0) * 1e-3 {
            return Some(z);
        }
        let df = speed_squared_derivative(curve, z);
        if df.norm() == 0.0 {
            break;
        }
        let step = f / df;
        z -= step;
        if !z.re.is_finite() || !z.im.is_finite() {
            return None;
        }
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    let f = speed_squared(curve, z);
    (f.norm() < ZERO_TOL * scale.max(1.0)).then_some(z)
}

/// Typical magnitude of speed^2 near `z`, used to make tolerances relative.
fn speed_scale(curve: &PlanarCurve, z: Complex64) -> f64 {
    let (dx, dy) = curve.velocity(z);
    dx.norm_sqr() + dy.norm_sqr()
}

fn grid_newton_zeros(curve: &PlanarCurve, re: (f64, f64), im: (f64, f64)) -> Vec<Complex64> {
    let mut found: Vec<Complex64> = Vec::new();
    let dre = (re.1 - re.0) / (SCAN_GRID - 1) as f64;
    let dim = (im.1 - im.0) / (SCAN_GRID - 1) as f64;
    let slack = 1e-9;
    for i in 0..SCAN_GRID {
        for j in 0..SCAN_GRID {
            let guess = Complex64::new(re.0 + dre * i as f64, im.0 + dim * j as f64);
            if let Some(z) = newton_polish(curve, guess) {
                if in_box(z, re, im, slack) && !found.iter().any(|w| (w - z).norm() < 1e-5) {
                    found.push(z);
                }
            }
        }
    }
    found
}

/// Distance from the real segment `t_range` to the nearest zero of speed^2,
/// searching `|Im z| <= search` (and the same margin beyond the segment ends).
/// `None` when no zero is found in the search window.
pub fn nearest_zero_distance(curve: &PlanarCurve, t_range: (f64, f64), search: f64) -> Option<f64> {
    let re = (t_range.0 - search, t_range.1 + search);
    let zeros = zeros_in_box(curve, re, (-search, search));
    let a = Complex64::new(t_range.0, 0.0);
    let b = Complex64::new(t_range.1, 0.0);
    zeros
        .into_iter()
        .map(|z| segment_distance(a, b, z))
        .filter(|d| *d <= search)
        .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |m| m.min(d))))
}
