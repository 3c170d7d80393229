//! Schwarz solution of the Björling problem for planar geodesics.
//!
//! For a planar curve `c(t) = (x(t), y(t), 0)` with in-plane unit normal, the
//! minimal surface through `c` is `f(z) = Re ∫ Φ` where
//! `Φ = (x'(z), y'(z), i sqrt(x'(z)^2 + y'(z)^2))` is a null curve. The square
//! root is fixed to be positive on the real axis and continued off it.

use std::f64::consts::FRAC_PI_8;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::continuation::{
    advance_sqrt, check_clearance, continue_sqrt, nearest_root, speed_squared, zeros_in_box, PathPolyline,
    DEFAULT_REFINEMENT,
};
use crate::curves::{CurveKind, PlanarCurve};
use crate::error::{Error, Result};
use crate::exec::{self, Strategy};
use crate::quadrature::{integrate_segment, QuadOptions};

/// Fraction of the distance to the nearest zero of speed^2 usable as strip half-width.
pub const STRIP_SAFETY: f64 = 0.9;
/// Reference half-width for curves whose speed^2 has no zeros.
pub const FREE_STRIP: f64 = 1.0;

/// Half-height of the window scanned for zeros of non-epitrochoid curves.
const GENERIC_SEARCH: f64 = 2.0;

const MIN_REGULARITY_SAMPLES: usize = 256;

type Triple = [Complex64; 3];

fn zero3() -> Triple {
    [Complex64::new(0.0, 0.0); 3]
}

/// The null curve `Φ` attached to a regular planar curve.
#[derive(Debug, Clone)]
pub struct HolomorphicTriple {
    curve: PlanarCurve,
    window: ((f64, f64), (f64, f64)),
    zeros: Vec<Complex64>,
    refinement: f64,
}

/// Build `Φ` for `curve`. Fails if the curve is not regular on its domain.
pub fn phi(curve: &PlanarCurve) -> Result<HolomorphicTriple> {
    let margin = curve.regularity_margin(MIN_REGULARITY_SAMPLES);
    if !(margin > 0.0) {
        return Err(Error::Irregular { margin });
    }
    let (t0, t1) = curve.domain;
    let window = ((t0 - GENERIC_SEARCH, t1 + GENERIC_SEARCH), (-GENERIC_SEARCH, GENERIC_SEARCH));
    let zeros = zeros_in_box(curve, window.0, window.1);
    Ok(HolomorphicTriple {
        curve: curve.clone(),
        window,
        zeros,
        refinement: DEFAULT_REFINEMENT,
    })
}

impl HolomorphicTriple {
    pub fn curve(&self) -> &PlanarCurve {
        &self.curve
    }

    /// Zeros of speed^2 found in the scan window around the domain.
    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    fn zeros_for(&self, re: (f64, f64), im: (f64, f64)) -> Vec<Complex64> {
        let closed_form = matches!(self.curve.kind, CurveKind::Epitrochoid(_) | CurveKind::Circle);
        let inside = re.0 >= self.window.0 .0
            && re.1 <= self.window.0 .1
            && im.0 >= self.window.1 .0
            && im.1 <= self.window.1 .1;
        if closed_form || !inside {
            return zeros_in_box(&self.curve, re, im);
        }
        self.zeros
            .iter()
            .copied()
            .filter(|z| z.re >= re.0 && z.re <= re.1 && z.im >= im.0 && z.im <= im.1)
            .collect()
    }

    fn zeros_near_segment(&self, a: Complex64, b: Complex64, pad: f64) -> Vec<Complex64> {
        let re = (a.re.min(b.re) - pad, a.re.max(b.re) + pad);
        let im = (a.im.min(b.im) - pad, a.im.max(b.im) + pad);
        self.zeros_for(re, im)
    }

    /// Distance from the real segment `t_range` to the nearest zero of speed^2.
    pub fn zero_distance(&self, t_range: (f64, f64)) -> Option<f64> {
        let a = Complex64::new(t_range.0, 0.0);
        let b = Complex64::new(t_range.1, 0.0);
        let zeros = self.zeros_for((t_range.0 - GENERIC_SEARCH, t_range.1 + GENERIC_SEARCH), self.window.1);
        let path = PathPolyline {
            vertices: vec![a, b],
            refinement: self.refinement,
        };
        zeros
            .into_iter()
            .map(|z| path.distance_to(z))
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |m| m.min(d))))
    }

    /// Largest usable `|Im z|` over `t_range`: `0.9 x` the zero distance.
    /// `None` when speed^2 has no zeros nearby (the strip is unbounded).
    pub fn usable_halfwidth(&self, t_range: (f64, f64)) -> Option<f64> {
        self.zero_distance(t_range).map(|d| STRIP_SAFETY * d)
    }

    /// The determination of `sqrt(speed^2)` at `z`: positive on the real
    /// axis, continued vertically from `Re z`.
    pub fn sqrt_at(&self, z: Complex64) -> Result<Complex64> {
        let base = Complex64::new(z.re, 0.0);
        let [dx, dy] = self.curve.velocity_real(z.re);
        let seed = Complex64::new((dx * dx + dy * dy).sqrt(), 0.0);
        if z.im == 0.0 {
            return Ok(seed);
        }
        self.leg_root(base, seed, z)
    }

    fn leg_root(&self, a: Complex64, root_a: Complex64, b: Complex64) -> Result<Complex64> {
        let f = |w: Complex64| speed_squared(&self.curve, w);
        self.continue_on_leg(&f, a, root_a, b)
    }

    /// Continue `sqrt(f)` along the straight leg `a -> b`, for any `f` whose
    /// zeros and poles are among the zeros of speed^2.
    pub(crate) fn continue_on_leg<F>(&self, f: &F, a: Complex64, root_a: Complex64, b: Complex64) -> Result<Complex64>
    where
        F: Fn(Complex64) -> Complex64,
    {
        if a == b {
            return Ok(root_a);
        }
        let step = self.leg_step(a, b)?;
        let n = ((b - a).norm() / step).ceil().max(1.0) as usize;
        let mut value = root_a;
        let mut prev = a;
        for j in 1..=n {
            let p = a + (b - a) * (j as f64 / n as f64);
            value = advance_sqrt(f, prev, value, p)?;
            prev = p;
        }
        Ok(value)
    }

    /// Step length for an internal leg: the default refinement, shrunk near zeros.
    fn leg_step(&self, a: Complex64, b: Complex64) -> Result<f64> {
        let zeros = self.zeros_near_segment(a, b, self.refinement.max(0.1));
        let leg = PathPolyline {
            vertices: if a == b { vec![a] } else { vec![a, b] },
            refinement: self.refinement,
        };
        let mut step = self.refinement;
        for zero in zeros {
            let d = leg.distance_to(zero);
            if d < 1e-8 {
                return Err(Error::SingularityOnPath { zero, distance: d });
            }
            step = step.min(0.25 * d);
        }
        Ok(step)
    }

    /// `Φ(z)` with the square root given explicitly.
    pub fn eval_with_root(&self, z: Complex64, root: Complex64) -> Triple {
        let (dx, dy) = self.curve.velocity(z);
        [dx, dy, Complex64::i() * root]
    }

    /// `Φ(z) = (x'(z), y'(z), i sqrt(x'(z)^2 + y'(z)^2))`.
    pub fn eval(&self, z: Complex64) -> Result<Triple> {
        Ok(self.eval_with_root(z, self.sqrt_at(z)?))
    }

    /// `∫_a^b Φ dw` along a straight leg, with the root known at `a`.
    /// Returns the integral and the continued root at `b`.
    fn integrate_leg(&self, a: Complex64, root_a: Complex64, b: Complex64, tol: f64) -> Result<(Triple, Complex64)> {
        if a == b {
            return Ok((zero3(), root_a));
        }
        let step = self.leg_step(a, b)?;
        let n = ((b - a).norm() / step).ceil().max(1.0) as usize;
        let f = |w: Complex64| speed_squared(&self.curve, w);
        let mut total = zero3();
        let mut prev = a;
        let mut value = root_a;
        let piece_tol = tol / n as f64;
        for j in 1..=n {
            let p = a + (b - a) * (j as f64 / n as f64);
            let next = advance_sqrt(&f, prev, value, p)?;
            let piece = self.integrate_step(prev, value, p, next, piece_tol, 0)?;
            for c in 0..3 {
                total[c] += piece[c];
            }
            prev = p;
            value = next;
        }
        Ok((total, value))
    }

    /// Integrate one short step whose endpoint roots are already on the same
    /// branch; splits further while the root turns by more than `pi/8`.
    fn integrate_step(
        &self,
        a: Complex64,
        va: Complex64,
        b: Complex64,
        vb: Complex64,
        tol: f64,
        depth: usize,
    ) -> Result<Triple> {
        if (vb / va).arg().abs() > FRAC_PI_8 && depth < 30 {
            let f = |w: Complex64| speed_squared(&self.curve, w);
            let mid = (a + b) * 0.5;
            let vm = advance_sqrt(&f, a, va, mid)?;
            let left = self.integrate_step(a, va, mid, vm, tol * 0.5, depth + 1)?;
            let right = self.integrate_step(mid, vm, b, vb, tol * 0.5, depth + 1)?;
            return Ok([left[0] + right[0], left[1] + right[1], left[2] + right[2]]);
        }
        let span = b - a;
        let len2 = span.norm_sqr();
        let integrand = |w: Complex64| {
            let u = ((w - a) * span.conj()).re / len2;
            let reference = va + (vb - va) * u;
            let root = nearest_root(speed_squared(&self.curve, w), reference);
            self.eval_with_root(w, root)
        };
        integrate_segment(
            &integrand,
            a,
            b,
            QuadOptions {
                tol,
                ..QuadOptions::default()
            },
        )
    }

    /// `Re ∫_a^b Φ` along the straight segment, branch seeded at `a` per [`Self::sqrt_at`].
    pub fn real_integral(&self, a: Complex64, b: Complex64) -> Result<[f64; 3]> {
        let root = self.sqrt_at(a)?;
        let (v, _) = self.integrate_leg(a, root, b, QuadOptions::default().tol)?;
        Ok([v[0].re, v[1].re, v[2].re])
    }
}

/// In-plane unit normal `(-y'(t), x'(t), 0) / |c'(t)|`.
pub fn planar_normal(curve: &PlanarCurve, t: f64) -> [f64; 3] {
    let [dx, dy] = curve.velocity_real(t);
    let speed = (dx * dx + dy * dy).sqrt();
    [-dy / speed, dx / speed, 0.0]
}

/// `Re ∫_{z0}^{z} Φ(w) dw` along `path`, with the square root seeded at `z0`
/// (positive there when `z0` is real) and continued along the path.
pub fn schwarz_integrate(triple: &HolomorphicTriple, z0: Complex64, z: Complex64, path: &PathPolyline) -> Result<[f64; 3]> {
    if (path.start() - z0).norm() > 1e-14 || (path.end() - z).norm() > 1e-14 {
        return Err(Error::InvalidParameter(format!(
            "path runs {} -> {}, expected {z0} -> {z}",
            path.start(),
            path.end()
        )));
    }
    if path.vertices.len() == 1 {
        return Ok([0.0; 3]);
    }
    let pad = path.refinement;
    let re = (
        path.vertices.iter().map(|v| v.re).fold(f64::INFINITY, f64::min) - pad,
        path.vertices.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max) + pad,
    );
    let im = (
        path.vertices.iter().map(|v| v.im).fold(f64::INFINITY, f64::min) - pad,
        path.vertices.iter().map(|v| v.im).fold(f64::NEG_INFINITY, f64::max) + pad,
    );
    let zeros = triple.zeros_for(re, im);
    check_clearance(path, &zeros)?;

    let seed = triple.sqrt_at(z0)?;
    let f = |w: Complex64| speed_squared(&triple.curve, w);
    let values = continue_sqrt(&f, path, seed, &zeros)?;
    let total_len: f64 = values.windows(2).map(|w| (w[1].0 - w[0].0).norm()).sum();
    let tol = QuadOptions::default().tol;
    let mut total = zero3();
    for w in values.windows(2) {
        let (a, va) = w[0];
        let (b, vb) = w[1];
        let piece = triple.integrate_step(a, va, b, vb, tol * (b - a).norm() / total_len, 0)?;
        for c in 0..3 {
            total[c] += piece[c];
        }
    }
    Ok([total[0].re, total[1].re, total[2].re])
}

/// Base point of every patch: `z0 = 0` clamped into the curve domain.
pub fn anchor_parameter(curve: &PlanarCurve) -> f64 {
    0.0f64.clamp(curve.domain.0, curve.domain.1)
}

/// Surface point `f(z) = c(z0) + Re ∫_{z0}^{z} Φ` along `z0 -> Re z -> z`.
pub fn surface_point(triple: &HolomorphicTriple, z: Complex64) -> Result<[f64; 3]> {
    let t0 = anchor_parameter(&triple.curve);
    let [x0, y0] = triple.curve.eval_real(t0);
    let base = Complex64::new(z.re, 0.0);
    let along = triple.real_integral(Complex64::new(t0, 0.0), base)?;
    let up = triple.real_integral(base, z)?;
    Ok([x0 + along[0] + up[0], y0 + along[1] + up[1], along[2] + up[2]])
}

/// Uniform `nt x ns` grid over `t_range x s_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_range: (f64, f64),
    pub s_range: (f64, f64),
    pub nt: usize,
    pub ns: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nt < 2 || self.ns < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs nt, ns >= 2 (got {} x {})",
                self.nt, self.ns
            )));
        }
        if !(self.t_range.1 > self.t_range.0) || !(self.s_range.1 > self.s_range.0) {
            return Err(Error::InvalidParameter("grid ranges must be increasing".into()));
        }
        Ok(())
    }

    /// Grid over the curve's domain and the strip `|s| <= s_fraction · d`,
    /// where `d` is the distance from the domain to the nearest zero of
    /// speed^2 (`FREE_STRIP` when there is none).
    pub fn strip(triple: &HolomorphicTriple, nt: usize, ns: usize, s_fraction: f64) -> Result<GridSpec> {
        if !(s_fraction > 0.0 && s_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "s_fraction must lie in (0, 1), got {s_fraction}"
            )));
        }
        let domain = triple.curve.domain;
        let d = triple.zero_distance(domain).unwrap_or(FREE_STRIP);
        let half = s_fraction * d;
        let grid = GridSpec {
            t_range: domain,
            s_range: (-half, half),
            nt,
            ns,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Same ranges with every spacing halved.
    pub fn refined(&self) -> GridSpec {
        GridSpec {
            nt: 2 * self.nt - 1,
            ns: 2 * self.ns - 1,
            ..*self
        }
    }

    pub fn t_values(&self) -> Vec<f64> {
        linspace(self.t_range, self.nt)
    }

    pub fn s_values(&self) -> Vec<f64> {
        linspace(self.s_range, self.ns)
    }

    pub fn h_t(&self) -> f64 {
        (self.t_range.1 - self.t_range.0) / (self.nt - 1) as f64
    }

    pub fn h_s(&self) -> f64 {
        (self.s_range.1 - self.s_range.0) / (self.ns - 1) as f64
    }
}

fn linspace((a, b): (f64, f64), n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            if j + 1 == n {
                b
            } else {
                a + (b - a) * j as f64 / (n - 1) as f64
            }
        })
        .map(|v| if v.abs() < 1e-15 * (a.abs() + b.abs()) { 0.0 } else { v })
        .collect()
}

/// Sampled surface `f(t_j + i s_l)`; `points[l * nt + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfacePatch {
    pub grid: GridSpec,
    pub t: Vec<f64>,
    pub s: Vec<f64>,
    pub points: Vec<[f64; 3]>,
    /// The parameter `z0` the integral is based at.
    pub anchor: f64,
}

impl SurfacePatch {
    pub fn at(&self, it: usize, is: usize) -> [f64; 3] {
        self.points[is * self.grid.nt + it]
    }

    /// Index of the `s = 0` row, if the grid has one.
    pub fn geodesic_row(&self) -> Option<usize> {
        let h = self.grid.h_s();
        self.s.iter().position(|s| s.abs() < 1e-9 * h.max(1e-300))
    }
}

/// Sample the Björling surface of `curve` on a grid.
///
/// Fails with `StripTooWide` when `|s|` exceeds `0.9 x` the distance from
/// `t_range` to the nearest zero of speed^2.
pub fn surface_patch(curve: &PlanarCurve, grid: GridSpec, strategy: Strategy) -> Result<SurfacePatch> {
    grid.validate()?;
    let triple = phi(curve)?;
    surface_patch_of(&triple, grid, strategy)
}

pub fn surface_patch_of(triple: &HolomorphicTriple, grid: GridSpec, strategy: Strategy) -> Result<SurfacePatch> {
    grid.validate()?;
    let requested = grid.s_range.0.abs().max(grid.s_range.1.abs());
    if let Some(limit) = triple.usable_halfwidth(grid.t_range) {
        if requested > limit * (1.0 + 1e-12) {
            return Err(Error::StripTooWide { requested, limit });
        }
    }
    let curve = &triple.curve;
    let t = grid.t_values();
    let s = grid.s_values();
    let anchor = anchor_parameter(curve);
    let [x0, y0] = curve.eval_real(anchor);
    let tol = 1e-12;

    // Geodesic row, integrated cumulatively from the anchor.
    let mut base = Vec::with_capacity(t.len());
    let mut acc = zero3();
    let mut prev = Complex64::new(anchor, 0.0);
    let mut root = triple.sqrt_at(prev)?;
    for &tj in &t {
        let z = Complex64::new(tj, 0.0);
        let (piece, r) = triple.integrate_leg(prev, root, z, tol)?;
        for c in 0..3 {
            acc[c] += piece[c];
        }
        base.push(acc);
        prev = z;
        root = r;
    }

    let columns = exec::try_map_indexed(strategy, t.len(), |j| -> Result<Vec<[f64; 3]>> {
        let start = Complex64::new(t[j], 0.0);
        let start_root = triple.sqrt_at(start)?;
        let mut column = vec![[0.0; 3]; s.len()];
        // Walk outward from s = 0 in both directions.
        let mut up: Vec<usize> = (0..s.len()).filter(|&l| s[l] >= 0.0).collect();
        up.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        let mut down: Vec<usize> = (0..s.len()).filter(|&l| s[l] < 0.0).collect();
        down.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        for order in [up, down] {
            let mut acc = base[j];
            let mut z = start;
            let mut r = start_root;
            for l in order {
                let target = Complex64::new(t[j], s[l]);
                let (piece, r_next) = triple.integrate_leg(z, r, target, tol)?;
                for c in 0..3 {
                    acc[c] += piece[c];
                }
                column[l] = [x0 + acc[0].re, y0 + acc[1].re, acc[2].re];
                z = target;
                r = r_next;
            }
        }
        Ok(column)
    })?;

    let mut points = vec![[0.0; 3]; t.len() * s.len()];
    for (j, column) in columns.into_iter().enumerate() {
        for (l, p) in column.into_iter().enumerate() {
            points[l * t.len() + j] = p;
        }
    }
    Ok(SurfacePatch {
        grid,
        t,
        s,
        points,
        anchor,
    })
}

/// Tangents `(f_t, f_s)` at `z` from the exact null curve:
/// `f_t = Re Φ`, `f_s = -Im Φ`.
pub fn exact_tangents(triple: &HolomorphicTriple, z: Complex64) -> Result<([f64; 3], [f64; 3])> {
    let p = triple.eval(z)?;
    Ok(([p[0].re, p[1].re, p[2].re], [-p[0].im, -p[1].im, -p[2].im]))
}

/// Central-difference tangents of the surface at `z` with step `h`, from
/// `f(z+h) - f(z-h)` and `f(z+ih) - f(z-ih)`.
pub fn difference_tangents(triple: &HolomorphicTriple, z: Complex64, h: f64) -> Result<([f64; 3], [f64; 3])> {
    let dt = triple.real_integral(z - h, z + h)?;
    let i = Complex64::i();
    let ds = triple.real_integral(z - i * h, z + i * h)?;
    let scale = 1.0 / (2.0 * h);
    Ok((dt.map(|v| v * scale), ds.map(|v| v * scale)))
}

pub fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn unit_normal(f_t: [f64; 3], f_s: [f64; 3]) -> [f64; 3] {
    let n = cross(f_t, f_s);
    let len = norm(n);
    n.map(|v| v / len)
}

/// Null residual `|φ1^2 + φ2^2 + φ3^2|`.
pub fn null_residual(p: &Triple) -> f64 {
    (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).norm()
}

/// First fundamental form `(E, F, G)` from the exact null curve at `z`.
pub fn first_fundamental_form(triple: &HolomorphicTriple, z: Complex64) -> Result<(f64, f64, f64)> {
    let (ft, fs) = exact_tangents(triple, z)?;
    Ok((dot(ft, ft), dot(ft, fs), dot(fs, fs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_circle, make_cycloid, make_epitrochoid, make_parabola, EpitrochoidParams};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{PI, TAU};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn epi(k: u32, lambda: f64) -> PlanarCurve {
        make_epitrochoid(EpitrochoidParams::new(k, lambda).unwrap()).unwrap()
    }

    fn catenoid(t: f64, s: f64) -> [f64; 3] {
        [t.cos() * s.cosh() - 1.0, t.sin() * s.cosh(), -s]
    }

    #[test]
    fn phi_examples() {
        let circle = phi(&make_circle()).unwrap();
        for t in [0.0, 1.0, 2.5] {
            let p = circle.eval(c(t, 0.0)).unwrap();
            assert_abs_diff_eq!((p[0] - (-t.sin())).norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!((p[1] - t.cos()).norm(), 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!((p[2] - Complex64::i()).norm(), 0.0, epsilon = 1e-15);
        }
        let e = phi(&epi(2, 0.5)).unwrap();
        let p = e.eval(c(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(p[0].norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((p[1] + 2.0).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((p[2] - c(0.0, 2.0)).norm(), 0.0, epsilon = 1e-14);
        let par = phi(&make_parabola(1.0).unwrap()).unwrap();
        let p = par.eval(c(0.0, 0.0)).unwrap();
        assert_eq!(p, [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
    }

    #[test]
    fn phi_rejects_irregular_curve() {
        let cusp = crate::curves::epitrochoid_unchecked(EpitrochoidParams { k: 2, lambda: 1.0 / 3.0 });
        assert!(matches!(phi(&cusp), Err(Error::Irregular { .. })));
    }

    #[test]
    fn phi3_positive_imaginary_on_axis() {
        for curve in [epi(1, 0.6), epi(4, 0.4), make_cycloid(0.1).unwrap()] {
            let trip = phi(&curve).unwrap();
            for t in curve.sample_parameters(64) {
                let p = trip.eval(c(t, 0.0)).unwrap();
                assert!(p[2].re.abs() < 1e-15 && p[2].im > 0.0);
            }
        }
    }

    #[test]
    fn planar_normal_examples() {
        assert_eq!(planar_normal(&make_circle(), 0.0), [-1.0, 0.0, 0.0]);
        let n = planar_normal(&epi(2, 0.5), 0.0);
        assert_abs_diff_eq!(n[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n[1], 0.0, epsilon = 1e-15);
        // Left normal of the cycloid at its peak: x' = 2, y' = 0.
        let n = planar_normal(&make_cycloid(0.1).unwrap(), PI);
        assert_abs_diff_eq!(n[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(n[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn catenoid_from_circle() {
        let trip = phi(&make_circle()).unwrap();
        for (t, s) in [(0.0, 1.0), (1.3, -0.6), (4.0, 0.25), (-2.0, 0.9)] {
            let z = c(t, s);
            let mut verts = vec![c(0.0, 0.0), c(t, 0.0), z];
            verts.dedup();
            let path = PathPolyline::new(verts).unwrap();
            let f = schwarz_integrate(&trip, c(0.0, 0.0), z, &path).unwrap();
            let expect = catenoid(t, s);
            for i in 0..3 {
                assert_abs_diff_eq!(f[i], expect[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn empty_integral_and_closure() {
        let trip = phi(&epi(2, 0.5)).unwrap();
        let z = c(0.7, 0.05);
        let path = PathPolyline::new(vec![z]).unwrap();
        assert_eq!(schwarz_integrate(&trip, z, z, &path).unwrap(), [0.0; 3]);
        let path = PathPolyline::segment(c(0.0, 0.0), c(TAU, 0.0)).unwrap();
        let f = schwarz_integrate(&trip, c(0.0, 0.0), c(TAU, 0.0), &path).unwrap();
        for v in f {
            assert!(v.abs() < 1e-10, "{f:?}");
        }
    }

    #[test]
    fn path_independence() {
        for curve in [epi(2, 0.5), epi(3, 0.6), make_parabola(1.0).unwrap()] {
            let trip = phi(&curve).unwrap();
            let z = c(0.8, 0.1);
            let p1 = PathPolyline::new(vec![c(0.0, 0.0), c(0.8, 0.0), z]).unwrap();
            let p2 = PathPolyline::new(vec![c(0.0, 0.0), c(0.2, -0.08), c(0.5, 0.11), z]).unwrap();
            let a = schwarz_integrate(&trip, c(0.0, 0.0), z, &p1).unwrap();
            let b = schwarz_integrate(&trip, c(0.0, 0.0), z, &p2).unwrap();
            for i in 0..3 {
                assert_abs_diff_eq!(a[i], b[i], epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn path_must_match_endpoints() {
        let trip = phi(&make_circle()).unwrap();
        let path = PathPolyline::segment(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(schwarz_integrate(&trip, c(0.0, 0.0), c(2.0, 0.0), &path).is_err());
    }

    #[test]
    fn strip_limits() {
        let trip = phi(&epi(2, 0.5)).unwrap();
        let w = trip.usable_halfwidth((0.0, TAU)).unwrap();
        assert_abs_diff_eq!(w, 0.9 * 1.5f64.ln() / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w, 0.121640, epsilon = 1e-6);
        assert_eq!(phi(&make_circle()).unwrap().usable_halfwidth((0.0, TAU)), None);
        let grid = GridSpec { t_range: (0.0, TAU), s_range: (-0.2, 0.2), nt: 8, ns: 5 };
        let err = surface_patch(&epi(2, 0.5), grid, Strategy::Sequential).unwrap_err();
        assert!(matches!(err, Error::StripTooWide { .. }));
    }

    #[test]
    fn catenoid_patch() {
        let grid = GridSpec { t_range: (0.0, TAU), s_range: (-1.0, 1.0), nt: 33, ns: 9 };
        let patch = surface_patch(&make_circle(), grid, Strategy::Parallel).unwrap();
        assert_eq!(patch.points.len(), 33 * 9);
        for (l, &s) in patch.s.iter().enumerate() {
            for (j, &t) in patch.t.iter().enumerate() {
                let mut e = catenoid(t, s);
                e[0] += 1.0;
                let p = patch.at(j, l);
                for i in 0..3 {
                    assert_abs_diff_eq!(p[i], e[i], epsilon = 1e-10);
                }
            }
        }
        let top = patch.at(0, patch.s.len() - 1);
        assert_abs_diff_eq!(top[0], 1f64.cosh(), epsilon = 1e-10);
        assert_abs_diff_eq!(top[2], -1.0, epsilon = 1e-10);
    }

    #[test]
    fn geodesic_row_reproduces_curve() {
        for curve in [epi(2, 0.5), make_cycloid(0.1).unwrap(), make_parabola(1.0).unwrap()] {
            let trip = phi(&curve).unwrap();
            let h = trip.usable_halfwidth(curve.domain).unwrap();
            let grid = GridSpec { t_range: curve.domain, s_range: (-h, h), nt: 64, ns: 5 };
            let seq = surface_patch_of(&trip, grid, Strategy::Sequential).unwrap();
            let par = surface_patch_of(&trip, grid, Strategy::Parallel).unwrap();
            assert_eq!(seq, par);
            let row = seq.geodesic_row().unwrap();
            for (j, &t) in seq.t.iter().enumerate() {
                let p = seq.at(j, row);
                let [x, y] = curve.eval_real(t);
                assert!((p[0] - x).abs() < 1e-9 && (p[1] - y).abs() < 1e-9 && p[2].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn surface_point_matches_patch() {
        let curve = epi(3, 0.6);
        let trip = phi(&curve).unwrap();
        let grid = GridSpec { t_range: (0.0, TAU), s_range: (-0.15, 0.15), nt: 16, ns: 7 };
        let patch = surface_patch_of(&trip, grid, Strategy::Sequential).unwrap();
        let p = surface_point(&trip, c(patch.t[5], patch.s[6])).unwrap();
        let q = patch.at(5, 6);
        for i in 0..3 {
            assert_abs_diff_eq!(p[i], q[i], epsilon = 1e-10);
        }
    }

    #[test]
    fn conformal_and_null() {
        for curve in [make_circle(), epi(1, 0.6), epi(4, 0.4), make_parabola(1.0).unwrap()] {
            let trip = phi(&curve).unwrap();
            let h = trip.usable_halfwidth(curve.domain).unwrap_or(1.0);
            for t in curve.sample_parameters(16) {
                for s in [-h, -0.3 * h, 0.0, 0.5 * h, h] {
                    let z = c(t, s);
                    let p = trip.eval(z).unwrap();
                    assert!(null_residual(&p) < 1e-12);
                    let (e, f, g) = first_fundamental_form(&trip, z).unwrap();
                    assert!((e - g).abs() / e < 1e-6 && f.abs() / e < 1e-6);
                }
            }
        }
    }

    #[test]
    fn difference_normal_matches_planar_normal() {
        for curve in [make_circle(), epi(2, 0.5), make_cycloid(0.1).unwrap()] {
            let trip = phi(&curve).unwrap();
            for t in curve.sample_parameters(32) {
                let (ft, fs) = difference_tangents(&trip, c(t, 0.0), 1e-3).unwrap();
                let n = unit_normal(ft, fs);
                let m = planar_normal(&curve, t);
                let d = ((n[0] - m[0]).powi(2) + (n[1] - m[1]).powi(2) + (n[2] - m[2]).powi(2)).sqrt();
                assert!(d < 1e-4, "t={t} d={d}");
            }
        }
    }
}
