//! Algebraic model of the epitrochoid surface in the chart `v = e^{iz}`.
//!
//! With `n = k + 1` and `a = λ(k+1)`:
//!
//! ```text
//! g   = −w v^p / (v^n − a)
//! η   = (k+2)(v^n − a) / v^{k+3} dv
//! w²  = v(1 − a v^n)(a − v^n)      k even, p = (k+2)/2
//! w²  =  (1 − a v^n)(a − v^n)      k odd,  p = (k+3)/2
//! ```
//!
//! The hyperelliptic surface `w² = p(v)` carries single-valued data. The
//! metric vanishes at the branch points over `v^n = a` and `v^n = 1/a`, which
//! lie at finite distance from the geodesic `|v| = 1`.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::curves::EpitrochoidParams;
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Strategy};
use crate::quadrature::{integrate_real, QuadOptions};

/// Dyadic levels used by the order fit.
pub const FIT_LEVELS: usize = 9;
/// Angles per circle in the Jensen average.
pub const FIT_ANGLES: usize = 16;
/// Max disagreement between the last two slopes.
pub const SLOPE_AGREEMENT: f64 = 0.1;
/// Max distance of the final slope from an integer.
pub const INTEGRALITY_TOL: f64 = 0.05;
/// Fraction of the distance to the next special point used as `r0`.
pub const RADIUS_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VModel {
    pub k: u32,
    pub lambda: f64,
    pub a: f64,
    /// Exponent of `v` in the numerator of `g`.
    pub p: u32,
    /// Coefficients of `w²` in ascending powers of `v`.
    pub w_squared: Vec<f64>,
    pub genus: u32,
    pub punctures: Vec<String>,
}

pub fn v_model(k: u32, lambda: f64) -> Result<VModel> {
    let params = EpitrochoidParams::new(k, lambda)?;
    let a = params.a();
    let n = (k + 1) as usize;
    let even = k % 2 == 0;
    let (p, shift, punctures) = if even {
        ((k + 2) / 2, 1, vec!["(0,0)".to_string(), "(inf,inf)".to_string()])
    } else {
        (
            (k + 3) / 2,
            0,
            vec!["(0,+sqrt(a))".to_string(), "(0,-sqrt(a))".to_string(), "(inf,inf)".to_string()],
        )
    };
    // (1 − a v^n)(a − v^n) = a − (1 + a²) v^n + a v^{2n}, times v^shift.
    let mut w_squared = vec![0.0; 2 * n + shift + 1];
    w_squared[shift] = a;
    w_squared[n + shift] = -(1.0 + a * a);
    w_squared[2 * n + shift] = a;
    let degree = w_squared.len() as u32 - 1;
    Ok(VModel {
        k,
        lambda,
        a,
        p,
        w_squared,
        genus: (degree - 1) / 2,
        punctures,
    })
}

impl VModel {
    pub fn n(&self) -> u32 {
        self.k + 1
    }

    pub fn is_even(&self) -> bool {
        self.k % 2 == 0
    }

    pub fn degree(&self) -> usize {
        self.w_squared.len() - 1
    }

    fn vn(&self, v: Complex64) -> Complex64 {
        v.powu(self.n())
    }

    /// `w²` in factored form.
    pub fn w_squared_at(&self, v: Complex64) -> Complex64 {
        let vn = self.vn(v);
        let core = (1.0 - self.a * vn) * (self.a - vn);
        if self.is_even() {
            v * core
        } else {
            core
        }
    }

    /// `d(w²)/dv` from the coefficient list.
    pub fn w_squared_derivative(&self, v: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &c) in self.w_squared.iter().enumerate().skip(1).rev() {
            acc = acc * v + c * j as f64;
        }
        acc
    }

    /// `ln|w²|`, summed factor by factor.
    pub fn ln_abs_w_squared(&self, v: Complex64) -> f64 {
        let vn = self.vn(v);
        let mut s = (1.0 - self.a * vn).norm().ln() + (self.a - vn).norm().ln();
        if self.is_even() {
            s += v.norm().ln();
        }
        s
    }

    /// The sheet of `w` on `|v| = 1` that matches the curve data:
    /// `w = −i v^m |a − v^n|` with `m = (k+2)/2` (even) or `(k+1)/2` (odd).
    pub fn w_on_circle(&self, t: f64) -> Complex64 {
        let v = Complex64::from_polar(1.0, t);
        let m = if self.is_even() { (self.k + 2) / 2 } else { (self.k + 1) / 2 };
        let i = Complex64::i();
        -i * v.powu(m) * (self.a - self.vn(v)).norm()
    }

    pub fn g(&self, v: Complex64, w: Complex64) -> Complex64 {
        -w * v.powu(self.p) / (self.vn(v) - self.a)
    }

    /// Coefficient of `dv` in `η`.
    pub fn eta(&self, v: Complex64) -> Complex64 {
        (self.k as f64 + 2.0) * (self.vn(v) - self.a) / v.powu(self.k + 3)
    }

    /// `ln|g|` on either sheet.
    pub fn ln_abs_g(&self, v: Complex64) -> f64 {
        0.5 * self.ln_abs_w_squared(v) + self.p as f64 * v.norm().ln() - (self.vn(v) - self.a).norm().ln()
    }

    pub fn ln_abs_eta(&self, v: Complex64) -> f64 {
        (self.k as f64 + 2.0).ln() + (self.vn(v) - self.a).norm().ln() - (self.k as f64 + 3.0) * v.norm().ln()
    }

    /// Metric density in the `v` chart, `¼(1 + |g|²)²|η/dv|²`, written without
    /// the cancelling factors: `|g|²|η/dv| = (k+2)|1 − a v^n|`.
    pub fn density_v(&self, v: Complex64) -> f64 {
        let vn = self.vn(v);
        let c = self.k as f64 + 2.0;
        let s = (vn - self.a).norm() / v.norm().powi(self.k as i32 + 3) + (1.0 - self.a * vn).norm();
        0.25 * c * c * s * s
    }

    /// Density in the `z` chart, `density_v |v|²`.
    pub fn density_z(&self, z: Complex64) -> f64 {
        let v = (Complex64::i() * z).exp();
        self.density_v(v) * v.norm_sqr()
    }

    /// Density in the uniformizer `w` near a branch point:
    /// `density_v |dv/dw|² = density_v · 4|w²| / |d(w²)/dv|²`.
    pub fn density_uniformizer(&self, v: Complex64) -> f64 {
        let dp = self.w_squared_derivative(v);
        self.density_v(v) * 4.0 * self.w_squared_at(v).norm() / dp.norm_sqr()
    }

    /// Special points of the compact surface in table order.
    pub fn special_points(&self) -> Vec<SpecialPoint> {
        let n = self.n();
        let r_hi = self.a.powf(1.0 / n as f64);
        let r_lo = 1.0 / r_hi;
        let (r_min, r_max) = (r_hi.min(r_lo), r_hi.max(r_lo));
        let ring = if n == 1 { f64::INFINITY } else { 2.0 * (std::f64::consts::PI / n as f64).sin() };
        let family_scale = |r: f64| (r_hi - r_lo).abs().min(r).min(r * ring);
        let (zero_kind, inf_kind, mult) = if self.is_even() {
            (PointKind::Branch, PointKind::Branch, 1)
        } else {
            (PointKind::Regular, PointKind::Regular, 2)
        };
        vec![
            SpecialPoint {
                label: if self.is_even() { "(0,0)".into() } else { "(0,+-sqrt(a))".into() },
                location: Location::Finite(Complex64::new(0.0, 0.0)),
                kind: zero_kind,
                multiplicity: mult,
                scale: r_min,
            },
            SpecialPoint {
                label: "(a^(1/(k+1)),0)".into(),
                location: Location::Finite(Complex64::new(r_hi, 0.0)),
                kind: PointKind::Branch,
                multiplicity: n,
                scale: family_scale(r_hi),
            },
            SpecialPoint {
                label: "(a^(-1/(k+1)),0)".into(),
                location: Location::Finite(Complex64::new(r_lo, 0.0)),
                kind: PointKind::Branch,
                multiplicity: n,
                scale: family_scale(r_lo),
            },
            SpecialPoint {
                label: "(inf,inf)".into(),
                location: Location::Infinity,
                kind: inf_kind,
                multiplicity: mult,
                scale: 1.0 / r_max,
            },
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointKind {
    Regular,
    /// Ramification index 2.
    Branch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Finite(Complex64),
    Infinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoint {
    pub label: String,
    pub location: Location,
    pub kind: PointKind,
    /// Number of points of the surface this row stands for.
    pub multiplicity: u32,
    /// Distance to the nearest other special point in the local chart
    /// (`v − v0`, or `1/v` at infinity).
    pub scale: f64,
}

impl SpecialPoint {
    /// `v(τ)` and `|dv/dτ|` for the local coordinate `τ`.
    pub fn chart(&self, tau: Complex64) -> (Complex64, f64) {
        match (self.location, self.kind) {
            (Location::Finite(v0), PointKind::Regular) => (v0 + tau, 1.0),
            (Location::Finite(v0), PointKind::Branch) => (v0 + tau * tau, 2.0 * tau.norm()),
            (Location::Infinity, PointKind::Regular) => (tau.inv(), 1.0 / tau.norm_sqr()),
            (Location::Infinity, PointKind::Branch) => ((tau * tau).inv(), 2.0 / tau.norm().powi(3)),
        }
    }

    /// Starting radius for the dyadic fit.
    pub fn initial_radius(&self) -> f64 {
        match self.kind {
            PointKind::Regular => RADIUS_FRACTION * self.scale,
            PointKind::Branch => RADIUS_FRACTION * self.scale.sqrt(),
        }
    }
}

/// Slopes of the circle-averaged `ln|F|` between dyadic radii.
///
/// `ln_abs(τ)` returns `ln|F(τ)|`. By Jensen's formula the circle mean is
/// exactly `ln|c| + m ln r` for `F = c τ^m (1 + ...)` inside the disc.
pub fn fit_slopes<F>(ln_abs: F, r0: f64) -> Vec<f64>
where
    F: Fn(Complex64) -> f64,
{
    let means: Vec<f64> = (0..FIT_LEVELS)
        .map(|j| {
            let r = r0 * 0.5f64.powi(j as i32);
            let sum: f64 = (0..FIT_ANGLES)
                .map(|q| {
                    // Offset the angles so no sample sits on the real axis.
                    let th = TAU * (q as f64 + 0.5) / FIT_ANGLES as f64;
                    ln_abs(Complex64::from_polar(r, th))
                })
                .sum();
            sum / FIT_ANGLES as f64
        })
        .collect();
    means.windows(2).map(|w| (w[0] - w[1]) / LN_2).collect()
}

/// Integer order of `F` at `τ = 0`.
pub fn fit_order<F>(ln_abs: F, r0: f64) -> Result<i32>
where
    F: Fn(Complex64) -> f64,
{
    let slopes = fit_slopes(ln_abs, r0);
    let last = slopes[slopes.len() - 1];
    let prev = slopes[slopes.len() - 2];
    let rounded = last.round();
    if !last.is_finite() || (last - prev).abs() > SLOPE_AGREEMENT || (last - rounded).abs() > INTEGRALITY_TOL {
        return Err(Error::NonConvergent { slopes });
    }
    Ok(rounded as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    G,
    Eta,
}

/// Order of `g` or `η` at `point` in its local coordinate.
pub fn order_estimate(model: &VModel, quantity: Quantity, point: &SpecialPoint) -> Result<i32> {
    let f = |tau: Complex64| {
        let (v, jac) = point.chart(tau);
        match quantity {
            Quantity::G => model.ln_abs_g(v),
            Quantity::Eta => model.ln_abs_eta(v) + jac.ln(),
        }
    };
    fit_order(f, point.initial_radius())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderRow {
    pub point: String,
    pub g_order: i32,
    pub eta_order: Option<i32>,
    /// Set when the entry has no printed counterpart to compare against.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderTable {
    pub k: u32,
    pub lambda: f64,
    pub rows: Vec<OrderRow>,
}

impl OrderTable {
    pub fn row(&self, label: &str) -> Option<&OrderRow> {
        self.rows.iter().find(|r| r.point == label)
    }
}

pub fn order_table(model: &VModel, strategy: Strategy) -> Result<OrderTable> {
    let points = model.special_points();
    let rows = try_map_indexed(strategy, points.len(), |i| {
        let p = &points[i];
        let g_order = order_estimate(model, Quantity::G, p)?;
        let eta_order = order_estimate(model, Quantity::Eta, p)?;
        // The odd-k table leaves η at infinity blank.
        let flagged = !model.is_even() && p.location == Location::Infinity;
        Ok(OrderRow {
            point: p.label.clone(),
            g_order,
            eta_order: Some(eta_order),
            flagged,
        })
    })?;
    Ok(OrderTable {
        k: model.k,
        lambda: model.lambda,
        rows,
    })
}

/// Degrees of the divisors of `g` and `η` from the table, weighted by how many
/// surface points each row stands for. Expected `(0, 2·genus − 2)`.
pub fn divisor_degrees(model: &VModel, table: &OrderTable) -> (i64, i64) {
    let points = model.special_points();
    let mut dg = 0i64;
    let mut de = 0i64;
    for (p, r) in points.iter().zip(&table.rows) {
        dg += p.multiplicity as i64 * r.g_order as i64;
        de += p.multiplicity as i64 * r.eta_order.unwrap_or(0) as i64;
    }
    (dg, de)
}

/// `|Im z|` at which the strip around the geodesic meets the degeneration
/// points: `ln(max(a, 1/a)) / (k+1)`.
pub fn strip_halfwidth(k: u32, lambda: f64) -> Result<f64> {
    let a = EpitrochoidParams::new(k, lambda)?.a();
    Ok(a.max(1.0 / a).ln() / (k as f64 + 1.0))
}

/// All roots of `v^{k+1} = a` followed by all roots of `v^{k+1} = 1/a`.
pub fn degeneracy_points(model: &VModel) -> Vec<Complex64> {
    let n = model.n();
    let mut out = Vec::with_capacity(2 * n as usize);
    for target in [model.a, 1.0 / model.a] {
        let r = target.powf(1.0 / n as f64);
        for j in 0..n {
            let mut v = Complex64::from_polar(r, TAU * j as f64 / n as f64);
            for _ in 0..3 {
                let vn1 = v.powu(n - 1);
                let step = (vn1 * v - target) / (n as f64 * vn1);
                v -= step;
            }
            out.push(v);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub k: u32,
    pub lambda: f64,
    pub genus: u32,
    pub punctures: Vec<String>,
    pub points: Vec<Complex64>,
    /// Metric density in the local uniformizer at each point.
    pub densities: Vec<f64>,
    /// Fitted vanishing exponent of the density at each point.
    pub exponents: Vec<f64>,
    pub vanishing_order: i32,
    /// Shortest intrinsic length of the vertical segments from the geodesic
    /// to the degeneration points through `t = 0`.
    pub intrinsic_distance: f64,
    /// Same length at a tighter quadrature tolerance.
    pub intrinsic_distance_refined: f64,
}

impl DegeneracyReport {
    pub fn max_density(&self) -> f64 {
        self.densities.iter().cloned().fold(0.0, f64::max)
    }

    pub fn exponent_spread(&self) -> f64 {
        self.exponents
            .iter()
            .map(|e| (e - self.vanishing_order as f64).abs())
            .fold(0.0, f64::max)
    }

    pub fn distance_stability(&self) -> f64 {
        (self.intrinsic_distance - self.intrinsic_distance_refined).abs()
    }
}

/// Fitted exponent of the density at the branch point over `v0`.
fn vanishing_exponent(model: &VModel, v0: Complex64) -> f64 {
    let point = SpecialPoint {
        label: String::new(),
        location: Location::Finite(v0),
        kind: PointKind::Branch,
        multiplicity: 1,
        scale: model.special_points()[1].scale.min(model.special_points()[2].scale),
    };
    let f = |tau: Complex64| {
        let (v, jac) = point.chart(tau);
        model.density_v(v).ln() + 2.0 * jac.ln()
    };
    let slopes = fit_slopes(f, point.initial_radius());
    slopes[slopes.len() - 1]
}

/// `∫ √density_z(t0 + is) ds` from `s = 0` to `s = s_end`.
pub fn intrinsic_distance(model: &VModel, t0: f64, s_end: f64, tol: f64) -> Result<f64> {
    let f = |s: f64| model.density_z(Complex64::new(t0, s)).sqrt();
    let opts = QuadOptions {
        tol,
        ..QuadOptions::default()
    };
    Ok(integrate_real(f, 0.0, s_end, opts)?.abs())
}

pub fn obstruction_report(model: &VModel, strategy: Strategy) -> Result<DegeneracyReport> {
    let points = degeneracy_points(model);
    let densities: Vec<f64> = points.iter().map(|&v| model.density_uniformizer(v)).collect();
    let exponents = try_map_indexed(strategy, points.len(), |i| Ok::<_, Error>(vanishing_exponent(model, points[i])))?;
    let vanishing_order = exponents.iter().map(|e| e.round() as i32).max().unwrap_or(0);
    let s0 = model.a.ln() / model.n() as f64;
    let distance = |tol: f64| -> Result<f64> {
        // v = e^{iz} has |v| = e^{-s}: s = -ln(a)/n reaches v^n = a, s = +ln(a)/n
        // reaches v^n = 1/a.
        let up = intrinsic_distance(model, 0.0, s0, tol)?;
        let down = intrinsic_distance(model, 0.0, -s0, tol)?;
        Ok(up.min(down))
    };
    Ok(DegeneracyReport {
        k: model.k,
        lambda: model.lambda,
        genus: model.genus,
        punctures: model.punctures.clone(),
        points,
        densities,
        exponents,
        vanishing_order,
        intrinsic_distance: distance(1e-10)?,
        intrinsic_distance_refined: distance(1e-13)?,
    })
}
