//! Weierstrass data `(g, η)` of the Björling surface, metric density,
//! Gauss-map consistency and the period of the closed geodesic loop.
//!
//! Convention: `Φ = (½(1 − g²)η, (i/2)(1 + g²)η, gη)`, so `η = φ1 − iφ2` and
//! `g = φ3 / (φ1 − iφ2)`. The conformal factor is `E = ¼(1 + |g|²)²|η/dz|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bjorling::{difference_tangents, exact_tangents, phi, unit_normal, HolomorphicTriple};
use crate::continuation::PathPolyline;
use crate::curves::PlanarCurve;
use crate::error::{Error, Result};

/// Threshold on `|φ1 − iφ2|` below which `g` is reported as a pole.
pub const POLE_THRESHOLD: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `z = t + is` around the real geodesic parameter.
    ZStrip,
    /// `v = e^{iz}` on the algebraic model.
    VPlane,
}

/// `g` and the coefficient of `η = eta · d(chart)` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassValue {
    pub g: Complex64,
    pub eta: Complex64,
}

impl WeierstrassValue {
    /// `Φ` rebuilt from `(g, η)`.
    pub fn phi(&self) -> [Complex64; 3] {
        let g2 = self.g * self.g;
        let i = Complex64::i();
        [
            0.5 * (1.0 - g2) * self.eta,
            0.5 * i * (1.0 + g2) * self.eta,
            self.g * self.eta,
        ]
    }

    /// `¼(1 + |g|²)²|η|²`.
    pub fn density(&self) -> f64 {
        let s = 1.0 + self.g.norm_sqr();
        0.25 * s * s * self.eta.norm_sqr()
    }
}

/// Evaluable Weierstrass data on some chart.
pub trait WeierstrassData {
    fn chart(&self) -> Chart;
    fn eval(&self, point: Complex64) -> Result<WeierstrassValue>;
}

/// Data built straight from the curve:
/// `g = i sqrt((x' + iy')/(x' − iy'))`, `η = (x' − iy') dz`.
///
/// The square root of the ratio is continued on its own (seeded at the real
/// axis so that `g η = i |c'|` there), independently of `Φ`'s square root.
#[derive(Debug, Clone)]
pub struct CurveData {
    triple: HolomorphicTriple,
}

pub fn data_from_curve(curve: &PlanarCurve) -> Result<CurveData> {
    Ok(CurveData { triple: phi(curve)? })
}

impl CurveData {
    pub fn triple(&self) -> &HolomorphicTriple {
        &self.triple
    }

    fn ratio(&self, z: Complex64) -> Complex64 {
        let (dx, dy) = self.triple.curve().velocity(z);
        let i = Complex64::i();
        (dx + i * dy) / (dx - i * dy)
    }
}

impl WeierstrassData for CurveData {
    fn chart(&self) -> Chart {
        Chart::ZStrip
    }

    fn eval(&self, z: Complex64) -> Result<WeierstrassValue> {
        let curve = self.triple.curve();
        let i = Complex64::i();
        let [dx, dy] = curve.velocity_real(z.re);
        let speed = (dx * dx + dy * dy).sqrt();
        // sqrt of e^{2iθ} chosen as e^{iθ} = (x' + iy')/|c'|.
        let seed = Complex64::new(dx / speed, dy / speed);
        let base = Complex64::new(z.re, 0.0);
        let f = |w: Complex64| self.ratio(w);
        let root = self.triple.continue_on_leg(&f, base, seed, z)?;
        let (vx, vy) = curve.velocity(z);
        Ok(WeierstrassValue {
            g: i * root,
            eta: vx - i * vy,
        })
    }
}

/// Data read off `Φ`: `g = φ3 / (φ1 − iφ2)`, `η = φ1 − iφ2`.
#[derive(Debug, Clone)]
pub struct PhiData {
    triple: HolomorphicTriple,
}

pub fn data_from_phi(triple: &HolomorphicTriple) -> PhiData {
    PhiData { triple: triple.clone() }
}

impl WeierstrassData for PhiData {
    fn chart(&self) -> Chart {
        Chart::ZStrip
    }

    fn eval(&self, z: Complex64) -> Result<WeierstrassValue> {
        let p = self.triple.eval(z)?;
        let eta = p[0] - Complex64::i() * p[1];
        if eta.norm() < POLE_THRESHOLD {
            return Err(Error::DivisionNearZero { at: z, value: eta });
        }
        Ok(WeierstrassValue { g: p[2] / eta, eta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSample {
    pub point: Complex64,
    pub density: f64,
}

/// Conformal factor `¼(1 + |g|²)²|η|²` at `point`.
pub fn metric_density(data: &dyn WeierstrassData, point: Complex64) -> Result<MetricSample> {
    let v = data.eval(point)?;
    Ok(MetricSample {
        point,
        density: v.density(),
    })
}

/// Stereographic projection from the north pole, `(n1 + i n2)/(1 − n3)`.
pub fn stereographic(n: [f64; 3]) -> Complex64 {
    Complex64::new(n[0], n[1]) / (1.0 - n[2])
}

/// How the surface normal is obtained for [`gauss_map_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormalEstimate {
    /// From `f_t = Re Φ`, `f_s = −Im Φ`.
    Exact,
    /// Central differences of surface points with step `h`.
    Difference(f64),
}

/// `max |σ(ν(t)) − g(t)|` over `t_samples`.
pub fn gauss_map_check(curve: &PlanarCurve, t_samples: &[f64], normal: NormalEstimate) -> Result<f64> {
    let data = data_from_curve(curve)?;
    let triple = data.triple();
    let mut worst = 0.0f64;
    for &t in t_samples {
        let z = Complex64::new(t, 0.0);
        let (ft, fs) = match normal {
            NormalEstimate::Exact => exact_tangents(triple, z)?,
            NormalEstimate::Difference(h) => difference_tangents(triple, z, h)?,
        };
        let nu = unit_normal(ft, fs);
        let g = data.eval(z)?.g;
        worst = worst.max((stereographic(nu) - g).norm());
    }
    Ok(worst)
}

/// `Re ∮ Φ` once around a closed curve along the real axis.
pub fn period_residual(curve: &PlanarCurve) -> Result<[f64; 3]> {
    if !curve.closed {
        return Err(Error::InvalidParameter("period residual needs a closed curve".into()));
    }
    let triple = phi(curve)?;
    let (t0, t1) = curve.domain;
    let a = Complex64::new(t0, 0.0);
    let b = Complex64::new(t1, 0.0);
    let path = PathPolyline::segment(a, b)?;
    crate::bjorling::schwarz_integrate(&triple, a, b, &path)
}
