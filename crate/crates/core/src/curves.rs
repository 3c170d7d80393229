//! Real-analytic planar curves as finite trigonometric + monomial series.
//!
//! Every curve is an entire function of its parameter, so the same series is
//! evaluated at real `t` and at complex `z = t + is`. Derivatives are exact
//! term-by-term; nothing in the engine differences a curve numerically.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `cos(m t)` or `sin(m t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Harmonic {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    pub frequency: i32,
    pub harmonic: Harmonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub coefficient: f64,
    pub power: u32,
}

/// One coordinate function: `sum A cos/sin(m t) + sum c t^p`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub trig: Vec<TrigTerm>,
    pub poly: Vec<PolyTerm>,
}

impl Series {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cos(mut self, amplitude: f64, frequency: i32) -> Self {
        self.trig.push(TrigTerm {
            amplitude,
            frequency,
            harmonic: Harmonic::Cos,
        });
        self
    }

    pub fn sin(mut self, amplitude: f64, frequency: i32) -> Self {
        self.trig.push(TrigTerm {
            amplitude,
            frequency,
            harmonic: Harmonic::Sin,
        });
        self
    }

    pub fn mono(mut self, coefficient: f64, power: u32) -> Self {
        self.poly.push(PolyTerm { coefficient, power });
        self
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.trig {
            let arg = z * term.frequency as f64;
            acc += term.amplitude
                * match term.harmonic {
                    Harmonic::Cos => arg.cos(),
                    Harmonic::Sin => arg.sin(),
                };
        }
        for term in &self.poly {
            acc += term.coefficient * z.powu(term.power);
        }
        acc
    }

    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for term in &self.trig {
            let arg = t * term.frequency as f64;
            acc += term.amplitude
                * match term.harmonic {
                    Harmonic::Cos => arg.cos(),
                    Harmonic::Sin => arg.sin(),
                };
        }
        for term in &self.poly {
            acc += term.coefficient * t.powi(term.power as i32);
        }
        acc
    }

    /// Exact derivative. Zero terms are dropped.
    pub fn derivative(&self) -> Series {
        let mut out = Series::new();
        for term in &self.trig {
            let m = term.frequency as f64;
            if term.frequency == 0 || term.amplitude == 0.0 {
                continue;
            }
            out = match term.harmonic {
                Harmonic::Cos => out.sin(-m * term.amplitude, term.frequency),
                Harmonic::Sin => out.cos(m * term.amplitude, term.frequency),
            };
        }
        for term in &self.poly {
            if term.power == 0 || term.coefficient == 0.0 {
                continue;
            }
            out = out.mono(term.coefficient * term.power as f64, term.power - 1);
        }
        out
    }
}

/// Single-wrapped epitrochoid parameters after scaling `r_c = 1`,
/// `r_m = 1/(k+1)` and a final homothety by `k+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpitrochoidParams {
    pub k: u32,
    pub lambda: f64,
}

impl EpitrochoidParams {
    pub fn new(k: u32, lambda: f64) -> Result<Self> {
        let p = EpitrochoidParams { k, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::InvalidParameter(format!("k must be >= 1, got {}", self.k)));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            )));
        }
        if (self.a() - 1.0).abs() < 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "lambda*(k+1) = {} equals 1: the epitrochoid has cusps and is not regular",
                self.a()
            )));
        }
        Ok(())
    }

    /// `a = lambda (k+1)`, the ratio that controls every degeneration radius.
    pub fn a(&self) -> f64 {
        self.lambda * (self.k as f64 + 1.0)
    }

    /// Rotation angle of the dihedral symmetry, `2 pi / (k+1)`.
    pub fn symmetry_angle(&self) -> f64 {
        TAU / (self.k as f64 + 1.0)
    }

    /// Map rolling-circle data `(r_c, r_m, lambda)` onto the canonical
    /// parameters. Requires `r_c / r_m` to be an integer `k + 1 >= 2`.
    pub fn from_rolling_circles(r_fixed: f64, r_rolling: f64, lambda: f64) -> Result<Self> {
        if !(r_fixed > 0.0 && r_rolling > 0.0) {
            return Err(Error::InvalidParameter("radii must be positive".into()));
        }
        let ratio = r_fixed / r_rolling;
        let n = ratio.round();
        if (ratio - n).abs() > 1e-9 || n < 2.0 {
            return Err(Error::InvalidParameter(format!(
                "r_c / r_m = {ratio} is not an integer >= 2 (curve is not single-wrapped)"
            )));
        }
        EpitrochoidParams::new(n as u32 - 1, lambda / r_fixed)
    }
}

/// What family a curve belongs to; lets downstream code use closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CurveKind {
    Epitrochoid(EpitrochoidParams),
    Circle,
    Cycloid { delta: f64 },
    Parabola { half_width: f64 },
    Custom,
}

pub const DEFAULT_CYCLOID_DELTA: f64 = 0.1;
pub const DEFAULT_PARABOLA_HALF_WIDTH: f64 = 1.0;

/// A planar curve `(x(t), y(t), 0)` with its first two derivatives cached.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarCurve {
    position: [Series; 2],
    velocity: [Series; 2],
    acceleration: [Series; 2],
    pub domain: (f64, f64),
    pub closed: bool,
    pub kind: CurveKind,
}

impl PlanarCurve {
    pub fn from_series(x: Series, y: Series, domain: (f64, f64), closed: bool, kind: CurveKind) -> Self {
        let velocity = [x.derivative(), y.derivative()];
        let acceleration = [velocity[0].derivative(), velocity[1].derivative()];
        PlanarCurve {
            position: [x, y],
            velocity,
            acceleration,
            domain,
            closed,
            kind,
        }
    }

    pub fn series(&self) -> &[Series; 2] {
        &self.position
    }

    /// Holomorphic extension `(x(z), y(z))`.
    pub fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.position[0].eval(z), self.position[1].eval(z))
    }

    pub fn eval_real(&self, t: f64) -> [f64; 2] {
        [self.position[0].eval_real(t), self.position[1].eval_real(t)]
    }

    pub fn velocity(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.velocity[0].eval(z), self.velocity[1].eval(z))
    }

    pub fn velocity_real(&self, t: f64) -> [f64; 2] {
        [self.velocity[0].eval_real(t), self.velocity[1].eval_real(t)]
    }

    pub fn acceleration(&self, z: Complex64) -> (Complex64, Complex64) {
        (self.acceleration[0].eval(z), self.acceleration[1].eval(z))
    }

    pub fn acceleration_real(&self, t: f64) -> [f64; 2] {
        [self.acceleration[0].eval_real(t), self.acceleration[1].eval_real(t)]
    }

    /// The derivative curve `(x'(t), y'(t))` on the same domain.
    pub fn differentiate(&self) -> PlanarCurve {
        PlanarCurve::from_series(
            self.velocity[0].clone(),
            self.velocity[1].clone(),
            self.domain,
            self.closed,
            CurveKind::Custom,
        )
    }

    /// Uniform samples of the domain: `n` points on `[t0, t1)` when closed,
    /// `n` points on `[t0, t1]` otherwise.
    pub fn sample_parameters(&self, n: usize) -> Vec<f64> {
        let (t0, t1) = self.domain;
        if n == 1 {
            return vec![t0];
        }
        let denom = if self.closed { n as f64 } else { (n - 1) as f64 };
        (0..n).map(|j| t0 + (t1 - t0) * j as f64 / denom).collect()
    }

    /// `min x'(t)^2 + y'(t)^2` over `n_samples` uniform samples.
    pub fn regularity_margin(&self, n_samples: usize) -> f64 {
        let n = n_samples.max(16);
        self.sample_parameters(n)
            .into_iter()
            .map(|t| {
                let [dx, dy] = self.velocity_real(t);
                dx * dx + dy * dy
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn epitrochoid_params(&self) -> Option<EpitrochoidParams> {
        match self.kind {
            CurveKind::Epitrochoid(p) => Some(p),
            _ => None,
        }
    }
}

/// `x = (k+2) cos t - (k+1) lambda cos((k+2) t)`,
/// `y = (k+2) sin t - (k+1) lambda sin((k+2) t)` on `[0, 2 pi]`.
pub fn make_epitrochoid(params: EpitrochoidParams) -> Result<PlanarCurve> {
    params.validate()?;
    Ok(epitrochoid_unchecked(params))
}

pub(crate) fn epitrochoid_unchecked(params: EpitrochoidParams) -> PlanarCurve {
    let k = params.k as i32;
    let big = (k + 2) as f64;
    let small = (k + 1) as f64 * params.lambda;
    let x = Series::new().cos(big, 1).cos(-small, k + 2);
    let y = Series::new().sin(big, 1).sin(-small, k + 2);
    PlanarCurve::from_series(x, y, (0.0, TAU), true, CurveKind::Epitrochoid(params))
}

/// Epitrochoid from fixed/rolling radii, rescaled to the canonical form.
pub fn make_epitrochoid_from_radii(r_fixed: f64, r_rolling: f64, lambda: f64) -> Result<PlanarCurve> {
    make_epitrochoid(EpitrochoidParams::from_rolling_circles(r_fixed, r_rolling, lambda)?)
}

pub fn make_circle() -> PlanarCurve {
    PlanarCurve::from_series(
        Series::new().cos(1.0, 1),
        Series::new().sin(1.0, 1),
        (0.0, TAU),
        true,
        CurveKind::Circle,
    )
}

/// `(t - sin t, 1 - cos t)` on `(delta, 2 pi - delta)`, away from the cusps.
pub fn make_cycloid(delta: f64) -> Result<PlanarCurve> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::InvalidParameter(format!(
            "cycloid delta must lie in (0, pi), got {delta}: the cusp at t = 0 is not regular"
        )));
    }
    Ok(PlanarCurve::from_series(
        Series::new().mono(1.0, 1).sin(-1.0, 1),
        Series::new().mono(1.0, 0).cos(-1.0, 1),
        (delta, TAU - delta),
        false,
        CurveKind::Cycloid { delta },
    ))
}

/// `(t, t^2)` on `[-half_width, half_width]`.
pub fn make_parabola(half_width: f64) -> Result<PlanarCurve> {
    if !(half_width > 0.0 && half_width.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "parabola half width must be positive, got {half_width}"
        )));
    }
    Ok(PlanarCurve::from_series(
        Series::new().mono(1.0, 1),
        Series::new().mono(1.0, 2),
        (-half_width, half_width),
        false,
        CurveKind::Parabola { half_width },
    ))
}

/// Curve selection as it appears in JSON/TOML configs, e.g.
/// `{"type": "epitrochoid", "k": 2, "lambda": 0.5}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CurveSpec {
    Epitrochoid {
        k: u32,
        lambda: f64,
    },
    Circle,
    Cycloid {
        #[serde(default = "default_delta")]
        delta: f64,
    },
    Parabola {
        #[serde(default = "default_half_width")]
        half_width: f64,
    },
}

fn default_delta() -> f64 {
    DEFAULT_CYCLOID_DELTA
}

fn default_half_width() -> f64 {
    DEFAULT_PARABOLA_HALF_WIDTH
}

impl CurveSpec {
    pub fn build(&self) -> Result<PlanarCurve> {
        match *self {
            CurveSpec::Epitrochoid { k, lambda } => make_epitrochoid(EpitrochoidParams::new(k, lambda)?),
            CurveSpec::Circle => Ok(make_circle()),
            CurveSpec::Cycloid { delta } => make_cycloid(delta),
            CurveSpec::Parabola { half_width } => make_parabola(half_width),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
