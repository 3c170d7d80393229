//! Differential-geometry checks on sampled patches.
//!
//! Mean curvature and the geodesic test work from patch points alone, using
//! central differences, so they check the integrator rather than repeat it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bjorling::{cross, dot, exact_tangents, norm, null_residual, phi, surface_patch_of, GridSpec, HolomorphicTriple, SurfacePatch};
use crate::curves::{CurveKind, PlanarCurve};
use crate::error::{Error, Result};
use crate::exec::{max_f64, try_map_indexed, Strategy};

/// Smallest `EG − F²` accepted at an interior vertex.
pub const MIN_METRIC_DET: f64 = 1e-14;

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: [f64; 3], c: f64) -> [f64; 3] {
    a.map(|v| v * c)
}

/// First and second derivatives of the patch at an interior vertex.
struct LocalJet {
    ft: [f64; 3],
    fs: [f64; 3],
    ftt: [f64; 3],
    fts: [f64; 3],
    fss: [f64; 3],
}

fn jet(patch: &SurfacePatch, it: usize, is: usize) -> LocalJet {
    let ht = patch.grid.h_t();
    let hs = patch.grid.h_s();
    let c = patch.at(it, is);
    let e = patch.at(it + 1, is);
    let w = patch.at(it - 1, is);
    let n = patch.at(it, is + 1);
    let s = patch.at(it, is - 1);
    let ne = patch.at(it + 1, is + 1);
    let nw = patch.at(it - 1, is + 1);
    let se = patch.at(it + 1, is - 1);
    let sw = patch.at(it - 1, is - 1);
    let mut ftt = [0.0; 3];
    let mut fss = [0.0; 3];
    let mut fts = [0.0; 3];
    for k in 0..3 {
        ftt[k] = (e[k] - 2.0 * c[k] + w[k]) / (ht * ht);
        fss[k] = (n[k] - 2.0 * c[k] + s[k]) / (hs * hs);
        fts[k] = (ne[k] - nw[k] - se[k] + sw[k]) / (4.0 * ht * hs);
    }
    LocalJet {
        ft: scale(sub(e, w), 0.5 / ht),
        fs: scale(sub(n, s), 0.5 / hs),
        ftt,
        fts,
        fss,
    }
}

/// `|H|` at one interior vertex.
pub fn mean_curvature_at(patch: &SurfacePatch, it: usize, is: usize) -> Result<f64> {
    let j = jet(patch, it, is);
    let e = dot(j.ft, j.ft);
    let f = dot(j.ft, j.fs);
    let g = dot(j.fs, j.fs);
    let det = e * g - f * f;
    if !(det >= MIN_METRIC_DET) {
        return Err(Error::DegenerateMetric { i: it, j: is, det });
    }
    let nrm = cross(j.ft, j.fs);
    let nu = scale(nrm, 1.0 / norm(nrm));
    let l = dot(j.ftt, nu);
    let m = dot(j.fts, nu);
    let n = dot(j.fss, nu);
    Ok(((e * n - 2.0 * f * m + g * l) / (2.0 * det)).abs())
}

/// `max |H|` over interior vertices.
pub fn mean_curvature_residual(patch: &SurfacePatch, strategy: Strategy) -> Result<f64> {
    let nt = patch.grid.nt;
    let ns = patch.grid.ns;
    if nt < 3 || ns < 3 {
        return Err(Error::InvalidParameter("mean curvature needs at least 3 x 3 samples".into()));
    }
    let rows = try_map_indexed(strategy, ns - 2, |r| {
        let is = r + 1;
        let mut worst = 0.0f64;
        for it in 1..nt - 1 {
            worst = worst.max(mean_curvature_at(patch, it, is)?);
        }
        Ok::<_, Error>(worst)
    })?;
    Ok(max_f64(rows))
}

/// Geodesic curvature of the `s = 0` row, `|c''·(ν × T)| / |c'|²`, with `ν`
/// from central differences of the patch. Zero when the curve is a geodesic.
pub fn geodesic_residual(curve: &PlanarCurve, patch: &SurfacePatch) -> Result<f64> {
    let row = patch
        .geodesic_row()
        .ok_or_else(|| Error::InvalidParameter("patch has no s = 0 row".into()))?;
    if row == 0 || row + 1 >= patch.grid.ns {
        return Err(Error::InvalidParameter("s = 0 row must be interior".into()));
    }
    let mut worst = 0.0f64;
    for it in 1..patch.grid.nt - 1 {
        let t = patch.t[it];
        let j = jet(patch, it, row);
        let nrm = cross(j.ft, j.fs);
        let nu = scale(nrm, 1.0 / norm(nrm));
        let [dx, dy] = curve.velocity_real(t);
        let [ax, ay] = curve.acceleration_real(t);
        let speed2 = dx * dx + dy * dy;
        let tangent = scale([dx, dy, 0.0], 1.0 / speed2.sqrt());
        let conormal = cross(nu, tangent);
        worst = worst.max(dot([ax, ay, 0.0], conormal).abs() / speed2);
    }
    Ok(worst)
}

/// Rotation of `(φ1, φ2)` by `theta` about the `x3`-axis.
fn rotate(p: [Complex64; 3], theta: f64) -> [Complex64; 3] {
    let (s, c) = theta.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]]
}

/// `max |Φ(z + θ) − R_θ Φ(z)|` over the grid nodes, with `θ = 2π/(k+1)` for
/// epitrochoids and `π/3` for the circle. `None` for curves without a
/// rotational symmetry.
pub fn symmetry_residual(triple: &HolomorphicTriple, grid: &GridSpec) -> Result<Option<f64>> {
    let theta = match triple.curve().kind {
        CurveKind::Epitrochoid(p) => p.symmetry_angle(),
        CurveKind::Circle => std::f64::consts::FRAC_PI_3,
        _ => return Ok(None),
    };
    let mut worst = 0.0f64;
    for &s in &grid.s_values() {
        for &t in &grid.t_values() {
            let z = Complex64::new(t, s);
            let a = triple.eval(z + theta)?;
            let b = rotate(triple.eval(z)?, theta);
            let d = ((a[0] - b[0]).norm_sqr() + (a[1] - b[1]).norm_sqr() + (a[2] - b[2]).norm_sqr()).sqrt();
            worst = worst.max(d);
        }
    }
    Ok(Some(worst))
}

/// `max(|E − G|/E, |F|/E)` and `max |φ1² + φ2² + φ3²|` over the grid nodes.
pub fn conformality_residual(triple: &HolomorphicTriple, grid: &GridSpec) -> Result<(f64, f64)> {
    let mut conf = 0.0f64;
    let mut null = 0.0f64;
    for &s in &grid.s_values() {
        for &t in &grid.t_values() {
            let z = Complex64::new(t, s);
            let p = triple.eval(z)?;
            null = null.max(null_residual(&p));
            let (ft, fs) = exact_tangents(triple, z)?;
            let e = dot(ft, ft);
            let f = dot(ft, fs);
            let g = dot(fs, fs);
            conf = conf.max(((e - g).abs() / e).max(f.abs() / e));
        }
    }
    Ok((conf, null))
}

/// Mean-curvature residual on a grid and on the grid with halved spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub h_t: f64,
    pub coarse: f64,
    pub fine: f64,
    /// `log2(coarse / fine)`.
    pub order: f64,
}

pub fn convergence_study(triple: &HolomorphicTriple, grid: GridSpec, strategy: Strategy) -> Result<ConvergenceStudy> {
    let coarse = mean_curvature_residual(&surface_patch_of(triple, grid, strategy)?, strategy)?;
    let fine = mean_curvature_residual(&surface_patch_of(triple, grid.refined(), strategy)?, strategy)?;
    Ok(ConvergenceStudy {
        h_t: grid.h_t(),
        coarse,
        fine,
        order: (coarse / fine).log2(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid: GridSpec,
    pub max_mean_curvature: f64,
    pub mean_curvature_refined: f64,
    pub convergence_order: f64,
    pub geodesic_residual: f64,
    pub conformality_residual: f64,
    pub null_residual: f64,
    pub symmetry_residual: Option<f64>,
}

pub fn verify_curve(curve: &PlanarCurve, grid: GridSpec, strategy: Strategy) -> Result<VerificationReport> {
    let triple = phi(curve)?;
    let patch = surface_patch_of(&triple, grid, strategy)?;
    let study = convergence_study(&triple, grid, strategy)?;
    let (conformality, null) = conformality_residual(&triple, &grid)?;
    Ok(VerificationReport {
        grid,
        max_mean_curvature: study.coarse,
        mean_curvature_refined: study.fine,
        convergence_order: study.order,
        geodesic_residual: geodesic_residual(curve, &patch)?,
        conformality_residual: conformality,
        null_residual: null,
        symmetry_residual: symmetry_residual(&triple, &grid)?,
    })
}
