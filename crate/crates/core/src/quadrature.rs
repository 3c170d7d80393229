//! Adaptive Gauss–Kronrod (G7/K15) quadrature along straight complex segments.
//!
//! The integrand is vector valued (`[Complex64; N]`) so the three components of
//! a null curve are integrated on a shared node set.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod abscissae on [0, 1]; odd indices are the embedded Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_TOL: f64 = 1e-11;
pub const DEFAULT_MAX_DEPTH: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute tolerance for the whole segment.
    pub tol: f64,
    pub max_depth: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            tol: DEFAULT_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// One K15 panel; returns (kronrod estimate, |kronrod - gauss| summed over components).
fn kronrod_panel<const N: usize, F>(f: &F, a: Complex64, b: Complex64) -> ([Complex64; N], f64)
where
    F: Fn(Complex64) -> [Complex64; N],
{
    let center = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let mut kron = [Complex64::new(0.0, 0.0); N];
    let mut gauss = [Complex64::new(0.0, 0.0); N];

    let fc = f(center);
    for c in 0..N {
        kron[c] = fc[c] * WGK[7];
        gauss[c] = fc[c] * WG[3];
    }
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let f1 = f(center - half * x);
        let f2 = f(center + half * x);
        for c in 0..N {
            let s = f1[c] + f2[c];
            kron[c] += s * wk;
            if j % 2 == 1 {
                gauss[c] += s * WG[j / 2];
            }
        }
    }
    let mut err = 0.0;
    for c in 0..N {
        kron[c] *= half;
        gauss[c] *= half;
        err += (kron[c] - gauss[c]).norm();
    }
    (kron, err)
}

/// Integrate `f(w) dw` along the straight segment `a -> b`.
///
/// Bisects recursively until each panel's Kronrod/Gauss gap is below its
/// share of `opts.tol` (or at the rounding floor of the panel value).
pub fn integrate_segment<const N: usize, F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    opts: QuadOptions,
) -> Result<[Complex64; N]>
where
    F: Fn(Complex64) -> [Complex64; N],
{
    let mut total = [Complex64::new(0.0, 0.0); N];
    if a == b {
        return Ok(total);
    }
    let (est, err) = kronrod_panel(f, a, b);
    recurse(f, a, b, est, err, opts.tol, 0, opts, &mut total)?;
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn recurse<const N: usize, F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    est: [Complex64; N],
    err: f64,
    tol: f64,
    depth: usize,
    opts: QuadOptions,
    total: &mut [Complex64; N],
) -> Result<()>
where
    F: Fn(Complex64) -> [Complex64; N],
{
    let magnitude: f64 = est.iter().map(|v| v.norm()).sum();
    let floor = 64.0 * f64::EPSILON * magnitude;
    if err <= tol.max(floor) {
        for c in 0..N {
            total[c] += est[c];
        }
        return Ok(());
    }
    if depth >= opts.max_depth {
        return Err(Error::QuadratureFailure {
            a,
            b,
            tol: opts.tol,
            depth: opts.max_depth,
        });
    }
    let mid = (a + b) * 0.5;
    let (left, el) = kronrod_panel(f, a, mid);
    let (right, er) = kronrod_panel(f, mid, b);
    recurse(f, a, mid, left, el, tol * 0.5, depth + 1, opts, total)?;
    recurse(f, mid, b, right, er, tol * 0.5, depth + 1, opts, total)
}

/// Real-line convenience wrapper: integrate `f(x) dx` over `[a, b]`.
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let g = |z: Complex64| [Complex64::new(f(z.re), 0.0)];
    let [v] = integrate_segment(&g, Complex64::new(a, 0.0), Complex64::new(b, 0.0), opts)?;
    Ok(v.re)
}
