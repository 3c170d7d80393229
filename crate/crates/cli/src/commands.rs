use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use bjorling_core::bjorling::{phi, GridSpec};
use bjorling_core::curves::CurveSpec;
use bjorling_core::epitrochoid::{
    divisor_degrees, obstruction_report, order_table, strip_halfwidth, v_model, OrderTable, VModel,
};
use bjorling_core::exec::Strategy;
use bjorling_core::meshio::{clip_halfspace, export_csv, export_obj, export_ply, SurfaceMesh};
use bjorling_core::verify::verify_curve;
use bjorling_core::weierstrass::period_residual;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const MAX_MEAN_CURVATURE: f64 = 1e-3;
pub const ORDER_TARGET: f64 = 2.0;
pub const ORDER_TOL: f64 = 0.3;
pub const MAX_GEODESIC: f64 = 1e-4;
pub const MAX_CONFORMALITY: f64 = 1e-6;
pub const MAX_NULL: f64 = 1e-12;
pub const MAX_SYMMETRY: f64 = 1e-11;
pub const MAX_DEGENERATE_DENSITY: f64 = 1e-10;
pub const EXPONENT_TOL: f64 = 0.05;
pub const DISTANCE_STABILITY: f64 = 1e-6;

fn strategy(cfg: &RunConfig) -> Strategy {
    if cfg.sequential {
        Strategy::Sequential
    } else {
        Strategy::Parallel
    }
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, v) in m {
                flatten(&key(k), v, out);
            }
        }
        Value::Array(a) => {
            for (i, v) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write `value` as `<stem>.json` or as a `key,value` table `<stem>.csv`.
fn write_report<T: Serialize>(cfg: &RunConfig, stem: &str, value: &T) -> Result<(), CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    let (path, text) = match cfg.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::Invalid(e.to_string()))?;
            s.push('\n');
            (cfg.out.join(format!("{stem}.json")), s)
        }
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &v, &mut rows);
            let mut s = String::from("key,value\n");
            for (k, val) in rows {
                s.push_str(&format!("{},{}\n", csv_field(&k), csv_field(&val)));
            }
            (cfg.out.join(format!("{stem}.csv")), s)
        }
    };
    fs::write(&path, text).map_err(|e| CliError::Io(path, e))
}

fn mesh_summary(mesh: &SurfaceMesh) -> Value {
    json!({
        "vertices": mesh.vertices.len(),
        "faces": mesh.faces.len(),
        "area": mesh.area(),
    })
}

fn write_mesh(cfg: &RunConfig, stem: &str, mesh: &SurfaceMesh) -> Result<(), CliError> {
    export_obj(mesh, cfg.out.join(format!("{stem}.obj")))?;
    export_ply(mesh, cfg.out.join(format!("{stem}.ply")))?;
    if cfg.format == Format::Csv {
        export_csv(mesh, cfg.out.join(format!("{stem}.csv")))?;
    }
    Ok(())
}

pub fn generate(cfg: &RunConfig) -> Result<(), CliError> {
    let curve = cfg.curve.build()?;
    let triple = phi(&curve)?;
    let grid = GridSpec::strip(&triple, cfg.nt, cfg.ns, cfg.s_fraction)?;
    let mesh = bjorling_core::meshio::sample_mesh(&curve, grid, strategy(cfg))?;
    ensure_dir(&cfg.out)?;
    write_mesh(cfg, "mesh", &mesh)?;
    let half = if cfg.half_cut {
        let h = clip_halfspace(&mesh, [0.0, 0.0, 1.0], 0.0);
        write_mesh(cfg, "mesh_half", &h)?;
        Some(mesh_summary(&h))
    } else {
        None
    };
    let period = if curve.closed { Some(period_residual(&curve)?) } else { None };
    let summary = json!({
        "config": cfg,
        "grid": grid,
        "strip_halfwidth": grid.s_range.1,
        "regularity_margin": curve.regularity_margin(1024),
        "period_residual": period,
        "mesh": mesh_summary(&mesh),
        "half_cut": half,
    });
    write_report(cfg, "summary", &summary)?;
    println!(
        "wrote {} vertices, {} faces to {} (strip half-width {:.6})",
        mesh.vertices.len(),
        mesh.faces.len(),
        cfg.out.display(),
        grid.s_range.1
    );
    Ok(())
}

fn check(failures: &mut Vec<String>, name: &str, value: f64, ok: bool) {
    let status = if ok { "ok" } else { "FAIL" };
    println!("{name:<24} {value:.3e}  {status}");
    if !ok {
        failures.push(format!("{name} = {value:e}"));
    }
}

fn finish(failures: Vec<String>) -> Result<(), CliError> {
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Threshold(failures.join(", ")))
    }
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let curve = cfg.curve.build()?;
    let triple = phi(&curve)?;
    let grid = GridSpec::strip(&triple, cfg.nt, cfg.ns, cfg.s_fraction)?;
    let report = verify_curve(&curve, grid, strategy(cfg))?;
    ensure_dir(&cfg.out)?;
    write_report(cfg, "verify", &json!({ "config": cfg, "report": report }))?;
    let mut failures = Vec::new();
    check(&mut failures, "max_mean_curvature", report.max_mean_curvature, report.max_mean_curvature < MAX_MEAN_CURVATURE);
    check(
        &mut failures,
        "convergence_order",
        report.convergence_order,
        (report.convergence_order - ORDER_TARGET).abs() <= ORDER_TOL,
    );
    check(&mut failures, "geodesic_residual", report.geodesic_residual, report.geodesic_residual < MAX_GEODESIC);
    check(
        &mut failures,
        "conformality_residual",
        report.conformality_residual,
        report.conformality_residual < MAX_CONFORMALITY,
    );
    check(&mut failures, "null_residual", report.null_residual, report.null_residual < MAX_NULL);
    if let Some(s) = report.symmetry_residual {
        check(&mut failures, "symmetry_residual", s, s < MAX_SYMMETRY);
    }
    finish(failures)
}

fn epitrochoid_model(cfg: &RunConfig) -> Result<VModel, CliError> {
    match cfg.curve {
        CurveSpec::Epitrochoid { k, lambda } => Ok(v_model(k, lambda)?),
        _ => Err(CliError::Invalid("this command needs an epitrochoid curve".into())),
    }
}

pub fn analyze(cfg: &RunConfig) -> Result<(), CliError> {
    let model = epitrochoid_model(cfg)?;
    let report = obstruction_report(&model, strategy(cfg))?;
    let table = order_table(&model, strategy(cfg))?;
    let halfwidth = strip_halfwidth(model.k, model.lambda)?;
    ensure_dir(&cfg.out)?;
    write_report(
        cfg,
        "analysis",
        &json!({
            "config": cfg,
            "model": model,
            "strip_halfwidth": halfwidth,
            "report": report,
            "table": table,
        }),
    )?;
    let n = model.n() as f64;
    let radii = [model.a.powf(1.0 / n), model.a.powf(-1.0 / n)];
    println!(
        "genus {}, {} degeneracy points on |v| = {:.6} and {:.6}",
        model.genus,
        report.points.len(),
        radii[0],
        radii[1]
    );
    let mut failures = Vec::new();
    check(&mut failures, "max_density", report.max_density(), report.max_density() < MAX_DEGENERATE_DENSITY);
    let exp_ok = report.vanishing_order == 2 && report.exponent_spread() <= EXPONENT_TOL;
    check(&mut failures, "vanishing_exponent_spread", report.exponent_spread(), exp_ok);
    println!("{:<24} {}", "vanishing_order", report.vanishing_order);
    let dist_ok = report.intrinsic_distance.is_finite() && report.intrinsic_distance > 0.0;
    check(&mut failures, "intrinsic_distance", report.intrinsic_distance, dist_ok);
    check(
        &mut failures,
        "distance_stability",
        report.distance_stability(),
        report.distance_stability() < DISTANCE_STABILITY,
    );
    finish(failures)
}

/// Entries printed in the published tables, in parametric form.
/// `None` marks a blank cell.
pub fn printed_orders(k: u32) -> [(i32, Option<i32>); 4] {
    let k = k as i32;
    if k % 2 == 0 {
        [(k + 3, Some(-(2 * k + 5))), (-1, Some(3)), (1, Some(1)), (-(k + 3), Some(1))]
    } else {
        let h = (k + 3) / 2;
        [(h, Some(-(k + 3))), (-1, Some(3)), (1, Some(1)), (-h, None)]
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableCheck {
    pub asserted: usize,
    pub passed: usize,
    pub flagged: usize,
}

pub fn compare_table(table: &OrderTable) -> TableCheck {
    let mut c = TableCheck {
        asserted: 0,
        passed: 0,
        flagged: 0,
    };
    for (row, (g, eta)) in table.rows.iter().zip(printed_orders(table.k)) {
        c.asserted += 1;
        c.passed += (row.g_order == g) as usize;
        match eta {
            Some(e) => {
                c.asserted += 1;
                c.passed += (row.eta_order == Some(e)) as usize;
            }
            None => c.flagged += 1,
        }
    }
    c
}

fn show(order: Option<i32>) -> String {
    match order {
        Some(o) => format!("{o:+}"),
        None => "-".into(),
    }
}

pub fn table(cfg: &RunConfig) -> Result<(), CliError> {
    let model = epitrochoid_model(cfg)?;
    let table = order_table(&model, strategy(cfg))?;
    let check = compare_table(&table);
    let (dg, de) = divisor_degrees(&model, &table);
    println!("{:<20} {:>6} {:>8} {:>6} {:>8}", "point", "g", "printed", "eta", "printed");
    for (row, (g, eta)) in table.rows.iter().zip(printed_orders(model.k)) {
        let note = if row.flagged { "  (informational)" } else { "" };
        println!(
            "{:<20} {:>6} {:>8} {:>6} {:>8}{note}",
            row.point,
            show(Some(row.g_order)),
            show(Some(g)),
            show(row.eta_order),
            show(eta)
        );
    }
    println!("deg(g) = {dg}, deg(eta) = {de}, 2*genus - 2 = {}", 2 * model.genus as i64 - 2);
    let status = if check.passed == check.asserted { "PASS" } else { "FAIL" };
    println!(
        "{status}: {}/{} asserted entries, {} flagged",
        check.passed, check.asserted, check.flagged
    );
    ensure_dir(&cfg.out)?;
    write_report(
        cfg,
        "table",
        &json!({ "table": table, "check": check, "status": status, "divisor_degrees": [dg, de] }),
    )?;
    if status == "FAIL" {
        return Err(CliError::Threshold(format!(
            "{} of {} table entries differ",
            check.asserted - check.passed,
            check.asserted
        )));
    }
    Ok(())
}
