use bjorling_core::epitrochoid::{divisor_degrees, order_table, v_model, OrderTable};
use bjorling_core::exec::Strategy;

fn golden(k: u32) -> OrderTable {
    let text = match k {
        1 => include_str!("../goldens/order_table_k1.json"),
        2 => include_str!("../goldens/order_table_k2.json"),
        3 => include_str!("../goldens/order_table_k3.json"),
        4 => include_str!("../goldens/order_table_k4.json"),
        _ => unreachable!(),
    };
    serde_json::from_str(text).unwrap()
}

/// Printed tables in parametric form: `(g, η)` per column, `None` where the
/// table has no entry.
fn printed(k: i32) -> [(i32, Option<i32>); 4] {
    if k % 2 == 0 {
        [(k + 3, Some(-(2 * k + 5))), (-1, Some(3)), (1, Some(1)), (-(k + 3), Some(1))]
    } else {
        let h = (k + 3) / 2;
        [(h, Some(-(k + 3))), (-1, Some(3)), (1, Some(1)), (-h, None)]
    }
}

#[test]
fn goldens_reproduce() {
    for k in 1..=4 {
        let g = golden(k);
        let m = v_model(k, g.lambda).unwrap();
        let t = order_table(&m, Strategy::Parallel).unwrap();
        assert_eq!(t, g, "k = {k}");
    }
}

#[test]
fn printed_entries_for_many_k() {
    for k in 1..=9u32 {
        for lambda in [0.13, 0.4, 1.7] {
            if (lambda * (k as f64 + 1.0) - 1.0).abs() < 1e-3 {
                continue;
            }
            let m = v_model(k, lambda).unwrap();
            let t = order_table(&m, Strategy::Sequential).unwrap();
            for (row, (g, eta)) in t.rows.iter().zip(printed(k as i32)) {
                assert_eq!(row.g_order, g, "k={k} λ={lambda} {}", row.point);
                match eta {
                    Some(e) => {
                        assert_eq!(row.eta_order, Some(e), "k={k} λ={lambda} {}", row.point);
                        assert!(!row.flagged);
                    }
                    None => assert!(row.flagged),
                }
            }
            let (dg, de) = divisor_degrees(&m, &t);
            assert_eq!((dg, de), (0, 2 * m.genus as i64 - 2));
        }
    }
}

#[test]
fn golden_json_field_names() {
    let v: serde_json::Value = serde_json::from_str(include_str!("../goldens/order_table_k2.json")).unwrap();
    let row = &v["rows"][0];
    for key in ["point", "g_order", "eta_order", "flagged"] {
        assert!(row.get(key).is_some(), "{key}");
    }
}
