use serde_json::Value;

use laurent_sieve_web::{convergents, l_roots, witnesses};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn convergents_are_good_approximations() {
    let v = parse(convergents("7", "golden", 10));
    let rows = v["convergents"].as_array().unwrap();
    assert!(!rows.is_empty());
    for r in rows {
        let d = r["deg_f"].as_i64().unwrap();
        assert!(r["quality_exponent"].as_i64().map_or(true, |k| k <= -2 * d));
    }
}

#[test]
fn l_roots_lie_on_the_critical_circle() {
    let v = parse(l_roots("7", "T^2+1"));
    let sq = v["sqrt_q"].as_f64().unwrap();
    let chars = v["characters"].as_array().unwrap();
    assert_eq!(chars.len() as u64, v["group_order"].as_u64().unwrap() - 1);
    for c in chars {
        assert_eq!(c["rh"], true);
        for m in c["moduli"].as_array().unwrap() {
            let m = m.as_f64().unwrap();
            assert!((m - sq).abs() < 1e-6 || (m - 1.0).abs() < 1e-6);
        }
    }
}

#[test]
fn witnesses_found_for_golden() {
    let v = parse(witnesses("7", "golden", 6, 0.1));
    assert!(v["count"].as_u64().unwrap() > 0);
}

#[test]
fn errors_are_json() {
    assert!(parse(l_roots("6", "T")).get("error").is_some());
    assert!(parse(witnesses("7", "golden", 40, 0.1)).get("error").is_some());
    assert!(parse(convergents("7", "nonsense", 5)).get("error").is_some());
}
