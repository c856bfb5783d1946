//! Three library operations exported to the browser. Each takes plain strings and numbers
//! and returns a JSON document; failures come back as `{"error": "..."}` so the page never
//! has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use laurent_sieve::chars::unit_group_structure;
use laurent_sieve::ffcore::Field;
use laurent_sieve::kengine::witness_primes;
use laurent_sieve::laurent::LaurentSeries;
use laurent_sieve::lfunc::{inverse_roots, l_polynomials};
use laurent_sieve::polyring::PolyRing;

/// Keeps a click in the page from freezing the tab.
const MAX_CF_DEG: usize = 60;
const MAX_MODULUS_DEG: usize = 3;
const MAX_WITNESS_N: usize = 8;

fn ring(q: &str) -> Result<PolyRing, String> {
    Ok(PolyRing::new(Field::parse(q).map_err(|e| e.to_string())?))
}

fn finish(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

pub fn convergents_value(q: &str, alpha: &str, max_deg: usize) -> Result<Value, String> {
    if max_deg > MAX_CF_DEG {
        return Err(format!("max degree is capped at {MAX_CF_DEG} in the browser"));
    }
    let ring = ring(q)?;
    let x = LaurentSeries::parse_spec(&ring, alpha).map_err(|e| e.to_string())?;
    let conv = x.continued_fraction(max_deg).map_err(|e| e.to_string())?;
    let rows: Vec<Value> = conv
        .iter()
        .map(|c| {
            json!({
                "index": c.index,
                "a": ring.fmt(&c.a),
                "f": ring.fmt(&c.f),
                "deg_f": c.f.deg_i64(),
                "quality_exponent": c.quality.0,
            })
        })
        .collect();
    Ok(json!({ "alpha": alpha, "convergents": rows }))
}

pub fn l_roots_value(q: &str, modulus: &str) -> Result<Value, String> {
    let ring = ring(q)?;
    let f = ring.parse(modulus).map_err(|e| e.to_string())?;
    if f.deg().unwrap_or(0) > MAX_MODULUS_DEG {
        return Err(format!("modulus degree is capped at {MAX_MODULUS_DEG} in the browser"));
    }
    let group = unit_group_structure(&ring, &f).map_err(|e| e.to_string())?;
    let mut chars = Vec::new();
    for l in l_polynomials(&group).map_err(|e| e.to_string())? {
        if l.principal {
            continue;
        }
        let (roots, rh) = inverse_roots(&l, ring.q()).map_err(|e| e.to_string())?;
        chars.push(json!({
            "index": l.char_index,
            "degree": l.degree,
            "roots": roots.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            "moduli": rh.moduli,
            "rh": rh.pass,
        }));
    }
    Ok(json!({ "modulus": ring.fmt(&f), "group_order": group.order(), "sqrt_q": (ring.q() as f64).sqrt(), "characters": chars }))
}

pub fn witnesses_value(q: &str, alpha: &str, n: usize, eps: f64) -> Result<Value, String> {
    if n == 0 || n > MAX_WITNESS_N {
        return Err(format!("N must lie in 1..={MAX_WITNESS_N} in the browser"));
    }
    let ring = ring(q)?;
    let x = LaurentSeries::parse_spec(&ring, alpha).map_err(|e| e.to_string())?;
    let w = witness_primes(&x, n..=n, eps).map_err(|e| e.to_string())?;
    Ok(json!({ "n": n, "eps": eps, "count": w.len(), "witnesses": w.iter().take(50).collect::<Vec<_>>() }))
}

/// Convergents `a/f` of `alpha` with their quality exponents.
#[wasm_bindgen]
pub fn convergents(q: &str, alpha: &str, max_deg: usize) -> String {
    finish(convergents_value(q, alpha, max_deg))
}

/// Inverse roots of every nonprincipal L-function modulo `modulus`.
#[wasm_bindgen]
pub fn l_roots(q: &str, modulus: &str) -> String {
    finish(l_roots_value(q, modulus))
}

/// Monic irreducibles of degree `n` close to the lattice, first 50 shown.
#[wasm_bindgen]
pub fn witnesses(q: &str, alpha: &str, n: usize, eps: f64) -> String {
    finish(witnesses_value(q, alpha, n, eps))
}
