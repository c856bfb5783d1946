//! The fourteen acceptance criteria as named, budgeted checks.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use laurent_sieve::chars::unit_group_structure;
use laurent_sieve::classray::{class_group, zeta_numerator};
use laurent_sieve::ffcore::Field;
use laurent_sieve::laurent::LaurentSeries;
use laurent_sieve::lfunc::PrimeHistograms;
use laurent_sieve::polyring::{Poly, PolyRing};
use laurent_sieve::quadext::{QuadField, QuadIdeal, QuadLaurent};

use crate::checks::{self, all, err, CheckResult};
use crate::report::Check;

/// Settings shared by every criterion.
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
}

pub struct Criterion {
    pub id: usize,
    pub slug: &'static str,
    pub budget_secs: u64,
    pub run: fn(&SuiteOptions) -> CheckResult,
}

impl Criterion {
    pub fn name(&self) -> String {
        format!("c{:02}-{}", self.id, self.slug)
    }
}

pub const CRITERIA: &[Criterion] = &[
    Criterion { id: 1, slug: "cf-quality", budget_secs: 5, run: c01_cf_quality },
    Criterion { id: 2, slug: "orthogonality", budget_secs: 30, run: c02_orthogonality },
    Criterion { id: 3, slug: "rh", budget_secs: 30, run: c03_rh },
    Criterion { id: 4, slug: "newton", budget_secs: 60, run: c04_newton },
    Criterion { id: 5, slug: "weil", budget_secs: 60, run: c05_weil },
    Criterion { id: 6, slug: "k-three-way", budget_secs: 60, run: c06_k_three_way },
    Criterion { id: 7, slug: "k-witnesses", budget_secs: 120, run: c07_witnesses },
    Criterion { id: 8, slug: "quad-arithmetic", budget_secs: 60, run: c08_quad_arithmetic },
    Criterion { id: 9, slug: "kummer-dedekind", budget_secs: 30, run: c09_kummer_dedekind },
    Criterion { id: 10, slug: "zeta-counting", budget_secs: 120, run: c10_zeta },
    Criterion { id: 11, slug: "ray-class", budget_secs: 60, run: c11_ray_class },
    Criterion { id: 12, slug: "claim", budget_secs: 60, run: c12_claim },
    Criterion { id: 13, slug: "quad-witnesses", budget_secs: 120, run: c13_quad_witnesses },
    Criterion { id: 14, slug: "adelic", budget_secs: 60, run: c14_adelic },
];

/// Independent stream per tag: selecting or reordering criteria never shifts another's draws.
pub fn rng_for(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn ring7() -> PolyRing {
    PolyRing::new(Field::new(7, 1).expect("GF(7)"))
}

fn quad(ring: &PolyRing, d: &str) -> Result<QuadField, String> {
    QuadField::new(ring, &ring.parse(d).map_err(err)?).map_err(err)
}

/// Monic moduli of degree `lo..=hi`.
fn moduli(ring: &PolyRing, lo: usize, hi: usize) -> Vec<Poly> {
    (lo..=hi).flat_map(|d| ring.monic_polys(d)).collect()
}

fn par_all<T: Sync>(items: &[T], name: impl Fn(&T) -> String + Sync, f: impl Fn(&T) -> CheckResult + Sync) -> CheckResult {
    let parts: Result<Vec<(String, Check)>, String> = items.par_iter().map(|x| Ok((name(x), f(x)?))).collect();
    Ok(all(parts?))
}

fn c01_cf_quality(o: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let mut rng = rng_for(o.seed, "cf-quality");
    let mut specs = vec!["golden".to_string(), "lacunary".to_string()];
    specs.extend((0..100).map(|_| format!("seed:{}", rng.next_u64())));
    par_all(&specs, |s| s.clone(), |s| checks::cf_quality(&LaurentSeries::parse_spec(&ring, s).map_err(err)?, 40))
}

fn c02_orthogonality(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    par_all(&moduli(&ring, 0, 3), |f| ring.fmt(f), |f| Ok(checks::orthogonality(&unit_group_structure(&ring, f).map_err(err)?)))
}

fn c03_rh(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    par_all(&moduli(&ring, 1, 3), |f| ring.fmt(f), |f| checks::rh(&unit_group_structure(&ring, f).map_err(err)?))
}

fn c04_newton(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    par_all(&moduli(&ring, 1, 2), |f| ring.fmt(f), |f| {
        let g = unit_group_structure(&ring, f).map_err(err)?;
        let h = PrimeHistograms::new(&g, 8).map_err(err)?;
        checks::newton(&g, &h, 8)
    })
}

fn c05_weil(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    // Warm the shared irreducible lists before fanning out.
    for n in 1..=8 {
        ring.irreducibles(n).map_err(err)?;
    }
    par_all(&moduli(&ring, 1, 3), |f| ring.fmt(f), |f| {
        let g = unit_group_structure(&ring, f).map_err(err)?;
        let h = PrimeHistograms::new(&g, 8).map_err(err)?;
        Ok(checks::weil(&g, &h, 8))
    })
}

fn c06_k_three_way(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let alpha = LaurentSeries::parse_spec(&ring, "golden").map_err(err)?;
    let conv: Vec<_> = alpha.continued_fraction(5).map_err(err)?.into_iter().filter(|c| c.f.deg() >= Some(3)).collect();
    let mut parts = Vec::new();
    for c in &conv {
        parts.push((format!("deg-f={}", c.f.deg_i64()), checks::k_three_way(&alpha, c, 0.1)?));
    }
    let degs: Vec<i64> = conv.iter().map(|c| c.f.deg_i64()).collect();
    parts.push(("degrees".into(), Check::eq(degs, vec![3, 4, 5])));
    Ok(all(parts))
}

fn c07_witnesses(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let alpha = LaurentSeries::parse_spec(&ring, "golden").map_err(err)?;
    let (parts, rows) = checks::k_witnesses(&alpha, 4..=8, 0.1)?;
    Ok(with_witness_count(all(parts), rows.len()))
}

fn with_witness_count(mut c: Check, n: usize) -> Check {
    c.detail["witnesses"] = json!(n);
    c
}

fn c08_quad_arithmetic(o: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let mut parts = Vec::new();
    for d in ["T", "T^3+T+1"] {
        let k = quad(&ring, d)?;
        let mut rng = rng_for(o.seed, &format!("quad-arithmetic/{d}"));
        parts.push((format!("{d}/units"), checks::quad_units(&k)));
        parts.push((format!("{d}/norm-multiplicative"), checks::quad_norm_mult(&k, 1000, &mut rng)));
        parts.push((format!("{d}/ideal-norm"), checks::quad_ideal_norm(&k, 500, &mut rng)));
        parts.push((format!("{d}/conj-product"), checks::quad_conj_product(&k, 4)?));
    }
    Ok(all(parts))
}

fn c09_kummer_dedekind(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let mut parts = Vec::new();
    for d in ["T", "T^3+T+1"] {
        parts.push((d.to_string(), checks::kummer_dedekind(&quad(&ring, d)?, 3)?));
    }
    Ok(all(parts))
}

fn c10_zeta(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let mut parts = Vec::new();
    let k = quad(&ring, "T")?;
    let z = zeta_numerator(&k).map_err(err)?;
    let cg = class_group(&k).map_err(err)?;
    let ck = z.printed_c_k(cg.h() as u64);
    parts.push(("T/l-k".into(), Check::eq(z.l_coeffs.clone(), vec![1])));
    parts.push(("T/h".into(), Check::eq(cg.h(), 1)));
    parts.push(("T/c-k".into(), Check::eq((*ck.numer(), *ck.denom()), (4, 3))));
    parts.push(("T/box-unit".into(), checks::box_counts(&cg, &z, &QuadIdeal::unit(), 0..=6)?));
    let ramified = k.ideal_factor(&Poly::t()).map_err(err)?.primes[0].0.clone();
    parts.push(("T/box-ramified".into(), checks::box_counts(&cg, &z, &ramified, 0..=6)?));
    let e = quad(&ring, "T^3+T+1")?;
    let ze = zeta_numerator(&e).map_err(err)?;
    let ce = class_group(&e).map_err(err)?;
    parts.push(("T^3+T+1/zeta".into(), checks::zeta_check(&ce, &ze)?));
    Ok(all(parts))
}

fn c11_ray_class(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let k = quad(&ring, "T")?;
    let cg = Arc::new(class_group(&k).map_err(err)?);
    let mut parts = Vec::new();
    for m in ["T-1", "T", "T^2+1"] {
        let f = k.principal_poly(&ring.parse(m).map_err(err)?);
        parts.push((format!("mod {m}"), checks::ray_structure(&cg, &f, 4)?));
    }
    Ok(all(parts))
}

fn c12_claim(_: &SuiteOptions) -> CheckResult {
    let mut parts = Vec::new();
    for (q, d, f, a) in [(7, "T", "T^2-3", "(T)+(1)*sqrtD"), (5, "T^3+T+1", "T^2+2", "T")] {
        let ring = PolyRing::new(Field::new(q, 1).map_err(err)?);
        let k = quad(&ring, d)?;
        let (f, a) = (k.parse_int(f).map_err(err)?, k.parse_int(a).map_err(err)?);
        parts.push((format!("q={q} D={d}"), checks::claim(&k, &f, &a, 0.05)?));
    }
    Ok(all(parts))
}

fn c13_quad_witnesses(_: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let k = quad(&ring, "T")?;
    let x = QuadLaurent::parse_spec(&ring, "lacunary").map_err(err)?;
    let cg = Arc::new(class_group(&k).map_err(err)?);
    let z = zeta_numerator(&k).map_err(err)?;
    let (parts, rows) = checks::quad_frontier(&cg, &z, &x, 4, 0.1, 1_000_000, false)?;
    Ok(with_witness_count(all(parts), rows.len()))
}

fn c14_adelic(o: &SuiteOptions) -> CheckResult {
    let ring = ring7();
    let mut rng = rng_for(o.seed, "adelic");
    checks::adelic(&ring, 100, &mut rng)
}
