use std::sync::Arc;

use laurent_sieve::classray::*;
use laurent_sieve::ffcore::Field;
use laurent_sieve::polyring::PolyRing;
use laurent_sieve::quadext::{QuadField, QuadIdeal};

fn field(q: u64, d: &str) -> QuadField {
    let r = PolyRing::new(Field::new(q, 1).unwrap());
    QuadField::new(&r, &r.parse(d).unwrap()).unwrap()
}

fn ray(k: &QuadField, m: &str) -> Arc<RayClassGroup> {
    let cg = Arc::new(class_group(k).unwrap());
    let f = k.principal_poly(&k.ring().parse(m).unwrap());
    Arc::new(RayClassGroup::new(&cg, &f).unwrap())
}

#[test]
fn ray_class_number_relation() {
    for (q, d, m) in [(7, "T", "T^2+1"), (7, "T^3+T+1", "T-2"), (5, "T^3+T+1", "T^2+2"), (7, "3*T^2+1", "T-1"), (3, "T^5+2*T+1", "T+1")] {
        let k = field(q, d);
        let g = ray(&k, m);
        let h = g.classes().h() as u64;
        assert_eq!(g.order(), h * g.phi / g.unit_image_size(), "{d} mod {m}");
        assert_eq!(g.g_size_enumerated, Some(g.phi / g.unit_image_size()));
        assert_eq!(g.characters().count() as u64, g.order());
        assert_eq!(k.units().len() as u64 % g.unit_image_size(), 0);
        assert_eq!(g.phi % g.unit_image_size(), 0);
    }
}

#[test]
fn unit_modulus_gives_class_group() {
    let k = field(7, "T^3+T+1");
    let cg = Arc::new(class_group(&k).unwrap());
    let g = RayClassGroup::new(&cg, &QuadIdeal::unit()).unwrap();
    assert_eq!(g.order(), cg.h() as u64);
    let orders: u64 = cg.orders().iter().product();
    assert_eq!(orders, cg.h() as u64);
}

#[test]
fn orthogonality_up_to_norm_four() {
    for (q, d, m) in [(7, "T", "T^2+1"), (5, "T^3+T+1", "T-2"), (7, "3*T^2+1", "T-1")] {
        let k = field(q, d);
        let rep = ray_orthogonality(&ray(&k, m), 4).unwrap();
        assert!(rep.pass, "{d} mod {m}: {rep:?}");
    }
}

#[test]
fn hecke_prime_sums_obey_bounds() {
    let k = field(7, "T^3+T+1");
    let g = ray(&k, "T-2");
    let omega = g.modulus_primes().len() as f64;
    let genus = k.genus() as f64;
    let log_nf = g.modulus_norm_deg() as f64;
    for n in 1..=4 {
        let qn = 7f64.powi(n as i32);
        let nn = n as f64;
        let (hist, dividing) = g.prime_histogram(n).unwrap();
        let all = prime_ideals_of_norm(&k, n).unwrap().len() as u64;
        assert_eq!(hist.iter().sum::<u64>() + dividing, all);
        for chi in g.characters() {
            let s = hecke_prime_sum(&chi, n).unwrap().to_complex();
            if chi.is_principal() {
                assert!((s.re - hist.iter().sum::<u64>() as f64).abs() < 1e-9);
                assert!((s.re - qn / nn).abs() <= (genus + 3.0) * qn.sqrt() / nn + omega);
            } else {
                assert!(s.norm() <= omega + (genus + log_nf + 3.0) * qn.sqrt() / nn, "n = {n}, |sum| = {}", s.norm());
            }
        }
    }
}

/// Ideal counts from enumeration against `sum_n a_n(psi_0) u^n = G_eff(u) / (1 - q u)`.
#[test]
fn principal_coefficients_follow_zeta() {
    for (q, d) in [(3, "T^3+2*T+1"), (3, "2*T^2+1"), (3, "T^5+2*T+1"), (5, "T")] {
        let k = field(q, d);
        let z = zeta_numerator(&k).unwrap();
        assert!(z.symmetric);
        let max_n = if q == 3 { 6 } else { 5 };
        let mut counts = vec![0i128; max_n + 1];
        for i in k.enumerate_ideals(max_n) {
            counts[i.norm_deg()] += 1;
        }
        let g_eff = z.effective_g();
        for n in 0..=max_n {
            assert_eq!(counts[n], z.ideal_count(n), "D = {d}, n = {n}");
            if n + 1 >= g_eff.len() {
                // a_n(psi_0) = q^n G_eff(1/q) once n reaches deg G_eff.
                let val: f64 = g_eff.iter().enumerate().map(|(i, &c)| c as f64 * (q as f64).powi(n as i32 - i as i32)).sum();
                assert!((val - counts[n] as f64).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn class_character_coefficients_vanish_past_2g() {
    for (q, d) in [(3, "T^3+2*T+1"), (3, "T^5+2*T+1"), (7, "T^3+T+1")] {
        let k = field(q, d);
        let cg = Arc::new(class_group(&k).unwrap());
        let g = Arc::new(RayClassGroup::new(&cg, &QuadIdeal::unit()).unwrap());
        let top = 2 * k.genus() + if q == 3 { 3 } else { 1 };
        let hists = g.ideal_histograms(top).unwrap();
        let mut nonprincipal = 0;
        for chi in g.characters().filter(|c| !c.is_principal()) {
            nonprincipal += 1;
            let a = ideal_char_coefficients(&chi, &hists);
            for (n, an) in a.iter().enumerate().skip(2 * k.genus() + 1) {
                assert!(an.to_complex().norm() < 1e-9, "D = {d}, n = {n}");
            }
        }
        assert!(nonprincipal > 0, "D = {d} has trivial class group");
    }
}

#[test]
fn element_counts_in_boxes() {
    let k = field(7, "T");
    let cg = class_group(&k).unwrap();
    let z = zeta_numerator(&k).unwrap();
    let c = ideal_count_box(&cg, &z, &QuadIdeal::unit(), 4).unwrap();
    assert_eq!(c.count, 7u64.pow(5) - 1);
    assert!((c.printed_prediction - 4.0 / 3.0 * 7f64.powi(4)).abs() < 1e-9);
    let dvr = k.principal_poly(&k.ring().parse("T^2+1").unwrap());
    assert_eq!(ideal_count_box(&cg, &z, &dvr, 3).unwrap().count, 0);
    let c2 = ideal_count_box(&cg, &z, &QuadIdeal::unit(), 3).unwrap();
    assert!((c.prediction / c2.prediction - 7.0).abs() < 1e-12);
    let c1 = ideal_count_box(&cg, &z, &QuadIdeal::unit(), 2).unwrap();
    assert!((c.prediction / c1.prediction - 49.0).abs() < 1e-12);
    for u in 4..=6 {
        let c = ideal_count_box(&cg, &z, &dvr, u).unwrap();
        assert!(c.deviation.abs() <= IDEAL_COUNT_BAND, "U = {u}: {c:?}");
    }
    let e = field(7, "T^3+T+1");
    let ce = class_group(&e).unwrap();
    let ze = zeta_numerator(&e).unwrap();
    for u in 2..=5 {
        let c = ideal_count_box(&ce, &ze, &QuadIdeal::unit(), u).unwrap();
        assert!(c.deviation.abs() <= IDEAL_COUNT_BAND, "U = {u}: {c:?}");
    }
}

#[test]
fn class_number_and_divisor_class_number() {
    for (q, d) in [(7, "T^3+T+1"), (3, "T^5+2*T+1"), (7, "3*T^2+1"), (3, "2*T^4+T+1")] {
        let k = field(q, d);
        let z = zeta_numerator(&k).unwrap();
        let h = class_group(&k).unwrap().h() as i64;
        let deg_inf = match z.infinity {
            Infinity::Ramified => 1,
            Infinity::Inert => 2,
        };
        assert_eq!(h, z.h_k * deg_inf, "D = {d}");
    }
}
