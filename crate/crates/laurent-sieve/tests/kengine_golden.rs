use laurent_sieve::ffcore::Field;
use laurent_sieve::kengine::{asymptotic_report, choose_params_k, witness_primes};
use laurent_sieve::laurent::LaurentSeries;
use laurent_sieve::polyring::PolyRing;

#[test]
fn golden_three_way_agreement() {
    let ring = PolyRing::new(Field::new(7, 1).unwrap());
    let alpha = LaurentSeries::parse_spec(&ring, "golden").unwrap();
    for c in alpha.continued_fraction(5).unwrap().iter().filter(|c| c.f.deg() >= Some(3)) {
        let params = choose_params_k(&ring, &c.f, &c.a, 0.1).unwrap();
        let t = std::time::Instant::now();
        let rep = asymptotic_report(&alpha, &params).unwrap();
        assert!(t.elapsed().as_secs() < 60);
        assert!(rep.chars_agree && rep.congruence_le_metric && rep.implication_holds);
        assert!(rep.s_congruence > 0);
        let ratio = rep.ratio_congruence_main;
        assert!((1.0 / 49.0..=49.0).contains(&ratio));
        // Box density against q^-M: loose by about q, up to the relative error 2^deg f / (q-1)^deg f.
        let d = c.f.deg().unwrap() as i32;
        let slack = 7.0 * (1.0 + 2f64.powi(d) / 6f64.powi(d));
        assert!(rep.ratio_main_paper >= 1.0 && rep.ratio_main_paper <= slack, "{}", rep.ratio_main_paper);
    }
}

#[test]
fn golden_witnesses_each_degree() {
    let ring = PolyRing::new(Field::new(7, 1).unwrap());
    let alpha = LaurentSeries::parse_spec(&ring, "golden").unwrap();
    let w = witness_primes(&alpha, 4..=8, 0.1).unwrap();
    for n in 4..=8 {
        assert!(w.iter().any(|x| x.n == n), "no witness for N = {n}");
    }
}
