use laurent_sieve::ffcore::Field;
use laurent_sieve::laurent::LaurentSeries;
use laurent_sieve::polyring::{Poly, PolyRing};
use laurent_sieve::quadext::{HalfNormDist, HalfQPower, QuadField, QuadInt, QuadLaurent};
use proptest::prelude::*;

fn fields() -> Vec<QuadField> {
    let r = PolyRing::new(Field::new(7, 1).unwrap());
    ["T", "T^3+T+1", "3*T^2+1", "T^5+2"].iter().map(|d| QuadField::new(&r, &r.parse(d).unwrap()).unwrap()).collect()
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0u64..7, 0..=max_len).prop_map(Poly::new)
}

fn elem(max_len: usize) -> impl Strategy<Value = QuadInt> {
    (poly(max_len), poly(max_len)).prop_map(|(a, b)| QuadInt::new(a, b))
}

fn nonzero(max_len: usize) -> impl Strategy<Value = QuadInt> {
    elem(max_len).prop_filter("nonzero", |x| !x.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn absolute_value_is_multiplicative(k in 0usize..4, x in elem(5), y in elem(5)) {
        let f = &fields()[k];
        prop_assert_eq!(f.abs(&f.mul(&x, &y)), f.abs(&x).mul(f.abs(&y)));
        prop_assert_eq!(f.abs(&x), f.abs_by_degrees(&x));
    }

    #[test]
    fn norm_is_multiplicative(k in 0usize..4, x in elem(4), y in elem(4)) {
        let f = &fields()[k];
        let r = f.ring();
        prop_assert_eq!(f.norm(&f.mul(&x, &y)), r.mul(&f.norm(&x), &f.norm(&y)));
    }

    #[test]
    fn ultrametric_on_a(k in 0usize..4, x in elem(5), y in elem(5)) {
        let f = &fields()[k];
        let s = f.abs(&f.add(&x, &y));
        prop_assert!(s <= f.abs(&x).max(f.abs(&y)));
    }

    #[test]
    fn ultrametric_on_completion(k in 0usize..4, n in poly(4), m in poly(4), d1 in poly(3), d2 in poly(3)) {
        let f = &fields()[k];
        let r = f.ring();
        let den1 = r.add(&r.mul(&d1, &Poly::t()), &Poly::one());
        let den2 = r.add(&r.mul(&d2, &Poly::t()), &Poly::new(vec![2]));
        let x = QuadLaurent { x: LaurentSeries::rational(r, &n, &den1).unwrap(), y: LaurentSeries::rational(r, &m, &den2).unwrap() };
        let y = QuadLaurent { x: LaurentSeries::rational(r, &m, &den2).unwrap(), y: LaurentSeries::rational(r, &n, &den1).unwrap() };
        let sum = QuadLaurent {
            x: LaurentSeries::linear(r, vec![(Poly::one(), x.x.clone()), (Poly::one(), y.x.clone())], Poly::zero()),
            y: LaurentSeries::linear(r, vec![(Poly::one(), x.y.clone()), (Poly::one(), y.y.clone())], Poly::zero()),
        };
        let depth = 40;
        if let (HalfNormDist::Exact(a), HalfNormDist::Exact(b)) = (f.kinf_norm_dist(&x, depth), f.kinf_norm_dist(&y, depth)) {
            let bound = a.max(b);
            match f.kinf_norm_dist(&sum, depth) {
                HalfNormDist::Exact(s) => prop_assert!(s <= bound),
                HalfNormDist::AtMost(m) => prop_assert!(HalfQPower::half(m) <= bound || bound.0.is_none()),
            }
        }
    }

    #[test]
    fn ideal_norm_is_multiplicative(k in 0usize..4, x in nonzero(3), y in nonzero(3), z in nonzero(3), w in nonzero(3)) {
        let f = &fields()[k];
        let i = f.ideal_from_gens(&[x, y]);
        let j = f.ideal_from_gens(&[z, w]);
        prop_assert_eq!(f.ideal_mul(&i, &j).norm_deg(), i.norm_deg() + j.norm_deg());
        prop_assert_eq!(f.ideal_norm_poly(&f.ideal_mul(&i, &j)), f.ring().monic(&f.ring().mul(&f.ideal_norm_poly(&i), &f.ideal_norm_poly(&j))));
    }

    #[test]
    fn normal_form_is_unique(k in 0usize..4, x in nonzero(4), y in nonzero(4), z in elem(4), c in 1u64..7, d in 1u64..7) {
        let f = &fields()[k];
        let a = f.ideal_from_gens(&[x.clone(), y.clone(), z.clone()]);
        let b = f.ideal_from_gens(&[f.scale(c, &z), y.clone(), f.scale(d, &x)]);
        let e = f.ideal_from_gens(&[y.clone(), f.add(&x, &y), z]);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(&a, &e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The product of the prime factors of `(g)` is `(g)`, for `|Norm g| <= q^6`.
    #[test]
    fn factorization_reconstructs(k in 0usize..4, g in nonzero(4)) {
        let f = &fields()[k];
        prop_assume!(f.abs(&g).0.unwrap() <= 6);
        let principal = f.principal(&g);
        let mut prod = laurent_sieve::quadext::QuadIdeal::unit();
        for (p, e) in f.ideal_factorization(&principal).unwrap() {
            prop_assert!(f.is_principal(&p).is_ok());
            prod = f.ideal_mul(&prod, &f.ideal_pow(&p, e));
        }
        prop_assert_eq!(prod, principal);
    }
}

#[test]
fn unit_group_is_closed() {
    for f in fields() {
        let units = f.units();
        let one = QuadInt::from_poly(Poly::one());
        for u in units {
            assert!(u.a.deg().unwrap_or(0) == 0 && u.b.is_zero(), "unit outside GF(q)");
            assert!(units.iter().any(|v| f.mul(u, v) == one));
            for v in units {
                assert!(units.contains(&f.mul(u, v)));
            }
        }
        assert_eq!(units.len(), 6);
    }
}
