//! The imaginary quadratic extension K = k(sqrt D): integers, ideals, primes, and the
//! Dirichlet search on K_inf.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::checked_pow;
use crate::ffcore::{Fe, Field};
use crate::laurent::{LaurentError, LaurentSeries};
use crate::polyring::{Poly, PolyError, PolyRing, QPower};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuadError {
    #[error("q must be odd")]
    EvenCharacteristic,
    #[error("D must be squarefree of positive degree")]
    NotSquarefree,
    #[error("D has even degree and square leading coefficient; the extension is not imaginary")]
    NotImaginary,
    #[error("ideal is not divisible by the given ideal")]
    NotDivisible,
    #[error("input polynomial is not irreducible")]
    NotIrreducible,
    #[error("search over q^{0} candidates exceeds the gate")]
    SearchTooLarge(i64),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// `q^(m/2)` stored by its half-exponent `m`; `None` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HalfQPower(pub Option<i64>);

impl HalfQPower {
    pub const ZERO: HalfQPower = HalfQPower(None);
    pub fn half(m: i64) -> HalfQPower {
        HalfQPower(Some(m))
    }
    pub fn mul(self, o: HalfQPower) -> HalfQPower {
        match (self.0, o.0) {
            (Some(a), Some(b)) => HalfQPower(Some(a + b)),
            _ => HalfQPower(None),
        }
    }
    pub fn to_f64(self, q: u64) -> f64 {
        self.0.map_or(0.0, |m| (q as f64).powf(m as f64 / 2.0))
    }
}

impl fmt::Display for HalfQPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(m) if m % 2 == 0 => write!(f, "q^{}", m / 2),
            Some(m) => write!(f, "q^({m}/2)"),
        }
    }
}

/// `a + b sqrt D`; ordered by `a`, then `b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QuadInt {
    pub a: Poly,
    pub b: Poly,
}

impl QuadInt {
    pub fn new(a: Poly, b: Poly) -> QuadInt {
        QuadInt { a, b }
    }
    pub fn from_poly(a: Poly) -> QuadInt {
        QuadInt { a, b: Poly::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

/// `s (a A + (b + sqrt D) A)` with `s, a` monic, `deg b < deg a`, `a | b^2 - D`; `s = 0` is the zero ideal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadIdeal {
    pub s: Poly,
    pub a: Poly,
    pub b: Poly,
}

impl QuadIdeal {
    pub fn unit() -> QuadIdeal {
        QuadIdeal { s: Poly::one(), a: Poly::one(), b: Poly::zero() }
    }
    pub fn zero() -> QuadIdeal {
        QuadIdeal { s: Poly::zero(), a: Poly::zero(), b: Poly::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.s.is_zero()
    }
    pub fn is_unit(&self) -> bool {
        self.s.is_one() && self.a.is_one()
    }
    /// `N(I) = |s|^2 |a|`.
    pub fn norm(&self) -> QPower {
        if self.is_zero() {
            return QPower::ZERO;
        }
        QPower::pow(2 * self.s.deg_i64() + self.a.deg_i64())
    }
    /// Degree of the norm, for nonzero ideals.
    pub fn norm_deg(&self) -> usize {
        2 * self.s.deg().unwrap_or(0) + self.a.deg().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decomposition {
    Split,
    Inert,
    Ramified,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeIdealFact {
    pub p: Poly,
    pub kind: Decomposition,
    /// Prime ideals above `p` with exponents, in normal-form order.
    pub primes: Vec<(QuadIdeal, u32)>,
    pub residue_degree: u32,
}

/// `x + y sqrt D` in K_inf.
#[derive(Debug, Clone)]
pub struct QuadLaurent {
    pub x: LaurentSeries,
    pub y: LaurentSeries,
}

impl QuadLaurent {
    /// `"spec1,spec2"`, or a single spec used for both components.
    pub fn parse_spec(ring: &PolyRing, spec: &str) -> Result<QuadLaurent, QuadError> {
        let mut depth = 0i32;
        let mut split = None;
        for (i, ch) in spec.char_indices() {
            match ch {
                '[' | '{' | '(' => depth += 1,
                ']' | '}' | ')' => depth -= 1,
                ',' if depth == 0 => {
                    split = Some(i);
                    break;
                }
                _ => {}
            }
        }
        let (s1, s2) = match split {
            Some(i) => (&spec[..i], &spec[i + 1..]),
            None => (spec, spec),
        };
        Ok(QuadLaurent { x: LaurentSeries::parse_spec(ring, s1)?, y: LaurentSeries::parse_spec(ring, s2)? })
    }
}

/// `||x + A||` read from a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HalfNormDist {
    Exact(HalfQPower),
    /// The value is at most `q^(m/2)`.
    AtMost(i64),
}

impl HalfNormDist {
    /// Half-exponent used for ordering; an upper bound when inexact.
    pub fn key(self) -> Option<i64> {
        match self {
            HalfNormDist::Exact(h) => h.0,
            HalfNormDist::AtMost(m) => Some(m),
        }
    }
}

/// First nonzero fractional degree, as `Ok(k)` or `Err(depth)` when the window vanishes.
fn first_frac(frac: &[Fe]) -> Result<i64, i64> {
    frac.iter().position(|&c| c != 0).map(|i| -1 - i as i64).ok_or(-(frac.len() as i64))
}

/// The field K = k(sqrt D) together with its integer ring arithmetic.
#[derive(Debug, Clone)]
pub struct QuadField {
    ring: PolyRing,
    d: Poly,
    genus: usize,
    units: Vec<QuadInt>,
    /// Prime ideals by norm degree.
    primes: Arc<Mutex<HashMap<usize, Arc<Vec<QuadIdeal>>>>>,
}

impl QuadField {
    pub fn new(ring: &PolyRing, d: &Poly) -> Result<QuadField, QuadError> {
        let field = ring.field();
        if field.p() == 2 {
            return Err(QuadError::EvenCharacteristic);
        }
        let deg = match d.deg() {
            Some(n) if n >= 1 => n,
            _ => return Err(QuadError::NotSquarefree),
        };
        if !ring.is_squarefree(d)? {
            return Err(QuadError::NotSquarefree);
        }
        if deg % 2 == 0 && field.is_square(d.lead()) {
            return Err(QuadError::NotImaginary);
        }
        let mut qf = QuadField { ring: ring.clone(), d: d.clone(), genus: (deg - 1) / 2, units: Vec::new(), primes: Arc::default() };
        // Units have constant norm; candidates are a + b sqrt D with constant a, b.
        let q = field.q();
        let mut units = Vec::new();
        for a in 0..q {
            for b in 0..q {
                let x = QuadInt::new(Poly::constant(a), Poly::constant(b));
                if x.is_zero() {
                    continue;
                }
                let n = qf.norm(&x);
                if n.deg() == Some(0) {
                    units.push(x);
                }
            }
        }
        units.sort();
        qf.units = units;
        Ok(qf)
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }
    pub fn field(&self) -> &Field {
        self.ring.field()
    }
    pub fn q(&self) -> u64 {
        self.ring.q()
    }
    pub fn d(&self) -> &Poly {
        &self.d
    }
    pub fn deg_d(&self) -> usize {
        self.d.deg().unwrap()
    }
    pub fn genus(&self) -> usize {
        self.genus
    }
    pub fn units(&self) -> &[QuadInt] {
        &self.units
    }

    pub fn add(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        QuadInt::new(self.ring.add(&x.a, &y.a), self.ring.add(&x.b, &y.b))
    }
    pub fn sub(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        QuadInt::new(self.ring.sub(&x.a, &y.a), self.ring.sub(&x.b, &y.b))
    }
    pub fn neg(&self, x: &QuadInt) -> QuadInt {
        QuadInt::new(self.ring.neg(&x.a), self.ring.neg(&x.b))
    }
    pub fn mul(&self, x: &QuadInt, y: &QuadInt) -> QuadInt {
        let r = &self.ring;
        let a = r.add(&r.mul(&x.a, &y.a), &r.mul(&r.mul(&x.b, &y.b), &self.d));
        let b = r.add(&r.mul(&x.a, &y.b), &r.mul(&x.b, &y.a));
        QuadInt::new(a, b)
    }
    pub fn scale(&self, c: Fe, x: &QuadInt) -> QuadInt {
        QuadInt::new(self.ring.scale(c, &x.a), self.ring.scale(c, &x.b))
    }
    pub fn conj(&self, x: &QuadInt) -> QuadInt {
        QuadInt::new(x.a.clone(), self.ring.neg(&x.b))
    }
    /// `a^2 - b^2 D`.
    pub fn norm(&self, x: &QuadInt) -> Poly {
        let r = &self.ring;
        r.sub(&r.square(&x.a), &r.mul(&r.square(&x.b), &self.d))
    }
    pub fn trace(&self, x: &QuadInt) -> Poly {
        self.ring.scale(2, &x.a)
    }
    /// `|x| = sqrt |Norm x|` as a half-exponent.
    pub fn abs(&self, x: &QuadInt) -> HalfQPower {
        HalfQPower(self.norm(x).deg().map(|d| d as i64))
    }
    /// `max(2 deg a, 2 deg b + deg D)`; equals `abs` because the extension is imaginary.
    pub fn abs_by_degrees(&self, x: &QuadInt) -> HalfQPower {
        let da = x.a.deg().map(|d| 2 * d as i64);
        let db = x.b.deg().map(|d| 2 * d as i64 + self.deg_d() as i64);
        HalfQPower(da.max(db))
    }

    /// Parses `(<poly>)+(<poly>)*sqrtD`, or a bare polynomial.
    pub fn parse_int(&self, text: &str) -> Result<QuadInt, QuadError> {
        let bad = || QuadError::Parse(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(body) = s.strip_suffix("*sqrtD") {
            let inner = body.strip_prefix('(').ok_or_else(bad)?;
            let (first, second) = inner.split_once(")+(").ok_or_else(bad)?;
            let second = second.strip_suffix(')').ok_or_else(bad)?;
            let a = self.ring.parse(first).map_err(|_| bad())?;
            let b = self.ring.parse(second).map_err(|_| bad())?;
            return Ok(QuadInt::new(a, b));
        }
        if s == "sqrtD" {
            return Ok(QuadInt::new(Poly::zero(), Poly::one()));
        }
        Ok(QuadInt::from_poly(self.ring.parse(&s).map_err(|_| bad())?))
    }
    pub fn fmt_int(&self, x: &QuadInt) -> String {
        format!("({})+({})*sqrtD", self.ring.fmt(&x.a), self.ring.fmt(&x.b))
    }
    pub fn fmt_ideal(&self, i: &QuadIdeal) -> String {
        if i.is_zero() {
            return "(0)".into();
        }
        let r = &self.ring;
        format!("{}*({}, {}+sqrtD)", r.fmt(&i.s), r.fmt(&i.a), r.fmt(&i.b))
    }

    /// Normal form of the A-module spanned by coordinate vectors `(u, v)` for `u + v sqrt D`.
    fn hnf(&self, vecs: Vec<(Poly, Poly)>) -> QuadIdeal {
        let r = &self.ring;
        let mut pivot: Option<(Poly, Poly)> = None;
        let mut firsts: Vec<Poly> = Vec::new();
        for (u, v) in vecs {
            if v.is_zero() {
                if !u.is_zero() {
                    firsts.push(u);
                }
                continue;
            }
            match pivot.take() {
                None => pivot = Some((u, v)),
                Some(p) => {
                    let (mut r0, mut r1) = (p, (u, v));
                    while !r1.1.is_zero() {
                        let quot = r.quo(&r0.1, &r1.1);
                        let next = (r.sub(&r0.0, &r.mul(&quot, &r1.0)), r.sub(&r0.1, &r.mul(&quot, &r1.1)));
                        r0 = std::mem::replace(&mut r1, next);
                    }
                    if !r1.0.is_zero() {
                        firsts.push(r1.0);
                    }
                    pivot = Some(r0);
                }
            }
        }
        let x1 = firsts.iter().fold(Poly::zero(), |g, u| r.gcd_monic(&g, u));
        let Some((x2, y2)) = pivot else {
            assert!(x1.is_zero(), "nonzero ideal without sqrt D component");
            return QuadIdeal::zero();
        };
        assert!(!x1.is_zero(), "ideal lattice of rank one");
        let inv = self.field().inv(y2.lead()).expect("nonzero");
        let s = r.scale(inv, &y2);
        let x2 = r.rem(&r.scale(inv, &x2), &x1);
        let a = r.exact_div(&x1, &s);
        let b = r.rem(&r.exact_div(&x2, &s), &a);
        QuadIdeal { s, a, b }
    }

    fn basis(&self, i: &QuadIdeal) -> [QuadInt; 2] {
        let r = &self.ring;
        [QuadInt::from_poly(r.mul(&i.s, &i.a)), QuadInt::new(r.mul(&i.s, &i.b), i.s.clone())]
    }

    /// The ideal generated by `gens`.
    pub fn ideal_from_gens(&self, gens: &[QuadInt]) -> QuadIdeal {
        let mut vecs = Vec::with_capacity(2 * gens.len());
        for g in gens {
            vecs.push((g.a.clone(), g.b.clone()));
            vecs.push((self.ring.mul(&g.b, &self.d), g.a.clone()));
        }
        self.hnf(vecs)
    }
    pub fn principal(&self, g: &QuadInt) -> QuadIdeal {
        self.ideal_from_gens(std::slice::from_ref(g))
    }
    /// The ideal `(p)` for a polynomial `p`.
    pub fn principal_poly(&self, p: &Poly) -> QuadIdeal {
        if p.is_zero() {
            return QuadIdeal::zero();
        }
        QuadIdeal { s: self.ring.monic(p), a: Poly::one(), b: Poly::zero() }
    }

    pub fn ideal_mul(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        if i.is_zero() || j.is_zero() {
            return QuadIdeal::zero();
        }
        let bi = self.basis(i);
        let bj = self.basis(j);
        let gens: Vec<QuadInt> = bi.iter().flat_map(|x| bj.iter().map(move |y| (x, y))).map(|(x, y)| self.mul(x, y)).collect();
        self.ideal_from_gens(&gens)
    }
    pub fn ideal_pow(&self, i: &QuadIdeal, e: u32) -> QuadIdeal {
        let mut acc = QuadIdeal::unit();
        for _ in 0..e {
            acc = self.ideal_mul(&acc, i);
        }
        acc
    }
    /// Module sum `I + J`.
    pub fn ideal_gcd(&self, i: &QuadIdeal, j: &QuadIdeal) -> QuadIdeal {
        let gens: Vec<QuadInt> = [i, j].iter().filter(|x| !x.is_zero()).flat_map(|x| self.basis(x)).collect();
        self.ideal_from_gens(&gens)
    }
    pub fn ideal_conj(&self, i: &QuadIdeal) -> QuadIdeal {
        if i.is_zero() {
            return QuadIdeal::zero();
        }
        let r = &self.ring;
        QuadIdeal { s: i.s.clone(), a: i.a.clone(), b: r.rem(&r.neg(&i.b), &i.a) }
    }
    /// Monic generator of `I conj(I) = (s^2 a)`.
    pub fn ideal_norm_poly(&self, i: &QuadIdeal) -> Poly {
        self.ring.mul(&self.ring.square(&i.s), &i.a)
    }
    /// `I / J`, exact.
    pub fn ideal_divide(&self, i: &QuadIdeal, j: &QuadIdeal) -> Result<QuadIdeal, QuadError> {
        if j.is_zero() {
            return Err(QuadError::NotDivisible);
        }
        if i.is_zero() {
            return Ok(QuadIdeal::zero());
        }
        let p = self.ideal_mul(i, &self.ideal_conj(j));
        let n = self.ideal_norm_poly(j);
        let (s, rem) = self.ring.divmod(&p.s, &n)?;
        if !rem.is_zero() {
            return Err(QuadError::NotDivisible);
        }
        Ok(QuadIdeal { s, a: p.a, b: p.b })
    }
    /// `g` lies in `I`.
    pub fn ideal_contains(&self, i: &QuadIdeal, g: &QuadInt) -> bool {
        if i.is_zero() {
            return g.is_zero();
        }
        let r = &self.ring;
        let (t, rem) = r.divmod(&g.b, &i.s).expect("monic s");
        if !rem.is_zero() {
            return false;
        }
        let u = r.sub(&g.a, &r.mul(&r.mul(&i.s, &i.b), &t));
        r.divides(&r.mul(&i.s, &i.a), &u)
    }
    /// `J` divides `I`, i.e. `I` is contained in `J`.
    pub fn ideal_divides(&self, j: &QuadIdeal, i: &QuadIdeal) -> bool {
        if i.is_zero() {
            return true;
        }
        self.basis(i).iter().all(|g| self.ideal_contains(j, g))
    }

    /// `r` with `r^2 = D mod p`, when `D` is a nonzero square mod the irreducible `p`.
    pub fn sqrt_mod(&self, p: &Poly) -> Option<Poly> {
        let r = &self.ring;
        let dm = r.rem(&self.d, p);
        if dm.is_zero() {
            return Some(Poly::zero());
        }
        let size = checked_pow(self.q(), p.deg().unwrap() as u32).expect("residue field fits u64");
        let half = (size - 1) / 2;
        if !r.powmod(&dm, half, p).is_one() {
            return None;
        }
        // Tonelli-Shanks in A/(p).
        let mut t = size - 1;
        let mut e = 0;
        while t % 2 == 0 {
            t /= 2;
            e += 1;
        }
        let minus_one = r.rem(&Poly::constant(self.field().neg(1)), p);
        // Constants are squares in an even-degree extension.
        let skip = if p.deg().unwrap() % 2 == 0 { self.q() as usize } else { 1 };
        let z = r
            .polys_up_to(p.deg_i64() - 1)
            .skip(skip)
            .find(|z| r.powmod(z, half, p) == minus_one)
            .expect("nonresidues exist in odd characteristic");
        let mut m = e;
        let mut c = r.powmod(&z, t, p);
        let mut tt = r.powmod(&dm, t, p);
        let mut res = r.powmod(&dm, t.div_ceil(2), p);
        while !tt.is_one() {
            let mut i = 0;
            let mut x = tt.clone();
            while !x.is_one() {
                x = r.mulmod(&x, &x, p);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = r.mulmod(&b, &b, p);
            }
            m = i;
            c = r.mulmod(&b, &b, p);
            tt = r.mulmod(&tt, &c, p);
            res = r.mulmod(&res, &b, p);
        }
        Some(res)
    }

    /// Kummer–Dedekind factorization of `(p)` for a monic irreducible `p`.
    pub fn ideal_factor(&self, p: &Poly) -> Result<PrimeIdealFact, QuadError> {
        if !self.ring.is_irreducible(p)? {
            return Err(QuadError::NotIrreducible);
        }
        Ok(self.factor_irreducible(p))
    }

    fn factor_irreducible(&self, p: &Poly) -> PrimeIdealFact {
        let r = &self.ring;
        let p = r.monic(p);
        if r.divides(&p, &self.d) {
            let pr = QuadIdeal { s: Poly::one(), a: p.clone(), b: Poly::zero() };
            return PrimeIdealFact { p, kind: Decomposition::Ramified, primes: vec![(pr, 2)], residue_degree: 1 };
        }
        match self.sqrt_mod(&p) {
            Some(root) => {
                let b1 = r.rem(&root, &p);
                let b2 = r.rem(&r.neg(&root), &p);
                let mut primes = vec![
                    (QuadIdeal { s: Poly::one(), a: p.clone(), b: b1 }, 1),
                    (QuadIdeal { s: Poly::one(), a: p.clone(), b: b2 }, 1),
                ];
                primes.sort();
                PrimeIdealFact { p, kind: Decomposition::Split, primes, residue_degree: 1 }
            }
            None => {
                let pr = self.principal_poly(&p);
                PrimeIdealFact { p, kind: Decomposition::Inert, primes: vec![(pr, 1)], residue_degree: 2 }
            }
        }
    }

    /// Prime ideal factorization of a nonzero ideal, in normal-form order.
    pub fn ideal_factorization(&self, i: &QuadIdeal) -> Result<Vec<(QuadIdeal, u32)>, QuadError> {
        let n = self.ideal_norm_poly(i);
        let mut out = Vec::new();
        let mut rest = i.clone();
        for (p, _) in self.ring.factor(&n)? {
            for (pr, _) in self.ideal_factor(&p)?.primes {
                let mut e = 0;
                while !rest.is_unit() && self.ideal_divides(&pr, &rest) {
                    rest = self.ideal_divide(&rest, &pr)?;
                    e += 1;
                }
                if e > 0 {
                    out.push((pr, e));
                }
            }
        }
        assert!(rest.is_unit(), "factorization must exhaust the ideal");
        out.sort();
        Ok(out)
    }

    /// Smallest associate of `g` under the unit group.
    pub fn canonical_associate(&self, g: &QuadInt) -> QuadInt {
        self.units.iter().map(|u| self.mul(u, g)).min().unwrap_or_else(|| g.clone())
    }

    /// Reduction: `I = (num / den) R` with `R` primitive and `deg R.a <= g + 1`
    /// (`<= g` when `deg D` is odd, where the reduced ideal of a class is unique).
    pub fn reduce(&self, i: &QuadIdeal) -> (QuadIdeal, QuadInt, Poly) {
        let r = &self.ring;
        let bound = if self.deg_d() % 2 == 1 { self.genus } else { self.genus + 1 };
        let mut num = QuadInt::from_poly(i.s.clone());
        let mut den = Poly::one();
        let (mut a, mut b) = (i.a.clone(), i.b.clone());
        while a.deg().unwrap_or(0) > bound {
            // (a, b + sqrt D) (b - sqrt D) = (a) (a', -b + sqrt D) with a a' = D - b^2.
            let a2 = r.exact_div(&r.sub(&self.d, &r.square(&b)), &a);
            num = self.mul(&num, &QuadInt::new(b.clone(), Poly::one()));
            den = r.mul(&den, &r.neg(&a2));
            let a2m = r.monic(&a2);
            b = r.rem(&r.neg(&b), &a2m);
            a = a2m;
        }
        (QuadIdeal { s: Poly::one(), a, b }, num, den)
    }

    fn exact_quotient(&self, num: &QuadInt, den: &Poly) -> QuadInt {
        QuadInt::new(self.ring.exact_div(&num.a, den), self.ring.exact_div(&num.b, den))
    }

    /// Degree-constrained search for a generator of a primitive ideal.
    fn search_generator(&self, i: &QuadIdeal) -> Result<Option<QuadInt>, QuadError> {
        let r = &self.ring;
        let da = i.a.deg().unwrap() as i64;
        if da == 0 {
            return Ok(Some(QuadInt::from_poly(Poly::one())));
        }
        if da > 10 {
            return Err(QuadError::SearchTooLarge(da));
        }
        // gamma = u + y sqrt D with u = y b mod a; (gamma) has the right norm iff deg Norm = deg a.
        let ymax = (da - self.deg_d() as i64).div_euclid(2);
        Ok(r.polys_up_to(ymax).filter(|y| !y.is_zero()).find_map(|y| {
            let u = r.rem(&r.mul(&y, &i.b), &i.a);
            let g = QuadInt::new(u, y);
            (self.norm(&g).deg_i64() == da).then_some(g)
        }))
    }

    /// A generator of `I` (the smallest associate), if `I` is principal.
    pub fn is_principal(&self, i: &QuadIdeal) -> Result<Option<QuadInt>, QuadError> {
        if i.is_zero() {
            return Ok(Some(QuadInt::default()));
        }
        let (red, num, den) = self.reduce(i);
        let base = if red.is_unit() {
            QuadInt::from_poly(Poly::one())
        } else if self.deg_d() % 2 == 1 {
            return Ok(None);
        } else {
            match self.search_generator(&red)? {
                Some(g) => g,
                None => return Ok(None),
            }
        };
        let g = self.exact_quotient(&self.mul(&num, &base), &den);
        debug_assert_eq!(self.principal(&g), *i);
        Ok(Some(self.canonical_associate(&g)))
    }

    /// Prime ideals with `N(P) <= q^max_deg`, in normal-form order.
    pub fn prime_ideals_up_to(&self, max_deg: usize) -> Result<Vec<QuadIdeal>, QuadError> {
        let mut out = Vec::new();
        for d in 1..=max_deg {
            out.extend(self.prime_ideals_of_norm(d)?.iter().cloned());
        }
        out.sort();
        Ok(out)
    }

    /// All prime ideals of norm `q^n`, in normal-form order.
    pub fn prime_ideals_of_norm(&self, n: usize) -> Result<Arc<Vec<QuadIdeal>>, QuadError> {
        if let Some(v) = self.primes.lock().expect("cache lock").get(&n) {
            return Ok(v.clone());
        }
        match checked_pow(self.q(), n as u32) {
            Some(t) if t <= 10_000_000 => {}
            _ => return Err(QuadError::SearchTooLarge(n as i64)),
        }
        let above = |p: Poly, want_inert: bool| -> Vec<QuadIdeal> {
            let fact = self.factor_irreducible(&p);
            if (fact.kind == Decomposition::Inert) == want_inert {
                fact.primes.into_iter().map(|x| x.0).collect()
            } else {
                Vec::new()
            }
        };
        let mut jobs: Vec<(Poly, bool)> = self.ring.irreducibles(n)?.iter().map(|p| (p, false)).collect();
        if n % 2 == 0 {
            jobs.extend(self.ring.irreducibles(n / 2)?.iter().map(|p| (p, true)));
        }
        let mut out: Vec<QuadIdeal> = jobs.into_par_iter().flat_map_iter(|(p, inert)| above(p, inert)).collect();
        out.sort();
        let out = Arc::new(out);
        self.primes.lock().expect("cache lock").insert(n, out.clone());
        Ok(out)
    }

    /// All nonzero ideals with `N(I) <= q^max_deg`, in normal-form order, built as products of primes.
    pub fn enumerate_ideals(&self, max_deg: usize) -> Vec<QuadIdeal> {
        let mut primes = self.prime_ideals_up_to(max_deg).expect("enumeration within gates");
        primes.sort_by_key(|p| p.norm_deg());
        let mut out = vec![QuadIdeal::unit()];
        let mut frontier = vec![(QuadIdeal::unit(), 0usize, 0usize)];
        while let Some((ideal, norm, start)) = frontier.pop() {
            for (k, p) in primes.iter().enumerate().skip(start) {
                let nn = norm + p.norm_deg();
                if nn > max_deg {
                    break;
                }
                let next = self.ideal_mul(&ideal, p);
                out.push(next.clone());
                frontier.push((next, nn, k));
            }
        }
        out.sort();
        out
    }

    /// Brute-force enumeration over `(s, a, b)` triples; the oracle for `enumerate_ideals`.
    pub fn enumerate_ideals_brute(&self, max_deg: usize) -> Vec<QuadIdeal> {
        let r = &self.ring;
        let mut primitive: Vec<(usize, Poly, Poly)> = Vec::new();
        for da in 0..=max_deg {
            for a in r.monic_polys(da) {
                if da == 0 {
                    primitive.push((0, a, Poly::zero()));
                    continue;
                }
                let dm = r.rem(&self.d, &a);
                for b in r.polys_up_to(da as i64 - 1) {
                    if r.rem(&r.square(&b), &a) == dm {
                        primitive.push((da, a.clone(), b));
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (da, a, b) in &primitive {
            for ds in 0..=(max_deg - da) / 2 {
                for s in r.monic_polys(ds) {
                    out.push(QuadIdeal { s, a: a.clone(), b: b.clone() });
                }
            }
        }
        out.sort();
        out
    }

    /// Principal prime ideals of norm `q^n` with their smallest generators.
    pub fn enumerate_prime_elements(&self, n: usize) -> Result<Vec<(QuadInt, QuadIdeal)>, QuadError> {
        let primes = self.prime_ideals_of_norm(n)?;
        let found: Result<Vec<Option<(QuadInt, QuadIdeal)>>, QuadError> =
            primes.par_iter().map(|p| Ok(self.is_principal(p)?.map(|g| (g, p.clone())))).collect();
        Ok(found?.into_iter().flatten().collect())
    }

    /// `||x + A||` from `depth` fractional coefficients of each component.
    pub fn kinf_norm_dist(&self, x: &QuadLaurent, depth: usize) -> HalfNormDist {
        self.norm_from_fracs(&x.x.frac_window(depth), &x.y.frac_window(depth))
    }

    /// `||u + v sqrt D||` from fractional windows of the two components.
    pub fn norm_from_fracs(&self, u: &[Fe], v: &[Fe]) -> HalfNormDist {
        let dd = self.deg_d() as i64;
        let cu = first_frac(u).map(|k| 2 * k).map_err(|fl| 2 * (fl - 1));
        let cv = first_frac(v).map(|k| 2 * k + dd).map_err(|fl| 2 * (fl - 1) + dd);
        let exact_max = [cu, cv].iter().filter_map(|c| c.ok()).max();
        let bound_max = [cu, cv].iter().filter_map(|c| c.err()).max();
        match (exact_max, bound_max) {
            (Some(e), None) => HalfNormDist::Exact(HalfQPower::half(e)),
            (Some(e), Some(b)) if e > b => HalfNormDist::Exact(HalfQPower::half(e)),
            (e, b) => HalfNormDist::AtMost(e.max(b).expect("two components")),
        }
    }

    /// `f x` as a pair of Laurent series.
    pub fn mul_laurent(&self, f: &QuadInt, x: &QuadLaurent) -> QuadLaurent {
        let r = &self.ring;
        let f2d = r.mul(&f.b, &self.d);
        let u = LaurentSeries::linear(r, vec![(f.a.clone(), x.x.clone()), (f2d, x.y.clone())], Poly::zero());
        let v = LaurentSeries::linear(r, vec![(f.a.clone(), x.y.clone()), (f.b.clone(), x.x.clone())], Poly::zero());
        QuadLaurent { x: u, y: v }
    }

    /// Elements `f != 0` with `|f| <= q^(qh/2)`, ordered by `|f|` then lexicographically.
    pub fn elements_up_to(&self, qh: i64) -> Result<Vec<QuadInt>, QuadError> {
        let r = &self.ring;
        let da = qh.div_euclid(2);
        let db = (qh - self.deg_d() as i64).div_euclid(2);
        let count = checked_pow(self.q(), (da + 1).max(0) as u32).and_then(|x| x.checked_mul(checked_pow(self.q(), (db + 1).max(0) as u32)?));
        match count {
            Some(c) if c <= 10_000_000 => {}
            _ => return Err(QuadError::SearchTooLarge(da + db + 2)),
        }
        let bs: Vec<Poly> = r.polys_up_to(db).collect();
        let mut out: Vec<(HalfQPower, QuadInt)> = Vec::new();
        for a in r.polys_up_to(da) {
            for b in &bs {
                let g = QuadInt::new(a.clone(), b.clone());
                if !g.is_zero() {
                    out.push((self.abs_by_degrees(&g), g));
                }
            }
        }
        out.sort();
        Ok(out.into_iter().map(|(_, g)| g).collect())
    }

    /// Exhaustive Dirichlet search on K_inf over `0 < |f| <= q^(qh/2)`.
    pub fn dirichlet_search_k(&self, x: &QuadLaurent, qh: i64) -> Result<DirichletSearchReport, QuadError> {
        let r = &self.ring;
        let field = r.field().clone();
        let elems = self.elements_up_to(qh)?;
        let dd = self.deg_d();
        let depth = (qh.max(0) as usize) + 2 * dd + 24;
        let max_deg = (qh.max(0) as usize) / 2 + dd + 1;
        let fx = x.x.frac_window(depth + max_deg + 1);
        let fy = x.y.frac_window(depth + max_deg + 1);
        let mut frontier: Vec<FrontierEntry> = Vec::new();
        let mut best: Option<i64> = None;
        let mut tu = Vec::new();
        let mut tv = Vec::new();
        let mut scratch = Vec::new();
        for f in &elems {
            let f2d = r.mul(&f.b, &self.d);
            // u = f1 x + f2 D y, v = f1 y + f2 x on fractional windows.
            crate::laurent::product_frac(&field, f.a.coeffs(), &fx, depth, &mut tu);
            crate::laurent::product_frac(&field, f2d.coeffs(), &fy, depth, &mut scratch);
            for (a, &b) in tu.iter_mut().zip(&scratch) {
                *a = field.add(*a, b);
            }
            crate::laurent::product_frac(&field, f.a.coeffs(), &fy, depth, &mut tv);
            crate::laurent::product_frac(&field, f.b.coeffs(), &fx, depth, &mut scratch);
            for (a, &b) in tv.iter_mut().zip(&scratch) {
                *a = field.add(*a, b);
            }
            let nd = self.norm_from_fracs(&tu, &tv);
            let key = nd.key().unwrap_or(i64::MIN);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
                let prod = self.mul_laurent(f, x);
                let a = QuadInt::new(prod.x.poly_part(), prod.y.poly_part());
                let fabs = self.abs_by_degrees(f).0.expect("nonzero f");
                frontier.push(FrontierEntry {
                    f_text: self.fmt_int(f),
                    a_text: self.fmt_int(&a),
                    f: f.clone(),
                    a,
                    f_half: fabs,
                    quality: nd,
                    local_c_half: key + fabs,
                    modulus_norm_deg: 0,
                    remark1_ok: true,
                });
            }
        }
        // Remark 1: D_n = gcd((a_n), (f_n)), f_n' = D_n^{-1} (f_n).
        for e in frontier.iter_mut() {
            let df = self.ideal_gcd(&self.principal(&e.a), &self.principal(&e.f));
            let eff = self.ideal_divide(&self.principal(&e.f), &df)?;
            e.modulus_norm_deg = eff.norm_deg() as i64;
        }
        let c_half = frontier.iter().map(|e| e.local_c_half).max().unwrap_or(0);
        let q = self.q() as f64;
        let c = q.powf(c_half as f64 / 2.0);
        for k in 1..frontier.len() {
            let lhs = q.powi(frontier[k].modulus_norm_deg as i32);
            let rhs = q.powi(frontier[k - 1].f_half as i32) / (4.0 * c * c);
            frontier[k].remark1_ok = lhs >= rhs;
        }
        Ok(DirichletSearchReport { searched: elems.len() as u64, c_half, frontier })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontierEntry {
    #[serde(skip)]
    pub f: QuadInt,
    #[serde(skip)]
    pub a: QuadInt,
    pub f_text: String,
    pub a_text: String,
    /// Half-exponent of `|f|`.
    pub f_half: i64,
    /// `||f x||`.
    pub quality: HalfNormDist,
    /// Half-exponent of `||f x|| |f|`.
    pub local_c_half: i64,
    /// `log_q N(D^{-1}(f))`.
    pub modulus_norm_deg: i64,
    pub remark1_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSearchReport {
    pub searched: u64,
    /// Least `c` valid on every frontier entry, as a half-exponent.
    pub c_half: i64,
    pub frontier: Vec<FrontierEntry>,
}

impl PartialOrd for HalfNormDist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.key().partial_cmp(&other.key())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring7() -> PolyRing {
        PolyRing::new(Field::new(7, 1).unwrap())
    }

    #[test]
    fn field_construction() {
        let r = ring7();
        let k = QuadField::new(&r, &Poly::t()).unwrap();
        assert_eq!(k.genus(), 0);
        assert_eq!(k.units().len(), 6);
        assert!(k.units().iter().all(|u| u.b.is_zero()));
        let e = QuadField::new(&r, &r.parse("T^3+T+1").unwrap()).unwrap();
        assert_eq!(e.genus(), 1);
        assert_eq!(QuadField::new(&r, &r.parse("4*T^2+1").unwrap()).unwrap_err(), QuadError::NotImaginary);
        assert!(QuadField::new(&r, &r.parse("3*T^2+1").unwrap()).is_ok());
        let r3 = PolyRing::new(Field::new(2, 1).unwrap());
        assert_eq!(QuadField::new(&r3, &Poly::t()).unwrap_err(), QuadError::EvenCharacteristic);
        assert_eq!(QuadField::new(&r, &r.parse("T^2").unwrap()).unwrap_err(), QuadError::NotSquarefree);
    }

    #[test]
    fn norm_and_abs() {
        let r = ring7();
        let k = QuadField::new(&r, &r.parse("T^3+1").unwrap()).unwrap();
        let x = k.parse_int("(T)+(1)*sqrtD").unwrap();
        assert_eq!(k.norm(&x), r.parse("-T^3+T^2-1").unwrap());
        assert_eq!(k.abs(&x), HalfQPower::half(3));
        assert!(k.trace(&k.parse_int("sqrtD").unwrap()).is_zero());
        assert_eq!(k.parse_int(&k.fmt_int(&x)).unwrap(), x);
    }

    #[test]
    fn kinf_examples() {
        let r = ring7();
        let k = QuadField::new(&r, &Poly::t()).unwrap();
        let three = LaurentSeries::from_fn(&r, "3T^-2", -2, |d| if d == -2 { 3 } else { 0 });
        let x = QuadLaurent { x: three, y: LaurentSeries::zero(&r) };
        assert_eq!(k.kinf_norm_dist(&x, 10), HalfNormDist::Exact(HalfQPower::half(-4)));
        let inv_t = LaurentSeries::rational(&r, &Poly::one(), &Poly::t()).unwrap();
        let y = QuadLaurent { x: LaurentSeries::zero(&r), y: inv_t };
        assert_eq!(k.kinf_norm_dist(&y, 10), HalfNormDist::Exact(HalfQPower::half(-1)));
        let p = QuadLaurent { x: LaurentSeries::polynomial(&r, &Poly::t()), y: LaurentSeries::polynomial(&r, &Poly::one()) };
        assert!(matches!(k.kinf_norm_dist(&p, 10), HalfNormDist::AtMost(_)));
    }

    #[test]
    fn ideal_examples() {
        let r = ring7();
        let k = QuadField::new(&r, &r.parse("T^3+T+1").unwrap()).unwrap();
        let sd = k.principal(&k.parse_int("sqrtD").unwrap());
        assert_eq!(sd, QuadIdeal { s: Poly::one(), a: k.d().clone(), b: Poly::zero() });
        assert_eq!(sd.norm(), QPower::pow(3));
        assert!(k.principal(&QuadInt::from_poly(Poly::constant(3))).is_unit());
        let f = k.parse_int("(T^2+1)+(1)*sqrtD").unwrap();
        let a = k.parse_int("(T+3)+(0)*sqrtD").unwrap();
        let g = k.ideal_from_gens(&[f.clone(), a.clone()]);
        assert_eq!(g, k.ideal_gcd(&k.principal(&f), &k.principal(&a)));
        let pf = k.principal(&f);
        assert_eq!(pf.norm(), QPower::pow(k.norm(&f).deg_i64()));
        assert_eq!(k.ideal_mul(&pf, &k.ideal_conj(&pf)), k.principal_poly(&k.norm(&f)));
        assert_eq!(k.ideal_divide(&k.ideal_mul(&pf, &sd), &sd).unwrap(), pf);
    }

    #[test]
    fn kummer_dedekind_examples() {
        let r = ring7();
        let k = QuadField::new(&r, &Poly::t()).unwrap();
        let split = k.ideal_factor(&r.parse("T-1").unwrap()).unwrap();
        assert_eq!(split.kind, Decomposition::Split);
        let ram = k.ideal_factor(&Poly::t()).unwrap();
        assert_eq!(ram.kind, Decomposition::Ramified);
        assert_eq!(ram.primes[0].0.norm(), QPower::pow(1));
        // 3 is a nonresidue mod 7, so D = T is a nonresidue mod T - 3.
        let inert = k.ideal_factor(&r.parse("T-3").unwrap()).unwrap();
        assert_eq!(inert.kind, Decomposition::Inert);
        assert_eq!(inert.primes[0].0.norm(), QPower::pow(2));
    }

    #[test]
    fn principal_search() {
        let r = ring7();
        let k = QuadField::new(&r, &Poly::t()).unwrap();
        let g = k.parse_int("(T^2+3)+(T+1)*sqrtD").unwrap();
        let i = k.principal(&g);
        let found = k.is_principal(&i).unwrap().unwrap();
        assert_eq!(k.principal(&found), i);
        assert!(k.units().iter().any(|u| k.mul(u, &g) == found));
        for i in k.enumerate_ideals(3) {
            assert!(k.is_principal(&i).unwrap().is_some());
        }
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let r = ring7();
        for d in ["T", "T^3+T+1", "3*T^2+1"] {
            let k = QuadField::new(&r, &r.parse(d).unwrap()).unwrap();
            assert_eq!(k.enumerate_ideals(3), k.enumerate_ideals_brute(3), "D = {d}");
        }
    }

    #[test]
    fn reduction_agrees_with_search() {
        let r = ring7();
        for (d, bound) in [("T^3+T+1", 4), ("3*T^2+1", 4), ("T^5+2", 5)] {
            let k = QuadField::new(&r, &r.parse(d).unwrap()).unwrap();
            let mut principal = 0;
            for i in k.enumerate_ideals(bound).into_iter().filter(|i| i.s.is_one()) {
                let by_search = k.search_generator(&i).unwrap().map(|g| k.canonical_associate(&g));
                let by_reduction = k.is_principal(&i).unwrap();
                assert_eq!(by_search, by_reduction, "D = {d}, I = {}", k.fmt_ideal(&i));
                principal += by_search.is_some() as usize;
            }
            assert!(principal > 1, "D = {d}: {principal}");
        }
    }

    #[test]
    fn prime_elements_norm() {
        let r = ring7();
        let k = QuadField::new(&r, &Poly::t()).unwrap();
        let list = k.enumerate_prime_elements(2).unwrap();
        assert!(!list.is_empty());
        for (pi, pr) in &list {
            assert_eq!(k.abs(pi), HalfQPower::half(2));
            assert_eq!(pr.norm(), QPower::pow(2));
            assert_eq!(k.principal(pi), *pr);
        }
    }
}
