//! Finite fields GF(p^n).
//!
//! An element is encoded as the integer `c_0 + c_1 p + ... + c_{n-1} p^{n-1}`
//! of its coefficient vector over GF(p) modulo the field's defining polynomial.
//! Zero encodes as `0` and one as `1`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::arith::{checked_pow, factor_u64, inv_mod_u64, is_prime_u64};

/// Encoded field element.
pub type Fe = u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("p^n = {p}^{n} does not fit in 64 bits")]
    TooLarge { p: u64, n: u32 },
    #[error("modulus is not a monic irreducible of the stated degree")]
    BadModulus,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("cannot parse field spec {0:?}")]
    Parse(String),
}

/// The data that determines a field up to equality of encodings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u64,
    pub n: u32,
    /// Little-endian monic modulus over GF(p); `None` for prime fields.
    pub modulus: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn q(&self) -> u64 {
        self.p.pow(self.n)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.modulus {
            None => write!(f, "{}", self.p),
            Some(m) => {
                let parts: Vec<String> = m.iter().map(|c| c.to_string()).collect();
                write!(f, "{}^{}/[{}]", self.p, self.n, parts.join(","))
            }
        }
    }
}

struct Tables {
    exp: Vec<Fe>,
    log: Vec<u32>,
}

struct Inner {
    spec: FieldSpec,
    q: u64,
    tables: Option<Tables>,
}

/// A finite field handle; cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.0.spec)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

const TABLE_LIMIT: u64 = 1 << 22;

fn base_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let n = m.len() - 1;
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for t in 0..n {
            let sub = (c as u128 * m[t] as u128 % p as u128) as u64;
            prod[k - n + t] = (prod[k - n + t] + p - sub) % p;
        }
    }
    prod.truncate(n);
    prod
}

impl Field {
    /// GF(p^n) with the canonical modulus: the lexicographically smallest monic
    /// irreducible of degree `n`, comparing coefficients from `c_0` upwards.
    pub fn new(p: u64, n: u32) -> Result<Field, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NonPrime(p));
        }
        if n == 0 {
            return Err(FieldError::DegreeZero);
        }
        checked_pow(p, n).ok_or(FieldError::TooLarge { p, n })?;
        if n == 1 {
            return Ok(Self::build(FieldSpec { p, n, modulus: None }));
        }
        let modulus = smallest_irreducible(p, n);
        Ok(Self::build(FieldSpec { p, n, modulus: Some(modulus) }))
    }

    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Self::new(p, 1)
    }

    /// GF(p^n) with an explicit little-endian modulus.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field, FieldError> {
        if !is_prime_u64(p) {
            return Err(FieldError::NonPrime(p));
        }
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(FieldError::BadModulus);
        }
        let n = (modulus.len() - 1) as u32;
        checked_pow(p, n).ok_or(FieldError::TooLarge { p, n })?;
        if n == 1 {
            return Ok(Self::build(FieldSpec { p, n, modulus: None }));
        }
        if !base_irreducible(p, &modulus) {
            return Err(FieldError::BadModulus);
        }
        Ok(Self::build(FieldSpec { p, n, modulus: Some(modulus) }))
    }

    /// Parses `"7"`, `"3^2"` or `"3^2/[c0,c1,...,1]"`.
    pub fn parse(text: &str) -> Result<Field, FieldError> {
        let err = || FieldError::Parse(text.to_string());
        let t = text.trim();
        let (head, modulus) = match t.split_once('/') {
            Some((h, m)) => (h.trim(), Some(m.trim())),
            None => (t, None),
        };
        let (p, n) = match head.split_once('^') {
            Some((a, b)) => (
                a.trim().parse::<u64>().map_err(|_| err())?,
                b.trim().parse::<u32>().map_err(|_| err())?,
            ),
            None => (head.parse::<u64>().map_err(|_| err())?, 1),
        };
        match modulus {
            None => Field::new(p, n),
            Some(m) => {
                let inner = m.strip_prefix('[').and_then(|s| s.strip_suffix(']')).ok_or_else(err)?;
                let coeffs: Result<Vec<u64>, _> =
                    inner.split(',').map(|s| s.trim().parse::<u64>()).collect();
                let coeffs = coeffs.map_err(|_| err())?;
                if coeffs.len() as u32 != n + 1 {
                    return Err(FieldError::BadModulus);
                }
                Field::with_modulus(p, coeffs)
            }
        }
    }

    fn build(spec: FieldSpec) -> Field {
        let q = spec.q();
        let mut inner = Inner { spec, q, tables: None };
        if inner.spec.n > 1 && q <= TABLE_LIMIT {
            let tmp = Field(Arc::new(Inner { spec: inner.spec.clone(), q, tables: None }));
            let g = tmp.find_primitive();
            let mut exp = vec![0 as Fe; 2 * (q as usize - 1)];
            let mut log = vec![0u32; q as usize];
            let mut x: Fe = 1;
            for k in 0..(q - 1) as usize {
                exp[k] = x;
                log[x as usize] = k as u32;
                x = tmp.mul(x, g);
            }
            for k in (q - 1) as usize..exp.len() {
                exp[k] = exp[k - (q - 1) as usize];
            }
            inner.tables = Some(Tables { exp, log });
        }
        Field(Arc::new(inner))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }
    #[inline]
    pub fn p(&self) -> u64 {
        self.0.spec.p
    }
    #[inline]
    pub fn n(&self) -> u32 {
        self.0.spec.n
    }
    #[inline]
    pub fn q(&self) -> u64 {
        self.0.q
    }
    pub fn modulus(&self) -> Option<&[u64]> {
        self.0.spec.modulus.as_deref()
    }
    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.0.spec.n == 1
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        0..self.q()
    }

    pub fn coeffs(&self, x: Fe) -> Vec<u64> {
        let p = self.p();
        let mut v = Vec::with_capacity(self.n() as usize);
        let mut x = x;
        for _ in 0..self.n() {
            v.push(x % p);
            x /= p;
        }
        v
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Fe {
        let p = self.p();
        let mut x: Fe = 0;
        for &ci in c.iter().rev() {
            x = x * p + ci % p;
        }
        x
    }

    /// Image of an integer under the prime-field embedding.
    pub fn from_int(&self, k: i64) -> Fe {
        k.rem_euclid(self.p() as i64) as Fe
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let p = self.p();
        if self.is_prime_field() {
            let s = a + b;
            return if s >= p { s - p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n() {
            let d = (a % p + b % p) % p;
            out += d * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        let p = self.p();
        if self.is_prime_field() {
            return if a == 0 { 0 } else { p - a };
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.n() {
            let d = a % p;
            out += ((p - d) % p) * place;
            place *= p;
            a /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.is_prime_field() {
            let p = self.p();
            if p <= u32::MAX as u64 {
                return a * b % p;
            }
            return ((a as u128 * b as u128) % p as u128) as Fe;
        }
        if let Some(t) = &self.0.tables {
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize];
        }
        let m = self.modulus().expect("extension field has a modulus");
        let r = base_mulmod(&self.coeffs(a), &self.coeffs(b), m, self.p());
        self.from_coeffs(&r)
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc: Fe = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        if self.is_prime_field() {
            return Ok(inv_mod_u64(a, self.p()).expect("nonzero residue mod prime"));
        }
        if let Some(t) = &self.0.tables {
            let l = t.log[a as usize] as u64;
            return Ok(t.exp[((self.q() - 1 - l) % (self.q() - 1)) as usize]);
        }
        Ok(self.pow(a, self.q() - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Quadratic-residue test including zero; every element is a square in characteristic 2.
    pub fn is_square(&self, a: Fe) -> bool {
        a == 0 || self.p() == 2 || self.pow(a, (self.q() - 1) / 2) == 1
    }

    /// Quadratic character: 0, 1 or -1.
    pub fn legendre(&self, a: Fe) -> i32 {
        if a == 0 {
            0
        } else if self.is_square(a) {
            1
        } else {
            -1
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> u64 {
        let mut ord = self.q() - 1;
        for (r, _) in factor_u64(self.q() - 1) {
            while ord % r == 0 && self.pow(a, ord / r) == 1 {
                ord /= r;
            }
        }
        ord
    }

    fn find_primitive(&self) -> Fe {
        let n = self.q() - 1;
        let primes: Vec<u64> = factor_u64(n).into_iter().map(|(r, _)| r).collect();
        (1..self.q())
            .find(|&g| primes.iter().all(|&r| self.pow(g, n / r) != 1))
            .expect("cyclic group has a generator")
    }

    /// Smallest-encoding generator of the multiplicative group.
    pub fn primitive_element(&self) -> Fe {
        if let Some(t) = &self.0.tables {
            return t.exp[1];
        }
        self.find_primitive()
    }

    /// The element written as a literal: plain residue for prime fields,
    /// `{c0,c1,...}` otherwise.
    pub fn fmt_elem(&self, a: Fe) -> String {
        if self.is_prime_field() {
            a.to_string()
        } else {
            let c: Vec<String> = self.coeffs(a).iter().map(|x| x.to_string()).collect();
            format!("{{{}}}", c.join(","))
        }
    }

    /// Inverse of [`Field::fmt_elem`]; negative integers are reduced mod p.
    pub fn parse_elem(&self, s: &str) -> Option<Fe> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            let c: Option<Vec<u64>> = inner
                .split(',')
                .map(|t| t.trim().parse::<i64>().ok().map(|v| self.from_int(v)))
                .collect();
            let c = c?;
            if c.len() > self.n() as usize {
                return None;
            }
            return Some(self.from_coeffs(&c));
        }
        s.parse::<i64>().ok().map(|v| self.from_int(v))
    }
}

/// Degree of a little-endian coefficient vector over GF(p), `None` for zero.
fn base_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn base_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = base_deg(m).expect("nonzero modulus");
    let inv_lead = inv_mod_u64(m[dm], p).expect("unit leading coefficient");
    while let Some(dr) = base_deg(&r) {
        if dr < dm {
            break;
        }
        let c = r[dr] * inv_lead % p;
        for t in 0..=dm {
            let sub = c * m[t] % p;
            r[dr - dm + t] = (r[dr - dm + t] + p - sub) % p;
        }
    }
    r.truncate(dm.max(1));
    r
}

fn base_gcd_is_one(a: &[u64], b: &[u64], p: u64) -> bool {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while base_deg(&b).is_some() {
        let r = base_rem(&a, &b, p);
        a = b;
        b = r;
    }
    base_deg(&a) == Some(0)
}

/// Rabin's test over GF(p): `m | x^{p^n} - x` and `gcd(x^{p^{n/r}} - x, m) = 1`
/// for every prime `r | n`.
fn base_irreducible(p: u64, m: &[u64]) -> bool {
    let n = match base_deg(m) {
        Some(d) if d >= 1 => d,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let frob = |a: &[u64]| -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = a.to_vec();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = base_mulmod(&acc, &base, m, p);
            }
            base = base_mulmod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    };
    let x = vec![0u64, 1];
    let mut powers = vec![x.clone()];
    for _ in 0..n {
        let next = frob(powers.last().unwrap());
        powers.push(next);
    }
    let minus_x = |a: &[u64]| -> Vec<u64> {
        let mut v = a.to_vec();
        v.resize(n.max(2), 0);
        v[1] = (v[1] + p - 1) % p;
        v
    };
    if base_deg(&minus_x(&powers[n])).is_some() {
        return false;
    }
    for (r, _) in factor_u64(n as u64) {
        let k = n / r as usize;
        if !base_gcd_is_one(m, &minus_x(&powers[k]), p) {
            return false;
        }
    }
    true
}

fn smallest_irreducible(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    let mut digits = vec![0u64; n];
    loop {
        let mut cand = digits.clone();
        cand.push(1);
        if base_irreducible(p, &cand) {
            return cand;
        }
        // Low coefficients are the most significant in the comparison.
        let mut i = n;
        loop {
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
            assert!(i > 0, "an irreducible of every degree exists");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_examples() {
        let f = Field::new(7, 1).unwrap();
        assert_eq!(f.q(), 7);
        assert!(f.modulus().is_none());
        assert_eq!(f.add(3, 5), 1);
        assert_eq!(f.inv(3).unwrap(), 5);
        assert_eq!(f.inv(0), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Field::new(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert_eq!(Field::new(7, 0).unwrap_err(), FieldError::DegreeZero);
        assert!(Field::new(2, 80).is_err());
        assert_eq!(Field::with_modulus(3, vec![2, 0, 1]).unwrap_err(), FieldError::BadModulus);
    }

    #[test]
    fn gf9_modulus_is_smallest_irreducible() {
        // Oracle: monic quadratics over GF(3) ordered by (c0, c1); irreducible iff no root.
        let mut expected = None;
        'outer: for c0 in 0..3u64 {
            for c1 in 0..3u64 {
                if (0..3u64).all(|x| (x * x + c1 * x + c0) % 3 != 0) {
                    expected = Some(vec![c0, c1, 1]);
                    break 'outer;
                }
            }
        }
        let f = Field::new(3, 2).unwrap();
        assert_eq!(f.modulus().map(|m| m.to_vec()), expected);
        assert_eq!(f.modulus().unwrap(), &[1, 0, 1]);
        // x*x reduces to -1 = 2 under x^2 + 1.
        let x = f.from_coeffs(&[0, 1]);
        assert_eq!(f.mul(x, x), f.from_coeffs(&[2, 0]));
    }

    #[test]
    fn parse_specs() {
        assert_eq!(Field::parse("7").unwrap().q(), 7);
        assert_eq!(Field::parse("3^2").unwrap().modulus().unwrap(), &[1, 0, 1]);
        let f = Field::parse("3^2/[2,2,1]").unwrap();
        assert_eq!(f.modulus().unwrap(), &[2, 2, 1]);
        assert!(Field::parse("3^2/[1,1,1]").is_err());
        assert!(Field::parse("x").is_err());
        assert_eq!(f.spec().to_string(), "3^2/[2,2,1]");
    }

    #[test]
    fn fermat_on_small_fields() {
        for (p, n) in [(2, 3), (3, 2), (5, 2), (7, 1), (2, 5), (3, 3)] {
            let f = Field::new(p, n).unwrap();
            let q = f.q();
            for x in f.elements() {
                assert_eq!(f.pow(x, q), x);
                if x != 0 {
                    assert_eq!(f.pow(x, q - 1), 1);
                    assert_eq!(f.inv(f.inv(x).unwrap()).unwrap(), x);
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), 1);
                }
            }
            assert_eq!(f.order(f.primitive_element()), q - 1);
        }
    }

    #[test]
    fn table_free_path_agrees_with_tables() {
        let f = Field::new(3, 3).unwrap();
        let m = f.modulus().unwrap().to_vec();
        for a in f.elements() {
            for b in f.elements() {
                let r = base_mulmod(&f.coeffs(a), &f.coeffs(b), &m, 3);
                assert_eq!(f.from_coeffs(&r), f.mul(a, b));
            }
        }
    }

    #[test]
    fn element_literals_round_trip() {
        let f = Field::new(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.parse_elem(&f.fmt_elem(a)), Some(a));
        }
        let g = Field::new(7, 1).unwrap();
        assert_eq!(g.parse_elem("-1"), Some(6));
    }
}
