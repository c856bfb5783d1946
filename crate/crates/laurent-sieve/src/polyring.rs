//! The polynomial ring A = F_q[T].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::checked_pow;
use crate::ffcore::{Fe, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivideByZero,
    #[error("input must have positive degree")]
    ConstantInput,
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("cannot parse polynomial {0:?}")]
    Parse(String),
    #[error("enumeration of q^{0} polynomials exceeds the size gate")]
    RangeTooLarge(u32),
}

/// `q^k` as an exact exponent; `QPower(None)` is the absolute value of zero.
/// The derived order agrees with the real order of the represented numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QPower(pub Option<i64>);

impl QPower {
    pub const ZERO: QPower = QPower(None);
    pub fn pow(k: i64) -> QPower {
        QPower(Some(k))
    }
    pub fn is_zero(self) -> bool {
        self.0.is_none()
    }
    pub fn exponent(self) -> Option<i64> {
        self.0
    }
    pub fn mul(self, other: QPower) -> QPower {
        match (self.0, other.0) {
            (Some(a), Some(b)) => QPower(Some(a + b)),
            _ => QPower(None),
        }
    }
    pub fn to_f64(self, q: u64) -> f64 {
        self.0.map_or(0.0, |k| (q as f64).powi(k as i32))
    }
}

impl fmt::Display for QPower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(k) => write!(f, "q^{k}"),
        }
    }
}

/// An element of F_q[T], little-endian with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    c: Vec<Fe>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }
    pub fn one() -> Poly {
        Poly { c: vec![1] }
    }
    pub fn constant(a: Fe) -> Poly {
        Poly::new(vec![a])
    }
    /// The indeterminate T.
    pub fn t() -> Poly {
        Poly { c: vec![0, 1] }
    }
    pub fn monomial(a: Fe, k: usize) -> Poly {
        let mut c = vec![0; k + 1];
        c[k] = a;
        Poly::new(c)
    }
    pub fn new(mut c: Vec<Fe>) -> Poly {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { c }
    }
    pub fn coeffs(&self) -> &[Fe] {
        &self.c
    }
    pub fn into_coeffs(self) -> Vec<Fe> {
        self.c
    }
    #[inline]
    pub fn coeff(&self, i: usize) -> Fe {
        self.c.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }
    /// Degree, with `None` standing for deg(0).
    #[inline]
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    /// Degree as a signed integer with deg(0) = -1, for size bookkeeping only.
    pub fn deg_i64(&self) -> i64 {
        self.c.len() as i64 - 1
    }
    pub fn lead(&self) -> Fe {
        self.c.last().copied().unwrap_or(0)
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }
    pub fn abs(&self) -> QPower {
        QPower(self.deg().map(|d| d as i64))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical order: by degree (zero first), then coefficients compared from `c_0` upwards.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c.len().cmp(&other.c.len()).then_with(|| self.c.cmp(&other.c))
    }
}

/// Compactly stored monic irreducibles of one degree, in canonical order.
pub struct IrreducibleList {
    pub degree: usize,
    q: u64,
    codes: Vec<u64>,
}

impl IrreducibleList {
    pub fn len(&self) -> usize {
        self.codes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }
    /// Writes the coefficients (length `degree + 1`, monic) of entry `i` into `buf`.
    #[inline]
    pub fn decode_into(&self, i: usize, buf: &mut Vec<Fe>) {
        decode_monic(self.codes[i], self.degree, self.q, buf);
    }
    pub fn get(&self, i: usize) -> Poly {
        let mut buf = Vec::new();
        self.decode_into(i, &mut buf);
        Poly { c: buf }
    }
    pub fn iter(&self) -> impl Iterator<Item = Poly> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

/// Index of a monic polynomial of degree `n` in canonical order.
#[inline]
pub fn monic_index(c: &[Fe], q: u64) -> u64 {
    let n = c.len() - 1;
    let mut idx = 0u64;
    for &ci in &c[..n] {
        idx = idx * q + ci;
    }
    idx
}

#[inline]
pub fn decode_monic(mut idx: u64, n: usize, q: u64, buf: &mut Vec<Fe>) {
    buf.clear();
    buf.resize(n + 1, 0);
    buf[n] = 1;
    for i in (0..n).rev() {
        buf[i] = idx % q;
        idx /= q;
    }
}

/// Largest enumeration the ring will perform.
pub const ENUM_GATE: u64 = 100_000_000;

/// The ring F_q[T] bound to its coefficient field.
#[derive(Clone)]
pub struct PolyRing {
    field: Field,
    irreducibles: Arc<Mutex<HashMap<usize, Arc<IrreducibleList>>>>,
}

impl fmt::Debug for PolyRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[T]", self.field)
    }
}

impl PolyRing {
    pub fn new(field: Field) -> PolyRing {
        PolyRing { field, irreducibles: Arc::new(Mutex::new(HashMap::new())) }
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        let c = (0..n).map(|i| self.field.add(a.coeff(i), b.coeff(i))).collect();
        Poly::new(c)
    }
    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.c.len().max(b.c.len());
        let c = (0..n).map(|i| self.field.sub(a.coeff(i), b.coeff(i))).collect();
        Poly::new(c)
    }
    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { c: a.c.iter().map(|&x| self.field.neg(x)).collect() }
    }
    pub fn scale(&self, k: Fe, a: &Poly) -> Poly {
        if k == 0 {
            return Poly::zero();
        }
        Poly { c: a.c.iter().map(|&x| self.field.mul(k, x)).collect() }
    }
    /// `a * T^k`.
    pub fn shift(&self, a: &Poly, k: usize) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&a.c);
        Poly { c }
    }
    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = &self.field;
        let mut c = vec![0; a.c.len() + b.c.len() - 1];
        if small_prime_path(f, c.len()) {
            let p = f.p();
            for (i, &x) in a.c.iter().enumerate() {
                if x != 0 {
                    for (j, &y) in b.c.iter().enumerate() {
                        c[i + j] += x * y;
                    }
                }
            }
            for v in c.iter_mut() {
                *v %= p;
            }
        } else if f.is_prime_field() {
            let p = f.p() as u128;
            let mut acc = vec![0u128; c.len()];
            for (i, &x) in a.c.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.c.iter().enumerate() {
                    acc[i + j] += x as u128 * y as u128;
                }
            }
            for (ci, ai) in c.iter_mut().zip(acc) {
                *ci = (ai % p) as Fe;
            }
        } else {
            for (i, &x) in a.c.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.c.iter().enumerate() {
                    c[i + j] = f.add(c[i + j], f.mul(x, y));
                }
            }
        }
        Poly::new(c)
    }
    pub fn square(&self, a: &Poly) -> Poly {
        self.mul(a, a)
    }
    pub fn pow(&self, a: &Poly, mut e: u64) -> Poly {
        let mut acc = Poly::one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    pub fn divmod(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly), PolyError> {
        let db = b.deg().ok_or(PolyError::DivideByZero)?;
        let f = &self.field;
        if small_prime_path(f, a.c.len()) {
            let mut r = a.c.clone();
            let qv = reduce_small_prime(&mut r, b, f);
            return Ok((Poly::new(qv), Poly::new(r)));
        }
        let inv = f.inv(b.lead()).expect("nonzero leading coefficient");
        let mut r = a.c.clone();
        if r.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let mut qv = vec![0; r.len() - db];
        for k in (db..r.len()).rev() {
            let c = r[k];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv);
            qv[k - db] = t;
            for (i, &bi) in b.c.iter().enumerate() {
                r[k - db + i] = f.sub(r[k - db + i], f.mul(t, bi));
            }
        }
        r.truncate(db);
        Ok((Poly::new(qv), Poly::new(r)))
    }
    pub fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        self.divmod(a, b).expect("nonzero divisor").1
    }
    pub fn quo(&self, a: &Poly, b: &Poly) -> Poly {
        self.divmod(a, b).expect("nonzero divisor").0
    }
    pub fn divides(&self, d: &Poly, a: &Poly) -> bool {
        if d.is_zero() {
            return a.is_zero();
        }
        self.rem(a, d).is_zero()
    }
    /// Exact quotient; panics if `d` does not divide `a`.
    pub fn exact_div(&self, a: &Poly, d: &Poly) -> Poly {
        let (quot, r) = self.divmod(a, d).expect("nonzero divisor");
        assert!(r.is_zero(), "exact_div called on a non-multiple");
        quot
    }

    /// Monic associate; zero stays zero.
    pub fn monic(&self, a: &Poly) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        let inv = self.field.inv(a.lead()).expect("nonzero");
        self.scale(inv, a)
    }

    /// The monic gcd, with gcd(0, 0) = 0.
    pub fn gcd_monic(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// `(g, s, t)` with `g = s a + t b` and `g` the monic gcd.
    pub fn ext_gcd(&self, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (quot, r) = self.divmod(&r0, &r1).expect("nonzero");
            r0 = std::mem::replace(&mut r1, r);
            let s = self.sub(&s0, &self.mul(&quot, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = self.sub(&t0, &self.mul(&quot, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (Poly::zero(), Poly::zero(), Poly::zero());
        }
        let inv = self.field.inv(r0.lead()).expect("nonzero");
        (self.scale(inv, &r0), self.scale(inv, &s0), self.scale(inv, &t0))
    }

    /// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Option<Poly> {
        let (g, s, _) = self.ext_gcd(&self.rem(a, m), m);
        if g.is_one() {
            Some(self.rem(&s, m))
        } else if m.deg() == Some(0) {
            Some(Poly::zero())
        } else {
            None
        }
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        let f = &self.field;
        if a.is_zero() || b.is_zero() || !small_prime_path(f, a.c.len() + b.c.len()) {
            return self.rem(&self.mul(a, b), m);
        }
        let mut r = vec![0u64; a.c.len() + b.c.len() - 1];
        for (i, &x) in a.c.iter().enumerate() {
            if x != 0 {
                for (j, &y) in b.c.iter().enumerate() {
                    r[i + j] += x * y;
                }
            }
        }
        reduce_small_prime(&mut r, m, f);
        Poly::new(r)
    }
    pub fn powmod(&self, a: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut acc = self.rem(&Poly::one(), m);
        let mut base = self.rem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.mulmod(&base, &base, m);
            }
        }
        acc
    }
    /// `a^(q^k) mod m` by `k` Frobenius steps.
    pub fn frobenius_mod(&self, a: &Poly, k: usize, m: &Poly) -> Poly {
        let mut x = self.rem(a, m);
        for _ in 0..k {
            x = self.powmod(&x, self.q(), m);
        }
        x
    }

    pub fn eval(&self, a: &Poly, x: Fe) -> Fe {
        let f = &self.field;
        a.c.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }
    pub fn derivative(&self, a: &Poly) -> Poly {
        let f = &self.field;
        let c = a.c.iter().enumerate().skip(1).map(|(i, &x)| f.mul(f.from_int(i as i64), x)).collect();
        Poly::new(c)
    }

    /// `q^k` as a count, or `RangeTooLarge` above the enumeration gate.
    pub fn count_gate(&self, k: u32) -> Result<u64, PolyError> {
        match checked_pow(self.q(), k) {
            Some(n) if n <= ENUM_GATE => Ok(n),
            _ => Err(PolyError::RangeTooLarge(k)),
        }
    }

    /// All monic polynomials of degree `n` in canonical order.
    pub fn monic_polys(&self, n: usize) -> impl Iterator<Item = Poly> {
        let q = self.q();
        let total = q.checked_pow(n as u32).expect("enumeration bounded by caller");
        (0..total).map(move |idx| {
            let mut buf = Vec::new();
            decode_monic(idx, n, q, &mut buf);
            Poly { c: buf }
        })
    }

    /// All polynomials of degree at most `d`, in canonical order. The zero polynomial is always included.
    pub fn polys_up_to(&self, d: i64) -> impl Iterator<Item = Poly> {
        let q = self.q();
        let zero = Some(Poly::zero());
        // Degree k in lexicographic order of (c_0, ..., c_k), with c_0 most significant.
        let by_degree = (0..=d.max(-1)).flat_map(move |k| {
            let k = k as usize;
            let count = q.checked_pow(k as u32).and_then(|x| x.checked_mul(q - 1)).expect("enumeration bounded by caller");
            (0..count).map(move |mut i| {
                let mut c = vec![0; k + 1];
                c[k] = 1 + i % (q - 1);
                i /= q - 1;
                for j in (0..k).rev() {
                    c[j] = i % q;
                    i /= q;
                }
                Poly::new(c)
            })
        });
        zero.into_iter().chain(by_degree)
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self, f: &Poly) -> Result<bool, PolyError> {
        let n = match f.deg() {
            None => return Err(PolyError::ZeroInput),
            Some(0) => return Err(PolyError::ConstantInput),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let m = self.monic(f);
        let t = Poly::t();
        let xqn = self.frobenius_mod(&t, n, &m);
        if !self.sub(&xqn, &self.rem(&t, &m)).is_zero() {
            return Ok(false);
        }
        for (r, _) in crate::arith::factor_u64(n as u64) {
            let k = n / r as usize;
            let h = self.sub(&self.frobenius_mod(&t, k, &m), &t);
            if !self.gcd_monic(&h, &m).is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Irreducibility by trial division with every monic of degree at most `deg f / 2`.
    pub fn is_irreducible_trial(&self, f: &Poly) -> Result<bool, PolyError> {
        let n = match f.deg() {
            None => return Err(PolyError::ZeroInput),
            Some(0) => return Err(PolyError::ConstantInput),
            Some(n) => n,
        };
        for d in 1..=n / 2 {
            for g in self.monic_polys(d) {
                if self.divides(&g, f) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Monic irreducibles of degree `n` in canonical order, sieved once and cached.
    pub fn irreducibles(&self, n: usize) -> Result<Arc<IrreducibleList>, PolyError> {
        assert!(n >= 1, "irreducibles have positive degree");
        if let Some(l) = self.irreducibles.lock().expect("cache lock").get(&n) {
            return Ok(l.clone());
        }
        let total = self.count_gate(n as u32)?;
        let q = self.q();
        let list = if n == 1 {
            IrreducibleList { degree: 1, q, codes: (0..q).collect() }
        } else {
            let mut composite = vec![0u64; (total as usize).div_ceil(64)];
            let mut buf_g = Vec::new();
            let mut prod = vec![0 as Fe; n + 1];
            for d in 1..=n / 2 {
                let small = self.irreducibles(d)?;
                let cofactors = q.pow((n - d) as u32);
                let mut buf_p = Vec::new();
                for i in 0..small.len() {
                    small.decode_into(i, &mut buf_p);
                    for gi in 0..cofactors {
                        decode_monic(gi, n - d, q, &mut buf_g);
                        self.mul_into(&buf_p, &buf_g, &mut prod);
                        let idx = monic_index(&prod, q) as usize;
                        composite[idx / 64] |= 1 << (idx % 64);
                    }
                }
            }
            let codes = (0..total).filter(|&i| composite[i as usize / 64] & (1 << (i % 64)) == 0).collect();
            IrreducibleList { degree: n, q, codes }
        };
        let list = Arc::new(list);
        self.irreducibles.lock().expect("cache lock").insert(n, list.clone());
        Ok(list)
    }

    /// `out = a * b` for coefficient slices, `out.len() == a.len() + b.len() - 1`.
    #[inline]
    pub fn mul_into(&self, a: &[Fe], b: &[Fe], out: &mut [Fe]) {
        let f = &self.field;
        for o in out.iter_mut() {
            *o = 0;
        }
        if f.is_prime_field() && f.p() < (1 << 20) {
            let p = f.p();
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
                if i % 64 == 63 {
                    for o in out.iter_mut() {
                        *o %= p;
                    }
                }
            }
            for o in out.iter_mut() {
                *o %= p;
            }
        } else {
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    out[i + j] = f.add(out[i + j], f.mul(x, y));
                }
            }
        }
    }

    /// Squarefree decomposition of a monic polynomial: `(g_i, i)` with `f = prod g_i^i`.
    fn squarefree_parts(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        let d = self.derivative(f);
        if d.is_zero() {
            let root = self.pth_root(f);
            for (g, e) in self.squarefree_parts(&root) {
                out.push((g, e * self.field.p() as u32));
            }
            return out;
        }
        let mut c = self.gcd_monic(f, &d);
        let mut w = self.exact_div(f, &c);
        let mut i = 1;
        while !w.is_one() {
            let y = self.gcd_monic(&w, &c);
            let z = self.exact_div(&w, &y);
            if !z.is_one() {
                out.push((z, i));
            }
            w = y;
            c = self.exact_div(&c, &w);
            i += 1;
        }
        if !c.is_one() {
            let root = self.pth_root(&c);
            for (g, e) in self.squarefree_parts(&root) {
                out.push((g, e * self.field.p() as u32));
            }
        }
        out
    }

    fn pth_root(&self, f: &Poly) -> Poly {
        let p = self.field.p() as usize;
        let e = self.q() / self.field.p();
        let c = f.c.iter().step_by(p).map(|&x| self.field.pow(x, e)).collect();
        Poly::new(c)
    }

    /// Distinct-degree factorization of a squarefree monic polynomial.
    fn distinct_degree(&self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let t = Poly::t();
        let mut h = self.rem(&t, &rest);
        let mut d = 0;
        while let Some(n) = rest.deg() {
            if n < 2 * (d + 1) {
                if n > 0 {
                    out.push((rest.clone(), n));
                }
                break;
            }
            d += 1;
            h = self.powmod(&h, self.q(), &rest);
            let g = self.gcd_monic(&self.sub(&h, &t), &rest);
            if !g.is_one() {
                out.push((g.clone(), d));
                rest = self.exact_div(&rest, &g);
                h = self.rem(&h, &rest);
            }
        }
        out
    }

    /// Cantor–Zassenhaus splitting of a product of distinct irreducibles of degree `d`.
    fn equal_degree(&self, f: &Poly, d: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = f.deg().expect("nonzero");
        if n == d {
            out.push(f.clone());
            return;
        }
        let q = self.q();
        loop {
            let r = Poly::new((0..n).map(|_| rng.gen_range(0..q)).collect());
            if r.deg().unwrap_or(0) < 1 {
                continue;
            }
            let s = if self.field.p() == 2 {
                // Absolute trace down to GF(2).
                let total = d * self.field.n() as usize;
                let mut acc = Poly::zero();
                let mut x = self.rem(&r, f);
                for _ in 0..total {
                    acc = self.add(&acc, &x);
                    x = self.mulmod(&x, &x, f);
                }
                acc
            } else {
                // r^((q^d - 1)/2) = (prod_{i<d} r^(q^i))^((q-1)/2)
                let mut norm = Poly::one();
                let mut x = self.rem(&r, f);
                for _ in 0..d {
                    norm = self.mulmod(&norm, &x, f);
                    x = self.powmod(&x, q, f);
                }
                let pw = self.powmod(&norm, (q - 1) / 2, f);
                self.sub(&pw, &Poly::one())
            };
            let g = self.gcd_monic(&s, f);
            if let Some(gd) = g.deg() {
                if gd > 0 && gd < n {
                    let other = self.exact_div(f, &g);
                    self.equal_degree(&g, d, rng, out);
                    self.equal_degree(&other, d, rng, out);
                    return;
                }
            }
        }
    }

    /// Monic irreducible factorization `[(pi, e)]` in canonical order; `f ≠ 0`.
    pub fn factor(&self, f: &Poly) -> Result<Vec<(Poly, u32)>, PolyError> {
        if f.is_zero() {
            return Err(PolyError::ZeroInput);
        }
        let m = self.monic(f);
        if m.is_one() {
            return Ok(Vec::new());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut acc: Vec<(Poly, u32)> = Vec::new();
        for (g, e) in self.squarefree_parts(&m) {
            for (h, d) in self.distinct_degree(&g) {
                let mut parts = Vec::new();
                self.equal_degree(&h, d, &mut rng, &mut parts);
                for pi in parts {
                    acc.push((pi, e));
                }
            }
        }
        acc.sort();
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (pi, e) in acc {
            match merged.last_mut() {
                Some((last, le)) if *last == pi => *le += e,
                _ => merged.push((pi, e)),
            }
        }
        Ok(merged)
    }

    pub fn is_squarefree(&self, f: &Poly) -> Result<bool, PolyError> {
        Ok(self.factor(f)?.iter().all(|&(_, e)| e == 1))
    }

    pub fn mobius(&self, f: &Poly) -> Result<i64, PolyError> {
        let fac = self.factor(f)?;
        if fac.iter().any(|&(_, e)| e > 1) {
            Ok(0)
        } else if fac.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    /// `#(F_q[T]/(f))^*`.
    pub fn euler_phi(&self, f: &Poly) -> Result<u128, PolyError> {
        let q = self.q() as u128;
        let mut phi: u128 = 1;
        for (pi, e) in self.factor(f)? {
            let n = q.pow(pi.deg().unwrap() as u32);
            phi *= n.pow(e - 1) * (n - 1);
        }
        Ok(phi)
    }

    pub fn omega(&self, f: &Poly) -> Result<usize, PolyError> {
        Ok(self.factor(f)?.len())
    }

    /// All monic divisors of `f`, in canonical order.
    pub fn divisors(&self, f: &Poly) -> Result<Vec<Poly>, PolyError> {
        let mut divs = vec![Poly::one()];
        for (pi, e) in self.factor(f)? {
            let base = divs.clone();
            let mut pk = Poly::one();
            for _ in 0..e {
                pk = self.mul(&pk, &pi);
                for d in &base {
                    divs.push(self.mul(d, &pk));
                }
            }
        }
        divs.sort();
        Ok(divs)
    }

    pub fn arithmetic_functions(&self, f: &Poly) -> Result<ArithmeticFunctions, PolyError> {
        Ok(ArithmeticFunctions {
            mu: self.mobius(f)?,
            phi: self.euler_phi(f)?,
            omega: self.omega(f)?,
            divisors: self.divisors(f)?,
        })
    }

    /// Human-readable literal, highest degree first: `2*T^3+T+5`.
    pub fn fmt(&self, a: &Poly) -> String {
        if a.is_zero() {
            return "0".to_string();
        }
        let f = &self.field;
        let mut parts = Vec::new();
        for (i, &c) in a.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = f.fmt_elem(c);
            let mono = match i {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{i}"),
            };
            parts.push(match (i, c) {
                (0, _) => coef,
                (_, 1) => mono,
                _ => format!("{coef}*{mono}"),
            });
        }
        parts.join("+")
    }

    /// Parses `"2*T^3+T+5"` or the little-endian list form `"[5,1,0,2]"`.
    pub fn parse(&self, text: &str) -> Result<Poly, PolyError> {
        let err = || PolyError::Parse(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err());
        }
        let f = &self.field;
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            if inner.is_empty() {
                return Ok(Poly::zero());
            }
            let mut c = Vec::new();
            for tok in split_top_level(inner, ',') {
                c.push(f.parse_elem(&tok).ok_or_else(err)?);
            }
            return Ok(Poly::new(c));
        }
        // Split into signed terms, ignoring signs inside braces.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        let mut neg = false;
        for ch in s.chars() {
            match ch {
                '{' => {
                    depth += 1;
                    cur.push(ch);
                }
                '}' => {
                    depth -= 1;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if !cur.is_empty() {
                        terms.push((neg, std::mem::take(&mut cur)));
                    } else if !terms.is_empty() {
                        return Err(err());
                    }
                    neg = ch == '-';
                }
                _ => cur.push(ch),
            }
        }
        if cur.is_empty() {
            return Err(err());
        }
        terms.push((neg, cur));
        let mut acc = Poly::zero();
        for (negative, term) in terms {
            let (coef, mono) = match term.find('T') {
                None => (Some(term.as_str()), None),
                Some(pos) => {
                    let head = &term[..pos];
                    let coef = if head.is_empty() {
                        None
                    } else {
                        Some(head.strip_suffix('*').ok_or_else(err)?)
                    };
                    (coef, Some(&term[pos + 1..]))
                }
            };
            let c = match coef {
                None => 1,
                Some(t) => f.parse_elem(t).ok_or_else(err)?,
            };
            let k = match mono {
                None => 0,
                Some("") => 1,
                Some(rest) => rest.strip_prefix('^').and_then(|e| e.parse::<usize>().ok()).ok_or_else(err)?,
            };
            let c = if negative { f.neg(c) } else { c };
            acc = self.add(&acc, &Poly::monomial(c, k));
        }
        Ok(acc)
    }
}

fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    out.push(cur);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithmeticFunctions {
    pub mu: i64,
    pub phi: u128,
    pub omega: usize,
    pub divisors: Vec<Poly>,
}

/// Prime fields below this bound use plain `u64` arithmetic: products stay below `2^48`.
const SMALL_PRIME: u64 = 1 << 24;
/// Up to this many unreduced products fit in a `u64` accumulator.
const SMALL_LEN: usize = 1 << 15;

fn small_prime_path(f: &Field, len: usize) -> bool {
    f.is_prime_field() && f.p() < SMALL_PRIME && len < SMALL_LEN
}

/// Reduces `r` modulo `m` in place with delayed reduction, truncating to the remainder, and returns
/// the quotient coefficients. Entries of `r` may be unreduced sums of at most `r.len()` products.
fn reduce_small_prime(r: &mut Vec<u64>, m: &Poly, f: &Field) -> Vec<Fe> {
    let p = f.p();
    let dm = m.c.len() - 1;
    let mut qv = Vec::new();
    if r.len() > dm {
        let inv = f.inv(m.lead()).expect("nonzero leading coefficient");
        qv = vec![0; r.len() - dm];
        for k in (dm..r.len()).rev() {
            let c = r[k] % p;
            if c == 0 {
                continue;
            }
            let t = c * inv % p;
            qv[k - dm] = t;
            let neg = p - t;
            for (i, &mi) in m.c[..dm].iter().enumerate() {
                r[k - dm + i] += neg * mi;
            }
        }
        r.truncate(dm);
    }
    for v in r.iter_mut() {
        *v %= p;
    }
    qv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring7() -> PolyRing {
        PolyRing::new(Field::new(7, 1).unwrap())
    }

    #[test]
    fn enumeration_is_canonical() {
        let r = PolyRing::new(Field::new(5, 1).unwrap());
        let all: Vec<Poly> = r.polys_up_to(3).collect();
        assert_eq!(all.len(), 625);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.polys_up_to(-1).collect::<Vec<_>>(), vec![Poly::zero()]);
    }

    #[test]
    fn gcd_and_division_examples() {
        let r = ring7();
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(r.gcd_monic(&p("T^2-1"), &p("T-1")), p("T-1"));
        let (quot, rem) = r.divmod(&p("T^3"), &p("T+1")).unwrap();
        assert_eq!(quot, p("T^2-T+1"));
        assert_eq!(rem, p("-1"));
        assert_eq!(r.gcd_monic(&p("3*T+3"), &Poly::zero()), p("T+1"));
        assert_eq!(r.divmod(&p("T"), &Poly::zero()), Err(PolyError::DivideByZero));
    }

    #[test]
    fn irreducibility_examples() {
        let r = ring7();
        let p = |s: &str| r.parse(s).unwrap();
        // Squares mod 7 are {1, 2, 4}; 6 = -1 is not among them.
        let squares: Vec<u64> = (1..7u64).map(|x| x * x % 7).collect();
        assert!(!squares.contains(&6));
        assert!(r.is_irreducible(&p("T^2+1")).unwrap());
        assert!(!r.is_irreducible(&p("T^2-1")).unwrap());
        assert!(r.is_irreducible(&p("T")).unwrap());
        assert_eq!(r.is_irreducible(&p("3")), Err(PolyError::ConstantInput));
    }

    #[test]
    fn irreducible_counts() {
        let r = ring7();
        assert_eq!(r.irreducibles(1).unwrap().len(), 7);
        assert_eq!(r.irreducibles(2).unwrap().len(), 21);
        assert_eq!(r.irreducibles(3).unwrap().len(), 112);
        let brute = r.monic_polys(2).filter(|f| r.is_irreducible_trial(f).unwrap()).count();
        assert_eq!(brute, 21);
    }

    #[test]
    fn arithmetic_function_examples() {
        let r = ring7();
        let p = |s: &str| r.parse(s).unwrap();
        assert_eq!(r.mobius(&p("T^2")).unwrap(), 0);
        let f = p("T^2+T");
        assert_eq!(r.euler_phi(&f).unwrap(), 36);
        let brute = r.polys_up_to(1).filter(|b| !b.is_zero() && r.gcd_monic(b, &f).is_one()).count();
        assert_eq!(brute, 36);
        assert_eq!(r.omega(&f).unwrap(), 2);
        assert_eq!(r.divisors(&f).unwrap().len(), 4);
    }

    #[test]
    fn abs_values() {
        let r = ring7();
        assert_eq!(r.parse("T^3+1").unwrap().abs(), QPower::pow(3));
        assert_eq!(r.parse("5").unwrap().abs(), QPower::pow(0));
        assert_eq!(Poly::zero().abs(), QPower::ZERO);
        assert!(QPower::ZERO < QPower::pow(-100));
    }

    #[test]
    fn literals_round_trip() {
        let r = ring7();
        let f = r.parse("2*T^3+T+5").unwrap();
        assert_eq!(f.coeffs(), &[5, 1, 0, 2]);
        assert_eq!(r.parse("[5,1,0,2]").unwrap(), f);
        assert_eq!(r.fmt(&f), "2*T^3+T+5");
        assert_eq!(r.parse("-T^2 - 3").unwrap(), Poly::new(vec![4, 0, 6]));
        assert!(r.parse("T^").is_err());
        let r9 = PolyRing::new(Field::new(3, 2).unwrap());
        let g = r9.parse("{1,2}*T^2+{0,1}").unwrap();
        assert_eq!(r9.parse(&r9.fmt(&g)).unwrap(), g);
    }

    #[test]
    fn factorization_reconstructs() {
        let r = ring7();
        let f = r.parse("T^6+3*T^4+T^3+2*T+5").unwrap();
        let fac = r.factor(&f).unwrap();
        let mut prod = Poly::one();
        for (pi, e) in &fac {
            assert!(r.is_irreducible_trial(pi).unwrap());
            prod = r.mul(&prod, &r.pow(pi, *e as u64));
        }
        assert_eq!(prod, r.monic(&f));
        let sq = r.mul(&r.pow(&r.parse("T+2").unwrap(), 3), &r.parse("T^2+1").unwrap());
        assert_eq!(r.factor(&sq).unwrap(), vec![(r.parse("T+2").unwrap(), 3), (r.parse("T^2+1").unwrap(), 1)]);
    }

    #[test]
    fn characteristic_p_powers_factor() {
        let r = PolyRing::new(Field::new(3, 1).unwrap());
        let f = r.pow(&r.parse("T^2+1").unwrap(), 3);
        assert_eq!(r.factor(&f).unwrap(), vec![(r.parse("T^2+1").unwrap(), 3)]);
        let r2 = PolyRing::new(Field::new(2, 2).unwrap());
        let g = r2.mul(&r2.parse("T^2+T+1").unwrap(), &r2.parse("T^3+T+1").unwrap());
        let fac = r2.factor(&g).unwrap();
        let prod = fac.iter().fold(Poly::one(), |acc, (p, e)| r2.mul(&acc, &r2.pow(p, *e as u64)));
        assert_eq!(prod, g);
    }
}
