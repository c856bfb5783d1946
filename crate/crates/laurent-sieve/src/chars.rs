//! Dirichlet characters modulo f in F_q[T].

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{self, AbelianError, GroupOps};
use crate::arith::{factor_u64, gcd_u64, lcm_u64};
use crate::cyclo::{root_of_unity, CycloSum};
use crate::ffcore::Fe;
use crate::polyring::{Poly, PolyError, PolyRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("the zero polynomial is not a modulus")]
    ZeroModulus,
    #[error("unit group of order {0} exceeds the desk-scale gate")]
    GroupTooLarge(u128),
    #[error("unit group decomposition failed: {0}")]
    Decomposition(#[from] AbelianError),
    #[error("generators do not give a direct product")]
    NotDirect,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Largest unit group handled.
pub const GROUP_GATE: u128 = 1_000_000;
/// Residue tables are dense up to this many residues.
const DENSE_GATE: u64 = 1 << 22;
const NO_UNIT: u32 = u32::MAX;

/// Reduction of coefficient vectors modulo f to residue codes `sum c_i q^i`.
#[derive(Debug, Clone)]
pub struct Reducer {
    q: u64,
    p: u64,
    prime: bool,
    n: usize,
    /// `T^i mod f`, little-endian, length `n`.
    powers: Vec<Vec<Fe>>,
    /// Same, packed into 16-bit lanes, when the prime-field fast path applies.
    packed: Option<Vec<u128>>,
    ring: PolyRing,
    modulus: Poly,
}

impl Reducer {
    pub fn new(ring: &PolyRing, f: &Poly, max_deg: usize) -> Reducer {
        let n = f.deg().expect("nonzero modulus");
        let field = ring.field();
        let mut powers = Vec::with_capacity(max_deg + 1);
        let mut x = ring.rem(&Poly::one(), f);
        for _ in 0..=max_deg {
            let mut c = x.coeffs().to_vec();
            c.resize(n, 0);
            powers.push(c);
            x = ring.rem(&ring.shift(&x, 1), f);
        }
        let p = field.p();
        let prime = field.is_prime_field();
        let lanes_ok = n <= 8 && (max_deg as u64 + 1) * (p - 1) * (p - 1) < (1 << 16);
        let packed = (prime && lanes_ok).then(|| {
            powers.iter().map(|c| c.iter().enumerate().fold(0u128, |acc, (i, &v)| acc | ((v as u128) << (16 * i)))).collect()
        });
        Reducer { q: field.q(), p, prime, n, powers, packed, ring: ring.clone(), modulus: f.clone() }
    }

    pub fn code_of_reduced(&self, c: &[Fe]) -> u64 {
        c.iter().rev().fold(0, |acc, &v| acc * self.q + v)
    }

    /// Residue code of the polynomial with coefficients `c`.
    #[inline]
    pub fn code(&self, c: &[Fe]) -> u64 {
        if self.n == 0 {
            return 0;
        }
        if c.len() > self.powers.len() {
            let r = self.ring.rem(&Poly::new(c.to_vec()), &self.modulus);
            return self.code_of_reduced(r.coeffs());
        }
        if let Some(packed) = &self.packed {
            let mut acc = 0u128;
            for (&ci, &pw) in c.iter().zip(packed) {
                acc += ci as u128 * pw;
            }
            let mut code = 0;
            for i in (0..self.n).rev() {
                let lane = ((acc >> (16 * i)) & 0xFFFF) as u64 % self.p;
                code = code * self.q + lane;
            }
            return code;
        }
        let field = self.ring.field();
        let mut acc = vec![0 as Fe; self.n];
        for (&ci, pw) in c.iter().zip(&self.powers) {
            if ci == 0 {
                continue;
            }
            for (a, &v) in acc.iter_mut().zip(pw) {
                *a = if self.prime { (*a + ci * v) % self.p } else { field.add(*a, field.mul(ci, v)) };
            }
        }
        self.code_of_reduced(&acc)
    }
}

#[derive(Debug)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// `(F_q[T]/(f))^*` with a verified direct-product decomposition and a discrete-log table.
#[derive(Debug)]
pub struct UnitGroup {
    ring: PolyRing,
    modulus: Poly,
    factorization: Vec<(Poly, u32)>,
    gens: Vec<Poly>,
    orders: Vec<u64>,
    strides: Vec<u64>,
    order: u64,
    exponent: u64,
    lookup: Lookup,
    /// Residue code of each group element, by index.
    codes: Vec<u64>,
    reducer: Reducer,
}

struct ResidueGroup<'a> {
    ring: &'a PolyRing,
    modulus: &'a Poly,
}

impl GroupOps for ResidueGroup<'_> {
    type Elem = Poly;
    fn identity(&self) -> Poly {
        self.ring.rem(&Poly::one(), self.modulus)
    }
    fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.ring.mulmod(a, b, self.modulus)
    }
}

/// A generator of `(F_q[T]/(pi))^*`, first in canonical order.
pub fn primitive_root(ring: &PolyRing, pi: &Poly) -> Poly {
    let d = pi.deg().expect("irreducible of positive degree");
    let n = ring.q().pow(d as u32) - 1;
    let primes: Vec<u64> = factor_u64(n).into_iter().map(|(r, _)| r).collect();
    for g in ring.polys_up_to(d as i64 - 1).filter(|g| !g.is_zero()) {
        if primes.iter().all(|&r| !ring.powmod(&g, n / r, pi).is_one()) {
            return g;
        }
    }
    unreachable!("finite fields have primitive roots")
}

impl UnitGroup {
    pub fn new(ring: &PolyRing, f: &Poly) -> Result<UnitGroup, CharError> {
        if f.is_zero() {
            return Err(CharError::ZeroModulus);
        }
        let modulus = ring.monic(f);
        let phi = ring.euler_phi(&modulus)?;
        if phi > GROUP_GATE {
            return Err(CharError::GroupTooLarge(phi));
        }
        let phi = phi as u64;
        let factorization = ring.factor(&modulus)?;
        let grp = ResidueGroup { ring, modulus: &modulus };
        let q = ring.q();
        // Component generators lifted through CRT idempotents.
        let mut cyclic: Vec<(Poly, u64)> = Vec::new();
        let mut one_unit_cands: Vec<Poly> = Vec::new();
        for (pi, e) in &factorization {
            let pe = ring.pow(pi, *e as u64);
            let rest = ring.exact_div(&modulus, &pe);
            let idem = ring.mul(&rest, &ring.inv_mod(&rest, &pe).expect("coprime CRT parts"));
            let lift = |g: &Poly| ring.rem(&ring.add(&Poly::one(), &ring.mul(&ring.sub(g, &Poly::one()), &idem)), &modulus);
            let d = pi.deg().unwrap();
            let one_units = q.pow(d as u32 * (e - 1));
            let g0 = primitive_root(ring, pi);
            let g = ring.powmod(&g0, one_units, &pe);
            cyclic.push((lift(&g), q.pow(d as u32) - 1));
            for j in 1..*e {
                let pij = ring.pow(pi, j as u64);
                for i in 0..d {
                    for k in 0..ring.field().n() {
                        let w = ring.field().p().pow(k);
                        let c = ring.add(&Poly::one(), &ring.mul(&Poly::monomial(w, i), &pij));
                        one_unit_cands.push(lift(&ring.rem(&c, &pe)));
                    }
                }
            }
        }
        let (gens, orders): (Vec<Poly>, Vec<u64>) = if one_unit_cands.is_empty() {
            cyclic.into_iter().filter(|(_, o)| *o > 1).unzip()
        } else {
            let cands: Vec<Poly> = cyclic.iter().map(|(g, _)| g.clone()).chain(one_unit_cands).collect();
            let dec = abelian::decompose(&grp, phi, &cands)?;
            (dec.gens, dec.orders)
        };
        let mut strides = Vec::with_capacity(orders.len());
        let mut s = 1u64;
        for &o in &orders {
            strides.push(s);
            s *= o;
        }
        if s != phi {
            return Err(CharError::NotDirect);
        }
        let exponent = orders.iter().fold(1, |acc, &o| lcm_u64(acc, o));
        let n = modulus.deg().unwrap();
        let reducer = Reducer::new(ring, &modulus, 2 * n.max(1) + 16);
        let dec = abelian::Decomposition { gens: gens.clone(), orders: orders.clone() };
        let elems = abelian::enumerate(&grp, &dec);
        let codes: Vec<u64> = elems.iter().map(|e| reducer.code_of_reduced(e.coeffs())).collect();
        let total = q.checked_pow(n as u32);
        let lookup = match total {
            Some(t) if t <= DENSE_GATE => {
                let mut table = vec![NO_UNIT; t as usize];
                for (i, &c) in codes.iter().enumerate() {
                    if table[c as usize] != NO_UNIT {
                        return Err(CharError::NotDirect);
                    }
                    table[c as usize] = i as u32;
                }
                Lookup::Dense(table)
            }
            _ => {
                let mut table = HashMap::with_capacity(codes.len());
                for (i, &c) in codes.iter().enumerate() {
                    if table.insert(c, i as u32).is_some() {
                        return Err(CharError::NotDirect);
                    }
                }
                Lookup::Sparse(table)
            }
        };
        Ok(UnitGroup { ring: ring.clone(), modulus, factorization, gens, orders, strides, order: phi, exponent, lookup, codes, reducer })
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }
    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }
    pub fn factorization(&self) -> &[(Poly, u32)] {
        &self.factorization
    }
    pub fn generators(&self) -> &[Poly] {
        &self.gens
    }
    pub fn orders(&self) -> &[u64] {
        &self.orders
    }
    /// `phi(f)`.
    pub fn order(&self) -> u64 {
        self.order
    }
    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }
    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }
    pub fn residue_count(&self) -> u64 {
        self.ring.q().pow(self.modulus.deg().unwrap() as u32)
    }
    /// Residue code of group element `idx`.
    pub fn code_of_index(&self, idx: u64) -> u64 {
        self.codes[idx as usize]
    }
    /// Group element `idx` as a reduced residue.
    pub fn element(&self, idx: u64) -> Poly {
        let n = self.modulus.deg().unwrap();
        let mut c = Vec::with_capacity(n);
        let mut x = self.codes[idx as usize];
        for _ in 0..n {
            c.push(x % self.ring.q());
            x /= self.ring.q();
        }
        Poly::new(c)
    }

    /// Group index of the residue with code `code`, if it is a unit.
    #[inline]
    pub fn index_of_code(&self, code: u64) -> Option<u64> {
        let v = match &self.lookup {
            Lookup::Dense(t) => t[code as usize],
            Lookup::Sparse(m) => m.get(&code).copied().unwrap_or(NO_UNIT),
        };
        (v != NO_UNIT).then_some(v as u64)
    }
    /// Discrete-log index of `b`, or `None` if `gcd(b, f) != 1`.
    #[inline]
    pub fn index_of(&self, b: &Poly) -> Option<u64> {
        self.index_of_code(self.reducer.code(b.coeffs()))
    }
    /// Exponent vector of group element `idx`.
    pub fn digits(&self, idx: u64) -> Vec<u64> {
        self.strides.iter().zip(&self.orders).map(|(&s, &o)| (idx / s) % o).collect()
    }
    pub fn index_from_digits(&self, k: &[u64]) -> u64 {
        k.iter().zip(&self.strides).map(|(&a, &s)| a * s).sum()
    }
    /// Index of `g_a * g_b^{-1}`.
    pub fn index_quotient(&self, a: u64, b: u64) -> u64 {
        let mut idx = 0;
        for (&s, &o) in self.strides.iter().zip(&self.orders) {
            let (x, y) = ((a / s) % o, (b / s) % o);
            idx += ((x + o - y) % o) * s;
        }
        idx
    }
    pub fn index_mul(&self, a: u64, b: u64) -> u64 {
        let mut idx = 0;
        for (&s, &o) in self.strides.iter().zip(&self.orders) {
            idx += (((a / s) % o + (b / s) % o) % o) * s;
        }
        idx
    }
    pub fn index_pow(&self, a: u64, e: u64) -> u64 {
        let mut idx = 0;
        for (&s, &o) in self.strides.iter().zip(&self.orders) {
            idx += ((a / s) % o * (e % o) % o) * s;
        }
        idx
    }

    /// Histogram over group indices of the residues of `polys`; non-units are counted separately.
    pub fn histogram<'a>(&self, polys: impl Iterator<Item = &'a [Fe]>) -> (Vec<u64>, u64) {
        let mut hist = vec![0u64; self.order as usize];
        let mut non_units = 0;
        for c in polys {
            match self.index_of_code(self.reducer.code(c)) {
                Some(i) => hist[i as usize] += 1,
                None => non_units += 1,
            }
        }
        (hist, non_units)
    }

    /// Histogram of all nonzero `b` with `deg b <= l`.
    pub fn box_histogram(&self, l: i64) -> (Vec<u64>, u64) {
        let q = self.ring.q();
        let len = (l + 1).max(0) as usize;
        let total = q.pow(len as u32);
        let mut hist = vec![0u64; self.order as usize];
        let mut non_units = 0;
        let mut digits = vec![0 as Fe; len];
        for _ in 1..total {
            for d in digits.iter_mut() {
                *d += 1;
                if *d < q {
                    break;
                }
                *d = 0;
            }
            match self.index_of_code(self.reducer.code(&digits)) {
                Some(i) => hist[i as usize] += 1,
                None => non_units += 1,
            }
        }
        (hist, non_units)
    }

    /// Histogram of the monic irreducibles of degree `n` (raised to the power `e` in the group).
    pub fn prime_histogram(&self, n: usize, e: u64) -> Result<(Vec<u64>, u64), CharError> {
        let list = self.ring.irreducibles(n)?;
        let mut hist = vec![0u64; self.order as usize];
        let mut non_units = 0;
        let mut buf = Vec::with_capacity(n + 1);
        for i in 0..list.len() {
            list.decode_into(i, &mut buf);
            match self.index_of_code(self.reducer.code(&buf)) {
                Some(idx) => hist[self.index_pow(idx, e) as usize] += 1,
                None => non_units += 1,
            }
        }
        Ok((hist, non_units))
    }

    pub fn characters(self: &Arc<Self>) -> impl Iterator<Item = DirichletChar> + '_ {
        (0..self.order).map(move |i| DirichletChar::from_index(self, i))
    }
    pub fn character(self: &Arc<Self>, index: u64) -> DirichletChar {
        DirichletChar::from_index(self, index)
    }
}

/// `unit_group_structure`: builds the group behind an `Arc` for character use.
pub fn unit_group_structure(ring: &PolyRing, f: &Poly) -> Result<Arc<UnitGroup>, CharError> {
    UnitGroup::new(ring, f).map(Arc::new)
}

/// A character `chi(g_i) = zeta_{o_i}^{e_i}` of `(F_q[T]/(f))^*`.
#[derive(Debug, Clone)]
pub struct DirichletChar {
    group: Arc<UnitGroup>,
    index: u64,
    exps: Vec<u64>,
    /// `e_i * R / o_i`, the contribution of one step in digit `i`.
    weights: Vec<u64>,
}

impl DirichletChar {
    fn from_index(group: &Arc<UnitGroup>, index: u64) -> DirichletChar {
        let exps = group.digits(index);
        Self::from_exps(group, exps)
    }

    pub fn from_exps(group: &Arc<UnitGroup>, exps: Vec<u64>) -> DirichletChar {
        let r = group.exponent;
        let weights = exps.iter().zip(&group.orders).map(|(&e, &o)| (e % o) * (r / o) % r).collect();
        let index = group.index_from_digits(&exps);
        DirichletChar { group: group.clone(), index, exps, weights }
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }
    pub fn index(&self) -> u64 {
        self.index
    }
    pub fn exps(&self) -> &[u64] {
        &self.exps
    }
    pub fn modulus(&self) -> &Poly {
        &self.group.modulus
    }
    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
    /// Order of the character.
    pub fn order(&self) -> u64 {
        self.exps.iter().zip(&self.group.orders).fold(1, |acc, (&e, &o)| lcm_u64(acc, o / gcd_u64(e, o)))
    }
    pub fn conj(&self) -> DirichletChar {
        let exps = self.exps.iter().zip(&self.group.orders).map(|(&e, &o)| (o - e) % o).collect();
        Self::from_exps(&self.group, exps)
    }
    /// Root-of-unity order R in which values are expressed.
    pub fn value_order(&self) -> u64 {
        self.group.exponent
    }
    /// `m` with `chi(g) = zeta_R^m` for group element `idx`.
    #[inline]
    pub fn exp_at_index(&self, idx: u64) -> u64 {
        let g = &self.group;
        let mut m = 0;
        for ((&s, &o), &w) in g.strides.iter().zip(&g.orders).zip(&self.weights) {
            m += ((idx / s) % o) * w;
        }
        m % g.exponent
    }
    /// Exact value of `chi(b)`: `None` when `gcd(b, f) != 1`.
    pub fn eval_exp(&self, b: &Poly) -> Option<u64> {
        self.group.index_of(b).map(|i| self.exp_at_index(i))
    }
    pub fn eval(&self, b: &Poly) -> Complex64 {
        self.eval_exp(b).map_or(Complex64::new(0.0, 0.0), |m| root_of_unity(self.group.exponent, m))
    }

    /// `sum_g hist[g] chi(g)` with exact exponent bins.
    pub fn sum_histogram(&self, hist: &[u64]) -> CycloSum {
        let g = &self.group;
        let r = g.exponent;
        let mut sum = CycloSum::new(r);
        let mut digits = vec![0u64; g.orders.len()];
        let mut m = 0u64;
        for &h in hist {
            if h != 0 {
                sum.add(m, h as i64);
            }
            // Odometer: a full wrap of digit i adds o_i * w_i = 0 mod R.
            for (i, d) in digits.iter_mut().enumerate() {
                *d += 1;
                m = (m + self.weights[i]) % r;
                if *d < g.orders[i] {
                    break;
                }
                *d = 0;
            }
        }
        sum
    }

    /// The character mod `group` induced by `self` through reduction mod a multiple of its modulus.
    pub fn induce(&self, group: &Arc<UnitGroup>) -> DirichletChar {
        let small = self.modulus();
        let ring = &group.ring;
        assert!(ring.divides(small, &group.modulus), "induced modulus must be a multiple");
        let r = self.group.exponent;
        let exps = group
            .gens
            .iter()
            .zip(&group.orders)
            .map(|(g, &o)| {
                let m = self.eval_exp(g).expect("generator is coprime to the divisor");
                // zeta_R^m = zeta_o^e
                (m * o / r) % o
            })
            .collect();
        Self::from_exps(group, exps)
    }
}

/// `sum_{b != 0, deg b <= l} conj(chi)(b)`.
pub fn box_char_sum(chi: &DirichletChar, l: i64) -> CycloSum {
    let (hist, _) = chi.group.box_histogram(l);
    chi.conj().sum_histogram(&hist)
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthogonalityReport {
    pub modulus: String,
    pub phi: u64,
    pub pairs_checked: u64,
    pub sampled: bool,
    pub max_deviation: f64,
    pub pass: bool,
}

/// Checks `sum_chi chi(b1) conj(chi(b2)) = phi(f) [b1 = b2 coprime]` over residue pairs.
pub fn orthogonality_report(group: &Arc<UnitGroup>) -> OrthogonalityReport {
    let phi = group.order;
    let residues = group.residue_count();
    let r = group.exponent;
    let full = (phi as u128) * (phi as u128) <= 1_000_000;
    let mut max_dev: f64 = 0.0;
    let mut pairs = 0u64;
    if full {
        // S(d) = sum_chi chi(g_d), then every table entry is some S(d) or zero.
        let mut s = Vec::with_capacity(phi as usize);
        for d in 0..phi {
            let as_char = DirichletChar::from_exps(group, group.digits(d));
            let ones = vec![1u64; phi as usize];
            s.push(as_char.sum_histogram(&ones).to_complex());
        }
        let idx: Vec<Option<u64>> = (0..residues).map(|c| group.index_of_code(c)).collect();
        for (c1, i1) in idx.iter().enumerate() {
            for (c2, i2) in idx.iter().enumerate() {
                let (val, want) = match (i1, i2) {
                    (Some(a), Some(b)) => (s[group.index_quotient(*a, *b) as usize], if c1 == c2 { phi as f64 } else { 0.0 }),
                    _ => (Complex64::new(0.0, 0.0), 0.0),
                };
                max_dev = max_dev.max((val - want).norm());
                pairs += 1;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0a7e);
        for _ in 0..10_000 {
            let (c1, c2) = (rng.gen_range(0..residues), rng.gen_range(0..residues));
            let (val, want) = match (group.index_of_code(c1), group.index_of_code(c2)) {
                (Some(a), Some(b)) => {
                    let d = group.index_quotient(a, b);
                    let mut acc = CycloSum::new(r);
                    for chi in group.characters() {
                        acc.add(chi.exp_at_index(d), 1);
                    }
                    (acc.to_complex(), if c1 == c2 { phi as f64 } else { 0.0 })
                }
                _ => (Complex64::new(0.0, 0.0), 0.0),
            };
            max_dev = max_dev.max((val - want).norm());
            pairs += 1;
        }
    }
    OrthogonalityReport {
        modulus: group.ring.fmt(&group.modulus),
        phi,
        pairs_checked: pairs,
        sampled: !full,
        max_deviation: max_dev,
        pass: max_dev <= 1e-9,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffcore::Field;

    fn ring7() -> PolyRing {
        PolyRing::new(Field::new(7, 1).unwrap())
    }

    #[test]
    fn structure_examples() {
        let r = ring7();
        let g = unit_group_structure(&r, &Poly::t()).unwrap();
        assert_eq!(g.orders(), &[6]);
        assert_eq!(g.generators()[0], Poly::constant(3));
        // Oracle: 3 has order 6 mod 7 by repeated multiplication.
        let mut x = 1u64;
        let ord = (1..=6).find(|_| {
            x = x * 3 % 7;
            x == 1
        });
        assert_eq!(ord, Some(6));
        let g2 = unit_group_structure(&r, &r.parse("T^2+T").unwrap()).unwrap();
        assert_eq!(g2.orders(), &[6, 6]);
        assert_eq!(g2.order(), 36);
        assert_eq!(unit_group_structure(&r, &Poly::zero()).unwrap_err(), CharError::ZeroModulus);
    }

    #[test]
    fn generators_have_listed_orders() {
        let r = ring7();
        for f in ["T^3", "T^2*(T+1)", "(T^2+1)^2"] {
            let poly = match f {
                "T^3" => r.parse("T^3").unwrap(),
                "T^2*(T+1)" => r.mul(&r.parse("T^2").unwrap(), &r.parse("T+1").unwrap()),
                _ => r.pow(&r.parse("T^2+1").unwrap(), 2),
            };
            let g = unit_group_structure(&r, &poly).unwrap();
            assert_eq!(g.order() as u128, r.euler_phi(&poly).unwrap());
            for (gen, &o) in g.generators().iter().zip(g.orders()) {
                assert!(r.powmod(gen, o, &poly).is_one());
                for (p, _) in factor_u64(o) {
                    assert!(!r.powmod(gen, o / p, &poly).is_one());
                }
            }
        }
    }

    #[test]
    fn quadratic_character_mod_t() {
        let r = ring7();
        let g = unit_group_structure(&r, &Poly::t()).unwrap();
        let chi = g.characters().find(|c| c.order() == 2).unwrap();
        for c in 1..7u64 {
            let b = r.parse(&format!("T^2+{c}")).unwrap();
            let want = if [1, 2, 4].contains(&c) { 1.0 } else { -1.0 };
            assert!((chi.eval(&b) - Complex64::new(want, 0.0)).norm() < 1e-12);
        }
        assert_eq!(chi.eval_exp(&r.parse("T^2+T").unwrap()), None);
    }

    #[test]
    fn box_sums() {
        let r = ring7();
        let g = unit_group_structure(&r, &r.parse("T^2").unwrap()).unwrap();
        let chi0 = g.character(0);
        assert!(chi0.is_principal());
        let s = box_char_sum(&chi0, 1);
        assert_eq!(crate::cyclo::round_integer(s.to_complex(), 1e-9), Some(42));
        let g1 = unit_group_structure(&r, &Poly::t()).unwrap();
        for chi in g1.characters().skip(1) {
            assert!(box_char_sum(&chi, 0).to_complex().norm() < 1e-9);
        }
    }

    #[test]
    fn orthogonality_t_t_plus_1() {
        let r = ring7();
        let g = unit_group_structure(&r, &r.parse("T^2+T").unwrap()).unwrap();
        let rep = orthogonality_report(&g);
        assert!(!rep.sampled);
        assert_eq!(rep.pairs_checked, 49 * 49);
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn reducer_agrees_with_rem() {
        let r = ring7();
        let f = r.parse("T^3+2*T+5").unwrap();
        let red = Reducer::new(&r, &f, 10);
        for b in r.polys_up_to(4).step_by(37) {
            let rem = r.rem(&b, &f);
            assert_eq!(red.code(b.coeffs()), red.code_of_reduced(rem.coeffs()));
        }
        let r9 = PolyRing::new(Field::new(3, 2).unwrap());
        let f9 = r9.parse("T^2+T+{0,1}").unwrap();
        let red9 = Reducer::new(&r9, &f9, 4);
        let b = r9.parse("{1,2}*T^4+T+1").unwrap();
        assert_eq!(red9.code(b.coeffs()), red9.code_of_reduced(r9.rem(&b, &f9).coeffs()));
    }
}
