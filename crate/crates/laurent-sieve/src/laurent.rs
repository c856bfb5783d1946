//! The completion F_q((1/T)): exact lazily extended series, the distance to A,
//! continued fractions and the box solver over F_q(T).

use std::fmt;
use std::sync::{Arc, Mutex, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::checked_pow;
use crate::ffcore::{Fe, Field};
use crate::polyring::{Poly, PolyError, PolyRing, QPower};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("precision window cannot certify the value (needed degree {needed})")]
    InsufficientPrecision { needed: i64 },
    #[error("product condition violated: N*d + M*e = {got}, expected {expected}")]
    ProductConditionViolated { got: i64, expected: i64 },
    #[error("search space q^{exponent} exceeds the gate")]
    SearchSpaceTooLarge { exponent: u64 },
    #[error("box search found no solution; the existence theorem guarantees one")]
    InternalInfeasible,
    #[error("bad alpha spec {0:?}")]
    BadAlphaSpec(String),
    #[error("matrix shape does not match")]
    Shape,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Largest truncation precision the continued-fraction routine will try.
pub const MAX_CF_PRECISION: i64 = 4096;
/// Gate on the box solver's search space.
pub const BOX_SEARCH_GATE: u64 = 100_000_000;

/// Partial-quotient rule of a series defined by its continued fraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuotientRule {
    /// Every partial quotient, `a_0` included, equals T.
    Golden,
    /// `a_0 = 0`, then seeded random quotients of degree 1 or 2.
    Seeded(u64),
    /// Finitely many quotients; the series is rational.
    Finite(Vec<Poly>),
}

type CoeffFn = Arc<dyn Fn(i64) -> Fe + Send + Sync>;

enum Source {
    Zero,
    Closed(CoeffFn),
    Rational { num: Poly, den: Poly },
    ContinuedFraction { rule: QuotientRule, state: Mutex<(ChaCha8Rng, Vec<Poly>)> },
    Linear { terms: Vec<(Poly, LaurentSeries)>, poly: Poly },
}

struct Shared {
    label: String,
    source: Source,
    /// Every coefficient above `hi` vanishes.
    hi: i64,
    /// Coefficients for degrees `hi, hi-1, ...` replaced wholesale on extension.
    window: RwLock<Arc<Vec<Fe>>>,
}

/// An element of F_q((1/T)) whose coefficients are produced exactly on demand.
#[derive(Clone)]
pub struct LaurentSeries {
    ring: PolyRing,
    inner: Arc<Shared>,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({})", self.inner.label)
    }
}

/// Outcome of reading `||x||` from a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormDist {
    Exact(QPower),
    /// Coefficients at degrees `-1 ..= floor` all vanish, so `||x|| < q^floor`.
    Below(i64),
}

impl NormDist {
    /// Decides `||x|| <= q^e` when the window allows it.
    pub fn at_most(self, e: i64) -> Option<bool> {
        match self {
            NormDist::Exact(v) => Some(v <= QPower::pow(e)),
            NormDist::Below(floor) => {
                if floor <= e + 1 {
                    Some(true)
                } else {
                    None
                }
            }
        }
    }
    /// Exponent `k` with `||x|| = q^k`, if certified.
    pub fn exponent(self) -> Option<i64> {
        match self {
            NormDist::Exact(v) => v.exponent(),
            NormDist::Below(_) => None,
        }
    }
}

/// Reads `||x||` from fractional coefficients `frac[i] = x_{-1-i}`.
pub fn norm_from_frac(frac: &[Fe]) -> NormDist {
    match frac.iter().position(|&c| c != 0) {
        Some(i) => NormDist::Exact(QPower::pow(-1 - i as i64)),
        None => NormDist::Below(-(frac.len() as i64)),
    }
}

/// Fractional coefficients of `f * x` down to `depth`, given those of `x`
/// (`frac[i] = x_{-1-i}`, at least `depth + deg f` entries).
pub fn product_frac(field: &Field, f: &[Fe], frac: &[Fe], depth: usize, out: &mut Vec<Fe>) {
    out.clear();
    for i in 0..depth {
        // (f x)_{-1-i} = sum_t f_t x_{-1-i-t}
        let mut acc = 0;
        for (t, &ft) in f.iter().enumerate() {
            if ft != 0 {
                acc = field.add(acc, field.mul(ft, frac[i + t]));
            }
        }
        out.push(acc);
    }
}

/// Fast test of `||f x|| <= q^(-m)` from the fractional window of `x`.
#[inline]
pub fn product_within(field: &Field, f: &[Fe], frac: &[Fe], m: usize) -> bool {
    (0..m.saturating_sub(1)).all(|i| {
        let mut acc = 0;
        for (t, &ft) in f.iter().enumerate() {
            if ft != 0 {
                acc = field.add(acc, field.mul(ft, frac[i + t]));
            }
        }
        acc == 0
    })
}

/// Coefficients of `num/den` for degrees `hi` down to `lo`.
fn expand_rational(ring: &PolyRing, num: &Poly, den: &Poly, hi: i64, lo: i64) -> Vec<Fe> {
    if lo > hi {
        return Vec::new();
    }
    let s = -lo;
    let quot = if s >= 0 {
        ring.quo(&ring.shift(num, s as usize), den)
    } else {
        ring.quo(num, &ring.shift(den, (-s) as usize))
    };
    (lo..=hi).rev().map(|k| quot.coeff((k + s) as usize)).collect()
}

fn next_quotient(rule: &QuotientRule, q: u64, rng: &mut ChaCha8Rng, index: usize) -> Option<Poly> {
    match rule {
        QuotientRule::Golden => Some(Poly::t()),
        QuotientRule::Seeded(_) => {
            if index == 0 {
                return Some(Poly::zero());
            }
            let deg = rng.gen_range(1..=2usize);
            let mut c: Vec<Fe> = (0..deg).map(|_| rng.gen_range(0..q)).collect();
            c.push(rng.gen_range(1..q));
            Some(Poly::new(c))
        }
        QuotientRule::Finite(v) => v.get(index).cloned(),
    }
}

/// Convergent numerators and denominators for quotients `a_0..a_n`.
fn convergents_from(ring: &PolyRing, quotients: &[Poly]) -> Vec<(Poly, Poly)> {
    let mut out: Vec<(Poly, Poly)> = Vec::with_capacity(quotients.len());
    for (j, a) in quotients.iter().enumerate() {
        let (p2, q2) = if j >= 2 { out[j - 2].clone() } else { (Poly::one(), Poly::zero()) };
        let next = if j == 0 {
            (a.clone(), Poly::one())
        } else {
            let (p1, q1) = &out[j - 1];
            (ring.add(&ring.mul(a, p1), &p2), ring.add(&ring.mul(a, q1), &q2))
        };
        out.push(next);
    }
    out
}

/// Partial quotients of `num/den` by exact Euclid.
fn euclid_quotients(ring: &PolyRing, num: &Poly, den: &Poly) -> Vec<Poly> {
    let (mut a, mut b) = (num.clone(), den.clone());
    let mut out = Vec::new();
    while !b.is_zero() {
        let (quot, r) = ring.divmod(&a, &b).expect("nonzero");
        out.push(quot);
        a = b;
        b = r;
    }
    out
}

impl LaurentSeries {
    fn build(ring: &PolyRing, label: String, source: Source, hi: i64) -> LaurentSeries {
        LaurentSeries {
            ring: ring.clone(),
            inner: Arc::new(Shared { label, source, hi, window: RwLock::new(Arc::new(Vec::new())) }),
        }
    }

    pub fn zero(ring: &PolyRing) -> LaurentSeries {
        Self::build(ring, "0".into(), Source::Zero, -1)
    }

    /// Series with coefficient `coeff(k)` at degree `k`, zero above `hi`.
    pub fn from_fn(ring: &PolyRing, label: &str, hi: i64, coeff: impl Fn(i64) -> Fe + Send + Sync + 'static) -> Self {
        Self::build(ring, label.into(), Source::Closed(Arc::new(coeff)), hi)
    }

    /// Coefficient 1 at every degree `-i^2`, `i >= 1`.
    pub fn lacunary(ring: &PolyRing) -> LaurentSeries {
        Self::from_fn(ring, "lacunary", -1, |k| {
            if k >= 0 {
                return 0;
            }
            let n = (-k) as u64;
            let r = (n as f64).sqrt().round() as u64;
            Fe::from(r * r == n)
        })
    }

    pub fn rational(ring: &PolyRing, num: &Poly, den: &Poly) -> Result<LaurentSeries, LaurentError> {
        if den.is_zero() {
            return Err(PolyError::DivideByZero.into());
        }
        let label = format!("rational:{}/{}", ring.fmt(num), ring.fmt(den));
        if num.is_zero() {
            return Ok(Self::build(ring, label, Source::Zero, -1));
        }
        let hi = num.deg_i64() - den.deg_i64();
        Ok(Self::build(ring, label, Source::Rational { num: num.clone(), den: den.clone() }, hi))
    }

    pub fn polynomial(ring: &PolyRing, p: &Poly) -> LaurentSeries {
        Self::rational(ring, p, &Poly::one()).expect("nonzero denominator")
    }

    pub fn from_quotients(ring: &PolyRing, rule: QuotientRule) -> LaurentSeries {
        let (label, hi, seed) = match &rule {
            QuotientRule::Golden => ("golden".to_string(), 1, 0),
            QuotientRule::Seeded(s) => (format!("seed:{s}"), -1, *s),
            QuotientRule::Finite(v) => {
                let list: Vec<String> = v.iter().map(|a| ring.fmt(a)).collect();
                (format!("cf:[{}]", list.join(";")), v.first().map_or(-1, |a| a.deg_i64().max(-1)), 0)
            }
        };
        let state = Mutex::new((ChaCha8Rng::seed_from_u64(seed), Vec::new()));
        Self::build(ring, label, Source::ContinuedFraction { rule, state }, hi)
    }

    /// `sum_i f_i x_i + m`.
    pub fn linear(ring: &PolyRing, terms: Vec<(Poly, LaurentSeries)>, poly: Poly) -> LaurentSeries {
        let hi = terms
            .iter()
            .filter(|(f, _)| !f.is_zero())
            .map(|(f, x)| f.deg_i64() + x.inner.hi)
            .chain(std::iter::once(poly.deg_i64()))
            .max()
            .unwrap_or(-1)
            .max(-1);
        let label = format!("linear[{}]", terms.len());
        Self::build(ring, label, Source::Linear { terms, poly }, hi)
    }

    /// Parses `golden`, `lacunary`, `rational:<a>/<f>` or `seed:<u64>`.
    pub fn parse_spec(ring: &PolyRing, spec: &str) -> Result<LaurentSeries, LaurentError> {
        let bad = || LaurentError::BadAlphaSpec(spec.to_string());
        let s = spec.trim();
        match s {
            "golden" => return Ok(Self::from_quotients(ring, QuotientRule::Golden)),
            "lacunary" => return Ok(Self::lacunary(ring)),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("rational:") {
            let (a, f) = rest.split_once('/').ok_or_else(bad)?;
            let a = ring.parse(a).map_err(|_| bad())?;
            let f = ring.parse(f).map_err(|_| bad())?;
            if f.is_zero() {
                return Err(bad());
            }
            return Self::rational(ring, &a, &f);
        }
        if let Some(rest) = s.strip_prefix("seed:") {
            let seed = rest.parse::<u64>().map_err(|_| bad())?;
            return Ok(Self::from_quotients(ring, QuotientRule::Seeded(seed)));
        }
        Err(bad())
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }
    pub fn label(&self) -> &str {
        &self.inner.label
    }
    /// Upper bound on the top degree.
    pub fn degree_bound(&self) -> i64 {
        self.inner.hi
    }

    /// Exact value as a reduced fraction, when the source is rational.
    pub fn as_rational(&self) -> Option<(Poly, Poly)> {
        let ring = &self.ring;
        let (num, den) = match &self.inner.source {
            Source::Zero => (Poly::zero(), Poly::one()),
            Source::Rational { num, den } => (num.clone(), den.clone()),
            Source::ContinuedFraction { rule: QuotientRule::Finite(v), .. } => {
                if v.is_empty() {
                    (Poly::zero(), Poly::one())
                } else {
                    convergents_from(ring, v).pop().expect("nonempty")
                }
            }
            _ => return None,
        };
        let g = ring.gcd_monic(&num, &den);
        let (num, den) = if g.is_zero() { (num, den) } else { (ring.exact_div(&num, &g), ring.exact_div(&den, &g)) };
        let inv = ring.field().inv(den.lead()).expect("nonzero");
        Some((ring.scale(inv, &num), ring.scale(inv, &den)))
    }

    fn compute(&self, lo: i64) -> Vec<Fe> {
        let hi = self.inner.hi;
        let ring = &self.ring;
        let f = ring.field();
        if lo > hi {
            return Vec::new();
        }
        match &self.inner.source {
            Source::Zero => vec![0; (hi - lo + 1) as usize],
            Source::Closed(c) => (lo..=hi).rev().map(|k| c(k)).collect(),
            Source::Rational { num, den } => expand_rational(ring, num, den, hi, lo),
            Source::ContinuedFraction { rule, state } => {
                let mut guard = state.lock().expect("quotient cache");
                let (rng, quotients) = &mut *guard;
                let need = -lo + 1;
                loop {
                    let conv = convergents_from(ring, quotients);
                    let finite = matches!(rule, QuotientRule::Finite(v) if v.len() == quotients.len());
                    // Convergent j agrees with the series on degrees above -(d_j + d_{j+1}).
                    let found = conv.windows(2).position(|w| w[0].1.deg_i64() + w[1].1.deg_i64() >= need);
                    let pick = match found {
                        Some(j) => Some(j),
                        None if finite => conv.len().checked_sub(1),
                        None => None,
                    };
                    if let Some(j) = pick {
                        let (p, q) = &conv[j];
                        return expand_rational(ring, p, q, hi, lo);
                    }
                    if finite {
                        return vec![0; (hi - lo + 1) as usize];
                    }
                    let idx = quotients.len();
                    let a = next_quotient(rule, f.q(), rng, idx).expect("infinite rule");
                    debug_assert!(idx == 0 || a.deg().unwrap_or(0) >= 1, "degenerate partial quotient");
                    quotients.push(a);
                }
            }
            Source::Linear { terms, poly } => {
                let mut out: Vec<Fe> = (lo..=hi).rev().map(|k| if k >= 0 { poly.coeff(k as usize) } else { 0 }).collect();
                for (g, x) in terms {
                    let Some(dg) = g.deg() else { continue };
                    let w = x.window_range(lo - dg as i64, hi);
                    // w[i] is x at degree hi - i
                    for (i, slot) in out.iter_mut().enumerate() {
                        let k = hi - i as i64;
                        let mut acc = *slot;
                        for (t, &gt) in g.coeffs().iter().enumerate() {
                            let idx = (hi - (k - t as i64)) as usize;
                            acc = f.add(acc, f.mul(gt, w[idx]));
                        }
                        *slot = acc;
                    }
                }
                out
            }
        }
    }

    /// Window of coefficients for degrees `hi` down to `lo`, extended (by doubling) as needed.
    fn window_to(&self, lo: i64) -> Arc<Vec<Fe>> {
        let hi = self.inner.hi;
        let need = (hi - lo + 1).max(0) as usize;
        {
            let w = self.inner.window.read().expect("window lock");
            if w.len() >= need {
                return w.clone();
            }
        }
        let current = self.inner.window.read().expect("window lock").len();
        let target = need.max(2 * current).max(16);
        let fresh = Arc::new(self.compute(hi - target as i64 + 1));
        let mut w = self.inner.window.write().expect("window lock");
        if w.len() < fresh.len() {
            *w = fresh;
        }
        w.clone()
    }

    /// Coefficients for degrees `hi` down to `lo` (index 0 is degree `hi`).
    pub fn window_range(&self, lo: i64, hi: i64) -> Vec<Fe> {
        if lo > hi {
            return Vec::new();
        }
        let top = self.inner.hi;
        let w = self.window_to(lo);
        (lo..=hi).rev().map(|k| if k > top { 0 } else { w[(top - k) as usize] }).collect()
    }

    pub fn coeff(&self, k: i64) -> Fe {
        if k > self.inner.hi {
            return 0;
        }
        self.window_to(k)[(self.inner.hi - k) as usize]
    }

    /// `frac[i] = x_{-1-i}` for `i < depth`.
    pub fn frac_window(&self, depth: usize) -> Vec<Fe> {
        self.window_range(-(depth as i64), -1)
    }

    /// Coefficients of degree `>= 0`, as a polynomial.
    pub fn poly_part(&self) -> Poly {
        let hi = self.inner.hi;
        if hi < 0 {
            return Poly::zero();
        }
        let mut w = self.window_range(0, hi);
        w.reverse();
        Poly::new(w)
    }

    /// Top nonzero degree, searched down to `floor`.
    pub fn top_degree(&self, floor: i64) -> Option<i64> {
        let hi = self.inner.hi;
        let w = self.window_range(floor, hi);
        w.iter().position(|&c| c != 0).map(|i| hi - i as i64)
    }

    /// `||x||` read from degrees `-1 ..= floor`.
    pub fn norm_dist(&self, floor: i64) -> NormDist {
        norm_from_frac(&self.frac_window((-floor).max(0) as usize))
    }

    /// `||x||` exactly, or an error when the window down to `floor` is all zero
    /// and the source is not known to be rational.
    pub fn norm_dist_exact(&self, floor: i64) -> Result<QPower, LaurentError> {
        match self.norm_dist(floor) {
            NormDist::Exact(v) => Ok(v),
            NormDist::Below(_) => match self.as_rational() {
                Some((_, den)) if den.deg() == Some(0) => Ok(QPower::ZERO),
                _ => Err(LaurentError::InsufficientPrecision { needed: floor - 1 }),
            },
        }
    }

    /// Continued-fraction convergents with denominator degree at most `max_deg_f`.
    pub fn continued_fraction(&self, max_deg_f: usize) -> Result<Vec<Convergent>, LaurentError> {
        let ring = &self.ring;
        if let Some((num, den)) = self.as_rational() {
            let quotients = euclid_quotients(ring, &num, &den);
            let conv = convergents_from(ring, &quotients);
            let n = conv.len();
            let mut out = Vec::new();
            for j in 0..n {
                let dj = conv[j].1.deg_i64();
                if dj > max_deg_f as i64 {
                    break;
                }
                let quality = if j + 1 == n {
                    QPower::ZERO
                } else {
                    QPower::pow(-(dj + conv[j + 1].1.deg_i64()))
                };
                out.push(Convergent::normalized(ring, &conv[j], j, quality, quotients[j].clone()));
            }
            return Ok(out);
        }
        let max = max_deg_f as i64;
        let mut prec = 2 * max + 2;
        loop {
            let hi = self.inner.hi.max(0);
            // r = sum_{k >= -prec} x_k T^k = num / T^prec
            let w = self.window_range(-prec, hi);
            let mut c: Vec<Fe> = w.clone();
            c.reverse();
            let num = Poly::new(c);
            let den = Poly::monomial(1, prec as usize);
            let quotients = euclid_quotients(ring, &num, &den);
            let conv = convergents_from(ring, &quotients);
            let mut out = Vec::new();
            let mut complete = false;
            for j in 0..conv.len().saturating_sub(1) {
                let dj = conv[j].1.deg_i64();
                let dn = conv[j + 1].1.deg_i64();
                if dj + dn > prec {
                    break;
                }
                if dj > max {
                    complete = true;
                    break;
                }
                assert!(j == 0 || quotients[j].deg().unwrap_or(0) >= 1, "degenerate partial quotient");
                out.push(Convergent::normalized(ring, &conv[j], j, QPower::pow(-(dj + dn)), quotients[j].clone()));
                if dn > max {
                    complete = true;
                    break;
                }
            }
            if complete {
                return Ok(out);
            }
            if prec >= MAX_CF_PRECISION {
                return Err(LaurentError::InsufficientPrecision { needed: -2 * prec });
            }
            prec = (2 * prec).min(MAX_CF_PRECISION);
        }
    }
}

/// A convergent `a/f` of a series, normalized with `f` monic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergent {
    pub index: usize,
    pub a: Poly,
    pub f: Poly,
    /// The partial quotient `a_index`.
    pub quotient: Poly,
    /// `|alpha - a/f|`.
    pub quality: QPower,
}

impl Convergent {
    fn normalized(ring: &PolyRing, pq: &(Poly, Poly), index: usize, quality: QPower, quotient: Poly) -> Self {
        let inv = ring.field().inv(pq.1.lead()).expect("nonzero denominator");
        Convergent { index, a: ring.scale(inv, &pq.0), f: ring.scale(inv, &pq.1), quotient, quality }
    }
}

/// A solution of the box system over F_q(T).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoxSolution {
    pub x: Vec<Poly>,
    pub y: Vec<Poly>,
    /// `||(A x)_i||` for each row.
    pub residuals: Vec<NormDist>,
    /// Number of candidates examined, the solution included.
    pub examined: u64,
}

/// First nonzero `x` (lexicographic, `x_1` most significant) with `deg x_j <= d`
/// and `||(A x)_i|| <= q^e` for all rows; `y = -polypart(A x)`.
pub fn adelic_box_solve_k(a: &[Vec<LaurentSeries>], eps_exp: i64, delta_exp: i64) -> Result<BoxSolution, LaurentError> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    if m == 0 || n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(LaurentError::Shape);
    }
    let (mi, ni) = (m as i64, n as i64);
    let got = ni * delta_exp + mi * eps_exp;
    let expected = -(mi + ni) + 1;
    if got != expected || delta_exp < 0 {
        return Err(LaurentError::ProductConditionViolated { got, expected });
    }
    let ring = a[0][0].ring().clone();
    let field = ring.field().clone();
    let q = field.q();
    let d = delta_exp as usize;
    let exponent = (n * (d + 1)) as u64;
    let total = checked_pow(q, exponent as u32).filter(|&t| t <= BOX_SEARCH_GATE).ok_or(LaurentError::SearchSpaceTooLarge { exponent })?;
    // Conditions: coefficient of (A x)_i at degrees -1 ..= eps_exp + 1 vanish.
    let depth = (-eps_exp - 1).max(0) as usize;
    let fracs: Vec<Vec<Vec<Fe>>> = a.iter().map(|row| row.iter().map(|s| s.frac_window(depth + d)).collect()).collect();
    // Per-component candidate order: canonical polynomial order of degree <= d.
    let comps: Vec<Poly> = ring.polys_up_to(d as i64).collect();
    let per = comps.len() as u64;
    let mut digits = vec![0usize; n];
    let mut buf = Vec::new();
    for idx in 1..total {
        let mut rest = idx;
        for j in (0..n).rev() {
            digits[j] = (rest % per) as usize;
            rest /= per;
        }
        let ok = (0..m).all(|i| {
            let mut acc = vec![0 as Fe; depth];
            for (j, &dj) in digits.iter().enumerate() {
                product_frac(&field, comps[dj].coeffs(), &fracs[i][j], depth, &mut buf);
                for (s, &v) in acc.iter_mut().zip(&buf) {
                    *s = field.add(*s, v);
                }
            }
            acc.iter().all(|&c| c == 0)
        });
        if ok {
            let x: Vec<Poly> = digits.iter().map(|&dj| comps[dj].clone()).collect();
            let mut y = Vec::with_capacity(m);
            let mut residuals = Vec::with_capacity(m);
            for row in a {
                let terms = row.iter().cloned().zip(x.iter().cloned()).map(|(s, p)| (p, s)).collect();
                let ax = LaurentSeries::linear(&ring, terms, Poly::zero());
                y.push(ring.neg(&ax.poly_part()));
                residuals.push(ax.norm_dist(-(depth as i64) - 8));
            }
            return Ok(BoxSolution { x, y, residuals, examined: idx });
        }
    }
    Err(LaurentError::InternalInfeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring7() -> PolyRing {
        PolyRing::new(Field::new(7, 1).unwrap())
    }

    #[test]
    fn norm_dist_examples() {
        let r = ring7();
        let x = LaurentSeries::from_fn(&r, "T+3T^-2", 1, |k| match k {
            1 => 1,
            -2 => 3,
            _ => 0,
        });
        assert_eq!(x.norm_dist(-20), NormDist::Exact(QPower::pow(-2)));
        let t2 = LaurentSeries::polynomial(&r, &r.parse("T^2").unwrap());
        assert_eq!(t2.norm_dist(-50), NormDist::Below(-50));
        assert_eq!(t2.norm_dist_exact(-50), Ok(QPower::ZERO));
        let inv_t = LaurentSeries::rational(&r, &Poly::one(), &Poly::t()).unwrap();
        assert_eq!(inv_t.norm_dist(-5), NormDist::Exact(QPower::pow(-1)));
        let lac = LaurentSeries::lacunary(&r);
        assert_eq!(lac.coeff(-9), 1);
        assert_eq!(lac.coeff(-8), 0);
    }

    #[test]
    fn rational_expansion_by_hand() {
        let r = ring7();
        // 1/(T-1) = T^-1 + T^-2 + ...
        let x = LaurentSeries::rational(&r, &Poly::one(), &r.parse("T-1").unwrap()).unwrap();
        assert_eq!(x.window_range(-5, -1), vec![1; 5]);
        assert_eq!(x.top_degree(-10), Some(-1));
    }

    #[test]
    fn rational_cf_terminates() {
        let r = ring7();
        let x = LaurentSeries::parse_spec(&r, "rational:T+1/T").unwrap();
        let cf = x.continued_fraction(10).unwrap();
        let last = cf.last().unwrap();
        assert_eq!(last.quality, QPower::ZERO);
        assert_eq!((last.a.clone(), last.f.clone()), (r.parse("T+1").unwrap(), Poly::t()));
    }

    #[test]
    fn golden_quality_by_direct_subtraction() {
        let r = ring7();
        let g = LaurentSeries::parse_spec(&r, "golden").unwrap();
        let cf = g.continued_fraction(6).unwrap();
        assert_eq!(cf.len(), 7);
        for c in &cf {
            let j = c.index as i64;
            assert_eq!(c.f.deg_i64(), j);
            assert_eq!(c.quality, QPower::pow(-(2 * j + 1)));
            // |alpha - a/f| = |f alpha - a| / |f|
            let diff = LaurentSeries::linear(&r, vec![(c.f.clone(), g.clone())], r.neg(&c.a));
            let top = diff.top_degree(-4 * 6 - 4).unwrap();
            assert_eq!(top - c.f.deg_i64(), -(2 * j + 1));
        }
    }

    #[test]
    fn golden_coefficients_satisfy_fixed_point() {
        // alpha = T + 1/alpha, so alpha^2 = T alpha + 1.
        let r = ring7();
        let g = LaurentSeries::parse_spec(&r, "golden").unwrap();
        let w = g.window_range(-30, 1);
        let f = r.field();
        for k in -25..=2i64 {
            let mut sq = 0;
            for i in -30..=1i64 {
                let j = k - i;
                if (-30..=1).contains(&j) {
                    sq = f.add(sq, f.mul(w[(1 - i) as usize], w[(1 - j) as usize]));
                }
            }
            let t_alpha = if k - 1 >= -30 { w[(1 - (k - 1)) as usize] } else { 0 };
            let rhs = f.add(t_alpha, Fe::from(k == 0));
            assert_eq!(sq, rhs, "degree {k}");
        }
    }

    #[test]
    fn box_solver_gates() {
        let r = ring7();
        let g = LaurentSeries::parse_spec(&r, "golden").unwrap();
        let a = vec![vec![g]];
        assert!(matches!(adelic_box_solve_k(&a, -4, 2), Err(LaurentError::ProductConditionViolated { .. })));
        let sol = adelic_box_solve_k(&a, -4, 3).unwrap();
        assert!(sol.residuals[0].at_most(-4).unwrap());
    }
}
