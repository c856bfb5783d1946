//! The prime-ideal approximation argument over an imaginary quadratic K as exact counts.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::classray::{ClassError, ClassGroup, RayClassGroup, ZetaData};
use crate::cyclo::{root_of_unity, round_integer};
use crate::kengine::verify_q_condition;
use crate::quadext::{HalfNormDist, HalfQPower, QuadError, QuadField, QuadIdeal, QuadInt, QuadLaurent};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KQError {
    #[error("epsilon must lie in (0, 1/3), got {0}")]
    BadEpsilon(f64),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("condition c q^(N/2) N(f)^-1 <= q^(-M/2) fails (N = {n}, M = {m}, log N(f) = {l}); advance the frontier")]
    Cond2Violated { n: usize, m: usize, l: usize },
    #[error("q^{0} exceeds the enumeration gate")]
    RangeTooLarge(usize),
    #[error("window too short to decide ||alpha pi|| <= q^(-M/2)")]
    InsufficientPrecision,
    #[error("character sum {0} is not within 1e-6 of an integer")]
    NonIntegerResult(f64),
    #[error("box of {0} elements exceeds the pair-check gate")]
    SearchTooLarge(usize),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Class(#[from] ClassError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KQParams {
    #[serde(skip)]
    pub f: QuadInt,
    #[serde(skip)]
    pub a: QuadInt,
    /// `gcd((a), (f))`.
    #[serde(skip)]
    pub divisor: QuadIdeal,
    /// `D^-1 (f)`.
    #[serde(skip)]
    pub modulus: QuadIdeal,
    pub epsilon: f64,
    pub n: usize,
    pub m: usize,
    pub delta: HalfQPower,
    pub c_half: i64,
    /// `log_q N(modulus)`.
    pub modulus_norm_deg: usize,
    /// Half-exponent of `|f|`.
    pub f_half: i64,
}

impl KQParams {
    /// Box bound on `|b|` as a half-exponent: `|b| <= |f| delta`.
    pub fn box_half(&self) -> i64 {
        self.f_half - self.m as i64
    }
}

const ROUND_SLACK: f64 = 1e-12;

pub fn choose_params(field: &QuadField, f: &QuadInt, a: &QuadInt, epsilon: f64, c_half: i64) -> Result<KQParams, KQError> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 3.0) {
        return Err(KQError::BadEpsilon(epsilon));
    }
    if f.is_zero() {
        return Err(KQError::ZeroDenominator);
    }
    let f_ideal = field.principal(f);
    let divisor = field.ideal_gcd(&field.principal(a), &f_ideal);
    let modulus = field.ideal_divide(&f_ideal, &divisor)?;
    let l = modulus.norm_deg();
    let n = (2.0 * l as f64 / (4.0 / 3.0 - epsilon) + ROUND_SLACK).floor() as usize;
    let m = ((1.0 / 3.0 - epsilon) * n as f64 - ROUND_SLACK).ceil().max(0.0) as usize;
    // c q^(N/2) N(f)^-1 <= q^(-M/2) in half-exponents.
    if n == 0 || c_half.saturating_add((n + m) as i64) > 2 * l as i64 {
        return Err(KQError::Cond2Violated { n, m, l });
    }
    Ok(KQParams {
        f: f.clone(),
        a: a.clone(),
        divisor,
        modulus,
        epsilon,
        n,
        m,
        delta: HalfQPower::half(-(m as i64)),
        c_half,
        modulus_norm_deg: l,
        f_half: field.abs(f).0.expect("nonzero"),
    })
}

/// The representative of `x + (f)` of least absolute value.
///
/// The basis `1, sqrt D` is orthogonal for `|.|`, so reducing `x / f` componentwise is optimal; the
/// minimiser is unique whenever its absolute value is below `|f|`.
pub fn reduce_mod(field: &QuadField, x: &QuadInt, f: &QuadInt) -> QuadInt {
    let r = field.ring();
    let y = field.mul(x, &field.conj(f));
    let nf = field.norm(f);
    let t = QuadInt::new(r.quo(&y.a, &nf), r.quo(&y.b, &nf));
    field.sub(x, &field.mul(f, &t))
}

fn prime_elements(field: &QuadField, n: usize) -> Result<Vec<(QuadInt, QuadIdeal)>, KQError> {
    field.enumerate_prime_elements(n).map_err(|e| match e {
        QuadError::SearchTooLarge(_) => KQError::RangeTooLarge(n),
        e => e.into(),
    })
}

/// `||alpha pi|| <= q^(-M/2)`.
fn metric_ok(field: &QuadField, alpha: &QuadLaurent, pi: &QuadInt, params: &KQParams) -> Result<bool, KQError> {
    let depth = params.n + params.m + 2 * field.deg_d() + 16;
    let bound = -(params.m as i64);
    match field.kinf_norm_dist(&field.mul_laurent(pi, alpha), depth) {
        HalfNormDist::Exact(h) => Ok(h.0.map_or(true, |e| e <= bound)),
        HalfNormDist::AtMost(e) if e <= bound => Ok(true),
        HalfNormDist::AtMost(_) => Err(KQError::InsufficientPrecision),
    }
}

/// Principal primes of norm `q^N` whose canonical generator satisfies `||alpha pi|| <= delta`.
pub fn s_count_metric(field: &QuadField, alpha: &QuadLaurent, params: &KQParams) -> Result<u64, KQError> {
    let primes = prime_elements(field, params.n)?;
    let hits: Result<Vec<bool>, KQError> = primes.par_iter().map(|(pi, _)| metric_ok(field, alpha, pi, params)).collect();
    Ok(hits?.into_iter().filter(|&b| b).count() as u64)
}

/// A metric-side prime with `||alpha pi|| = q^(k/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KWitness {
    pub n: usize,
    #[serde(skip)]
    pub pi: QuadInt,
    pub pi_text: String,
    /// Half-exponent `k`, or the window floor when every examined coefficient vanished.
    pub norm_dist_exponent: i64,
    pub exact: bool,
    /// `-k / N`; compare with `M / N`, roughly `1/3 - eps`.
    pub exponent_ratio: f64,
}

/// The primes counted by [`s_count_metric`], best first.
pub fn metric_witnesses(field: &QuadField, alpha: &QuadLaurent, params: &KQParams) -> Result<Vec<KWitness>, KQError> {
    let primes = prime_elements(field, params.n)?;
    let depth = params.n + params.m + 2 * field.deg_d() + 16;
    let bound = -(params.m as i64);
    let rows: Result<Vec<Option<KWitness>>, KQError> = primes
        .par_iter()
        .map(|(pi, _)| {
            let (k, exact) = match field.kinf_norm_dist(&field.mul_laurent(pi, alpha), depth) {
                HalfNormDist::Exact(h) => match h.0 {
                    Some(e) => (e, true),
                    None => (-(2 * depth as i64), false),
                },
                HalfNormDist::AtMost(e) if e <= bound => (e, false),
                HalfNormDist::AtMost(_) => return Err(KQError::InsufficientPrecision),
            };
            Ok((k <= bound).then(|| KWitness {
                n: params.n,
                pi: pi.clone(),
                pi_text: field.fmt_int(pi),
                norm_dist_exponent: k,
                exact,
                exponent_ratio: -k as f64 / params.n as f64,
            }))
        })
        .collect();
    let mut out: Vec<KWitness> = rows?.into_iter().flatten().collect();
    out.sort_by(|x, y| x.norm_dist_exponent.cmp(&y.norm_dist_exponent).then_with(|| x.pi_text.cmp(&y.pi_text)));
    Ok(out)
}

/// Residue `b` of `pi a` counted by the congruence side, if any.
fn congruence_witness(field: &QuadField, pi: &QuadInt, prime: &QuadIdeal, params: &KQParams) -> Option<QuadInt> {
    if field.ideal_divides(prime, &params.modulus) {
        return None;
    }
    let b = reduce_mod(field, &field.mul(pi, &params.a), &params.f);
    if b.is_zero() || field.abs(&b).0.expect("nonzero") > params.box_half() {
        return None;
    }
    (field.ideal_gcd(&field.principal(&b), &field.principal(&params.f)) == params.divisor).then_some(b)
}

/// Principal primes `P` not dividing the modulus with `pi a = b mod f`, `0 < |b| <= |f| delta`, `gcd((b),(f)) = D`.
pub fn s_count_congruence(field: &QuadField, params: &KQParams) -> Result<u64, KQError> {
    let primes = prime_elements(field, params.n)?;
    Ok(primes.par_iter().filter(|(pi, p)| congruence_witness(field, pi, p, params).is_some()).count() as u64)
}

/// Box elements `0 < |b| <= |f| delta` with `gcd((b),(f)) = D`.
pub fn box_elements(field: &QuadField, params: &KQParams) -> Result<Vec<QuadInt>, KQError> {
    let f_ideal = field.principal(&params.f);
    let all = field.elements_up_to(params.box_half())?;
    Ok(all.into_par_iter().filter(|b| field.ideal_gcd(&field.principal(b), &f_ideal) == params.divisor).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CharSideK {
    /// `S2_raw / #U(f)`.
    pub s_chars: u64,
    /// `(1/h(f)) sum_chi chi(A) conj(sum_b chi(B_b)) sum_P chi(P)` with `A = (a) D^-1`, `B_b = (b) D^-1`.
    pub s_chars_raw: u64,
    pub ray_order: u64,
    pub unit_image: u64,
    pub phi: u64,
    pub box_count: u64,
    pub primes_coprime: u64,
    /// `sum_chi |sum_b chi(A B_b^-1)|` over all characters.
    pub box_l1: f64,
    pub box_l1_nonprincipal: f64,
    /// `sum_chi |sum_b chi(A B_b^-1)|^2`.
    pub box_l2_sq: f64,
    pub max_prime_sum_nonprincipal: f64,
}

/// The character-side evaluation of S.
pub fn s_count_chars(classes: &Arc<ClassGroup>, params: &KQParams) -> Result<CharSideK, KQError> {
    let field = classes.field();
    let group = Arc::new(RayClassGroup::new(classes, &params.modulus)?);
    let (prime_hist, _) = group.prime_histogram(params.n).map_err(|e| match e {
        ClassError::RangeTooLarge(_) => KQError::RangeTooLarge(params.n),
        e => e.into(),
    })?;
    let boxes = box_elements(field, params)?;
    let box_idx: Result<Vec<u64>, KQError> = boxes
        .par_iter()
        .map(|b| {
            let ideal = field.ideal_divide(&field.principal(b), &params.divisor)?;
            Ok(group.index_of(&ideal)?.expect("coprime by the gcd condition"))
        })
        .collect();
    let mut box_hist = vec![0u64; group.order() as usize];
    for i in box_idx? {
        box_hist[i as usize] += 1;
    }
    let a_ideal = field.ideal_divide(&field.principal(&params.a), &params.divisor)?;
    let a_idx = group.index_of(&a_ideal)?.expect("coprime by construction");
    let r = group.exponent();
    let terms: Vec<(Complex64, Complex64, f64)> = (0..group.order())
        .into_par_iter()
        .map(|i| {
            let chi = group.character(i);
            let ca = root_of_unity(r, chi.exp_at_index(a_idx));
            let b = ca * chi.conj().sum_histogram(&box_hist).to_complex();
            let p = chi.sum_histogram(&prime_hist).to_complex();
            (b * p, b, p.norm())
        })
        .collect();
    let h = group.order();
    let total: Complex64 = terms.iter().map(|t| t.0).sum::<Complex64>() / h as f64;
    let raw = round_integer(total, 1e-6).ok_or(KQError::NonIntegerResult(total.re))?.max(0) as u64;
    let units = group.unit_image_size();
    if raw % units != 0 {
        return Err(KQError::NonIntegerResult(raw as f64 / units as f64));
    }
    Ok(CharSideK {
        s_chars: raw / units,
        s_chars_raw: raw,
        ray_order: h,
        unit_image: units,
        phi: group.phi,
        box_count: boxes.len() as u64,
        primes_coprime: prime_hist.iter().sum(),
        box_l1: terms.iter().map(|t| t.1.norm()).sum(),
        box_l1_nonprincipal: terms.iter().skip(1).map(|t| t.1.norm()).sum(),
        box_l2_sq: terms.iter().map(|t| t.1.norm_sqr()).sum(),
        max_prime_sum_nonprincipal: terms.iter().skip(1).map(|t| t.2).fold(0.0, f64::max),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub box_count: usize,
    pub pairs: u64,
    pub congruent_pairs: u64,
    /// Pairs with `b2 b1^-1 = 1 mod* f`, by valuations at the primes of the modulus.
    pub multiplicative_pairs: u64,
    /// Pairs whose quotient is congruent to a unit.
    pub unit_congruent_pairs: u64,
    pub chain_agrees: bool,
    pub congruent_implies_equal: bool,
    pub pass: bool,
}

pub const CLAIM_GATE: usize = 3000;

fn valuation(field: &QuadField, powers: &[QuadIdeal], x: &QuadInt) -> usize {
    powers.iter().take_while(|p| field.ideal_contains(p, x)).count()
}

/// Exhaustive check of the pair claim on `0 < |b1|, |b2| <= |f| delta` in the box.
pub fn claim_equivalence_check(field: &QuadField, params: &KQParams) -> Result<ClaimReport, KQError> {
    let boxes = box_elements(field, params)?;
    if boxes.len() > CLAIM_GATE {
        return Err(KQError::SearchTooLarge(boxes.len()));
    }
    let f_ideal = field.principal(&params.f);
    let primes = if params.modulus.is_unit() { Vec::new() } else { field.ideal_factorization(&params.modulus)? };
    // For each P | modulus: P^1, ..., P^(v_P(f) + 1), and the required valuation v_P(modulus).
    let local: Vec<(Vec<QuadIdeal>, usize, usize)> = primes
        .iter()
        .map(|(p, e)| {
            let vf = (1..).take_while(|&k| field.ideal_divides(&field.ideal_pow(p, k), &f_ideal)).count();
            let powers = (1..=vf as u32 + 1).map(|k| field.ideal_pow(p, k)).collect();
            (powers, vf - *e as usize, *e as usize)
        })
        .collect();
    let vals: Vec<Vec<usize>> = boxes.iter().map(|b| local.iter().map(|(pw, _, _)| valuation(field, pw, b)).collect()).collect();
    let units = field.units();
    let rows: Vec<(u64, u64, u64, bool, bool)> = (0..boxes.len())
        .into_par_iter()
        .map(|i| {
            let (mut cong, mut mult, mut unit_cong, mut agree, mut equal) = (0, 0, 0, true, true);
            for j in 0..boxes.len() {
                let diff = field.sub(&boxes[j], &boxes[i]);
                let direct = field.ideal_contains(&f_ideal, &diff);
                let by_val = local.iter().zip(&vals[i]).all(|((pw, _, e), &v1)| valuation(field, pw, &diff) >= v1 + e);
                let b1_ok = local.iter().zip(&vals[i]).all(|((_, vd, _), &v1)| v1 == *vd);
                cong += u64::from(direct);
                mult += u64::from(by_val);
                agree &= direct == by_val && b1_ok;
                equal &= !direct || i == j;
                let uc = units.iter().any(|u| field.ideal_contains(&f_ideal, &field.sub(&boxes[j], &field.mul(u, &boxes[i]))));
                unit_cong += u64::from(uc);
            }
            (cong, mult, unit_cong, agree, equal)
        })
        .collect();
    let congruent_pairs = rows.iter().map(|r| r.0).sum();
    let multiplicative_pairs = rows.iter().map(|r| r.1).sum();
    let unit_congruent_pairs = rows.iter().map(|r| r.2).sum();
    let chain_agrees = rows.iter().all(|r| r.3);
    let congruent_implies_equal = rows.iter().all(|r| r.4);
    Ok(ClaimReport {
        box_count: boxes.len(),
        pairs: (boxes.len() * boxes.len()) as u64,
        congruent_pairs,
        multiplicative_pairs,
        unit_congruent_pairs,
        chain_agrees,
        congruent_implies_equal,
        pass: chain_agrees && congruent_implies_equal,
    })
}

/// Constant in `sum_chi |sum_b chi(a b^-1)| <= K phi(f) N(f)^(1/2) delta`, frozen from the fixtures.
pub fn charsum_constant(field: &QuadField, h: usize) -> f64 {
    h as f64 * field.q() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct KQReport {
    pub q: u64,
    pub d: String,
    pub f: String,
    pub a: String,
    pub divisor: String,
    pub modulus: String,
    pub params: KQParams,
    pub class_number: usize,
    pub s_metric: u64,
    pub s_congruence: u64,
    pub s_chars: u64,
    pub s_chars_raw: u64,
    pub side: CharSideK,
    /// `(1/h(f)) #primes #box`, the principal-character term of the raw sum.
    pub main_raw: f64,
    /// `main_raw / #U(f)`, on the scale of `s_congruence`.
    pub main_exact: f64,
    pub paper_main: f64,
    pub ratio_main_paper: f64,
    pub ratio_congruence_main: f64,
    pub error_observed: f64,
    pub error_bound: f64,
    /// `sqrt(h(f) sum_chi |..|^2)`.
    pub cs_bound: f64,
    /// `h phi(f) (B / #U(f))^(1/2)`, valid once pairs in the box are distinct mod f.
    pub claim_bound: f64,
    /// `phi(f) N(f)^(1/2) delta`.
    pub charsum_shape: f64,
    pub charsum_constant: f64,
    pub chars_agree: bool,
    pub congruence_le_metric: bool,
    pub positive: bool,
    pub charsum_within: bool,
    pub error_within_bound: bool,
    pub ratio_in_band: bool,
    pub q_condition: bool,
    pub pass: bool,
}

/// All three counts of S with the main-term and character-sum comparisons.
pub fn asymptotic_report(classes: &Arc<ClassGroup>, zeta: &ZetaData, alpha: &QuadLaurent, params: &KQParams) -> Result<KQReport, KQError> {
    let field = classes.field();
    let q = field.q();
    let qf = q as f64;
    let s_metric = s_count_metric(field, alpha, params)?;
    let s_congruence = s_count_congruence(field, params)?;
    let side = s_count_chars(classes, params)?;
    let h = classes.h();
    let hf = side.ray_order as f64;
    let main_raw = side.primes_coprime as f64 * side.box_count as f64 / hf;
    let main_exact = main_raw / side.unit_image as f64;
    let ck = zeta.printed_c_k(h as u64);
    let ck = *ck.numer() as f64 / *ck.denom() as f64;
    let (n, m) = (params.n as f64, params.m as f64);
    let paper_main = ck * side.unit_image as f64 / h as f64 * qf.powf(n - m) / n;
    let ratio_main_paper = main_raw / paper_main;
    let error_observed = (side.s_chars_raw as f64 - main_raw).abs();
    let error_bound = side.box_l1_nonprincipal * side.max_prime_sum_nonprincipal / hf;
    let cs_bound = (hf * side.box_l2_sq).sqrt();
    let claim_bound = h as f64 * side.phi as f64 * (side.box_count as f64 / side.unit_image as f64).sqrt();
    let charsum_shape = side.phi as f64 * qf.powf(params.modulus_norm_deg as f64 / 2.0) * params.delta.to_f64(q);
    let k = charsum_constant(field, h);
    let tol = 1e-6 * (1.0 + side.box_l1);
    let charsum_within = side.box_l1 <= cs_bound + tol && cs_bound <= claim_bound + tol && side.box_l1 <= k * charsum_shape + tol;
    let chars_agree = side.s_chars == s_congruence;
    let congruence_le_metric = s_congruence <= s_metric;
    let positive = s_congruence > 0;
    let error_within_bound = error_observed <= error_bound + 1e-6;
    let ratio_in_band = ratio_main_paper >= 1.0 / qf && ratio_main_paper <= qf;
    let q_condition = verify_q_condition(q) && q >= 7;
    Ok(KQReport {
        q,
        d: field.ring().fmt(field.d()),
        f: field.fmt_int(&params.f),
        a: field.fmt_int(&params.a),
        divisor: field.fmt_ideal(&params.divisor),
        modulus: field.fmt_ideal(&params.modulus),
        params: params.clone(),
        class_number: h,
        s_metric,
        s_congruence,
        s_chars: side.s_chars,
        s_chars_raw: side.s_chars_raw,
        main_raw,
        main_exact,
        paper_main,
        ratio_main_paper,
        ratio_congruence_main: s_congruence as f64 / main_exact,
        error_observed,
        error_bound,
        cs_bound,
        claim_bound,
        charsum_shape,
        charsum_constant: k,
        chars_agree,
        congruence_le_metric,
        positive,
        charsum_within,
        error_within_bound,
        ratio_in_band,
        q_condition,
        pass: chars_agree && congruence_le_metric && charsum_within && error_within_bound && (!q_condition || (positive && ratio_in_band)),
        side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classray::{class_group, zeta_numerator};
    use crate::ffcore::Field;
    use crate::laurent::LaurentSeries;
    use crate::polyring::PolyRing;

    fn field(q: u64, d: &str) -> QuadField {
        let r = PolyRing::new(Field::new(q, 1).unwrap());
        QuadField::new(&r, &r.parse(d).unwrap()).unwrap()
    }

    /// `a / f` as an element of K_inf.
    fn rational_alpha(k: &QuadField, a: &QuadInt, f: &QuadInt) -> QuadLaurent {
        let r = k.ring();
        let y = k.mul(a, &k.conj(f));
        let nf = k.norm(f);
        QuadLaurent { x: LaurentSeries::rational(r, &y.a, &nf).unwrap(), y: LaurentSeries::rational(r, &y.b, &nf).unwrap() }
    }

    #[test]
    fn parameter_formula() {
        let k = field(7, "T");
        // f = T^2 - 3: inert, log N = 4.
        let f = k.parse_int("T^2-3").unwrap();
        let a = k.parse_int("(T)+(1)*sqrtD").unwrap();
        let p = choose_params(&k, &f, &a, 0.05, -1).unwrap();
        assert_eq!((p.modulus_norm_deg, p.n, p.m), (4, 6, 2));
        assert!(p.divisor.is_unit());
        // c q^3 q^-4 <= q^-1 <=> c <= 1.
        assert!(choose_params(&k, &f, &a, 0.05, 0).is_ok());
        assert!(matches!(choose_params(&k, &f, &a, 0.05, 1), Err(KQError::Cond2Violated { .. })));
        let tiny = k.parse_int("sqrtD").unwrap();
        assert!(matches!(choose_params(&k, &tiny, &a, 0.05, 0), Err(KQError::Cond2Violated { .. })));
    }

    #[test]
    fn reduction_is_minimal() {
        let k = field(5, "T^3+T+1");
        let f = k.parse_int("(T^2+1)+(1)*sqrtD").unwrap();
        let fh = k.abs(&f).0.unwrap();
        for x in k.elements_up_to(7).unwrap().into_iter().step_by(53) {
            let b = reduce_mod(&k, &x, &f);
            assert!(k.ideal_contains(&k.principal(&f), &k.sub(&x, &b)));
            let hb = k.abs(&b).0.unwrap_or(i64::MIN);
            // No element of the coset is smaller.
            for y in k.elements_up_to(fh - 1).unwrap() {
                if k.ideal_contains(&k.principal(&f), &k.sub(&x, &y)) {
                    assert!(k.abs(&y).0.unwrap() >= hb);
                }
            }
        }
    }

    fn check_three_way(q: u64, d: &str, f: &str, a: &str, eps: f64) -> KQReport {
        let k = field(q, d);
        let f = k.parse_int(f).unwrap();
        let a = k.parse_int(a).unwrap();
        let classes = Arc::new(class_group(&k).unwrap());
        let zeta = zeta_numerator(&k).unwrap();
        let p = choose_params(&k, &f, &a, eps, i64::MIN / 4).unwrap();
        let alpha = rational_alpha(&k, &a, &f);
        let rep = asymptotic_report(&classes, &zeta, &alpha, &p).unwrap();
        assert!(rep.chars_agree, "{rep:?}");
        assert!(rep.congruence_le_metric);
        assert!(rep.charsum_within, "{rep:?}");
        assert!(rep.error_within_bound);
        rep
    }

    #[test]
    fn three_way_agreement() {
        let r = check_three_way(7, "T", "T^2-3", "(T)+(1)*sqrtD", 0.05);
        assert!(r.positive);
        assert!(r.ratio_in_band);
        check_three_way(5, "T^3+T+1", "T^2+2", "T", 0.05);
        check_three_way(7, "3*T^2+1", "T^2-3", "(1)+(1)*sqrtD", 0.1);
        // Non-coprime numerator: D = (T - 1) splits off.
        check_three_way(5, "T", "T^3+4*T^2+2*T+3", "T-1", 0.05);
    }

    #[test]
    fn rational_alpha_metric_matches_congruence() {
        let k = field(7, "T");
        let f = k.parse_int("T^2-3").unwrap();
        let a = k.parse_int("(T)+(1)*sqrtD").unwrap();
        let p = choose_params(&k, &f, &a, 0.05, i64::MIN / 4).unwrap();
        let alpha = rational_alpha(&k, &a, &f);
        assert_eq!(s_count_metric(&k, &alpha, &p).unwrap(), s_count_congruence(&k, &p).unwrap());
    }

    #[test]
    fn witnesses_are_the_metric_count() {
        let k = field(7, "T");
        let x = QuadLaurent::parse_spec(k.ring(), "lacunary").unwrap();
        let f = k.parse_int("T^2-3").unwrap();
        let a = k.parse_int("(T)+(1)*sqrtD").unwrap();
        let p = choose_params(&k, &f, &a, 0.05, i64::MIN / 4).unwrap();
        let w = metric_witnesses(&k, &x, &p).unwrap();
        assert_eq!(w.len() as u64, s_count_metric(&k, &x, &p).unwrap());
        assert!(w.windows(2).all(|v| v[0].norm_dist_exponent <= v[1].norm_dist_exponent));
        assert!(w.iter().all(|v| v.norm_dist_exponent <= -(p.m as i64)));
    }

    #[test]
    fn unit_scaling_invariance() {
        let k = field(7, "T");
        let classes = Arc::new(class_group(&k).unwrap());
        let f = k.parse_int("T^2-3").unwrap();
        let a = k.parse_int("(T)+(1)*sqrtD").unwrap();
        let p = choose_params(&k, &f, &a, 0.05, i64::MIN / 4).unwrap();
        let p3 = choose_params(&k, &f, &k.scale(3, &a), 0.05, i64::MIN / 4).unwrap();
        assert_eq!(s_count_congruence(&k, &p).unwrap(), s_count_congruence(&k, &p3).unwrap());
        assert_eq!(s_count_chars(&classes, &p).unwrap().s_chars, s_count_chars(&classes, &p3).unwrap().s_chars);
        let mut m1 = p.clone();
        m1.m += 1;
        let alpha = rational_alpha(&k, &a, &f);
        assert!(s_count_metric(&k, &alpha, &m1).unwrap() <= s_count_metric(&k, &alpha, &p).unwrap());
    }

    #[test]
    fn claim_holds_exhaustively() {
        for (q, d, f, a) in [(7, "T", "T^2-3", "T"), (5, "T^3+T+1", "T^2+2", "T"), (5, "T", "T^3+4*T^2+2*T+3", "T-1")] {
            let k = field(q, d);
            let p = choose_params(&k, &k.parse_int(f).unwrap(), &k.parse_int(a).unwrap(), 0.05, i64::MIN / 4).unwrap();
            let c = claim_equivalence_check(&k, &p).unwrap();
            assert!(c.pass, "{d} {f}: {c:?}");
            assert_eq!(c.congruent_pairs, c.box_count as u64);
            assert_eq!(c.unit_congruent_pairs, c.box_count as u64 * k.units().len() as u64);
        }
    }
}
