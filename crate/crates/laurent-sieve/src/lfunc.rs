//! Dirichlet L-polynomials over F_q(T), their inverse roots, and prime character sums.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::arith::divisors_u64;
use crate::chars::{CharError, DirichletChar, UnitGroup};
use crate::cyclo::CycloSum;
use crate::ffcore::Fe;
use crate::polyring::{decode_monic, PolyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LFuncError {
    #[error("modulus of degree {0} exceeds the direct-summation gate")]
    ModulusTooLarge(usize),
    #[error("companion eigenvalue solve failed")]
    RootFindingFailure,
    #[error("q^{0} polynomials exceed the enumeration gate")]
    RangeTooLarge(usize),
    #[error("the principal character has no L-polynomial roots")]
    Principal,
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Largest modulus degree for direct summation.
pub const MAX_L_MODULUS_DEG: usize = 6;
const ZERO_TOL: f64 = 1e-9;

/// Histogram of the monic polynomials of degree `j` over the group.
pub fn monic_histogram(group: &UnitGroup, j: usize) -> Vec<u64> {
    let q = group.ring().q();
    let mut hist = vec![0u64; group.order() as usize];
    let mut buf: Vec<Fe> = Vec::with_capacity(j + 1);
    for idx in 0..q.pow(j as u32) {
        decode_monic(idx, j, q, &mut buf);
        if let Some(i) = group.index_of_code(group.reducer().code(&buf)) {
            hist[i as usize] += 1;
        }
    }
    hist
}

/// `L(u, chi) = sum_j c_j u^j` with `c_j = sum_{m monic, deg m = j} chi(m)`.
#[derive(Debug, Clone)]
pub struct LPolynomial {
    pub char_index: u64,
    pub principal: bool,
    /// Exact coefficients `c_0 ..`, computed through degree `max(deg f, 1)` and beyond for `chi_0`.
    pub exact: Vec<CycloSum>,
    pub coeffs: Vec<Complex64>,
    /// Degree after discarding trailing coefficients below `1e-9`.
    pub degree: usize,
}

impl LPolynomial {
    /// Rendered polynomial truncated to its degree.
    pub fn poly(&self) -> &[Complex64] {
        &self.coeffs[..=self.degree]
    }
    pub fn conj(&self) -> LPolynomial {
        LPolynomial {
            char_index: self.char_index,
            principal: self.principal,
            exact: self.exact.iter().map(CycloSum::conj).collect(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            degree: self.degree,
        }
    }
}

/// Number of coefficients examined: through `deg f` for nonprincipal characters (so the
/// vanishing from `deg f` on is checked), through degree 6 for the principal one.
fn coefficient_span(deg_f: usize, principal: bool) -> usize {
    if principal {
        deg_f.max(6)
    } else {
        deg_f.max(1)
    }
}

fn build(chi: &DirichletChar, hists: &[Vec<u64>]) -> LPolynomial {
    let exact: Vec<CycloSum> = hists.iter().map(|h| chi.sum_histogram(h)).collect();
    let coeffs: Vec<Complex64> = exact.iter().map(CycloSum::to_complex).collect();
    let degree = coeffs.iter().rposition(|c| c.norm() > ZERO_TOL).unwrap_or(0);
    LPolynomial { char_index: chi.index(), principal: chi.is_principal(), exact, coeffs, degree }
}

fn histograms(group: &UnitGroup, span: usize) -> Result<Vec<Vec<u64>>, LFuncError> {
    let n = group.modulus().deg().unwrap_or(0);
    if n > MAX_L_MODULUS_DEG {
        return Err(LFuncError::ModulusTooLarge(n));
    }
    Ok((0..=span).map(|j| monic_histogram(group, j)).collect())
}

pub fn l_polynomial(chi: &DirichletChar) -> Result<LPolynomial, LFuncError> {
    let n = chi.modulus().deg().unwrap_or(0);
    let hists = histograms(chi.group(), coefficient_span(n, chi.is_principal()))?;
    Ok(build(chi, &hists))
}

/// L-polynomials of all characters of one group, sharing the monic histograms.
pub fn l_polynomials(group: &std::sync::Arc<UnitGroup>) -> Result<Vec<LPolynomial>, LFuncError> {
    let n = group.modulus().deg().unwrap_or(0);
    let hists = histograms(group, coefficient_span(n, true))?;
    let span = coefficient_span(n, false);
    Ok(group
        .characters()
        .map(|chi| if chi.is_principal() { build(&chi, &hists) } else { build(&chi, &hists[..=span]) })
        .collect())
}

/// Evaluates `sum c_i x^i` and its derivative.
fn horner(c: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut d = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        d = d * x + v;
        v = v * x + a;
    }
    (v, d)
}

/// Roots of the monic polynomial `x^n + a[0] x^{n-1} + ... + a[n-1]` via companion eigenvalues.
pub fn monic_roots(a: &[Complex64]) -> Result<Vec<Complex64>, LFuncError> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -a[j];
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    let eig = m.eigenvalues().ok_or(LFuncError::RootFindingFailure)?;
    // Ascending coefficients of the monic polynomial, for polishing.
    let mut c: Vec<Complex64> = a.iter().rev().copied().collect();
    c.push(Complex64::new(1.0, 0.0));
    let mut roots = Vec::with_capacity(n);
    for &z0 in eig.iter() {
        if !z0.re.is_finite() || !z0.im.is_finite() {
            return Err(LFuncError::RootFindingFailure);
        }
        let mut z = z0;
        for _ in 0..3 {
            let (v, d) = horner(&c, z);
            if d.norm() < 1e-300 {
                break;
            }
            let step = v / d;
            if step.norm() > 1e-3 * (1.0 + z.norm()) {
                break;
            }
            z -= step;
        }
        roots.push(z);
    }
    Ok(roots)
}

#[derive(Debug, Clone, Serialize)]
pub struct RhReport {
    pub degree: usize,
    pub moduli: Vec<f64>,
    pub max_deviation: f64,
    pub vieta_residual: f64,
    pub pass: bool,
}

/// Inverse roots `alpha_i` with `L(u) = prod (1 - alpha_i u)`, plus the RH check.
pub fn inverse_roots(l: &LPolynomial, q: u64) -> Result<(Vec<Complex64>, RhReport), LFuncError> {
    if l.principal {
        return Err(LFuncError::Principal);
    }
    let c = l.poly();
    // alpha_i are the roots of x^D + c_1 x^{D-1} + ... + c_D.
    let roots = monic_roots(&c[1..])?;
    let sq = (q as f64).sqrt();
    let moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    let max_deviation = moduli.iter().map(|&m| (m - 1.0).abs().min((m - sq).abs())).fold(0.0, f64::max);
    let prod: f64 = moduli.iter().product();
    let vieta_residual = (prod - c[l.degree].norm()).abs();
    let report = RhReport { degree: l.degree, moduli, max_deviation, vieta_residual, pass: max_deviation <= 1e-6 && vieta_residual <= 1e-6 * prod.max(1.0) };
    Ok((roots, report))
}

/// `sum_{deg pi = n} chi(pi)` over monic irreducibles, exact.
pub fn prime_char_sum(chi: &DirichletChar, n: usize) -> Result<CycloSum, LFuncError> {
    let group = chi.group();
    group.ring().count_gate(n as u32).map_err(|_| LFuncError::RangeTooLarge(n))?;
    let (hist, _) = group.prime_histogram(n, 1)?;
    Ok(chi.sum_histogram(&hist))
}

/// `sum_{d | n} d * sum_{deg pi = d} chi(pi^{n/d})`, exact.
pub fn prime_power_sum(chi: &DirichletChar, n: usize) -> Result<CycloSum, LFuncError> {
    let group = chi.group();
    group.ring().count_gate(n as u32).map_err(|_| LFuncError::RangeTooLarge(n))?;
    let mut total = CycloSum::new(chi.value_order());
    for d in divisors_u64(n as u64) {
        let (hist, _) = group.prime_histogram(d as usize, n as u64 / d)?;
        add_scaled(&mut total, &chi.sum_histogram(&hist), d as i64);
    }
    Ok(total)
}

fn add_scaled(total: &mut CycloSum, s: &CycloSum, k: i64) {
    for (m, &c) in s.bins().iter().enumerate() {
        total.add(m as u64, c * k);
    }
}

/// Prime histograms `(deg pi = d, pi^e)` of one group for all `d e <= max_n`, shared by its characters.
pub struct PrimeHistograms {
    max_n: usize,
    /// `hists[d][e]`, for `d >= 1`, `e >= 1`.
    hists: Vec<Vec<Vec<u64>>>,
}

impl PrimeHistograms {
    pub fn new(group: &UnitGroup, max_n: usize) -> Result<PrimeHistograms, LFuncError> {
        group.ring().count_gate(max_n as u32).map_err(|_| LFuncError::RangeTooLarge(max_n))?;
        let mut hists = vec![Vec::new(); max_n + 1];
        for (d, row) in hists.iter_mut().enumerate().skip(1) {
            row.push(Vec::new());
            for e in 1..=max_n / d {
                row.push(group.prime_histogram(d, e as u64)?.0);
            }
        }
        Ok(PrimeHistograms { max_n, hists })
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// Same value as [`prime_char_sum`].
    pub fn prime_sum(&self, chi: &DirichletChar, n: usize) -> CycloSum {
        chi.sum_histogram(&self.hists[n][1])
    }

    /// Same value as [`prime_power_sum`].
    pub fn power_sum(&self, chi: &DirichletChar, n: usize) -> CycloSum {
        let mut total = CycloSum::new(chi.value_order());
        for d in divisors_u64(n as u64) {
            add_scaled(&mut total, &chi.sum_histogram(&self.hists[d as usize][n / d as usize]), d as i64);
        }
        total
    }

    pub fn newton_check(&self, chi: &DirichletChar, roots: &[Complex64], n: usize) -> NewtonCheck {
        newton_compare(chi, roots, n, self.power_sum(chi, n).to_complex())
    }

    pub fn weil_ratio(&self, chi: &DirichletChar, n: usize) -> f64 {
        let q = chi.group().ring().q() as f64;
        n as f64 * self.prime_sum(chi, n).to_complex().norm() / q.powf(n as f64 / 2.0)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonCheck {
    pub n: usize,
    pub residual: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Compares `-sum alpha_i^n` with the enumerated prime-power sum.
pub fn newton_identity_check(chi: &DirichletChar, roots: &[Complex64], n: usize) -> Result<NewtonCheck, LFuncError> {
    Ok(newton_compare(chi, roots, n, prime_power_sum(chi, n)?.to_complex()))
}

fn newton_compare(chi: &DirichletChar, roots: &[Complex64], n: usize, enumerated: Complex64) -> NewtonCheck {
    let q = chi.group().ring().q() as f64;
    let from_roots: Complex64 = -roots.iter().map(|a| a.powu(n as u32)).sum::<Complex64>();
    let residual = (from_roots - enumerated).norm();
    let bound = 1e-5 * q.powf(n as f64 / 2.0);
    NewtonCheck { n, residual, bound, pass: residual <= bound }
}

/// `N |sum_{deg pi = N} chi(pi)| / q^{N/2}`, to compare with `deg f + 3`.
pub fn weil_ratio(chi: &DirichletChar, n: usize) -> Result<f64, LFuncError> {
    let q = chi.group().ring().q() as f64;
    let s = prime_char_sum(chi, n)?.to_complex().norm();
    Ok(n as f64 * s / q.powf(n as f64 / 2.0))
}

/// Largest coefficient gap between `L(u, chi)` for the induced character and
/// `L(u, chi') * prod_{pi | f, pi !| f'} (1 - chi'(pi) u^{deg pi})`.
pub fn imprimitive_residual(chi_prime: &DirichletChar, big: &std::sync::Arc<UnitGroup>) -> Result<f64, LFuncError> {
    let ring = big.ring().clone();
    let chi = chi_prime.induce(big);
    let span = big.modulus().deg().unwrap_or(0).max(chi_prime.modulus().deg().unwrap_or(0)) + 2;
    let lhs: Vec<Complex64> = (0..=span).map(|j| chi.sum_histogram(&monic_histogram(big, j)).to_complex()).collect();
    let small = chi_prime.group();
    let mut rhs: Vec<Complex64> = (0..=span).map(|j| chi_prime.sum_histogram(&monic_histogram(small, j)).to_complex()).collect();
    for (pi, _) in big.factorization() {
        if ring.divides(pi, chi_prime.modulus()) {
            continue;
        }
        let v = chi_prime.eval(pi);
        let d = pi.deg().unwrap();
        let mut next = rhs.clone();
        for j in d..=span {
            next[j] -= v * rhs[j - d];
        }
        rhs = next;
    }
    Ok(lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

/// Monic `pi` of degree `n` counted for the principal character mod `f`.
pub fn principal_prime_count(group: &UnitGroup, n: usize) -> Result<u64, LFuncError> {
    let (hist, _) = group.prime_histogram(n, 1)?;
    Ok(hist.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chars::unit_group_structure;
    use crate::ffcore::Field;
    use crate::polyring::{Poly, PolyRing};

    fn ring7() -> PolyRing {
        PolyRing::new(Field::new(7, 1).unwrap())
    }

    #[test]
    fn mod_t_examples() {
        let r = ring7();
        let g = unit_group_structure(&r, &Poly::t()).unwrap();
        let ls = l_polynomials(&g).unwrap();
        for l in ls.iter().skip(1) {
            assert_eq!(l.degree, 0);
        }
        // Principal: coefficients q^j - q^(j-1) from (1-u)/(1-qu).
        let p = &ls[0];
        for j in 1..=6 {
            let want = 7f64.powi(j) - 7f64.powi(j - 1);
            assert!((p.coeffs[j as usize].re - want).abs() < 1e-6);
        }
        let chi0 = g.character(0);
        assert_eq!(crate::cyclo::round_integer(prime_char_sum(&chi0, 1).unwrap().to_complex(), 1e-9), Some(6));
        // Brute force over the seven linear monics.
        for chi in g.characters().skip(1) {
            let brute: Complex64 = (0..7u64).map(|c| chi.eval(&Poly::new(vec![c, 1]))).sum();
            assert!((prime_char_sum(&chi, 1).unwrap().to_complex() - brute).norm() < 1e-12);
            assert!(brute.norm() < 1e-12);
        }
    }

    #[test]
    fn rh_for_quadratic_modulus() {
        let r = ring7();
        let g = unit_group_structure(&r, &r.parse("T^2+1").unwrap()).unwrap();
        for (chi, l) in g.characters().zip(l_polynomials(&g).unwrap()) {
            if chi.is_principal() {
                continue;
            }
            assert!(l.degree <= 1);
            let (roots, rep) = inverse_roots(&l, 7).unwrap();
            assert!(rep.pass, "{rep:?}");
            for n in 1..=4 {
                assert!(newton_identity_check(&chi, &roots, n).unwrap().pass);
            }
        }
    }

    #[test]
    fn shared_histograms_match_direct_sums() {
        let r = ring7();
        let g = unit_group_structure(&r, &r.parse("T^2+3*T").unwrap()).unwrap();
        let h = PrimeHistograms::new(&g, 4).unwrap();
        for chi in g.characters() {
            for n in 1..=4 {
                assert_eq!(h.prime_sum(&chi, n), prime_char_sum(&chi, n).unwrap());
                assert_eq!(h.power_sum(&chi, n), prime_power_sum(&chi, n).unwrap());
                assert!((h.weil_ratio(&chi, n) - weil_ratio(&chi, n).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn conjugate_l_polynomial() {
        let r = ring7();
        let g = unit_group_structure(&r, &r.parse("T^2+3*T").unwrap()).unwrap();
        let chi = g.character(5);
        let a = l_polynomial(&chi).unwrap();
        let b = l_polynomial(&chi.conj()).unwrap();
        for (x, y) in a.coeffs.iter().zip(&a.conj().coeffs) {
            assert!((x.conj() - y).norm() < 1e-12);
        }
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            assert!((x.conj() - y).norm() < 1e-9);
        }
    }

    #[test]
    fn monic_roots_of_known_polynomial() {
        // (x - 2)(x + i) = x^2 + (i - 2) x - 2i
        let i = Complex64::new(0.0, 1.0);
        let mut roots = monic_roots(&[i - 2.0, -2.0 * i]).unwrap();
        roots.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((roots[0] + i).norm() < 1e-12);
        assert!((roots[1] - 2.0).norm() < 1e-12);
    }
}
