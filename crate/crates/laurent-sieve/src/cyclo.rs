//! Exact sums of roots of unity, kept as exponent histograms until rendered.

use num_complex::Complex64;

/// `exp(2 pi i m / r)`.
pub fn root_of_unity(r: u64, m: u64) -> Complex64 {
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let m = m % r;
    // Exact values on the axes keep integer-valued sums clean.
    if m == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * m == r {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * m == r {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * m == 3 * r {
        return Complex64::new(0.0, -1.0);
    }
    let theta = std::f64::consts::TAU * (m as f64) / (r as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// `sum_m bins[m] * zeta_r^m` with integer multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloSum {
    order: u64,
    bins: Vec<i64>,
}

impl CycloSum {
    pub fn new(order: u64) -> CycloSum {
        CycloSum { order, bins: vec![0; order.max(1) as usize] }
    }
    pub fn order(&self) -> u64 {
        self.order
    }
    pub fn bins(&self) -> &[i64] {
        &self.bins
    }
    #[inline]
    pub fn add(&mut self, m: u64, count: i64) {
        let r = self.bins.len() as u64;
        self.bins[(m % r) as usize] += count;
    }
    /// Number of roots summed, counted with multiplicity.
    pub fn weight(&self) -> i64 {
        self.bins.iter().sum()
    }
    pub fn conj(&self) -> CycloSum {
        let r = self.bins.len();
        let mut bins = vec![0; r];
        for (m, &c) in self.bins.iter().enumerate() {
            bins[(r - m) % r] += c;
        }
        CycloSum { order: self.order, bins }
    }
    pub fn to_complex(&self) -> Complex64 {
        let r = self.bins.len() as u64;
        self.bins
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(m, &c)| root_of_unity(r, m as u64) * c as f64)
            .sum()
    }
}

/// Rounds `z` to an integer if it lies within `tol` of one.
pub fn round_integer(z: Complex64, tol: f64) -> Option<i64> {
    let n = z.re.round();
    if (z.re - n).abs() <= tol && z.im.abs() <= tol {
        Some(n as i64)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_orbit_vanishes() {
        let mut s = CycloSum::new(6);
        for m in 0..6 {
            s.add(m, 1);
        }
        assert!(s.to_complex().norm() < 1e-12);
        assert_eq!(s.weight(), 6);
        assert_eq!(round_integer(s.to_complex(), 1e-9), Some(0));
    }

    #[test]
    fn conjugation_negates_exponents() {
        let mut s = CycloSum::new(5);
        s.add(1, 2);
        let c = s.conj();
        assert_eq!(c.bins()[4], 2);
        assert!((c.to_complex() - s.to_complex().conj()).norm() < 1e-12);
    }
}
