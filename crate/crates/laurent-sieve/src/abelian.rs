//! Decomposition of finite abelian groups given by a multiplication and a generating set.

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

use crate::arith::factor_u64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("candidates generate a subgroup of order {found} instead of {expected}")]
    NotGenerating { found: u64, expected: u64 },
    #[error("lifting step failed; the group law is inconsistent")]
    LiftFailed,
}

/// A finite abelian group presented by canonical elements and a product.
pub trait GroupOps {
    type Elem: Clone + Eq + Hash;
    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.identity();
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
}

/// Internal direct-product decomposition: the map `(k_i) -> prod g_i^{k_i}` is a bijection
/// from `prod Z/o_i` onto the group.
#[derive(Debug, Clone)]
pub struct Decomposition<E> {
    pub gens: Vec<E>,
    pub orders: Vec<u64>,
}

impl<E> Decomposition<E> {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }
}

/// Decomposes a group of known `order` generated by `candidates`.
/// Works one Sylow subgroup at a time by lifting elements of maximal order.
pub fn decompose<G: GroupOps>(g: &G, order: u64, candidates: &[G::Elem]) -> Result<Decomposition<G::Elem>, AbelianError> {
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for (p, k) in factor_u64(order) {
        let pk = p.pow(k);
        let cofactor = order / pk;
        let local: Vec<G::Elem> = candidates.iter().map(|c| g.pow(c, cofactor)).collect();
        let (lg, lo) = decompose_p_group(g, p, pk, &local)?;
        gens.extend(lg);
        orders.extend(lo);
    }
    Ok(Decomposition { gens, orders })
}

fn decompose_p_group<G: GroupOps>(g: &G, p: u64, target: u64, cands: &[G::Elem]) -> Result<(Vec<G::Elem>, Vec<u64>), AbelianError> {
    let mut gens: Vec<G::Elem> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    let mut sub: HashMap<G::Elem, Vec<u64>> = HashMap::new();
    sub.insert(g.identity(), Vec::new());
    while (sub.len() as u64) < target {
        // Candidate of largest order modulo the current subgroup.
        let mut best: Option<(u64, usize)> = None;
        for (i, c) in cands.iter().enumerate() {
            let mut y = c.clone();
            let mut m = 1;
            while !sub.contains_key(&y) {
                y = g.pow(&y, p);
                m *= p;
            }
            if best.map_or(true, |(bm, _)| m > bm) {
                best = Some((m, i));
            }
        }
        let (m, i) = best.unwrap_or((1, 0));
        if m == 1 {
            return Err(AbelianError::NotGenerating { found: sub.len() as u64, expected: target });
        }
        let x = cands[i].clone();
        let coords = sub.get(&g.pow(&x, m)).expect("power lies in subgroup").clone();
        let mut y = x;
        for (j, &c) in coords.iter().enumerate() {
            if c % m != 0 {
                return Err(AbelianError::LiftFailed);
            }
            let back = (orders[j] - c / m) % orders[j];
            y = g.mul(&y, &g.pow(&gens[j], back));
        }
        if g.pow(&y, m) != g.identity() {
            return Err(AbelianError::LiftFailed);
        }
        let old: Vec<(G::Elem, Vec<u64>)> = sub.drain().collect();
        let mut yk = g.identity();
        for k in 0..m {
            for (e, v) in &old {
                let mut coords = v.clone();
                coords.resize(gens.len(), 0);
                coords.push(k);
                sub.insert(g.mul(e, &yk), coords);
            }
            yk = g.mul(&yk, &y);
        }
        gens.push(y);
        orders.push(m);
    }
    Ok((gens, orders))
}

/// All elements in index order `sum k_i * stride_i` with `stride_0 = 1`.
pub fn enumerate<G: GroupOps>(g: &G, dec: &Decomposition<G::Elem>) -> Vec<G::Elem> {
    let mut elems = vec![g.identity()];
    for (gen, &o) in dec.gens.iter().zip(&dec.orders) {
        let base = elems.clone();
        let mut step = gen.clone();
        for _ in 1..o {
            elems.extend(base.iter().map(|e| g.mul(e, &step)));
            step = g.mul(&step, gen);
        }
    }
    elems
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (Z/n)^* under multiplication.
    struct Units(u64);
    impl GroupOps for Units {
        type Elem = u64;
        fn identity(&self) -> u64 {
            1
        }
        fn mul(&self, a: &u64, b: &u64) -> u64 {
            a * b % self.0
        }
    }

    #[test]
    fn integer_unit_groups() {
        // (Z/16)^* = Z/2 x Z/4, (Z/15)^* = Z/2 x Z/4 too.
        for n in [16u64, 15, 63, 8] {
            let g = Units(n);
            let units: Vec<u64> = (1..n).filter(|&a| crate::arith::gcd_u64(a, n) == 1).collect();
            let dec = decompose(&g, units.len() as u64, &units).unwrap();
            assert_eq!(dec.order(), units.len() as u64);
            let mut all = enumerate(&g, &dec);
            all.sort_unstable();
            assert_eq!(all, units);
        }
    }
}
