//! Integer helpers shared by the algebraic modules.

/// Trial-division factorization, returned as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let f = factor_u64(n);
    f.len() == 1 && f[0].1 == 1
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

/// All positive divisors of `n` in increasing order.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let len = divs.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// Classical Möbius function on positive integers.
pub fn mobius_u64(n: u64) -> i64 {
    let f = factor_u64(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `base^exp`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Inverse of `a` modulo `m` when it exists.
pub fn inv_mod_u64(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let quot = old_r / r;
        (old_r, r) = (r, old_r - quot * r);
        (old_s, s) = (s, old_s - quot * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Number of monic irreducibles of degree `n` over a field with `q` elements.
pub fn necklace_count(q: u64, n: u32) -> u64 {
    let mut total: i128 = 0;
    for d in divisors_u64(n as u64) {
        let mu = mobius_u64(d) as i128;
        if mu != 0 {
            total += mu * q.pow(n / d as u32) as i128;
        }
    }
    (total / n as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_divisors() {
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(divisors_u64(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(mobius_u64(30), -1);
        assert_eq!(mobius_u64(12), 0);
        assert!(is_prime_u64(7) && !is_prime_u64(9));
    }

    #[test]
    fn necklace_matches_hand_counts() {
        assert_eq!(necklace_count(7, 1), 7);
        assert_eq!(necklace_count(7, 2), 21);
        assert_eq!(necklace_count(7, 3), 112);
        assert_eq!(necklace_count(2, 4), 3);
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(inv_mod_u64(3, 7), Some(5));
        assert_eq!(inv_mod_u64(2, 4), None);
    }
}
