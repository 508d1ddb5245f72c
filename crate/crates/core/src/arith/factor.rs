//! Smallest-prime-factor sieve and the classical multiplicative functions
//! built on it.

use crate::error::{Error, Result};

/// Sieve of smallest prime factors for every `n <= limit`.
///
/// Immutable after construction; all queries are pure and safe to share
/// across threads.
pub struct FactorTable {
    limit: u64,
    spf: Vec<u32>,
}

/// Named classical functions evaluated through [`eval_basic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    /// Möbius function.
    Mobius,
    /// Euler totient.
    Phi,
    /// Number of distinct prime factors.
    Omega,
    /// Number of prime factors with multiplicity.
    BigOmega,
    /// Number of distinct primes `p | n` with `p ≡ r (mod modulus)`.
    OmegaClass { r: u64, modulus: u64 },
}

impl FactorTable {
    /// Builds the sieve for `2 <= n <= x`. Cost `O(x log log x)`.
    pub fn new(x: u64) -> Result<Self> {
        if x < 2 {
            return Err(Error::domain(format!("factor table limit must be >= 2, got {x}")));
        }
        if x >= u32::MAX as u64 {
            return Err(Error::resource(format!(
                "factor table limit {x} exceeds the 32-bit sieve capacity"
            )));
        }
        let len = (x + 1) as usize;
        let mut spf: Vec<u32> = Vec::new();
        spf.try_reserve_exact(len).map_err(|_| {
            Error::resource(format!("cannot allocate smallest-prime-factor table for x = {x}"))
        })?;
        spf.resize(len, 0);
        let mut i: u64 = 2;
        while i <= x {
            if spf[i as usize] == 0 {
                spf[i as usize] = i as u32;
                let mut j = i * i;
                while j <= x {
                    if spf[j as usize] == 0 {
                        spf[j as usize] = i as u32;
                    }
                    j += i;
                }
            }
            i += 1;
        }
        Ok(FactorTable { limit: x, spf })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn check(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.limit {
            return Err(Error::domain(format!(
                "argument {n} outside factor table range 1..={}",
                self.limit
            )));
        }
        Ok(())
    }

    /// Smallest prime factor of `n >= 2`.
    pub fn spf(&self, n: u64) -> u64 {
        debug_assert!(n >= 2 && n <= self.limit);
        self.spf[n as usize] as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes up to the table limit, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..=self.limit).filter(move |&n| self.is_prime(n))
    }

    /// Factorization sorted by prime: `n = prod p^e`.
    pub fn factorize(&self, n: u64) -> Vec<(u64, u32)> {
        debug_assert!(n >= 1 && n <= self.limit);
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf(m);
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Strips the smallest prime off `n`: returns `(p, e, m)` with
    /// `n = p^e * m`, `gcd(p, m) = 1` and `p = spf(n)`.
    pub fn split_smallest(&self, n: u64) -> (u64, u32, u64) {
        debug_assert!(n >= 2);
        let p = self.spf(n);
        let mut e = 0u32;
        let mut m = n;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        (p, e, m)
    }

    /// Largest prime factor; 1 for n = 1.
    pub fn largest_prime_factor(&self, n: u64) -> u64 {
        self.factorize(n).last().map_or(1, |&(p, _)| p)
    }

    /// Prime power at the largest prime of `n` (`Q⁺`); 1 for n = 1.
    pub fn largest_prime_power(&self, n: u64) -> u64 {
        self.factorize(n)
            .last()
            .map_or(1, |&(p, e)| p.pow(e))
    }

    pub fn mobius(&self, n: u64) -> i64 {
        let mut m = n;
        let mut sign = 1i64;
        while m > 1 {
            let p = self.spf(m);
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        sign
    }

    pub fn phi(&self, n: u64) -> u64 {
        let mut out = 1u64;
        for (p, e) in self.factorize(n) {
            out *= (p - 1) * p.pow(e - 1);
        }
        out
    }

    pub fn omega(&self, n: u64) -> u32 {
        self.factorize(n).len() as u32
    }

    pub fn big_omega(&self, n: u64) -> u32 {
        self.factorize(n).iter().map(|&(_, e)| e).sum()
    }

    /// Counts distinct primes `p | n` in the class `r mod modulus`.
    pub fn omega_class(&self, n: u64, r: u64, modulus: u64) -> u32 {
        self.factorize(n)
            .iter()
            .filter(|&&(p, _)| p % modulus == r % modulus)
            .count() as u32
    }
}

/// Evaluates one of the classical functions; `n` must lie within the table.
pub fn eval_basic(n: u64, kind: ArithKind, table: &FactorTable) -> Result<i64> {
    table.check(n)?;
    Ok(match kind {
        ArithKind::Mobius => table.mobius(n),
        ArithKind::Phi => table.phi(n) as i64,
        ArithKind::Omega => table.omega(n) as i64,
        ArithKind::BigOmega => table.big_omega(n) as i64,
        ArithKind::OmegaClass { r, modulus } => {
            if modulus == 0 || num::integer::gcd(r, modulus) != 1 {
                return Err(Error::domain(format!(
                    "omega_class requires gcd(r, D) = 1, got r = {r}, D = {modulus}"
                )));
            }
            table.omega_class(n, r, modulus) as i64
        }
    })
}

/// Trial-division factorization for moduli and other small arguments that
/// need no sieve.
pub fn factorize_small(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize_small(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>()
        .max(1)
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let factors = factorize_small(n);
    let mut out = vec![1u64];
    for (p, e) in factors {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    out
}

/// Integer square root: largest `t` with `t^2 <= n`.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut t = (n as f64).sqrt() as u64;
    while t > 0 && t * t > n {
        t -= 1;
    }
    while (t + 1).checked_mul(t + 1).is_some_and(|s| s <= n) {
        t += 1;
    }
    t
}

/// Integer k-th root: largest `t` with `t^k <= n`. Float powering is
/// off-by-one-prone at cutoffs, so the float estimate is corrected exactly.
pub fn ikroot(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n <= 1 {
        return n;
    }
    let pow_le = |t: u64| -> bool {
        let mut acc: u64 = 1;
        for _ in 0..k {
            match acc.checked_mul(t) {
                Some(v) if v <= n => acc = v,
                _ => return false,
            }
        }
        true
    };
    let mut t = (n as f64).powf(1.0 / k as f64).round() as u64 + 1;
    while t > 1 && !pow_le(t) {
        t -= 1;
    }
    while pow_le(t + 1) {
        t += 1;
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_tiny_limit() {
        assert!(FactorTable::new(1).is_err());
    }

    #[test]
    fn spf_matches_definition() {
        let t = FactorTable::new(10).unwrap();
        assert_eq!(t.spf(4), 2);
        assert_eq!(t.spf(9), 3);
        assert_eq!(t.spf(7), 7);
    }

    #[test]
    fn factorize_60() {
        let t = FactorTable::new(100).unwrap();
        assert_eq!(t.factorize(60), vec![(2, 2), (3, 1), (5, 1)]);
    }

    #[test]
    fn factorize_multiply_roundtrip() {
        let t = FactorTable::new(100_000).unwrap();
        for n in 1..=100_000u64 {
            let f = t.factorize(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            for w in f.windows(2) {
                assert!(w[0].0 < w[1].0, "factors unsorted for {n}");
            }
        }
    }

    #[test]
    fn spf_divides_and_is_minimal() {
        let t = FactorTable::new(20_000).unwrap();
        for n in 2..=20_000u64 {
            let p = t.spf(n);
            assert!(n % p == 0);
            assert!(t.is_prime(p));
            for q in 2..p {
                assert!(n % q != 0, "{q} divides {n} but spf = {p}");
            }
        }
    }

    #[test]
    fn basic_function_values() {
        let t = FactorTable::new(100).unwrap();
        assert_eq!(eval_basic(12, ArithKind::Omega, &t).unwrap(), 2);
        assert_eq!(eval_basic(12, ArithKind::BigOmega, &t).unwrap(), 3);
        assert_eq!(eval_basic(30, ArithKind::Mobius, &t).unwrap(), -1);
        assert_eq!(eval_basic(12, ArithKind::Phi, &t).unwrap(), 4);
        // 21 = 3 * 7, both primes ≡ 3 mod 4.
        assert_eq!(
            eval_basic(21, ArithKind::OmegaClass { r: 3, modulus: 4 }, &t).unwrap(),
            2
        );
        assert!(eval_basic(21, ArithKind::OmegaClass { r: 2, modulus: 4 }, &t).is_err());
        assert!(eval_basic(101, ArithKind::Omega, &t).is_err());
    }

    #[test]
    fn prime_count_matches_independent_sieve() {
        // Independent oracle: plain boolean Eratosthenes, no spf logic shared.
        let x = 1_000_000usize;
        let mut is_p = vec![true; x + 1];
        is_p[0] = false;
        is_p[1] = false;
        let mut i = 2;
        while i * i <= x {
            if is_p[i] {
                let mut j = i * i;
                while j <= x {
                    is_p[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        let oracle = is_p.iter().filter(|&&b| b).count();
        assert_eq!(oracle, 78_498);

        let t = FactorTable::new(x as u64).unwrap();
        let sieved = (2..=x as u64).filter(|&n| t.spf(n) == n).count();
        assert_eq!(sieved, oracle);
    }

    #[test]
    fn small_helpers() {
        assert_eq!(factorize_small(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(12), 4);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(isqrt(0), 0);
        assert_eq!(isqrt(15), 3);
        assert_eq!(isqrt(16), 4);
        assert_eq!(ikroot(10_000, 2), 100);
        assert_eq!(ikroot(9_999, 2), 99);
        assert_eq!(ikroot(10_000, 4), 10);
        assert_eq!(ikroot(9_999, 4), 9);
        assert_eq!(ikroot(1, 5), 1);
        for x in [100u64, 1000, 10_000, 99_999] {
            for k in 1..=6u32 {
                let t = ikroot(x, k);
                assert!(t.pow(k) <= x);
                assert!((t + 1).checked_pow(k).is_none_or(|v| v > x));
            }
        }
    }
}
