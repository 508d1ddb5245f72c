//! The unique factorization of friable integers used by the type-II
//! reduction: accumulate prime powers in increasing order until the partial
//! product passes the threshold `w`.

use num::complex::Complex64;
use num::Zero;

use crate::arith::FactorTable;
use crate::divisor::ValueTable;
use crate::error::{Error, Result};
use crate::par::KahanSum;

/// Classification of a `y`-friable integer in the three-way decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FriableClass {
    /// `n <= w`.
    SigmaI,
    /// `n > w` and some full prime power of `n` exceeds `y`.
    SigmaTriv,
    /// The bilinear range: the unique split with `P+(n1) < P-(n2)` and
    /// `w < n1 <= w * Q+(n1)`.
    Split { n1: u64, n2: u64 },
}

pub fn friable_factorize(n: u64, y: u64, w: u64, table: &FactorTable) -> Result<FriableClass> {
    if y < 2 || w < 2 {
        return Err(Error::domain("friable_factorize requires y, w >= 2"));
    }
    if n == 0 || n > table.limit() {
        return Err(Error::domain(format!(
            "argument {n} outside factor table range 1..={}",
            table.limit()
        )));
    }
    let factors = table.factorize(n);
    if let Some(&(p, _)) = factors.iter().find(|&&(p, _)| p > y) {
        return Err(Error::domain(format!(
            "friable_factorize requires P+(n) <= y: {n} has prime factor {p} > {y}"
        )));
    }
    if n <= w {
        return Ok(FriableClass::SigmaI);
    }
    if factors.iter().any(|&(p, e)| p.pow(e) > y) {
        return Ok(FriableClass::SigmaTriv);
    }
    let mut n1 = 1u64;
    for &(p, e) in &factors {
        let q_plus = p.pow(e);
        n1 *= q_plus;
        if n1 > w {
            let n2 = n / n1;
            if n1 > w * q_plus {
                return Err(Error::internal(format!(
                    "split upper bound violated: n1 = {n1} > w * Q+ = {}",
                    w * q_plus
                )));
            }
            if num::integer::gcd(n1, n2) != 1 {
                return Err(Error::internal(format!(
                    "split parts not coprime: {n1}, {n2}"
                )));
            }
            if n2 > 1 {
                let p_plus_n1 = table.largest_prime_factor(n1);
                let p_minus_n2 = table.spf(n2);
                if p_plus_n1 >= p_minus_n2 {
                    return Err(Error::internal(format!(
                        "split ordering violated: P+({n1}) = {p_plus_n1} >= P-({n2}) = {p_minus_n2}"
                    )));
                }
            }
            return Ok(FriableClass::Split { n1, n2 });
        }
    }
    // n > w and all prime powers were consumed without passing w: impossible.
    Err(Error::internal(format!("split construction fell through for n = {n}")))
}

/// Decomposition of `sum_{P+(n) <= y, n <= x} f(n) g(n)` into the direct
/// (`n <= w`), trivial (large prime power) and split parts.
#[derive(Debug, Clone)]
pub struct FriableDecomposition {
    pub sum_total: Complex64,
    pub sum_i: Complex64,
    pub sum_triv: Complex64,
    /// `sum_total - sum_i - sum_triv`; carried entirely by split terms.
    pub residual: Complex64,
    /// Mass of the split terms, `sum |f(n) g(n)|` over split-classified `n`.
    pub bilinear_mass: f64,
    pub count_i: u64,
    pub count_triv: u64,
    pub count_split: u64,
}

/// Classifies every `y`-friable `n <= x` and accumulates `f(n) g(n)` per
/// class. The weights `g` are indexed by `n` (entries above `x` are ignored).
pub fn friable_decomposition_report(
    f: &ValueTable,
    g: &[f64],
    y: u64,
    w: u64,
    x: u64,
    table: &FactorTable,
) -> Result<FriableDecomposition> {
    if x > f.limit() {
        return Err(Error::resource(format!(
            "weights require f table limit >= {x}, have {}",
            f.limit()
        )));
    }
    if g.len() < x as usize + 1 {
        return Err(Error::domain(format!(
            "weight array must cover 1..={x}, got length {}",
            g.len()
        )));
    }
    let mut total = KahanSum::new();
    let mut sum_i = KahanSum::new();
    let mut sum_triv = KahanSum::new();
    let mut mass = 0.0f64;
    let (mut count_i, mut count_triv, mut count_split) = (0u64, 0u64, 0u64);
    for n in 1..=x {
        if n > 1 && table.largest_prime_factor(n) > y {
            continue;
        }
        let term = f.value_c64(n) * g[n as usize];
        total.add(term);
        match friable_factorize(n, y, w, table)? {
            FriableClass::SigmaI => {
                sum_i.add(term);
                count_i += 1;
            }
            FriableClass::SigmaTriv => {
                sum_triv.add(term);
                count_triv += 1;
            }
            FriableClass::Split { n1, .. } => {
                debug_assert!(n1 > w && n1 <= y * w);
                mass += term.norm();
                count_split += 1;
            }
        }
    }
    let residual = total.value() - sum_i.value() - sum_triv.value();
    Ok(FriableDecomposition {
        sum_total: total.value(),
        sum_i: sum_i.value(),
        sum_triv: sum_triv.value(),
        residual,
        bilinear_mass: mass,
        count_i,
        count_triv,
        count_split,
    })
}
