//! Coefficients of the polynomial identity behind the Heath-Brown-type
//! decomposition of `tau_{r + u/v}`, and exact verification of the
//! decomposition itself.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

use super::{compare_tables, IdentityReport};
use crate::arith::{ikroot, FactorTable};
use crate::divisor::{convolve_slices, sieve_from_prime_powers};
use crate::error::{Error, Result};
use crate::scalar::{binomial_z, tau_z_prime_power, Mode, Scal};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn check_params(k: u32, u: u32, v: u32) -> Result<()> {
    if v == 0 || u >= v {
        return Err(Error::domain(format!(
            "hb coefficients require v > u >= 0, got u = {u}, v = {v}"
        )));
    }
    if k == 0 {
        return Err(Error::domain("hb coefficients require K >= 1"));
    }
    Ok(())
}

/// Closed form: `b_l = (-1)^l / ((l-1)! (K-l)!) * prod_{j != l} (j + N - u/v)`.
pub fn hb_b_coefficients(k: u32, n_shift: u32, u: u32, v: u32) -> Result<Vec<BigRational>> {
    check_params(k, u, v)?;
    let uv = BigRational::new(BigInt::from(u), BigInt::from(v));
    let mut out = Vec::with_capacity(k as usize);
    for l in 1..=k {
        let mut prod = BigRational::one();
        for j in 1..=k {
            if j == l {
                continue;
            }
            prod *= rat(j as i64 + n_shift as i64) - uv.clone();
        }
        let mut denom = BigRational::one();
        for i in 1..l {
            denom *= rat(i as i64);
        }
        for i in 1..=(k - l) {
            denom *= rat(i as i64);
        }
        let sign = if l % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        out.push(sign * prod / denom);
    }
    Ok(out)
}

/// Independent route: solve the Vandermonde system whose row `i` has entries
/// `(lv + Nv - u)^i` and right-hand side `(-1, 0, ..., 0)`.
pub fn hb_b_coefficients_via_system(k: u32, n_shift: u32, u: u32, v: u32) -> Result<Vec<BigRational>> {
    check_params(k, u, v)?;
    let k = k as usize;
    let nodes: Vec<BigRational> = (1..=k)
        .map(|l| rat((l as i64 + n_shift as i64) * v as i64 - u as i64))
        .collect();
    // Augmented matrix, exact Gaussian elimination.
    let mut m: Vec<Vec<BigRational>> = (0..k)
        .map(|row| {
            let mut r: Vec<BigRational> = nodes
                .iter()
                .map(|x| {
                    let mut acc = BigRational::one();
                    for _ in 0..row {
                        acc *= x.clone();
                    }
                    acc
                })
                .collect();
            r.push(if row == 0 { -BigRational::one() } else { BigRational::zero() });
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::internal("singular Vandermonde system"))?;
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for entry in m[col].iter_mut() {
            *entry /= p.clone();
        }
        for row in 0..k {
            if row == col || m[row][col].is_zero() {
                continue;
            }
            let factor = m[row][col].clone();
            for c in col..=k {
                let delta = factor.clone() * m[col][c].clone();
                m[row][c] -= delta;
            }
        }
    }
    Ok(m.into_iter().map(|row| row[k].clone()).collect())
}

/// Both coefficient families of the polynomial identity
/// `sum_{K <= m <= (K+N)v-u} a_m (X-1)^m = 1 + X^{Nv} sum_l b_l X^{lv-u}`.
#[derive(Debug, Clone)]
pub struct HbCoefficients {
    pub k: u32,
    pub n_shift: u32,
    pub u: u32,
    pub v: u32,
    pub b: Vec<BigRational>,
    /// `a_m` for `K <= m <= (K+N)v - u`.
    pub a: BTreeMap<u32, BigRational>,
}

/// Re-expands the right-hand side in powers of `(X - 1)` and checks that all
/// coefficients below degree `K` vanish (the defining property of `b`).
pub fn hb_a_coefficients(
    k: u32,
    n_shift: u32,
    u: u32,
    v: u32,
    b: &[BigRational],
) -> Result<BTreeMap<u32, BigRational>> {
    check_params(k, u, v)?;
    let degree = ((k + n_shift) * v - u) as usize;
    // Monomial coefficients of 1 + X^{Nv} sum_l b_l X^{lv - u}.
    let mut mono = vec![BigRational::zero(); degree + 1];
    mono[0] = BigRational::one();
    for (i, bl) in b.iter().enumerate() {
        let l = i as u32 + 1;
        let exp = (n_shift * v + l * v - u) as usize;
        mono[exp] += bl.clone();
    }
    // X^j = sum_m binom(j, m) (X-1)^m.
    let mut in_shifted = vec![BigRational::zero(); degree + 1];
    for (j, cj) in mono.iter().enumerate() {
        if cj.is_zero() {
            continue;
        }
        for (m, slot) in in_shifted.iter_mut().enumerate().take(j + 1) {
            let binom = binomial_z(&rat(j as i64), m as u32);
            *slot += cj.clone() * binom;
        }
    }
    for (m, coeff) in in_shifted.iter().enumerate().take(k as usize) {
        if !coeff.is_zero() {
            return Err(Error::internal(format!(
                "(X-1)^{m} coefficient should vanish below K = {k}, got {coeff}"
            )));
        }
    }
    Ok(in_shifted
        .into_iter()
        .enumerate()
        .skip(k as usize)
        .map(|(m, c)| (m as u32, c))
        .collect())
}

pub fn hb_coefficients(k: u32, n_shift: u32, u: u32, v: u32) -> Result<HbCoefficients> {
    let b = hb_b_coefficients(k, n_shift, u, v)?;
    let a = hb_a_coefficients(k, n_shift, u, v, &b)?;
    Ok(HbCoefficients { k, n_shift, u, v, b, a })
}

/// Verifies the decomposition of `tau_{r + u/v}` on all `n <= x`.
///
/// `r >= 0` selects the case with `l + r` unrestricted factors and `lv - u`
/// truncated `tau_{-1/v}` factors; `r <= -1` selects the case of
/// `tau_{-|r| + u/v}` with `l - 1` unrestricted factors and
/// `lv + (|r|-1)v - u` truncated factors. In both cases the `l`-th
/// coefficient is `-b_l` (with `N = 0` resp. `N = |r| - 1`): the left side of
/// the polynomial identity has no Dirichlet coefficients below `x`, so the
/// decomposition must hold exactly — which is precisely what this checks.
pub fn hb_verify(
    r: i64,
    u: u32,
    v: u32,
    k: u32,
    x: u64,
    mode: Mode,
    table: &FactorTable,
) -> Result<IdentityReport> {
    check_params(k, u, v)?;
    if x < 2 {
        return Err(Error::domain("hb_verify requires x >= 2"));
    }
    if x > table.limit() {
        return Err(Error::resource(format!(
            "hb_verify needs factor table limit >= {x}, have {}",
            table.limit()
        )));
    }
    match mode {
        Mode::Exact => hb_verify_generic::<BigRational>(r, u, v, k, x, table),
        Mode::Float => hb_verify_generic::<num::complex::Complex64>(r, u, v, k, x, table),
    }
}

fn hb_verify_generic<T: Scal>(
    r: i64,
    u: u32,
    v: u32,
    k: u32,
    x: u64,
    table: &FactorTable,
) -> Result<IdentityReport> {
    let y = ikroot(x, k);
    let warning = if y < 2 {
        Some(format!(
            "x^(1/K) = {y} < 2: every truncated factor degenerates to the unit"
        ))
    } else {
        None
    };

    let len = x as usize + 1;
    // Truncated tau_{-1/v} table: zero above y.
    let z_neg = BigRational::new(BigInt::from(-1), BigInt::from(v));
    let mut restricted: Vec<T> =
        sieve_from_prime_powers(x, table, 1, |_, e| Ok(T::from_rational(&tau_z_prime_power(&z_neg, e))))?;
    for entry in restricted.iter_mut().skip(y as usize + 1) {
        *entry = T::zero();
    }
    let mut ones = vec![T::one(); len];
    ones[0] = T::zero();

    let (n_shift, ones_start, restr_start) = if r >= 0 {
        (0u32, r as u32 + 1, v - u)
    } else {
        let rr = (-r) as u32;
        (rr - 1, 0, rr * v - u)
    };
    let b = hb_b_coefficients(k, n_shift, u, v)?;

    // Convolution factors for l = 1, extended by one unrestricted and v
    // truncated factors per step.
    let mut cur = vec![T::zero(); len];
    cur[1] = T::one();
    for _ in 0..ones_start {
        cur = convolve_slices(&ones, &cur);
    }
    for _ in 0..restr_start {
        cur = convolve_slices(&restricted, &cur);
    }
    let mut rhs = vec![T::zero(); len];
    for l in 1..=k as usize {
        if l > 1 {
            cur = convolve_slices(&ones, &cur);
            for _ in 0..v {
                cur = convolve_slices(&restricted, &cur);
            }
        }
        let coeff = T::from_rational(&(-b[l - 1].clone()));
        if coeff.is_zero() {
            continue;
        }
        for (slot, value) in rhs.iter_mut().zip(&cur) {
            let mut t = coeff.clone();
            t *= value.clone();
            *slot += t;
        }
    }

    // Left side: the sieved tau_{r + u/v}.
    let z = BigRational::new(BigInt::from(r * v as i64 + u as i64), BigInt::from(v));
    let lhs: Vec<T> =
        sieve_from_prime_powers(x, table, 1, |_, e| Ok(T::from_rational(&tau_z_prime_power(&z, e))))?;

    let mut report = compare_tables(&lhs, &rhs, x, T::MODE);
    report.warning = warning;
    Ok(report)
}
