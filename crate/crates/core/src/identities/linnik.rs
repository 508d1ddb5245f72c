//! The Linnik-type identity: `f^{(*z)}(n)` as a bounded combination of
//! convolutions with a friable-supported component.

use num::complex::Complex64;
use num::BigRational;

use super::{compare_tables, IdentityReport};
use crate::arith::{ikroot, FactorTable};
use crate::divisor::{
    convolve_slices, sieve_from_prime_powers, z_fold_convolution_prime_power, FunctionSpec,
};
use crate::error::{Error, Result};
use crate::scalar::{binomial_z, Mode, Scal, ZParam};

/// `c_l = (-1)^l sum_{l <= j < K} (-1)^j binom(z, j) binom(j, l)` for
/// `l = 0..K-1`. These satisfy `sum_l c_l = 1`.
pub fn linnik_coefficients<T: Scal>(z: &T, k: u32) -> Vec<T> {
    assert!(k >= 1);
    let mut out = Vec::with_capacity(k as usize);
    for l in 0..k {
        let mut acc = T::zero();
        for j in l..k {
            let mut term = binomial_z(z, j);
            term *= binomial_z(&T::from_u64(j as u64), l);
            if (j - l) % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        out.push(acc);
    }
    out
}

/// Verifies, for every `n <= x`,
/// `f^{(*z)}(n) = sum_{0 <= l < K} c_l sum_{n = n1 n2, P+(n1) <= x^{1/K}}
///  f^{(*(z-l))}(n1) f^{(*l)}(n2)`.
pub fn linnik_verify(
    f: &FunctionSpec,
    z: &ZParam,
    k: u32,
    x: u64,
    mode: Mode,
    table: &FactorTable,
) -> Result<IdentityReport> {
    f.validate()?;
    if k == 0 {
        return Err(Error::domain("linnik_verify requires K >= 1"));
    }
    if x < 2 {
        return Err(Error::domain("linnik_verify requires x >= 2"));
    }
    if x > table.limit() {
        return Err(Error::resource(format!(
            "linnik_verify needs factor table limit >= {x}, have {}",
            table.limit()
        )));
    }
    match mode {
        Mode::Exact => linnik_verify_generic::<BigRational>(f, z, k, x, table),
        Mode::Float => linnik_verify_generic::<Complex64>(f, z, k, x, table),
    }
}

fn linnik_verify_generic<T: Scal>(
    f: &FunctionSpec,
    z: &ZParam,
    k: u32,
    x: u64,
    table: &FactorTable,
) -> Result<IdentityReport> {
    let z_t = T::from_zparam(z)?;
    let y = ikroot(x, k);
    let warning = if y < 2 {
        Some(format!("x^(1/K) = {y} < 2: the friable component is trivial"))
    } else {
        None
    };
    let class_mod = f.class_modulus();

    // Largest prime factor per n, for the friable restriction.
    let mut lpf = vec![0u64; x as usize + 1];
    for n in 2..=x {
        let (p, _, m) = table.split_smallest(n);
        lpf[n as usize] = if m == 1 { p } else { lpf[m as usize] };
    }

    let sieve_fold = |w: &T| -> Result<Vec<T>> {
        sieve_from_prime_powers(x, table, class_mod, |p, e| {
            z_fold_convolution_prime_power(f, w, p, e)
        })
    };

    let lhs = sieve_fold(&z_t)?;
    let coeffs = linnik_coefficients(&z_t, k);
    let mut rhs = vec![T::zero(); x as usize + 1];
    for (l, c_l) in coeffs.iter().enumerate() {
        if c_l.is_zero() {
            continue;
        }
        let mut w = z_t.clone();
        w -= T::from_u64(l as u64);
        let mut friable = sieve_fold(&w)?;
        for n in 2..=x as usize {
            if lpf[n] > y {
                friable[n] = T::zero();
            }
        }
        let integer_fold = sieve_fold(&T::from_u64(l as u64))?;
        let conv = convolve_slices(&friable, &integer_fold);
        for (slot, value) in rhs.iter_mut().zip(conv) {
            let mut t = c_l.clone();
            t *= value;
            *slot += t;
        }
    }

    let mut report = compare_tables(&lhs, &rhs, x, T::MODE);
    report.warning = warning;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{character_group, DirichletCharacter};
    use num::{BigInt, One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn nonprincipal_mod3() -> DirichletCharacter {
        character_group(3)
            .unwrap()
            .characters()
            .iter()
            .find(|c| !c.is_principal())
            .cloned()
            .unwrap()
    }

    #[test]
    fn coefficients_k1() {
        let c = linnik_coefficients(&rat(7, 2), 1);
        assert_eq!(c, vec![BigRational::one()]);
    }

    #[test]
    fn coefficients_k2() {
        // c_0 = 1 - z, c_1 = z.
        let z = rat(5, 3);
        let c = linnik_coefficients(&z, 2);
        assert_eq!(c, vec![BigRational::one() - z.clone(), z]);
    }

    #[test]
    fn coefficients_sum_to_one() {
        for k in 1..=8u32 {
            let z = Complex64::new(0.7, 0.2);
            let sum: Complex64 = linnik_coefficients(&z, k).into_iter().sum();
            assert!((sum - Complex64::one()).norm() < 1e-12, "K = {k}: {sum}");
        }
    }

    #[test]
    fn integer_z_truncates_coefficients() {
        // For z = j integer with 0 <= j < K: c_l = 0 for l > j.
        for j in 0..4i64 {
            let c = linnik_coefficients(&rat(j, 1), 6);
            for (l, cl) in c.iter().enumerate() {
                if l as i64 > j {
                    assert!(cl.is_zero(), "z = {j}, l = {l}: {cl}");
                }
            }
        }
    }

    #[test]
    fn verify_trivial_k1() {
        let table = FactorTable::new(1000).unwrap();
        let f = FunctionSpec::character(DirichletCharacter::trivial());
        let z = ZParam::from_ratio(5, 7).unwrap();
        let report = linnik_verify(&f, &z, 1, 1000, Mode::Exact, &table).unwrap();
        assert_eq!(report.max_abs_deviation, 0.0);
    }

    #[test]
    fn verify_exact_half() {
        let table = FactorTable::new(2000).unwrap();
        let f = FunctionSpec::character(DirichletCharacter::trivial());
        let z = ZParam::from_ratio(1, 2).unwrap();
        for k in [2u32, 3] {
            let report = linnik_verify(&f, &z, k, 2000, Mode::Exact, &table).unwrap();
            assert_eq!(report.max_abs_deviation, 0.0, "K = {k}, worst {:?}", report.worst_n);
        }
    }

    #[test]
    fn verify_twisted_exact() {
        let table = FactorTable::new(1500).unwrap();
        let f = FunctionSpec::character(nonprincipal_mod3());
        let z = ZParam::from_ratio(1, 2).unwrap();
        let report = linnik_verify(&f, &z, 3, 1500, Mode::Exact, &table).unwrap();
        assert_eq!(report.max_abs_deviation, 0.0, "worst {:?}", report.worst_n);
    }

    #[test]
    fn verify_complex_float() {
        let table = FactorTable::new(2000).unwrap();
        let f = FunctionSpec::character(DirichletCharacter::trivial());
        let z = ZParam::complex(0.5, 0.3).unwrap();
        let report = linnik_verify(&f, &z, 4, 2000, Mode::Float, &table).unwrap();
        assert!(report.max_abs_deviation < 1e-9, "dev = {}", report.max_abs_deviation);
    }
}
