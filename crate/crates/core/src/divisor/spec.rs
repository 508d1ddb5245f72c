//! Declarative multiplicative-function specifications and their values on
//! prime powers.

use num::integer::{gcd, lcm};
use serde::{Deserialize, Serialize};

use crate::arith::{reduced_residues, DirichletCharacter, FactorTable};
use crate::error::{Error, Result};
use crate::scalar::{binomial_z, tau_z_prime_power, CharValue, Scal, ZParam};

/// A multiplicative function described by what it does on prime powers.
///
/// `TauZ(z)` gives the Dirichlet coefficients of `zeta(s)^z`; twisting by a
/// character gives `L(s, chi)^z`. `ClassOmega` assigns a fixed parameter per
/// residue class of `p` and value `z_r` at every power of such `p`, which
/// realizes the functions whose Euler factors are `1 + z_r/(p^s - 1)`
/// (`ZPowOmega(z)` is the one-class case `n -> z^omega(n)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    TauZ(ZParam),
    TauZTwisted {
        z: ZParam,
        chi: DirichletCharacter,
    },
    ClassOmega {
        modulus: u64,
        class_params: Vec<ZParam>,
    },
    ZPowOmega(ZParam),
    TwoSquaresIndicator,
    Convolve(Vec<FunctionSpec>),
    PointwiseCharTwist {
        inner: Box<FunctionSpec>,
        chi: DirichletCharacter,
    },
}

impl FunctionSpec {
    pub fn one() -> Self {
        FunctionSpec::TauZ(ZParam::from_int(1))
    }

    pub fn mobius() -> Self {
        FunctionSpec::TauZ(ZParam::from_int(-1))
    }

    /// A Dirichlet character as a completely multiplicative function.
    pub fn character(chi: DirichletCharacter) -> Self {
        FunctionSpec::TauZTwisted {
            z: ZParam::from_int(1),
            chi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FunctionSpec::ClassOmega { modulus, class_params } => {
                if *modulus == 0 {
                    return Err(Error::domain("ClassOmega modulus must be positive"));
                }
                let expect = reduced_residues(*modulus).len();
                if class_params.len() != expect {
                    return Err(Error::domain(format!(
                        "ClassOmega mod {modulus} needs {expect} parameters, got {}",
                        class_params.len()
                    )));
                }
                Ok(())
            }
            FunctionSpec::Convolve(parts) => {
                if parts.is_empty() {
                    return Err(Error::domain("Convolve requires at least one component"));
                }
                parts.iter().try_for_each(|p| p.validate())
            }
            FunctionSpec::PointwiseCharTwist { inner, .. } => inner.validate(),
            _ => Ok(()),
        }
    }

    /// Modulus `M` such that prime-power values depend on `p` only through
    /// `p mod M` (and on the exponent).
    pub fn class_modulus(&self) -> u64 {
        match self {
            FunctionSpec::TauZ(_) | FunctionSpec::ZPowOmega(_) => 1,
            FunctionSpec::TauZTwisted { chi, .. } => chi.modulus(),
            FunctionSpec::ClassOmega { modulus, .. } => *modulus,
            FunctionSpec::TwoSquaresIndicator => 4,
            FunctionSpec::Convolve(parts) => parts
                .iter()
                .fold(1, |acc, p| lcm(acc, p.class_modulus())),
            FunctionSpec::PointwiseCharTwist { inner, chi } => {
                lcm(inner.class_modulus(), chi.modulus())
            }
        }
    }

    /// Whether the spec can be evaluated in exact rational mode.
    pub fn supports_exact(&self) -> bool {
        match self {
            FunctionSpec::TauZ(z) | FunctionSpec::ZPowOmega(z) => z.is_rational(),
            FunctionSpec::TauZTwisted { z, chi } => z.is_rational() && chi.is_real(),
            FunctionSpec::ClassOmega { class_params, .. } => {
                class_params.iter().all(|z| z.is_rational())
            }
            FunctionSpec::TwoSquaresIndicator => true,
            FunctionSpec::Convolve(parts) => parts.iter().all(|p| p.supports_exact()),
            FunctionSpec::PointwiseCharTwist { inner, chi } => {
                inner.supports_exact() && chi.is_real()
            }
        }
    }

    /// Value at `p^nu`. The value at `nu = 0` is 1 for every spec.
    pub fn prime_power_value<T: Scal>(&self, p: u64, nu: u32) -> Result<T> {
        if nu == 0 {
            return Ok(T::one());
        }
        match self {
            FunctionSpec::TauZ(z) => {
                let z = T::from_zparam(z)?;
                Ok(tau_z_prime_power(&z, nu))
            }
            FunctionSpec::TauZTwisted { z, chi } => {
                let z = T::from_zparam(z)?;
                let chi_p = char_value_pow(chi.eval(p as i64), nu);
                let mut v = tau_z_prime_power(&z, nu);
                v *= T::from_char_value(&chi_p)?;
                Ok(v)
            }
            FunctionSpec::ClassOmega { modulus, class_params } => {
                if *modulus == 1 {
                    return T::from_zparam(&class_params[0]);
                }
                if gcd(p, *modulus) != 1 {
                    return Ok(T::zero());
                }
                let residues = reduced_residues(*modulus);
                let pos = residues
                    .iter()
                    .position(|&r| r == p % *modulus)
                    .expect("coprime residue present");
                T::from_zparam(&class_params[pos])
            }
            FunctionSpec::ZPowOmega(z) => T::from_zparam(z),
            FunctionSpec::TwoSquaresIndicator => {
                // n is a sum of two squares iff every prime ≡ 3 (mod 4)
                // divides n to an even power.
                if p % 4 == 3 && nu % 2 == 1 {
                    Ok(T::zero())
                } else {
                    Ok(T::one())
                }
            }
            FunctionSpec::Convolve(parts) => {
                // Convolve the component prime-power sequences up to nu.
                let mut acc: Vec<T> = vec![T::one()];
                for part in parts {
                    let comp: Vec<T> = (0..=nu)
                        .map(|j| part.prime_power_value(p, j))
                        .collect::<Result<_>>()?;
                    let mut next = vec![T::zero(); nu as usize + 1];
                    for (i, ai) in acc.iter().enumerate() {
                        if ai.is_zero() {
                            continue;
                        }
                        for (j, cj) in comp.iter().enumerate() {
                            if i + j > nu as usize {
                                break;
                            }
                            let mut t = ai.clone();
                            t *= cj.clone();
                            next[i + j] += t;
                        }
                    }
                    acc = next;
                }
                Ok(acc.into_iter().nth(nu as usize).unwrap_or_else(T::zero))
            }
            FunctionSpec::PointwiseCharTwist { inner, chi } => {
                let chi_p = char_value_pow(chi.eval(p as i64), nu);
                let mut v: T = inner.prime_power_value(p, nu)?;
                v *= T::from_char_value(&chi_p)?;
                Ok(v)
            }
        }
    }
}

fn char_value_pow(v: CharValue, nu: u32) -> CharValue {
    match v {
        CharValue::Zero => CharValue::Zero,
        CharValue::Root { num, den } => CharValue::root(num as u64 * nu as u64, den as u64),
    }
}

/// `f^{(*z)}(p^nu)`: the z-fold convolution of `f` at a prime power,
/// `sum_{1<=r<=nu} binom(z, r) sum_{l_1+...+l_r=nu} f(p^{l_1})...f(p^{l_r})`.
///
/// The composition sums are accumulated by dynamic programming over
/// `(r, nu)`; enumerating compositions directly is exponential in `nu`.
pub fn z_fold_convolution_prime_power<T: Scal>(
    f: &FunctionSpec,
    z: &T,
    p: u64,
    nu: u32,
) -> Result<T> {
    if nu == 0 {
        return Ok(T::one());
    }
    let fp: Vec<T> = (1..=nu)
        .map(|l| f.prime_power_value(p, l))
        .collect::<Result<_>>()?;
    z_fold_from_values(&fp, z, nu)
}

/// Same as [`z_fold_convolution_prime_power`] but with the prime-power values
/// `f(p^1)..f(p^nu)` already evaluated.
pub fn z_fold_from_values<T: Scal>(fp: &[T], z: &T, nu: u32) -> Result<T> {
    let nu = nu as usize;
    debug_assert!(fp.len() >= nu);
    // s[v] holds S_r(v) = sum over compositions of v into r parts.
    let mut s: Vec<T> = (0..nu).map(|v| fp[v].clone()).collect();
    let mut total = T::zero();
    for r in 1..=nu {
        let mut coeff = binomial_z(z, r as u32);
        coeff *= s[nu - 1].clone();
        total += coeff;
        if r == nu {
            break;
        }
        // S_{r+1}(v) = sum_{j=1}^{v-r} f(p^j) S_r(v-j); entries below v = r+1
        // are dead and never read again.
        let mut next = vec![T::zero(); nu];
        for v in (r + 1)..=nu {
            let mut acc = T::zero();
            for j in 1..=(v - r) {
                let mut t = fp[j - 1].clone();
                t *= s[v - j - 1].clone();
                acc += t;
            }
            next[v - 1] = acc;
        }
        s = next;
    }
    Ok(total)
}

/// Sieves the multiplicative function defined by a prime-power closure over
/// `1..=x`, memoizing by `(p mod class_modulus, nu)`.
pub fn sieve_from_prime_powers<T: Scal>(
    x: u64,
    table: &FactorTable,
    class_modulus: u64,
    mut ppval: impl FnMut(u64, u32) -> Result<T>,
) -> Result<Vec<T>> {
    if x > table.limit() {
        return Err(Error::resource(format!(
            "sieve limit {x} exceeds factor table limit {}",
            table.limit()
        )));
    }
    let mut memo: std::collections::HashMap<(u64, u32), T> = std::collections::HashMap::new();
    let mut vals = vec![T::zero(); x as usize + 1];
    if x >= 1 {
        vals[1] = T::one();
    }
    for n in 2..=x {
        let (p, e, m) = table.split_smallest(n);
        let key = (p % class_modulus.max(1), e);
        let pv = match memo.get(&key) {
            Some(v) => v.clone(),
            None => {
                let v = ppval(p, e)?;
                memo.insert(key, v.clone());
                v
            }
        };
        let mut v = vals[m as usize].clone();
        v *= pv;
        vals[n as usize] = v;
    }
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::complex::Complex64;
    use num::{BigInt, BigRational, One, Zero};

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn two_squares_prime_powers() {
        let f = FunctionSpec::TwoSquaresIndicator;
        assert_eq!(f.prime_power_value::<BigRational>(2, 5).unwrap(), BigRational::one());
        assert_eq!(f.prime_power_value::<BigRational>(5, 3).unwrap(), BigRational::one());
        assert_eq!(f.prime_power_value::<BigRational>(3, 1).unwrap(), BigRational::zero());
        assert_eq!(f.prime_power_value::<BigRational>(3, 2).unwrap(), BigRational::one());
    }

    #[test]
    fn z_fold_at_nu_one_is_z_times_fp() {
        let f = FunctionSpec::one();
        let z = rat(7, 3);
        let got = z_fold_convolution_prime_power(&f, &z, 5, 1).unwrap();
        assert_eq!(got, rat(7, 3));
    }

    #[test]
    fn z_fold_of_ones_is_tau_z() {
        // f identically 1 at prime powers: f^{(*z)}(p^nu) = tau_z(p^nu).
        let f = FunctionSpec::character(DirichletCharacter::trivial());
        for num in [-3i64, -1, 1, 2, 5] {
            for den in [1i64, 2, 3] {
                let z = rat(num, den);
                for nu in 1..=6u32 {
                    let got = z_fold_convolution_prime_power(&f, &z, 7, nu).unwrap();
                    let expect = tau_z_prime_power(&z, nu);
                    assert_eq!(got, expect, "z = {num}/{den}, nu = {nu}");
                }
            }
        }
    }

    #[test]
    fn z_fold_two_is_direct_convolution() {
        // z = 2: f^{(*2)}(p^2) = 2 f(p^2) + f(p)^2.
        let chi = crate::arith::character_group(3)
            .unwrap()
            .characters()
            .iter()
            .find(|c| !c.is_principal())
            .cloned()
            .unwrap();
        let f = FunctionSpec::TauZTwisted {
            z: ZParam::from_ratio(1, 2).unwrap(),
            chi,
        };
        let z = rat(2, 1);
        for p in [2u64, 5, 7] {
            let fp1: BigRational = f.prime_power_value(p, 1).unwrap();
            let fp2: BigRational = f.prime_power_value(p, 2).unwrap();
            let got = z_fold_convolution_prime_power(&f, &z, p, 2).unwrap();
            let expect = rat(2, 1) * fp2 + fp1.clone() * fp1;
            assert_eq!(got, expect, "p = {p}");
        }
    }

    #[test]
    fn z_fold_zero_is_identity_element() {
        let f = FunctionSpec::one();
        let z = rat(0, 1);
        for nu in 1..=4 {
            let got: BigRational = z_fold_convolution_prime_power(&f, &z, 3, nu).unwrap();
            assert_eq!(got, BigRational::zero());
        }
    }

    #[test]
    fn convolve_spec_prime_powers() {
        // tau_{1/2} * tau_{1/2} should have tau_1 = 1 on prime powers.
        let half = FunctionSpec::TauZ(ZParam::from_ratio(1, 2).unwrap());
        let conv = FunctionSpec::Convolve(vec![half.clone(), half]);
        for nu in 0..=8u32 {
            let v: BigRational = conv.prime_power_value(3, nu).unwrap();
            assert_eq!(v, BigRational::one(), "nu = {nu}");
        }
    }

    #[test]
    fn exact_mode_rejects_complex_parameters() {
        let f = FunctionSpec::TauZ(ZParam::complex(0.5, 0.3).unwrap());
        assert!(f.prime_power_value::<BigRational>(2, 1).is_err());
        assert!(f.prime_power_value::<Complex64>(2, 1).is_ok());
        assert!(!f.supports_exact());
    }

    #[test]
    fn class_omega_matches_zpow_for_modulus_one() {
        let z = ZParam::from_ratio(3, 1).unwrap();
        let a = FunctionSpec::ClassOmega {
            modulus: 1,
            class_params: vec![z.clone()],
        };
        let b = FunctionSpec::ZPowOmega(z);
        for p in [2u64, 3, 11] {
            for nu in 1..=4 {
                let va: BigRational = a.prime_power_value(p, nu).unwrap();
                let vb: BigRational = b.prime_power_value(p, nu).unwrap();
                assert_eq!(va, vb);
            }
        }
    }
}
