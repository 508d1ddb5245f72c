//! Scalar arithmetic in two modes: exact rationals and complex doubles.
//!
//! Every table-producing operation is generic over [`Scal`], which both
//! [`BigRational`] and [`Complex64`] implement. The exact mode is what makes
//! the combinatorial identity checks meaningful: a reported deviation of zero
//! is an equality of rational numbers, not a float comparison.

use num::complex::Complex64;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic mode of a value table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Float,
    Exact,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Float => write!(f, "float"),
            Mode::Exact => write!(f, "exact"),
        }
    }
}

/// Order parameter `z` of a generalized divisor function.
///
/// Rational parameters stay exact end to end; complex parameters force float
/// mode. Rationals are kept reduced with positive denominator ([`BigRational`]
/// maintains that invariant on construction).
#[derive(Debug, Clone, PartialEq)]
pub enum ZParam {
    Rational(BigRational),
    Complex { re: f64, im: f64 },
}

impl Serialize for ZParam {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ZParam {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ZParam::parse(&s).map_err(D::Error::custom)
    }
}

impl ZParam {
    pub fn from_int(n: i64) -> Self {
        ZParam::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("rational z with zero denominator"));
        }
        Ok(ZParam::Rational(BigRational::new(
            BigInt::from(num),
            BigInt::from(den),
        )))
    }

    pub fn complex(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::domain("complex z must be finite"));
        }
        Ok(ZParam::Complex { re, im })
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ZParam::Rational(_))
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            ZParam::Rational(r) => Complex64::new(rational_to_f64(r), 0.0),
            ZParam::Complex { re, im } => Complex64::new(*re, *im),
        }
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Parses the CLI grammar: `n`, `-n`, `u/v`, `-u/v`, `a+bi`, `a-bi`,
    /// `bi`, or a bare decimal (treated as a real complex parameter).
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::parse("empty z parameter"));
        }
        if let Some((num, den)) = s.split_once('/') {
            let num: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad rational numerator in z: {s:?}")))?;
            let den: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad rational denominator in z: {s:?}")))?;
            return ZParam::from_ratio(num, den);
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(ZParam::from_int(n));
        }
        if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('I')) {
            // Split into real and imaginary parts on the last +/- that is not
            // an exponent sign and not the leading sign.
            let bytes = body.as_bytes();
            let mut split = None;
            for idx in (1..bytes.len()).rev() {
                let c = bytes[idx] as char;
                if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                    split = Some(idx);
                    break;
                }
            }
            let (re_s, im_s) = match split {
                Some(idx) => (&body[..idx], &body[idx..]),
                None => ("0", body),
            };
            let re: f64 = re_s
                .parse()
                .map_err(|_| Error::parse(format!("bad real part in z: {s:?}")))?;
            let im_s = if im_s == "+" || im_s.is_empty() {
                "1"
            } else if im_s == "-" {
                "-1"
            } else {
                im_s
            };
            let im: f64 = im_s
                .parse()
                .map_err(|_| Error::parse(format!("bad imaginary part in z: {s:?}")))?;
            return ZParam::complex(re, im);
        }
        if let Ok(re) = s.parse::<f64>() {
            return ZParam::complex(re, 0.0);
        }
        Err(Error::parse(format!(
            "cannot parse z parameter {s:?}: expected \"n\", \"u/v\" or \"a+bi\""
        )))
    }
}

impl std::fmt::Display for ZParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ZParam::Rational(r) => write!(f, "{r}"),
            ZParam::Complex { re, im } => {
                if *im >= 0.0 {
                    write!(f, "{re}+{im}i")
                } else {
                    write!(f, "{re}{im}i")
                }
            }
        }
    }
}

/// A single value drawn from a table, tagged with its mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(Complex64),
}

impl Scalar {
    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(BigRational::zero()),
            Mode::Float => Scalar::Float(Complex64::zero()),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(r) => Complex64::new(rational_to_f64(r), 0.0),
            Scalar::Float(c) => *c,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(c) => c.is_zero(),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Falls back to a quotient of truncated parts for very large entries.
        let num = r.numer().to_f64().unwrap_or(f64::MAX);
        let den = r.denom().to_f64().unwrap_or(f64::MAX);
        num / den
    })
}

/// Exact value of a Dirichlet character: zero or a root of unity `e(num/den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharValue {
    Zero,
    /// `e(num/den)` with `0 <= num < den`, reduced.
    Root {
        num: u32,
        den: u32,
    },
}

impl CharValue {
    pub fn one() -> Self {
        CharValue::Root { num: 0, den: 1 }
    }

    pub fn root(num: u64, den: u64) -> Self {
        debug_assert!(den > 0);
        let num = num % den;
        let g = num::integer::gcd(num, den);
        CharValue::Root {
            num: (num / g) as u32,
            den: (den / g) as u32,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CharValue::Zero)
    }

    pub fn conj(&self) -> Self {
        match *self {
            CharValue::Zero => CharValue::Zero,
            CharValue::Root { num, den } => CharValue::Root {
                num: if num == 0 { 0 } else { den - num },
                den,
            },
        }
    }

    pub fn mul(&self, other: &CharValue) -> CharValue {
        match (*self, *other) {
            (CharValue::Zero, _) | (_, CharValue::Zero) => CharValue::Zero,
            (CharValue::Root { num: n1, den: d1 }, CharValue::Root { num: n2, den: d2 }) => {
                let den = num::integer::lcm(d1 as u64, d2 as u64);
                let num = (n1 as u64 * (den / d1 as u64) + n2 as u64 * (den / d2 as u64)) % den;
                CharValue::root(num, den)
            }
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match *self {
            CharValue::Zero => Complex64::zero(),
            CharValue::Root { num: 0, den: _ } => Complex64::one(),
            CharValue::Root { num, den } if 2 * num == den => -Complex64::one(),
            CharValue::Root { num, den } => {
                let theta = 2.0 * std::f64::consts::PI * (num as f64) / (den as f64);
                Complex64::new(theta.cos(), theta.sin())
            }
        }
    }

    /// True for values representable as rationals (0 and ±1).
    pub fn is_rational(&self) -> bool {
        matches!(
            self,
            CharValue::Zero | CharValue::Root { num: 0, .. } | CharValue::Root { num: 1, den: 2 }
        )
    }
}

/// The scalar interface shared by the exact and float modes.
pub trait Scal:
    Clone
    + PartialEq
    + std::fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + std::ops::Neg<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
{
    const MODE: Mode;

    fn from_u64(v: u64) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn from_zparam(z: &ZParam) -> Result<Self>;
    fn from_char_value(v: &CharValue) -> Result<Self>;
    /// |self| as a double, for deviation reports.
    fn abs_f64(&self) -> f64;
    fn into_scalar(self) -> Scalar;

    /// Accumulates `value`, using `comp` as the compensation slot in float
    /// mode. Exact arithmetic needs no compensation.
    fn add_compensated(&mut self, value: Self, comp: &mut Self) {
        let _ = comp;
        *self += value;
    }
}

impl Scal for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_u64(v: u64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn from_zparam(z: &ZParam) -> Result<Self> {
        match z {
            ZParam::Rational(r) => Ok(r.clone()),
            ZParam::Complex { .. } => Err(Error::mode(
                "exact mode requires a rational z parameter, got a complex one",
            )),
        }
    }
    fn from_char_value(v: &CharValue) -> Result<Self> {
        match *v {
            CharValue::Zero => Ok(BigRational::zero()),
            CharValue::Root { num: 0, .. } => Ok(BigRational::one()),
            CharValue::Root { num, den } if 2 * num == den => Ok(-BigRational::one()),
            CharValue::Root { num, den } => Err(Error::mode(format!(
                "exact mode requires character values in {{0, ±1}}, got e({num}/{den})"
            ))),
        }
    }
    fn abs_f64(&self) -> f64 {
        rational_to_f64(&self.abs())
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }
}

impl Scal for Complex64 {
    const MODE: Mode = Mode::Float;

    fn from_u64(v: u64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }
    fn from_zparam(z: &ZParam) -> Result<Self> {
        Ok(z.to_c64())
    }
    fn from_char_value(v: &CharValue) -> Result<Self> {
        Ok(v.to_c64())
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
}

/// Generalized binomial coefficient `binom(z, l) = z(z-1)...(z-l+1)/l!`.
pub fn binomial_z<T: Scal>(z: &T, l: u32) -> T {
    let mut acc = T::one();
    for i in 0..l {
        let mut term = z.clone();
        term -= T::from_u64(i as u64);
        acc *= term / T::from_u64((i + 1) as u64);
    }
    acc
}

/// `tau_z(p^l) = binom(z + l - 1, l)` — independent of the prime `p`.
pub fn tau_z_prime_power<T: Scal>(z: &T, l: u32) -> T {
    if l == 0 {
        return T::one();
    }
    let mut shifted = z.clone();
    shifted += T::from_u64((l - 1) as u64);
    binomial_z(&shifted, l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binomial_empty_product_is_one() {
        assert_eq!(binomial_z(&rat(7, 3), 0), BigRational::one());
    }

    #[test]
    fn binomial_half() {
        // binom(1/2, 2) = (1/2)(-1/2)/2 = -1/8
        assert_eq!(binomial_z(&rat(1, 2), 2), rat(-1, 8));
    }

    #[test]
    fn binomial_minus_one_alternates() {
        for l in 0..8u32 {
            let expect = if l % 2 == 0 { 1 } else { -1 };
            assert_eq!(binomial_z(&rat(-1, 1), l), rat(expect, 1));
        }
    }

    #[test]
    fn tau_z_prime_power_values() {
        // z = -1 recovers the Möbius pattern on prime powers.
        assert_eq!(tau_z_prime_power(&rat(-1, 1), 1), rat(-1, 1));
        assert_eq!(tau_z_prime_power(&rat(-1, 1), 2), rat(0, 1));
        // z = 2: divisor count of p^3 is 4.
        assert_eq!(tau_z_prime_power(&rat(2, 1), 3), rat(4, 1));
        // z = 1/2 at l = 2: binom(3/2, 2) = 3/8.
        assert_eq!(tau_z_prime_power(&rat(1, 2), 2), rat(3, 8));
        // l = 0 is 1 for any z.
        assert_eq!(tau_z_prime_power(&rat(9, 7), 0), rat(1, 1));
    }

    #[test]
    fn tau_z_prime_power_float_matches_exact() {
        let z = rat(5, 3);
        let zc = Complex64::new(5.0 / 3.0, 0.0);
        for l in 0..10u32 {
            let e = rational_to_f64(&tau_z_prime_power(&z, l));
            let f = tau_z_prime_power(&zc, l).re;
            assert!((e - f).abs() < 1e-10, "l={l}: {e} vs {f}");
        }
    }

    #[test]
    fn zparam_parsing() {
        assert_eq!(ZParam::parse("1").unwrap(), ZParam::from_int(1));
        assert_eq!(ZParam::parse("-3").unwrap(), ZParam::from_int(-3));
        assert_eq!(ZParam::parse("1/2").unwrap(), ZParam::from_ratio(1, 2).unwrap());
        assert_eq!(ZParam::parse("-1/2").unwrap(), ZParam::from_ratio(-1, 2).unwrap());
        assert_eq!(
            ZParam::parse("0.5+0.3i").unwrap(),
            ZParam::Complex { re: 0.5, im: 0.3 }
        );
        assert_eq!(
            ZParam::parse("0.5-0.3i").unwrap(),
            ZParam::Complex { re: 0.5, im: -0.3 }
        );
        assert_eq!(ZParam::parse("2.5").unwrap(), ZParam::Complex { re: 2.5, im: 0.0 });
        assert!(ZParam::parse("1/0").is_err());
        assert!(ZParam::parse("abc").is_err());
        assert!(ZParam::parse("").is_err());
    }

    #[test]
    fn char_value_algebra() {
        let i = CharValue::root(1, 4);
        let minus_one = i.mul(&i);
        assert_eq!(minus_one, CharValue::root(1, 2));
        assert_eq!(i.conj(), CharValue::root(3, 4));
        assert!((i.to_c64() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(minus_one.to_c64(), -Complex64::one());
        assert!(minus_one.is_rational());
        assert!(!i.is_rational());
    }
}
