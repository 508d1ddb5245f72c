//! Value tables of multiplicative functions over `1..=x`, their Dirichlet
//! convolution, and the flat binary / CSV exchange formats.

use std::io::{Read, Write};

use num::complex::Complex64;
use num::{bigint::Sign, BigInt, BigRational, Zero};
use sha2::{Digest, Sha256};

use super::spec::{sieve_from_prime_powers, FunctionSpec};
use crate::arith::FactorTable;
use crate::error::{Error, Result};
use crate::par;
use crate::scalar::{Mode, Scal, Scalar};

const MAGIC: &[u8; 4] = b"DVCT";
const FORMAT_VERSION: u16 = 1;
const CONVOLVE_CHUNK: usize = 1 << 13;

/// Values of one multiplicative function on `1..=limit`, uniform in mode.
pub struct ValueTable {
    spec: FunctionSpec,
    limit: u64,
    data: TableData,
}

pub enum TableData {
    /// Index 0 is unused padding in both variants.
    Exact(Vec<BigRational>),
    Float(Vec<Complex64>),
}

impl ValueTable {
    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn mode(&self) -> Mode {
        match self.data {
            TableData::Exact(_) => Mode::Exact,
            TableData::Float(_) => Mode::Float,
        }
    }

    pub fn value(&self, n: u64) -> Scalar {
        debug_assert!(n >= 1 && n <= self.limit);
        match &self.data {
            TableData::Exact(v) => Scalar::Exact(v[n as usize].clone()),
            TableData::Float(v) => Scalar::Float(v[n as usize]),
        }
    }

    pub fn value_c64(&self, n: u64) -> Complex64 {
        self.value(n).to_c64()
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.data {
            TableData::Exact(v) => Some(v),
            TableData::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Option<&[Complex64]> {
        match &self.data {
            TableData::Float(v) => Some(v),
            TableData::Exact(_) => None,
        }
    }

    pub fn from_exact(spec: FunctionSpec, values: Vec<BigRational>) -> Self {
        ValueTable {
            spec,
            limit: values.len() as u64 - 1,
            data: TableData::Exact(values),
        }
    }

    pub fn from_float(spec: FunctionSpec, values: Vec<Complex64>) -> Self {
        ValueTable {
            spec,
            limit: values.len() as u64 - 1,
            data: TableData::Float(values),
        }
    }

    /// SHA-256 of the canonical JSON encoding of the spec.
    pub fn spec_digest(&self) -> [u8; 32] {
        spec_digest(&self.spec)
    }
}

pub fn spec_digest(spec: &FunctionSpec) -> [u8; 32] {
    let json = serde_json::to_string(spec).expect("spec serializes");
    let mut hasher = Sha256::new();
    hasher.update(json.as_bytes());
    hasher.finalize().into()
}

/// Sieves `spec` over `1..=x`. Convolution specs are realized by convolving
/// the component tables; everything else walks `n` in increasing order,
/// splitting off `p^nu` with `p = spf(n)`.
pub fn sieve_multiplicative(
    spec: &FunctionSpec,
    x: u64,
    table: &FactorTable,
    mode: Mode,
) -> Result<ValueTable> {
    spec.validate()?;
    if mode == Mode::Exact && !spec.supports_exact() {
        return Err(Error::mode(
            "exact mode requires rational parameters and real characters",
        ));
    }
    if let FunctionSpec::Convolve(parts) = spec {
        let mut tables = parts.iter().map(|p| sieve_multiplicative(p, x, table, mode));
        let mut acc = tables.next().expect("validated nonempty")?;
        for t in tables {
            acc = dirichlet_convolve(&acc, &t?)?;
        }
        return Ok(ValueTable { spec: spec.clone(), limit: x, data: acc.data });
    }
    let m = spec.class_modulus();
    match mode {
        Mode::Exact => {
            let vals =
                sieve_from_prime_powers::<BigRational>(x, table, m, |p, e| {
                    spec.prime_power_value(p, e)
                })?;
            Ok(ValueTable { spec: spec.clone(), limit: x, data: TableData::Exact(vals) })
        }
        Mode::Float => {
            let vals = sieve_from_prime_powers::<Complex64>(x, table, m, |p, e| {
                spec.prime_power_value(p, e)
            })?;
            Ok(ValueTable { spec: spec.clone(), limit: x, data: TableData::Float(vals) })
        }
    }
}

/// Dirichlet convolution of 1-indexed slices of equal length; entry `n` of
/// the result is `sum_{de=n} a[d] b[e]`. Cost `O(x log x)`.
///
/// Output cells are written by disjoint chunks and each cell accumulates its
/// divisor pairs in ascending `d`, so the result does not depend on the
/// thread count.
pub fn convolve_slices<T: Scal>(a: &[T], b: &[T]) -> Vec<T> {
    assert_eq!(a.len(), b.len());
    let x = a.len() - 1;
    let mut out = vec![T::zero(); x + 1];
    if x == 0 {
        return out;
    }
    par::fill_chunks(&mut out[1..], CONVOLVE_CHUNK, |start0, slice| {
        let lo = start0 + 1;
        let hi = lo + slice.len() - 1;
        for d in 1..=hi {
            if a[d].is_zero() {
                continue;
            }
            let e_lo = lo.div_ceil(d).max(1);
            let e_hi = hi / d;
            for e in e_lo..=e_hi {
                if b[e].is_zero() {
                    continue;
                }
                let mut t = a[d].clone();
                t *= b[e].clone();
                slice[d * e - lo] += t;
            }
        }
    });
    out
}

/// Dirichlet convolution of two tables of the same limit and mode.
pub fn dirichlet_convolve(a: &ValueTable, b: &ValueTable) -> Result<ValueTable> {
    if a.limit != b.limit {
        return Err(Error::domain(format!(
            "convolution limits differ: {} vs {}",
            a.limit, b.limit
        )));
    }
    let spec = FunctionSpec::Convolve(vec![a.spec.clone(), b.spec.clone()]);
    let data = match (&a.data, &b.data) {
        (TableData::Exact(va), TableData::Exact(vb)) => TableData::Exact(convolve_slices(va, vb)),
        (TableData::Float(va), TableData::Float(vb)) => TableData::Float(convolve_slices(va, vb)),
        _ => {
            return Err(Error::mode(
                "convolution operands must share a mode (exact vs float)",
            ))
        }
    };
    Ok(ValueTable { spec, limit: a.limit, data })
}

/// Divisor counts `tau(n)` for `n <= x`.
pub fn tau_table(x: u64, table: &FactorTable) -> Result<Vec<u32>> {
    if x > table.limit() {
        return Err(Error::resource(format!(
            "tau table needs factor table limit >= {x}, have {}",
            table.limit()
        )));
    }
    let mut tau = vec![0u32; x as usize + 1];
    if x >= 1 {
        tau[1] = 1;
    }
    for n in 2..=x {
        let (_, e, m) = table.split_smallest(n);
        tau[n as usize] = tau[m as usize] * (e + 1);
    }
    Ok(tau)
}

/// Distinct-prime-factor counts `omega(n)` for `n <= x`.
pub fn omega_table(x: u64, table: &FactorTable) -> Result<Vec<u8>> {
    if x > table.limit() {
        return Err(Error::resource(format!(
            "omega table needs factor table limit >= {x}, have {}",
            table.limit()
        )));
    }
    let mut omega = vec![0u8; x as usize + 1];
    for n in 2..=x {
        let (_, _, m) = table.split_smallest(n);
        omega[n as usize] = omega[m as usize] + 1;
    }
    Ok(omega)
}

// --- flat binary format ----------------------------------------------------
//
// header: magic "DVCT", version u16 LE, mode u8 (0 = float, 1 = exact),
//         reserved u8, limit u64 LE, spec digest (32 bytes),
//         spec JSON (u32 LE length + bytes)
// payload: float -> (re, im) f64 LE per n in 1..=limit
//          exact -> per n: numerator then denominator, each as
//                   sign byte (0/1/2 = zero/plus/minus) + u32 LE length
//                   + little-endian magnitude bytes

fn write_bigint<W: Write>(w: &mut W, v: &BigInt) -> Result<()> {
    let (sign, bytes) = v.to_bytes_le();
    let tag: u8 = match sign {
        Sign::NoSign => 0,
        Sign::Plus => 1,
        Sign::Minus => 2,
    };
    w.write_all(&[tag])?;
    w.write_all(&(bytes.len() as u32).to_le_bytes())?;
    w.write_all(&bytes)?;
    Ok(())
}

fn read_bigint<R: Read>(r: &mut R) -> Result<BigInt> {
    let mut tag = [0u8; 1];
    r.read_exact(&mut tag)?;
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut bytes = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut bytes)?;
    let sign = match tag[0] {
        0 => Sign::NoSign,
        1 => Sign::Plus,
        2 => Sign::Minus,
        t => return Err(Error::parse(format!("bad bigint sign tag {t}"))),
    };
    Ok(BigInt::from_bytes_le(sign, &bytes))
}

impl ValueTable {
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        let mode_tag: u8 = match self.mode() {
            Mode::Float => 0,
            Mode::Exact => 1,
        };
        w.write_all(&[mode_tag, 0])?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&self.spec_digest())?;
        let spec_json = serde_json::to_vec(&self.spec).expect("spec serializes");
        w.write_all(&(spec_json.len() as u32).to_le_bytes())?;
        w.write_all(&spec_json)?;
        match &self.data {
            TableData::Float(vals) => {
                for v in &vals[1..] {
                    w.write_all(&v.re.to_le_bytes())?;
                    w.write_all(&v.im.to_le_bytes())?;
                }
            }
            TableData::Exact(vals) => {
                for v in &vals[1..] {
                    write_bigint(w, v.numer())?;
                    write_bigint(w, v.denom())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<ValueTable> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::parse("not a value-table stream (bad magic)"));
        }
        let mut version = [0u8; 2];
        r.read_exact(&mut version)?;
        if u16::from_le_bytes(version) != FORMAT_VERSION {
            return Err(Error::parse(format!(
                "unsupported value-table version {}",
                u16::from_le_bytes(version)
            )));
        }
        let mut mode_bytes = [0u8; 2];
        r.read_exact(&mut mode_bytes)?;
        let mut limit_bytes = [0u8; 8];
        r.read_exact(&mut limit_bytes)?;
        let limit = u64::from_le_bytes(limit_bytes);
        let mut digest = [0u8; 32];
        r.read_exact(&mut digest)?;
        let mut json_len = [0u8; 4];
        r.read_exact(&mut json_len)?;
        let mut json = vec![0u8; u32::from_le_bytes(json_len) as usize];
        r.read_exact(&mut json)?;
        let spec: FunctionSpec = serde_json::from_slice(&json)
            .map_err(|e| Error::parse(format!("bad spec JSON in table header: {e}")))?;
        if spec_digest(&spec) != digest {
            return Err(Error::parse("spec digest mismatch in table header"));
        }
        let n = limit as usize;
        let data = match mode_bytes[0] {
            0 => {
                let mut vals = Vec::with_capacity(n + 1);
                vals.push(Complex64::zero());
                let mut buf = [0u8; 16];
                for _ in 0..n {
                    r.read_exact(&mut buf)?;
                    let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
                    vals.push(Complex64::new(re, im));
                }
                TableData::Float(vals)
            }
            1 => {
                let mut vals = Vec::with_capacity(n + 1);
                vals.push(BigRational::zero());
                for _ in 0..n {
                    let numer = read_bigint(r)?;
                    let denom = read_bigint(r)?;
                    if denom.is_zero() {
                        return Err(Error::parse("zero denominator in table payload"));
                    }
                    vals.push(BigRational::new(numer, denom));
                }
                TableData::Exact(vals)
            }
            t => return Err(Error::parse(format!("bad mode tag {t}"))),
        };
        Ok(ValueTable { spec, limit, data })
    }

    /// CSV rows `n,re,im` (float) or `n,num,den` (exact), with a header.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        match &self.data {
            TableData::Float(vals) => {
                writeln!(w, "n,re,im")?;
                for (n, v) in vals.iter().enumerate().skip(1) {
                    writeln!(w, "{n},{},{}", crate::report::fmt_f64(v.re), crate::report::fmt_f64(v.im))?;
                }
            }
            TableData::Exact(vals) => {
                writeln!(w, "n,num,den")?;
                for (n, v) in vals.iter().enumerate().skip(1) {
                    writeln!(w, "{n},{},{}", v.numer(), v.denom())?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ZParam;
    use num::One;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ones(x: usize) -> Vec<BigRational> {
        let mut v = vec![BigRational::one(); x + 1];
        v[0] = BigRational::zero();
        v
    }

    #[test]
    fn sieved_tau2_matches_naive_divisor_count() {
        let x = 10_000u64;
        let ft = FactorTable::new(x).unwrap();
        let t = sieve_multiplicative(&FunctionSpec::TauZ(ZParam::from_int(2)), x, &ft, Mode::Exact)
            .unwrap();
        // Naive double-loop divisor counting oracle.
        let mut counts = vec![0u64; x as usize + 1];
        for d in 1..=x {
            let mut m = d;
            while m <= x {
                counts[m as usize] += 1;
                m += d;
            }
        }
        let vals = t.exact_values().unwrap();
        for n in 1..=x {
            assert_eq!(vals[n as usize], rat(counts[n as usize] as i64, 1), "n = {n}");
        }
    }

    #[test]
    fn two_squares_matches_brute_force() {
        let x = 200u64;
        let ft = FactorTable::new(x).unwrap();
        let t = sieve_multiplicative(&FunctionSpec::TwoSquaresIndicator, x, &ft, Mode::Exact)
            .unwrap();
        let vals = t.exact_values().unwrap();
        for n in 1..=x {
            let mut hit = false;
            let mut r = 0u64;
            while r * r <= n {
                let rest = n - r * r;
                let s = crate::arith::isqrt(rest);
                if s * s == rest {
                    hit = true;
                    break;
                }
                r += 1;
            }
            let expect = if hit { BigRational::one() } else { BigRational::zero() };
            assert_eq!(vals[n as usize], expect, "n = {n}");
        }
        assert_eq!(vals[25], BigRational::one());
        assert_eq!(vals[21], BigRational::zero());
    }

    #[test]
    fn mobius_convolved_with_one_is_indicator() {
        let x = 2_000u64;
        let ft = FactorTable::new(x).unwrap();
        let mu = sieve_multiplicative(&FunctionSpec::mobius(), x, &ft, Mode::Exact).unwrap();
        let one = sieve_multiplicative(&FunctionSpec::one(), x, &ft, Mode::Exact).unwrap();
        let conv = dirichlet_convolve(&mu, &one).unwrap();
        let vals = conv.exact_values().unwrap();
        assert_eq!(vals[1], BigRational::one());
        for n in 2..=x {
            assert!(vals[n as usize].is_zero(), "n = {n}");
        }
    }

    #[test]
    fn one_convolved_with_one_is_tau() {
        let x = 100usize;
        let conv = convolve_slices(&ones(x), &ones(x));
        assert_eq!(conv[12], rat(6, 1));
        assert_eq!(conv[1], rat(1, 1));
        assert_eq!(conv[97], rat(2, 1));
    }

    #[test]
    fn tau_half_squared_is_one() {
        let x = 2_000u64;
        let ft = FactorTable::new(x).unwrap();
        let half = FunctionSpec::TauZ(ZParam::from_ratio(1, 2).unwrap());
        let t = sieve_multiplicative(&half, x, &ft, Mode::Exact).unwrap();
        let sq = dirichlet_convolve(&t, &t).unwrap();
        let vals = sq.exact_values().unwrap();
        for n in 1..=x {
            assert_eq!(vals[n as usize], BigRational::one(), "n = {n}");
        }
    }

    #[test]
    fn zpow_omega_value() {
        let ft = FactorTable::new(100).unwrap();
        let t = sieve_multiplicative(
            &FunctionSpec::ZPowOmega(ZParam::from_int(3)),
            100,
            &ft,
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(t.exact_values().unwrap()[12], rat(9, 1));
    }

    #[test]
    fn convolve_rejects_mismatches() {
        let ft = FactorTable::new(100).unwrap();
        let a = sieve_multiplicative(&FunctionSpec::one(), 100, &ft, Mode::Exact).unwrap();
        let b = sieve_multiplicative(&FunctionSpec::one(), 50, &ft, Mode::Exact).unwrap();
        assert!(dirichlet_convolve(&a, &b).is_err());
        let c = sieve_multiplicative(&FunctionSpec::one(), 100, &ft, Mode::Float).unwrap();
        assert!(dirichlet_convolve(&a, &c).is_err());
    }

    #[test]
    fn tau_and_omega_tables() {
        let ft = FactorTable::new(1000).unwrap();
        let tau = tau_table(1000, &ft).unwrap();
        assert_eq!(tau[12], 6);
        assert_eq!(tau[1], 1);
        assert_eq!(tau[997], 2);
        let om = omega_table(1000, &ft).unwrap();
        assert_eq!(om[12], 2);
        assert_eq!(om[30], 3);
        assert_eq!(om[1], 0);
    }

    #[test]
    fn binary_roundtrip_exact() {
        let ft = FactorTable::new(300).unwrap();
        let spec = FunctionSpec::TauZ(ZParam::from_ratio(-1, 3).unwrap());
        let t = sieve_multiplicative(&spec, 300, &ft, Mode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        let back = ValueTable::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back.limit(), 300);
        assert_eq!(back.mode(), Mode::Exact);
        assert_eq!(back.spec(), &spec);
        for n in 1..=300u64 {
            assert_eq!(back.value(n), t.value(n));
        }
    }

    #[test]
    fn binary_roundtrip_float() {
        let ft = FactorTable::new(100).unwrap();
        let spec = FunctionSpec::TauZ(ZParam::complex(0.5, 0.3).unwrap());
        let t = sieve_multiplicative(&spec, 100, &ft, Mode::Float).unwrap();
        let mut buf = Vec::new();
        t.write_binary(&mut buf).unwrap();
        let back = ValueTable::read_binary(&mut buf.as_slice()).unwrap();
        for n in 1..=100u64 {
            assert_eq!(back.value(n), t.value(n));
        }
    }

    #[test]
    fn csv_output_shape() {
        let ft = FactorTable::new(10).unwrap();
        let t = sieve_multiplicative(&FunctionSpec::one(), 10, &ft, Mode::Exact).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,num,den");
        assert_eq!(lines.len(), 11);
        assert_eq!(lines[1], "1,1,1");
    }
}
