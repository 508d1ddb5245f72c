//! The divisor-approximation kernel built from small-conductor characters,
//! its pointwise discrepancy, and the shared per-q machinery for the bulk
//! weighted sums (the f-weighted discrepancy and the explicit main terms).

use num::complex::Complex64;
use num::integer::gcd;

use crate::arith::{euler_phi, isqrt, primitive_characters_up_to, DirichletCharacter, FactorTable};
use crate::error::{Error, Result};
use crate::par;
use crate::scalar::Scal;

/// Imaginary parts of the conjugate-closed character sums must vanish; this
/// is the roundoff allowance.
pub const IMAG_TOLERANCE: f64 = 1e-9;

/// Fixed number of moduli per parallel chunk in the per-q loops.
const Q_CHUNK: u64 = 4;

/// Primitive characters up to a conductor bound, the evaluation pool for
/// every kernel sum. Characters mod `m` with conductor `f <= R` are
/// enumerated as primitive characters mod `f | m` and lifted.
pub struct PrimitivePool {
    bound: u64,
    chars: Vec<DirichletCharacter>,
}

impl PrimitivePool {
    pub fn up_to(bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::domain("conductor bound must be >= 1"));
        }
        Ok(PrimitivePool {
            bound,
            chars: primitive_characters_up_to(bound)?,
        })
    }

    /// Pool of primitive characters whose conductor divides `d`.
    pub fn dividing(d: u64) -> Result<Self> {
        let pool = Self::up_to(d.max(1))?;
        Ok(PrimitivePool {
            bound: d,
            chars: pool
                .chars
                .into_iter()
                .filter(|c| d % c.conductor() == 0)
                .collect(),
        })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn chars(&self) -> &[DirichletCharacter] {
        &self.chars
    }
}

/// `tilde_tau_h(n; R)`: the truncated-conductor approximation to
/// `tau(n - h)`,
/// `2 sum_{q <= sqrt(n-h), (n,q) = (h,q)} phi(q/(h,q))^{-1}
///    sum_{chi mod q/(h,q), cond(chi) <= R} chi(h/(h,q)) conj chi(n/(h,q))`.
///
/// Equals `tau(n - h)` whenever `R > sqrt(n - h)` and `n - h` is not a
/// perfect square.
pub fn tilde_tau(n: u64, h: i64, r_bound: u64, pool: &PrimitivePool) -> Result<f64> {
    if n == 0 || n as i64 - h < 1 {
        return Err(Error::domain(format!(
            "tilde_tau requires n >= 1 and n - h >= 1, got n = {n}, h = {h}"
        )));
    }
    if r_bound > pool.bound() {
        return Err(Error::domain(format!(
            "character pool covers conductors <= {}, requested R = {r_bound}",
            pool.bound()
        )));
    }
    let shifted = (n as i64 - h) as u64;
    let qmax = isqrt(shifted);
    let mut sum = Complex64::new(0.0, 0.0);
    for q in 1..=qmax {
        let g_h = if h == 0 { q } else { gcd(h.unsigned_abs(), q) };
        if gcd(n, q) != g_h {
            continue;
        }
        let m = q / g_h;
        let hp = h / g_h as i64;
        let np = (n / g_h) as i64;
        let mut inner = Complex64::new(0.0, 0.0);
        for psi in pool.chars() {
            if psi.conductor() > r_bound || m % psi.conductor() != 0 {
                continue;
            }
            let vh = psi.eval_induced(hp, m);
            let vn = psi.eval_induced(np, m);
            if vh.is_zero() || vn.is_zero() {
                continue;
            }
            inner += vh.to_c64() * vn.to_c64().conj();
        }
        sum += inner / euler_phi(m) as f64;
    }
    sum *= 2.0;
    if sum.im.abs() > IMAG_TOLERANCE {
        return Err(Error::internal(format!(
            "tilde_tau imaginary part {} exceeds {IMAG_TOLERANCE}",
            sum.im
        )));
    }
    Ok(sum.re)
}

/// `Delta_h(n; R) = tau(n - h) - tilde_tau_h(n; R)`.
pub fn delta_h(
    n: u64,
    h: i64,
    r_bound: u64,
    pool: &PrimitivePool,
    table: &FactorTable,
) -> Result<f64> {
    if n as i64 - h < 1 {
        return Err(Error::domain(format!(
            "delta_h requires n - h >= 1, got n = {n}, h = {h}"
        )));
    }
    let shifted = (n as i64 - h) as u64;
    if shifted > table.limit() {
        return Err(Error::resource(format!(
            "delta_h needs factor table limit >= {shifted}, have {}",
            table.limit()
        )));
    }
    let tau: u64 = table.factorize(shifted).iter().map(|&(_, e)| e as u64 + 1).product();
    Ok(tau as f64 - tilde_tau(n, h, r_bound, pool)?)
}

/// Character selection for the per-q weighted sums.
pub(crate) enum CharSelect<'a> {
    /// Every character mod `q/(h,q)` of conductor at most the bound
    /// (the kernel's truncation).
    CondAtMost(u64),
    /// A single primitive character, subject to `cond | q/(h,q)`
    /// (one main-term contribution).
    Single(&'a DirichletCharacter),
}

/// Weights over residue classes `c = n mod q` for a fixed `q`:
/// zero unless `(a c, q) = (h, q)`, otherwise the character sum
/// `sum_chi chi(h') (conj) chi((a c)/(h,q)) / phi(q/(h,q))` with the
/// conjugation on the n-side (kernel) or the h-side (main term).
///
/// Returns `None` when the selection contributes no character for this `q`.
fn residue_weights<T: Scal>(
    q: u64,
    a: u64,
    h: i64,
    select: &CharSelect,
    pool: &PrimitivePool,
    conj_on_n: bool,
) -> Result<Option<Vec<T>>> {
    let g_h = if h == 0 { q } else { gcd(h.unsigned_abs(), q) };
    let m = q / g_h;
    let chars: Vec<&DirichletCharacter> = match select {
        CharSelect::CondAtMost(bound) => pool
            .chars()
            .iter()
            .filter(|c| c.conductor() <= *bound && m % c.conductor() == 0)
            .collect(),
        CharSelect::Single(chi) => {
            if m % chi.conductor() != 0 {
                return Ok(None);
            }
            vec![*chi]
        }
    };
    if chars.is_empty() {
        return Ok(None);
    }
    let hp = h / g_h as i64;
    let phi_m = T::from_u64(euler_phi(m));
    let mut by_rho: Vec<T> = vec![T::zero(); q as usize];
    for (rho, slot) in by_rho.iter_mut().enumerate() {
        let rho = rho as u64;
        if gcd(rho, q) != g_h {
            continue;
        }
        let np = (rho / g_h) as i64;
        let mut acc = T::zero();
        for psi in &chars {
            let vh = psi.eval_induced(hp, m);
            let vn = psi.eval_induced(np, m);
            if vh.is_zero() || vn.is_zero() {
                continue;
            }
            let prod = if conj_on_n {
                vh.mul(&vn.conj())
            } else {
                vh.conj().mul(&vn)
            };
            acc += T::from_char_value(&prod)?;
        }
        *slot = acc / phi_m.clone();
    }
    // Reindex by the class of n itself: w[c] = by_rho[(a c) mod q].
    let w: Vec<T> = (0..q).map(|c| by_rho[(a * c % q) as usize].clone()).collect();
    Ok(Some(w))
}

/// `sum over n in (lo, hi] (with a n >= q^2 + offset per q) of f(n) * w_q`,
/// accumulated over `1 <= q <= qmax`. This is the doubled inner structure
/// shared by the bulk kernel sum (`offset = h`, all small conductors) and
/// by one character's main-term contribution (`offset = 0`).
pub(crate) fn per_q_weighted_sum<T: Scal>(
    f: &[T],
    lo: u64,
    hi: u64,
    a: u64,
    h: i64,
    qmax: u64,
    offset: i64,
    select: &CharSelect,
    pool: &PrimitivePool,
    conj_on_n: bool,
) -> Result<T> {
    let partial = par::map_reduce_chunks(
        1,
        qmax + 1,
        Q_CHUNK,
        |q_lo, q_hi| -> Result<T> {
            let mut chunk_acc = T::zero();
            let mut comp = T::zero();
            for q in q_lo..q_hi {
                let Some(w) = residue_weights::<T>(q, a, h, select, pool, conj_on_n)? else {
                    continue;
                };
                // a n >= q^2 + offset.
                let bound = q as i128 * q as i128 + offset as i128;
                let n_min_q = if bound <= 0 {
                    1
                } else {
                    ((bound + a as i128 - 1) / a as i128) as u64
                };
                let n_start = n_min_q.max(lo + 1).max(1);
                if n_start > hi {
                    continue;
                }
                let mut c = n_start % q;
                for n in n_start..=hi {
                    if !w[c as usize].is_zero() {
                        let mut t = f[n as usize].clone();
                        t *= w[c as usize].clone();
                        chunk_acc.add_compensated(t, &mut comp);
                    }
                    c += 1;
                    if c == q {
                        c = 0;
                    }
                }
            }
            Ok(chunk_acc)
        },
        Ok(T::zero()),
        |acc, part| {
            let mut acc = acc?;
            acc += part?;
            Ok(acc)
        },
    )?;
    let mut doubled = partial;
    doubled += doubled.clone();
    Ok(doubled)
}
