//! Combinatorial identities for the generalized divisor functions, verified
//! exactly on full initial segments, plus the friable factorization behind
//! the type-II reduction.

mod friable;
mod hb;
mod linnik;

pub use friable::{
    friable_decomposition_report, friable_factorize, FriableClass, FriableDecomposition,
};
pub use hb::{
    hb_a_coefficients, hb_b_coefficients, hb_b_coefficients_via_system, hb_coefficients,
    hb_verify, HbCoefficients,
};
pub use linnik::{linnik_coefficients, linnik_verify};

use crate::par;
use crate::scalar::{Mode, Scal};

/// Result of verifying an identity on all `n <= x`.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub x: u64,
    pub mode: Mode,
    /// 0 in exact mode when the identity holds; otherwise the largest
    /// absolute difference found.
    pub max_abs_deviation: f64,
    /// Witness with the largest deviation; absent when the deviation is 0.
    pub worst_n: Option<u64>,
    pub terms_evaluated: u64,
    /// Degenerate-parameter notes (for example `x^{1/K} < 2`).
    pub warning: Option<String>,
}

/// Max-deviation comparison of two 1-indexed tables over `1..=x`.
///
/// Partitioned by fixed ranges and merged by max (ties broken toward the
/// smaller witness), so the report does not depend on the thread count.
pub(crate) fn compare_tables<T: Scal>(lhs: &[T], rhs: &[T], x: u64, mode: Mode) -> IdentityReport {
    let worst = par::map_reduce_chunks(
        1,
        x + 1,
        par::DEFAULT_CHUNK,
        |a, b| {
            let mut worst: Option<(f64, u64)> = None;
            for n in a..b {
                let (l, r) = (&lhs[n as usize], &rhs[n as usize]);
                if l == r {
                    continue;
                }
                let mut diff = l.clone();
                diff -= r.clone();
                let dev = diff.abs_f64();
                if dev > 0.0 && worst.map_or(true, |(d, _)| dev > d) {
                    worst = Some((dev, n));
                }
            }
            worst
        },
        None,
        |a: Option<(f64, u64)>, b| match (a, b) {
            (None, w) | (w, None) => w,
            (Some((da, na)), Some((db, nb))) => {
                if db > da || (db == da && nb < na) {
                    Some((db, nb))
                } else {
                    Some((da, na))
                }
            }
        },
    );
    IdentityReport {
        x,
        mode,
        max_abs_deviation: worst.map_or(0.0, |(d, _)| d),
        worst_n: worst.map(|(_, n)| n),
        terms_evaluated: x,
        warning: None,
    }
}
