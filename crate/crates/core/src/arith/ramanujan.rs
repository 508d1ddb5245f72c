//! Ramanujan sums `c_d(h)`.

use super::factor::{divisors, factorize_small};

fn mobius_small(n: u64) -> i64 {
    let factors = factorize_small(n);
    if factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `c_d(h) = sum_{delta | (h, d)} delta * mu(d / delta)`, equal to the
/// exponential sum over reduced residues `nu mod d` of `e(nu h / d)`.
///
/// Total function: `h = 0` gives `phi(d)` (the gcd convention `(0, d) = d`
/// makes every term 1), and the sign of `h` is irrelevant.
pub fn ramanujan_sum(d: u64, h: i64) -> i64 {
    assert!(d >= 1, "ramanujan_sum requires d >= 1");
    let g = if h == 0 {
        d
    } else {
        num::integer::gcd(h.unsigned_abs(), d)
    };
    divisors(g)
        .into_iter()
        .map(|delta| delta as i64 * mobius_small(d / delta))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct exponential sum oracle, independent of the divisor formula.
    fn ramanujan_exponential(d: u64, h: i64) -> f64 {
        let mut re = 0.0f64;
        for nu in 1..=d {
            if num::integer::gcd(nu, d) == 1 {
                let theta = 2.0 * std::f64::consts::PI * (nu as f64) * (h as f64) / (d as f64);
                re += theta.cos();
            }
        }
        if d == 1 {
            1.0
        } else {
            re
        }
    }

    #[test]
    fn hand_values() {
        // c_6(2) = 2 cos(2 pi / 3) + 2 cos(10 pi / 3)... = -1.
        assert_eq!(ramanujan_sum(6, 2), -1);
        // c_d(0) = phi(d).
        assert_eq!(ramanujan_sum(12, 0), 4);
        // c_p(h) = p - 1 when p | h.
        assert_eq!(ramanujan_sum(5, 10), 4);
        assert_eq!(ramanujan_sum(5, 7), -1);
        assert_eq!(ramanujan_sum(1, 3), 1);
    }

    #[test]
    fn matches_exponential_sum() {
        for d in 1..=500u64 {
            for h in -50..=50i64 {
                let formula = ramanujan_sum(d, h) as f64;
                let oracle = ramanujan_exponential(d, h);
                assert!(
                    (formula - oracle).abs() < 1e-8,
                    "c_{d}({h}): {formula} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn symmetric_in_sign_of_h() {
        for d in 1..=60 {
            for h in 0..=30i64 {
                assert_eq!(ramanujan_sum(d, h), ramanujan_sum(d, -h));
            }
        }
    }
}
