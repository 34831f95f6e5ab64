//! Exact rational scalars and small helpers used across the crate.

use alloc::string::String;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// The scalar type of the crate: arbitrary-precision rationals.
pub type Q = BigRational;

/// `n` as a rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `p/q` as a rational. Panics if `q == 0`.
pub fn qr(p: i64, q: i64) -> Q {
    Q::new(BigInt::from(p), BigInt::from(q))
}

/// `2^k` for any integer `k` (negative exponents give dyadic fractions).
pub fn pow2(k: i32) -> Q {
    let one = BigInt::one();
    if k >= 0 {
        Q::from_integer(one << (k as usize))
    } else {
        Q::new(one.clone(), one << ((-k) as usize))
    }
}

pub fn q_min(a: Q, b: Q) -> Q {
    if a <= b {
        a
    } else {
        b
    }
}

pub fn q_max(a: Q, b: Q) -> Q {
    if a >= b {
        a
    } else {
        b
    }
}

/// Render as `p/q` with an explicit denominator, e.g. `3/1`, `-1/2`.
pub fn format_ratio(x: &Q) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}/{}", x.numer(), x.denom());
    s
}

/// Parse `p/q` or a bare integer `p`.
pub fn parse_ratio(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Q::new(p, q))
    } else {
        let p: BigInt = s.parse().ok()?;
        Some(Q::from_integer(p))
    }
}

/// Best-effort conversion to `f64` (used only for reporting and estimates).
pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of leading digits for huge operands.
        let n = x.numer().to_f64().unwrap_or(if x.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Natural logarithm of a positive rational, as `f64`.
pub fn ln_ratio(x: &Q) -> f64 {
    debug_assert!(x.is_positive());
    // ln(n/d) = ln n - ln d, computed on BigInt magnitudes to dodge overflow.
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// Natural logarithm of a positive big integer, as `f64`.
pub fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.is_positive());
    let bits = n.bits();
    if bits <= 52 {
        return libm::log(n.to_f64().unwrap());
    }
    // n = m * 2^shift with m in f64 range.
    let shift = bits - 52;
    let m = (n >> shift).to_f64().unwrap();
    libm::log(m) + (shift as f64) * core::f64::consts::LN_2
}

/// The dyadic `2^-k` with the largest value strictly below `x` (for `x > 0`).
pub fn dyadic_below(x: &Q) -> (i32, Q) {
    debug_assert!(x.is_positive());
    let mut k = 0i32;
    let mut v = Q::one();
    while &v >= x {
        k += 1;
        v = pow2(-k);
    }
    (k, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pow2_signs() {
        assert_eq!(pow2(3), qi(8));
        assert_eq!(pow2(0), qi(1));
        assert_eq!(pow2(-2), qr(1, 4));
    }

    #[test]
    fn ratio_round_trip() {
        let x = qr(-7, 12);
        assert_eq!(parse_ratio(&format_ratio(&x)).unwrap(), x);
        assert_eq!(parse_ratio("5").unwrap(), qi(5));
        assert!(parse_ratio("1/0").is_none());
    }

    #[test]
    fn dyadic_below_finds_largest() {
        let (k, v) = dyadic_below(&qr(3, 10));
        assert_eq!(v, qr(1, 4));
        assert_eq!(k, 2);
        let (_, v) = dyadic_below(&qr(1, 4));
        assert_eq!(v, qr(1, 8));
    }

    #[test]
    fn ln_of_big_values() {
        let big = BigInt::from(3u32).pow(200);
        let expect = 200.0 * libm::log(3.0);
        assert!((ln_bigint(&big) - expect).abs() < 1e-9);
    }
}
