//! 2-adic valuations and binary digit arithmetic.

use std::fmt;
use std::ops::Add;

use ibig::{IBig, UBig};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A 2-adic valuation. `Infinity` is reserved for zero and compares above
/// every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u64),
    Infinity,
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }

    /// `min(self, cap)`, as seen through arithmetic modulo `2^cap`.
    pub fn capped(self, cap: u64) -> Valuation {
        match self {
            Valuation::Finite(v) if v < cap => self,
            _ => Valuation::Finite(cap),
        }
    }

    pub fn at_least(self, k: u64) -> bool {
        self >= Valuation::Finite(k)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl From<u64> for Valuation {
    fn from(v: u64) -> Self {
        Valuation::Finite(v)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u64(*v),
            Valuation::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Exponent of 2 in a positive integer.
pub fn v2(m: impl Into<IBig>) -> Result<Valuation> {
    let m = m.into();
    if m <= IBig::from(0u8) {
        return Err(Error::InvalidArgument(format!("v2 needs a positive integer, got {m}")));
    }
    Ok(v2_abs(&m))
}

/// Exponent of 2 in `|m|`; `Infinity` for zero.
pub fn v2_abs(m: &IBig) -> Valuation {
    match m.trailing_zeros() {
        Some(z) => Valuation::Finite(z as u64),
        None => Valuation::Infinity,
    }
}

/// Number of 1-bits in the binary expansion of `m`.
pub fn digit_sum_2(m: u128) -> u32 {
    m.count_ones()
}

/// `v2(C(m, k))` by Kummer's theorem: the number of carries when adding `k`
/// and `m - k` in base 2.
pub fn v2_binomial(m: u64, k: u64) -> Result<Valuation> {
    if k > m {
        return Err(Error::InvalidArgument(format!("binomial({m}, {k}) needs k <= m")));
    }
    let carries = digit_sum_2(k as u128) + digit_sum_2((m - k) as u128) - digit_sum_2(m as u128);
    Ok(Valuation::Finite(carries as u64))
}

/// Exact binomial coefficient.
pub fn binomial(m: u64, k: u64) -> Result<IBig> {
    if k > m {
        return Err(Error::InvalidArgument(format!("binomial({m}, {k}) needs k <= m")));
    }
    let k = k.min(m - k);
    let mut acc = UBig::from(1u8);
    for i in 0..k {
        acc *= UBig::from(m - i);
        acc /= UBig::from(i + 1);
    }
    Ok(IBig::from(acc))
}

pub fn is_power_of_two(x: u64) -> bool {
    x != 0 && x & (x - 1) == 0
}

/// Returns `a` when `x = 2^a - 1` with `a >= 1`.
pub fn mersenne_exponent(x: u64) -> Option<u32> {
    if x == 0 || !is_power_of_two(x + 1) {
        None
    } else {
        Some((x + 1).trailing_zeros())
    }
}

/// The `s` with `2^s < n <= 2^(s+1)`, for `n >= 2`.
pub fn dyadic_band(n: u64) -> u32 {
    debug_assert!(n >= 2);
    63 - (n - 1).leading_zeros()
}

/// `v2` of a nonzero machine integer.
pub fn v2_u64(n: u64) -> u32 {
    debug_assert!(n != 0);
    n.trailing_zeros()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(x: u64) -> Valuation {
        Valuation::Finite(x)
    }

    // Binomials by Pascal's triangle, independent of the product formula.
    fn pascal(rows: usize) -> Vec<Vec<UBig>> {
        let mut tri: Vec<Vec<UBig>> = vec![vec![UBig::from(1u8)]];
        for m in 1..=rows {
            let prev = &tri[m - 1];
            let mut row = vec![UBig::from(1u8); m + 1];
            for k in 1..m {
                row[k] = &prev[k - 1] + &prev[k];
            }
            tri.push(row);
        }
        tri
    }

    #[test]
    fn v2_examples() {
        assert_eq!(v2(12).unwrap(), v(2));
        assert_eq!(v2(1).unwrap(), v(0));
        assert_eq!(v2(96).unwrap(), v(5));
        assert!(v2(0).is_err());
        assert!(v2(-4).is_err());
        assert_eq!(v2_abs(&IBig::from(-40)), v(3));
        assert_eq!(v2_abs(&IBig::from(0)), Valuation::Infinity);
    }

    #[test]
    fn digit_sum_examples() {
        assert_eq!(digit_sum_2(15), 4);
        assert_eq!(digit_sum_2(28), 3);
        assert_eq!(digit_sum_2(0), 0);
    }

    #[test]
    fn kummer_examples() {
        assert_eq!(v2_binomial(24, 4).unwrap(), v(1));
        assert_eq!(v2_binomial(16, 2).unwrap(), v(3));
        assert_eq!(v2_binomial(12, 4).unwrap(), v(0));
        assert!(v2_binomial(3, 4).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(6, 3).unwrap(), IBig::from(20));
        assert_eq!(binomial(9, 0).unwrap(), IBig::from(1));
        // 24*23*22*21/24 = 10626 = 2 * 5313
        assert_eq!(binomial(24, 4).unwrap(), IBig::from(10626));
        assert_eq!(v2_abs(&binomial(24, 4).unwrap()), v2_binomial(24, 4).unwrap());
        assert!(binomial(2, 5).is_err());
    }

    #[test]
    fn kummer_matches_exact_binomials_up_to_256() {
        let tri = pascal(256);
        for m in 0..=256u64 {
            for k in 0..=m {
                let exact = &tri[m as usize][k as usize];
                assert_eq!(v2_binomial(m, k).unwrap(), v2_abs(&IBig::from(exact.clone())), "C({m},{k})");
                assert_eq!(binomial(m, k).unwrap(), IBig::from(exact.clone()));
            }
        }
    }

    #[test]
    fn valuation_order_and_sum() {
        assert!(Valuation::Infinity > v(1 << 40));
        assert_eq!(v(3) + v(4), v(7));
        assert_eq!(v(3) + Valuation::Infinity, Valuation::Infinity);
        assert_eq!(Valuation::Infinity.capped(7), v(7));
        assert_eq!(v(9).capped(7), v(7));
        assert_eq!(v(2).capped(7), v(2));
    }

    #[test]
    fn bands_and_mersenne() {
        assert_eq!(dyadic_band(5), 2);
        assert_eq!(dyadic_band(8), 2);
        assert_eq!(dyadic_band(9), 3);
        assert_eq!(dyadic_band(2), 0);
        assert_eq!(mersenne_exponent(15), Some(4));
        assert_eq!(mersenne_exponent(1), Some(1));
        assert_eq!(mersenne_exponent(0), None);
        assert_eq!(mersenne_exponent(14), None);
    }

    proptest! {
        #[test]
        fn digit_sum_doubling(m in 0u64..(1u64 << 62)) {
            let m = m as u128;
            prop_assert_eq!(digit_sum_2(2 * m), digit_sum_2(m));
            prop_assert_eq!(digit_sum_2(2 * m + 1), digit_sum_2(m) + 1);
        }

        #[test]
        fn kummer_identity(m in 0u64..100_000, k_frac in 0.0f64..=1.0) {
            let k = ((m as f64) * k_frac) as u64;
            let expect = digit_sum_2(k as u128) + digit_sum_2((m - k) as u128) - digit_sum_2(m as u128);
            prop_assert_eq!(v2_binomial(m, k).unwrap(), Valuation::Finite(expect as u64));
        }
    }
}
