//! Gamma-ratio coefficients of the Virasoro operators.
//!
//! Both coefficient families are finite products of half-integers and are
//! evaluated directly as such. The closed forms in terms of odd double
//! factorials are kept in the tests as an independent check, and
//! [`odd_double_factorial`] is exported for callers (the linear-system
//! solver) that want coefficients from a second route.

use crate::error::{Error, Result};
use crate::rat::Rat;

/// Which product of half-integers to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffFamily {
    /// `prod_{j=0}^{n} (k + 1/2 + j)`, the coefficient multiplying
    /// `t_k d/dt_{n+k}` in `L_n`. Defined for `n >= 0`, `k >= 0`.
    First,
    /// `prod_{j=0}^{n} (-k - 1/2 + j)`, the signed coefficient of the
    /// second-derivative sum in `L_n`. Defined for `n >= 1`,
    /// `0 <= k <= n - 1`.
    Second,
}

/// `(2m+1)!! = 1 * 3 * 5 * ... * (2m+1)` indexed by the odd argument;
/// `odd_double_factorial(-1) = 1` by the empty product.
pub fn odd_double_factorial(arg: i64) -> Result<Rat> {
    if arg < -1 || arg % 2 == 0 {
        return Err(Error::InvalidInput(format!(
            "double factorial wants an odd argument >= -1, got {arg}"
        )));
    }
    let mut acc = Rat::one();
    let mut f = 1i64;
    while f <= arg {
        acc = acc * Rat::from_int(f);
        f += 2;
    }
    Ok(acc)
}

/// Evaluates one Virasoro coefficient as its defining product.
pub fn virasoro_coefficient(family: CoeffFamily, n: i64, k: i64) -> Result<Rat> {
    match family {
        CoeffFamily::First => {
            if n < 0 || k < 0 {
                return Err(Error::InvalidInput(format!(
                    "first family wants n >= 0 and k >= 0, got n={n} k={k}"
                )));
            }
            let mut acc = Rat::one();
            for j in 0..=n {
                acc = acc * (Rat::from_int(k + j) + Rat::frac(1, 2));
            }
            Ok(acc)
        }
        CoeffFamily::Second => {
            if n < 1 || k < 0 || k > n - 1 {
                return Err(Error::InvalidInput(format!(
                    "second family wants n >= 1 and 0 <= k <= n-1, got n={n} k={k}"
                )));
            }
            let mut acc = Rat::one();
            for j in 0..=n {
                acc = acc * (Rat::from_int(j - k) - Rat::frac(1, 2));
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_factorial_small_values() {
        assert_eq!(odd_double_factorial(-1).unwrap(), Rat::one());
        assert_eq!(odd_double_factorial(1).unwrap(), Rat::one());
        assert_eq!(odd_double_factorial(5).unwrap(), Rat::from_int(15));
        assert_eq!(odd_double_factorial(9).unwrap(), Rat::from_int(945));
        assert!(odd_double_factorial(-3).is_err());
        assert!(odd_double_factorial(4).is_err());
    }

    #[test]
    fn first_family_pinned_values() {
        // n=0: the single factor k + 1/2.
        assert_eq!(
            virasoro_coefficient(CoeffFamily::First, 0, 2).unwrap(),
            Rat::frac(5, 2)
        );
        // n=1, k=0: (1/2)(3/2).
        assert_eq!(
            virasoro_coefficient(CoeffFamily::First, 1, 0).unwrap(),
            Rat::frac(3, 4)
        );
    }

    #[test]
    fn second_family_pinned_value() {
        // n=2, k=1: (-3/2)(-1/2)(1/2).
        assert_eq!(
            virasoro_coefficient(CoeffFamily::Second, 2, 1).unwrap(),
            Rat::frac(3, 8)
        );
    }

    #[test]
    fn first_family_matches_double_factorial_form() {
        // prod_{j=0}^{n}(k+1/2+j) = (2k+2n+1)!! / (2^{n+1} (2k-1)!!).
        for n in 0..=6i64 {
            for k in 0..=6i64 {
                let direct = virasoro_coefficient(CoeffFamily::First, n, k).unwrap();
                let closed = odd_double_factorial(2 * k + 2 * n + 1).unwrap()
                    / (Rat::from_int(2).pow(n + 1).unwrap()
                        * odd_double_factorial(2 * k - 1).unwrap());
                assert_eq!(direct, closed, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn second_family_matches_double_factorial_form() {
        // (-1)^{k+1} prod_{j=0}^{n}(-k-1/2+j)
        //   = (2k+1)!! (2n-2k-1)!! / 2^{n+1}.
        for n in 1..=6i64 {
            for k in 0..=n - 1 {
                let direct = virasoro_coefficient(CoeffFamily::Second, n, k).unwrap();
                let sign = if (k + 1) % 2 == 0 { Rat::one() } else { -Rat::one() };
                let closed = odd_double_factorial(2 * k + 1).unwrap()
                    * odd_double_factorial(2 * (n - k) - 1).unwrap()
                    / Rat::from_int(2).pow(n + 1).unwrap();
                assert_eq!(sign * direct, closed, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(virasoro_coefficient(CoeffFamily::First, -1, 0).is_err());
        assert!(virasoro_coefficient(CoeffFamily::Second, 0, 0).is_err());
        assert!(virasoro_coefficient(CoeffFamily::Second, 2, 2).is_err());
    }
}
