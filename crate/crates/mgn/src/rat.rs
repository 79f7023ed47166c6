//! Exact arbitrary-precision rational scalars.
//!
//! Every numeric value in this crate is a [`Rat`]. There is no floating
//! point anywhere: all arithmetic is exact, and results are independent of
//! evaluation order. Values are kept in lowest terms with a positive
//! denominator, and serialize as the string `"p/q"` with the denominator
//! always written, even when it is 1.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(n: BigInt) -> Self {
        Rat(BigRational::from_integer(n))
    }

    pub fn from_biguint(n: BigUint) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `p/q` from machine integers. Panics if `q == 0`; intended for
    /// literals inside the crate, not for user input (use [`Rat::from_str`]
    /// for that).
    pub fn frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Rat(BigRational::new(numer, denom)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        Ok(Rat(self.0.recip()))
    }

    /// Integer power, negative exponents allowed for nonzero base.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e == 0 {
            return Ok(Rat::one());
        }
        if self.is_zero() && e < 0 {
            return Err(Error::InvalidInput("negative power of zero".into()));
        }
        let p = self.0.pow(e.unsigned_abs().try_into().map_err(|_| {
            Error::InvalidInput(format!("exponent {e} out of range"))
        })?);
        Ok(if e < 0 { Rat(p.recip()) } else { Rat(p) })
    }

    pub fn factorial(n: u64) -> Self {
        Rat::from_biguint(big_factorial(n))
    }

    /// `n!/(k1! k2! ... )`; the parts must sum to `n`.
    pub fn multinomial(n: u64, parts: &[u64]) -> Result<Self> {
        if parts.iter().sum::<u64>() != n {
            return Err(Error::InvalidInput(format!(
                "multinomial parts {parts:?} do not sum to {n}"
            )));
        }
        let mut denom = BigUint::one();
        for &p in parts {
            denom *= big_factorial(p);
        }
        Ok(Rat(BigRational::new(
            BigInt::from(big_factorial(n)),
            BigInt::from(denom),
        )))
    }
}

pub fn big_factorial(n: u64) -> BigUint {
    let mut acc = BigUint::one();
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// Binomial coefficient as an exact integer; zero when `k > n`.
pub fn big_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("malformed rational {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rat::new(p, q)
            }
            None => {
                let p: BigInt = s.trim().parse().map_err(|_| bad())?;
                Ok(Rat::from_big(p))
            }
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(|e| de::Error::custom(format!("{e}")))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(self.0 / rhs.0)
    }
}

impl Div<&Rat> for &Rat {
    type Output = Rat;
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = Rat::frac(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rat::frac(0, 5), Rat::zero());
        assert_eq!(Rat::frac(0, 5).to_string(), "0/1");
    }

    #[test]
    fn display_never_omits_denominator() {
        assert_eq!(Rat::from_int(24).to_string(), "24/1");
        assert_eq!(Rat::frac(1, 24).to_string(), "1/24");
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["-3/2", "0/1", "1/24", "945/1"] {
            let r: Rat = s.parse().unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!("7".parse::<Rat>().unwrap(), Rat::from_int(7));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x/2".parse::<Rat>().is_err());
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let r = Rat::frac(2, 3);
        assert_eq!(r.pow(3).unwrap(), Rat::frac(8, 27));
        assert_eq!(r.pow(-2).unwrap(), Rat::frac(9, 4));
        assert_eq!(r.pow(0).unwrap(), Rat::one());
        assert!(Rat::zero().pow(-1).is_err());
    }

    #[test]
    fn factorial_and_multinomial() {
        assert_eq!(Rat::factorial(6), Rat::from_int(720));
        assert_eq!(
            Rat::multinomial(4, &[2, 1, 1]).unwrap(),
            Rat::from_int(12)
        );
        assert!(Rat::multinomial(4, &[2, 1]).is_err());
        assert_eq!(big_binomial(30, 15), big_binomial(30, 15));
        assert_eq!(big_binomial(5, 2), BigUint::from(10u32));
        assert_eq!(big_binomial(3, 5), BigUint::zero());
    }

    #[test]
    fn serde_as_string() {
        let r = Rat::frac(-1, 24);
        let js = serde_json::to_string(&r).unwrap();
        assert_eq!(js, "\"-1/24\"");
        let back: Rat = serde_json::from_str(&js).unwrap();
        assert_eq!(back, r);
    }
}
