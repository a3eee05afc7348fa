//! Exact arbitrary-precision rationals.
//!
//! [`Rational`] is kept in canonical form at all times (positive denominator,
//! coprime numerator), so structural equality is numeric equality.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Builds `numer/denom`, reducing to canonical form.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Arithmetic("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn floor(&self) -> Self {
        Rational(self.0.floor())
    }

    /// `true` iff the value is exactly 0 or exactly 1.
    pub fn is_zero_or_one(&self) -> bool {
        self.is_zero() || self.is_one()
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self) -> Result<Rational> {
        Rational::one().checked_div(self)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// The exact value of a finite float.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        BigRational::from_float(x).map(Rational).ok_or_else(|| Error::Domain(format!("{x} is not a finite number")))
    }

    /// Best rational approximation of `x ∈ [0,1]` among all fractions with
    /// denominator at most `max_denominator`.
    ///
    /// Walks the continued fraction of the exact binary value of `x`; once the
    /// next convergent would exceed the bound, the answer is either the last
    /// convergent or the largest admissible semiconvergent, whichever is
    /// closer (ties go to the convergent).
    pub fn approximate_from_float(x: f64, max_denominator: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("{x} is outside [0,1]")));
        }
        if max_denominator == 0 {
            return Err(Error::Domain("max_denominator must be at least 1".into()));
        }
        let target = Rational::from_f64_exact(x)?;
        let bound = BigInt::from(max_denominator);

        // (p0/q0, p1/q1) are the two most recent convergents.
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let mut rest = target.0.clone();
        loop {
            let a = rest.floor().to_integer();
            let q2 = &a * &q1 + &q0;
            if q2 > bound {
                let t = (&bound - &q0) / &q1;
                let semi = BigRational::new(&p0 + &t * &p1, &q0 + &t * &q1);
                let conv = BigRational::new(p1, q1);
                let semi_err = (&semi - &target.0).abs();
                let conv_err = (&conv - &target.0).abs();
                return Ok(Rational(if semi_err < conv_err { semi } else { conv }));
            }
            let p2 = &a * &p1 + &p0;
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            let frac = rest - BigRational::from_integer(a);
            if frac.is_zero() {
                return Ok(Rational(BigRational::new(p1, q1)));
            }
            rest = frac.recip();
        }
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Rational {
    fn one() -> Self {
        Rational::one()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $tr<&'b Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'b Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on a zero divisor, like integer division; use `checked_div` otherwise.
forward_binop!(Div, div);

impl<'a> AddAssign<&'a Rational> for Rational {
    fn add_assign(&mut self, rhs: &'a Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl<'a> SubAssign<&'a Rational> for Rational {
    fn sub_assign(&mut self, rhs: &'a Rational) {
        self.0 -= &rhs.0;
    }
}

impl<'a> MulAssign<&'a Rational> for Rational {
    fn mul_assign(&mut self, rhs: &'a Rational) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n/d` or `n`, with an optional leading `-`. Non-canonical
    /// input such as `2/4` is reduced.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Arithmetic(format!("malformed rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let unsigned = num.strip_prefix('-').unwrap_or(num);
        if !digits(unsigned) || den.is_some_and(|d| !digits(d)) {
            return Err(bad());
        }
        let n: BigInt = num.parse().map_err(|_| bad())?;
        match den {
            Some(d) => {
                let d: BigInt = d.parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(Error::Arithmetic(format!("zero denominator in {s:?}")));
                }
                Rational::new(n, d)
            }
            None => Ok(Rational::from_integer(n)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and fixtures. Panics on a zero denominator.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom).expect("nonzero denominator")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_arithmetic() {
        assert_eq!(rat(1, 3) + rat(1, 6), rat(1, 2));
        assert_eq!(rat(1, 2) * Rational::zero(), Rational::zero());
        assert_eq!((rat(1, 2) * Rational::zero()).to_string(), "0/1");
        let half = Rational::new(2, 4).unwrap();
        assert_eq!(half.numer(), &BigInt::from(1));
        assert_eq!(half.denom(), &BigInt::from(2));
        assert_eq!(rat(3, -6).to_string(), "-1/2");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert!(matches!(rat(1, 2).checked_div(&Rational::zero()), Err(Error::Arithmetic(_))));
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("1/2".parse::<Rational>().unwrap(), rat(1, 2));
        assert_eq!("-3/9".parse::<Rational>().unwrap(), rat(-1, 3));
        assert_eq!("7".parse::<Rational>().unwrap(), rat(7, 1));
        assert_eq!(rat(7, 1).to_string(), "7/1");
        for bad in ["1/0", "", "/2", "1/", "+1/2", "1/-2", " 1/2", "a/b", "1.5", "1/2/3"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn approximate_simple_cases() {
        assert_eq!(Rational::approximate_from_float(0.5, 100).unwrap(), rat(1, 2));
        assert_eq!(Rational::approximate_from_float(0.0, 10).unwrap(), Rational::zero());
        assert_eq!(Rational::approximate_from_float(1.0, 1).unwrap(), Rational::one());
        assert_eq!(Rational::approximate_from_float(0.3, 1).unwrap(), Rational::zero());
        assert_eq!(Rational::approximate_from_float(0.7, 1).unwrap(), Rational::one());
        assert!(matches!(Rational::approximate_from_float(1.5, 10), Err(Error::Domain(_))));
        assert!(matches!(Rational::approximate_from_float(-0.1, 10), Err(Error::Domain(_))));
        assert!(Rational::approximate_from_float(f64::NAN, 10).is_err());
        assert!(Rational::approximate_from_float(0.5, 0).is_err());
    }

    #[test]
    fn approximate_cos_squared_pi_over_eight() {
        // (2+√2)/4. Frozen value from an independent continued-fraction
        // evaluation, confirmed optimal by scanning every q ≤ 10^6.
        let x = (2.0 + 2f64.sqrt()) / 4.0;
        let approx = Rational::approximate_from_float(x, 1_000_000).unwrap();
        assert_eq!(approx, rat(665_857, 780_100));
        let err = (approx - Rational::from_f64_exact(x).unwrap()).abs();
        assert!(err < rat(1, 1_000_000_000_000) * rat(3, 1));
    }

    /// Brute-force best approximation: for every denominator q ≤ n, the
    /// nearest numerator is round(x q).
    fn brute_force_best_error(x: &Rational, n: u64) -> Rational {
        (1..=n)
            .map(|q| {
                let qr = Rational::from_integer(q);
                let scaled = x * &qr;
                let lo = scaled.floor();
                [lo.clone(), lo + Rational::one()].into_iter().map(|p| (p / &qr - x).abs()).min().unwrap()
            })
            .min()
            .unwrap()
    }

    fn small() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..30).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

        #[test]
        fn field_axioms(a in small(), b in small(), c in small()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a - &a, Rational::zero());
            if !b.is_zero() {
                prop_assert_eq!(a.checked_div(&b).unwrap() * &b, a.clone());
            }
        }

        #[test]
        fn display_parse_round_trip(a in small()) {
            prop_assert_eq!(a.to_string().parse::<Rational>().unwrap(), a);
        }

        #[test]
        fn approximation_is_best(x in 0.0f64..=1.0, n in 1u64..300) {
            let approx = Rational::approximate_from_float(x, n).unwrap();
            let exact = Rational::from_f64_exact(x).unwrap();
            prop_assert!(approx.denom() <= &BigInt::from(n));
            prop_assert!(!approx.is_negative() && approx <= Rational::one());
            prop_assert_eq!((&approx - &exact).abs(), brute_force_best_error(&exact, n));
        }
    }
}
