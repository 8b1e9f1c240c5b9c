//! Exact integers, reduced rationals, and residues modulo an integer.
//!
//! `Int` and `Rational` are the unbounded types from `num-bigint` and
//! `num-rational`. A [`Residue`] pairs a canonical representative in
//! `[0, modulus)` with its modulus; every modular computation in the crate
//! ends up as one.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = BigRational;

/// A value reduced into `[0, modulus)` together with its modulus (`>= 2`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Residue {
    #[serde(with = "decimal")]
    value: Int,
    #[serde(with = "decimal")]
    modulus: Int,
}

impl Residue {
    /// Reduces `value` modulo `modulus`. Negative values wrap into range.
    pub fn new(value: impl Into<Int>, modulus: impl Into<Int>) -> Result<Self> {
        let modulus = modulus.into();
        check_modulus(&modulus)?;
        let value = value.into().mod_floor(&modulus);
        Ok(Self { value, modulus })
    }

    pub(crate) fn from_parts_unchecked(value: Int, modulus: Int) -> Self {
        debug_assert!(!value.is_negative() && value < modulus);
        Self { value, modulus }
    }

    pub fn value(&self) -> &Int {
        &self.value
    }

    pub fn modulus(&self) -> &Int {
        &self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Same value viewed modulo a divisor of the current modulus.
    pub fn reduce(&self, modulus: &Int) -> Result<Self> {
        if !(&self.modulus % modulus).is_zero() {
            return Err(Error::Domain(format!(
                "{modulus} does not divide {}",
                self.modulus
            )));
        }
        Residue::new(self.value.clone(), modulus.clone())
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

fn check_modulus(modulus: &Int) -> Result<()> {
    if *modulus < Int::from(2) {
        return Err(Error::BadModulus(modulus.clone()));
    }
    Ok(())
}

/// `base^exponent mod modulus`. Negative bases are reduced first.
pub fn mod_pow(base: &Int, exponent: &Int, modulus: &Int) -> Result<Residue> {
    check_modulus(modulus)?;
    if exponent.is_negative() {
        return Err(Error::Domain(format!("negative exponent {exponent}")));
    }
    let m = modulus.magnitude();
    let b = base.mod_floor(modulus).into_parts().1;
    let value = b.modpow(exponent.magnitude(), m);
    Ok(Residue::from_parts_unchecked(
        BigInt::from_biguint(Sign::Plus, value),
        modulus.clone(),
    ))
}

/// Inverse of `a` modulo `modulus`, or the offending gcd.
pub fn mod_inv(a: &Int, modulus: &Int) -> Result<Residue> {
    check_modulus(modulus)?;
    let a = a.mod_floor(modulus);
    let egcd = a.extended_gcd(modulus);
    if !egcd.gcd.is_one() {
        return Err(Error::NotInvertible {
            value: a,
            modulus: modulus.clone(),
            gcd: egcd.gcd,
        });
    }
    Residue::new(egcd.x, modulus.clone())
}

/// Residue of a rational: numerator times the inverse of the (reduced)
/// denominator. Fails when the denominator shares a factor with `modulus`.
pub fn rational_residue(q: &Rational, modulus: &Int) -> Result<Residue> {
    check_modulus(modulus)?;
    let inv = mod_inv(q.denom(), modulus)?;
    Residue::new(q.numer() * inv.value(), modulus.clone())
}

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> Int {
    if k > n {
        return Int::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    Int::from(acc)
}

/// `n^e` as an unbounded integer.
pub fn int_pow(n: u64, e: u32) -> Int {
    num_traits::pow(Int::from(n), e as usize)
}

/// Converts a non-negative `Int` to `u64`, if it fits.
pub fn to_u64(v: &Int) -> Option<u64> {
    v.to_u64()
}

/// Serializes an `Int` as a decimal string, for use with
/// `#[serde(serialize_with = ...)]`.
pub fn serialize_decimal<S: serde::Serializer>(v: &Int, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// Serde adapter that writes an `Int` as a decimal string and reads it back.
pub mod decimal {
    use super::Int;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;
    use proptest::prelude::*;

    fn int(v: i64) -> Int {
        Int::from(v)
    }

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(int(n), int(d))
    }

    #[test]
    fn mod_pow_examples() {
        // 2^8 = 256 = 28*9 + 4
        assert_eq!(256 - 28 * 9, 4);
        assert_eq!(mod_pow(&int(2), &int(8), &int(9)).unwrap().value(), &int(4));
        assert_eq!(mod_pow(&int(8), &int(8), &int(9)).unwrap().value(), &int(1));
        for x in [-7, 0, 3, 1000] {
            assert_eq!(mod_pow(&int(x), &int(0), &int(5)).unwrap().value(), &int(1));
        }
    }

    #[test]
    fn mod_pow_rejects_small_modulus() {
        assert!(matches!(
            mod_pow(&int(2), &int(3), &int(1)),
            Err(Error::BadModulus(_))
        ));
    }

    #[test]
    fn negative_base_is_reduced_first() {
        let r = mod_pow(&int(-2), &int(3), &int(7)).unwrap();
        assert_eq!(r.value(), &int(6)); // -8 = -2*7 + 6
    }

    #[test]
    fn mod_inv_examples() {
        assert_eq!(12 * 573 % 625, 1);
        assert_eq!(mod_inv(&int(12), &int(625)).unwrap().value(), &int(573));
        assert_eq!(mod_inv(&int(1), &int(17)).unwrap().value(), &int(1));
        match mod_inv(&int(2), &int(4)) {
            Err(Error::NotInvertible { gcd, .. }) => assert_eq!(gcd, int(2)),
            other => panic!("expected non-invertible, got {other:?}"),
        }
    }

    #[test]
    fn rational_residue_examples() {
        // S_5(5) = 1300 and 1300 mod 625 = 50
        let s5: i64 = (1..5i64).map(|i| i.pow(5)).sum();
        assert_eq!(s5, 1300);
        let r = rational_residue(&rat(-25, 12), &int(625)).unwrap();
        assert_eq!(r.value(), &int(s5 % 625));
        assert!(rational_residue(&rat(0, 1), &int(11)).unwrap().is_zero());
        assert!(rational_residue(&rat(1, 6), &int(9)).is_err());
    }

    #[test]
    fn rationals_are_reduced() {
        let q = rat(6, -4);
        assert_eq!(q.numer(), &int(-3));
        assert_eq!(q.denom(), &int(2));
        let z = rat(0, -5);
        assert_eq!(z.denom(), &int(1));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(4, 2), int(6));
        assert_eq!(binomial(6, 3), int(20));
        assert_eq!(binomial(5, 7), int(0));
        for k in 0..30u64 {
            for i in 0..=k {
                assert!((binomial(2 * k + 2, 2 * i + 1) % 2u32).is_zero());
            }
        }
    }

    #[test]
    fn int_round_trips_through_decimal() {
        let v = Int::from_str_radix("-123456789012345678901234567890", 10).unwrap();
        assert_eq!(v.to_string().parse::<Int>().unwrap(), v);
        assert_eq!(Int::from(-0).to_string(), "0");
    }

    #[test]
    fn residue_serializes_as_strings() {
        let r = Residue::new(-1, 10).unwrap();
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"value":"9","modulus":"10"}"#);
        assert_eq!(serde_json::from_str::<Residue>(&s).unwrap(), r);
    }

    proptest! {
        #[test]
        fn mod_inv_is_an_inverse(a in -5000i64..5000, m in 2i64..5000) {
            let (a, m) = (int(a), int(m));
            if a.gcd(&m).is_one() {
                let inv = mod_inv(&a, &m).unwrap();
                prop_assert!((inv.value() * &a - 1i32).mod_floor(&m).is_zero());
            } else {
                prop_assert!(mod_inv(&a, &m).is_err());
            }
        }

        #[test]
        fn mod_pow_matches_exact_power(b in 0u64..=100, e in 0u32..=40, m in 2u64..=1_000_000) {
            let exact = int_pow(b, e) % int(m as i64);
            let r = mod_pow(&Int::from(b), &Int::from(e), &Int::from(m)).unwrap();
            prop_assert_eq!(r.value(), &exact);
        }

        #[test]
        fn integer_residue_is_plain_reduction(a in -100_000i64..100_000, m in 2i64..10_000) {
            let r = rational_residue(&Rational::from_integer(int(a)), &int(m)).unwrap();
            prop_assert_eq!(r.value(), &int(a.rem_euclid(m)));
        }

        #[test]
        fn rationals_form_a_field(
            (an, ad) in (-200i64..200, 1i64..50),
            (bn, bd) in (-200i64..200, 1i64..50),
            (cn, cd) in (-200i64..200, 1i64..50),
        ) {
            let (a, b, c) = (rat(an, ad), rat(bn, bd), rat(cn, cd));
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            if !b.is_zero() {
                prop_assert_eq!((&a / &b) * &b, a.clone());
            }
            prop_assert!(num_integer::Integer::gcd(a.numer(), a.denom()).is_one());
            prop_assert!(a.denom().is_positive());
        }
    }
}
