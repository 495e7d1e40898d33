//! Exact rational helpers shared by the algebra, relaxation and rounding code.
//!
//! Irrational constants (`e`, square roots) are carried as rationals rounded
//! *upward*, so any bound built from them stays a valid upper bound.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Significant digits kept by [`sqrt_upper`].
pub const SQRT_DIGITS: u32 = 12;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `e` rounded up to 2.7182818285.
pub fn e_upper() -> Rational {
    Rational::new(
        BigInt::from(27_182_818_285u64),
        BigInt::from(10_000_000_000u64),
    )
}

/// `base^exp` for a non-negative integer base.
pub fn pow_int(base: usize, exp: usize) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(base), exp))
}

/// Upward rational approximation of `sqrt(value)` with [`SQRT_DIGITS`]
/// significant digits; exact when `value` is a perfect square.
pub fn sqrt_upper(value: u128) -> Rational {
    let v = BigUint::from(value);
    let floor = v.sqrt();
    if &floor * &floor == v {
        return Rational::from_integer(BigInt::from(floor));
    }
    let int_digits = floor.to_string().len() as u32;
    let frac_digits = SQRT_DIGITS.saturating_sub(int_digits);
    let scale = num_traits::pow(BigUint::from(10u32), frac_digits as usize);
    let scaled = &v * &scale * &scale;
    let mut root = scaled.sqrt();
    if &root * &root != scaled {
        root += 1u32;
    }
    Rational::new(BigInt::from(root), BigInt::from(scale))
}

/// Exact rational value of a finite float.
pub fn from_f64(v: f64) -> Result<Rational> {
    Rational::from_float(v).ok_or_else(|| Error::OutOfRange(format!("non-finite float {v}")))
}

/// Nearest float.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Largest float that is `<= r`.
pub fn to_f64_down(r: &Rational) -> f64 {
    let f = to_f64(r);
    if f.is_finite() && Rational::from_float(f).is_some_and(|x| &x > r) {
        f.next_down()
    } else {
        f
    }
}

/// Smallest float that is `>= r`.
pub fn to_f64_up(r: &Rational) -> f64 {
    let f = to_f64(r);
    if f.is_finite() && Rational::from_float(f).is_some_and(|x| &x < r) {
        f.next_up()
    } else {
        f
    }
}

/// Parses `a/b`, an integer, or a plain decimal such as `-0.125`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let whole_val: BigInt = if whole_digits.is_empty() {
            BigInt::zero()
        } else {
            whole_digits.parse().ok()?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().ok()?
        };
        let mag = Rational::new(whole_val * &scale + frac_val, scale);
        return Some(if negative { -mag } else { mag });
    }
    s.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Always `num/den`, with `den = 1` for integers.
pub fn fmt_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering with at most 15 significant digits.
pub fn fmt_decimal15(v: f64) -> String {
    if !v.is_finite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{v:.14e}").parse().unwrap_or(v);
    if rounded == 0.0 {
        "0".into()
    } else {
        format!("{rounded}")
    }
}

pub fn is_integral_01(r: &Rational) -> bool {
    r.is_zero() || r.is_one()
}

/// Serde adapter storing a rational as its `Display` string (`7`, `-3/4`).
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(
            r: &Option<Rational>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&r.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<Rational>, D::Error> {
            let s = Option::<String>::deserialize(d)?;
            s.map(|s| {
                parse_rational(&s)
                    .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
            })
            .transpose()
        }
    }
}
