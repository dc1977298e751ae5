use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A nonnegative exact rational literal that remembers how it was written.
///
/// Equality and hashing look only at the value, so `0.5` and `0.50` compare
/// equal. Negative constants are expressed with `Term::Neg`.
#[derive(Debug, Clone)]
pub struct Numeral {
    value: BigRational,
    literal: String,
}

impl Numeral {
    /// Parses a decimal literal such as `12`, `0.5` or `3.`.
    pub fn from_decimal(literal: &str) -> Option<Self> {
        let (int_part, frac_part) = match literal.split_once('.') {
            Some((i, f)) => (i, f),
            None => (literal, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        Some(Numeral { value: BigRational::new(numer, denom), literal: literal.to_string() })
    }

    /// Builds a numeral from a nonnegative integer.
    pub fn from_u64(n: u64) -> Self {
        Numeral { value: BigRational::from_integer(n.into()), literal: n.to_string() }
    }

    /// Builds a numeral for a nonnegative rational; returns `None` for negative values.
    ///
    /// The literal is the terminating decimal expansion when one exists.
    pub fn from_rational(value: BigRational) -> Option<Self> {
        if value.is_negative() {
            return None;
        }
        let literal = decimal_expansion(&value)?;
        Some(Numeral { value, literal })
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn literal(&self) -> &str {
        &self.literal
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }
}

impl PartialEq for Numeral {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Numeral {}

impl Hash for Numeral {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state)
    }
}

impl fmt::Display for Numeral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.literal)
    }
}

/// Exact decimal digits of `value` if its denominator only has factors 2 and 5.
pub fn decimal_expansion(value: &BigRational) -> Option<String> {
    let mut denom = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let ten = BigInt::from(10);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&denom % &two).is_zero() {
        denom /= &two;
        twos += 1;
    }
    while (&denom % &five).is_zero() {
        denom /= &five;
        fives += 1;
    }
    if !denom.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(ten, places));
    debug_assert!(scaled.is_integer());
    let digits = scaled.to_integer().abs().to_string();
    let sign = if value.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{int_part}.{frac_part}"))
}
