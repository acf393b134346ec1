//! Exact rational scalars.
//!
//! Coefficients are `num_rational::BigRational`: always reduced, with a
//! positive denominator and zero stored as 0/1, which is exactly the
//! normal form the rest of the kernel assumes.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational from a numerator/denominator pair. Panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses "3", "-3", "3/4", "-3/4" or a decimal literal like "0.25".
///
/// Decimal literals are read as exact decimal fractions; tails longer
/// than `max_decimals` digits are refused so that no approximate float
/// sneaks in as a huge exact fraction.
pub fn parse_rational(text: &str, max_decimals: usize) -> Result<Rational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator `{num}`"))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator `{den}`"))?;
        if d.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        if frac_part.len() > max_decimals {
            return Err(format!(
                "`{s}` has more than {max_decimals} decimal places; write it as a fraction"
            ));
        }
        if !frac_part.chars().all(|c| c.is_ascii_digit()) || frac_part.is_empty() {
            return Err(format!("bad decimal literal `{s}`"));
        }
        let negative = int_part.trim_start().starts_with('-');
        let int_digits = if int_part == "-" || int_part.is_empty() {
            "0".to_string()
        } else {
            int_part.trim_start_matches(['+', '-']).to_string()
        };
        let int_val: BigInt = int_digits
            .parse()
            .map_err(|_| format!("bad decimal literal `{s}`"))?;
        let frac_val: BigInt = frac_part.parse().map_err(|_| format!("bad decimal literal `{s}`"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut value = Rational::new(int_val * &scale + frac_val, scale);
        if negative {
            value = -value;
        }
        return Ok(value);
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad number `{s}`"))?;
    Ok(Rational::from_integer(n))
}

/// Nearest integer, ties rounded away from zero.
pub fn round_half_away(r: &Rational) -> BigInt {
    let two = BigInt::from(2);
    let (num, den) = (r.numer(), r.denom());
    if r.is_negative() {
        -((-num * &two + den) / (den * &two))
    } else {
        (num * two + den) / (den * BigInt::from(2))
    }
}

/// Renders without a superfluous `/1`.
pub fn rational_to_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
