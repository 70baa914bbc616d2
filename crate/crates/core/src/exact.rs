//! Exact rational values and their decimal renderings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `3/8`, `0.35`, or `2`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidParameter(format!("{text:?} is not a rational or decimal number"));
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidParameter(format!(
                "{text:?} has a zero denominator"
            )));
        }
        return Ok(Rational::new(n, d));
    }
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole
        .chars()
        .chain(frac.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let mantissa: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let scale = BigInt::from(10u32).pow(frac.len() as u32);
    let value = Rational::new(mantissa, scale);
    Ok(if negative { -value } else { value })
}

/// `n` for integers, `n/d` otherwise (always in lowest terms).
pub fn exact_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering with `places` fractional digits, halves rounded away
/// from zero.
pub fn to_decimal(r: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = r.abs() * Rational::from_integer(scale.clone());
    let (q, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = rem * 2;
    let rounded = if twice >= *scaled.denom() { q + 1 } else { q };
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let sign = if r.is_negative() && !rounded_is_zero(&int_part, &frac_part) {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!(
            "{sign}{int_part}.{:0>width$}",
            frac_part.to_string(),
            width = places as usize
        )
    }
}

fn rounded_is_zero(a: &BigInt, b: &BigInt) -> bool {
    a.is_zero() && b.is_zero()
}

/// `part / whole` as a percentage; zero when `whole` is zero.
pub fn percent(part: u64, whole: u64) -> Rational {
    if whole == 0 {
        Rational::zero()
    } else {
        ratio(part * 100, whole)
    }
}

/// Points `start, start + step, …` up to `end`. `end` itself is always the
/// last point even when `step` does not divide the span.
pub fn grid(start: &Rational, end: &Rational, step: &Rational) -> Result<Vec<Rational>> {
    if !step.is_positive() {
        return Err(Error::InvalidParameter("grid step must be positive".into()));
    }
    if end < start {
        return Err(Error::InvalidParameter(
            "grid end is below its start".into(),
        ));
    }
    let count = ((end - start) / step).floor().to_integer();
    let count: usize = count
        .try_into()
        .ok()
        .filter(|n| *n <= 1_000_000)
        .ok_or_else(|| Error::InvalidParameter("grid has too many points".into()))?;
    let mut out: Vec<Rational> = (0..=count)
        .map(|i| start + step * Rational::from_integer(BigInt::from(i)))
        .collect();
    if out.last() != Some(end) {
        out.push(end.clone());
    }
    Ok(out)
}

pub fn is_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}
