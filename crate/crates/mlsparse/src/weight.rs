//! Exact rational edge weights.
//!
//! All distances, budgets and costs are kept as `Ratio<i128>` so that
//! comparisons are tie-free: a greedy scan, an oracle feasibility check and a
//! brute-force enumeration all agree bit for bit. Floats only appear at the
//! reporting boundary.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt::Write as _;

pub type Weight = Ratio<i128>;

pub fn wint(n: i128) -> Weight {
    Weight::from_integer(n)
}

pub fn wfrac(num: i128, den: i128) -> Weight {
    Weight::new(num, den)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseWeightError(pub String);

/// Parses `12`, `-3.25` or `7/5` into an exact rational.
pub fn parse_weight(s: &str) -> Result<Weight, ParseWeightError> {
    let s = s.trim();
    let bad = || ParseWeightError(s.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Weight::new(num, den));
    }
    if let Some((intpart, fracpart)) = s.split_once('.') {
        if fracpart.is_empty() || fracpart.len() > 18 || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = intpart.starts_with('-');
        let intval: i128 = if intpart == "-" || intpart.is_empty() {
            0
        } else {
            intpart.parse().map_err(|_| bad())?
        };
        let scale = 10i128.pow(fracpart.len() as u32);
        let frac: i128 = fracpart.parse().map_err(|_| bad())?;
        let mag = intval.abs() * scale + frac;
        let num = if negative || intval < 0 { -mag } else { mag };
        return Ok(Weight::new(num, scale));
    }
    let n: i128 = s.parse().map_err(|_| bad())?;
    Ok(Weight::from_integer(n))
}

pub fn to_f64(w: &Weight) -> f64 {
    w.to_f64().unwrap_or_else(|| {
        // Out-of-range numer/denom; divide explicitly.
        (*w.numer() as f64) / (*w.denom() as f64)
    })
}

/// Canonical display: integer, terminating decimal, or `p/q`.
///
/// Decimal form is used only when the reduced denominator is of the form
/// 2^a·5^b, so the output round-trips exactly through `parse_weight`.
pub fn format_weight(w: &Weight) -> String {
    if w.denom() == &1 {
        return w.numer().to_string();
    }
    let mut den = *w.denom();
    let mut twos = 0u32;
    let mut fives = 0u32;
    while den % 2 == 0 {
        den /= 2;
        twos += 1;
    }
    while den % 5 == 0 {
        den /= 5;
        fives += 1;
    }
    if den != 1 {
        return format!("{}/{}", w.numer(), w.denom());
    }
    let digits = twos.max(fives);
    let scale = 10i128.pow(digits);
    let scaled = w * Weight::from_integer(scale);
    debug_assert!(scaled.is_integer());
    let value = scaled.to_integer();
    let neg = value < 0;
    let mag = value.abs();
    let int = mag / scale;
    let frac = mag % scale;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    let _ = write!(out, "{int}.{frac:0width$}", width = digits as usize);
    // Trim trailing zeros but keep at least one fractional digit.
    while out.ends_with('0') && !out.ends_with(".0") {
        out.pop();
    }
    out
}

pub fn is_nonnegative(w: &Weight) -> bool {
    !w.is_negative()
}

pub fn weight_zero() -> Weight {
    Weight::zero()
}
