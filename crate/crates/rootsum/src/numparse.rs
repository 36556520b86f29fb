//! Exact parsing of command-line numbers.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use rootsum_core::exact::{Natural, Rat};

/// Parses a nonnegative integer. Accepts plain digits, `_` separators and
/// scientific notation whose value is an integer (`1e6`, `2.5e3`).
pub fn parse_natural(s: &str) -> Result<Natural, String> {
    let cleaned: String = s.trim().chars().filter(|&c| c != '_').collect();
    if cleaned.is_empty() {
        return Err("empty number".into());
    }
    let (mantissa, exp) = match cleaned.find(['e', 'E']) {
        Some(i) => {
            let e: u32 = cleaned[i + 1..]
                .trim_start_matches('+')
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (&cleaned[..i], e)
        }
        None => (cleaned.as_str(), 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("no digits in {s:?}"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a nonnegative integer: {s:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let value = BigUint::parse_bytes(digits.as_bytes(), 10).unwrap_or_default();
    let frac_len = frac_part.len() as u32;
    if exp >= frac_len {
        Ok(value * BigUint::from(10u32).pow(exp - frac_len))
    } else {
        let div = BigUint::from(10u32).pow(frac_len - exp);
        if (&value % &div).is_zero() {
            Ok(value / div)
        } else {
            Err(format!("{s:?} is not an integer"))
        }
    }
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let v = parse_natural(s)?;
    u64::try_from(&v).map_err(|_| format!("{s:?} is too large"))
}

/// Comma-separated list of naturals.
pub fn parse_natural_list(s: &str) -> Result<Vec<Natural>, String> {
    s.split(',')
        .filter(|part| !part.trim().is_empty())
        .map(parse_natural)
        .collect()
}

/// Parses `a/b`, `-a/b`, an integer, or a finite decimal like `0.25`.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let r = if let Some((a, b)) = body.split_once('/') {
        let num = parse_natural(a)?;
        let den = parse_natural(b)?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        Rat::new(BigInt::from(num), BigInt::from(den))
    } else if let Some((a, b)) = body.split_once('.') {
        let digits = format!("{a}{b}");
        let num = parse_natural(&digits)?;
        let den = BigUint::from(10u32).pow(b.len() as u32);
        Rat::new(BigInt::from(num), BigInt::from(den))
    } else {
        Rat::from_integer(BigInt::from(parse_natural(body)?))
    };
    Ok(if neg { -r } else { r })
}
