//! Accuracy and failure-probability parameters.

use alloc::string::String;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("epsilon must lie in (0, 2), got {0}")]
    Epsilon(f64),
    #[error("failure probability p must lie in (0, 1), got {0}")]
    Probability(String),
    #[error("not a decimal number: `{0}`")]
    Decimal(String),
}

/// Parses a plain decimal such as `0.25`, `1e-3` or `.5` into an exact rational.
pub fn parse_decimal(s: &str) -> Result<BigRational, ParamError> {
    let err = || ParamError::Decimal(s.into());
    let t = s.trim();
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(pos) => (&t[..pos], t[pos + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let digits: String = int_part.chars().chain(frac_part.chars()).collect();
    let mut numer: BigInt = digits.parse().map_err(|_| err())?;
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    Ok(if scale >= 0 {
        BigRational::from_integer(numer * pow)
    } else {
        BigRational::new(numer, pow)
    })
}

/// The exact binary value of a finite float.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn check_epsilon(epsilon: f64) -> Result<(), ParamError> {
    if epsilon.is_finite() && epsilon > 0.0 && epsilon < 2.0 {
        Ok(())
    } else {
        Err(ParamError::Epsilon(epsilon))
    }
}

pub fn check_probability(p: &BigRational) -> Result<(), ParamError> {
    if p.is_positive() && *p < BigRational::one() {
        Ok(())
    } else {
        Err(ParamError::Probability(alloc::format!("{p}")))
    }
}

/// `(1 − p)·2^n ≤ m`, exactly.
pub fn meets_success_bound(m: &BigInt, p: &BigRational, n: u32) -> bool {
    let lhs = BigRational::from_integer(m.clone());
    let rhs = (BigRational::one() - p) * BigRational::from_integer(BigInt::one() << n as usize);
    lhs >= rhs
}
