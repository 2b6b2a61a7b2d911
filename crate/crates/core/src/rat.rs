//! Exact rational scalars.
//!
//! Slopes, prefix sums and degrees are all `Rat` values: arbitrary-precision
//! rationals kept in lowest terms with a positive denominator. The alias
//! keeps the rest of the crate decoupled from the backing implementation.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

/// Arbitrary-precision rational, always reduced, denominator always positive.
pub type Rat = BigRational;

/// `n/d` reduced. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Canonical text form: `-3` for integers, `2/3` otherwise.
pub fn format_rat(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatParseError {
    #[error("empty fraction")]
    Empty,
    #[error("invalid integer literal {0:?}")]
    BadInt(String),
    #[error("zero or negative denominator in {0:?}")]
    BadDenominator(String),
}

/// Parses `-3`, `2/3` or `-4/6` (reduced on the way in). The denominator,
/// when present, must be a positive integer literal.
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let (num_text, den_text) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_text
        .parse()
        .map_err(|_| RatParseError::BadInt(num_text.to_string()))?;
    let den: BigInt = match den_text {
        Some(d) => d
            .parse()
            .map_err(|_| RatParseError::BadInt(d.to_string()))?,
        None => BigInt::from(1),
    };
    if den <= BigInt::from(0) {
        return Err(RatParseError::BadDenominator(s.to_string()));
    }
    Ok(Rat::new(num, den))
}
