//! Helpers for exact rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from(BigInt::from(n))
}

/// Formats a rational as a decimal-free string: `"3"`, `"-7/2"`.
pub fn format_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`; the reduced denominator must be positive.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::InvalidElement(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        None => Ok(Q::from(parse_int(s)?)),
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::InvalidElement(format!("zero denominator in `{s}`")));
            }
            Ok(Q::new(parse_int(n)?, d))
        }
    }
}

/// Endpoints of `c * [lo, hi]` under exact interval arithmetic.
pub fn scale_interval(c: &Q, lo: &Q, hi: &Q) -> (Q, Q) {
    if c.is_negative() {
        (c * hi, c * lo)
    } else {
        (c * lo, c * hi)
    }
}
