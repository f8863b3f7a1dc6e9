//! Exact rationals for the b-axis of geography envelopes.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serializer;

use crate::error::Error;

pub type Q = BigRational;

pub fn int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `-3`, `3/2`, `-10/3`, or a finite decimal such as `0.25`.
pub fn parse_q(s: &str) -> Result<Q, Error> {
    let t = s.trim();
    let bad = || Error::InvalidParams(format!("not an exact rational: `{s}`"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = t.split_once('.') {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = i.starts_with('-');
        let whole: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        let scale = BigInt::from(10).pow(f.len() as u32);
        let frac_part: BigInt = f.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac_part;
        let n = if neg { -mag } else { mag };
        return Ok(Q::new(n, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

/// `n` for integers, `n/d` otherwise.
pub fn fmt_q(q: &Q) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn ser_q<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_q("3/2").unwrap(), frac(3, 2));
        assert_eq!(parse_q("-10/3").unwrap(), frac(-10, 3));
        assert_eq!(parse_q(" -1 ").unwrap(), int(-1));
        assert_eq!(parse_q("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_q("-1.5").unwrap(), frac(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1.").is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(fmt_q(&frac(6, 4)), "3/2");
        assert_eq!(fmt_q(&int(-4)), "-4");
        assert_eq!(fmt_q(&frac(-1, 3)), "-1/3");
    }
}
