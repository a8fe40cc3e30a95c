//! Exact fraction-string encoding shared by all JSON interfaces.
//!
//! Every numeric quantity crosses the JSON boundary as a decimal-free
//! fraction string (`"-3"`, `"1/2"`), never as a float, so certificates
//! replay bit-exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("empty numeric string")]
    Empty,
    #[error("invalid integer `{0}`")]
    BadInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("invalid fraction `{0}`")]
    BadFraction(String),
}

/// Formats a rational as `n` or `n/d` with `d > 0`.
pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn int_to_string(n: &BigInt) -> String {
    n.to_string()
}

pub fn parse_int(s: &str) -> Result<BigInt, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseError::Empty);
    }
    t.parse::<BigInt>()
        .map_err(|_| ParseError::BadInteger(t.to_string()))
}

/// Parses `n` or `n/d`. The result is normalized with positive denominator.
pub fn parse_rational(s: &str) -> Result<BigRational, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseError::Empty);
    }
    match t.split_once('/') {
        None => Ok(BigRational::from(parse_int(t)?)),
        Some((num, den)) => {
            let n = parse_int(num)?;
            let d = parse_int(den)?;
            if d.is_zero() {
                return Err(ParseError::ZeroDenominator(t.to_string()));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

/// Serde adapter for `BigInt` as a JSON string (accepts plain integers too).
pub mod bigint_string {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Num(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Str(s) => parse_int(&s).map_err(D::Error::custom),
            Raw::Num(n) => Ok(BigInt::from(n)),
        }
    }
}

/// Serde adapter for `BigRational` as a fraction string.
pub mod rational_string {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&rational_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Num(i64),
        }
        match Raw::deserialize(de)? {
            Raw::Str(s) => parse_rational(&s).map_err(D::Error::custom),
            Raw::Num(n) => Ok(BigRational::from(BigInt::from(n))),
        }
    }
}

/// Sign helper used when printing interval endpoints and pivots.
pub fn is_negative(q: &BigRational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_fraction_strings() {
        for s in ["0", "-3", "1/2", "-7/5", "22"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(rational_to_string(&q), s);
        }
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        let q = parse_rational("4/-6").unwrap();
        assert_eq!(rational_to_string(&q), "-2/3");
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }
}
