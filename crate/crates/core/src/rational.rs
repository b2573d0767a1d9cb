//! Exact rationals and their text / JSON encodings.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Number, Value};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// `p/q` in lowest terms, or `p` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p/q` or an integer literal. Zero denominators are rejected.
pub fn parse(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).ok()?;
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => BigInt::from_str(text).ok().map(Rational::from_integer),
    }
}

fn number(n: &BigInt) -> Value {
    // arbitrary_precision keeps the digits verbatim
    Value::Number(Number::from_str(&n.to_string()).expect("integer literal"))
}

/// `{"num": p, "den": q}` with `q > 0` and `gcd(p, q) = 1`.
pub fn to_json(r: &Rational) -> Value {
    let mut m = Map::new();
    m.insert("num".into(), number(r.numer()));
    m.insert("den".into(), number(r.denom()));
    Value::Object(m)
}

/// Inverse of [`to_json`]; rejects non-canonical encodings.
pub fn from_json(v: &Value) -> Option<Rational> {
    let obj = v.as_object()?;
    let read = |key: &str| -> Option<BigInt> {
        match obj.get(key)? {
            Value::Number(n) => BigInt::from_str(&n.to_string()).ok(),
            _ => None,
        }
    };
    let num = read("num")?;
    let den = read("den")?;
    if !den.is_positive() {
        return None;
    }
    let r = Rational::new_raw(num.clone(), den.clone());
    let reduced = Rational::new(num, den);
    if reduced.numer() == r.numer() && reduced.denom() == r.denom() {
        Some(reduced)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formatting() {
        assert_eq!(format(&ratio(2, 4)), "1/2");
        assert_eq!(format(&int(3)), "3");
        assert_eq!(format(&ratio(-1, 3)), "-1/3");
        assert_eq!(format(&zero()), "0");
    }

    #[test]
    fn parsing() {
        assert_eq!(parse("1/3"), Some(ratio(1, 3)));
        assert_eq!(parse(" 2/4 "), Some(ratio(1, 2)));
        assert_eq!(parse("7"), Some(int(7)));
        assert_eq!(parse("1/0"), None);
        assert_eq!(parse("x"), None);
    }

    #[test]
    fn json_rejects_non_canonical() {
        let v: Value = serde_json::from_str(r#"{"num": 2, "den": 4}"#).unwrap();
        assert_eq!(from_json(&v), None);
        let v: Value = serde_json::from_str(r#"{"num": 1, "den": -2}"#).unwrap();
        assert_eq!(from_json(&v), None);
        let v: Value = serde_json::from_str(r#"{"num": 1, "den": 2}"#).unwrap();
        assert_eq!(from_json(&v), Some(ratio(1, 2)));
    }

    proptest! {
        #[test]
        fn json_round_trips(num in any::<i128>(), den in 1..u64::MAX, scale in 0u32..4) {
            let big = BigInt::from(10).pow(scale * 20);
            let r = Rational::new(BigInt::from(num) * &big, BigInt::from(den));
            let text = serde_json::to_string(&to_json(&r)).unwrap();
            let back: Value = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(from_json(&back), Some(r));
        }

        #[test]
        fn text_round_trips(num in any::<i64>(), den in 1..i64::MAX) {
            let r = ratio(num, den);
            prop_assert_eq!(parse(&format(&r)), Some(r));
        }
    }
}
