//! Exact rationals and their canonical JSON form.
//!
//! Values are `num_rational::BigRational`, which is always kept in lowest
//! terms with a positive denominator. On the wire a rational is
//! `{"num": "<decimal>", "den": "<decimal>"}`; parsing rejects anything
//! that is not already canonical so that serialization round-trips
//! byte-for-byte.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use num_rational::BigRational as Rational;

/// `num / den` as an exact rational. Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn from_usize(v: usize) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Canonical means lowest terms and a positive denominator.
pub fn is_canonical(r: &Rational) -> bool {
    r.denom().is_positive() && r.numer().gcd(r.denom()).is_one()
}

/// Largest bit length of numerator or denominator.
pub fn bit_length(r: &Rational) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// Parses `p/q`, a plain integer, or a decimal literal such as `0.25`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = whole.starts_with('-');
        let w: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().ok()?
        };
        let f: BigInt = frac.parse().ok()?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mag = Rational::new(w.abs() * &scale + f, scale);
        return Some(if negative { -mag } else { mag });
    }
    t.parse::<BigInt>().ok().map(Rational::from_integer)
}

/// Renders `p/q`, or just `p` for integers.
pub fn display(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    num: String,
    den: String,
}

pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
    Wire {
        num: r.numer().to_string(),
        den: r.denom().to_string(),
    }
    .serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let w = Wire::deserialize(d)?;
    let num: BigInt = w.num.parse().map_err(D::Error::custom)?;
    let den: BigInt = w.den.parse().map_err(D::Error::custom)?;
    if num.to_string() != w.num || den.to_string() != w.den {
        return Err(D::Error::custom("rational digits are not in canonical decimal form"));
    }
    if !den.is_positive() {
        return Err(D::Error::custom("rational denominator must be positive"));
    }
    if !num.gcd(&den).is_one() {
        return Err(D::Error::custom("rational is not in lowest terms"));
    }
    Ok(Rational::new_raw(num, den))
}

/// Serde adapter for `Vec<Rational>`.
pub mod vec {
    use super::*;
    use serde::ser::SerializeSeq;

    #[derive(Serialize, Deserialize)]
    struct Item(#[serde(with = "super")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&Item(r.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let items = Vec::<Item>::deserialize(d)?;
        Ok(items.into_iter().map(|i| i.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    struct Holder {
        #[serde(with = "super")]
        v: Rational,
    }

    #[test]
    fn json_form() {
        let h = Holder { v: rat(-10, 4) };
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(s, r#"{"v":{"num":"-5","den":"2"}}"#);
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap(), h);
    }

    #[test]
    fn json_rejects_non_canonical() {
        for bad in [
            r#"{"v":{"num":"2","den":"4"}}"#,
            r#"{"v":{"num":"1","den":"-2"}}"#,
            r#"{"v":{"num":"01","den":"2"}}"#,
            r#"{"v":{"num":"1","den":"0"}}"#,
        ] {
            assert!(serde_json::from_str::<Holder>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("1/4"), Some(rat(1, 4)));
        assert_eq!(parse_rational(" 6/4 "), Some(rat(3, 2)));
        assert_eq!(parse_rational("7"), Some(int(7)));
        assert_eq!(parse_rational("0.25"), Some(rat(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(rat(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(display(&rat(29, 6)), "29/6");
        assert_eq!(display(&int(4)), "4");
    }
}
