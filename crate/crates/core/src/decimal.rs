//! Exact decimal quantities.
//!
//! Bandwidths and frame timings are carried as `Ratio<i64>` so slot
//! arithmetic (`C·S/T`, ceilings, throughput sums) stays exact. On the wire
//! they are plain JSON numbers; parsing goes through the shortest decimal
//! rendering of the `f64`, so `0.1` becomes exactly `1/10`.

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serializer};

pub type Rational = Ratio<i64>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses a finite `f64` as the decimal it prints as.
pub fn from_f64(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse(&format!("{x}"))
}

/// Parses a plain decimal literal such as `-12.5` or `40`.
pub fn parse(text: &str) -> Option<Rational> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let frac = frac.trim_end_matches('0');
    let mut numer: i64 = 0;
    for c in whole.chars().chain(frac.chars()) {
        numer = numer.checked_mul(10)?.checked_add(c as i64 - '0' as i64)?;
    }
    let denom = 10i64.checked_pow(frac.len() as u32)?;
    let r = Rational::new(numer, denom);
    Some(if negative { -r } else { r })
}

pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
    if value.is_integer() {
        s.serialize_i64(*value.numer())
    } else {
        s.serialize_f64(to_f64(*value))
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let x = f64::deserialize(d)?;
    from_f64(x).ok_or_else(|| de::Error::custom(format!("{x} is not a representable decimal")))
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => super::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        match Option::<f64>::deserialize(d)? {
            Some(x) => from_f64(x)
                .map(Some)
                .ok_or_else(|| de::Error::custom(format!("{x} is not a representable decimal"))),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse("2.5"), Some(Rational::new(5, 2)));
        assert_eq!(parse("-13"), Some(int(-13)));
        assert_eq!(parse("0.10"), Some(Rational::new(1, 10)));
        assert_eq!(from_f64(0.1), Some(Rational::new(1, 10)));
        assert_eq!(parse("1e3"), None);
        assert_eq!(parse("."), None);
        assert_eq!(from_f64(f64::NAN), None);
    }

    #[test]
    fn round_trips_through_f64() {
        for text in ["0.5", "2.5", "17.125", "1000", "0.001"] {
            let r = parse(text).unwrap();
            assert_eq!(from_f64(to_f64(r)), Some(r));
        }
    }
}
