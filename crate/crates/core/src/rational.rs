//! Exact rational values and their text renderings.

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;

pub type Rational = Ratio<i128>;

pub fn ratio(numer: i128, denom: i128) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(value: impl Into<i128>) -> Rational {
    Rational::from_integer(value.into())
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn exact(value: &Rational) -> String {
    if value.is_integer() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Decimal rendering with 12 significant digits, trailing zeros trimmed.
pub fn decimal(value: &Rational) -> String {
    decimal_f64(value.to_f64().unwrap_or(f64::NAN))
}

pub fn decimal_big(value: &BigUint) -> String {
    decimal_f64(value.to_f64().unwrap_or(f64::INFINITY))
}

fn decimal_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&magnitude) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let text = format!("{x:.decimals$}");
    if text.contains('.') {
        text.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        text
    }
}

/// Exact `p/q` next to its decimal form, e.g. `3/4 (0.75)`.
pub fn both(value: &Rational) -> String {
    if value.is_integer() {
        exact(value)
    } else {
        format!("{} ({})", exact(value), decimal(value))
    }
}

/// Serializes a [`Rational`] as its exact `p/q` string.
pub mod serde_exact {
    use super::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::exact(value))
    }
}

pub mod serde_exact_opt {
    use super::Rational;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(value: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(v) => s.serialize_str(&super::exact(v)),
            None => s.serialize_none(),
        }
    }
}
