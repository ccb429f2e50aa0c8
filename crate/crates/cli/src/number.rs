//! Shortest-safe decimal text for `f64`: 17 significant digits, `%.17g` layout.

use serde::de::{Deserialize, Deserializer};
use serde::ser::{Error as _, Serialize, Serializer};
use serde_json::value::RawValue;

pub const SIGNIFICANT_DIGITS: usize = 17;

/// `%.17g`: fixed notation for decimal exponents in `[-4, 17)`, scientific otherwise,
/// trailing zeros removed. Non-finite input yields `None`.
pub fn format_g17(v: f64) -> Option<String> {
    if !v.is_finite() {
        return None;
    }
    if v == 0.0 {
        return Some(if v.is_sign_negative() { "-0".into() } else { "0".into() });
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIGNIFICANT_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        Some(format!("{}e{}{:02}", trim_zeros(mantissa), sign, exp.abs()))
    } else {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        Some(trim_zeros(&format!("{v:.decimals$}")).to_string())
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn raw(v: f64) -> Result<Box<RawValue>, serde_json::Error> {
    RawValue::from_string(format_g17(v).unwrap_or_else(|| "null".into()))
}

pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*v).map_err(S::Error::custom)?.serialize(s)
}

pub fn ser_vec<S: Serializer>(v: &[f64; 3], s: S) -> Result<S::Ok, S::Error> {
    let items = v.iter().map(|&x| raw(x)).collect::<Result<Vec<_>, _>>().map_err(S::Error::custom)?;
    items.serialize(s)
}

pub fn ser_mat<S: Serializer>(m: &[[f64; 3]; 3], s: S) -> Result<S::Ok, S::Error> {
    let rows = m
        .iter()
        .map(|row| row.iter().map(|&x| raw(x)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(S::Error::custom)?;
    rows.serialize(s)
}

pub fn ser_opt_mat<S: Serializer>(m: &Option<[[f64; 3]; 3]>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(m) => ser_mat(m, s),
        None => s.serialize_none(),
    }
}

/// `null` reads back as NaN, mirroring how non-finite values are written.
pub fn de_f64<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

pub fn de_vec<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; 3], D::Error> {
    let v = <[Option<f64>; 3]>::deserialize(d)?;
    Ok(v.map(|x| x.unwrap_or(f64::NAN)))
}

pub fn de_mat<'de, D: Deserializer<'de>>(d: D) -> Result<[[f64; 3]; 3], D::Error> {
    let m = <[[Option<f64>; 3]; 3]>::deserialize(d)?;
    Ok(m.map(|row| row.map(|x| x.unwrap_or(f64::NAN))))
}

pub fn de_opt_mat<'de, D: Deserializer<'de>>(d: D) -> Result<Option<[[f64; 3]; 3]>, D::Error> {
    let m = Option::<[[Option<f64>; 3]; 3]>::deserialize(d)?;
    Ok(m.map(|m| m.map(|row| row.map(|x| x.unwrap_or(f64::NAN)))))
}
