//! Fixed-precision float output for reports.
//!
//! Reports carry every float with 17 significant digits so that values
//! round-trip exactly and byte-identical reruns can be diffed.

use serde::Serializer;
use serde_json::value::RawValue;

/// Formats `x` like C's `%.17g`. Non-finite values become `null`.
pub fn g17(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mantissa, sign, exp.abs())
    }
}

/// `serialize_with` helper emitting a float through [`g17`].
pub fn ser_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    use serde::Serialize;
    let raw = RawValue::from_string(g17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn ser_f64_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        let raw = RawValue::from_string(g17(*x)).map_err(serde::ser::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

pub fn ser_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(x) => ser_f64(x, s),
        None => s.serialize_none(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(2.0 / 3.0), "0.66666666666666663");
        assert_eq!(g17(1.0), "1.0000000000000000");
        assert_eq!(g17(1e-7), "9.9999999999999995e-08");
        assert_eq!(g17(f64::NAN), "null");
    }

    #[test]
    fn round_trips() {
        for x in [0.1, -2.5e-300, 1.7976931348623157e308, 123456.789, 1e-5] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
