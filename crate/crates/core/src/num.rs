//! Exact scalar types and their text forms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Decimal rendering: `"-7"` for integers, `"3/4"` otherwise.
pub fn rat_to_string(x: &Rat) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"a"` or `"a/b"` with optional sign.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let t = text.trim();
    let bad = || Error::Syntax(format!("malformed rational `{text}`"));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: Int = num.parse().map_err(|_| bad())?;
    let den: Int = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Syntax(format!("zero denominator in `{text}`")));
    }
    Ok(Rat::new(num, den))
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub fn is_one(x: &Rat) -> bool {
    x.is_one()
}

/// Abbreviates long integers for table output: keeps head and tail digits.
pub fn abbreviate(text: &str, max: usize) -> String {
    let digits = text.trim_start_matches('-').len();
    if text.len() <= max || max < 8 {
        return text.to_string();
    }
    let keep = (max - 4) / 2;
    format!(
        "{}…{} ({} digits)",
        &text[..keep],
        &text[text.len() - keep..],
        digits
    )
}
