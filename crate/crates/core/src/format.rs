//! Numeric rendering for CLI output.
//!
//! `csv` and `json` carry the shortest decimal that round-trips to the same
//! `f64`; `table` rounds to four decimals, half away from zero.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::InvalidArgument(format!(
                "unknown format `{other}` (expected csv, json or table)"
            ))),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Table => "table",
        })
    }
}

/// Shortest round-trip decimal.
pub fn full(v: f64) -> String {
    format!("{v}")
}

/// Rounds the shortest decimal form of `v` to `places` digits, half away
/// from zero.
pub fn fixed(v: f64, places: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    // f64 Display never uses exponent notation
    let text = format!("{}", v.abs());
    let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
    let mut digits: Vec<u8> = int_part.bytes().map(|b| b - b'0').collect();
    let int_len = digits.len();
    let frac: Vec<u8> = frac_part.bytes().map(|b| b - b'0').collect();
    digits.extend(frac.iter().take(places));
    digits.resize(int_len + places, 0);

    if frac.get(places).is_some_and(|&d| d >= 5) {
        let mut i = digits.len();
        loop {
            if i == 0 {
                digits.insert(0, 1);
                break;
            }
            i -= 1;
            if digits[i] == 9 {
                digits[i] = 0;
            } else {
                digits[i] += 1;
                break;
            }
        }
    }

    let int_len = digits.len() - places;
    let mut out = String::with_capacity(digits.len() + 2);
    let nonzero = digits.iter().any(|&d| d != 0);
    if v.is_sign_negative() && nonzero {
        out.push('-');
    }
    out.extend(digits[..int_len].iter().map(|d| (b'0' + d) as char));
    if places > 0 {
        out.push('.');
        out.extend(digits[int_len..].iter().map(|d| (b'0' + d) as char));
    }
    out
}

/// Four-decimal rendering used by table mode.
pub fn table(v: f64) -> String {
    fixed(v, 4)
}
