//! Fixed-width numeric formatting for report files.
//!
//! Every float written to a CSV or JSON report goes through six significant
//! digits, so identical inputs produce byte-identical outputs.

/// Formats to six significant digits in plain decimal notation.
///
/// Integral magnitudes keep trailing zeros ("1122.00"), small values keep six
/// figures after the leading zeros ("0.231475").
pub fn sig6(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return "0.00000".to_string();
    }
    let magnitude = value.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{value:.decimals$}")
}

/// Rounds to six significant digits, for values embedded in JSON documents.
pub fn round6(value: f64) -> f64 {
    if !value.is_finite() || value == 0.0 {
        return value;
    }
    let magnitude = value.abs().log10().floor() as i32;
    let factor = 10f64.powi(5 - magnitude);
    (value * factor).round() / factor
}
