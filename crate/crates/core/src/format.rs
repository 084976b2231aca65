//! Text formatting shared by every table writer.

/// 17 significant digits, enough to round-trip any binary64 value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
