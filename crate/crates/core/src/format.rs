//! Decimal formatting shared by the CSV writers.

/// Formats `x` rounded to `digits` significant digits in plain decimal
/// notation, with trailing zeros trimmed. Non-finite values print as
/// `inf`, `-inf` or `NaN`.
pub fn sig_digits(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    // Round through scientific notation first so the exponent reflects the
    // rounded value (0.99999999999999 -> 1.00000000000e0).
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let rounded: f64 = sci.parse().unwrap();
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Twelve significant digits, the precision of every float column.
pub fn float12(x: f64) -> String {
    sig_digits(x, 12)
}
