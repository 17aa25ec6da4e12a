//! Decimal text formatting for the exported artifacts.
//!
//! Every number written to samples.csv, results.csv, summary.json,
//! ranking.json or an SVG annotation goes through the same 9-significant-digit
//! representation, so the files agree with each other byte for byte and a
//! rerun with identical flags reproduces them exactly.

/// Round to the f64 nearest the 9-significant-digit decimal representation.
///
/// Values stored in the JSON reports are rounded with this before
/// serialization; the SVG annotations format the same rounded value, so
/// parsing either side yields the identical f64.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted f64 reparses")
}

/// Format with 9 significant digits as plain decimal text.
///
/// Uses positional notation for magnitudes in a readable range and falls back
/// to exponential notation outside it. `parse::<f64>()` of the output equals
/// `round_sig9(x)`.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp_form = format!("{x:.8e}");
    let (mantissa, exp) = exp_form
        .split_once('e')
        .expect("exponential format contains 'e'");
    let exp: i32 = exp.parse().expect("exponent parses");
    if !(-4..=12).contains(&exp) {
        return exp_form;
    }
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 9);
    let point = exp + 1; // digits before the decimal point
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if point <= 0 {
        s.push_str("0.");
        for _ in 0..(-point) {
            s.push('0');
        }
        s.push_str(&digits);
    } else if (point as usize) >= digits.len() {
        s.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            s.push('0');
        }
    } else {
        s.push_str(&digits[..point as usize]);
        s.push('.');
        s.push_str(&digits[point as usize..]);
    }
    // trim trailing fraction zeros, keeping at least one digit
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_round_trip_equals_round_sig9() {
        let cases = [
            137.58,
            -0.0003,
            1.0,
            25110.0,
            9.999999994e12,
            1.2345678949e-7,
            0.0,
            -189.22,
            2.5e13,
        ];
        for &x in &cases {
            let s = fmt_sig9(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, round_sig9(x), "case {x} -> {s}");
        }
    }

    #[test]
    fn plain_notation_in_readable_range() {
        assert_eq!(fmt_sig9(137.58), "137.58");
        assert_eq!(fmt_sig9(0.0003), "0.0003");
        assert_eq!(fmt_sig9(-5.0), "-5");
        assert_eq!(fmt_sig9(25110.0), "25110");
    }

    #[test]
    fn exponential_outside_range() {
        assert!(fmt_sig9(1e13).contains('e'));
        assert!(fmt_sig9(1e-5).contains('e'));
    }

    #[test]
    fn round_sig9_is_idempotent() {
        for &x in &[std::f64::consts::PI, 1.0 / 3.0, 295.4961, 1e-300] {
            assert_eq!(round_sig9(round_sig9(x)), round_sig9(x));
        }
    }
}
