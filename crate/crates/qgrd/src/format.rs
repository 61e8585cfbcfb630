//! Number formatting shared by the CSV and JSON writers.

/// Formats with 12 significant digits, `%g` style: plain notation for
/// moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

fn trim(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Rounds to the printed precision so that JSON output matches CSV.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    fmt_num(x).parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(std::f64::consts::PI), "3.14159265359");
        assert_eq!(fmt_num(1.0 / 3.0 * 1e-7), "3.33333333333e-8");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e14");
        assert_eq!(fmt_num(0.000123), "0.000123");
        assert_eq!(fmt_num(999999999999.9), "1e12");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(round_sig(1.234567890123456), 1.23456789012);
    }
}
