//! C-style `%.17g` formatting for reproducible numeric output.

/// Formats `x` like C's `printf("%.17g", x)`.
pub(crate) fn g17(x: f64) -> String {
    fmt_g(x, 17)
}

pub(crate) fn fmt_g(x: f64, precision: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let p = precision.max(1);
    // Exponent after rounding to p significant digits.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_reference_values() {
        // Reference strings from glibc printf("%.17g").
        assert_eq!(g17(0.1), "0.10000000000000001");
        assert_eq!(g17(1.25), "1.25");
        assert_eq!(g17(2.0), "2");
        assert_eq!(g17(-0.7), "-0.69999999999999996");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(1e20), "1e+20");
        assert_eq!(g17(123456789012345678.0), "1.2345678901234568e+17");
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(f64::NAN), "nan");
    }

    #[test]
    fn round_trips() {
        for &x in &[0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.7] {
            assert_eq!(g17(x).parse::<f64>().unwrap(), x);
        }
    }
}
