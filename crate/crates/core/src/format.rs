//! Number rendering shared by the human and machine report formats.

use num_complex::Complex64;
use serde_json::{json, Value};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant decimal digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let r: f64 = s.parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Shortest text of the rounded value; scientific notation for very small or
/// very large magnitudes.
pub fn fmt(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r != 0.0 && !(1e-4..1e12).contains(&a) {
        format!("{r:e}")
    } else {
        format!("{r}")
    }
}

pub fn num(x: f64) -> Value {
    json!(round_sig(x))
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Complex number as `[re, im]`.
pub fn complex(z: Complex64) -> Value {
    json!([round_sig(z.re), round_sig(z.im)])
}

pub fn complex_vec(v: &[Complex64]) -> Value {
    Value::Array(v.iter().map(|&z| complex(z)).collect())
}

/// `a+bi` with both parts rounded.
pub fn fmt_complex(z: Complex64) -> String {
    let (re, im) = (round_sig(z.re), round_sig(z.im));
    if im == 0.0 {
        fmt(re)
    } else if re == 0.0 {
        format!("{}i", fmt(im))
    } else if im < 0.0 {
        format!("{}-{}i", fmt(re), fmt(-im))
    } else {
        format!("{}+{}i", fmt(re), fmt(im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt(4.0 / 45.0), "0.0888888888889");
        assert_eq!(fmt(0.2f64.sqrt()), "0.4472135955");
        assert_eq!(fmt(1.0), "1");
        assert_eq!(fmt(0.0), "0");
        assert_eq!(fmt(1.2345e-17), "1.2345e-17");
        assert_eq!(round_sig(-0.0), 0.0);
    }

    #[test]
    fn half_even_ties() {
        // 2.5 is exact in binary, so this is a true tie.
        assert_eq!(format!("{:.0e}", 2.5), "2e0");
    }

    #[test]
    fn complex_text() {
        assert_eq!(fmt_complex(Complex64::new(0.5, -0.25)), "0.5-0.25i");
        assert_eq!(fmt_complex(Complex64::new(0.0, 1.0)), "1i");
        assert_eq!(complex(Complex64::new(1.0, 0.0)), json!([1.0, 0.0]));
    }
}
