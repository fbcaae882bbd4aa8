//! Fixed significant-digit number formatting.
//!
//! All emitted files and reports format floats through [`format_sig`] so
//! identical inputs produce byte-identical outputs across runs and
//! platforms. Semantics follow C's `%.*g`: shortest of plain and
//! scientific notation at a given number of significant digits, with
//! trailing zeros stripped.

/// Format `x` with `sig` significant digits (`%.*g` shaped).
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (_, exp) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp.parse().expect("exponent parses");
    if exp < -4 || exp >= sig as i32 {
        let (mant, _) = sci.split_once('e').expect("exponential format");
        format!("{}e{exp}", trim_zeros(mant))
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

/// Ten significant digits: the fixed output precision of every report.
pub fn g10(x: f64) -> String {
    format_sig(x, 10)
}

fn trim_zeros(s: &str) -> &str {
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
    fn plain_range() {
        assert_eq!(g10(0.0), "0");
        assert_eq!(g10(-0.0), "0");
        assert_eq!(g10(1.0), "1");
        assert_eq!(g10(0.5), "0.5");
        assert_eq!(g10(1.1996412283), "1.199641228");
        assert_eq!(g10(-2.5), "-2.5");
        assert_eq!(g10(123456789.0), "123456789");
    }

    #[test]
    fn scientific_range() {
        assert_eq!(g10(1e-7), "1e-7");
        assert_eq!(g10(1.25e-9), "1.25e-9");
        assert_eq!(g10(3.0e12), "3e12");
        assert_eq!(g10(-4.25e15), "-4.25e15");
    }

    #[test]
    fn boundary_and_carry() {
        // exponent boundary: 1e10 needs 11 digits in plain form
        assert_eq!(g10(1e10), "1e10");
        assert_eq!(g10(9999999999.0), "9999999999");
        // rounding carries across a power of ten
        assert_eq!(g10(9.99999999995), "10");
        assert_eq!(format_sig(0.000099999, 3), "0.0001");
    }

    #[test]
    fn non_finite() {
        assert_eq!(g10(f64::NAN), "nan");
        assert_eq!(g10(f64::INFINITY), "inf");
        assert_eq!(g10(f64::NEG_INFINITY), "-inf");
    }
}
