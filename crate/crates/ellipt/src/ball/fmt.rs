//! Decimal rendering of balls: `[m ± r]` and `[m ± r] + [m ± r]*I`.
//!
//! The midpoint is printed with no more digits than the radius justifies,
//! and the radius is printed as a three-digit upper bound, so the printed
//! interval always contains the true value.

use rug::float::Round;
use rug::Float;

use super::complex::ComplexBall;
use super::real::RealBall;

/// Renders a real ball to at most `max_digits` significant digits.
pub fn real_to_decimal(b: &RealBall, max_digits: usize) -> String {
    if b.rad().is_inf() {
        return "[± inf]".to_string();
    }
    if b.mid().is_zero() {
        if b.rad().is_zero() {
            return "[0 ± 0]".to_string();
        }
        return format!("[± {}]", mag_decimal_upper(&b.rad()));
    }
    // Number of digits actually certified by the radius.
    let digits = if b.rad().is_zero() {
        max_digits
    } else {
        let e_mid = b.mid().get_exp().unwrap_or(0) as f64;
        let e_rad = b.rad().log2_estimate();
        let good_bits = e_mid - e_rad;
        let good = (good_bits * std::f64::consts::LOG10_2).floor() as i64;
        good.clamp(0, max_digits as i64) as usize
    };
    if digits == 0 {
        // Not even the leading digit is certain: print a pure-radius bound.
        return format!("[± {}]", mag_decimal_upper(&b.ub_abs()));
    }
    let mid_str = float_decimal(b.mid(), digits);
    if b.rad().is_zero() {
        format!("[{} ± 0]", mid_str)
    } else {
        format!("[{} ± {}]", mid_str, mag_decimal_upper(&b.rad()))
    }
}

/// Renders a complex ball; a ball with identically zero imaginary part
/// prints as a real ball.
pub fn complex_to_decimal(z: &ComplexBall, max_digits: usize) -> String {
    if z.im().is_exact_zero() {
        return real_to_decimal(z.re(), max_digits);
    }
    format!(
        "{} + {}*I",
        real_to_decimal(z.re(), max_digits),
        real_to_decimal(z.im(), max_digits)
    )
}

/// Correctly rounded decimal form of a float with `digits` significant
/// digits, rendered positionally for moderate exponents.
fn float_decimal(f: &Float, digits: usize) -> String {
    let digits = digits.max(1);
    let s = f.to_string_radix_round(10, Some(digits), Round::Nearest);
    // rug emits either a positional string ("-1500.00", "3.1415927") or
    // scientific "d.ddde±k" with value d.ddd * 10^k.
    let (mantissa, e10) = match s.split_once('e') {
        Some((m, e)) => {
            let e: i64 = e.parse().unwrap_or(0);
            (m.to_string(), e)
        }
        None => {
            let before_point = match s.find('.') {
                Some(idx) => idx as i64 - if s.starts_with('-') { 1 } else { 0 },
                None => s.trim_start_matches('-').len() as i64,
            };
            (s, before_point - 1)
        }
    };
    let neg = mantissa.starts_with('-');
    let sign = if neg { "-" } else { "" };
    let all_digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits_only: &str = &all_digits;
    if digits_only.chars().all(|c| c == '0') {
        return "0".to_string();
    }
    let n = digits_only.len() as i64;
    // Value = 0.<digits_only> * 10^(e10 + 1); point_pos digits precede the
    // decimal point in positional form.
    let point_pos = e10 + 1;
    if (0..=21).contains(&point_pos) || (point_pos < 0 && point_pos > -4) {
        if point_pos >= n {
            format!(
                "{}{}{}",
                sign,
                digits_only,
                "0".repeat((point_pos - n) as usize)
            )
        } else if point_pos >= 1 {
            format!(
                "{}{}.{}",
                sign,
                &digits_only[..point_pos as usize],
                &digits_only[point_pos as usize..]
            )
        } else {
            format!("{}0.{}{}", sign, "0".repeat((-point_pos) as usize), digits_only)
        }
    } else {
        let head = &digits_only[..1];
        let tail = &digits_only[1..];
        if tail.is_empty() {
            format!("{}{}e{}", sign, head, e10)
        } else {
            format!("{}{}.{}e{}", sign, head, tail, e10)
        }
    }
}

/// Three-significant-digit decimal upper bound of a magnitude.
fn mag_decimal_upper(m: &super::mag::Mag) -> String {
    if m.is_zero() {
        return "0".to_string();
    }
    if m.is_inf() {
        return "inf".to_string();
    }
    // Round the 3-digit decimal mantissa upward so the printed radius is
    // still an upper bound.
    let f = m.to_float();
    f.to_string_radix_round(10, Some(3), Round::Up)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Mag, Precision};

    #[test]
    fn prints_positional_and_scientific() {
        let p = Precision::new(64).unwrap();
        let mut b = RealBall::from_f64(-13.7772161934928, p);
        b.add_error(Mag::from_f64_upper(6.4e-13));
        let s = real_to_decimal(&b, 26);
        assert!(s.starts_with("[-13.7772161934"), "{}", s);
        assert!(s.contains('±'), "{}", s);

        let mut tiny = RealBall::zero(p);
        tiny.add_error(Mag::from_f64_upper(3.51e-26));
        let s = real_to_decimal(&tiny, 10);
        assert!(s.starts_with("[± 3.5"), "{}", s);
        assert!(s.contains("e-26"), "{}", s);
    }

    #[test]
    fn printed_radius_is_upper_bound() {
        let p = Precision::new(53).unwrap();
        // A radius wider than the leading digit collapses to a pure bound,
        // rounded upward: |1.0| + 1/3 prints as 1.34.
        let mut b = RealBall::from_f64(1.0, p);
        b.add_error(Mag::from_f64_upper(1.0 / 3.0));
        let s = real_to_decimal(&b, 10);
        assert!(s.starts_with("[± 1.34") || s.starts_with("[± 1.35"), "{}", s);

        // A small radius prints rounded up while the midpoint keeps its
        // certified digits.
        let mut b = RealBall::from_f64(1.0, p);
        b.add_error(Mag::from_f64_upper(1.0 / 3.0e9));
        let s = real_to_decimal(&b, 10);
        assert!(s.starts_with("[1.00000000"), "{}", s);
        assert!(s.contains("3.34e-10") || s.contains("3.35e-10"), "{}", s);
    }
}
