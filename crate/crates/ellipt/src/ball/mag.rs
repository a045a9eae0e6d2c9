//! Unsigned magnitude bounds with a 32-bit mantissa, used as ball radii.
//!
//! A `Mag` stores `man * 2^exp` with `man` normalized to `[2^31, 2^32)`.
//! All arithmetic rounds in a direction stated by the operation name, so a
//! chain of `_up` operations on upper bounds stays an upper bound. This is
//! the cheap companion format to the full-precision midpoints: radius
//! arithmetic never costs more than a few machine operations.

use rug::Float;

/// Exponent threshold beyond which a magnitude saturates to infinity.
const EXP_HUGE: i64 = i64::MAX / 4;

/// Nonnegative dyadic magnitude `man * 2^exp`, rounded outward on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub const ZERO: Mag = Mag { man: 0, exp: 0 };

    /// The "whole line" magnitude: larger than every finite value.
    pub const INF: Mag = Mag {
        man: u64::MAX,
        exp: i64::MAX,
    };

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    #[inline]
    pub fn is_inf(&self) -> bool {
        self.exp == i64::MAX
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        !self.is_inf()
    }

    /// Normalizes `man * 2^exp`, rounding the mantissa upward.
    fn norm_up(mut man: u128, mut exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        while man >= 1u128 << 32 {
            man = (man + 1) >> 1;
            exp += 1;
        }
        while man < 1u128 << 31 {
            man <<= 1;
            exp -= 1;
        }
        if exp >= EXP_HUGE {
            return Mag::INF;
        }
        Mag {
            man: man as u64,
            exp,
        }
    }

    /// Normalizes rounding the mantissa downward (for lower bounds).
    fn norm_down(mut man: u128, mut exp: i64) -> Mag {
        if man == 0 {
            return Mag::ZERO;
        }
        while man >= 1u128 << 32 {
            man >>= 1;
            exp += 1;
        }
        while man < 1u128 << 31 {
            man <<= 1;
            exp -= 1;
        }
        if exp >= EXP_HUGE {
            return Mag::INF;
        }
        Mag {
            man: man as u64,
            exp,
        }
    }

    /// Exact power of two `2^e`.
    pub fn two_exp(e: i64) -> Mag {
        Mag {
            man: 1 << 31,
            exp: e - 31,
        }
    }

    /// Upper bound for the integer `v`.
    pub fn from_u64(v: u64) -> Mag {
        Mag::norm_up(v as u128, 0)
    }

    /// Upper bound for `|x|`.
    pub fn from_f64_upper(x: f64) -> Mag {
        let x = x.abs();
        if x == 0.0 {
            return Mag::ZERO;
        }
        if !x.is_finite() {
            return Mag::INF;
        }
        // f64 has 53 mantissa bits; decompose exactly, then round up to 32.
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (man, exp) = if raw_exp == 0 {
            (frac, -1074i64)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Mag::norm_up(man as u128, exp)
    }

    /// Upper bound for `|f|`.
    pub fn from_float_upper(f: &Float) -> Mag {
        if f.is_zero() {
            return Mag::ZERO;
        }
        if !f.is_finite() {
            return Mag::INF;
        }
        let (int, e) = f.to_integer_exp().expect("finite float");
        let int = int.abs();
        let bits = int.significant_bits() as i64;
        if bits <= 32 {
            Mag::norm_up(int.to_u128().unwrap(), e as i64)
        } else {
            let shift = (bits - 32) as u32;
            let top = int.clone() >> shift;
            let exact = (top.clone() << shift) == int;
            let mut man = top.to_u128().unwrap();
            if !exact {
                man += 1;
            }
            Mag::norm_up(man, e as i64 + shift as i64)
        }
    }

    /// Lower bound for `|f|`.
    pub fn from_float_lower(f: &Float) -> Mag {
        if f.is_zero() || !f.is_finite() {
            // NaN/inf lower bound conservatively zero.
            if f.is_infinite() {
                return Mag::INF;
            }
            return Mag::ZERO;
        }
        let (int, e) = f.to_integer_exp().expect("finite float");
        let int = int.abs();
        let bits = int.significant_bits() as i64;
        if bits <= 32 {
            Mag::norm_down(int.to_u128().unwrap(), e as i64)
        } else {
            let shift = (bits - 32) as u32;
            let top = int >> shift;
            Mag::norm_down(top.to_u128().unwrap(), e as i64 + shift as i64)
        }
    }

    /// Upper-bound conversion to `f64` (may overflow to infinity).
    pub fn to_f64_upper(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        if self.is_inf() || self.exp > 1000 {
            return f64::INFINITY;
        }
        if self.exp < -1100 {
            // Round tiny values up to a representable bound.
            return f64::MIN_POSITIVE;
        }
        // man has <= 32 bits, exactly representable; the scaling by a power
        // of two is exact within range.
        (self.man as f64) * (self.exp as f64).exp2()
    }

    /// `log2` upper estimate (heuristic, for tuning decisions only).
    pub fn log2_estimate(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        if self.is_inf() {
            return f64::INFINITY;
        }
        (self.man as f64).log2() + self.exp as f64
    }

    /// Exact conversion to an MPFR float (64-bit precision suffices).
    pub fn to_float(&self) -> Float {
        if self.is_zero() {
            return Float::new(64);
        }
        if self.is_inf() {
            return Float::with_val(64, rug::float::Special::Infinity);
        }
        let mut f = Float::with_val(64, self.man);
        f <<= self.exp as i32;
        f
    }

    /// Upper bound of `a + b`.
    pub fn add_up(&self, other: &Mag) -> Mag {
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let d = hi.exp - lo.exp;
        if d > 34 {
            // The low part is below one ulp of the high part.
            return Mag::norm_up(hi.man as u128 + 1, hi.exp);
        }
        let sum = ((hi.man as u128) << d as u32) + lo.man as u128 + 1;
        Mag::norm_up(sum, lo.exp)
    }

    /// Upper bound of `a * b`.
    pub fn mul_up(&self, other: &Mag) -> Mag {
        if self.is_zero() || other.is_zero() {
            return Mag::ZERO;
        }
        if self.is_inf() || other.is_inf() {
            return Mag::INF;
        }
        let p = self.man as u128 * other.man as u128;
        Mag::norm_up(p, self.exp.saturating_add(other.exp))
    }

    /// Upper bound of `a / b` where `b` must be a lower bound of the divisor.
    pub fn div_up(&self, divisor_lower: &Mag) -> Mag {
        if divisor_lower.is_zero() {
            return Mag::INF;
        }
        if divisor_lower.is_inf() {
            return Mag::ZERO;
        }
        if self.is_zero() {
            return Mag::ZERO;
        }
        if self.is_inf() {
            return Mag::INF;
        }
        let num = (self.man as u128) << 32;
        let den = divisor_lower.man as u128;
        let q = (num + den - 1) / den;
        Mag::norm_up(q, self.exp - divisor_lower.exp - 32)
    }

    /// Lower bound of `a - b` (clamped at zero); `a` must be a lower bound
    /// and `b` an upper bound for the result to be a valid lower bound.
    pub fn sub_down(&self, other: &Mag) -> Mag {
        if other.is_inf() || self.is_zero() {
            return Mag::ZERO;
        }
        if other.is_zero() {
            return *self;
        }
        if self.is_inf() {
            return Mag::INF;
        }
        let e = self.exp.min(other.exp);
        let shift_a = self.exp - e;
        let shift_b = other.exp - e;
        if shift_b > 64 {
            // b dominates a by far.
            return Mag::ZERO;
        }
        if shift_a > 64 {
            // b is below one ulp of a; dropping one mantissa unit covers it.
            return Mag::norm_down(self.man as u128 - 1, self.exp);
        }
        let am = (self.man as i128) << shift_a as u32;
        let bm = (other.man as i128) << shift_b as u32;
        let diff = am - bm;
        if diff <= 0 {
            return Mag::ZERO;
        }
        Mag::norm_down(diff as u128, e)
    }

    /// Upper bound of `a^n`.
    pub fn pow_up(&self, mut n: u64) -> Mag {
        let mut result = Mag::two_exp(0);
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_up(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_up(&base);
            }
        }
        result
    }

    /// Doubles the magnitude (exact).
    pub fn mul_2exp(&self, e: i64) -> Mag {
        if self.is_zero() || self.is_inf() {
            return *self;
        }
        let exp = self.exp.saturating_add(e);
        if exp >= EXP_HUGE {
            return Mag::INF;
        }
        Mag { man: self.man, exp }
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.ge(other) {
            *self
        } else {
            *other
        }
    }

    /// `self >= other` as exact dyadic comparison.
    pub fn ge(&self, other: &Mag) -> bool {
        if other.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        if self.is_inf() {
            return true;
        }
        if other.is_inf() {
            return false;
        }
        if self.exp != other.exp {
            return self.exp > other.exp;
        }
        self.man >= other.man
    }

    pub fn le(&self, other: &Mag) -> bool {
        other.ge(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_is_upper_bound() {
        let a = Mag::from_f64_upper(1.25);
        let b = Mag::from_f64_upper(3.875e-5);
        let s = a.add_up(&b);
        assert!(s.to_f64_upper() >= 1.25 + 3.875e-5);
        assert!(s.to_f64_upper() <= (1.25 + 3.875e-5) * 1.0001);
    }

    #[test]
    fn mul_and_pow_round_up() {
        let a = Mag::from_f64_upper(3.0);
        let p = a.pow_up(5);
        assert!(p.to_f64_upper() >= 243.0);
        assert!(p.to_f64_upper() <= 243.0 * 1.0001);
        let t = Mag::two_exp(-10).mul_up(&Mag::two_exp(7));
        assert_eq!(t, Mag::two_exp(-3));
    }

    #[test]
    fn div_sub_directions() {
        let one = Mag::two_exp(0);
        let three = Mag::from_u64(3);
        let q = one.div_up(&three);
        assert!(q.to_f64_upper() >= 1.0 / 3.0);
        assert!(q.to_f64_upper() <= 1.0 / 3.0 * 1.0001);

        let a = Mag::from_f64_upper(2.0);
        let b = Mag::from_f64_upper(0.75);
        let d = a.sub_down(&b);
        assert!(d.to_f64_upper() <= 1.25);
        assert!(d.to_f64_upper() >= 1.2499);

        // Subtraction clamps at zero when the bound is not positive.
        assert!(b.sub_down(&a).is_zero());
    }

    #[test]
    fn float_conversions_bracket_value() {
        let f = Float::with_val(200, rug::float::Constant::Pi);
        let up = Mag::from_float_upper(&f);
        let lo = Mag::from_float_lower(&f);
        assert!(up.to_f64_upper() >= 3.14159265358979);
        assert!(lo.to_f64_upper() <= 3.14159265358980);
        assert!(up.ge(&lo));
    }

    #[test]
    fn infinity_saturates() {
        assert!(Mag::INF.add_up(&Mag::ZERO).is_inf());
        assert!(Mag::INF.mul_up(&Mag::two_exp(5)).is_inf());
        assert!(Mag::two_exp(3).div_up(&Mag::ZERO).is_inf());
    }
}
