//! Real midpoint-radius balls over MPFR floats.
//!
//! A `RealBall` represents the set `[mid - rad, mid + rad]`. Midpoints are
//! arbitrary-precision floats computed at the caller's precision; radii live
//! in the cheap [`Mag`] format and are always rounded outward, so every
//! operation encloses the exact image of its input sets.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::NegAssign;
use rug::{Assign, Float, Integer};

use super::mag::Mag;
use super::Precision;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RealBall {
    mid: Float,
    rad: Mag,
}

/// Radius contribution of one rounding at precision `p`.
///
/// Round-to-nearest errs by at most half an ulp; a full ulp is charged to
/// keep the bookkeeping simple.
fn round_err(f: &Float, ord: Ordering, p: u32) -> Mag {
    if ord == Ordering::Equal {
        return Mag::ZERO;
    }
    match f.get_exp() {
        Some(e) => Mag::two_exp(e as i64 - p as i64),
        // Zero/underflow after an inexact rounding: bound by the smallest
        // representable scale of the operation.
        None => Mag::two_exp(-(p as i64) * 4),
    }
}

impl RealBall {
    pub fn new(mid: Float, rad: Mag) -> Self {
        RealBall { mid, rad }
    }

    /// Exact ball (zero radius) from an integer.
    pub fn from_i64(v: i64, p: Precision) -> Self {
        let (mid, ord) = Float::with_val_round(p.bits(), v, Round::Nearest);
        RealBall {
            rad: round_err(&mid, ord, p.bits()),
            mid,
        }
    }

    /// Ball from an `f64`, exact whenever representable at `p` bits.
    pub fn from_f64(v: f64, p: Precision) -> Self {
        let (mid, ord) = Float::with_val_round(p.bits(), v, Round::Nearest);
        RealBall {
            rad: round_err(&mid, ord, p.bits()),
            mid,
        }
    }

    /// Exact ball around a float, keeping its precision.
    pub fn from_float(f: Float) -> Self {
        RealBall {
            mid: f,
            rad: Mag::ZERO,
        }
    }

    pub fn zero(p: Precision) -> Self {
        RealBall {
            mid: Float::new(p.bits()),
            rad: Mag::ZERO,
        }
    }

    /// The constant pi.
    pub fn pi(p: Precision) -> Self {
        let (mid, ord) = Float::with_val_round(p.bits(), Constant::Pi, Round::Nearest);
        RealBall {
            rad: round_err(&mid, ord, p.bits()),
            mid,
        }
    }

    /// log(2), used by exponential argument reduction.
    pub fn ln2(p: Precision) -> Self {
        let (mid, ord) = Float::with_val_round(p.bits(), Constant::Log2, Round::Nearest);
        RealBall {
            rad: round_err(&mid, ord, p.bits()),
            mid,
        }
    }

    pub fn mid(&self) -> &Float {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    /// Enlarges the radius.
    pub fn add_error(&mut self, err: Mag) {
        self.rad = self.rad.add_up(&err);
    }

    /// Upper bound of `|x|` over the ball.
    pub fn ub_abs(&self) -> Mag {
        Mag::from_float_upper(&self.mid).add_up(&self.rad)
    }

    /// Lower bound of `|x|` over the ball (zero if the ball contains zero).
    pub fn lb_abs(&self) -> Mag {
        Mag::from_float_lower(&self.mid).sub_down(&self.rad)
    }

    pub fn contains_zero(&self) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        let r = self.rad.to_float();
        self.mid.clone().abs() <= r
    }

    pub fn is_exact_zero(&self) -> bool {
        self.mid.is_zero() && self.rad.is_zero()
    }

    /// True if every point of the ball is strictly positive.
    pub fn definitely_positive(&self) -> bool {
        self.mid.is_sign_positive()
            && !self.mid.is_zero()
            && self.rad.is_finite()
            && self.mid > self.rad.to_float()
    }

    pub fn definitely_negative(&self) -> bool {
        let mut m = self.mid.clone();
        m.neg_assign();
        self.mid.is_sign_negative()
            && !self.mid.is_zero()
            && self.rad.is_finite()
            && m > self.rad.to_float()
    }

    /// True if the exact point `x` lies in the ball.
    pub fn contains_float(&self, x: &Float) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        let prec = self.mid.prec().max(x.prec()) + 64;
        let (d, ord) = Float::with_val_round(prec, &self.mid - x, Round::Nearest);
        let mut du = Mag::from_float_upper(&d);
        du = du.add_up(&round_err(&d, ord, prec));
        du.le(&self.rad)
    }

    /// True if the two balls intersect.
    pub fn overlaps(&self, other: &RealBall) -> bool {
        if self.rad.is_inf() || other.rad.is_inf() {
            return true;
        }
        let prec = self.mid.prec().max(other.mid.prec()) + 64;
        let (d, ord) = Float::with_val_round(prec, &self.mid - &other.mid, Round::Nearest);
        let mut du = Mag::from_float_lower(&d);
        if ord != Ordering::Equal {
            du = du.sub_down(&round_err(&d, ord, prec));
        }
        du.le(&self.rad.add_up(&other.rad))
    }

    /// True if `other` is contained in `self`.
    pub fn contains_ball(&self, other: &RealBall) -> bool {
        if self.rad.is_inf() {
            return true;
        }
        if other.rad.is_inf() {
            return false;
        }
        let prec = self.mid.prec().max(other.mid.prec()) + 64;
        let (d, ord) = Float::with_val_round(prec, &self.mid - &other.mid, Round::Nearest);
        let mut du = Mag::from_float_upper(&d);
        du = du.add_up(&round_err(&d, ord, prec));
        du.add_up(&other.rad).le(&self.rad)
    }

    pub fn neg(&self) -> RealBall {
        let mut mid = self.mid.clone();
        mid.neg_assign();
        RealBall { mid, rad: self.rad }
    }

    /// Rounds the midpoint to precision `p`, charging the rounding to the
    /// radius.
    pub fn round(&self, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid, Round::Nearest);
        let rad = self.rad.add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    pub fn abs(&self) -> RealBall {
        RealBall {
            mid: self.mid.clone().abs(),
            rad: self.rad,
        }
    }

    /// Exact scaling by a power of two.
    pub fn mul_2exp(&self, e: i64) -> RealBall {
        let mut mid = self.mid.clone();
        mid <<= e as i32;
        RealBall {
            mid,
            rad: self.rad.mul_2exp(e),
        }
    }

    pub fn add(&self, other: &RealBall, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid + &other.mid, Round::Nearest);
        let rad = self
            .rad
            .add_up(&other.rad)
            .add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    pub fn sub(&self, other: &RealBall, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid - &other.mid, Round::Nearest);
        let rad = self
            .rad
            .add_up(&other.rad)
            .add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    pub fn mul(&self, other: &RealBall, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid * &other.mid, Round::Nearest);
        let ua = Mag::from_float_upper(&self.mid);
        let ub = Mag::from_float_upper(&other.mid);
        let rad = ua
            .mul_up(&other.rad)
            .add_up(&ub.mul_up(&self.rad))
            .add_up(&self.rad.mul_up(&other.rad))
            .add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    /// Scalar multiplication by an exact integer.
    pub fn mul_integer(&self, k: &Integer, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid * k, Round::Nearest);
        let rad = self
            .rad
            .mul_up(&mag_from_integer_upper(k))
            .add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    /// Scalar division by an exact nonzero integer.
    pub fn div_integer(&self, k: &Integer, p: Precision) -> Result<RealBall> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid / k, Round::Nearest);
        let rad = self
            .rad
            .div_up(&mag_from_integer_lower(k))
            .add_up(&round_err(&mid, ord, p.bits()));
        Ok(RealBall { mid, rad })
    }

    pub fn div(&self, other: &RealBall, p: Precision) -> Result<RealBall> {
        let lb = other.lb_abs();
        if lb.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (mid, ord) = Float::with_val_round(p.bits(), &self.mid / &other.mid, Round::Nearest);
        // |x/y - a/b| <= (ra*|b| + |a|*rb) / ((|b| - rb)*|b|)
        let ua = Mag::from_float_upper(&self.mid);
        let ub = Mag::from_float_upper(&other.mid);
        let lb_mid = Mag::from_float_lower(&other.mid);
        let num = self.rad.mul_up(&ub).add_up(&ua.mul_up(&other.rad));
        let den = mag_mul_down(&lb, &lb_mid);
        let rad = num
            .div_up(&den)
            .add_up(&round_err(&mid, ord, p.bits()));
        Ok(RealBall { mid, rad })
    }

    /// Square root of a nonnegative ball.
    ///
    /// A ball reaching into the negatives contains the branch point and is
    /// rejected.
    pub fn sqrt(&self, p: Precision) -> Result<RealBall> {
        if self.is_exact_zero() {
            return Ok(RealBall::zero(p));
        }
        if self.mid.is_sign_negative() || self.contains_zero() {
            if self.mid.is_zero() && self.rad.is_zero() {
                return Ok(RealBall::zero(p));
            }
            return Err(Error::IndeterminateBranch(
                "real sqrt of a ball touching the negative axis",
            ));
        }
        let (mid, ord) = Float::with_val_round(p.bits(), self.mid.sqrt_ref(), Round::Nearest);
        // |sqrt(x) - sqrt(m)| <= r / (2*sqrt(m - r))
        let lo = Mag::from_float_lower(&self.mid).sub_down(&self.rad);
        let sqrt_lo = mag_sqrt_lower(&lo);
        let rad = self
            .rad
            .div_up(&sqrt_lo.mul_2exp(1))
            .add_up(&round_err(&mid, ord, p.bits()));
        Ok(RealBall { mid, rad })
    }

    /// Square root enclosure of a ball that may touch zero from above:
    /// the negative part (if any) must come only from the radius.
    pub fn sqrt_nonneg_clamped(&self, p: Precision) -> Result<RealBall> {
        if self.definitely_negative() {
            return Err(Error::Domain("sqrt of a negative ball"));
        }
        if !self.contains_zero() && self.mid.is_sign_positive() {
            return self.sqrt(p);
        }
        // Enclose sqrt([0, ub]) by [0, sqrt(ub)].
        let ub = self.ub_abs();
        let s = mag_sqrt_upper(&ub);
        let half = s.mul_2exp(-1);
        let (mid, ord) = Float::with_val_round(p.bits(), half.to_float(), Round::Nearest);
        let rad = half.add_up(&round_err(&mid, ord, p.bits()));
        Ok(RealBall { mid, rad })
    }

    /// Natural logarithm of a strictly positive ball.
    pub fn ln(&self, p: Precision) -> Result<RealBall> {
        if !self.definitely_positive() {
            return Err(Error::IndeterminateBranch(
                "log of a ball touching the branch point",
            ));
        }
        let (mid, ord) = Float::with_val_round(p.bits(), self.mid.ln_ref(), Round::Nearest);
        let lo = Mag::from_float_lower(&self.mid).sub_down(&self.rad);
        let rad = self
            .rad
            .div_up(&lo)
            .add_up(&round_err(&mid, ord, p.bits()));
        Ok(RealBall { mid, rad })
    }

    /// Inverse tangent; |atan'| <= 1 everywhere.
    pub fn atan(&self, p: Precision) -> RealBall {
        let (mid, ord) = Float::with_val_round(p.bits(), self.mid.atan_ref(), Round::Nearest);
        let rad = self.rad.add_up(&round_err(&mid, ord, p.bits()));
        RealBall { mid, rad }
    }

    /// Plain sine and cosine (Lipschitz constant 1).
    pub fn sin_cos(&self, p: Precision) -> (RealBall, RealBall) {
        if self.rad.is_inf() || self.rad.ge(&Mag::two_exp(2)) {
            return (unit_interval_ball(p), unit_interval_ball(p));
        }
        // Evaluate at the midpoint's own precision: assigning into a lower
        // precision first would round the argument without accounting.
        let mp = self.mid.prec().max(p.bits());
        let mut s = Float::with_val(mp, &self.mid);
        let mut c = Float::new(mp);
        let (os, oc) = s.sin_cos_round(&mut c, Round::Nearest);
        let rs = self.rad.add_up(&round_err(&s, os, mp));
        let rc = self.rad.add_up(&round_err(&c, oc, mp));
        (
            RealBall { mid: s, rad: rs }.round(p),
            RealBall { mid: c, rad: rc }.round(p),
        )
    }

    /// Hyperbolic sine and cosine, with derivative bound `cosh(ub|x|)`.
    pub fn sinh_cosh(&self, p: Precision) -> (RealBall, RealBall) {
        let mp = self.mid.prec().max(p.bits());
        let mut s = Float::with_val(mp, &self.mid);
        let mut c = Float::new(mp);
        let (os, oc) = s.sinh_cosh_round(&mut c, Round::Nearest);
        let ub = self.ub_abs().to_float();
        let lip = Mag::from_float_upper(&Float::with_val_round(64, ub.cosh_ref(), Round::Up).0);
        let rr = lip.mul_up(&self.rad);
        (
            RealBall {
                rad: rr.add_up(&round_err(&s, os, mp)),
                mid: s,
            }
            .round(p),
            RealBall {
                rad: rr.add_up(&round_err(&c, oc, mp)),
                mid: c,
            }
            .round(p),
        )
    }

    /// `(sin(pi x), cos(pi x))` with the argument reduced modulo 2 before
    /// any multiplication by pi, so huge arguments lose no accuracy.
    pub fn sin_cos_pi(&self, p: Precision) -> (RealBall, RealBall) {
        if self.rad.is_inf() || self.rad.ge(&Mag::two_exp(1)) {
            return (unit_interval_ball(p), unit_interval_ball(p));
        }
        let wp = Precision::raw(p.bits() + 16);
        // x' = x - 2k, exact: 2k is an integer below x's magnitude.
        let half = Float::with_val(self.mid.prec().max(32), &self.mid) >> 1i32;
        let k2: Integer = match half.to_integer() {
            Some(k) => k << 1,
            None => return (unit_interval_ball(p), unit_interval_ball(p)),
        };
        let span = self.mid.prec() + k2.significant_bits() + 8;
        let (xr, ord) = Float::with_val_round(span, &self.mid - &k2, Round::Nearest);
        debug_assert_eq!(ord, Ordering::Equal);
        let xr = RealBall {
            mid: xr,
            rad: self.rad,
        };
        let t = RealBall::pi(wp).mul(&xr, wp);
        t.sin_cos(p)
    }

    /// Exact dump for test fixtures: sign, mantissa, exponent and radius
    /// round-trip bit for bit.
    pub fn dump(&self) -> String {
        let mid_part = if self.mid.is_zero() {
            "0".to_string()
        } else {
            let (int, e) = self.mid.to_integer_exp().expect("finite midpoint");
            let sign = if int < 0 { "-" } else { "+" };
            format!("{}{:x}p{}", sign, int.clone().abs(), e)
        };
        let rad_part = if self.rad.is_zero() {
            "0".to_string()
        } else if self.rad.is_inf() {
            "inf".to_string()
        } else {
            let f = self.rad.to_float();
            let (int, e) = f.to_integer_exp().expect("finite radius");
            format!("{:x}p{}", int, e)
        };
        format!("b{};{};{}", self.mid.prec(), mid_part, rad_part)
    }

    /// Parses the format produced by [`RealBall::dump`].
    pub fn from_dump(s: &str) -> Result<RealBall> {
        let bad = Error::InvalidArgument("malformed ball dump");
        let rest = s.strip_prefix('b').ok_or(bad.clone())?;
        let mut parts = rest.split(';');
        let prec: u32 = parts.next().ok_or(bad.clone())?.parse().map_err(|_| bad.clone())?;
        let mid_part = parts.next().ok_or(bad.clone())?;
        let rad_part = parts.next().ok_or(bad.clone())?;
        if parts.next().is_some() {
            return Err(bad);
        }
        let mid = if mid_part == "0" {
            Float::new(prec)
        } else {
            let (sign, rest) = match &mid_part[..1] {
                "+" => (1, &mid_part[1..]),
                "-" => (-1, &mid_part[1..]),
                _ => return Err(bad),
            };
            let (man_hex, exp_str) = rest.split_once('p').ok_or(bad.clone())?;
            let man = Integer::from_str_radix(man_hex, 16).map_err(|_| bad.clone())?;
            let e: i64 = exp_str.parse().map_err(|_| bad.clone())?;
            let mut f = Float::with_val(prec, man * sign);
            f <<= e as i32;
            f
        };
        let rad = if rad_part == "0" {
            Mag::ZERO
        } else if rad_part == "inf" {
            Mag::INF
        } else {
            let (man_hex, exp_str) = rad_part.split_once('p').ok_or(bad.clone())?;
            let man = u64::from_str_radix(man_hex, 16).map_err(|_| bad.clone())?;
            let e: i64 = exp_str.parse().map_err(|_| bad)?;
            Mag::from_u64(man).mul_2exp(e)
        };
        Ok(RealBall { mid, rad })
    }
}

/// The ball `[0 ± 1]`.
fn unit_interval_ball(p: Precision) -> RealBall {
    RealBall {
        mid: Float::new(p.bits()),
        rad: Mag::two_exp(0),
    }
}

/// Lower bound of `sqrt(m)` for a magnitude lower bound `m`.
fn mag_sqrt_lower(m: &Mag) -> Mag {
    if m.is_zero() {
        return Mag::ZERO;
    }
    let (s, _) = Float::with_val_round(64, m.to_float().sqrt_ref(), Round::Down);
    Mag::from_float_lower(&s)
}

/// Upper bound of `sqrt(m)` for a magnitude upper bound `m`.
fn mag_sqrt_upper(m: &Mag) -> Mag {
    if m.is_inf() {
        return Mag::INF;
    }
    let (s, _) = Float::with_val_round(64, m.to_float().sqrt_ref(), Round::Up);
    Mag::from_float_upper(&s)
}

/// Lower bound of a product of lower bounds.
fn mag_mul_down(a: &Mag, b: &Mag) -> Mag {
    if a.is_zero() || b.is_zero() {
        return Mag::ZERO;
    }
    let (p, _) = Float::with_val_round(64, a.to_float() * b.to_float(), Round::Down);
    Mag::from_float_lower(&p)
}

pub(crate) fn mag_from_integer_upper(k: &Integer) -> Mag {
    let f = Float::with_val(64 + k.significant_bits().min(64), k);
    Mag::from_float_upper(&f)
}

pub(crate) fn mag_from_integer_lower(k: &Integer) -> Mag {
    let f = Float::with_val(64 + k.significant_bits().min(64), k);
    Mag::from_float_lower(&f)
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::fmt::real_to_decimal(self, 20))
    }
}
