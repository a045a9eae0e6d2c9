//! Complex balls: independent real and imaginary midpoint-radius components.

use std::fmt;

use rug::float::Round;
use rug::{Float, Integer};

use super::mag::Mag;
use super::real::RealBall;
use super::Precision;
use crate::error::{Error, Result};

/// What a multivalued operation should do when its argument ball straddles
/// the branch cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnStraddle {
    /// Reject: a silently widened ball is useless downstream.
    Error,
    /// Return a crude enclosure covering both sheets' images. Used inside
    /// iterations whose final value is insensitive to the drift.
    Enclose,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexBall {
    re: RealBall,
    im: RealBall,
}

impl ComplexBall {
    pub fn new(re: RealBall, im: RealBall) -> Self {
        ComplexBall { re, im }
    }

    pub fn from_real(re: RealBall, p: Precision) -> Self {
        ComplexBall {
            re,
            im: RealBall::zero(p),
        }
    }

    pub fn from_i64(re: i64, p: Precision) -> Self {
        ComplexBall {
            re: RealBall::from_i64(re, p),
            im: RealBall::zero(p),
        }
    }

    pub fn from_f64(re: f64, im: f64, p: Precision) -> Self {
        ComplexBall {
            re: RealBall::from_f64(re, p),
            im: RealBall::from_f64(im, p),
        }
    }

    pub fn zero(p: Precision) -> Self {
        ComplexBall {
            re: RealBall::zero(p),
            im: RealBall::zero(p),
        }
    }

    pub fn one(p: Precision) -> Self {
        ComplexBall::from_i64(1, p)
    }

    /// The imaginary unit.
    pub fn i(p: Precision) -> Self {
        ComplexBall {
            re: RealBall::zero(p),
            im: RealBall::from_i64(1, p),
        }
    }

    pub fn re(&self) -> &RealBall {
        &self.re
    }

    pub fn im(&self) -> &RealBall {
        &self.im
    }

    pub fn into_parts(self) -> (RealBall, RealBall) {
        (self.re, self.im)
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_exact_zero() && self.im.is_exact_zero()
    }

    /// True if the box contains the origin.
    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    /// True if the imaginary part is identically zero (exact real ball).
    pub fn is_real(&self) -> bool {
        self.im.is_exact_zero()
    }

    /// Midpoint as `f64` pair (heuristic use only).
    pub fn mid_f64(&self) -> (f64, f64) {
        (self.re.mid().to_f64(), self.im.mid().to_f64())
    }

    /// Upper bound of `|z|` over the ball.
    pub fn ub_abs(&self) -> Mag {
        let a = self.re.ub_abs();
        let b = self.im.ub_abs();
        // |z| <= sqrt(a^2+b^2) <= max*sqrt(2) <= max * 1.4142135624...
        let m = a.max(&b);
        let sqrt2 = Mag::from_f64_upper(std::f64::consts::SQRT_2 * (1.0 + 1e-12));
        m.mul_up(&sqrt2)
    }

    /// Lower bound of `|z|` over the ball (0 if the ball may contain 0).
    pub fn lb_abs(&self) -> Mag {
        // |z| >= max(|re|, |im|) pointwise on midpoints minus radii.
        self.re.lb_abs().max(&self.im.lb_abs())
    }

    /// Upper bound of the distance from the midpoint to any point of the
    /// ball: `rad_re + rad_im` over-bounds `sqrt(rad_re^2 + rad_im^2)`.
    pub fn rad_dist_ub(&self) -> Mag {
        self.re.rad().add_up(&self.im.rad())
    }

    pub fn add_error_both(&mut self, err: Mag) {
        self.re.add_error(err);
        self.im.add_error(err);
    }

    pub fn neg(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn conj(&self) -> ComplexBall {
        ComplexBall {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// Multiplication by `i` (exact component swap).
    pub fn mul_i(&self) -> ComplexBall {
        ComplexBall {
            re: self.im.neg(),
            im: self.re.clone(),
        }
    }

    pub fn mul_2exp(&self, e: i64) -> ComplexBall {
        ComplexBall {
            re: self.re.mul_2exp(e),
            im: self.im.mul_2exp(e),
        }
    }

    pub fn add(&self, other: &ComplexBall, p: Precision) -> ComplexBall {
        ComplexBall {
            re: self.re.add(&other.re, p),
            im: self.im.add(&other.im, p),
        }
    }

    pub fn sub(&self, other: &ComplexBall, p: Precision) -> ComplexBall {
        ComplexBall {
            re: self.re.sub(&other.re, p),
            im: self.im.sub(&other.im, p),
        }
    }

    pub fn add_real(&self, other: &RealBall, p: Precision) -> ComplexBall {
        ComplexBall {
            re: self.re.add(other, p),
            im: self.im.clone(),
        }
    }

    pub fn mul(&self, other: &ComplexBall, p: Precision) -> ComplexBall {
        let ac = self.re.mul(&other.re, p);
        let bd = self.im.mul(&other.im, p);
        let ad = self.re.mul(&other.im, p);
        let bc = self.im.mul(&other.re, p);
        ComplexBall {
            re: ac.sub(&bd, p),
            im: ad.add(&bc, p),
        }
    }

    pub fn mul_real(&self, other: &RealBall, p: Precision) -> ComplexBall {
        ComplexBall {
            re: self.re.mul(other, p),
            im: self.im.mul(other, p),
        }
    }

    pub fn mul_integer(&self, k: &Integer, p: Precision) -> ComplexBall {
        ComplexBall {
            re: self.re.mul_integer(k, p),
            im: self.im.mul_integer(k, p),
        }
    }

    pub fn div_integer(&self, k: &Integer, p: Precision) -> Result<ComplexBall> {
        Ok(ComplexBall {
            re: self.re.div_integer(k, p)?,
            im: self.im.div_integer(k, p)?,
        })
    }

    pub fn mul_i64(&self, k: i64, p: Precision) -> ComplexBall {
        self.mul_integer(&Integer::from(k), p)
    }

    pub fn div_i64(&self, k: i64, p: Precision) -> Result<ComplexBall> {
        self.div_integer(&Integer::from(k), p)
    }

    /// Squaring (three real multiplications).
    pub fn sqr(&self, p: Precision) -> ComplexBall {
        let aa = self.re.mul(&self.re, p);
        let bb = self.im.mul(&self.im, p);
        let ab = self.re.mul(&self.im, p);
        ComplexBall {
            re: aa.sub(&bb, p),
            im: ab.mul_2exp(1),
        }
    }

    /// `|z|^2` as a real ball (clamped nonnegative is not needed: the
    /// enclosure may dip below zero, callers use `sqrt_nonneg_clamped`).
    pub fn abs_sqr(&self, p: Precision) -> RealBall {
        let aa = self.re.mul(&self.re, p);
        let bb = self.im.mul(&self.im, p);
        aa.add(&bb, p)
    }

    /// Enclosure of `|z|`.
    pub fn abs(&self, p: Precision) -> Result<RealBall> {
        self.abs_sqr(p).sqrt_nonneg_clamped(p)
    }

    pub fn div(&self, other: &ComplexBall, p: Precision) -> Result<ComplexBall> {
        let den = other.abs_sqr(p);
        if den.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let num = self.mul(&other.conj(), p);
        Ok(ComplexBall {
            re: num.re.div(&den, p)?,
            im: num.im.div(&den, p)?,
        })
    }

    pub fn inv(&self, p: Precision) -> Result<ComplexBall> {
        ComplexBall::one(p).div(self, p)
    }

    /// Integer power by binary exponentiation.
    pub fn pow_int(&self, n: i64, p: Precision) -> Result<ComplexBall> {
        if n == 0 {
            return Ok(ComplexBall::one(p));
        }
        let mut e = n.unsigned_abs();
        let mut base = self.clone();
        let mut acc: Option<ComplexBall> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base, p),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.sqr(p);
        }
        let v = acc.expect("n != 0");
        if n < 0 {
            v.inv(p)
        } else {
            Ok(v)
        }
    }

    /// True if the box straddles the branch cut `(-inf, 0)`.
    fn straddles_negative_axis(&self) -> bool {
        let re_reaches_negative = if self.re.mid().is_sign_negative() && !self.re.mid().is_zero() {
            true
        } else {
            // midpoint >= 0: negative points iff rad > mid
            self.re.contains_zero() && !self.re.rad().is_zero()
        };
        let im_spans_zero = self.im.contains_zero() && !self.im.is_exact_zero();
        re_reaches_negative && im_spans_zero
    }

    /// Principal square root.
    ///
    /// With [`OnStraddle::Error`], a ball containing the branch point or
    /// straddling the cut is rejected; with [`OnStraddle::Enclose`] a crude
    /// enclosure of the principal image is returned instead.
    pub fn sqrt(&self, p: Precision, mode: OnStraddle) -> Result<ComplexBall> {
        if self.is_exact_zero() {
            return Ok(ComplexBall::zero(p));
        }
        let needs_widening = self.contains_zero() || self.straddles_negative_axis();
        if needs_widening {
            return match mode {
                OnStraddle::Error => Err(Error::IndeterminateBranch(
                    "sqrt of a ball containing the branch point or straddling the cut",
                )),
                OnStraddle::Enclose => {
                    // The principal image lies in the closed right half
                    // plane with modulus at most sqrt(ub|z|).
                    let r = mag_sqrt_upper(&self.ub_abs());
                    let mut b = ComplexBall::zero(p);
                    b.re.add_error(r);
                    b.im.add_error(r);
                    Ok(b)
                }
            };
        }
        let wp = Precision::raw(p.bits() + 16);
        let exact = self.exact_mid(wp);
        let root = exact.sqrt_exact_point(wp)?;
        // Lipschitz bound over the convex box avoiding the cut:
        // |sqrt(z) - sqrt(m)| <= |z - m| / (2 sqrt(min|.|))
        let lo = self.lb_abs();
        let lip = self.rad_dist_ub().div_up(&mag_sqrt_lower_mag(&lo).mul_2exp(1));
        let mut out = root.round(p);
        out.add_error_both(lip);
        Ok(out)
    }

    /// Stable principal square root of an exact midpoint (both components
    /// exact balls).
    fn sqrt_exact_point(&self, p: Precision) -> Result<ComplexBall> {
        let a = &self.re;
        let b = &self.im;
        if b.is_exact_zero() && !a.mid().is_sign_negative() {
            return Ok(ComplexBall {
                re: a.sqrt(p)?,
                im: RealBall::zero(p),
            });
        }
        let r = self.abs_sqr(p).sqrt_nonneg_clamped(p)?;
        // u = sqrt((r + |a|)/2) has no cancellation; the other component is
        // |b| / (2u).
        let u = r.add(&a.abs(), p).mul_2exp(-1).sqrt(p)?;
        let w = b.abs().div(&u.mul_2exp(1), p)?;
        let b_nonneg = !b.mid().is_sign_negative();
        if !a.mid().is_sign_negative() {
            Ok(ComplexBall {
                re: u,
                im: if b_nonneg { w } else { w.neg() },
            })
        } else {
            Ok(ComplexBall {
                re: w,
                im: if b_nonneg { u } else { u.neg() },
            })
        }
    }

    /// Principal natural logarithm. Rejects balls touching the cut.
    pub fn ln(&self, p: Precision) -> Result<ComplexBall> {
        if self.contains_zero() || self.straddles_negative_axis() {
            return Err(Error::IndeterminateBranch(
                "log of a ball containing the branch point or straddling the cut",
            ));
        }
        let wp = Precision::raw(p.bits() + 16);
        let exact = self.exact_mid(wp);
        let abs2 = exact.abs_sqr(wp);
        let re = abs2.ln(wp)?.mul_2exp(-1);
        let (im_mid, ord) = Float::with_val_round(
            wp.bits(),
            exact.im.mid().atan2_ref(exact.re.mid()),
            Round::Nearest,
        );
        let mut im = RealBall::new(im_mid, Mag::ZERO);
        im.add_error(round_err_pub(im.mid(), ord, wp.bits()));
        // |log z - log m| <= |z - m| / min|.|
        let lip = self.rad_dist_ub().div_up(&self.lb_abs());
        let mut out = ComplexBall { re, im }.round(p);
        out.add_error_both(lip);
        Ok(out)
    }

    /// Principal inverse tangent via `atan(z) = (i/2)[ln(1-iz) - ln(1+iz)]`.
    pub fn atan(&self, p: Precision) -> Result<ComplexBall> {
        let wp = Precision::raw(p.bits() + 16);
        let one = ComplexBall::one(wp);
        let iz = self.mul_i();
        let a = one.sub(&iz, wp).ln(wp)?;
        let b = one.add(&iz, wp).ln(wp)?;
        Ok(a.sub(&b, wp).mul_i().mul_2exp(-1).round(p))
    }

    /// Ball with the same midpoint (rounded to `p`) and zero radius.
    pub fn exact_mid(&self, p: Precision) -> ComplexBall {
        let (re, ore) = Float::with_val_round(p.bits(), self.re.mid(), Round::Nearest);
        let (im, oim) = Float::with_val_round(p.bits(), self.im.mid(), Round::Nearest);
        let mut out = ComplexBall {
            re: RealBall::new(re, Mag::ZERO),
            im: RealBall::new(im, Mag::ZERO),
        };
        let ere = round_err_pub(out.re.mid(), ore, p.bits());
        let eim = round_err_pub(out.im.mid(), oim, p.bits());
        out.re.add_error(ere);
        out.im.add_error(eim);
        out
    }

    /// Rounds the midpoints to precision `p`, keeping containment.
    pub fn round(&self, p: Precision) -> ComplexBall {
        let (re, ore) = Float::with_val_round(p.bits(), self.re.mid(), Round::Nearest);
        let (im, oim) = Float::with_val_round(p.bits(), self.im.mid(), Round::Nearest);
        let mut rre = self.re.rad();
        let mut rim = self.im.rad();
        rre = rre.add_up(&round_err_pub(&re, ore, p.bits()));
        rim = rim.add_up(&round_err_pub(&im, oim, p.bits()));
        ComplexBall {
            re: RealBall::new(re, rre),
            im: RealBall::new(im, rim),
        }
    }

    /// True if the exact point `re + im*i` lies in the ball.
    pub fn contains_floats(&self, re: &Float, im: &Float) -> bool {
        self.re.contains_float(re) && self.im.contains_float(im)
    }

    pub fn overlaps(&self, other: &ComplexBall) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains_ball(&self, other: &ComplexBall) -> bool {
        self.re.contains_ball(&other.re) && self.im.contains_ball(&other.im)
    }

    /// Exact serialization; see [`RealBall::dump`].
    pub fn dump(&self) -> String {
        format!("{}|{}", self.re.dump(), self.im.dump())
    }

    pub fn from_dump(s: &str) -> Result<ComplexBall> {
        let (re, im) = s
            .split_once('|')
            .ok_or(Error::InvalidArgument("malformed complex dump"))?;
        Ok(ComplexBall {
            re: RealBall::from_dump(re)?,
            im: RealBall::from_dump(im)?,
        })
    }
}

/// Re-export of the rounding-error helper for sibling modules.
pub(crate) fn round_err_pub(f: &Float, ord: std::cmp::Ordering, p: u32) -> Mag {
    if ord == std::cmp::Ordering::Equal {
        return Mag::ZERO;
    }
    match f.get_exp() {
        Some(e) => Mag::two_exp(e as i64 - p as i64),
        None => Mag::two_exp(-(p as i64) * 4),
    }
}

fn mag_sqrt_upper(m: &Mag) -> Mag {
    if m.is_inf() {
        return Mag::INF;
    }
    let (s, _) = Float::with_val_round(64, m.to_float().sqrt_ref(), Round::Up);
    Mag::from_float_upper(&s)
}

fn mag_sqrt_lower_mag(m: &Mag) -> Mag {
    if m.is_zero() {
        return Mag::ZERO;
    }
    let (s, _) = Float::with_val_round(64, m.to_float().sqrt_ref(), Round::Down);
    Mag::from_float_lower(&s)
}

impl fmt::Display for ComplexBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::fmt::complex_to_decimal(self, 20))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn cb(re: f64, im: f64) -> ComplexBall {
        ComplexBall::from_f64(re, im, p(64))
    }

    #[test]
    fn sqrt_principal_branch() {
        let s = cb(4.0, 0.0).sqrt(p(64), OnStraddle::Error).unwrap();
        assert!(s.re.contains_float(&Float::with_val(64, 2)));
        assert!(s.im.is_exact_zero() || s.im.contains_zero());

        // sqrt(-4 + 0i) = 2i on the principal branch (approach from above)
        let s = cb(-4.0, 0.0).sqrt(p(64), OnStraddle::Error).unwrap();
        assert!(s.im.contains_float(&Float::with_val(64, 2)));
        assert!(s.re.contains_zero());

        // (1+2i)^2 = -3+4i
        let s = cb(-3.0, 4.0).sqrt(p(64), OnStraddle::Error).unwrap();
        assert!(s.contains_floats(&Float::with_val(64, 1), &Float::with_val(64, 2)));
    }

    #[test]
    fn sqrt_straddle_modes() {
        let mut z = cb(-1.0, 0.0);
        z.im.add_error(Mag::from_f64_upper(0.25));
        assert!(z.sqrt(p(64), OnStraddle::Error).is_err());
        let e = z.sqrt(p(64), OnStraddle::Enclose).unwrap();
        // Both sheet images +-i must be inside.
        assert!(e.contains_floats(&Float::with_val(64, 0), &Float::with_val(64, 1)));
    }

    #[test]
    fn ln_and_atan_identities() {
        let z = cb(2.0, 1.0);
        let l = z.ln(p(96)).unwrap();
        // exp(ln z) = z checked loosely through |ln z| parts
        let half_ln5 = Float::with_val(128, 5).ln() / 2u32;
        assert!(l.re.contains_float(&Float::with_val(128, half_ln5)));

        let a = cb(1.0, 0.0).atan(p(96)).unwrap();
        let pi4 = Float::with_val(128, rug::float::Constant::Pi) / 4u32;
        assert!(a.re.contains_float(&pi4));
    }

    #[test]
    fn pow_int_matches_repeated_mul() {
        let z = cb(1.25, -0.75);
        let p5 = z.pow_int(5, p(64)).unwrap();
        let mut m = z.clone();
        for _ in 0..4 {
            m = m.mul(&z, p(64));
        }
        assert!(p5.overlaps(&m));
        let inv = z.pow_int(-2, p(64)).unwrap();
        let direct = z.sqr(p(64)).inv(p(64)).unwrap();
        assert!(inv.overlaps(&direct));
    }
}
