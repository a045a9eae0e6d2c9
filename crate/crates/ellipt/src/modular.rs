//! Modular transformations, fundamental-domain reduction and the classical
//! modular forms built from eta and theta-constant q-series.
//!
//! All series are evaluated only after moving the lattice parameter to the
//! fundamental domain, where `|e^(2 pi i tau)| <= e^(-pi sqrt 3) ~ 0.0043`
//! makes the sparse q-series converge in `O(sqrt p)` terms.

use rug::{Float, Integer};

use crate::ball::eval::{exp_pi_i, geometric_tail_bound, tail_order};
use crate::ball::{ComplexBall, Mag, OnStraddle, Precision, RealBall};
use crate::error::{Error, Result};

/// Slack allowed around the fundamental-domain boundary; balls may overlap
/// the boundary, so exact membership is never required.
pub const EPS_FD: f64 = 1.0 / 65536.0;

/// An element of the modular group, acting as
/// `tau -> (a tau + b) / (c tau + d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModularTransform {
    a: Integer,
    b: Integer,
    c: Integer,
    d: Integer,
}

/// Exact float from an integer (wide enough to never round).
fn float_from_integer(k: &Integer, p: Precision) -> Float {
    Float::with_val(p.bits().max(k.significant_bits() + 1), k)
}

impl ModularTransform {
    /// Builds a transform, checking `ad - bc = 1` and normalizing the
    /// projective sign so that `c > 0`, or `c = 0` and `d > 0`.
    pub fn new(a: Integer, b: Integer, c: Integer, d: Integer) -> Result<ModularTransform> {
        let det = Integer::from(&a * &d) - Integer::from(&b * &c);
        if det != 1 {
            return Err(Error::InvalidArgument("modular transform needs det 1"));
        }
        let mut g = ModularTransform { a, b, c, d };
        let flip = g.c < 0 || (g.c == 0 && g.d < 0);
        if flip {
            g.a = -g.a;
            g.b = -g.b;
            g.c = -g.c;
            g.d = -g.d;
        }
        Ok(g)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<ModularTransform> {
        ModularTransform::new(
            Integer::from(a),
            Integer::from(b),
            Integer::from(c),
            Integer::from(d),
        )
    }

    pub fn identity() -> ModularTransform {
        ModularTransform {
            a: Integer::from(1),
            b: Integer::from(0),
            c: Integer::from(0),
            d: Integer::from(1),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 && self.b == 0 && self.c == 0 && self.d == 1
    }

    pub fn entries(&self) -> (&Integer, &Integer, &Integer, &Integer) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    /// Matrix product `self * other` (so `self` acts after `other`).
    pub fn compose(&self, other: &ModularTransform) -> ModularTransform {
        let a = Integer::from(&self.a * &other.a) + Integer::from(&self.b * &other.c);
        let b = Integer::from(&self.a * &other.b) + Integer::from(&self.b * &other.d);
        let c = Integer::from(&self.c * &other.a) + Integer::from(&self.d * &other.c);
        let d = Integer::from(&self.c * &other.b) + Integer::from(&self.d * &other.d);
        ModularTransform::new(a, b, c, d).expect("product of unimodular matrices")
    }

    pub fn inverse(&self) -> ModularTransform {
        ModularTransform::new(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
        .expect("inverse of unimodular matrix")
    }

    /// `c tau + d` as a ball.
    pub fn c_tau_d(&self, tau: &ComplexBall, p: Precision) -> ComplexBall {
        tau.mul_integer(&self.c, p).add(
            &ComplexBall::from_real(RealBall::from_float(float_from_integer(&self.d, p)), p),
            p,
        )
    }

    /// Applies the transformation in ball arithmetic (a single Moebius
    /// evaluation, never iterated generator by generator).
    pub fn apply(&self, tau: &ComplexBall, p: Precision) -> Result<ComplexBall> {
        let num = tau.mul_integer(&self.a, p).add(
            &ComplexBall::from_real(RealBall::from_float(float_from_integer(&self.b, p)), p),
            p,
        );
        num.div(&self.c_tau_d(tau, p), p)
    }
}

/// A lattice parameter reduced to (within `EPS_FD` of) the fundamental
/// domain, together with the transformation that got it there and the
/// half-period nomes `q = e^(pi i tau')` and `q4 = e^(pi i tau'/4)`.
///
/// Note the convention split: `q` here is the theta-series nome
/// `e^(pi i tau')`; eta-style Fourier series use its square.
#[derive(Debug, Clone)]
pub struct ReducedTau {
    pub tau_prime: ComplexBall,
    pub transform: ModularTransform,
    pub q: ComplexBall,
    pub q4: ComplexBall,
}

fn check_upper_half(tau: &ComplexBall) -> Result<()> {
    if !tau.im().definitely_positive() {
        return Err(Error::Domain(
            "lattice parameter must lie strictly in the upper half plane",
        ));
    }
    Ok(())
}

/// Reduction loop in machine floats; returns `None` when entries or the
/// imaginary part leave the range where f64 is trustworthy.
fn reduce_f64(re0: f64, im0: f64) -> Option<(i64, i64, i64, i64)> {
    const ENTRY_LIMIT: i128 = 1 << 40;
    let (mut re, mut im) = (re0, im0);
    let (mut a, mut b, mut c, mut d) = (1i128, 0i128, 0i128, 1i128);
    let eps = EPS_FD;
    for _ in 0..10_000 {
        if im <= 2.0f64.powi(-30) || !re.is_finite() {
            return None;
        }
        let n = -((re + 0.5).floor());
        if n.abs() > 9.0e17 {
            return None;
        }
        let ni = n as i128;
        re += n;
        a += ni * c;
        b += ni * d;
        if a.abs() >= ENTRY_LIMIT || b.abs() >= ENTRY_LIMIT {
            return None;
        }
        let abs2 = re * re + im * im;
        if abs2 < (1.0 - eps) * (1.0 - eps) {
            let (na, nb) = (-c, -d);
            c = a;
            d = b;
            a = na;
            b = nb;
            re = -re / abs2;
            im /= abs2;
        } else {
            return Some((a as i64, b as i64, c as i64, d as i64));
        }
    }
    None
}

/// Reduction loop in heuristic big floats for tiny `Im(tau)` or large
/// entries; the precision needed scales with `-log2 Im(tau)`, not with the
/// evaluation precision.
fn reduce_bigfloat(tau_re: &Float, tau_im: &Float) -> Result<ModularTransform> {
    let im_log = tau_im.clone().log2().to_f64();
    let mut prec = (64.0 + 2.2 * (-im_log).max(0.0)).ceil() as u32 + 32;
    for _attempt in 0..4 {
        let mut re = Float::with_val(prec, tau_re);
        let mut im = Float::with_val(prec, tau_im);
        let mut a = Integer::from(1);
        let mut b = Integer::from(0);
        let mut c = Integer::from(0);
        let mut d = Integer::from(1);
        let entry_limit = Integer::from(1) << (prec / 2).max(64);
        let mut ok = true;
        let mut done = false;
        let max_iter = 64 + 8 * ((-im_log).max(0.0) as usize + 1);
        for _ in 0..max_iter {
            if !im.is_sign_positive() || im.is_zero() {
                ok = false;
                break;
            }
            let half = Float::with_val(prec, &re + 0.5f64);
            let n = match half.floor().to_integer() {
                Some(n) => -n,
                None => {
                    ok = false;
                    break;
                }
            };
            re += float_from_integer(&n, Precision::raw(prec));
            a += Integer::from(&n * &c);
            b += Integer::from(&n * &d);
            if Integer::from(a.clone().abs()) > entry_limit
                || Integer::from(b.clone().abs()) > entry_limit
            {
                ok = false;
                break;
            }
            let abs2 = Float::with_val(prec, re.clone().square() + im.clone().square());
            if abs2 < 1.0 - EPS_FD {
                let (na, nb) = (-c.clone(), -d.clone());
                c = a;
                d = b;
                a = na;
                b = nb;
                let new_re = Float::with_val(prec, -re.clone() / &abs2);
                im = Float::with_val(prec, &im / &abs2);
                re = new_re;
            } else {
                done = true;
                break;
            }
        }
        if ok && done {
            return ModularTransform::new(a, b, c, d);
        }
        prec *= 2;
    }
    Err(Error::ConvergenceFailure("fundamental domain reduction"))
}

/// Moves `tau` to (within `EPS_FD` of) the fundamental domain.
///
/// The transformation matrix is constructed from the midpoint in heuristic
/// floating point — machine floats while the entries stay below `2^40` and
/// `Im(tau) > 2^-30`, arbitrary precision otherwise — and only then applied
/// once in ball arithmetic.
pub fn reduce_fundamental(tau: &ComplexBall, p: Precision) -> Result<ReducedTau> {
    check_upper_half(tau)?;
    let (re, im) = tau.mid_f64();
    let g = match (im > 2.0f64.powi(-30) && im.is_finite() && re.is_finite())
        .then(|| reduce_f64(re, im))
        .flatten()
    {
        Some((a, b, c, d)) => ModularTransform::from_i64(a, b, c, d)?,
        None => reduce_bigfloat(tau.re().mid(), tau.im().mid())?,
    };
    let wp = p.plus(16);
    let tau_prime = g.apply(tau, wp)?;
    check_upper_half(&tau_prime)?;
    let q4 = exp_pi_i(&tau_prime.div_i64(4, wp)?, wp)?;
    let q = q4.pow_int(4, wp)?;
    Ok(ReducedTau {
        tau_prime,
        transform: g,
        q,
        q4,
    })
}

/// The integer `R` (mod 24) with
/// `eta(g(tau)) = exp(pi i R / 12) sqrt(c tau + d) eta(tau)`
/// (principal square root).
///
/// For `c > 0` this is the Kronecker-symbol closed form of the eta
/// multiplier; the series-ratio test below pins the convention.
pub fn eta_root_of_unity(g: &ModularTransform) -> Result<i32> {
    let (a, b, c, d) = (&g.a, &g.b, &g.c, &g.d);
    if *c < 0 {
        return Err(Error::InvalidArgument("eta multiplier needs c >= 0"));
    }
    if c.is_zero() {
        if *d != 1 {
            return Err(Error::InvalidArgument(
                "eta multiplier needs d = 1 when c = 0",
            ));
        }
        let r = Integer::from(b % 24i32);
        return Ok(r.to_i32().unwrap().rem_euclid(24));
    }
    let c2m1 = Integer::from(c * c) - 1i32;
    let mut r: Integer;
    let symbol;
    if c.is_odd() {
        // R = (a+d)c - bd(c^2-1) - 3c, sign from the Kronecker symbol (d|c).
        r = Integer::from(a + d) * c - Integer::from(b * d) * &c2m1 - Integer::from(3i32) * c;
        symbol = d.clone().kronecker(c);
    } else {
        // R = (a+d)c - bd(c^2-1) + 3d - 3 - 3cd, sign (c|d).
        r = Integer::from(a + d) * c - Integer::from(b * d) * &c2m1 + Integer::from(3i32) * d
            - 3i32
            - Integer::from(3i32) * Integer::from(c * d);
        symbol = c.clone().kronecker(d);
    }
    if symbol == -1 {
        r += 12i32;
    }
    let r = Integer::from(&r % 24i32).to_i32().unwrap();
    Ok(r.rem_euclid(24))
}

/// `exp(pi i k / 12)` as an exact-angle ball.
pub(crate) fn root_of_unity_24(k: i32, p: Precision) -> Result<ComplexBall> {
    let k = k.rem_euclid(24);
    let angle = RealBall::from_i64(k as i64, p).div_integer(&Integer::from(12), p)?;
    exp_pi_i(&ComplexBall::from_real(angle, p), p)
}

/// Eta q-series at a reduced lattice parameter:
/// `eta(tau') = e^(pi i tau'/12) * sum_n (-1)^n qh^((3n^2-n)/2)` with
/// `qh = e^(2 pi i tau') = q^2`.
pub(crate) fn eta_series_reduced(rt: &ReducedTau, p: Precision) -> Result<ComplexBall> {
    let qh = rt.q.sqr(p);
    let qmag = qh.ub_abs();
    // First omitted exponent: beyond it the pentagonal exponents only grow,
    // so the plain geometric bound in the exponent dominates the tail.
    let cut = tail_order(
        &Mag::two_exp(1),
        &qmag,
        -(p.bits() as i64 + 2),
        64 + 4 * p.bits() as u64,
    )
    .ok_or(Error::ConvergenceFailure("eta series"))?;

    let mut sum = ComplexBall::one(p);
    let q3 = qh.pow_int(3, p)?;
    // Generalized pentagonal exponents, generated by addition sequences:
    // branch a (n >= 1): (3n^2-n)/2 = 1, 5, 12, ... with gaps 3n+1;
    // branch b (n <= -1): (3n^2+n)/2 = 2, 7, 15, ... with gaps 3n+2.
    let mut pow_a = qh.clone();
    let mut step_a = qh.pow_int(4, p)?;
    let mut pow_b = qh.sqr(p);
    let mut step_b = qh.pow_int(5, p)?;
    let mut ea = 1u64;
    let mut eb = 2u64;
    let mut n = 1u64;
    loop {
        let mut progressed = false;
        if ea < cut {
            sum = if n % 2 == 1 {
                sum.sub(&pow_a, p)
            } else {
                sum.add(&pow_a, p)
            };
            pow_a = pow_a.mul(&step_a, p);
            step_a = step_a.mul(&q3, p);
            ea += 3 * n + 1;
            progressed = true;
        }
        if eb < cut {
            sum = if n % 2 == 1 {
                sum.sub(&pow_b, p)
            } else {
                sum.add(&pow_b, p)
            };
            pow_b = pow_b.mul(&step_b, p);
            step_b = step_b.mul(&q3, p);
            eb += 3 * n + 2;
            progressed = true;
        }
        if !progressed {
            break;
        }
        n += 1;
    }
    sum.add_error_both(geometric_tail_bound(&Mag::two_exp(1), &qmag, cut));
    let prefactor = exp_pi_i(&rt.tau_prime.div_i64(12, p)?, p)?;
    Ok(sum.mul(&prefactor, p))
}

/// Theta-constant q-series at a reduced lattice parameter, returning
/// `(theta2, theta3, theta4)(0, tau')`. Powers of the nome are generated by
/// addition sequences (two multiplications per term).
pub(crate) fn theta_constants_series(
    rt: &ReducedTau,
    p: Precision,
) -> Result<(ComplexBall, ComplexBall, ComplexBall)> {
    let q = &rt.q;
    let qmag = q.ub_abs();
    let cut = tail_order(
        &Mag::two_exp(1),
        &qmag,
        -(p.bits() as i64 + 2),
        64 + 4 * p.bits() as u64,
    )
    .ok_or(Error::ConvergenceFailure("theta constant series"))?;

    let q2 = q.sqr(p);
    // Squares n^2 via q^(n^2) = q^((n-1)^2) * q^(2n-1).
    let mut sq_pow = q.clone();
    let mut sq_step = q.mul(&q2, p);
    // Pronic numbers n(n+1) via q^(n(n+1)) = q^((n-1)n) * q^(2n).
    let mut pr_pow = q2.clone();
    let mut pr_step = q2.sqr(p);
    let mut t3 = ComplexBall::one(p);
    let mut t4 = ComplexBall::one(p);
    let mut t2 = ComplexBall::one(p);
    let mut n = 1u64;
    loop {
        let mut progressed = false;
        if n * n < cut {
            let term = sq_pow.mul_2exp(1);
            t3 = t3.add(&term, p);
            t4 = if n % 2 == 1 {
                t4.sub(&term, p)
            } else {
                t4.add(&term, p)
            };
            sq_pow = sq_pow.mul(&sq_step, p);
            sq_step = sq_step.mul(&q2, p);
            progressed = true;
        }
        if n * (n + 1) < cut {
            t2 = t2.add(&pr_pow, p);
            pr_pow = pr_pow.mul(&pr_step, p);
            pr_step = pr_step.mul(&q2, p);
            progressed = true;
        }
        if !progressed {
            break;
        }
        n += 1;
    }
    let tail = geometric_tail_bound(&Mag::two_exp(1), &qmag, cut);
    t2.add_error_both(tail);
    t3.add_error_both(tail);
    t4.add_error_both(tail);
    let t2 = t2.mul_2exp(1).mul(&rt.q4, p);
    Ok((t2, t3, t4))
}

/// Dedekind eta function.
pub fn dedekind_eta(tau: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    let eta_prime = eta_series_reduced(&rt, wp)?;
    // eta(tau) = e^(-pi i R/12) (c tau + d)^(-1/2) eta(tau')
    let r = eta_root_of_unity(&rt.transform)?;
    let unit = root_of_unity_24(-r, wp)?;
    let (_, _, c, _) = rt.transform.entries();
    let value = if c.is_zero() {
        eta_prime.mul(&unit, wp)
    } else {
        let ctd = rt.transform.c_tau_d(tau, wp);
        let root = ctd.sqrt(wp, OnStraddle::Error)?;
        eta_prime.mul(&unit, wp).div(&root, wp)?
    };
    Ok(value.round(p))
}

/// Theta constants `(theta2, theta3, theta4)(0, tau)`.
pub fn theta_constants(
    tau: &ComplexBall,
    p: Precision,
) -> Result<(ComplexBall, ComplexBall, ComplexBall)> {
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    let (t2p, t3p, t4p) = theta_constants_series(&rt, wp)?;
    if rt.transform.is_identity() {
        return Ok((t2p.round(p), t3p.round(p), t4p.round(p)));
    }
    // theta_j(0, tau) = eps_j * A * theta_{1+S_j}(0, tau'): the z = 0 case
    // of the general theta transformation (B = 1).
    let chars = crate::theta::transform_characters(&rt.transform)?;
    let (_, _, c, _) = rt.transform.entries();
    let a_fac = if c.is_zero() {
        ComplexBall::one(wp)
    } else {
        let ctd = rt.transform.c_tau_d(tau, wp);
        ComplexBall::i(wp)
            .div(&ctd, wp)?
            .sqrt(wp, OnStraddle::Error)?
    };
    let prime = [None, Some(t2p), Some(t3p), Some(t4p)];
    let mut out: Vec<ComplexBall> = Vec::with_capacity(3);
    for j in 1..4usize {
        let unit = crate::theta::root_of_unity_8(chars.r[j], wp)?;
        let source = prime[chars.s[j]]
            .as_ref()
            .ok_or(Error::Domain("theta constant permuted onto theta1"))?;
        out.push(unit.mul(&a_fac, wp).mul(source, wp).round(p));
    }
    let mut it = out.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap(), it.next().unwrap()))
}

/// Klein's j-invariant, evaluated from theta constants after reduction
/// (the function is invariant, so no back-transformation is needed).
pub fn j_invariant(tau: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    let (t2, t3, t4) = theta_constants_series(&rt, wp)?;
    let t2_8 = t2.pow_int(8, wp)?;
    let t3_8 = t3.pow_int(8, wp)?;
    let t4_8 = t4.pow_int(8, wp)?;
    let num = t2_8.add(&t3_8, wp).add(&t4_8, wp).pow_int(3, wp)?;
    let den = t2.mul(&t3, wp).mul(&t4, wp).pow_int(8, wp)?;
    Ok(num.mul_i64(32, wp).div(&den, wp)?.round(p))
}

/// Modular discriminant `Delta = eta^24`, a weight-12 form.
pub fn discriminant(tau: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    let eta_prime = eta_series_reduced(&rt, wp)?;
    let delta_prime = eta_prime.pow_int(24, wp)?;
    // Delta(tau) = (c tau + d)^(-12) Delta(tau'); the 24th root of unity
    // disappears under the 24th power.
    let (_, _, c, _) = rt.transform.entries();
    let value = if c.is_zero() {
        delta_prime
    } else {
        let ctd = rt.transform.c_tau_d(tau, wp);
        delta_prime.div(&ctd.pow_int(12, wp)?, wp)?
    };
    Ok(value.round(p))
}

/// Eisenstein series `G_{k2}` of even weight `k2 >= 4`.
///
/// `G_4` and `G_6` come from theta constants; higher weights follow the
/// classical convolution recurrence, validated against the direct lattice
/// sum in the tests.
pub fn eisenstein(k2: u32, tau: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    if k2 < 4 || k2 % 2 != 0 {
        return Err(Error::InvalidArgument(
            "Eisenstein weight must be an even integer >= 4",
        ));
    }
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    let series = eisenstein_reduced(k2, &rt, wp)?;
    let (_, _, c, _) = rt.transform.entries();
    let value = if c.is_zero() {
        series
    } else {
        let ctd = rt.transform.c_tau_d(tau, wp);
        series.div(&ctd.pow_int(k2 as i64, wp)?, wp)?
    };
    Ok(value.round(p))
}

/// `G_{k2}(tau')` at a reduced parameter.
pub(crate) fn eisenstein_reduced(k2: u32, rt: &ReducedTau, wp: Precision) -> Result<ComplexBall> {
    let (t2, t3, t4) = theta_constants_series(rt, wp)?;
    let t2_4 = t2.pow_int(4, wp)?;
    let t3_4 = t3.pow_int(4, wp)?;
    let t4_4 = t4.pow_int(4, wp)?;
    let t2_8 = t2_4.sqr(wp);
    let t3_8 = t3_4.sqr(wp);
    let t4_8 = t4_4.sqr(wp);
    let pi = RealBall::pi(wp);
    let pi2 = pi.mul(&pi, wp);
    let pi4 = pi2.mul(&pi2, wp);
    // G4 = pi^4/90 (t2^8 + t3^8 + t4^8)
    let g4 = t2_8
        .add(&t3_8, wp)
        .add(&t4_8, wp)
        .mul_real(&pi4, wp)
        .div_i64(90, wp)?;
    if k2 == 4 {
        return Ok(g4);
    }
    // G6 = pi^6/945 (-3 t2^8 (t3^4 + t4^4) + t3^12 + t4^12)
    let pi6 = pi4.mul(&pi2, wp);
    let t3_12 = t3_8.mul(&t3_4, wp);
    let t4_12 = t4_8.mul(&t4_4, wp);
    let g6 = t2_8
        .mul(&t3_4.add(&t4_4, wp), wp)
        .mul_i64(-3, wp)
        .add(&t3_12, wp)
        .add(&t4_12, wp)
        .mul_real(&pi6, wp)
        .div_i64(945, wp)?;
    if k2 == 6 {
        return Ok(g6);
    }
    // (2n+1)(n-3)(2n-1) G_{2n} = 3 sum_{m=2}^{n-2} (2m-1)(2(n-m)-1) G_{2m} G_{2(n-m)}
    let top = (k2 / 2) as usize;
    let mut g: Vec<ComplexBall> = vec![ComplexBall::zero(wp); top + 1];
    g[2] = g4;
    g[3] = g6;
    for n in 4..=top {
        let mut acc = ComplexBall::zero(wp);
        for m in 2..=(n - 2) {
            let w = ((2 * m - 1) * (2 * (n - m) - 1)) as i64;
            acc = acc.add(&g[m].mul(&g[n - m], wp).mul_i64(w, wp), wp);
        }
        let den = Integer::from((2 * n as i64 + 1) * (n as i64 - 3) * (2 * n as i64 - 1));
        g[n] = acc.mul_i64(3, wp).div_integer(&den, wp)?;
    }
    Ok(g[top].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn cb(re: f64, im: f64, bits: u32) -> ComplexBall {
        ComplexBall::from_f64(re, im, p(bits))
    }

    /// tau = (1 + i sqrt(3))/2, the corner of the fundamental domain.
    fn rho(bits: u32) -> ComplexBall {
        let half = RealBall::from_f64(0.5, p(bits));
        let s3 = RealBall::from_i64(3, p(bits)).sqrt(p(bits)).unwrap();
        ComplexBall::new(half, s3.mul_2exp(-1))
    }

    #[test]
    fn reduction_examples() {
        let p64 = p(64);
        // tau = i is already reduced.
        let rt = reduce_fundamental(&cb(0.0, 1.0, 64), p64).unwrap();
        assert!(rt.transform.is_identity());

        // tau = i + 5 reduces by translation only.
        let rt = reduce_fundamental(&cb(5.0, 1.0, 64), p64).unwrap();
        let (a, b, c, d) = rt.transform.entries();
        assert_eq!(
            (
                a.to_i32().unwrap(),
                b.to_i32().unwrap(),
                c.to_i32().unwrap(),
                d.to_i32().unwrap()
            ),
            (1, -5, 0, 1)
        );
        assert!(rt
            .tau_prime
            .contains_floats(&Float::with_val(64, 0), &Float::with_val(64, 1)));

        // The lattice parameter near the real line: the nome in the
        // eta/j Fourier variable satisfies |e^(2 pi i tau')| <= 0.00434.
        let rt = reduce_fundamental(&cb(0.07, 0.003, 96), p(96)).unwrap();
        let q_squared = rt.q.sqr(p(96));
        assert!(q_squared.ub_abs().to_f64_upper() <= 0.00434);
        let (re, im) = rt.tau_prime.mid_f64();
        assert!(re.abs() <= 0.5 + EPS_FD);
        assert!(re.hypot(im) >= 1.0 - EPS_FD);
    }

    #[test]
    fn reduction_rejects_lower_half_plane() {
        assert!(reduce_fundamental(&cb(0.3, -1.0, 64), p(64)).is_err());
        assert!(reduce_fundamental(&cb(0.3, 0.0, 64), p(64)).is_err());
    }

    #[test]
    fn eta_reference_value_at_i() {
        // eta(i) = Gamma(1/4) / (2 pi^(3/4)) = 0.76822512753...
        let eta = dedekind_eta(&cb(0.0, 1.0, 128), p(128)).unwrap();
        let oracle_val = oracle::naive_eta(&cb(0.0, 1.0, 192), 100, p(192)).unwrap();
        assert!(eta.overlaps(&oracle_val));
        assert!((eta.re().mid().to_f64() - 0.7682251275353909).abs() < 1e-15);
        assert!(eta.im().contains_zero());
        assert!(eta.re().rad().to_f64_upper() < 1e-30);
    }

    #[test]
    fn eta_translation_and_inversion_laws() {
        let p128 = p(128);
        // eta(tau + 1) = e^(pi i/12) eta(tau) at tau = 1/2 + 2i.
        let tau = cb(0.5, 2.0, 128);
        let lhs = dedekind_eta(&cb(1.5, 2.0, 128), p128).unwrap();
        let unit = root_of_unity_24(1, p128).unwrap();
        let rhs = dedekind_eta(&tau, p128).unwrap().mul(&unit, p128);
        assert!(lhs.overlaps(&rhs));

        // eta(-1/tau) = sqrt(-i tau) eta(tau) at tau = 2i: sqrt(-i*2i) = sqrt(2).
        let lhs = dedekind_eta(&cb(0.0, 0.5, 128), p128).unwrap();
        let sqrt2 = RealBall::from_i64(2, p128).sqrt(p128).unwrap();
        let rhs = dedekind_eta(&cb(0.0, 2.0, 128), p128)
            .unwrap()
            .mul_real(&sqrt2, p128);
        assert!(lhs.overlaps(&rhs), "lhs {} rhs {}", lhs, rhs);
    }

    #[test]
    fn theta_constant_values_at_i() {
        let p128 = p(128);
        let (t2, t3, t4) = theta_constants(&cb(0.0, 1.0, 128), p128).unwrap();
        // theta3(i) = pi^(1/4)/Gamma(3/4) = 1.08643481121...
        assert!((t3.re().mid().to_f64() - 1.0864348112133080).abs() < 1e-14);
        // theta2(i) = theta4(i)
        assert!(t2.overlaps(&t4));
        // Jacobi identity theta2^4 + theta4^4 = theta3^4.
        let lhs = t2
            .pow_int(4, p128)
            .unwrap()
            .add(&t4.pow_int(4, p128).unwrap(), p128);
        assert!(lhs.overlaps(&t3.pow_int(4, p128).unwrap()));
    }

    #[test]
    fn j_invariant_special_values() {
        let p128 = p(128);
        let j_i = j_invariant(&cb(0.0, 1.0, 128), p128).unwrap();
        assert!(j_i.contains_floats(&Float::with_val(64, 1728), &Float::with_val(64, 0)));

        let j_rho = j_invariant(&rho(160), p128).unwrap();
        assert!(j_rho.contains_zero());

        // j(tau + 1) reduces to the identical tau', so the computed balls
        // coincide midpoint for midpoint.
        let a = j_invariant(&cb(0.3, 1.4, 128), p128).unwrap();
        let b = j_invariant(&cb(1.3, 1.4, 128), p128).unwrap();
        assert_eq!(a.re().mid(), b.re().mid());
        assert_eq!(a.im().mid(), b.im().mid());
    }

    #[test]
    fn discriminant_weight_law() {
        let p128 = p(128);
        // Delta(i) = eta(i)^24
        let d = discriminant(&cb(0.0, 1.0, 128), p128).unwrap();
        let e24 = dedekind_eta(&cb(0.0, 1.0, 128), p128)
            .unwrap()
            .pow_int(24, p128)
            .unwrap();
        assert!(d.overlaps(&e24));

        // Delta(tau + 1) = Delta(tau) at tau = 2i.
        let a = discriminant(&cb(0.0, 2.0, 128), p128).unwrap();
        let b = discriminant(&cb(1.0, 2.0, 128), p128).unwrap();
        assert!(a.overlaps(&b));

        // Delta(-1/tau)/Delta(tau) = tau^12 at tau = 1 + 2i.
        let tau = cb(1.0, 2.0, 128);
        let minus_inv = tau.inv(p128).unwrap().neg();
        let lhs = discriminant(&minus_inv, p128)
            .unwrap()
            .div(&discriminant(&tau, p128).unwrap(), p128)
            .unwrap();
        let rhs = tau.pow_int(12, p128).unwrap();
        assert!(lhs.overlaps(&rhs));
    }

    #[test]
    fn eisenstein_against_lattice_sum() {
        let p96 = p(96);
        // G4(2i) matches the truncated double sum.
        let g4 = eisenstein(4, &cb(0.0, 2.0, 96), p96).unwrap();
        let direct = oracle::naive_eisenstein(4, &cb(0.0, 2.0, 96), 200, p96).unwrap();
        assert!(g4.overlaps(&direct), "g4 {} direct {}", g4, direct);

        // G6 vanishes at the corner rho.
        let g6 = eisenstein(6, &rho(128), p96).unwrap();
        assert!(g6.contains_zero());

        // Weight law G4(-1/tau) = tau^4 G4(tau) at tau = 1.5i.
        let tau = cb(0.0, 1.5, 96);
        let minus_inv = tau.inv(p96).unwrap().neg();
        let lhs = eisenstein(4, &minus_inv, p96).unwrap();
        let rhs = eisenstein(4, &tau, p96)
            .unwrap()
            .mul(&tau.pow_int(4, p96).unwrap(), p96);
        assert!(lhs.overlaps(&rhs));

        // G8 via the recurrence matches the lattice sum at tau = 0.3 + 1.7i.
        let tau = cb(0.3, 1.7, 96);
        let g8 = eisenstein(8, &tau, p96).unwrap();
        let direct = oracle::naive_eisenstein(8, &tau, 120, p96).unwrap();
        assert!(g8.overlaps(&direct), "g8 {} direct {}", g8, direct);
    }

    #[test]
    fn eisenstein_rejects_bad_weight() {
        assert!(eisenstein(2, &cb(0.0, 1.0, 64), p(64)).is_err());
        assert!(eisenstein(5, &cb(0.0, 1.0, 64), p(64)).is_err());
    }

    #[test]
    fn eta_multiplier_special_cases() {
        assert_eq!(eta_root_of_unity(&ModularTransform::identity()).unwrap(), 0);
        // T: eta(tau+1) = e^(pi i/12) eta(tau)
        let t = ModularTransform::from_i64(1, 1, 0, 1).unwrap();
        assert_eq!(eta_root_of_unity(&t).unwrap(), 1);
        // S: eta(-1/tau) = e^(-pi i/4) sqrt(tau) eta(tau), so R = -3 mod 24.
        let s = ModularTransform::from_i64(0, -1, 1, 0).unwrap();
        assert_eq!(eta_root_of_unity(&s).unwrap(), 21);
    }

    #[test]
    fn eta_multiplier_matches_series_ratio() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let p128 = p(128);
        for _ in 0..40 {
            // Random unimodular matrix as a word in T^k and S.
            let mut g = ModularTransform::identity();
            for _ in 0..rng.gen_range(1..6) {
                let k: i64 = rng.gen_range(-3..=3);
                g = ModularTransform::from_i64(1, k, 0, 1).unwrap().compose(&g);
                g = ModularTransform::from_i64(0, -1, 1, 0).unwrap().compose(&g);
            }
            let tau = cb(
                rng.gen_range(-0.4..0.4),
                rng.gen_range(0.9..1.8),
                128,
            );
            let gtau = g.apply(&tau, p128).unwrap();
            if !gtau.im().definitely_positive() {
                continue;
            }
            let lhs = dedekind_eta(&gtau, p128).unwrap();
            let (_, _, c, _) = g.entries();
            let root = if c.is_zero() {
                ComplexBall::one(p128)
            } else {
                g.c_tau_d(&tau, p128).sqrt(p128, OnStraddle::Error).unwrap()
            };
            let r = eta_root_of_unity(&g).unwrap();
            let unit = root_of_unity_24(r, p128).unwrap();
            let rhs = unit
                .mul(&root, p128)
                .mul(&dedekind_eta(&tau, p128).unwrap(), p128);
            assert!(lhs.overlaps(&rhs), "g = {:?}", g.entries());
        }
    }
}
