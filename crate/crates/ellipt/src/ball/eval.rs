//! Shared series-evaluation machinery: geometric tail bounds, rectangular
//! splitting for scalar-coefficient polynomials, and the ball exponential
//! built from both.

use rug::Integer;

use super::complex::ComplexBall;
use super::mag::Mag;
use super::real::RealBall;
use super::Precision;
use crate::error::{Error, Result};

/// Upper bound for a geometric series tail: `A C^N / (1 - C)`.
///
/// This bounds `sum_{k>N} A C^k` (the exact tail is `A C^(N+1)/(1-C)`; the
/// bound charged here is larger by one factor of `C`, matching the closed
/// form used when choosing truncation orders). Returns [`Mag::INF`] when
/// `C >= 1` — the unbounded signal.
pub fn geometric_tail_bound(a: &Mag, c: &Mag, n: u64) -> Mag {
    let one = Mag::two_exp(0);
    let denom = one.sub_down(c);
    if denom.is_zero() {
        return Mag::INF;
    }
    a.mul_up(&c.pow_up(n)).div_up(&denom)
}

/// Smallest `n` with `geometric_tail_bound(a, c, n) < 2^tol_exp`,
/// or `None` if no `n <= n_max` works.
pub fn tail_order(a: &Mag, c: &Mag, tol_exp: i64, n_max: u64) -> Option<u64> {
    let one = Mag::two_exp(0);
    let denom = one.sub_down(c);
    if denom.is_zero() {
        return None;
    }
    let tol = Mag::two_exp(tol_exp);
    let mut running = a.div_up(&denom);
    for n in 0..=n_max {
        if !running.ge(&tol) {
            return Some(n);
        }
        running = running.mul_up(c);
    }
    None
}

/// Evaluates `sum_{k=0}^{n} c_k x^k` where `c_0 = 1` and
/// `c_k = c_{k-1} * num(k)/den(k)` with small nonzero integer ratios,
/// using rectangular splitting: about `2 sqrt(n)` ball multiplications,
/// everything else scalar work on the cleared-denominator coefficients.
pub fn rect_split_eval(
    ratio: impl Fn(usize) -> (i64, i64),
    x: &ComplexBall,
    n: usize,
    p: Precision,
) -> Result<ComplexBall> {
    rect_split_eval_counted(ratio, x, n, p).map(|(v, _)| v)
}

/// As [`rect_split_eval`], also reporting the number of nonscalar (ball)
/// multiplications performed.
pub fn rect_split_eval_counted(
    ratio: impl Fn(usize) -> (i64, i64),
    x: &ComplexBall,
    n: usize,
    p: Precision,
) -> Result<(ComplexBall, usize)> {
    if n == 0 {
        return Ok((ComplexBall::one(p), 0));
    }
    let m = (n as f64).sqrt().ceil() as usize;
    let m = m.max(1);
    let rows = (n + 1).div_ceil(m);
    let mut nonscalar = 0usize;

    // Powers x^1 .. x^m (m-1 multiplications).
    let mut powers: Vec<ComplexBall> = Vec::with_capacity(m + 1);
    powers.push(ComplexBall::one(p));
    powers.push(x.clone());
    for j in 2..=m {
        let next = powers[j - 1].mul(x, p);
        nonscalar += 1;
        powers.push(next);
    }

    // Ratio cache for k = 1..=n.
    let mut nums: Vec<Integer> = Vec::with_capacity(n + 1);
    let mut dens: Vec<Integer> = Vec::with_capacity(n + 1);
    nums.push(Integer::from(1));
    dens.push(Integer::from(1));
    for k in 1..=n {
        let (nk, dk) = ratio(k);
        if nk == 0 || dk == 0 {
            return Err(Error::InvalidArgument(
                "rectangular splitting needs nonzero coefficient ratios",
            ));
        }
        nums.push(Integer::from(nk));
        dens.push(Integer::from(dk));
    }

    // Row i covers exponents i*m .. min(i*m + m - 1, n). Evaluate rows from
    // the top down, Horner in x^m, carrying the coefficient scale across
    // row boundaries as an exact integer ratio.
    let mut acc = ComplexBall::zero(p);
    for i in (0..rows).rev() {
        let lo = i * m;
        let hi = (lo + m - 1).min(n);
        let width = hi - lo + 1;

        // Cleared-denominator relative coefficients a_j = rho_j * D where
        // rho_j = c_{lo+j}/c_{lo} and D = prod of dens over the row.
        let mut a: Vec<Integer> = Vec::with_capacity(width);
        let mut pref = Integer::from(1);
        a.push(Integer::from(1));
        for j in 1..width {
            pref *= &nums[lo + j];
            a.push(pref.clone());
        }
        let mut d_row = Integer::from(1);
        for j in (0..width - 1).rev() {
            d_row *= &dens[lo + j + 1];
            a[j] *= &d_row;
        }
        // d_row is now the full row denominator D.

        let mut row = ComplexBall::zero(p);
        for (j, aj) in a.iter().enumerate() {
            row = row.add(&powers[j].mul_integer(aj, p), p);
        }
        let row = row.div_integer(&d_row, p)?;

        if i == rows - 1 {
            acc = row;
        } else {
            // Crossing ratio c_{lo+m}/c_{lo} spans entries lo+1 ..= lo+m.
            let mut cn = Integer::from(1);
            let mut cd = Integer::from(1);
            for l in (lo + 1)..=(lo + m) {
                cn *= &nums[l];
                cd *= &dens[l];
            }
            acc = acc.mul(&powers[m], p);
            nonscalar += 1;
            acc = acc.mul_integer(&cn, p).div_integer(&cd, p)?;
            acc = row.add(&acc, p);
        }
    }
    Ok((acc, nonscalar))
}

/// Ball exponential `e^x` for complex `x`.
///
/// Argument reduction `e^x = 2^n e^t` with `t = x - n log 2`, then
/// `e^t = (e^u)^(2^R)` with `u = t / 2^R` where `R` combines the precision
/// tuning `r = round(p^0.4)` (clamped to `[1, 64]`) with extra halvings for
/// large arguments, then rectangular splitting on the Taylor series and `R`
/// squarings.
pub fn ball_exp(x: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    if x.is_exact_zero() {
        return Ok(ComplexBall::one(p));
    }
    let r0 = (p.bits() as f64).powf(0.4).round() as u32;
    let r0 = r0.clamp(1, 64);
    let wp = Precision::raw(p.bits() + r0 + 32);

    // t = x - n log 2
    let re_mid = x.re().mid().to_f64();
    if !re_mid.is_finite() || re_mid.abs() > 1e15 || !x.im().mid().to_f64().is_finite() {
        return Err(Error::ConvergenceFailure("exponential argument too large"));
    }
    let n = (re_mid / std::f64::consts::LN_2).round() as i64;
    let ln2 = RealBall::ln2(wp);
    let shift = ln2.mul_integer(&Integer::from(n), wp);
    let t = ComplexBall::new(x.re().sub(&shift, wp), x.im().clone());

    // Extra halvings keep |u| <= 2^(-r0-1) even for large imaginary parts.
    let t_mag = t.ub_abs();
    let s = (t_mag.log2_estimate().ceil() as i64 + 2).max(0) as u32;
    let r = r0 + s;
    let u = t.mul_2exp(-(r as i64));

    // Taylor order from the geometric tail bound with C = ub|u|.
    let c = u.ub_abs();
    let n_terms = tail_order(
        &Mag::two_exp(0),
        &c,
        -(wp.bits() as i64 + 2),
        4 * wp.bits() as u64 + 64,
    )
    .ok_or(Error::ConvergenceFailure("exponential series"))?;

    // exp ratio: c_k = c_{k-1} / k
    let (mut v, _) = rect_split_eval_counted(|k| (1, k as i64), &u, n_terms as usize, wp)?;
    let tail = geometric_tail_bound(&Mag::two_exp(0), &c, n_terms);
    v.add_error_both(tail);

    for _ in 0..r {
        v = v.sqr(wp);
    }
    if n.unsigned_abs() > 1 << 40 {
        return Err(Error::ConvergenceFailure("exponential argument too large"));
    }
    Ok(v.mul_2exp(n).round(p))
}

/// Real ball exponential (imaginary part stays identically zero).
pub fn real_exp(x: &RealBall, p: Precision) -> Result<RealBall> {
    let (re, _) = ball_exp(&ComplexBall::from_real(x.clone(), p), p)?.into_parts();
    Ok(re)
}

/// `e^(i pi z)`, computed as `e^(-pi b) (cos(pi a) + i sin(pi a))` with the
/// angle reduced modulo 2 before any multiplication by pi.
pub fn exp_pi_i(z: &ComplexBall, p: Precision) -> Result<ComplexBall> {
    let wp = Precision::raw(p.bits() + 16);
    let (s, c) = z.re().sin_cos_pi(wp);
    let minus_pi_b = RealBall::pi(wp).mul(z.im(), wp).neg();
    let scale = real_exp(&minus_pi_b, wp)?;
    Ok(ComplexBall::new(c.mul(&scale, wp), s.mul(&scale, wp)).round(p))
}
