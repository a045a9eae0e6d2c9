//! Jacobi theta functions `theta_1..theta_4(z, tau)` with derivatives:
//! full argument reduction (modular transformation of `tau`, lattice
//! reduction of `z`) and q-series evaluation with rigorous truncation
//! bounds.
//!
//! Derivatives are carried as truncated power series: an output of length
//! `D` holds the Taylor coefficients of `theta_j(z + x, tau)` through
//! `x^(D-1)`.

use rug::Integer;

use crate::ball::eval::exp_pi_i;
use crate::ball::{BallSeries, ComplexBall, Mag, OnStraddle, Precision, RealBall};
use crate::error::{Error, Result};
use crate::modular::{self, eta_root_of_unity, ModularTransform, ReducedTau};

/// Prefactor exponents and index permutation of a theta transformation:
/// `theta_{1+j}(z, tau) = exp(pi i r[j]/4) * A * B * theta_{1+s[j]}(z', tau')`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaCharacters {
    /// Eighth-root-of-unity exponents (mod 8).
    pub r: [i32; 4],
    /// Permutation: function `j` (0-based) maps onto function `s[j]`.
    pub s: [usize; 4],
}

/// Everything needed to reassemble `theta_j(z, tau)` from series data at
/// the reduced arguments.
#[derive(Debug, Clone)]
pub struct ThetaTransformData {
    /// The modular transformation with `tau' = g(tau)`.
    pub transform: ModularTransform,
    /// Eighth-root exponents, including the `(-1)^n` picked up by the
    /// z-lattice reduction.
    pub r: [i32; 4],
    /// Index permutation.
    pub s: [usize; 4],
    /// The constant `A = sqrt(i/(c tau + d))` (`1` when `c = 0`).
    pub a_factor: ComplexBall,
    /// The series `B = exp(-pi i c (z+x)^2/(c tau + d))` merged with the
    /// z-reduction prefactor, as one exponential.
    pub b_factor: BallSeries,
    /// The reduced argument as a series `z'' + c1 x`.
    pub z_prime: BallSeries,
    /// Lattice shift count from the z-reduction.
    pub n_shift: i64,
}

/// `exp(pi i k/4)` as a ball (exact for even `k`).
pub(crate) fn root_of_unity_8(k: i32, p: Precision) -> Result<ComplexBall> {
    let k = k.rem_euclid(8);
    match k {
        0 => Ok(ComplexBall::one(p)),
        2 => Ok(ComplexBall::i(p)),
        4 => Ok(ComplexBall::one(p).neg()),
        6 => Ok(ComplexBall::i(p).neg()),
        _ => {
            let angle = RealBall::from_i64(k as i64, p).div_integer(&Integer::from(4), p)?;
            exp_pi_i(&ComplexBall::from_real(angle, p), p)
        }
    }
}

fn mod8(x: &Integer) -> i32 {
    Integer::from(x % 8i32).to_i32().unwrap().rem_euclid(8)
}

/// Reduces a double index `(m, n)` to a base theta function using
/// `theta_{m+2,n} = (-1)^n theta_{m,n}` and `theta_{m,n+2} = theta_{m,n}`,
/// with base cases `theta_{0,0} = theta3`, `theta_{0,1} = theta4`,
/// `theta_{1,0} = theta2`, `theta_{1,1} = i theta1`.
///
/// Returns `(extra exponent mod 8, target index 0..3)`.
fn reduce_index_pair(m: &Integer, n: &Integer) -> (i32, usize) {
    let m0 = Integer::from(m % 2i32).to_i32().unwrap().rem_euclid(2);
    let n0 = Integer::from(n % 2i32).to_i32().unwrap().rem_euclid(2);
    // Halving count: each step of 2 in m contributes (-1)^n.
    let k = Integer::from(m - m0) >> 1u32;
    let sign_odd = n0 == 1 && k.is_odd();
    let mut extra = if sign_odd { 4 } else { 0 };
    let target = match (m0, n0) {
        (0, 0) => 2,
        (0, 1) => 3,
        (1, 0) => 1,
        (1, 1) => {
            // theta_{1,1} = i theta1
            extra = (extra + 2) % 8;
            0
        }
        _ => unreachable!(),
    };
    (extra, target)
}

/// The roots of unity and permutation of the theta transformation for `g`.
pub(crate) fn transform_characters(g: &ModularTransform) -> Result<ThetaCharacters> {
    let (a, b, c, d) = g.entries();
    if c.is_zero() {
        // theta_j(z, tau) = exp(-pi i b/4) theta_j(z, tau + b) for j = 1, 2;
        // theta3 and theta4 swap places when b is odd.
        let rb = mod8(&Integer::from(-b.clone()));
        let swap = b.is_odd();
        return Ok(ThetaCharacters {
            r: [rb, rb, 0, 0],
            s: if swap { [0, 1, 3, 2] } else { [0, 1, 2, 3] },
        });
    }
    // epsilon_1 uses the eta multiplier of (-d, b, c, -a).
    let g1 = ModularTransform::new(-d.clone(), b.clone(), c.clone(), -a.clone())?;
    let r_eta1 = eta_root_of_unity(&g1)?;
    let r_eta = eta_root_of_unity(g)? as i64;

    let mut r = [0i32; 4];
    let mut s = [0usize; 4];
    r[0] = (r_eta1 as i64 + 1).rem_euclid(8) as i32;
    s[0] = 0;

    // epsilon_2 with index pair (1-c, 1+a)
    let two = Integer::from(2);
    let r2 = Integer::from(-r_eta) + 5i32 + Integer::from(&two - c) * a;
    let (x2, t2) = reduce_index_pair(&Integer::from(1i32 - c), &Integer::from(1i32 + a));
    r[1] = (mod8(&r2) + x2).rem_euclid(8);
    s[1] = t2;

    // epsilon_3 with index pair (1+d-c, 1-b+a)
    let r3 = Integer::from(-r_eta) + 4i32 + Integer::from(c - d) * Integer::from(b - a)
        - Integer::from(2i32) * Integer::from(b - a);
    let m3 = Integer::from(1i32) + d - c;
    let n3 = Integer::from(1i32) - b + a;
    let (x3, t3) = reduce_index_pair(&m3, &n3);
    r[2] = (mod8(&r3) + x3).rem_euclid(8);
    s[2] = t3;

    // epsilon_4 with index pair (1+d, 1-b)
    let r4 = Integer::from(-r_eta) + 3i32 - Integer::from(&two + d) * b;
    let m4 = Integer::from(1i32) + d;
    let n4 = Integer::from(1i32) - b;
    let (x4, t4) = reduce_index_pair(&m4, &n4);
    r[3] = (mod8(&r4) + x4).rem_euclid(8);
    s[3] = t4;

    Ok(ThetaCharacters { r, s })
}

/// `pi i * w` as a ball.
fn pi_i_times(w: &ComplexBall, p: Precision) -> ComplexBall {
    w.mul_real(&RealBall::pi(p), p).mul_i()
}

/// Builds the transformation data for `g` acting on the series argument
/// `z + x` (only the constant and linear coefficients of `z` are used).
///
/// The returned `b_factor` merges `B` with the z-reduction prefactor into a
/// single power-series exponential, and `r` already carries the
/// z-reduction's `(-1)^n` on the affected functions.
pub fn theta_transform(
    g: &ModularTransform,
    z: &BallSeries,
    tau: &ComplexBall,
    p: Precision,
) -> Result<ThetaTransformData> {
    let d_len = z.len().max(1);
    let chars = transform_characters(g)?;
    let (_, _, c, _) = g.entries();

    // z' series and the quadratic exponent of B.
    let (z_prime, a_factor, b_exponent) = if c.is_zero() {
        (z.clone(), ComplexBall::one(p), BallSeries::zero(1, p))
    } else {
        let ctd = g.c_tau_d(tau, p);
        let scale = ComplexBall::one(p).neg().div(&ctd, p)?;
        // z'(x) = -z(x)/(c tau + d) coefficientwise
        let zp = z.mul_scalar(&scale, p);
        let a_factor = ComplexBall::i(p)
            .div(&ctd, p)?
            .sqrt(p, OnStraddle::Error)?;
        // B = exp(-pi i c z(x)^2 / (c tau + d)): exponent series from
        // squaring the argument series and scaling.
        let sq = z.mul(z, d_len.max(3), p);
        let factor = pi_i_times(&ComplexBall::one(p).neg().mul_integer(c, p).div(&ctd, p)?, p);
        (zp, a_factor, sq.mul_scalar(&factor, p))
    };

    let tau_prime = g.apply(tau, p)?;
    let (z_reduced, n_shift, red_exponent) = reduce_z_exponent(&z_prime, &tau_prime, p)?;

    let mut r = chars.r;
    if n_shift % 2 != 0 {
        // theta1 and theta4 pick up (-1)^n under z -> z - n tau.
        for j in 0..4 {
            if chars.s[j] == 0 || chars.s[j] == 3 {
                r[j] = (r[j] + 4).rem_euclid(8);
            }
        }
    }

    let exponent = b_exponent.add(&red_exponent, p);
    let b_factor = exponent.exp(d_len, p)?;

    Ok(ThetaTransformData {
        transform: g.clone(),
        r,
        s: chars.s,
        a_factor,
        b_factor,
        z_prime: z_reduced,
        n_shift,
    })
}

/// Lattice reduction of the series argument: `z'' = z' - n tau'` with
/// `n = floor(Im z'/Im tau' + 1/2)`; returns the reduced series, `n`, and
/// the exponent series of the prefactor `exp(pi i(-tau' n^2 - 2 n z''))`.
fn reduce_z_exponent(
    z: &BallSeries,
    tau_prime: &ComplexBall,
    p: Precision,
) -> Result<(BallSeries, i64, BallSeries)> {
    let zim = z.coeff(0).im().mid().to_f64();
    let tim = tau_prime.im().mid().to_f64();
    if !(tim > 0.0) {
        return Err(Error::Domain("reduced lattice parameter must have Im > 0"));
    }
    let n = (zim / tim + 0.5).floor();
    if !n.is_finite() || n.abs() > 9e15 {
        return Err(Error::ConvergenceFailure("z-lattice reduction overflow"));
    }
    let n = n as i64;
    if n == 0 {
        return Ok((z.clone(), 0, BallSeries::zero(1, p)));
    }
    let ni = Integer::from(n);
    let shift = tau_prime.mul_integer(&ni, p);
    let mut z_red = z.clone();
    *z_red.coeff_mut(0) = z.coeff(0).sub(&shift, p);
    // exponent = pi i (-tau' n^2 - 2 n z''(x))
    let nsq = Integer::from(&ni * &ni);
    let minus_2n_pi_i = pi_i_times(&ComplexBall::from_i64(-2 * n, p), p);
    let mut exponent = z_red.mul_scalar(&minus_2n_pi_i, p);
    *exponent.coeff_mut(0) = exponent
        .coeff(0)
        .sub(&pi_i_times(&tau_prime.mul_integer(&nsq, p), p), p);
    Ok((z_red, n, exponent))
}

/// Public form of the z-lattice reduction: returns the reduced series, the
/// shift count, and the exponential prefactor as a series.
pub fn reduce_z(
    z: &BallSeries,
    tau_prime: &ComplexBall,
    p: Precision,
) -> Result<(BallSeries, i64, BallSeries)> {
    let (zr, n, exponent) = reduce_z_exponent(z, tau_prime, p)?;
    let prefactor = exponent.exp(z.len(), p)?;
    Ok((zr, n, prefactor))
}

/// Output of the raw series evaluation with diagnostics.
#[derive(Debug, Clone)]
pub struct ThetaSeries {
    /// `theta_1..theta_4(z + x, tau)` truncated to the requested length.
    pub theta: [BallSeries; 4],
    /// Number of main-loop terms `N`.
    pub terms: usize,
    /// The truncation bound added to coefficient `r` (before final
    /// scaling), one entry per derivative order.
    pub tail_bounds: Vec<Mag>,
}

/// Hard ceiling on the series length; reduced arguments converge far
/// earlier, so running into it signals misuse.
fn n_max(p: Precision) -> usize {
    64 + 4 * p.bits() as usize
}

/// Picks the truncation order: smallest `N` with
/// `Q^E W^(N+2) < 2^-(p+2)` and `alpha = Q^F W e^((D-1)/(N+2)) < 1/2`,
/// scanning heuristically and confirming with outward-rounded arithmetic.
fn choose_terms(
    qmag: &Mag,
    wmag: &Mag,
    d: usize,
    p: Precision,
    hard_cap: usize,
) -> Option<(usize, Mag)> {
    let lq = qmag.log2_estimate();
    let lw = wmag.log2_estimate();
    if !(lq < 0.0) {
        return None;
    }
    let r = (d - 1) as f64;
    let target = -(p.bits() as f64 + 2.0);
    let mut n = 1usize;
    loop {
        if n > hard_cap {
            return None;
        }
        let e = ((n + 2) * (n + 2) / 4) as f64;
        let f = ((n + 1) / 2 + 1) as f64;
        let main_ok = e * lq + (n as f64 + 2.0) * lw < target;
        let alpha_ok = f * lq + lw + r / ((n as f64 + 2.0) * std::f64::consts::LN_2) < -1.0;
        if main_ok && alpha_ok {
            // Rigorous confirmation.
            let e_int = ((n + 2) * (n + 2) / 4) as u64;
            let f_int = ((n + 1) / 2 + 1) as u64;
            let main = qmag.pow_up(e_int).mul_up(&wmag.pow_up(n as u64 + 2));
            let exp_r = Mag::from_f64_upper((r / (n as f64 + 2.0)).exp() * (1.0 + 1e-12));
            let alpha = qmag.pow_up(f_int).mul_up(wmag).mul_up(&exp_r);
            if main.le(&Mag::two_exp(-(p.bits() as i64 + 2))) && alpha.le(&Mag::two_exp(-1)) {
                return Some((n, main));
            }
        }
        n += 1;
    }
}

/// The truncation order the series evaluation would pick for these
/// arguments (scanning without the evaluation-time ceiling) — a diagnostic
/// for the argument-reduction term-count claims.
pub fn series_term_count(
    z: &ComplexBall,
    tau: &ComplexBall,
    d: usize,
    p: Precision,
) -> Result<usize> {
    if !tau.im().definitely_positive() {
        return Err(Error::Domain("Im(tau) must be positive"));
    }
    let wp = p.plus(16);
    let q = exp_pi_i(tau, wp)?;
    let w = exp_pi_i(z, wp)?;
    let v = w.inv(wp)?;
    let qmag = q.ub_abs();
    let wmag = w.ub_abs().max(&v.ub_abs());
    choose_terms(&qmag, &wmag, d.max(1), p, 40_000_000)
        .map(|(n, _)| n)
        .ok_or(Error::ConvergenceFailure("theta series does not converge"))
}

/// Raw theta series at `(z, tau)` (no argument reduction), producing all
/// four functions with `d` derivative coefficients each.
pub fn theta_series_raw(
    z: &ComplexBall,
    tau: &ComplexBall,
    d: usize,
    p: Precision,
) -> Result<[BallSeries; 4]> {
    Ok(theta_series_details(z, tau, d, p, 0)?.theta)
}

/// As [`theta_series_raw`], with `extra_terms` forcing the summation past
/// the chosen truncation point (used by the bound-soundness tests) and
/// diagnostics in the output.
pub fn theta_series_details(
    z: &ComplexBall,
    tau: &ComplexBall,
    d: usize,
    p: Precision,
    extra_terms: usize,
) -> Result<ThetaSeries> {
    let d = d.max(1);
    if !tau.im().definitely_positive() {
        return Err(Error::Domain("Im(tau) must be positive"));
    }
    let wp = p.plus(32);

    let q4 = exp_pi_i(&tau.div_i64(4, wp)?, wp)?;
    let q = q4.pow_int(4, wp)?;
    let w = exp_pi_i(z, wp)?;
    let v = w.inv(wp)?;
    let qmag = q.ub_abs();
    let wmag = w.ub_abs().max(&v.ub_abs());

    let (n_terms, _) = choose_terms(&qmag, &wmag, d, p, n_max(p)).ok_or(
        Error::ConvergenceFailure("theta series needs too many terms; reduce the arguments"),
    )?;
    let n_terms = n_terms + extra_terms;

    // Error bounds per derivative order (for the unscaled accumulators).
    let e_int = ((n_terms + 2) * (n_terms + 2) / 4) as u64;
    let f_int = ((n_terms + 1) / 2 + 1) as u64;
    let r_top = (d - 1) as f64;
    let exp_r = Mag::from_f64_upper((r_top / (n_terms as f64 + 2.0)).exp() * (1.0 + 1e-12));
    let alpha = qmag.pow_up(f_int).mul_up(&wmag).mul_up(&exp_r);
    if !alpha.le(&Mag::two_exp(-1)) {
        return Err(Error::ConvergenceFailure("theta series tail ratio"));
    }
    let one = Mag::two_exp(0);
    let inv_gap = one.div_up(&one.sub_down(&alpha));
    let lead = qmag
        .pow_up(e_int)
        .mul_up(&wmag.pow_up(n_terms as u64 + 2))
        .mul_2exp(1)
        .mul_up(&inv_gap);
    let mut tail_bounds = Vec::with_capacity(d);
    let np2 = Mag::from_u64(n_terms as u64 + 2);
    let mut cur = lead;
    for _ in 0..d {
        tail_bounds.push(cur);
        cur = cur.mul_up(&np2);
    }

    // Precomputed even powers of w and v; the v array runs one entry
    // further because odd-k terms address v^(2n+2).
    let k_len = (n_terms + 3) / 2;
    let mut wpow: Vec<ComplexBall> = Vec::with_capacity(k_len + 1);
    let mut vpow: Vec<ComplexBall> = Vec::with_capacity(k_len + 2);
    let w2 = w.sqr(wp);
    let v2 = v.sqr(wp);
    wpow.push(ComplexBall::one(wp));
    vpow.push(ComplexBall::one(wp));
    for i in 1..=k_len {
        wpow.push(wpow[i - 1].mul(&w2, wp));
        vpow.push(vpow[i - 1].mul(&v2, wp));
    }
    vpow.push(vpow[k_len].mul(&v2, wp));

    let mut th: [Vec<ComplexBall>; 4] =
        std::array::from_fn(|_| vec![ComplexBall::zero(wp); d]);

    // q^m along the exponent schedule m = floor((k+2)^2/4).
    let mut qpow = q.clone();
    let mut qstep = q.clone();
    let mut step_exp = 1u64;
    for k in 0..n_terms {
        let n = k / 2 + 1;
        let mut t = wpow[n].add(&vpow[n + (k % 2)], wp).mul(&qpow, wp);
        let mut u = if k % 2 == 0 && d == 1 {
            ComplexBall::zero(wp)
        } else {
            wpow[n].sub(&vpow[n + (k % 2)], wp).mul(&qpow, wp)
        };
        let nsq4 = Integer::from(4 * (n as i64) * (n as i64));
        if k % 2 == 0 {
            let sign_neg = (k + 2) / 2 % 2 == 1;
            for r in 0..d {
                if r % 2 == 0 {
                    if r != 0 {
                        t = t.mul_integer(&nsq4, wp);
                    }
                    th[2][r] = th[2][r].add(&t, wp);
                    th[3][r] = if sign_neg {
                        th[3][r].sub(&t, wp)
                    } else {
                        th[3][r].add(&t, wp)
                    };
                } else {
                    if r == 1 {
                        u = u.mul_i64(2 * n as i64, wp);
                    } else {
                        u = u.mul_integer(&nsq4, wp);
                    }
                    th[2][r] = th[2][r].add(&u, wp);
                    th[3][r] = if sign_neg {
                        th[3][r].sub(&u, wp)
                    } else {
                        th[3][r].add(&u, wp)
                    };
                }
            }
        } else {
            let sign_neg = (k + 1) / 2 % 2 == 1;
            let odd = Integer::from(2 * n as i64 + 1);
            for r in 0..d {
                if r % 2 == 0 {
                    th[0][r] = if sign_neg {
                        th[0][r].sub(&u, wp)
                    } else {
                        th[0][r].add(&u, wp)
                    };
                    th[1][r] = th[1][r].add(&t, wp);
                } else {
                    th[0][r] = if sign_neg {
                        th[0][r].sub(&t, wp)
                    } else {
                        th[0][r].add(&t, wp)
                    };
                    th[1][r] = th[1][r].add(&u, wp);
                }
                if r + 1 < d {
                    t = t.mul_integer(&odd, wp);
                    u = u.mul_integer(&odd, wp);
                }
            }
        }
        // Advance q^m by the addition sequence.
        let gap = ((k + 3) / 2) as u64;
        while step_exp < gap {
            qstep = qstep.mul(&q, wp);
            step_exp += 1;
        }
        qpow = qpow.mul(&qstep, wp);
    }

    // Leading terms, error bounds and final scaling.
    let minus_i_q4 = q4.mul_i().neg();
    let pi_i = pi_i_times(&ComplexBall::one(wp), wp);
    let mut c_scale = ComplexBall::one(wp);
    for r in 0..d {
        let vs = if r % 2 == 0 { v.clone() } else { v.neg() };
        th[0][r] = th[0][r].mul(&w, wp).add(&w.sub(&vs, wp), wp);
        th[1][r] = th[1][r].mul(&w, wp).add(&w.add(&vs, wp), wp);
        for j in 0..4 {
            th[j][r].add_error_both(tail_bounds[r]);
        }
        if r > 0 {
            c_scale = c_scale
                .mul(&pi_i, wp)
                .div_integer(&Integer::from(r as i64), wp)?;
        }
        th[0][r] = th[0][r].mul(&minus_i_q4, wp).mul(&c_scale, wp);
        th[1][r] = th[1][r].mul(&q4, wp).mul(&c_scale, wp);
        th[2][r] = th[2][r].mul(&c_scale, wp);
        th[3][r] = th[3][r].mul(&c_scale, wp);
    }
    th[2][0] = th[2][0].add(&ComplexBall::one(wp), wp);
    th[3][0] = th[3][0].add(&ComplexBall::one(wp), wp);

    let theta = std::array::from_fn(|j: usize| {
        BallSeries::new(th[j].iter().map(|c| c.round(p)).collect()).expect("nonempty")
    });
    Ok(ThetaSeries {
        theta,
        terms: n_terms,
        tail_bounds,
    })
}

/// Jacobi theta functions with full argument reduction: reduce `tau` to the
/// fundamental domain, transform, reduce `z` modulo the lattice, evaluate
/// the series, and reassemble with all prefactors merged into a single
/// root of unity, constant and exponential series.
pub fn jacobi_theta(
    z: &ComplexBall,
    tau: &ComplexBall,
    d: usize,
    p: Precision,
) -> Result<[BallSeries; 4]> {
    let d = d.max(1);
    let wp = p.plus(32);
    let rt = reduce_fundamental(tau, wp)?;
    jacobi_theta_reduced(z, tau, &rt, d, p)
}

/// As [`jacobi_theta`], reusing an existing reduction of `tau`.
pub(crate) fn jacobi_theta_reduced(
    z: &ComplexBall,
    tau: &ComplexBall,
    rt: &ReducedTau,
    d: usize,
    p: Precision,
) -> Result<[BallSeries; 4]> {
    let d = d.max(1);
    let wp = p.plus(32);
    let z_series = BallSeries::linear(z.clone(), ComplexBall::one(wp)).resized(d, wp);
    let data = theta_transform(&rt.transform, &z_series, tau, wp)?;

    let z0 = data.z_prime.coeff(0);
    let raw = theta_series_raw(z0, &rt.tau_prime, d, wp)?;

    // Compose with the linear rescaling of the argument.
    let c1 = if data.z_prime.len() >= 2 {
        data.z_prime.coeff(1).clone()
    } else {
        ComplexBall::one(wp)
    };
    let needs_compose = data.z_prime.len() >= 2 && !c1.sub(&ComplexBall::one(wp), wp).contains_zero()
        || data.z_prime.len() >= 2;

    let prefactor = data.b_factor.mul_scalar(&data.a_factor, wp);
    let mut out: Vec<BallSeries> = Vec::with_capacity(4);
    for j in 0..4 {
        let unit = root_of_unity_8(data.r[j], wp)?;
        let base = if needs_compose {
            raw[data.s[j]].compose_linear(&c1, wp)
        } else {
            raw[data.s[j]].clone()
        };
        let assembled = base
            .mul(&prefactor, d, wp)
            .mul_scalar(&unit, wp);
        out.push(BallSeries::new(
            assembled.coeffs().iter().map(|c| c.round(p)).collect(),
        )?);
    }
    let mut it = out.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

use crate::modular::reduce_fundamental;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rug::Float;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn cb(re: f64, im: f64, bits: u32) -> ComplexBall {
        ComplexBall::from_f64(re, im, p(bits))
    }

    #[test]
    fn characters_of_simple_transforms() {
        // Identity: no prefactors, no permutation.
        let id = transform_characters(&ModularTransform::identity()).unwrap();
        assert_eq!(id.r, [0, 0, 0, 0]);
        assert_eq!(id.s, [0, 1, 2, 3]);

        // tau -> tau + 1: theta1, theta2 pick up exp(-pi i/4); theta3 and
        // theta4 swap.
        let t = transform_characters(&ModularTransform::from_i64(1, 1, 0, 1).unwrap()).unwrap();
        assert_eq!(t.r, [7, 7, 0, 0]);
        assert_eq!(t.s, [0, 1, 3, 2]);
    }

    #[test]
    fn transform_data_identity() {
        let p64 = p(64);
        let z = BallSeries::linear(cb(0.3, 0.1, 64), ComplexBall::one(p64));
        let tau = cb(0.1, 1.2, 64);
        let data = theta_transform(&ModularTransform::identity(), &z, &tau, p64).unwrap();
        assert_eq!(data.n_shift, 0);
        assert_eq!(data.s, [0, 1, 2, 3]);
        assert!(data
            .a_factor
            .contains_floats(&Float::with_val(64, 1), &Float::with_val(64, 0)));
        assert!(data
            .b_factor
            .coeff(0)
            .contains_floats(&Float::with_val(64, 1), &Float::with_val(64, 0)));
    }

    #[test]
    fn raw_series_theta1_vanishes_at_zero() {
        let p96 = p(96);
        let raw = theta_series_raw(&ComplexBall::zero(p96), &cb(0.0, 2.0, 96), 1, p96).unwrap();
        assert!(raw[0].coeff(0).contains_zero());
        // theta3(0, 2i) against the bilateral oracle
        let naive = oracle::naive_theta(&ComplexBall::zero(p96), &cb(0.0, 2.0, 96), 30, p96)
            .unwrap();
        for j in 0..4 {
            assert!(
                raw[j].coeff(0).overlaps(&naive[j]),
                "theta{} mismatch: {} vs {}",
                j + 1,
                raw[j].coeff(0),
                naive[j]
            );
        }
    }

    #[test]
    fn raw_series_matches_naive_with_z() {
        let p96 = p(96);
        let z = cb(0.17, 0.21, 96);
        let tau = cb(0.3, 1.1, 96);
        let raw = theta_series_raw(&z, &tau, 1, p96).unwrap();
        let naive = oracle::naive_theta(&z, &tau, 40, p96).unwrap();
        for j in 0..4 {
            assert!(
                raw[j].coeff(0).overlaps(&naive[j]),
                "theta{}: {} vs {}",
                j + 1,
                raw[j].coeff(0),
                naive[j]
            );
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p160 = p(160);
        let z = cb(0.13, 0.07, 160);
        let tau = cb(-0.2, 1.3, 160);
        let series = theta_series_raw(&z, &tau, 4, p160).unwrap();
        // Compare coefficient 1 (the first derivative) of theta3 with a
        // central difference of coefficient 0.
        let h = 1e-8;
        let zp = cb(0.13 + h, 0.07, 160);
        let zm = cb(0.13 - h, 0.07, 160);
        let fp = theta_series_raw(&zp, &tau, 1, p160).unwrap();
        let fm = theta_series_raw(&zm, &tau, 1, p160).unwrap();
        let diff = fp[2].coeff(0).sub(fm[2].coeff(0), p160);
        let deriv_fd = (
            diff.re().mid().to_f64() / (2.0 * h),
            diff.im().mid().to_f64() / (2.0 * h),
        );
        let deriv = series[2].coeff(1);
        assert!((deriv.re().mid().to_f64() - deriv_fd.0).abs() < 1e-6);
        assert!((deriv.im().mid().to_f64() - deriv_fd.1).abs() < 1e-6);
    }

    #[test]
    fn full_pipeline_periodicity() {
        let p128 = p(128);
        // theta3(z + 1, tau) = theta3(z, tau)
        let tau = cb(0.0, 1.0, 128);
        let a = jacobi_theta(&cb(0.2, 0.1, 128), &tau, 1, p128).unwrap();
        let b = jacobi_theta(&cb(1.2, 0.1, 128), &tau, 1, p128).unwrap();
        assert!(a[2].coeff(0).overlaps(b[2].coeff(0)));

        // theta1 is odd: theta1(-z) = -theta1(z) at tau = 1/2 + i.
        let tau = cb(0.5, 1.0, 128);
        let plus = jacobi_theta(&cb(0.3, 0.0, 128), &tau, 1, p128).unwrap();
        let minus = jacobi_theta(&cb(-0.3, 0.0, 128), &tau, 1, p128).unwrap();
        assert!(plus[0].coeff(0).neg().overlaps(minus[0].coeff(0)));
    }

    #[test]
    fn quasiperiodicity_in_tau_direction() {
        let p128 = p(128);
        // theta3(z + tau, tau) = e^(-pi i(tau + 2z)) theta3(z, tau)
        let tau = cb(0.0, 1.0, 128);
        let z = cb(0.1, 0.0, 128);
        let lhs = jacobi_theta(&cb(0.1, 1.0, 128), &tau, 1, p128).unwrap();
        let arg = tau.add(&z.mul_2exp(1), p128).neg();
        let factor = exp_pi_i(&arg, p128).unwrap();
        let rhs_all = jacobi_theta(&z, &tau, 1, p128).unwrap();
        for (j, flip) in [(0usize, true), (1, false), (2, false), (3, true)] {
            let mut rhs = rhs_all[j].coeff(0).mul(&factor, p128);
            if flip {
                rhs = rhs.neg();
            }
            assert!(
                lhs[j].coeff(0).overlaps(&rhs),
                "theta{}: {} vs {}",
                j + 1,
                lhs[j].coeff(0),
                rhs
            );
        }
    }

    #[test]
    fn transform_reassembly_matches_direct_series() {
        // g = S: reassembled theta_j(z, tau) from data at (z', tau') must
        // match the direct series at the original arguments.
        let p128 = p(128);
        let z = cb(0.3, 0.0, 128);
        let tau = cb(0.0, 2.0, 128);
        let g = ModularTransform::from_i64(0, -1, 1, 0).unwrap();
        let zs = BallSeries::linear(z.clone(), ComplexBall::one(p128));
        let data = theta_transform(&g, &zs, &tau, p128).unwrap();
        let tau_prime = g.apply(&tau, p128).unwrap();
        let raw = theta_series_raw(data.z_prime.coeff(0), &tau_prime, 1, p128).unwrap();
        let direct = theta_series_raw(&z, &tau, 1, p128).unwrap();
        let prefactor = data.b_factor.coeff(0).mul(&data.a_factor, p128);
        for j in 0..4 {
            let unit = root_of_unity_8(data.r[j], p128).unwrap();
            let lhs = unit.mul(&prefactor, p128).mul(raw[data.s[j]].coeff(0), p128);
            assert!(
                lhs.overlaps(direct[j].coeff(0)),
                "theta{}: {} vs {}",
                j + 1,
                lhs,
                direct[j].coeff(0)
            );
        }
    }

    #[test]
    fn transform_reassembly_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p128 = p(128);
        let mut checked = 0;
        while checked < 25 {
            let mut g = ModularTransform::identity();
            for _ in 0..rng.gen_range(1..5) {
                let k: i64 = rng.gen_range(-2..=2);
                g = ModularTransform::from_i64(1, k, 0, 1).unwrap().compose(&g);
                if rng.gen_bool(0.7) {
                    g = ModularTransform::from_i64(0, -1, 1, 0).unwrap().compose(&g);
                }
            }
            let (_, _, _, _) = g.entries();
            let z = cb(rng.gen_range(-0.3..0.3), rng.gen_range(-0.2..0.2), 128);
            let tau = cb(rng.gen_range(-0.4..0.4), rng.gen_range(0.8..1.6), 128);
            let tau_prime = match g.apply(&tau, p128) {
                Ok(t) if t.im().definitely_positive() => t,
                _ => continue,
            };
            let zs = BallSeries::linear(z.clone(), ComplexBall::one(p128));
            let data = match theta_transform(&g, &zs, &tau, p128) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let raw = theta_series_raw(data.z_prime.coeff(0), &tau_prime, 1, p128).unwrap();
            let direct = theta_series_raw(&z, &tau, 1, p128).unwrap();
            let prefactor = data.b_factor.coeff(0).mul(&data.a_factor, p128);
            for j in 0..4 {
                let unit = root_of_unity_8(data.r[j], p128).unwrap();
                let lhs = unit.mul(&prefactor, p128).mul(raw[data.s[j]].coeff(0), p128);
                assert!(
                    lhs.overlaps(direct[j].coeff(0)),
                    "g = {:?}, theta{}",
                    g.entries(),
                    j + 1
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn term_counts_reproduce_reduction_gains() {
        let p53 = p(53);
        let z = cb(3.14, 2.78, 64);
        let tau = cb(0.07, 0.003, 64);
        // Unreduced: thousands of terms.
        let raw_terms = series_term_count(&z, &tau, 1, p53).unwrap();
        assert!(
            (3525..=3896).contains(&raw_terms),
            "unreduced terms {}",
            raw_terms
        );
        // Direct evaluation at those arguments must refuse.
        assert!(matches!(
            theta_series_raw(&z, &tau, 1, p53),
            Err(Error::ConvergenceFailure(_))
        ));

        // After the modular reduction alone: a few hundred.
        let rt = reduce_fundamental(&tau, p(64)).unwrap();
        let ctd = rt.transform.c_tau_d(&tau, p(64));
        let z_prime = z.neg().div(&ctd, p(64)).unwrap();
        let mid_terms = series_term_count(&z_prime, &rt.tau_prime, 1, p53).unwrap();
        assert!(
            (236..=262).contains(&mid_terms),
            "tau-reduced terms {}",
            mid_terms
        );

        // Full reduction: single digits.
        let zs = BallSeries::linear(z.clone(), ComplexBall::one(p(64)));
        let data = theta_transform(&rt.transform, &zs, &tau, p(64)).unwrap();
        let final_terms =
            series_term_count(data.z_prime.coeff(0), &rt.tau_prime, 1, p53).unwrap();
        assert!(final_terms <= 8, "fully reduced terms {}", final_terms);
    }

    #[test]
    fn theta_constants_agree_with_pipeline_at_z0() {
        let p128 = p(128);
        let tau = cb(0.0, 2.0, 128);
        let series = jacobi_theta(&ComplexBall::zero(p128), &tau, 2, p128).unwrap();
        let (t2, t3, t4) = crate::modular::theta_constants(&tau, p128).unwrap();
        assert!(series[1].coeff(0).overlaps(&t2));
        assert!(series[2].coeff(0).overlaps(&t3));
        assert!(series[3].coeff(0).overlaps(&t4));
        // theta1'(0) = pi theta2 theta3 theta4
        let lhs = series[0].coeff(1);
        let rhs = t2
            .mul(&t3, p128)
            .mul(&t4, p128)
            .mul_real(&RealBall::pi(p128), p128);
        assert!(lhs.overlaps(&rhs), "{} vs {}", lhs, rhs);
    }
}
