//! Truncated power series with complex-ball coefficients.
//!
//! Used for z-derivatives of theta functions and related functions: a series
//! of length `D` carries the Taylor coefficients `f(z+x)` through `x^(D-1)`.

use super::complex::ComplexBall;
use super::eval::ball_exp;
use super::Precision;
use crate::error::{Error, Result};
use rug::Integer;

#[derive(Debug, Clone, PartialEq)]
pub struct BallSeries {
    coeffs: Vec<ComplexBall>,
}

impl BallSeries {
    /// Builds a series from coefficients; at least one is required.
    pub fn new(coeffs: Vec<ComplexBall>) -> Result<BallSeries> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("series needs at least one term"));
        }
        Ok(BallSeries { coeffs })
    }

    pub fn zero(len: usize, p: Precision) -> BallSeries {
        BallSeries {
            coeffs: vec![ComplexBall::zero(p); len.max(1)],
        }
    }

    pub fn one(len: usize, p: Precision) -> BallSeries {
        let mut s = BallSeries::zero(len, p);
        s.coeffs[0] = ComplexBall::one(p);
        s
    }

    /// Constant series (length 1).
    pub fn constant(c: ComplexBall) -> BallSeries {
        BallSeries { coeffs: vec![c] }
    }

    /// The linear series `c0 + c1 x`.
    pub fn linear(c0: ComplexBall, c1: ComplexBall) -> BallSeries {
        BallSeries {
            coeffs: vec![c0, c1],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeff(&self, r: usize) -> &ComplexBall {
        &self.coeffs[r]
    }

    pub fn coeff_mut(&mut self, r: usize) -> &mut ComplexBall {
        &mut self.coeffs[r]
    }

    pub fn coeffs(&self) -> &[ComplexBall] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ComplexBall> {
        self.coeffs
    }

    /// Truncates or zero-pads to length `len`.
    pub fn resized(&self, len: usize, p: Precision) -> BallSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(len.max(1));
        while coeffs.len() < len.max(1) {
            coeffs.push(ComplexBall::zero(p));
        }
        BallSeries { coeffs }
    }

    pub fn add(&self, other: &BallSeries, p: Precision) -> BallSeries {
        let len = self.len().max(other.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.coeffs.get(k);
            let b = other.coeffs.get(k);
            out.push(match (a, b) {
                (Some(a), Some(b)) => a.add(b, p),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        BallSeries { coeffs: out }
    }

    pub fn neg(&self) -> BallSeries {
        BallSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    /// Product truncated to `len` coefficients.
    pub fn mul(&self, other: &BallSeries, len: usize, p: Precision) -> BallSeries {
        let len = len.max(1);
        let mut out = vec![ComplexBall::zero(p); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].add(&a.mul(b, p), p);
            }
        }
        BallSeries { coeffs: out }
    }

    pub fn mul_scalar(&self, c: &ComplexBall, p: Precision) -> BallSeries {
        BallSeries {
            coeffs: self.coeffs.iter().map(|a| a.mul(c, p)).collect(),
        }
    }

    /// Division truncated to `len` coefficients; the divisor's constant term
    /// must exclude zero.
    pub fn div(&self, other: &BallSeries, len: usize, p: Precision) -> Result<BallSeries> {
        let len = len.max(1);
        let b0 = &other.coeffs[0];
        if b0.contains_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out: Vec<ComplexBall> = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self
                .coeffs
                .get(k)
                .cloned()
                .unwrap_or_else(|| ComplexBall::zero(p));
            for j in 1..=k {
                if let Some(bj) = other.coeffs.get(j) {
                    acc = acc.sub(&bj.mul(&out[k - j], p), p);
                }
            }
            out.push(acc.div(b0, p)?);
        }
        Ok(BallSeries { coeffs: out })
    }

    /// Power-series exponential truncated to `len` coefficients.
    ///
    /// The constant term is exponentiated with the ball exponential; the rest
    /// follows the recurrence `g' = f' g`.
    pub fn exp(&self, len: usize, p: Precision) -> Result<BallSeries> {
        let len = len.max(1);
        let g0 = ball_exp(&self.coeffs[0], p)?;
        let mut out = vec![g0; 1];
        for k in 1..len {
            let mut acc = ComplexBall::zero(p);
            for j in 1..=k {
                if let Some(fj) = self.coeffs.get(j) {
                    let term = fj.mul_integer(&Integer::from(j), p).mul(&out[k - j], p);
                    acc = acc.add(&term, p);
                }
            }
            out.push(acc.div_integer(&Integer::from(k), p)?);
        }
        Ok(BallSeries { coeffs: out })
    }

    /// Composition with the linear map `x -> c x`: coefficient `r` picks up
    /// the factor `c^r`.
    pub fn compose_linear(&self, c: &ComplexBall, p: Precision) -> BallSeries {
        let mut out = Vec::with_capacity(self.len());
        let mut cp = ComplexBall::one(p);
        for (r, a) in self.coeffs.iter().enumerate() {
            if r == 0 {
                out.push(a.clone());
            } else {
                cp = cp.mul(c, p);
                out.push(a.mul(&cp, p));
            }
        }
        BallSeries { coeffs: out }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::new(96).unwrap()
    }

    fn from_f64(v: &[f64]) -> BallSeries {
        BallSeries::new(
            v.iter()
                .map(|&x| ComplexBall::from_f64(x, 0.0, p()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn mul_div_round_trip() {
        let a = from_f64(&[1.0, 2.0, -0.5, 0.25]);
        let b = from_f64(&[2.0, -1.0, 0.125, 3.0]);
        let ab = a.mul(&b, 4, p());
        let back = ab.div(&b, 4, p()).unwrap();
        for k in 0..4 {
            assert!(back.coeff(k).overlaps(a.coeff(k)), "coeff {}", k);
        }
    }

    #[test]
    fn exp_of_linear_series() {
        // exp(x) = 1 + x + x^2/2 + x^3/6
        let f = from_f64(&[0.0, 1.0, 0.0, 0.0]);
        let g = f.exp(4, p()).unwrap();
        for (k, den) in [(0usize, 1u32), (1, 1), (2, 2), (3, 6)] {
            let e = rug::Float::with_val(160, 1u32) / den;
            assert!(g.coeff(k).re().contains_float(&e), "coeff {}", k);
        }
    }

    #[test]
    fn compose_linear_scales_coefficients() {
        let f = from_f64(&[3.0, 1.0, 1.0]);
        let c = ComplexBall::from_f64(0.5, 0.0, p());
        let g = f.compose_linear(&c, p());
        assert!(g
            .coeff(2)
            .re()
            .contains_float(&rug::Float::with_val(64, 0.25)));
    }
}
