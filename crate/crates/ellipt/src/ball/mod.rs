//! Midpoint-radius ball arithmetic over an MPFR big-float backend.
//!
//! The midpoint carries the working precision; the radius is a low-precision
//! magnitude rounded outward. Everything downstream (theta functions, modular
//! forms, elliptic integrals) is built on the guarantee that each operation
//! returns a ball containing the exact image of its input sets.

pub mod complex;
pub mod eval;
pub mod fmt;
pub mod mag;
pub mod real;
pub mod series;

pub use complex::{ComplexBall, OnStraddle};
pub use eval::{ball_exp, exp_pi_i, geometric_tail_bound, rect_split_eval, rect_split_eval_counted};
pub use mag::Mag;
pub use real::RealBall;
pub use series::BallSeries;

use crate::error::{Error, Result};

/// Working precision in bits, threaded explicitly through every operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    /// Creates a precision; at least 2 bits are required.
    pub fn new(bits: u32) -> Result<Precision> {
        if bits < 2 {
            return Err(Error::InvalidArgument("precision must be at least 2 bits"));
        }
        Ok(Precision(bits))
    }

    /// Infallible constructor clamping to the minimum.
    pub fn raw(bits: u32) -> Precision {
        Precision(bits.max(2))
    }

    /// Precision sufficient to carry `digits` significant decimal digits.
    pub fn from_digits(digits: u32) -> Precision {
        // log2(10) = 3.3219...
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32;
        Precision::raw(bits + 8)
    }

    #[inline]
    pub fn bits(&self) -> u32 {
        self.0
    }

    /// Adds guard bits.
    pub fn plus(&self, extra: u32) -> Precision {
        Precision(self.0.saturating_add(extra))
    }

    /// Scales the precision by a rational factor, rounding up.
    pub fn scale(&self, num: u32, den: u32) -> Precision {
        Precision::raw(((self.0 as u64 * num as u64 + den as u64 - 1) / den as u64) as u32)
    }
}
