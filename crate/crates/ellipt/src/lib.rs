//! Arbitrary-precision elliptic functions, Jacobi theta functions, modular
//! forms, the complex arithmetic-geometric mean and complete/incomplete
//! elliptic integrals, all returning midpoint-radius ball enclosures with
//! rigorous truncation bounds.
//!
//! Every public operation takes an explicit working precision and returns a
//! ball guaranteed to contain the exact value; series truncations carry
//! pen-and-paper tail bounds folded into the radius. Non-rigorous numerical
//! verification engines (quadrature, unreduced series) live in [`oracle`].

pub mod agm;
pub mod ball;
pub mod carlson;
pub mod error;
pub mod modular;
pub mod oracle;
pub mod theta;
pub mod weierstrass;

pub use ball::{BallSeries, ComplexBall, Mag, OnStraddle, Precision, RealBall};
pub use error::{Error, Result};
