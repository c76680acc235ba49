//! Exact computation of 2-adic slopes of Hecke operators on modular forms of
//! level 1 and of the U operator on overconvergent forms of weight 0.
//!
//! All arithmetic is over big integers and rationals; no floating point is
//! used for any reported value.

pub mod classical;
pub mod error;
pub mod linalg;
pub mod newton;
pub mod qseries;
pub mod report;
pub mod spectral;
pub mod valuation;

pub use error::{Error, Result};
pub use linalg::{CoefficientBound, RationalMatrix};
pub use newton::{NewtonPolygon, SlopeSequence, SlopeSource};
pub use qseries::{FPolynomial, QSeries};
pub use report::{Outcome, VerificationReport};
pub use valuation::Valuation;
