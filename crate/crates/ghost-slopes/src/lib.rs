//! Exact computation of slope sequences of (abstract and classical) modular
//! forms from the ghost series.
//!
//! Two independent routes are provided and cross-checked:
//! - the Newton polygon of the ghost series evaluated at integer weight
//!   points ([`newton::np_slopes`]), and
//! - a recursive slope algorithm assembled from finite-sequence combinators
//!   ([`slopes_algo::variant_slopes`]).
//!
//! Everything is exact: valuations are integers (or infinity), slopes are
//! rationals, and no floating point is used anywhere.

pub mod arith;
pub mod cli;
pub mod context;
pub mod dims;
pub mod error;
pub mod ghost;
pub mod newton;
pub mod seqops;
pub mod slopes_algo;
pub mod verify;

pub use arith::Valuation;
pub use context::Ctx;
pub use dims::{CharIndex, DimTriple, GhostParams};
pub use error::Error;
pub use newton::{NewtonPolygon, SlopeSeq};
pub use seqops::Seq;
pub use slopes_algo::CompatFlags;

/// Exact rational used for slopes and Newton-polygon arithmetic.
pub type Rat = num_rational::Rational64;

pub type Result<T> = std::result::Result<T, Error>;
