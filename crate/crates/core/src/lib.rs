//! Outage probabilities of weighted sums of i.i.d. unit-rate exponentials,
//! the power allocations that minimize them, and the numerical identities
//! behind the minimizer's optimality.
//!
//! The crate has three layers:
//!
//! - [`hypoexp`]: the distribution itself (density, cdf, derivatives, mode),
//!   stable across repeated and nearly repeated weights, with the scaled
//!   Erlang outage as the special case driving the allocator.
//! - [`calculus`] and [`allocator`]: the gradient and stationarity
//!   machinery, and the closed-form optimal number of active channels with
//!   crossing thresholds and the step table.
//! - [`proof_lab`], [`oracle`], [`checks`]: the one-parameter families and
//!   sign conditions used to certify optimality, independent ground-truth
//!   backends (simplex brute force, Monte Carlo, Fourier inversion), and
//!   named verification suites over all of it.

// Published constants are quoted at full precision, and negated comparisons
// are deliberate where they must reject NaN.
#![allow(clippy::excessive_precision)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cf;
mod error;

pub mod allocator;
pub mod calculus;
pub mod checks;
pub mod hypoexp;
pub mod oracle;
pub mod proof_lab;
pub mod special;

pub use error::{Error, Result};
pub use hypoexp::{erlang_outage, Atom, ModeResult, WeightedExpSum, Weights};
