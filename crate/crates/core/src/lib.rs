//! Truncated Fibonacci/Lucas/Apéry-weighted hypergeometric sums, their
//! conjectured supercongruences modulo prime powers, and certified
//! evaluation of the matching series for `1/pi` and `1/pi^2`.
//!
//! The arithmetic core is generic: sums stream through any
//! [`scalar::KernelCarrier`] and series through any [`scalar::Real`]. The
//! aliases below fix the concrete carriers used by the harness.

pub mod bigfloat;
pub mod cli;
pub mod congruences;
pub mod error;
pub mod quadratic;
pub mod residue;
pub mod scalar;
pub mod selftest;
pub mod sequences;
pub mod series;
pub mod sums;

pub use bigfloat::BigFloat;
pub use error::{Error, Result};
pub use quadratic::QuadraticNumber;
pub use residue::{PadicScaled, Residue, Ring, RingDescriptor};

/// Exact rationals.
pub type Rational = num_rational::BigRational;
/// Kernel values as exact rationals.
pub type ExactKernel = sequences::KernelStream<Rational>;
/// Kernel values modulo `p^K` with the `p`-part split off.
pub type ModularKernel = sequences::KernelStream<PadicScaled>;
/// Summands as exact rationals.
pub type ExactTerms = sums::TermStream<Rational>;
/// Summands modulo `p^K`.
pub type ModularTerms = sums::TermStream<PadicScaled>;
/// Series terms at arbitrary precision.
pub type PreciseTerms = series::SeriesTerms<BigFloat>;
/// Series terms in double precision.
pub type FastTerms = series::SeriesTerms<f64>;
