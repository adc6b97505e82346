//! Numerics for the growth of sequences of entire functions of finite order.
//!
//! * [`efun`]: Hadamard-data representation, evaluation, zero counts, degree.
//! * [`growth`]: circle indicators `C(f,R)`, `||f||_R`, Jensen and
//!   argument-principle oracles.
//! * [`seqlab`]: sequence-level constants, tail power sums, the two-way
//!   classifier, growth bounds and power sums from log-derivatives.
//! * [`potential`]: capacity of point clouds, the capacity growth exponent
//!   and a dyadic thinness probe.
//! * [`laplace`]: truncated Laplace transforms of compactly supported
//!   kernels, their zeros and the first-moment identity.
//! * [`series`]: grouped power series and their convergence region.
//! * [`cli`]: the `entgrowth` command-line front end.

pub mod error;
pub mod numeric;

pub mod efun;
pub mod growth;
pub mod laplace;
pub mod potential;
pub mod seqlab;
pub mod series;

pub mod cli;
pub mod report;
pub mod schema;

pub use error::{Error, Result};

#[cfg(test)]
mod properties;
