//! Numerical toolkit for moments of Dirichlet character sums, their Steinhaus
//! random multiplicative model, and the proxy machinery used to bound them
//! from below.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod charsum;
pub mod cli;
pub mod dirichlet_poly;
pub mod error;
pub mod euler;
pub mod modarith;
pub mod moments;
pub mod primes;
pub mod proxy;
pub mod quadrature;
pub mod rmf;
pub mod source;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};
pub use modarith::{CharacterIndex, Parity, PrimeModulus};
pub use rmf::RmfSample;
pub use source::MultiplicativeSource;
