//! Numerical laboratory for universal dynamical control.
//!
//! A control sequence that suppresses system-bath errors to `O(T^{N+1})` for
//! every time-independent bath also does so for analytically time-dependent
//! baths. This crate checks that statement numerically and builds the
//! machinery behind it:
//!
//! - [`linalg`]: dense and sparse complex operators, matrix exponential,
//!   Gram-rank certification.
//! - [`models`]: static and polynomial time-dependent system-bath
//!   Hamiltonians, random bounded baths, drift absorption.
//! - [`control`]: instantaneous-pulse sequences (free, periodic, UDD) and the
//!   toggling frame.
//! - [`dyson`]: nested commutators, nested system integrals, bath products,
//!   the interaction-picture Taylor recursion, truncated error propagators
//!   and order-condition checks.
//! - [`witness`]: the sparse operator family whose products are linearly
//!   independent, and the witness bath built from it.
//! - [`lab`]: exact propagation, error propagators, commutant distances and
//!   log-log power-law fits.
//! - [`config`]: the JSON experiment runner behind the `tdcontrol` binary.

pub mod config;
pub mod control;
pub mod dyson;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod models;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{ComplexOperator, HermitianOperator, SparseOperator, C64};
