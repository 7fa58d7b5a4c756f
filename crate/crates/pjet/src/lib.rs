//! Exact symbolic engine for p-derivations, jet polynomials, and the
//! arithmetic jet spaces of p-power kernels of isogenies of formal groups.
//!
//! The crate is organized bottom-up: exact and p-adic integer arithmetic
//! (`arith`), jet polynomials with the Frobenius lift and p-derivation
//! (`poly`), filtration membership tests (`filtration`), Groebner-based
//! computation over F_p (`fp`), truncated power series (`series`), jet-space
//! presentations of the relevant group schemes (`jet`), and the verification
//! suites (`verify`) that the `pjet` CLI exposes.

pub mod arith;
pub mod error;
pub mod filtration;
pub mod fp;
pub mod jet;
pub mod poly;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
