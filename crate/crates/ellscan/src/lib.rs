//! Elliptic-curve group structures over prime fields, splitting scans, and
//! sieve-constant numerics.
//!
//! Modules build bottom-up: `arith` (exact integer primitives), `curves`
//! (point counting and (d1, d2) structure), `split` (admissible traces,
//! splitting sets, the outside-prime scanner), `analytic` (summatory main
//! terms and discrepancy scans), `buchstab` (omega(u) numerics, exponent
//! regions, sieve constants), plus `cache` and `report` plumbing for the CLI.

pub mod analytic;
pub mod arith;
pub mod buchstab;
pub mod cache;
pub mod curves;
pub mod error;
pub mod report;
pub mod split;

pub use error::{Error, Result};
