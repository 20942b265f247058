//! Numerical kernels for the linear-sieve differential-difference system
//! `s f_n(s) = ∫_s^∞ f_{n-1}(t-1) dt`: reference solvers, certified grid
//! majorants for `c_n`, and the constants derived from them.

pub mod analytic;
pub mod config;
pub mod emit;
pub mod error;
pub mod majorant;
pub mod oracle;
pub mod quadrature;
pub mod search;
pub mod sieve;
pub mod table;
pub mod taylor;

pub use error::{Result, SieveError};
