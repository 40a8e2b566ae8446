//! Exact formal calculus for Nambu tensors and integrable 1-forms.
//!
//! Everything is computed over rationals with polynomial coefficients
//! truncated at a total-degree cap; no floating point is used anywhere.

pub mod cli;
pub mod error;
pub mod exterior;
pub mod nambu;
pub mod normalform;
pub mod poly;
pub mod quadratic;
pub mod report;
pub mod testgen;

pub use error::{Error, Result};
