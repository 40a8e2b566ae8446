//! Exact sparse polynomial arithmetic with total-degree truncation, graded
//! components, and formal coordinate maps.

pub mod coordmap;
pub mod linalg;
mod monomial;
mod truncated;

pub use coordmap::{invert_map, substitute, CoordMap};
pub use monomial::Monomial;
pub use truncated::TruncatedPoly;

/// Exact arbitrary-precision rational, always kept in lowest terms.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}
