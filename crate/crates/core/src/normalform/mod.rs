//! Formal normal forms: classification of the linear part of an
//! (n−1)-vector, the degree-by-degree reduction to
//! `{x_1,…,x_{n−1}} = y`, `{x_1,…,x̂_i,…,y} = (−1)^{n−i}(∂_i f + y∂_i g)`,
//! the reduction of `yᵖdy + Σ A_i dx_i` to y-degree p, its p = 2
//! factorization, and pullback verification.
//!
//! Coordinates are `(x_1, …, x_{n−1}, y)` with `y = x_n`. Maps returned as
//! `substitution`/`accumulated` give the old coordinates as functions of the
//! new ones; a change of variables acts on the dual form by
//! `ω ↦ φ*ω / det Dφ`.
//!
//! The reduction runs cap − 1 stages; everything is exact modulo the cap
//! and potentials carry cap + 1.

mod engine;
mod linear;
mod poincare;
mod pullback;
mod reduce;

pub use engine::{
    bracket_sign, lemma_step, normal_form, prepare_y, transform, BracketState, NormalFormResult,
};
pub use linear::{classify_linear_part, linear_matrix, LinearClass, LinearClassification};
pub use poincare::poincare_solve;
pub use pullback::{verify_pullback, verify_pullback_along};
pub use reduce::{p2_factor, reduce_p, P2Factors, ReduceResult};

#[cfg(test)]
mod tests;
