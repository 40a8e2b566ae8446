//! Differential forms and multivector fields with truncated polynomial
//! coefficients.
//!
//! Sign conventions (used everywhere in the crate):
//!
//! * Interior products contract from the left:
//!   `i_{∂_I}(dx_I ∧ β) = β`, hence `i_{A∧B} = i_B ∘ i_A`.
//!   For example `i_{∂1∧∂2}(dx1∧dx2∧dx3) = dx3`.
//! * Multivectors are contracted by forms with the same rule, and
//!   `Λ(df_1, ..., df_r)` is the full contraction by `df_1 ∧ ... ∧ df_r`,
//!   so `Λ(dx_{i1}, ..., dx_{ir}) = Λ^{i1...ir}` for increasing indices.
//! * Duality with a volume form `Ω = ρ dx_1∧...∧dx_n` is `Λ ↦ i_Λ Ω`.
//!   For a bivector in three variables, `x ∂1∧∂2 ↦ x dx3`.
//! * The Schouten bracket satisfies `[X, f] = X(f)`, agrees with the Lie
//!   bracket on vector fields, and obeys
//!   `[A, B] = −(−1)^{(a−1)(b−1)} [B, A]`.
//!
//! With these choices an (n−1)-vector Λ and `ω = i_Λ Ω` satisfy
//! `ω = Σ_i (−1)^{n−i} {x_1, ..., x̂_i, ..., x_n} dx_i`.

mod alt;
mod calculus;
mod transport;

pub use alt::{sort_with_sign, split_sign, AltField, Co, Contra, DiffForm, MultiVector, Variance};
pub use calculus::{
    apply_vector_field, contract, differential, evaluate, exterior_derivative, form_to_mv,
    interior, mv_to_form, schouten, wedge_differentials, VolumeForm,
};
pub use transport::{pullback, pullback_along, pullback_with, pushforward};
