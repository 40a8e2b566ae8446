use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{pullback_along, DiffForm};
use crate::poly::TruncatedPoly;
use crate::report::{Check, Verdict};

/// True iff `unit · w = φ*w2` modulo the cap, for `φ(x, y) = (h(x), y)`
/// with `y = x_n`; `w2` lives in two variables `(u, v)`.
pub fn verify_pullback(
    w: &DiffForm,
    h: &TruncatedPoly,
    w2: &DiffForm,
    unit: &TruncatedPoly,
) -> Result<Verdict> {
    let n = w.n_vars();
    if w2.n_vars() != 2 {
        return Err(Error::Precondition(format!(
            "the target form must live in 2 variables, not {}",
            w2.n_vars()
        )));
    }
    let y = TruncatedPoly::var(n - 1, n, w.cap());
    verify_pullback_along(w, &[h.clone(), y], w2, unit)
}

/// True iff `unit · w = φ*w2` modulo the cap for polynomial components
/// `φ = (φ_1..φ_k)` in the variables of `w`.
pub fn verify_pullback_along(
    w: &DiffForm,
    comps: &[TruncatedPoly],
    w2: &DiffForm,
    unit: &TruncatedPoly,
) -> Result<Verdict> {
    let (n, cap) = (w.n_vars(), w.cap());
    if unit.constant_term().is_zero() {
        return Err(Error::NotUnit);
    }
    if w2.n_vars() != comps.len() || w2.degree() != w.degree() {
        return Err(Error::Precondition(format!(
            "target form has {} variables and degree {}; expected {} and {}",
            w2.n_vars(),
            w2.degree(),
            comps.len(),
            w.degree()
        )));
    }
    for c in comps.iter().chain([unit]) {
        if c.n_vars() != n {
            return Err(Error::ShapeMismatch {
                left_n: n,
                left_cap: cap,
                right_n: c.n_vars(),
                right_cap: c.cap(),
            });
        }
    }
    let comps: Vec<TruncatedPoly> = comps.iter().map(|c| c.with_cap(cap)).collect();
    let back = pullback_along(&w2.with_cap(cap), &comps)?;
    let lhs = w.mul_fn(&unit.with_cap(cap));
    Ok(Verdict::single(Check::zero_field(
        "unit*w = phi^*w2",
        &(lhs - back),
    )))
}
