use super::alt::{DiffForm, MultiVector};
use super::calculus::{form_to_mv, mv_to_form, VolumeForm};
use crate::error::{Error, Result};
use crate::poly::coordmap::inverse_poly_matrix;
use crate::poly::{CoordMap, TruncatedPoly};

/// Pullback of a form along `φ`, given the components of `φ` and its
/// Jacobian `jac[i][j] = ∂φ_i/∂x_j` separately. Components and Jacobian
/// live in the target variables; the form lives in `comps.len()` variables.
pub fn pullback_with(
    w: &DiffForm,
    comps: &[TruncatedPoly],
    jac: &[Vec<TruncatedPoly>],
) -> Result<DiffForm> {
    if comps.len() != w.n_vars() || jac.len() != w.n_vars() {
        return Err(Error::ShapeMismatch {
            left_n: w.n_vars(),
            left_cap: w.cap(),
            right_n: comps.len(),
            right_cap: comps.first().map(|c| c.cap()).unwrap_or(w.cap()),
        });
    }
    let first = comps
        .first()
        .ok_or_else(|| Error::Precondition("empty map".into()))?;
    let (m, cap) = (first.n_vars(), first.cap());
    let dphi: Vec<DiffForm> = jac
        .iter()
        .map(|row| {
            DiffForm::from_terms(
                m,
                cap,
                1,
                row.iter().enumerate().map(|(j, p)| (vec![j], p.clone())),
            )
        })
        .collect();
    let mut out = DiffForm::zero(m, cap, w.degree());
    for (idx, f) in w.terms() {
        let c = f.compose(comps)?;
        if c.is_zero() {
            continue;
        }
        let mut piece = DiffForm::scalar(c);
        for &i in idx {
            piece = piece.wedge(&dphi[i]);
            if piece.is_zero() {
                break;
            }
        }
        out += piece;
    }
    Ok(out)
}

/// Pullback along polynomial components `φ = (φ_1, ..., φ_k)` expressed in
/// another set of variables (for instance `(x, y) ↦ (h(x), y)`). Exact as
/// long as the components are the actual polynomials, not truncations.
pub fn pullback_along(w: &DiffForm, comps: &[TruncatedPoly]) -> Result<DiffForm> {
    let jac: Vec<Vec<TruncatedPoly>> = comps
        .iter()
        .map(|c| (0..c.n_vars()).map(|j| c.d(j)).collect())
        .collect();
    pullback_with(w, comps, &jac)
}

pub fn pullback(w: &DiffForm, m: &CoordMap) -> Result<DiffForm> {
    if w.n_vars() != m.n_vars() || w.cap() != m.cap() {
        return Err(Error::ShapeMismatch {
            left_n: w.n_vars(),
            left_cap: w.cap(),
            right_n: m.n_vars(),
            right_cap: m.cap(),
        });
    }
    pullback_with(w, m.components(), &m.jacobian())
}

/// Pushforward `m_* A` of a multivector along the map `x ↦ m(x)`.
///
/// Through duality: `m*(i_{m_*A} Ω) = J · i_A Ω` with `J = det Dm`, so the
/// dual form of `m_*A` is the pullback of `J · i_A Ω` through `m⁻¹`. The
/// differential of `m⁻¹` is taken as `(Dm ∘ m⁻¹)⁻¹` rather than by
/// differentiating the truncated inverse, which keeps the top degree exact.
pub fn pushforward(a: &MultiVector, m: &CoordMap) -> Result<MultiVector> {
    if a.n_vars() != m.n_vars() || a.cap() != m.cap() {
        return Err(Error::ShapeMismatch {
            left_n: a.n_vars(),
            left_cap: a.cap(),
            right_n: m.n_vars(),
            right_cap: m.cap(),
        });
    }
    let vol = VolumeForm::standard(a.n_vars(), a.cap());
    let inv = m.invert()?;
    let jac_at_inv: Vec<Vec<TruncatedPoly>> = m
        .jacobian()
        .iter()
        .map(|row| row.iter().map(|p| p.compose(inv.components())).collect())
        .collect::<Result<_>>()?;
    let det = m.jacobian_det();
    let beta = mv_to_form(a, &vol).mul_fn(&det);
    let dinv = inverse_poly_matrix(&jac_at_inv)?;
    let w = pullback_with(&beta, inv.components(), &dinv)?;
    Ok(form_to_mv(&w, &vol))
}
