use super::alt::{split_sign, DiffForm, MultiVector};
use crate::error::{Error, Result};
use crate::poly::TruncatedPoly;

/// Exterior derivative `d(f dx_I) = Σ_j ∂_j f dx_j ∧ dx_I`.
pub fn exterior_derivative(w: &DiffForm) -> DiffForm {
    let n = w.n_vars();
    let mut out = DiffForm::zero(n, w.cap(), w.degree() + 1);
    for (idx, f) in w.terms() {
        for j in 0..n {
            if idx.contains(&j) {
                continue;
            }
            let df = f.d(j);
            if df.is_zero() {
                continue;
            }
            let mut key = vec![j];
            key.extend_from_slice(idx);
            out = out + DiffForm::term(df, &key);
        }
    }
    out
}

/// Differential of a function as a 1-form.
pub fn differential(f: &TruncatedPoly) -> DiffForm {
    exterior_derivative(&DiffForm::scalar(f.clone()))
}

/// Interior product `i_A w`, contracting from the left:
/// `i_{∂_I}(dx_I ∧ dx_K) = dx_K`. Consequently `i_{A∧B} = i_B ∘ i_A`.
pub fn interior(a: &MultiVector, w: &DiffForm) -> Result<DiffForm> {
    if a.n_vars() != w.n_vars() || a.cap() != w.cap() {
        return Err(Error::ShapeMismatch {
            left_n: a.n_vars(),
            left_cap: a.cap(),
            right_n: w.n_vars(),
            right_cap: w.cap(),
        });
    }
    if a.degree() > w.degree() {
        return Err(Error::DegreeOutOfRange {
            what: "interior product",
            degree: a.degree(),
            n: w.degree(),
        });
    }
    let mut out = DiffForm::zero(w.n_vars(), w.cap(), w.degree() - a.degree());
    for (i, fa) in a.terms() {
        for (k, fw) in w.terms() {
            if let Some((rest, s)) = split_sign(k, i) {
                let c = fa * fw;
                out = out + DiffForm::term(if s < 0 { -c } else { c }, &rest);
            }
        }
    }
    Ok(out)
}

/// Contraction of a multivector by a form, same left rule:
/// `i_{dx_J}(∂_J ∧ ∂_K) = ∂_K`. With equal degrees this is the pairing
/// `Λ(df_1, ..., df_r)` when the form is `df_1 ∧ ... ∧ df_r`.
pub fn contract(w: &DiffForm, a: &MultiVector) -> Result<MultiVector> {
    if a.n_vars() != w.n_vars() || a.cap() != w.cap() {
        return Err(Error::ShapeMismatch {
            left_n: w.n_vars(),
            left_cap: w.cap(),
            right_n: a.n_vars(),
            right_cap: a.cap(),
        });
    }
    if w.degree() > a.degree() {
        return Err(Error::DegreeOutOfRange {
            what: "contraction",
            degree: w.degree(),
            n: a.degree(),
        });
    }
    let mut out = MultiVector::zero(a.n_vars(), a.cap(), a.degree() - w.degree());
    for (j, fw) in w.terms() {
        for (i, fa) in a.terms() {
            if let Some((rest, s)) = split_sign(i, j) {
                let c = fa * fw;
                out = out + MultiVector::term(if s < 0 { -c } else { c }, &rest);
            }
        }
    }
    Ok(out)
}

/// `Λ(df_1, ..., df_r)` for an r-vector and r functions.
pub fn evaluate(l: &MultiVector, fs: &[TruncatedPoly]) -> Result<TruncatedPoly> {
    if fs.len() != l.degree() {
        return Err(Error::Precondition(format!(
            "expected {} functions, got {}",
            l.degree(),
            fs.len()
        )));
    }
    let w = wedge_differentials(fs, l.n_vars(), l.cap());
    Ok(contract(&w, l)?.as_function())
}

/// `df_1 ∧ ... ∧ df_k`; the empty product is the constant 0-form 1.
pub fn wedge_differentials(fs: &[TruncatedPoly], n: usize, cap: u32) -> DiffForm {
    fs.iter()
        .fold(DiffForm::scalar(TruncatedPoly::one(n, cap)), |acc, f| {
            acc.wedge(&differential(f))
        })
}

/// A vector field acting on a function, `X(f) = Σ X^j ∂_j f`.
pub fn apply_vector_field(x: &MultiVector, f: &TruncatedPoly) -> Result<TruncatedPoly> {
    if x.degree() != 1 {
        return Err(Error::DegreeOutOfRange {
            what: "vector field",
            degree: x.degree(),
            n: x.n_vars(),
        });
    }
    Ok(contract(&differential(f), x)?.as_function())
}

/// Schouten bracket, built from `[f, g] = 0`, `[X, f] = X(f)`, the Lie
/// bracket of vector fields, and graded Leibniz
/// `[A, B∧C] = [A,B]∧C + (−1)^{(a−1)b} B∧[A,C]`.
pub fn schouten(a: &MultiVector, b: &MultiVector) -> MultiVector {
    assert!(
        a.n_vars() == b.n_vars() && a.cap() == b.cap(),
        "schouten bracket of mismatched fields"
    );
    let (n, cap) = (a.n_vars(), a.cap());
    let deg = (a.degree() + b.degree()).saturating_sub(1);
    let mut out = MultiVector::zero(n, cap, deg);
    if a.degree() + b.degree() == 0 || deg > n {
        return out;
    }
    for (i, f) in a.terms() {
        for (j, g) in b.terms() {
            out = out + schouten_terms(f, i, g, j, n, cap);
        }
    }
    out
}

// [f ∂_I, g ∂_J] = [f∂_I, g] ∧ ∂_J + g [f∂_I, ∂_J]
fn schouten_terms(
    f: &TruncatedPoly,
    i: &[usize],
    g: &TruncatedPoly,
    j: &[usize],
    n: usize,
    cap: u32,
) -> MultiVector {
    let a = i.len();
    let deg = a + j.len() - 1;
    let mut out = MultiVector::zero(n, cap, deg);
    let dj = MultiVector::basis(n, cap, j);

    if a > 0 {
        // [A, g] = (−1)^{a+1} f · i_{dg} ∂_I
        let inner = contract(&differential(g), &MultiVector::basis(n, cap, i))
            .expect("shapes agree")
            .mul_fn(f);
        let inner = if a % 2 == 0 { -inner } else { inner };
        out = out + inner.wedge(&dj);
    }

    // [A, ∂_J] = Σ_k (−1)^{(a−1)(k−1)} ∂_{j1..j(k−1)} ∧ (−∂_{jk} f ∂_I) ∧ ∂_{j(k+1)..}
    for (k, &jk) in j.iter().enumerate() {
        let df = f.d(jk);
        if df.is_zero() {
            continue;
        }
        let mid = MultiVector::term(-df, i);
        let piece = MultiVector::basis(n, cap, &j[..k])
            .wedge(&mid)
            .wedge(&MultiVector::basis(n, cap, &j[k + 1..]));
        let piece = piece.mul_fn(g);
        // (a − 1) and (a + 1) have the same parity; k is 0-based here
        out = if (a + 1) * k % 2 == 1 {
            out - piece
        } else {
            out + piece
        };
    }
    out
}

/// Volume form `density · dx_1 ∧ ... ∧ dx_n` with a unit density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolumeForm {
    density: TruncatedPoly,
    density_inv: TruncatedPoly,
}

impl VolumeForm {
    pub fn standard(n: usize, cap: u32) -> Self {
        let one = TruncatedPoly::one(n, cap);
        VolumeForm {
            density: one.clone(),
            density_inv: one,
        }
    }

    pub fn new(density: TruncatedPoly) -> Result<Self> {
        let density_inv = density.inverse()?;
        Ok(VolumeForm {
            density,
            density_inv,
        })
    }

    pub fn density(&self) -> &TruncatedPoly {
        &self.density
    }

    pub fn n_vars(&self) -> usize {
        self.density.n_vars()
    }

    pub fn cap(&self) -> u32 {
        self.density.cap()
    }

    pub fn form(&self) -> DiffForm {
        let n = self.n_vars();
        DiffForm::term(self.density.clone(), &(0..n).collect::<Vec<_>>())
    }
}

/// `i_L Ω`: a degree-k multivector goes to a degree-(n−k) form.
pub fn mv_to_form(l: &MultiVector, vol: &VolumeForm) -> DiffForm {
    let n = l.n_vars();
    let all: Vec<usize> = (0..n).collect();
    let mut out = DiffForm::zero(n, l.cap(), n - l.degree());
    for (i, f) in l.terms() {
        let (rest, s) = split_sign(&all, i).expect("sorted subset");
        let c = f * vol.density();
        out = out + DiffForm::term(if s < 0 { -c } else { c }, &rest);
    }
    out
}

/// Inverse of [`mv_to_form`].
pub fn form_to_mv(w: &DiffForm, vol: &VolumeForm) -> MultiVector {
    let n = w.n_vars();
    let all: Vec<usize> = (0..n).collect();
    let mut out = MultiVector::zero(n, w.cap(), n - w.degree());
    for (k, f) in w.terms() {
        let i: Vec<usize> = all.iter().copied().filter(|x| !k.contains(x)).collect();
        let (_, s) = split_sign(&all, &i).expect("sorted subset");
        let c = f * &vol.density_inv;
        out = out + MultiVector::term(if s < 0 { -c } else { c }, &i);
    }
    out
}
