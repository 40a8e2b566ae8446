use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{mv_to_form, DiffForm, MultiVector, VolumeForm};
use crate::nambu::is_integrable_1form;
use crate::poly::linalg::{self, Matrix};
use crate::poly::{CoordMap, Monomial, Rational};

/// Type of the linear part `Λ⁽¹⁾` of an (n−1)-vector vanishing at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearClass {
    Zero,
    /// Dual 1-form closed: `ω⁽¹⁾ = d(Σ dᵢxᵢ²/2)` after a linear change.
    /// `diagonal` holds the rational diagonal, `signs` the signs of its
    /// nonzero entries, `rank` their number.
    Type1 {
        rank: usize,
        signs: Vec<i8>,
        diagonal: Vec<Rational>,
    },
    /// `Λ⁽¹⁾ = ∂₁∧⋯∧∂_{n−2}∧X` with X linear in the last two adapted
    /// coordinates; `field[a][b]` is the coefficient of the b-th adapted
    /// variable in the a-th component of X.
    Type2 {
        field: Matrix,
    },
    /// The Type 2 case with X proportional to the Euler field: no linear
    /// coordinates give `{x₁..x_{n−1}}⁽¹⁾ = x_n`.
    Type2Excluded {
        field: Matrix,
    },
}

impl LinearClass {
    pub fn tag(&self) -> &'static str {
        match self {
            LinearClass::Zero => "Zero",
            LinearClass::Type1 { .. } => "Type1",
            LinearClass::Type2 { .. } => "Type2",
            LinearClass::Type2Excluded { .. } => "Type2Excluded",
        }
    }

    pub fn to_json(&self) -> Value {
        let mat = |m: &Matrix| -> Value {
            m.iter()
                .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>()
                .into()
        };
        match self {
            LinearClass::Zero => json!({"tag": "Zero"}),
            LinearClass::Type1 {
                rank,
                signs,
                diagonal,
            } => json!({
                "tag": "Type1",
                "rank": rank,
                "signs": signs,
                "diagonal": diagonal.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            }),
            LinearClass::Type2 { field } => json!({"tag": "Type2", "field": mat(field)}),
            LinearClass::Type2Excluded { field } => {
                json!({"tag": "Type2Excluded", "field": mat(field)})
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearClassification {
    pub class: LinearClass,
    /// `M[i][j]` = coefficient of `x_j` in the `dx_i` slot of `ω⁽¹⁾`.
    pub matrix: Matrix,
    /// Linear substitution `x = P x̃` after which `Γ⁽¹⁾ = x̃_n`; absent for
    /// `Zero` and `Type2Excluded`.
    pub nf0: Option<CoordMap>,
}

/// Matrix of the linear part of a 1-form.
pub fn linear_matrix(w: &DiffForm) -> Matrix {
    let n = w.n_vars();
    (0..n)
        .map(|i| {
            let c = w.coeff(&[i]);
            (0..n).map(|j| c.coeff(&Monomial::var(j, n))).collect()
        })
        .collect()
}

/// Classifies the linear part of an (n−1)-vector vanishing at the origin
/// and returns a linear map realizing `{x₁,…,x_{n−1}}⁽¹⁾ = x_n` when one
/// exists.
pub fn classify_linear_part(l: &MultiVector) -> Result<LinearClassification> {
    let (n, cap) = (l.n_vars(), l.cap());
    if n < 2 || l.degree() != n - 1 {
        return Err(Error::DegreeOutOfRange {
            what: "linear classification (needs an (n-1)-vector)",
            degree: l.degree(),
            n,
        });
    }
    if !l.at_origin().is_zero() {
        return Err(Error::Precondition(
            "the tensor does not vanish at the origin".into(),
        ));
    }
    let w = mv_to_form(l, &VolumeForm::standard(n, cap));
    let m = linear_matrix(&w);
    if m.iter().flatten().all(Zero::is_zero) {
        return Ok(LinearClassification {
            class: LinearClass::Zero,
            matrix: m,
            nf0: None,
        });
    }
    let mt = linalg::transpose(&m);
    let sym: Matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (&m[i][j] + &mt[i][j]) / Rational::from_integer(2.into()))
                .collect()
        })
        .collect();
    let class = if m == mt {
        let (d, _) = linalg::diagonalize_symmetric(&m);
        let nz: Vec<Rational> = d.iter().filter(|c| !c.is_zero()).cloned().collect();
        LinearClass::Type1 {
            rank: nz.len(),
            signs: nz
                .iter()
                .map(|c| if c.is_positive() { 1 } else { -1 })
                .collect(),
            diagonal: d,
        }
    } else {
        let lin = w.homogeneous_part(1);
        if !is_integrable_1form(&lin.with_cap(3))?.holds() {
            return Err(Error::NotIntegrable(
                "the linear part of the dual 1-form is not integrable".into(),
            ));
        }
        let field = type2_field(&m);
        if sym.iter().flatten().all(Zero::is_zero) {
            LinearClass::Type2Excluded { field }
        } else {
            LinearClass::Type2 { field }
        }
    };
    let nf0 = match class {
        LinearClass::Type2Excluded { .. } => None,
        _ => Some(nf0_map(&m, &sym, cap)?),
    };
    Ok(LinearClassification {
        class,
        matrix: m,
        nf0,
    })
}

/// In coordinates whose first n−2 axes span `ker(M − Mᵀ)` the linear form
/// only involves the last two variables `u, v`; then
/// `ω⁽¹⁾ = X^u dv − X^v du`.
fn type2_field(m: &Matrix) -> Matrix {
    let n = m.len();
    let a: Matrix = (0..n)
        .map(|i| (0..n).map(|j| &m[i][j] - &m[j][i]).collect())
        .collect();
    let ker = linalg::nullspace(&a, n);
    let cols = linalg::complete_basis(&ker, n);
    let p = linalg::transpose(&cols);
    let b = linalg::mat_mul(&linalg::mat_mul(&linalg::transpose(&p), m), &p);
    let s = linalg::det(&p);
    let (u, v) = (n - 2, n - 1);
    vec![
        vec![&b[v][u] / &s, &b[v][v] / &s],
        vec![-(&b[u][u] / &s), -(&b[u][v] / &s)],
    ]
}

/// `x = P x̃` turns `M` into `PᵀMP / det P`; its last row is `e_nᵀ` iff the
/// first n−1 columns of P span `ker uᵀ` with `u = Mᵀw`, `w` the last column,
/// and `wᵀMw = det P`.
fn nf0_map(m: &Matrix, sym: &Matrix, cap: u32) -> Result<CoordMap> {
    let n = m.len();
    let last_is_en = (0..n).all(|j| {
        if j == n - 1 {
            m[n - 1][j].is_one()
        } else {
            m[n - 1][j].is_zero()
        }
    });
    if last_is_en {
        return Ok(CoordMap::identity(n, cap));
    }
    let quad = |w: &[Rational]| -> Rational {
        let sw = linalg::mat_vec(sym, w);
        w.iter().zip(&sw).map(|(a, b)| a * b).sum()
    };
    let unit = |i: usize| -> Vec<Rational> {
        (0..n)
            .map(|k| {
                if k == i {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
            .collect()
    };
    let mut cands: Vec<Vec<Rational>> = (0..n).rev().map(unit).collect();
    for i in 0..n {
        for j in i + 1..n {
            cands.push(
                (0..n)
                    .map(|k| {
                        if k == i || k == j {
                            Rational::one()
                        } else {
                            Rational::zero()
                        }
                    })
                    .collect(),
            );
        }
    }
    let w0 = cands
        .into_iter()
        .find(|w| !quad(w).is_zero())
        .ok_or_else(|| Error::Precondition("symmetric part of the linear form vanishes".into()))?;
    let u = linalg::mat_vec(&linalg::transpose(m), &w0);
    let ker = linalg::nullspace(&vec![u], n);
    let mut cols = ker;
    cols.push(w0.clone());
    let det0 = linalg::det(&linalg::transpose(&cols));
    let t = &det0 / &quad(&w0);
    let last = cols.len() - 1;
    cols[last] = w0.iter().map(|c| c * &t).collect();
    CoordMap::linear(&linalg::transpose(&cols), cap)
}
