use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{differential, exterior_derivative, pullback, DiffForm};
use crate::normalform::poincare_solve;
use crate::poly::linalg::{self, Matrix};
use crate::poly::{rat, CoordMap, Monomial, Rational, TruncatedPoly};

/// Shape of `q = Σ d_i y_i²/2 + ε x z` in adapted coordinates
/// `(x, y_1..y_r, [z], t_1..t_s)`; `z` is present iff `ε = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSignature {
    pub r: usize,
    pub diagonal: Vec<Rational>,
    pub signs: Vec<i8>,
    pub epsilon: u8,
}

impl QSignature {
    fn new(diagonal: Vec<Rational>, epsilon: u8) -> Self {
        QSignature {
            r: diagonal.len(),
            signs: diagonal
                .iter()
                .map(|d| if d.is_positive() { 1 } else { -1 })
                .collect(),
            diagonal,
            epsilon,
        }
    }

    pub fn x(&self) -> usize {
        0
    }

    pub fn ys(&self) -> Vec<usize> {
        (1..=self.r).collect()
    }

    pub fn z(&self) -> Option<usize> {
        (self.epsilon == 1).then_some(self.r + 1)
    }

    pub fn ts(&self, n: usize) -> Vec<usize> {
        (self.r + 1 + self.epsilon as usize..n).collect()
    }

    /// `q̄ = Σ d_i y_i²/2`.
    pub fn qbar(&self, n: usize, cap: u32) -> TruncatedPoly {
        let mut q = TruncatedPoly::zero(n, cap);
        for (k, d) in self.diagonal.iter().enumerate() {
            q = q + TruncatedPoly::var(k + 1, n, cap)
                .pow(2)
                .scale(&(d / rat(2, 1)));
        }
        q
    }

    pub fn q(&self, n: usize, cap: u32) -> TruncatedPoly {
        let mut q = self.qbar(n, cap);
        if let Some(z) = self.z() {
            q = q + &TruncatedPoly::var(0, n, cap) * &TruncatedPoly::var(z, n, cap);
        }
        q
    }

    /// Name of adapted coordinate `i`.
    pub fn var_name(&self, i: usize) -> String {
        if i == 0 {
            "x".into()
        } else if i <= self.r {
            format!("y{}", i)
        } else if Some(i) == self.z() {
            "z".into()
        } else {
            format!("t{}", i - self.r - self.epsilon as usize)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "signs": self.signs,
            "diagonal": self.diagonal.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "epsilon": self.epsilon,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Adaptation {
    /// Old coordinates as linear functions of the adapted ones.
    pub substitution: CoordMap,
    /// `q` in adapted coordinates.
    pub q: TruncatedPoly,
    pub signature: QSignature,
    pub already_adapted: bool,
}

/// Constant covectors `ℓ` with `ℓ ∧ η = 0`.
pub(crate) fn constant_divisors(eta: &DiffForm) -> Vec<Vec<Rational>> {
    let (n, cap) = (eta.n_vars(), eta.cap());
    let mut rows: BTreeMap<(Vec<usize>, Vec<u32>), Vec<Rational>> = BTreeMap::new();
    for k in 0..n {
        let f = DiffForm::basis(n, cap, &[k]).wedge(eta);
        for (idx, c) in f.terms() {
            for (m, v) in c.terms() {
                rows.entry((idx.clone(), m.exponents().to_vec()))
                    .or_insert_with(|| vec![Rational::zero(); n])[k] = v.clone();
            }
        }
    }
    let a: Matrix = rows.into_values().collect();
    linalg::nullspace(&a, n)
}

/// For `η = dx_1 ∧ β`, the quadratic `q` with `η = dx_1 ∧ dq` and no `x_1²`
/// term.
fn potential_along_x(eta: &DiffForm) -> Result<TruncatedPoly> {
    let n = eta.n_vars();
    for i in 1..n {
        for j in i + 1..n {
            if !eta.coeff(&[i, j]).is_zero() {
                return Err(Error::Invariant(format!(
                    "dx1 does not divide the 2-form (dx{}^dx{} term)",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let us: Vec<usize> = (1..n).collect();
    let comps: Vec<TruncatedPoly> = us.iter().map(|&j| eta.coeff(&[0, j])).collect();
    Ok(poincare_solve(&comps, &us)
        .map_err(|e| Error::Invariant(format!("the 2-form is not closed: {}", e)))?
        .with_cap(eta.cap()))
}

/// `q = x L(u) + Q(u)` with `u = x_2..x_n`: returns `(S, l)` with
/// `Q = uᵀSu/2`, `L = lᵀu`.
fn split_quadratic(q: &TruncatedPoly) -> (Matrix, Vec<Rational>) {
    let n = q.n_vars();
    let m = n - 1;
    let mut s = linalg::zeros(m, m);
    let mut l = vec![Rational::zero(); m];
    for (mono, c) in q.terms() {
        let vars: Vec<usize> = (0..n)
            .flat_map(|i| std::iter::repeat(i).take(mono.exp(i) as usize))
            .collect();
        match vars.as_slice() {
            [0, b] => l[b - 1] = c.clone(),
            [a, b] if a == b => s[a - 1][a - 1] = c * rat(2, 1),
            [a, b] => {
                s[a - 1][b - 1] = c.clone();
                s[b - 1][a - 1] = c.clone();
            }
            _ => {}
        }
    }
    (s, l)
}

/// Recognizes `q = Σ_{i≤r} d_i x_{1+i}²/2 + ε x_1 x_{r+2}` (0-based
/// positions in `u`).
fn adapted_signature(s: &Matrix, l: &[Rational]) -> Option<QSignature> {
    let m = s.len();
    let r = (0..m).take_while(|&a| !s[a][a].is_zero()).count();
    for a in 0..m {
        for b in 0..m {
            let on_diag = a == b && a < r;
            if !on_diag && !s[a][b].is_zero() {
                return None;
            }
        }
    }
    let nz: Vec<usize> = (0..m).filter(|&a| !l[a].is_zero()).collect();
    let epsilon = match nz.as_slice() {
        [] => 0,
        [a] if *a == r && l[*a].is_one() => 1,
        _ => return None,
    };
    Some(QSignature::new(
        (0..r).map(|a| s[a][a].clone()).collect(),
        epsilon,
    ))
}

/// Linear coordinates in which the closed, decomposable 2-form `η` (linear
/// coefficients) becomes `dx ∧ dq`, `q = Σ d_i y_i²/2 + ε x z`.
///
/// The diagonal `d_i` are rational (no square roots). Inputs with `r < 2`
/// are accepted only when already adapted.
pub fn linear_adapt(eta: &DiffForm) -> Result<Adaptation> {
    let (n, cap) = (eta.n_vars(), eta.cap());
    if eta.degree() != 2 || n < 2 {
        return Err(Error::DegreeOutOfRange {
            what: "linear adaptation (needs a 2-form)",
            degree: eta.degree(),
            n,
        });
    }
    if let Some((idx, c)) = eta
        .terms()
        .find(|(_, c)| c.terms().any(|(m, _)| m.degree() != 1))
    {
        return Err(Error::Precondition(format!(
            "coefficient of {} is not linear: {}",
            idx.iter()
                .map(|i| format!("dx{}", i + 1))
                .collect::<Vec<_>>()
                .join("^"),
            c
        )));
    }
    if eta.is_zero() {
        return Err(Error::Precondition("the 2-form vanishes".into()));
    }
    if !exterior_derivative(eta).is_zero() {
        return Err(Error::Precondition("the 2-form is not closed".into()));
    }
    let divs = constant_divisors(eta);
    if divs.is_empty() {
        return Err(Error::Precondition(
            "the 2-form has no constant divisor (type 2)".into(),
        ));
    }
    let e0: Vec<Rational> = (0..n)
        .map(|i| {
            if i == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let e0_divides = DiffForm::basis(n, cap, &[0]).wedge(eta).is_zero();
    if e0_divides {
        let q0 = potential_along_x(eta)?;
        let (s, l) = split_quadratic(&q0);
        if let Some(sig) = adapted_signature(&s, &l) {
            return Ok(Adaptation {
                substitution: CoordMap::identity(n, cap),
                q: sig.q(n, cap),
                signature: sig,
                already_adapted: true,
            });
        }
    }
    let ell = if e0_divides { e0 } else { divs[0].clone() };
    let t = linalg::complete_basis(&[ell], n);
    let p1 = linalg::inverse(&t).ok_or(Error::SingularLinearPart)?;
    let eta1 = pullback(eta, &CoordMap::linear(&p1, cap)?)?;
    let q0 = potential_along_x(&eta1)?;
    let (s, l) = split_quadratic(&q0);
    let m = n - 1;
    let (d, rmat) = linalg::diagonalize_symmetric(&s);
    let ysel: Vec<usize> = (0..m).filter(|&a| !d[a].is_zero()).collect();
    let ksel: Vec<usize> = (0..m).filter(|&a| d[a].is_zero()).collect();
    let r = ysel.len();
    if r < 2 {
        return Err(Error::Unsupported(format!(
            "q has rank {} < 2; such inputs are handled only when already adapted",
            r
        )));
    }
    let lp = linalg::mat_vec(&linalg::transpose(&rmat), &l);
    let lk: Vec<Rational> = ksel.iter().map(|&k| lp[k].clone()).collect();
    let epsilon = u8::from(lk.iter().any(|c| !c.is_zero()));
    let w = if epsilon == 1 {
        let w0 = linalg::complete_basis(&[lk], ksel.len());
        linalg::inverse(&w0).ok_or(Error::SingularLinearPart)?
    } else {
        linalg::identity(ksel.len())
    };
    // v = H ξ̃
    let mut h = linalg::zeros(m, n);
    for (a, &k) in ysel.iter().enumerate() {
        h[k][1 + a] = Rational::one();
        h[k][0] = -(&lp[k] / &d[k]);
    }
    for (b, &k) in ksel.iter().enumerate() {
        for c in 0..ksel.len() {
            h[k][r + 1 + c] = w[b][c].clone();
        }
    }
    let rh = linalg::mat_mul(&rmat, &h);
    let mut g = linalg::zeros(n, n);
    g[0][0] = Rational::one();
    for i in 0..m {
        g[1 + i] = rh[i].clone();
    }
    let p = linalg::mat_mul(&p1, &g);
    let sig = QSignature::new(ysel.iter().map(|&k| d[k].clone()).collect(), epsilon);
    let substitution = CoordMap::linear(&p, cap)?;
    let q = sig.q(n, cap);
    let back = pullback(eta, &substitution)?;
    let target = DiffForm::basis(n, cap, &[0]).wedge(&differential(&q));
    if back != target {
        return Err(Error::Invariant("adapted 2-form differs from dx^dq".into()));
    }
    Ok(Adaptation {
        substitution,
        q,
        signature: sig,
        already_adapted: false,
    })
}

pub(crate) fn monomial(exps: &[(usize, u32)], n: usize) -> Monomial {
    let mut e = vec![0; n];
    for &(i, k) in exps {
        e[i] += k;
    }
    Monomial::new(e)
}
