use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::DiffForm;
use crate::normalform::poincare_solve;
use crate::poly::{rat, Rational, TruncatedPoly};
use crate::report::Witness;

use super::adapt::{monomial, QSignature};

/// Raw parameters of `ω = θ q dx + β x dq + γ x² dx`, from `f = λ x q + α x³`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type1Params {
    pub theta: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    pub lambda: Rational,
    pub alpha: Rational,
    /// The cubic `f` with `ω = −q dx + df`.
    pub potential: TruncatedPoly,
}

fn elim(step: &str, what: &str, p: &TruncatedPoly) -> Error {
    let w = Witness::of_poly("", p).expect("nonzero residual");
    Error::Elimination(format!(
        "{}: {} (monomial {}, coefficient {})",
        step, what, w.monomial, w.coefficient
    ))
}

/// Solves `ω = −q dx + df` in adapted coordinates and replays the
/// elimination `∂f/∂t_j = 0`, `f = (λx + μz)q̄ + b(x, z)`, `μ = 0`,
/// `∂b/∂z = λx²`, `b = λx²z + αx³`. For `r < 2` only the final shape
/// `f = λxq + αx³` is fitted.
pub fn type1_extract(w: &DiffForm, sig: &QSignature) -> Result<Type1Params> {
    let n = w.n_vars();
    let cap = w.cap().max(3);
    if w.degree() != 1 || n < sig.r + 1 + sig.epsilon as usize {
        return Err(Error::DegreeOutOfRange {
            what: "type 1 extraction (needs a 1-form)",
            degree: w.degree(),
            n,
        });
    }
    let w = w.with_cap(cap);
    let x = TruncatedPoly::var(0, n, cap);
    let q = sig.q(n, cap);
    let all: Vec<usize> = (0..n).collect();
    let beta = &w + &DiffForm::term(q.clone(), &[0]);
    let comps: Vec<TruncatedPoly> = all.iter().map(|&i| beta.coeff(&[i])).collect();
    let f = poincare_solve(&comps, &all)
        .map_err(|e| Error::Elimination(format!("w + q dx is not closed ({}); dw != dx^dq", e)))?
        .with_cap(cap);
    for t in sig.ts(n) {
        let ft = f.d(t);
        if !ft.is_zero() {
            return Err(elim(
                "df^dx^dq = 0",
                &format!("df/d{} != 0", sig.var_name(t)),
                &ft,
            ));
        }
    }
    let half = rat(1, 2);
    let alpha = f.coeff(&monomial(&[(0, 3)], n));
    let lambda = if sig.r >= 2 {
        let d1 = &sig.diagonal[0] * &half;
        let lambda = f.coeff(&monomial(&[(0, 1), (1, 2)], n)) / &d1;
        let qbar = sig.qbar(n, cap);
        let (mu, zpoly) = match sig.z() {
            Some(z) => (
                f.coeff(&monomial(&[(z, 1), (1, 2)], n)) / &d1,
                TruncatedPoly::var(z, n, cap),
            ),
            None => (Rational::zero(), TruncatedPoly::zero(n, cap)),
        };
        let kappa = &x.scale(&lambda) + &zpoly.scale(&mu);
        let b = &f - &(&kappa * &qbar);
        for y in sig.ys() {
            let by = b.d(y);
            if !by.is_zero() {
                return Err(elim(
                    "f = (lambda x + mu z) qbar + b(x, z)",
                    &format!("the remainder depends on {}", sig.var_name(y)),
                    &by,
                ));
            }
        }
        if !mu.is_zero() {
            return Err(Error::Elimination(format!("mu = {} != 0", mu)));
        }
        if let Some(z) = sig.z() {
            let bz = &b.d(z) - &x.pow(2).scale(&lambda);
            if !bz.is_zero() {
                return Err(elim("db/dz = lambda x^2", "identity fails", &bz));
            }
        }
        lambda
    } else {
        let xq = &x * &q;
        let (m, c) = xq
            .leading_witness()
            .ok_or_else(|| Error::Elimination("q vanishes".into()))?;
        f.coeff(&m) / c
    };
    let rest = &f - &(&(&x * &q).scale(&lambda) + &x.pow(3).scale(&alpha));
    if !rest.is_zero() {
        return Err(elim("f = lambda x q + alpha x^3", "identity fails", &rest));
    }
    Ok(Type1Params {
        theta: &lambda - Rational::from_integer(1.into()),
        beta: lambda.clone(),
        gamma: &alpha * rat(3, 1),
        lambda,
        alpha,
        potential: f,
    })
}
