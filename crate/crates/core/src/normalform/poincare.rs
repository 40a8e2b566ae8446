use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::poly::{Rational, TruncatedPoly};

/// Potential of the closed 1-form `Σ δ_k dx_{vars[k]}`: returns `e` with
/// `∂e/∂x_{vars[k]} = δ_k` and zero constant term. Variables outside `vars`
/// are parameters. The result carries cap + 1 so that no information of
/// the inputs is lost.
///
/// Closedness is checked first; the error names the first failing pair of
/// variables.
pub fn poincare_solve(deltas: &[TruncatedPoly], vars: &[usize]) -> Result<TruncatedPoly> {
    if deltas.len() != vars.len() || deltas.is_empty() {
        return Err(Error::Precondition(format!(
            "{} components for {} variables",
            deltas.len(),
            vars.len()
        )));
    }
    let (n, cap) = (deltas[0].n_vars(), deltas[0].cap());
    for (k, d) in deltas.iter().enumerate() {
        if d.n_vars() != n || d.cap() != cap {
            return Err(Error::ShapeMismatch {
                left_n: n,
                left_cap: cap,
                right_n: d.n_vars(),
                right_cap: d.cap(),
            });
        }
        if vars[k] >= n {
            return Err(Error::IndexOutOfRange { index: vars[k], n });
        }
    }
    for a in 0..vars.len() {
        for b in a + 1..vars.len() {
            if deltas[a].d(vars[b]) != deltas[b].d(vars[a]) {
                return Err(Error::NotClosed {
                    i: vars[a],
                    j: vars[b],
                });
            }
        }
    }
    // Euler homotopy on each part homogeneous in `vars`
    let mut e = TruncatedPoly::zero(n, cap + 1);
    for (k, d) in deltas.iter().enumerate() {
        let x = TruncatedPoly::var(vars[k], n, cap + 1);
        let lifted = d.with_cap(cap + 1);
        let top = lifted
            .terms()
            .map(|(m, _)| m.degree_in(vars))
            .max()
            .unwrap_or(0);
        for p in 0..=top {
            let part = lifted.graded_part(p, vars);
            if part.is_zero() {
                continue;
            }
            let w = Rational::new(BigInt::from(1), BigInt::from(p + 1));
            e = e + (&x * &part).scale(&w);
        }
    }
    Ok(e)
}
