use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exterior::{contract, wedge_differentials, MultiVector};
use crate::poly::{Monomial, Rational, TruncatedPoly};
use crate::report::{Check, Verdict, Witness};
use crate::testgen::subsets;

/// Vector field stored by components together with a way to apply it to
/// pre-differentiated functions.
struct Field(Vec<TruncatedPoly>);

impl Field {
    fn from_mv(x: &MultiVector) -> Field {
        Field((0..x.n_vars()).map(|j| x.coeff(&[j])).collect())
    }

    fn apply(&self, grad: &[TruncatedPoly]) -> TruncatedPoly {
        let (n, cap) = (grad[0].n_vars(), grad[0].cap());
        self.0
            .iter()
            .zip(grad)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(TruncatedPoly::zero(n, cap), |acc, (a, b)| acc + a * b)
    }
}

fn gradient(f: &TruncatedPoly) -> Vec<TruncatedPoly> {
    (0..f.n_vars()).map(|j| f.d(j)).collect()
}

/// All non-constant monomials of total degree at most `d`, in increasing
/// graded-lex order.
fn test_monomials(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, &mut vec![0; n], &mut out);
    out.retain(|m| !m.is_one());
    out.sort();
    out
}

/// Permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    if k == 0 {
        return vec![(Vec::new(), false)];
    }
    let mut out = Vec::new();
    for (p, odd) in permutations(k - 1) {
        // insert k − 1 at position i, passing k − 1 − i entries
        for i in 0..k {
            let mut q = p.clone();
            q.insert(i, k - 1);
            out.push((q, odd ^ ((k - 1 - i) % 2 == 1)));
        }
    }
    out
}

/// Brute-force check of the fundamental identity
/// `X_f {g_1..g_r} = Σ_i {g_1, .., X_f g_i, .., g_r}` for the bracket
/// `{g_1..g_r} = Λ(dg_1, .., dg_r)`, with `f = (f_1..f_{r−1})` and the g's
/// ranging over increasing tuples of coordinate monomials of degree at most
/// `max_test_degree`. The Leibniz rule holds by construction since the
/// bracket comes from a multivector.
///
/// For fixed f the defect is a derivation in each g slot, so it is
/// computed on coordinate tuples and expanded to monomial tuples with the
/// chain rule; this gives the same defect polynomial for every tuple. The
/// first failing tuple in canonical order (f tuple first, then g tuple) is
/// reported; the enumeration over f tuples runs in parallel.
pub fn fi_bruteforce(l: &MultiVector, max_test_degree: u32) -> Result<Verdict> {
    let (n, r, cap) = (l.n_vars(), l.degree(), l.cap());
    if r < 2 || r > n {
        return Err(Error::DegreeOutOfRange {
            what: "fundamental identity",
            degree: r,
            n,
        });
    }
    let d = max_test_degree.max(1);
    // every chain ends in a single derivative after the last product, so
    // terms up to cap + 1 determine the defect up to the cap
    let big = cap + 1;
    let ll = l.with_cap(big);
    let field_of = |fs: Vec<TruncatedPoly>| {
        Field::from_mv(&contract(&wedge_differentials(&fs, n, big), &ll).expect("degrees fit"))
    };
    let monos = test_monomials(n, d);
    let one = Rational::from_integer(1.into());
    let polys: Vec<TruncatedPoly> = monos
        .iter()
        .map(|m| TruncatedPoly::monomial(m.clone(), one.clone(), big))
        .collect();

    // X_f for every (r−1)-subset of test monomials
    let small: Vec<Vec<usize>> = subsets(polys.len(), r - 1);
    let fields: Vec<Field> = small
        .par_iter()
        .map(|s| field_of(s.iter().map(|&i| polys[i].clone()).collect()))
        .collect();

    // brackets of coordinate functions
    let coords: Vec<TruncatedPoly> = (0..n).map(|i| TruncatedPoly::var(i, n, big)).collect();
    let csmall = subsets(n, r - 1);
    let cindex: HashMap<Vec<usize>, usize> = csmall
        .iter()
        .enumerate()
        .map(|(k, s)| (s.clone(), k))
        .collect();
    let cfields: Vec<Field> = csmall
        .iter()
        .map(|s| field_of(s.iter().map(|&i| coords[i].clone()).collect()))
        .collect();
    let cgrads: Vec<Vec<TruncatedPoly>> = coords.iter().map(gradient).collect();
    let cfull = subsets(n, r);
    let cbracket_grads: Vec<Vec<TruncatedPoly>> = cfull
        .iter()
        .map(|g| gradient(&cfields[cindex[&g[..r - 1].to_vec()]].apply(&cgrads[g[r - 1]])))
        .collect();

    let full = subsets(polys.len(), r);
    let grads: Vec<Vec<TruncatedPoly>> = polys
        .iter()
        .map(|p| gradient(p).iter().map(|c| c.with_cap(cap)).collect())
        .collect();
    let perms = permutations(r);
    let describe = |ids: &[usize]| {
        ids.iter()
            .map(|&i| monos[i].to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };

    let failure = small.par_iter().enumerate().find_map_first(|(fk, f_ids)| {
        let x = &fields[fk];
        let xg: Vec<Vec<TruncatedPoly>> = cgrads.iter().map(|g| gradient(&x.apply(g))).collect();
        let defects: Vec<TruncatedPoly> = cfull
            .iter()
            .enumerate()
            .map(|(gk, g_ids)| {
                let lhs = x.apply(&cbracket_grads[gk]);
                let mut rhs = TruncatedPoly::zero(n, big);
                for slot in 0..r {
                    let rest: Vec<usize> = g_ids
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != slot)
                        .map(|(_, &v)| v)
                        .collect();
                    let term = cfields[cindex[&rest]].apply(&xg[g_ids[slot]]);
                    // moving slot `slot` to the end passes r − 1 − slot entries
                    rhs = if (r - 1 - slot) % 2 == 0 {
                        rhs + term
                    } else {
                        rhs - term
                    };
                }
                (lhs - rhs).with_cap(cap)
            })
            .collect();
        if defects.iter().all(|p| p.is_zero()) {
            return None;
        }
        for g_ids in &full {
            // D(g) = Σ_I D(x_I) det(∂_{I_j} g_k)
            let mut defect = TruncatedPoly::zero(n, cap);
            for (dk, ids) in cfull.iter().enumerate() {
                if defects[dk].is_zero() {
                    continue;
                }
                for (p, odd) in &perms {
                    let mut c = TruncatedPoly::one(n, cap);
                    for (k, &g) in g_ids.iter().enumerate() {
                        let e = &grads[g][ids[p[k]]];
                        if e.is_zero() {
                            c = TruncatedPoly::zero(n, cap);
                            break;
                        }
                        c = &c * e;
                    }
                    if c.is_zero() {
                        continue;
                    }
                    let t = &c * &defects[dk];
                    defect = if *odd { defect - t } else { defect + t };
                }
            }
            if let Some(w) = Witness::of_poly(
                format!("f=({}) g=({})", describe(f_ids), describe(g_ids)),
                &defect,
            ) {
                return Some(w);
            }
        }
        None
    });
    Ok(Verdict::single(Check::from_witness("FI", failure)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_enumeration() {
        let ms = test_monomials(3, 2);
        assert_eq!(ms.len(), 9);
        assert_eq!(ms[0].degree(), 1);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn permutation_signs() {
        let ps = permutations(3);
        assert_eq!(ps.len(), 6);
        let odd = |p: &[usize]| {
            let inv = (0..p.len())
                .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            inv % 2 == 1
        };
        assert!(ps.iter().all(|(p, o)| odd(p) == *o));
    }
}
