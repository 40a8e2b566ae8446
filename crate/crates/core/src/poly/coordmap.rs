use num_traits::Zero;

use super::linalg::{self, Matrix};
use super::truncated::TruncatedPoly;
use super::Monomial;
use crate::error::{Error, Result};

/// Formal coordinate map `x ↦ (m_1(x), ..., m_n(x))`.
///
/// Components vanish at the origin and the linear part is invertible.
/// `substitute(f, m)` is the composition `f ∘ m`, so a map also reads as
/// "old coordinates expressed through new ones" when used for a change of
/// variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoordMap {
    comps: Vec<TruncatedPoly>,
}

impl CoordMap {
    pub fn new(comps: Vec<TruncatedPoly>) -> Result<Self> {
        let n = comps.len();
        let Some(first) = comps.first() else {
            return Err(Error::Precondition("empty coordinate map".into()));
        };
        let cap = first.cap();
        for (k, c) in comps.iter().enumerate() {
            if c.n_vars() != n || c.cap() != cap {
                return Err(Error::ShapeMismatch {
                    left_n: n,
                    left_cap: cap,
                    right_n: c.n_vars(),
                    right_cap: c.cap(),
                });
            }
            if !c.constant_term().is_zero() {
                return Err(Error::NonzeroConstantTerm { component: k });
            }
        }
        let map = CoordMap { comps };
        if linalg::inverse(&map.linear_part()).is_none() {
            return Err(Error::SingularLinearPart);
        }
        Ok(map)
    }

    pub fn identity(n: usize, cap: u32) -> Self {
        CoordMap {
            comps: (0..n).map(|i| TruncatedPoly::var(i, n, cap)).collect(),
        }
    }

    /// Linear map `x ↦ a x`.
    pub fn linear(a: &Matrix, cap: u32) -> Result<Self> {
        let n = a.len();
        let comps = a
            .iter()
            .map(|row| {
                TruncatedPoly::from_terms(
                    n,
                    cap,
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| (Monomial::var(j, n), c.clone())),
                )
            })
            .collect();
        CoordMap::new(comps)
    }

    pub fn n_vars(&self) -> usize {
        self.comps.len()
    }

    pub fn cap(&self) -> u32 {
        self.comps[0].cap()
    }

    pub fn components(&self) -> &[TruncatedPoly] {
        &self.comps
    }

    pub fn component(&self, i: usize) -> &TruncatedPoly {
        &self.comps[i]
    }

    pub fn is_identity(&self) -> bool {
        *self == CoordMap::identity(self.n_vars(), self.cap())
    }

    /// Jacobian matrix at the origin, `a[i][j] = ∂m_i/∂x_j (0)`.
    pub fn linear_part(&self) -> Matrix {
        let n = self.n_vars();
        self.comps
            .iter()
            .map(|c| (0..n).map(|j| c.coeff(&Monomial::var(j, n))).collect())
            .collect()
    }

    /// Full Jacobian `J[i][j] = ∂m_i/∂x_j`.
    pub fn jacobian(&self) -> Vec<Vec<TruncatedPoly>> {
        let n = self.n_vars();
        self.comps
            .iter()
            .map(|c| (0..n).map(|j| c.d(j)).collect())
            .collect()
    }

    /// `self ∘ inner`: the map `x ↦ self(inner(x))`.
    pub fn compose(&self, inner: &CoordMap) -> Result<CoordMap> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.compose(&inner.comps))
            .collect::<Result<Vec<_>>>()?;
        Ok(CoordMap { comps })
    }

    /// Formal inverse modulo the cap, by the fixed point
    /// `g = L⁻¹(x − N(g))` where `m = L + N`; each pass fixes one more degree.
    pub fn invert(&self) -> Result<CoordMap> {
        let n = self.n_vars();
        let cap = self.cap();
        let lin = self.linear_part();
        let lin_inv = linalg::inverse(&lin).ok_or(Error::SingularLinearPart)?;
        let apply = |mat: &Matrix, v: &[TruncatedPoly]| -> Vec<TruncatedPoly> {
            mat.iter()
                .map(|row| {
                    row.iter()
                        .zip(v)
                        .fold(TruncatedPoly::zero(n, cap), |acc, (a, p)| acc + p.scale(a))
                })
                .collect()
        };
        let nonlinear: Vec<TruncatedPoly> = self
            .comps
            .iter()
            .map(|c| {
                TruncatedPoly::from_terms(
                    n,
                    cap,
                    c.terms()
                        .filter(|(m, _)| m.degree() >= 2)
                        .map(|(m, v)| (m.clone(), v.clone())),
                )
            })
            .collect();
        let xs: Vec<TruncatedPoly> = (0..n).map(|i| TruncatedPoly::var(i, n, cap)).collect();
        let mut g = apply(&lin_inv, &xs);
        for _ in 1..cap {
            let ng: Vec<TruncatedPoly> = nonlinear
                .iter()
                .map(|c| c.compose(&g))
                .collect::<Result<_>>()?;
            let rhs: Vec<TruncatedPoly> = xs.iter().zip(&ng).map(|(x, v)| x - v).collect();
            g = apply(&lin_inv, &rhs);
        }
        Ok(CoordMap { comps: g })
    }

    /// Jacobian determinant `det(∂m_i/∂x_j)` as a truncated series.
    pub fn jacobian_det(&self) -> TruncatedPoly {
        det_poly(&self.jacobian())
    }
}

/// `f ∘ m`, truncated at the cap.
pub fn substitute(f: &TruncatedPoly, m: &CoordMap) -> Result<TruncatedPoly> {
    if f.n_vars() != m.n_vars() || f.cap() != m.cap() {
        return Err(Error::ShapeMismatch {
            left_n: f.n_vars(),
            left_cap: f.cap(),
            right_n: m.n_vars(),
            right_cap: m.cap(),
        });
    }
    f.compose(m.components())
}

pub fn invert_map(m: &CoordMap) -> Result<CoordMap> {
    m.invert()
}

/// Determinant of a square matrix of truncated series (Laplace expansion
/// along the first row; sizes are small).
pub fn det_poly(a: &[Vec<TruncatedPoly>]) -> TruncatedPoly {
    let k = a.len();
    assert!(k > 0, "empty matrix");
    if k == 1 {
        return a[0][0].clone();
    }
    let (n, cap) = (a[0][0].n_vars(), a[0][0].cap());
    let mut acc = TruncatedPoly::zero(n, cap);
    for j in 0..k {
        if a[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<TruncatedPoly>> = a[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &a[0][j] * &det_poly(&minor);
        acc = if j % 2 == 0 { acc + term } else { acc - term };
    }
    acc
}

/// Inverse of a square matrix of truncated series whose constant part is
/// invertible. Gaussian elimination with pivots chosen among units.
pub fn inverse_poly_matrix(a: &[Vec<TruncatedPoly>]) -> Result<Vec<Vec<TruncatedPoly>>> {
    let k = a.len();
    let (n, cap) = (a[0][0].n_vars(), a[0][0].cap());
    let mut m: Vec<Vec<TruncatedPoly>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| {
                if i == j {
                    TruncatedPoly::one(n, cap)
                } else {
                    TruncatedPoly::zero(n, cap)
                }
            }));
            r
        })
        .collect();
    for c in 0..k {
        let p = (c..k)
            .find(|&i| !m[i][c].constant_term().is_zero())
            .ok_or(Error::SingularLinearPart)?;
        m.swap(c, p);
        let inv = m[c][c].inverse()?;
        m[c] = m[c].iter().map(|x| x * &inv).collect();
        for i in 0..k {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[c].clone();
                for (x, pr) in m[i].iter_mut().zip(pivot_row.iter()) {
                    *x = &*x - &(&f * pr);
                }
            }
        }
    }
    Ok(m.into_iter().map(|row| row[k..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn x(i: usize, n: usize, cap: u32) -> TruncatedPoly {
        TruncatedPoly::var(i, n, cap)
    }

    #[test]
    fn substitute_examples() {
        let (x1, x2) = (x(0, 2, 4), x(1, 2, 4));
        let m = CoordMap::new(vec![&x1 + &x2, x2.clone()]).unwrap();
        assert_eq!(
            substitute(&(&x1 * &x1), &m).unwrap(),
            &x1 * &x1 + (&x1 * &x2).scale_int(2) + &x2 * &x2
        );
        let f = &x1 * &x2 + &x2;
        assert_eq!(substitute(&f, &CoordMap::identity(2, 4)).unwrap(), f);
        // y ↦ y(1 + x1) with y = x2
        let m = CoordMap::new(vec![x1.clone(), &x2 * (TruncatedPoly::one(2, 4) + &x1)]).unwrap();
        assert_eq!(substitute(&x2, &m).unwrap(), &x2 + &x1 * &x2);
    }

    #[test]
    fn invert_scaling() {
        let m = CoordMap::new(vec![x(0, 1, 3).scale_int(2)]).unwrap();
        let inv = invert_map(&m).unwrap();
        assert_eq!(inv.component(0), &x(0, 1, 3).scale(&rat(1, 2)));
        assert!(invert_map(&CoordMap::identity(3, 4)).unwrap().is_identity());
    }

    #[test]
    fn invert_quadratic_perturbation() {
        // x' = x + x^2; the candidate below is checked by composition
        let x1 = x(0, 1, 4);
        let m = CoordMap::new(vec![&x1 + &x1 * &x1]).unwrap();
        let want = &x1 - x1.pow(2) + x1.pow(3).scale_int(2) - x1.pow(4).scale_int(5);
        let candidate = CoordMap::new(vec![want.clone()]).unwrap();
        assert!(m.compose(&candidate).unwrap().is_identity());
        assert_eq!(invert_map(&m).unwrap().component(0), &want);
    }

    #[test]
    fn singular_and_constant_rejected() {
        let x1 = x(0, 2, 3);
        assert_eq!(
            CoordMap::new(vec![x1.clone(), x1.clone()]),
            Err(Error::SingularLinearPart)
        );
        assert_eq!(
            CoordMap::new(vec![&x1 + TruncatedPoly::one(2, 3), x(1, 2, 3)]),
            Err(Error::NonzeroConstantTerm { component: 0 })
        );
    }

    #[test]
    fn matrix_inverse_of_series() {
        let (x1, x2) = (x(0, 2, 4), x(1, 2, 4));
        let one = TruncatedPoly::one(2, 4);
        let a = vec![vec![&one + &x1, x2.clone()], vec![&x1 * &x2, &one - &x2]];
        let inv = inverse_poly_matrix(&a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s = &a[i][0] * &inv[0][j] + &a[i][1] * &inv[1][j];
                let want = if i == j {
                    one.clone()
                } else {
                    TruncatedPoly::zero(2, 4)
                };
                assert_eq!(s, want);
            }
        }
        let det = det_poly(&a);
        assert_eq!(det.constant_term(), rat(1, 1));
    }
}
