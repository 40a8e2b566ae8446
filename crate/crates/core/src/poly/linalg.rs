//! Dense linear algebra over the rationals. Matrices are row-major
//! `Vec<Vec<Rational>>`; sizes here are tiny (at most the number of
//! variables), so plain Gaussian elimination is enough.

use num_traits::{One, Zero};

use super::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn transpose(a: &Matrix) -> Matrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let cols = b.first().map(Vec::len).unwrap_or(0);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    row.iter()
                        .zip(b.iter())
                        .fold(Rational::zero(), |acc, (x, brow)| acc + x * &brow[j])
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
        })
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(a: &mut Matrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map(Vec::len).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &Matrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of `{v : a v = 0}`.
pub fn nullspace(a: &Matrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.clone();
    if m.is_empty() {
        return identity(cols);
    }
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

pub fn inverse(a: &Matrix) -> Option<Matrix> {
    let n = a.len();
    let mut aug: Matrix = a
        .iter()
        .zip(identity(n))
        .map(|(row, id)| row.iter().cloned().chain(id).collect())
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(a: &Matrix) -> Rational {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Extend the given independent rows to a basis of the whole space by
/// appending standard basis vectors.
pub fn complete_basis(rows: &[Vec<Rational>], n: usize) -> Matrix {
    let mut out: Matrix = rows.to_vec();
    for e in identity(n) {
        if out.len() == n {
            break;
        }
        let mut trial = out.clone();
        trial.push(e.clone());
        if rank(&trial) == trial.len() {
            out.push(e);
        }
    }
    out
}

/// Congruence diagonalization of a symmetric matrix: returns `(d, p)` with
/// `p` invertible and `pᵀ a p = diag(d)`.
pub fn diagonalize_symmetric(a: &Matrix) -> (Vec<Rational>, Matrix) {
    let n = a.len();
    let mut m = a.clone();
    let mut p = identity(n);
    // column operation col_j += f col_i (together with the matching row op)
    let add = |m: &mut Matrix, p: &mut Matrix, i: usize, j: usize, f: &Rational| {
        for r in 0..n {
            let t = f * &m[r][i];
            m[r][j] += t;
        }
        for c in 0..n {
            let t = f * &m[i][c];
            m[j][c] += t;
        }
        for r in 0..n {
            let t = f * &p[r][i];
            p[r][j] += t;
        }
    };
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !m[j][j].is_zero()) {
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                m.swap(k, j);
                for row in p.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) {
                add(&mut m, &mut p, j, k, &Rational::one());
            }
        }
        if m[k][k].is_zero() {
            continue;
        }
        for j in k + 1..n {
            if !m[k][j].is_zero() {
                let f = -(&m[k][j] / &m[k][k]);
                add(&mut m, &mut p, k, j, &f);
            }
        }
    }
    ((0..n).map(|i| m[i][i].clone()).collect(), p)
}
