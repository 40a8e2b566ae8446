use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::error::{Error, Result};
use crate::poly::{Rational, TruncatedPoly};

/// Marker for covariant fields (differential forms).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Co;
/// Marker for contravariant fields (multivectors).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Contra;

pub trait Variance: Clone + Copy + fmt::Debug + PartialEq + Eq + 'static {
    /// Prefix of a basis element in canonical text: `dx` or `@`.
    const BASIS: &'static str;
    const NAME: &'static str;
}

impl Variance for Co {
    const BASIS: &'static str = "dx";
    const NAME: &'static str = "form";
}

impl Variance for Contra {
    const BASIS: &'static str = "@";
    const NAME: &'static str = "multivector";
}

/// Homogeneous antisymmetric field of degree `k` in `n` variables with
/// truncated polynomial coefficients, keyed by strictly increasing index
/// tuples. Zero coefficients are never stored. Zero fields compare equal
/// whatever their nominal degree.
#[derive(Clone)]
pub struct AltField<V> {
    n: usize,
    cap: u32,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, TruncatedPoly>,
    _kind: PhantomData<V>,
}

pub type DiffForm = AltField<Co>;
pub type MultiVector = AltField<Contra>;

/// Sorts an index tuple, returning the sorted tuple and the sign of the
/// permutation, or `None` when an index repeats.
pub fn sort_with_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Sign `s` with `e_sub ∧ e_rest = s · e_all`, where `rest = all \ sub`
/// (both ascending). `None` if `sub ⊄ all`.
pub fn split_sign(all: &[usize], sub: &[usize]) -> Option<(Vec<usize>, i64)> {
    if !sub.iter().all(|i| all.contains(i)) {
        return None;
    }
    let rest: Vec<usize> = all.iter().copied().filter(|i| !sub.contains(i)).collect();
    let concat: Vec<usize> = sub.iter().chain(rest.iter()).copied().collect();
    let (_, s) = sort_with_sign(&concat)?;
    Some((rest, s))
}

impl<V: Variance> AltField<V> {
    pub fn zero(n: usize, cap: u32, degree: usize) -> Self {
        AltField {
            n,
            cap,
            degree,
            coeffs: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 field holding a single function.
    pub fn scalar(f: TruncatedPoly) -> Self {
        let mut out = Self::zero(f.n_vars(), f.cap(), 0);
        out.add_term(Vec::new(), f);
        out
    }

    /// `f · e_{idx}`; the index tuple may be unsorted (sign applied) and a
    /// repeated index yields zero.
    pub fn term(f: TruncatedPoly, idx: &[usize]) -> Self {
        let mut out = Self::zero(f.n_vars(), f.cap(), idx.len());
        out.push(f, idx);
        out
    }

    /// Constant basis element `e_{idx}`.
    pub fn basis(n: usize, cap: u32, idx: &[usize]) -> Self {
        Self::term(TruncatedPoly::one(n, cap), idx)
    }

    pub fn from_terms<I>(n: usize, cap: u32, degree: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<usize>, TruncatedPoly)>,
    {
        let mut out = Self::zero(n, cap, degree);
        for (idx, f) in terms {
            assert_eq!(idx.len(), degree, "index tuple of wrong length");
            out.push(f, &idx);
        }
        out
    }

    fn push(&mut self, f: TruncatedPoly, idx: &[usize]) {
        assert!(idx.iter().all(|&i| i < self.n), "basis index out of range");
        if let Some((sorted, s)) = sort_with_sign(idx) {
            let f = if s < 0 { -f } else { f };
            self.add_term(sorted, f);
        }
    }

    fn add_term(&mut self, idx: Vec<usize>, f: TruncatedPoly) {
        if f.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&idx) {
            Some(v) => {
                *v = &*v + &f;
                if v.is_zero() {
                    self.coeffs.remove(&idx);
                }
            }
            None => {
                self.coeffs.insert(idx, f);
            }
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &TruncatedPoly)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, idx: &[usize]) -> TruncatedPoly {
        match sort_with_sign(idx) {
            Some((sorted, s)) => {
                let c = self
                    .coeffs
                    .get(&sorted)
                    .cloned()
                    .unwrap_or_else(|| TruncatedPoly::zero(self.n, self.cap));
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            None => TruncatedPoly::zero(self.n, self.cap),
        }
    }

    /// The single coefficient of a degree-0 field.
    pub fn as_function(&self) -> TruncatedPoly {
        self.coeff(&[])
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.cap != other.cap {
            return Err(Error::ShapeMismatch {
                left_n: self.n,
                left_cap: self.cap,
                right_n: other.n,
                right_cap: other.cap,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::KindMismatch(format!(
                "cannot add {}s of degree {} and {}",
                V::NAME,
                self.degree,
                other.degree
            )));
        }
        let mut out = if self.is_zero() {
            Self::zero(self.n, self.cap, other.degree)
        } else {
            self.clone()
        };
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), v.clone());
        }
        Ok(out)
    }

    /// Multiply every coefficient by a function.
    pub fn mul_fn(&self, f: &TruncatedPoly) -> Self {
        let mut out = Self::zero(self.n, self.cap, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v * f);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.n, self.cap, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v.scale(c));
        }
        out
    }

    pub fn map_coeffs<F>(&self, f: F) -> Self
    where
        F: Fn(&TruncatedPoly) -> TruncatedPoly,
    {
        let mut out = Self::zero(self.n, self.cap, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    pub fn try_map_coeffs<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&TruncatedPoly) -> Result<TruncatedPoly>,
    {
        let mut out = Self::zero(self.n, self.cap, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), f(v)?);
        }
        Ok(out)
    }

    pub fn with_cap(&self, cap: u32) -> Self {
        let mut out = Self::zero(self.n, cap, self.degree);
        for (k, v) in &self.coeffs {
            out.add_term(k.clone(), v.with_cap(cap));
        }
        out
    }

    /// Highest total degree among the coefficients (0 for the zero field).
    pub fn max_degree(&self) -> u32 {
        self.coeffs
            .values()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0)
    }

    /// Value at the origin (constant terms of the coefficients).
    pub fn at_origin(&self) -> Self {
        self.map_coeffs(|p| TruncatedPoly::constant(p.constant_term(), self.n, self.cap))
    }

    /// Part whose coefficients are homogeneous of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let all: Vec<usize> = (0..self.n).collect();
        self.map_coeffs(|p| p.graded_part(d, &all))
    }

    /// Wedge product, graded-commutative. A result above degree `n` is the
    /// zero field of that degree.
    pub fn wedge(&self, other: &Self) -> Self {
        self.check(other).expect("wedge of mismatched fields");
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.n, self.cap, degree);
        if degree > self.n {
            return out;
        }
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                let idx: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
                if let Some((sorted, s)) = sort_with_sign(&idx) {
                    let c = va * vb;
                    out.add_term(sorted, if s < 0 { -c } else { c });
                }
            }
        }
        out
    }

    /// First nonzero coefficient with its lowest term, used as a witness.
    pub fn witness(&self) -> Option<(Vec<usize>, crate::poly::Monomial, Rational)> {
        self.coeffs
            .iter()
            .next()
            .and_then(|(k, v)| v.leading_witness().map(|(m, c)| (k.clone(), m, c)))
    }

    /// Canonical text, e.g. `x3 * dx3 + x1^2 * dx1` or `x3 * @1^@2`.
    pub fn to_canonical_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (k, v)) in self.coeffs.iter().enumerate() {
            let coeff = v.to_canonical_string();
            let body = if k.is_empty() {
                if v.len() > 1 {
                    format!("({})", coeff)
                } else {
                    coeff
                }
            } else {
                let basis = k
                    .iter()
                    .map(|i| format!("{}{}", V::BASIS, i + 1))
                    .collect::<Vec<_>>()
                    .join("^");
                if v.len() > 1 {
                    format!("({}) * {}", coeff, basis)
                } else {
                    format!("{} * {}", coeff, basis)
                }
            };
            if i == 0 {
                out.push_str(&body);
            } else if let Some(rest) = body.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(&body);
            }
        }
        out
    }
}

impl<V: Variance> PartialEq for AltField<V> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.cap == other.cap
            && self.coeffs == other.coeffs
            && (self.degree == other.degree || self.coeffs.is_empty())
    }
}

impl<V: Variance> Eq for AltField<V> {}

impl<V: Variance> fmt::Display for AltField<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}

impl<V: Variance> fmt::Debug for AltField<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[deg {}; {}; n={}, cap={}]",
            V::NAME,
            self.degree,
            self,
            self.n,
            self.cap
        )
    }
}

impl<V: Variance> Add<&AltField<V>> for &AltField<V> {
    type Output = AltField<V>;
    fn add(self, rhs: &AltField<V>) -> AltField<V> {
        self.try_add(rhs).expect("field shape mismatch")
    }
}

impl<V: Variance> Add for AltField<V> {
    type Output = AltField<V>;
    fn add(mut self, rhs: AltField<V>) -> AltField<V> {
        self += rhs;
        self
    }
}

impl<V: Variance> AddAssign for AltField<V> {
    fn add_assign(&mut self, rhs: AltField<V>) {
        self.check(&rhs).expect("field shape mismatch");
        if self.is_zero() {
            self.degree = rhs.degree;
        } else if !rhs.is_zero() {
            assert_eq!(self.degree, rhs.degree, "adding fields of different degree");
        }
        for (k, v) in rhs.coeffs {
            self.add_term(k, v);
        }
    }
}

impl<V: Variance> Neg for &AltField<V> {
    type Output = AltField<V>;
    fn neg(self) -> AltField<V> {
        self.map_coeffs(|p| -p)
    }
}

impl<V: Variance> Neg for AltField<V> {
    type Output = AltField<V>;
    fn neg(mut self) -> AltField<V> {
        for v in self.coeffs.values_mut() {
            *v = -&*v;
        }
        self
    }
}

impl<V: Variance> Sub<&AltField<V>> for &AltField<V> {
    type Output = AltField<V>;
    fn sub(self, rhs: &AltField<V>) -> AltField<V> {
        self + &(-rhs)
    }
}

impl<V: Variance> Sub for AltField<V> {
    type Output = AltField<V>;
    fn sub(mut self, rhs: AltField<V>) -> AltField<V> {
        self += -rhs;
        self
    }
}
