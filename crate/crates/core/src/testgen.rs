//! Seeded random generators for polynomials, fields, and coordinate maps.
//! Everything is driven by an explicit `ChaCha8Rng` so runs are reproducible.

use rand::seq::SliceRandom;
use rand::Rng;
pub use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::exterior::{AltField, Variance};
use crate::poly::linalg::{self, Matrix};
use crate::poly::{rat, CoordMap, Monomial, Rational, TruncatedPoly};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonzero small integer in `[-bound, bound]`.
pub fn small_nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let v = rng.gen_range(-bound..=bound);
        if v != 0 {
            return v;
        }
    }
}

pub fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(small_nonzero(rng, 5), rng.gen_range(1..=3))
}

/// Random monomial in `vars` of total degree in `[min_deg, max_deg]`.
pub fn random_monomial(
    rng: &mut ChaCha8Rng,
    n: usize,
    vars: &[usize],
    min_deg: u32,
    max_deg: u32,
) -> Monomial {
    let deg = rng.gen_range(min_deg..=max_deg);
    let mut e = vec![0u32; n];
    for _ in 0..deg {
        e[*vars.choose(rng).expect("nonempty variable set")] += 1;
    }
    Monomial::new(e)
}

/// Sparse random polynomial with at most `terms` terms whose degrees lie in
/// `[min_deg, max_deg]` (clamped to the cap).
pub fn random_poly(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    min_deg: u32,
    max_deg: u32,
    terms: usize,
) -> TruncatedPoly {
    let vars: Vec<usize> = (0..n).collect();
    random_poly_in(rng, n, cap, &vars, min_deg, max_deg, terms)
}

pub fn random_poly_in(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    vars: &[usize],
    min_deg: u32,
    max_deg: u32,
    terms: usize,
) -> TruncatedPoly {
    let max_deg = max_deg.min(cap);
    let t = (0..terms).map(|_| {
        (
            random_monomial(rng, n, vars, min_deg, max_deg),
            small_rational(rng),
        )
    });
    let items: Vec<_> = t.collect();
    TruncatedPoly::from_terms(n, cap, items)
}

/// All strictly increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Random degree-`k` field with about `density` of the basis slots filled.
pub fn random_field<V: Variance>(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    k: usize,
    max_deg: u32,
    terms: usize,
) -> AltField<V> {
    let slots = subsets(n, k);
    let mut out = AltField::<V>::zero(n, cap, k);
    for idx in slots {
        if rng.gen_bool(0.6) {
            let p = random_poly(rng, n, cap, 0, max_deg, terms);
            out += AltField::<V>::term(p, &idx);
        }
    }
    out
}

/// Random invertible rational matrix with small entries.
pub fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    loop {
        let m: Matrix = (0..n)
            .map(|_| (0..n).map(|_| rat(rng.gen_range(-2..=2), 1)).collect())
            .collect();
        if linalg::inverse(&m).is_some() {
            return m;
        }
    }
}

/// Random coordinate map with identity linear part and higher terms of
/// degree in `[2, max_deg]`.
pub fn random_tangent_map(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    max_deg: u32,
    terms: usize,
) -> CoordMap {
    let comps = (0..n)
        .map(|i| TruncatedPoly::var(i, n, cap) + random_poly(rng, n, cap, 2, max_deg, terms))
        .collect();
    CoordMap::new(comps).expect("identity linear part")
}

/// Random coordinate map with a random invertible linear part.
pub fn random_map(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: u32,
    max_deg: u32,
    terms: usize,
) -> CoordMap {
    let lin = CoordMap::linear(&random_invertible(rng, n), cap).expect("invertible");
    let comps = lin
        .components()
        .iter()
        .map(|c| c + &random_poly(rng, n, cap, 2, max_deg, terms))
        .collect();
    CoordMap::new(comps).expect("invertible linear part")
}

/// `a ∘ h` for a univariate polynomial given by its coefficients
/// (`a[k]` multiplies `t^k`), by Horner's rule.
pub fn compose_univariate(a: &[Rational], h: &TruncatedPoly) -> TruncatedPoly {
    let (n, cap) = (h.n_vars(), h.cap());
    a.iter().rev().fold(TruncatedPoly::zero(n, cap), |acc, c| {
        &acc * h + TruncatedPoly::constant(c.clone(), n, cap)
    })
}

/// Derivative of a univariate coefficient list.
pub fn univariate_derivative(a: &[Rational]) -> Vec<Rational> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * Rational::from_integer((k as i64).into()))
        .collect()
}

/// Random univariate polynomial `Σ_{k=min..=max} a_k t^k` with small
/// rational coefficients (some may vanish, the top one does not).
pub fn random_univariate(rng: &mut ChaCha8Rng, min_deg: usize, max_deg: usize) -> Vec<Rational> {
    let mut a = vec![Rational::from_integer(0.into()); max_deg + 1];
    for c in a.iter_mut().take(max_deg + 1).skip(min_deg) {
        if rng.gen_bool(0.7) {
            *c = small_rational(rng);
        }
    }
    a[max_deg] = small_rational(rng);
    a
}

/// The (n−1)-vector dual to `df + y dg + y dy` (y = x_n) for the standard
/// volume; f and g should not involve y.
pub fn normal_form_seed(f: &TruncatedPoly, g: &TruncatedPoly) -> crate::exterior::MultiVector {
    use crate::exterior::{differential, form_to_mv, DiffForm, VolumeForm};
    let (n, cap) = (f.n_vars(), f.cap());
    let y = TruncatedPoly::var(n - 1, n, cap);
    let w = differential(f) + differential(g).mul_fn(&y) + DiffForm::term(y, &[n - 1]);
    form_to_mv(&w, &VolumeForm::standard(n, cap))
}

/// Moves a form `yᵖdy + Σ A_i dx_i` away from reduced shape: substitutes
/// `y = ỹ(1 + s)` and divides by the factor that appears in front of
/// `ỹᵖdỹ`, so the leading term stays exactly `ỹᵖdỹ`. `s` must vanish at 0.
pub fn perturb_reduced(
    w: &crate::exterior::DiffForm,
    p: u32,
    s: &TruncatedPoly,
) -> crate::exterior::DiffForm {
    let (n, cap) = (w.n_vars(), w.cap());
    let yi = n - 1;
    let y = TruncatedPoly::var(yi, n, cap);
    let one = TruncatedPoly::one(n, cap);
    let mut comps: Vec<TruncatedPoly> = (0..n).map(|i| TruncatedPoly::var(i, n, cap)).collect();
    comps[yi] = &y + &(&y * s);
    let phi = CoordMap::new(comps).expect("tangent substitution");
    let u = (&one + s).pow(p) * phi.jacobian_det();
    crate::exterior::pullback(w, &phi)
        .expect("same shape")
        .mul_fn(&u.inverse().expect("unit"))
}

/// `θ q dx + β x dq + γ x² dx` in coordinates `(x, y_1..y_r, [z], t..)`
/// with `q = Σ d_i y_i²/2 + ε x z`.
pub fn quadratic_type1_seed(
    n: usize,
    diag: &[Rational],
    epsilon: bool,
    params: [&Rational; 3],
    cap: u32,
) -> crate::exterior::DiffForm {
    use crate::exterior::{differential, DiffForm};
    let x = TruncatedPoly::var(0, n, cap);
    let mut q = TruncatedPoly::zero(n, cap);
    for (k, d) in diag.iter().enumerate() {
        q = q + TruncatedPoly::var(k + 1, n, cap)
            .pow(2)
            .scale(&(d / rat(2, 1)));
    }
    if epsilon {
        q = q + &x * &TruncatedPoly::var(diag.len() + 1, n, cap);
    }
    let [theta, beta, gamma] = params;
    DiffForm::term(&q.scale(theta) + &x.pow(2).scale(gamma), &[0])
        + differential(&q).mul_fn(&x.scale(beta))
}

/// `i_E i_X (dx1^dx2^dx3)` for the linear field `X = A x` and the Euler
/// field `E`, placed on the first three of `n` coordinates. Integrable, with
/// `dω = 3 i_X vol` when `tr A = 0`.
pub fn quadratic_type2_seed(a: &Matrix, n: usize, cap: u32) -> crate::exterior::DiffForm {
    use crate::exterior::{interior, DiffForm, MultiVector};
    let field = |rows: Vec<TruncatedPoly>| {
        MultiVector::from_terms(
            3,
            cap,
            1,
            rows.into_iter().enumerate().map(|(i, c)| (vec![i], c)),
        )
    };
    let xs: Vec<TruncatedPoly> = (0..3).map(|i| TruncatedPoly::var(i, 3, cap)).collect();
    let x = field(
        (0..3)
            .map(|i| {
                (0..3).fold(TruncatedPoly::zero(3, cap), |acc, j| {
                    acc + xs[j].scale(&a[i][j])
                })
            })
            .collect(),
    );
    let e = field(xs.clone());
    let vol = DiffForm::basis(3, cap, &[0, 1, 2]);
    let w3 = interior(&e, &interior(&x, &vol).expect("same shape")).expect("same shape");
    let keep = [0, 1, 2];
    DiffForm::from_terms(
        n,
        cap,
        1,
        w3.terms().map(|(idx, c)| (idx.clone(), c.embed(n, &keep))),
    )
}
