use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{differential, exterior_derivative, pullback, pullback_with, DiffForm};
use crate::poly::coordmap::inverse_poly_matrix;
use crate::poly::{CoordMap, TruncatedPoly};
use crate::report::{Check, Verdict, Witness};

use super::poincare::poincare_solve;

fn closed_err(e: Error, what: &str) -> Error {
    match e {
        Error::NotClosed { i, j } => Error::NotIntegrable(format!(
            "{}: closedness fails at ({}, {})",
            what,
            i + 1,
            j + 1
        )),
        other => other,
    }
}

/// `Σ_i (coefficient of y^j in A_i) dx_i` for j = 0..=p.
fn y_slices(w: &DiffForm, p: u32) -> Vec<DiffForm> {
    let (n, cap) = (w.n_vars(), w.cap());
    let yi = n - 1;
    (0..=p)
        .map(|j| {
            DiffForm::from_terms(
                n,
                cap,
                1,
                (0..yi).map(|i| (vec![i], w.coeff(&[i]).coeff_of_var_power(yi, j))),
            )
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct ReduceResult {
    /// `yᵖdy + Σ_{j≤p} yʲ α_j` in the new coordinates.
    pub form: DiffForm,
    /// `α_0..α_p`, 1-forms in x only.
    pub alphas: Vec<DiffForm>,
    /// New coordinates as functions of the input ones.
    pub map: CoordMap,
    /// Input coordinates as functions of the new ones.
    pub substitution: CoordMap,
    /// `unit · input = map*(form)`.
    pub unit: TruncatedPoly,
    pub certificate: Verdict,
}

impl ReduceResult {
    pub fn to_json(&self) -> Value {
        json!({
            "form": self.form.to_canonical_string(),
            "alphas": self.alphas.iter().map(|a| a.to_canonical_string()).collect::<Vec<_>>(),
            "map": self.map.components().iter().map(|c| c.to_canonical_string()).collect::<Vec<_>>(),
            "unit": self.unit.to_canonical_string(),
            "certificate": self.certificate.to_json(),
        })
    }
}

/// Brings an integrable `yᵖdy + Σ A_i dx_i` (y = x_n) to the form
/// `yᵖdy + Σ_{j≤p} yʲα_j` modulo the cap, up to a unit.
///
/// At x-degree r the part of `A_i` divisible by `y^{p+1}` is
/// `y^{p+1} ∂c/∂x_i`; the substitution `y = ỹ(1 − c)` removes it and turns
/// the leading term into `ỹᵖ U dỹ` with `U = (1 − c)ᵖ(1 − c − ỹ ∂_y c)`,
/// which is divided out.
pub fn reduce_p(w: &DiffForm, p: u32, cap: u32) -> Result<ReduceResult> {
    let n = w.n_vars();
    if w.degree() != 1 || n < 2 {
        return Err(Error::DegreeOutOfRange {
            what: "y^p reduction (needs a 1-form)",
            degree: w.degree(),
            n,
        });
    }
    let w_in = w.with_cap(cap);
    let yi = n - 1;
    let xs: Vec<usize> = (0..yi).collect();
    let y = TruncatedPoly::var(yi, n, cap);
    let lead = y.pow(p);
    if w_in.coeff(&[yi]) != lead {
        return Err(Error::Precondition(format!(
            "the dx{} coefficient must be exactly y^{} (y = x{})",
            n, p, n
        )));
    }
    // When the A_i vanish to order a < p at the origin, a stage needs input
    // terms above the cap: `A · U⁻¹` and `A(x, y(1 − c))` see the unknown top
    // of `c`. Each stage then loses 2(p − a) degrees, so the input is read
    // as an exact polynomial and processed at a lifted working cap.
    let a = xs
        .iter()
        .filter_map(|&i| w_in.coeff(&[i]).order())
        .min()
        .unwrap_or(u32::MAX);
    let stages = cap.saturating_sub(p);
    let loss = if a < p { 2 * (p - a) } else { 0 };
    let work = cap + loss * stages;
    let t = if loss > 0 {
        let big = 2 * w.max_degree() + 2;
        let wb = w.with_cap(big);
        wb.wedge(&exterior_derivative(&wb))
    } else {
        w_in.wedge(&exterior_derivative(&w_in))
            .with_cap(cap + a.min(p) - 1)
    };
    if let Some(wt) = Witness::of_field("", &t) {
        return Err(Error::NotIntegrable(format!(
            "w^dw has coefficient {} at {} {}",
            wt.coefficient, wt.monomial, wt.location
        )));
    }
    let w_work = w.with_cap(work);
    let yw = TruncatedPoly::var(yi, n, work);
    let one = TruncatedPoly::one(n, work);
    let mut cur = w_work.clone();
    let mut subst = CoordMap::identity(n, work);
    let mut scale = one.clone();
    // terms of degree >= err may differ from an exact reduction
    let mut err = work + 1;
    for r in 0..stages {
        let reliable = (err + a.min(p)).checked_sub(2 * p + 2);
        let deltas: Vec<TruncatedPoly> = xs
            .iter()
            .map(|&i| {
                let d = cur
                    .coeff(&[i])
                    .graded_part(r, &xs)
                    .quotient_by_var_power(yi, p + 1);
                match reliable {
                    Some(top) if top < work => d.with_cap(top).with_cap(work),
                    Some(_) => d,
                    None => TruncatedPoly::zero(n, work),
                }
            })
            .collect();
        err -= loss;
        if deltas.iter().all(TruncatedPoly::is_zero) {
            continue;
        }
        let c = poincare_solve(&deltas, &xs)
            .map_err(|e| closed_err(e, &format!("stage {}", r)))?
            .with_cap(work);
        let mut comps: Vec<TruncatedPoly> =
            (0..n).map(|i| TruncatedPoly::var(i, n, work)).collect();
        comps[yi] = &yw - &(&yw * &c);
        let phi = CoordMap::new(comps)?;
        let u = (&one - &c).pow(p) * phi.jacobian_det();
        let uinv = u.inverse()?;
        cur = pullback(&cur, &phi)?.mul_fn(&uinv);
        scale = &uinv * &scale.compose(phi.components())?;
        subst = subst.compose(&phi)?;
    }
    let cur = cur.with_cap(cap);
    let scale = scale.with_cap(cap);
    let subst = CoordMap::new(subst.components().iter().map(|c| c.with_cap(cap)).collect())?;

    let mut cert = Verdict::new();
    cert.push(Check::zero_poly(
        "leading term",
        &(cur.coeff(&[yi]) - &lead),
    ));
    let mut high = None;
    for &i in &xs {
        if high.is_none() {
            high = Witness::of_poly(
                format!("dx{}", i + 1),
                &cur.coeff(&[i]).quotient_by_var_power(yi, p + 1),
            );
        }
    }
    cert.push(Check::from_witness("y-degree <= p", high));
    let direct = pullback(&w_in, &subst)?.mul_fn(&scale);
    cert.push(Check::zero_field(
        "form = s * subst^*input",
        &(&direct - &cur),
    ));

    let map = subst.invert()?;
    let jac_at: Vec<Vec<TruncatedPoly>> = subst
        .jacobian()
        .iter()
        .map(|row| row.iter().map(|q| q.compose(map.components())).collect())
        .collect::<Result<_>>()?;
    let dmap = inverse_poly_matrix(&jac_at)?;
    let unit = scale.compose(map.components())?;
    let back = pullback_with(&cur, map.components(), &dmap)?;
    cert.push(Check::zero_field(
        "unit * input = map^*form",
        &(&back - &w_in.mul_fn(&unit)),
    ));

    Ok(ReduceResult {
        alphas: y_slices(&cur, p),
        form: cur,
        map,
        substitution: subst,
        unit,
        certificate: cert,
    })
}

#[derive(Clone, Debug)]
pub struct P2Factors {
    pub g: TruncatedPoly,
    pub h: TruncatedPoly,
    pub k: TruncatedPoly,
    pub certificate: Verdict,
}

impl P2Factors {
    pub fn to_json(&self) -> Value {
        json!({
            "g": self.g.to_canonical_string(),
            "h": self.h.to_canonical_string(),
            "k": self.k.to_canonical_string(),
            "certificate": self.certificate.to_json(),
        })
    }
}

fn potential(a: &DiffForm, xs: &[usize], what: &str) -> Result<TruncatedPoly> {
    let comps: Vec<TruncatedPoly> = xs.iter().map(|&i| a.coeff(&[i])).collect();
    poincare_solve(&comps, xs).map_err(|e| closed_err(e, what))
}

/// Factors a reduced form `y²dy + α_0 + yα_1 + y²α_2` as
/// `α_1 = dg`, `α_2 = dh`, `α_0 = dk + h dg`.
///
/// Integrability of the form is equivalent to `dα_1 = dα_2 = 0`,
/// `dα_0 = α_1∧α_2`, `α_0∧α_1 = α_2∧α_0 = 0`; these are checked first.
/// Since `α_j` is known up to degree `cap − j`, every identity is checked
/// up to the degree at which both sides are determined, and the factors
/// carry that precision: g up to `cap`, h up to `cap − 1`, k up to at
/// most `cap + 1`.
pub fn p2_factor(w0: &DiffForm) -> Result<P2Factors> {
    let (n, cap) = (w0.n_vars(), w0.cap());
    if w0.degree() != 1 || n < 2 {
        return Err(Error::DegreeOutOfRange {
            what: "p = 2 factorization (needs a 1-form)",
            degree: w0.degree(),
            n,
        });
    }
    let yi = n - 1;
    let xs: Vec<usize> = (0..yi).collect();
    if w0.coeff(&[yi]) != TruncatedPoly::var(yi, n, cap).pow(2) {
        return Err(Error::Precondition(format!(
            "the dx{} coefficient must be exactly y^2",
            n
        )));
    }
    if let Some(i) = xs.iter().find(|&&i| w0.coeff(&[i]).degree_in_var(yi) > 2) {
        return Err(Error::Precondition(format!(
            "the dx{} coefficient has y-degree above 2",
            i + 1
        )));
    }
    let big = 2 * cap + 2;
    let c = cap as i64;
    let a: Vec<DiffForm> = y_slices(w0, 2)
        .iter()
        .enumerate()
        .map(|(j, s)| s.with_cap(cap.saturating_sub(j as u32)).with_cap(big))
        .collect();
    let known = [c, c - 1, c - 2];
    let mut sys = Verdict::new();
    sys.push(known_zero(
        "d a1 = 0",
        &exterior_derivative(&a[1]),
        known[1] - 1,
    ));
    sys.push(known_zero(
        "d a2 = 0",
        &exterior_derivative(&a[2]),
        known[2] - 1,
    ));
    sys.push(known_zero(
        "d a0 = a1^a2",
        &(exterior_derivative(&a[0]) - a[1].wedge(&a[2])),
        (known[0] - 1).min(product_bound(&a[1], known[1], &a[2], known[2])),
    ));
    sys.push(known_zero(
        "a0^a1 = 0",
        &a[0].wedge(&a[1]),
        product_bound(&a[0], known[0], &a[1], known[1]),
    ));
    sys.push(known_zero(
        "a2^a0 = 0",
        &a[2].wedge(&a[0]),
        product_bound(&a[2], known[2], &a[0], known[0]),
    ));
    if let Some(c) = sys.first_failure() {
        let wt = c.witness.as_ref().expect("failing check has a witness");
        return Err(Error::NotIntegrable(format!(
            "{} fails at {} (monomial {}, coefficient {})",
            c.id, wt.location, wt.monomial, wt.coefficient
        )));
    }
    let at = |k: i64| k.clamp(0, big as i64) as u32;
    let g = potential(&a[1].with_cap(at(known[1])), &xs, "a1")?.with_cap(big);
    let h = potential(&a[2].with_cap(at(known[2])), &xs, "a2")?.with_cap(big);
    let (kg, kh) = (known[1] + 1, known[2] + 1);
    let (dg, dh) = (differential(&g), differential(&h));
    let hdg = dg.mul_fn(&h);
    let kb = known[0].min(product_bound(&dg, kg - 1, &DiffForm::scalar(h.clone()), kh));
    let beta = (&a[0] - &hdg).with_cap(at(kb));
    let k = potential(&beta, &xs, "a0 - h dg")?.with_cap(big);
    let dk = differential(&k);

    let mut cert = sys;
    cert.push(known_zero("a1 = dg", &(&a[1] - &dg), known[1]));
    cert.push(known_zero("a2 = dh", &(&a[2] - &dh), known[2]));
    cert.push(known_zero("a0 = dk + h dg", &(&a[0] - &(&dk + &hdg)), kb));
    cert.push(known_zero(
        "dk^dg = 0",
        &dk.wedge(&dg),
        product_bound(&dk, kb, &dg, kg - 1),
    ));
    cert.push(known_zero(
        "dg^dh = 0",
        &dg.wedge(&dh),
        product_bound(&dg, kg - 1, &dh, kh - 1),
    ));
    Ok(P2Factors {
        g: g.with_cap(at(kg.min(c + 1))),
        h: h.with_cap(at(kh.min(c + 1))),
        k: k.with_cap(at((kb + 1).min(c + 1))),
        certificate: cert,
    })
}

fn form_order(a: &DiffForm) -> Option<i64> {
    a.terms()
        .filter_map(|(_, c)| c.order())
        .min()
        .map(i64::from)
}

/// Degree up to which `a ∧ b` is determined when `a`, `b` are known up to
/// degrees `ka`, `kb`.
fn product_bound(a: &DiffForm, ka: i64, b: &DiffForm, kb: i64) -> i64 {
    let x = form_order(b).map_or(i64::MAX, |o| ka + o);
    let y = form_order(a).map_or(i64::MAX, |o| kb + o);
    x.min(y)
}

/// Zero check on the terms of degree at most `bound`; vacuous if the bound
/// is negative.
fn known_zero(id: &str, f: &DiffForm, bound: i64) -> Check {
    if bound < 0 {
        return Check::pass(id);
    }
    Check::zero_field(id, &f.with_cap(bound.min(f.cap() as i64) as u32))
}
