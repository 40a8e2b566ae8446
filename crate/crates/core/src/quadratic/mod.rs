//! Quadratic integrable 1-forms.
//!
//! The modular tensor of the dual (n−1)-vector is linear and dual to `dω`.
//! When `dω` has a constant divisor it is `dx ∧ dq` (type 1) and
//! `ω = φ*((γx² + θy)dx + βx dy)` with `φ = (x, q)`; otherwise (type 2)
//! `ω` depends on three linear coordinates only and the data reduce to a
//! quadratic Poisson structure in dimension 3. Closed forms are reported
//! separately with a cubic potential.

mod adapt;
mod extract;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exterior::{
    differential, exterior_derivative, form_to_mv, interior, mv_to_form, pullback, schouten,
    DiffForm, MultiVector, VolumeForm,
};
use crate::nambu::{modular, verify_type_2r};
use crate::normalform::{poincare_solve, verify_pullback_along};
use crate::poly::linalg::{self, Matrix};
use crate::poly::{CoordMap, Rational, TruncatedPoly};
use crate::report::{Check, Verdict, Witness};

pub use adapt::{linear_adapt, Adaptation, QSignature};
pub use extract::{type1_extract, Type1Params};

#[derive(Clone, Debug)]
pub struct Type1Data {
    /// Canonically scaled: the first nonzero of `(θ, β, γ)` is 1.
    pub theta: Rational,
    pub beta: Rational,
    pub gamma: Rational,
    /// `ω = scalar · (θ q dx + β x dq + γ x² dx)` in adapted coordinates.
    pub scalar: Rational,
    pub signature: QSignature,
    /// `q` in adapted coordinates.
    pub q: TruncatedPoly,
    /// Input coordinates as functions of the adapted ones.
    pub substitution: CoordMap,
    /// Adapted coordinates as functions of the input ones.
    pub map: CoordMap,
}

#[derive(Clone, Debug)]
pub struct Type2Data {
    /// The 1-form in the three splitting coordinates.
    pub form3: DiffForm,
    /// Its dual quadratic Poisson bivector in dimension 3.
    pub bivector: MultiVector,
    /// Input coordinates as functions of the splitting ones; the form only
    /// involves the first three.
    pub substitution: CoordMap,
    /// The remaining n−3 coordinate fields, in input coordinates.
    pub fields: Vec<MultiVector>,
}

#[derive(Clone, Debug)]
pub enum QuadClass {
    /// `dω = 0`, `ω = df` with `f` cubic.
    Exact {
        potential: TruncatedPoly,
    },
    Type1(Type1Data),
    Type2(Type2Data),
}

impl QuadClass {
    pub fn tag(&self) -> &'static str {
        match self {
            QuadClass::Exact { .. } => "Exact",
            QuadClass::Type1(_) => "Type1",
            QuadClass::Type2(_) => "Type2",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuadClassification {
    pub class: QuadClass,
    /// Modular tensor of the dual (n−1)-vector for the standard volume.
    pub modular: MultiVector,
    pub certificate: Verdict,
}

fn comps_json(m: &CoordMap) -> Vec<String> {
    m.components()
        .iter()
        .map(|c| c.to_canonical_string())
        .collect()
}

impl QuadClassification {
    pub fn to_json(&self) -> Value {
        let body = match &self.class {
            QuadClass::Exact { potential } => json!({"potential": potential.to_canonical_string()}),
            QuadClass::Type1(t) => json!({
                "theta": t.theta.to_string(),
                "beta": t.beta.to_string(),
                "gamma": t.gamma.to_string(),
                "scalar": t.scalar.to_string(),
                "q_signature": t.signature.to_json(),
                "q": t.q.to_canonical_string(),
                "map": comps_json(&t.map),
                "substitution": comps_json(&t.substitution),
            }),
            QuadClass::Type2(t) => json!({
                "form3": t.form3.to_canonical_string(),
                "bivector": t.bivector.to_canonical_string(),
                "substitution": comps_json(&t.substitution),
                "fields": t.fields.iter().map(|f| f.to_canonical_string()).collect::<Vec<_>>(),
            }),
        };
        json!({
            "tag": self.class.tag(),
            "data": body,
            "modular": self.modular.to_canonical_string(),
            "certificate": self.certificate.to_json(),
        })
    }
}

/// Classifies an integrable 1-form with homogeneous quadratic coefficients.
pub fn classify_quadratic(w: &DiffForm) -> Result<QuadClassification> {
    let n = w.n_vars();
    if w.degree() != 1 || n < 2 {
        return Err(Error::DegreeOutOfRange {
            what: "quadratic classification (needs a 1-form)",
            degree: w.degree(),
            n,
        });
    }
    if w.cap() < 2 {
        return Err(Error::Precondition("cap must be at least 2".into()));
    }
    for (idx, c) in w.terms() {
        if let Some((m, _)) = c.terms().find(|(m, _)| m.degree() != 2) {
            return Err(Error::Precondition(format!(
                "non-quadratic: dx{} has the term {} of degree {}",
                idx[0] + 1,
                m,
                m.degree()
            )));
        }
    }
    if w.is_zero() {
        return Err(Error::Precondition("the form vanishes".into()));
    }
    let cap = w.cap().max(3);
    let w = w.with_cap(cap);
    let dw = exterior_derivative(&w);
    if let Some(wt) = Witness::of_field("", &w.wedge(&dw)) {
        return Err(Error::NotIntegrable(format!(
            "w^dw has coefficient {} at {} {}",
            wt.coefficient, wt.monomial, wt.location
        )));
    }
    let vol = VolumeForm::standard(n, cap);
    let lam = form_to_mv(&w, &vol);
    let dl = modular(&lam, &vol)?;
    let eta = mv_to_form(&dl, &vol);
    let mut cert = Verdict::new();
    cert.push(Check::zero_field("w^dw", &w.wedge(&dw)));
    cert.push(Check::zero_field("i_DL vol = dw", &(&eta - &dw)));

    if eta.is_zero() {
        let all: Vec<usize> = (0..n).collect();
        let comps: Vec<TruncatedPoly> = all.iter().map(|&i| w.coeff(&[i])).collect();
        let f = poincare_solve(&comps, &all)?.with_cap(cap);
        cert.push(Check::zero_field("w = df", &(&w - &differential(&f))));
        return Ok(QuadClassification {
            class: QuadClass::Exact { potential: f },
            modular: dl,
            certificate: cert,
        });
    }
    let class = if adapt::constant_divisors(&eta).is_empty() {
        QuadClass::Type2(type2(&w, &lam, &mut cert)?)
    } else {
        QuadClass::Type1(type1(&w, &eta, &mut cert)?)
    };
    Ok(QuadClassification {
        class,
        modular: dl,
        certificate: cert,
    })
}

fn type1(w: &DiffForm, eta: &DiffForm, cert: &mut Verdict) -> Result<Type1Data> {
    let (n, cap) = (w.n_vars(), w.cap());
    let ad = linear_adapt(eta)?;
    let wa = pullback(w, &ad.substitution)?;
    let x = TruncatedPoly::var(0, n, cap);
    cert.push(Check::zero_field(
        "dw = dx^dq",
        &(&exterior_derivative(&wa) - &differential(&x).wedge(&differential(&ad.q))),
    ));
    let par = type1_extract(&wa, &ad.signature)?;
    let scalar = [&par.theta, &par.beta, &par.gamma]
        .into_iter()
        .find(|c| !c.is_zero())
        .cloned()
        .unwrap_or_else(Rational::one);
    let (theta, beta, gamma) = (
        &par.theta / &scalar,
        &par.beta / &scalar,
        &par.gamma / &scalar,
    );
    let q = ad.q.clone();
    let nf = (DiffForm::term(&q.scale(&theta) + &x.pow(2).scale(&gamma), &[0])
        + differential(&q).mul_fn(&x.scale(&beta)))
    .scale(&scalar);
    let map = ad.substitution.invert()?;
    cert.push(Check::zero_field(
        "reconstruction",
        &(&pullback(&nf, &map)? - w),
    ));
    let (u, v) = (TruncatedPoly::var(0, 2, cap), TruncatedPoly::var(1, 2, cap));
    let w2 = DiffForm::term(&u.pow(2).scale(&gamma) + &v.scale(&theta), &[0])
        + DiffForm::term(u.scale(&beta), &[1]);
    let phi = vec![map.component(0).clone(), q.compose(map.components())?];
    let unit = TruncatedPoly::constant(scalar.recip(), n, cap);
    for c in verify_pullback_along(w, &phi, &w2, &unit)?.checks {
        cert.push(c);
    }
    Ok(Type1Data {
        theta,
        beta,
        gamma,
        scalar,
        signature: ad.signature,
        q,
        substitution: ad.substitution,
        map,
    })
}

/// Constant fields `v` with `i_v ω = 0` and `i_v dω = 0`; for quadratic ω
/// the second condition is `L_v ω = 0`.
fn splitting_fields(w: &DiffForm) -> Result<Vec<Vec<Rational>>> {
    let (n, cap) = (w.n_vars(), w.cap());
    let dw = exterior_derivative(w);
    let mut rows: std::collections::BTreeMap<(u8, Vec<usize>, Vec<u32>), Vec<Rational>> =
        Default::default();
    for k in 0..n {
        let e = MultiVector::basis(n, cap, &[k]);
        for (tag, f) in [(0u8, interior(&e, w)?), (1, interior(&e, &dw)?)] {
            for (idx, c) in f.terms() {
                for (m, v) in c.terms() {
                    rows.entry((tag, idx.clone(), m.exponents().to_vec()))
                        .or_insert_with(|| vec![Rational::zero(); n])[k] = v.clone();
                }
            }
        }
    }
    let a: Matrix = rows.into_values().collect();
    Ok(linalg::nullspace(&a, n))
}

fn type2(w: &DiffForm, lam: &MultiVector, cert: &mut Verdict) -> Result<Type2Data> {
    let (n, cap) = (w.n_vars(), w.cap());
    let kernel = splitting_fields(w)?;
    if n < 3 || kernel.len() < n - 3 {
        return Err(Error::Unsupported(format!(
            "dw has no constant divisor, but the form is invariant along only {} of the {} directions needed for a linear splitting",
            kernel.len(),
            n.saturating_sub(3)
        )));
    }
    let k = n - 3;
    let basis = linalg::complete_basis(&kernel, n);
    let cols: Vec<Vec<Rational>> = basis[k..].iter().chain(&basis[..k]).cloned().collect();
    let p = linalg::transpose(&cols);
    let substitution = CoordMap::linear(&p, cap)?;
    let ws = pullback(w, &substitution)?;
    let keep = [0, 1, 2];
    let mut terms = Vec::new();
    for i in 0..3 {
        let c = ws.coeff(&[i]);
        if !c.is_independent_of(&(3..n).collect::<Vec<_>>()) {
            return Err(Error::Invariant(
                "splitting coordinates leak into the form".into(),
            ));
        }
        terms.push((vec![i], c.restrict(&keep)?));
    }
    let form3 = DiffForm::from_terms(3, cap, 1, terms);
    let embedded = DiffForm::from_terms(
        n,
        cap,
        1,
        form3
            .terms()
            .map(|(idx, c)| (idx.clone(), c.embed(n, &keep))),
    );
    cert.push(Check::zero_field("splitting", &(&ws - &embedded)));
    let bivector = form_to_mv(&form3, &VolumeForm::standard(3, cap));
    cert.push(Check::zero_field(
        "[L3,L3] = 0",
        &schouten(&bivector, &bivector),
    ));
    let fields: Vec<MultiVector> = cols[3..]
        .iter()
        .map(|v| {
            MultiVector::from_terms(
                n,
                cap,
                1,
                (0..n).map(|i| (vec![i], TruncatedPoly::constant(v[i].clone(), n, cap))),
            )
        })
        .collect();
    for c in verify_type_2r(lam, &fields)?.checks {
        cert.push(c);
    }
    Ok(Type2Data {
        form3,
        bivector,
        substitution,
        fields,
    })
}
