use rand::Rng;

use super::*;
use crate::error::Error;
use crate::exterior::{
    differential, form_to_mv, mv_to_form, pushforward, DiffForm, MultiVector, VolumeForm,
};
use crate::nambu::{is_integrable_1form, nambu_conditions};
use crate::poly::{rat, CoordMap, TruncatedPoly};
use crate::testgen::{self, compose_univariate, normal_form_seed, perturb_reduced};

fn x(i: usize, n: usize, cap: u32) -> TruncatedPoly {
    TruncatedPoly::var(i, n, cap)
}

fn dual(w: &DiffForm) -> MultiVector {
    form_to_mv(w, &VolumeForm::standard(w.n_vars(), w.cap()))
}

fn linear_gamma(l: &MultiVector) -> TruncatedPoly {
    let n = l.n_vars();
    let w = mv_to_form(l, &VolumeForm::standard(n, l.cap()));
    w.coeff(&[n - 1])
        .graded_part(1, &(0..n).collect::<Vec<_>>())
}

#[test]
fn classify_type1() {
    let (n, cap) = (4, 3);
    // d(x1^2/2 - x2^2/2 + x3^2/2)
    let q = (x(0, n, cap).pow(2) - x(1, n, cap).pow(2) + x(2, n, cap).pow(2)).scale(&rat(1, 2));
    let l = dual(&differential(&q));
    let c = classify_linear_part(&l).unwrap();
    match c.class {
        LinearClass::Type1 {
            rank, ref signs, ..
        } => {
            assert_eq!(rank, 3);
            let mut s = signs.clone();
            s.sort();
            assert_eq!(s, vec![-1, 1, 1]);
        }
        ref other => panic!("unexpected {:?}", other),
    }
    let w = transform(
        &mv_to_form(&l, &VolumeForm::standard(n, cap)),
        c.nf0.as_ref().unwrap(),
    )
    .unwrap();
    assert_eq!(linear_gamma(&dual(&w)), x(n - 1, n, cap));
}

#[test]
fn classify_excluded_and_zero() {
    for n in 3..=5 {
        let cap = 3;
        let idx: Vec<usize> = (0..n - 2).collect();
        let base = MultiVector::basis(n, cap, &idx);
        let euler = MultiVector::term(x(n - 2, n, cap), &[n - 2])
            + MultiVector::term(x(n - 1, n, cap), &[n - 1]);
        let c = classify_linear_part(&base.wedge(&euler)).unwrap();
        assert_eq!(c.class.tag(), "Type2Excluded");
        assert!(c.nf0.is_none());

        let quad = MultiVector::term(x(0, n, cap).pow(2), &(0..n - 1).collect::<Vec<_>>());
        assert_eq!(
            classify_linear_part(&quad).unwrap().class,
            LinearClass::Zero
        );
    }
    let n = 3;
    let not_zero_at_0 = MultiVector::basis(n, 3, &[0, 1]);
    assert!(classify_linear_part(&not_zero_at_0).is_err());
}

#[test]
fn classify_type2_has_nf0() {
    let (n, cap) = (3, 3);
    // ∂1 ∧ (x2 + x3)∂2 is dual to (x2 + x3) dx3: not closed, nonzero symmetric part
    let l = MultiVector::basis(n, cap, &[0])
        .wedge(&MultiVector::term(&x(1, n, cap) + &x(2, n, cap), &[1]));
    let c = classify_linear_part(&l).unwrap();
    assert_eq!(c.class.tag(), "Type2");
    let p = c.nf0.unwrap();
    let w = transform(&mv_to_form(&l, &VolumeForm::standard(n, cap)), &p).unwrap();
    assert_eq!(
        w.coeff(&[n - 1]).graded_part(1, &[0, 1, 2]),
        x(n - 1, n, cap)
    );
}

#[test]
fn nf0_for_random_symmetric_parts() {
    let mut r = testgen::rng(5);
    for _ in 0..30 {
        let n = r.gen_range(3..=5);
        let cap = 3;
        let q = testgen::random_poly(&mut r, n, cap, 2, 2, 4);
        if q.is_zero() {
            continue;
        }
        let l = dual(&differential(&q));
        let c = classify_linear_part(&l).unwrap();
        assert_eq!(c.class.tag(), "Type1");
        let w = transform(
            &mv_to_form(&l, &VolumeForm::standard(n, cap)),
            c.nf0.as_ref().unwrap(),
        )
        .unwrap();
        let all: Vec<usize> = (0..n).collect();
        assert_eq!(w.coeff(&[n - 1]).graded_part(1, &all), x(n - 1, n, cap));
    }
}

#[test]
fn prepare_y_examples() {
    let (n, cap) = (3, 5);
    let y = x(2, n, cap);
    // already Γ = y: identity
    let w = DiffForm::term(y.clone(), &[2]) + DiffForm::term(x(0, n, cap), &[0]);
    let s = prepare_y(&dual(&w)).unwrap();
    assert!(s.accumulated().is_identity());

    // Γ = y + y x1
    let w = DiffForm::term(&y + &(&y * &x(0, n, cap)), &[2]) + DiffForm::term(x(1, n, cap), &[1]);
    let s = prepare_y(&dual(&w)).unwrap();
    assert_eq!(s.gamma(), y);
    assert!(s.consistency().unwrap().holds());

    // not in NF0
    let w = DiffForm::term(x(0, n, cap), &[2]);
    assert!(matches!(prepare_y(&dual(&w)), Err(Error::Precondition(_))));
}

fn seed_case(r: &mut testgen::ChaCha8Rng, n: usize, cap: u32) -> MultiVector {
    let xs: Vec<usize> = (0..n - 1).collect();
    let h = testgen::random_poly_in(r, n, cap, &xs, 1, 2, 3);
    let a = testgen::random_univariate(r, 2, 3);
    let b = testgen::random_univariate(r, 2, 3);
    let l = normal_form_seed(&compose_univariate(&a, &h), &compose_univariate(&b, &h));
    pushforward(&l, &testgen::random_tangent_map(r, n, cap, 3, 2)).unwrap()
}

#[test]
fn prepare_y_invariants_random() {
    let mut r = testgen::rng(17);
    for _ in 0..20 {
        let n = r.gen_range(3..=4);
        let l = seed_case(&mut r, n, 5);
        let s = prepare_y(&l).unwrap();
        s.check_invariants().unwrap();
        assert_eq!(s.gamma(), x(n - 1, n, 5));
    }
}

#[test]
fn lemma_steps_keep_invariants_and_integrability() {
    let mut r = testgen::rng(23);
    for _ in 0..4 {
        let n = r.gen_range(3..=4);
        let cap = 5;
        let l = seed_case(&mut r, n, cap);
        let mut s = prepare_y(&l).unwrap();
        let original = mv_to_form(&l, &VolumeForm::standard(n, cap));
        for stage in 0..cap as usize - 1 {
            s = lemma_step(&s).unwrap();
            assert_eq!(s.stage(), stage + 1);
            s.check_invariants().unwrap();
            assert!(s.consistency().unwrap().holds());
            assert!(is_integrable_1form(s.omega()).unwrap().holds());
            assert!(nambu_conditions(&s.tensor(), &VolumeForm::standard(n, cap))
                .unwrap()
                .holds());
            // the tensor in the new coordinates is the pushforward of the input
            let back = transform(&original, s.accumulated()).unwrap();
            assert_eq!(&back, s.omega());
        }
    }
}

#[test]
fn lemma_step_erases_injected_part() {
    let (n, cap) = (3, 5);
    let y = x(2, n, cap);
    // ω = y dy + y^2 d(x1 x2) is integrable and has δ⁽¹⁾ = d(x1 x2)
    let e = &x(0, n, cap) * &x(1, n, cap);
    let w = DiffForm::term(y.clone(), &[2]) + differential(&e).mul_fn(&y.pow(2));
    let s = BracketState::new(w, 1, CoordMap::identity(n, cap)).unwrap();
    s.check_invariants().unwrap();
    let t = lemma_step(&s).unwrap();
    for d in t.deltas() {
        assert!(d
            .graded_part(1, &[0, 1])
            .quotient_by_var_power(2, 2)
            .is_zero());
    }
    // nothing to erase: identity
    let w = DiffForm::term(y.clone(), &[2]) + DiffForm::term(&x(0, n, cap) * &y, &[0]);
    let s = BracketState::new(w, 0, CoordMap::identity(n, cap)).unwrap();
    assert!(lemma_step(&s).unwrap().accumulated().is_identity());
}

#[test]
fn lemma_step_rejects_non_integrable() {
    let (n, cap) = (3, 4);
    let y = x(2, n, cap);
    // δ = (x2, 0) at x-degree 1 is not closed
    let w = DiffForm::term(y.clone(), &[2]) + DiffForm::term(&y.pow(2) * &x(1, n, cap), &[0]);
    let s = BracketState::new(w, 1, CoordMap::identity(n, cap)).unwrap();
    assert!(matches!(lemma_step(&s), Err(Error::NotIntegrable(_))));
}

#[test]
fn normal_form_of_pushed_seed() {
    let (n, cap) = (3, 6);
    let f = x(0, n, cap).pow(2);
    let g = x(0, n, cap).pow(3);
    let mut r = testgen::rng(1);
    let l = pushforward(
        &normal_form_seed(&f, &g),
        &testgen::random_tangent_map(&mut r, n, cap, 3, 2),
    )
    .unwrap();
    let res = normal_form(&l, cap).unwrap();
    assert!(res.certificate.holds(), "{}", res.certificate);
    assert_eq!(res.residual_degree, cap + 1);
    assert_eq!(res.f.constant_term(), rat(0, 1));
    assert!(res.f.is_independent_of(&[2]) && res.g.is_independent_of(&[2]));
    let json = res.to_json();
    assert!(json["certificate"]["holds"].as_bool().unwrap());
}

#[test]
fn normal_form_of_normal_input() {
    let (n, cap) = (4, 5);
    let h = &x(0, n, cap) + &(&x(1, n, cap) * &x(2, n, cap));
    let f = h.pow(2).scale(&rat(1, 2));
    let g = h.pow(2) - h.pow(3);
    let res = normal_form(&normal_form_seed(&f, &g), cap).unwrap();
    assert!(res.certificate.holds());
    assert!(res.map.is_identity());
    assert_eq!(res.f.with_cap(cap), f);
    assert_eq!(res.g.with_cap(cap), g);
}

#[test]
fn normal_form_preconditions() {
    let (n, cap) = (3, 4);
    // Kupka-type: ∂1 ∧ (x2 ∂2 + x3 ∂3 + x2 ∂3) has nonzero modular tensor at 0
    let l = MultiVector::basis(n, cap, &[0]).wedge(
        &(MultiVector::term(x(1, n, cap), &[1])
            + MultiVector::term(&x(2, n, cap) + &x(1, n, cap), &[2])),
    );
    match normal_form(&l, cap) {
        Err(Error::Precondition(m)) => assert!(m.contains("modular"), "{}", m),
        other => panic!("unexpected {:?}", other.map(|r| r.certificate)),
    }
    let quad = MultiVector::term(x(0, n, cap).pow(2), &[0, 1]);
    assert!(matches!(
        normal_form(&quad, cap),
        Err(Error::Precondition(_))
    ));
    // not Nambu: ω = x1 dx3 + x3 dx2 + x2 x3 dx1... integrability fails
    let w = DiffForm::term(x(2, n, cap), &[2])
        + DiffForm::term(x(0, n, cap), &[0])
        + DiffForm::term(&x(1, n, cap) * &x(2, n, cap), &[1])
        + DiffForm::term(x(1, n, cap).pow(2), &[0]);
    assert!(!is_integrable_1form(&w).unwrap().holds());
    assert!(matches!(
        normal_form(&dual(&w), cap),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn reduce_p_examples() {
    let (n, cap) = (3, 5);
    let y = x(2, n, cap);
    let w = DiffForm::term(y.pow(2), &[2]) + DiffForm::term(x(0, n, cap), &[0]);
    let res = reduce_p(&w, 2, cap).unwrap();
    assert_eq!(res.form, w);
    assert_eq!(res.unit, TruncatedPoly::one(n, cap));
    assert!(res.map.is_identity());

    let missing = DiffForm::term(x(0, n, cap), &[0]);
    assert!(matches!(
        reduce_p(&missing, 2, cap),
        Err(Error::Precondition(_))
    ));
    let bad = DiffForm::term(y.pow(2), &[2]) + DiffForm::term(x(1, n, cap), &[0]);
    assert!(matches!(
        reduce_p(&bad, 2, cap),
        Err(Error::NotIntegrable(_))
    ));
}

/// `yᵖdy + Σ_j yʲ d(a_j ∘ h)`: integrable since it only involves y and h.
/// `yᵖdy + Σ_j yʲ d(a_j∘h)` with coefficients of order at least p.
fn reduced_seed(r: &mut testgen::ChaCha8Rng, n: usize, cap: u32, p: u32) -> DiffForm {
    let xs: Vec<usize> = (0..n - 1).collect();
    let h = testgen::random_poly_in(r, n, cap, &xs, 1, 2, 3);
    let y = x(n - 1, n, cap);
    let mut w = DiffForm::term(y.pow(p), &[n - 1]);
    for j in 0..=p {
        let lo = (p - j + 1) as usize;
        let a = testgen::random_univariate(r, lo, lo + 1);
        w += differential(&compose_univariate(&a, &h)).mul_fn(&y.pow(j));
    }
    w
}

#[test]
fn reduce_p_restores_shape() {
    let mut r = testgen::rng(31);
    for p in 1..=3 {
        for _ in 0..3 {
            let (n, cap) = (3, 6);
            let w0 = reduced_seed(&mut r, n, cap, p);
            let s = testgen::random_poly(&mut r, n, cap, 1, 2, 2);
            let w = perturb_reduced(&w0, p, &s);
            let t = w.wedge(&crate::exterior::exterior_derivative(&w));
            assert!(t.with_cap(cap - 1).is_zero());
            let res = reduce_p(&w, p, cap).unwrap();
            assert!(res.certificate.holds(), "{}", res.certificate);
            assert_eq!(res.alphas.len(), p as usize + 1);
        }
    }
}

#[test]
fn reduce_p_low_order_coefficients() {
    // A(0) != 0: read as an exact polynomial at a lifted working cap
    let (n, cap) = (2, 4);
    let (x1, y) = (x(0, n, cap), x(1, n, cap));
    let w = DiffForm::term(y.pow(2), &[1])
        + DiffForm::term(&TruncatedPoly::one(n, cap) + &(&x1 * &y.pow(3)), &[0]);
    let res = reduce_p(&w, 2, cap).unwrap();
    assert!(res.certificate.holds(), "{}", res.certificate);

    let (n, cap) = (3, 4);
    let v = |i| x(i, n, cap);
    let y = v(2);
    let w = DiffForm::term(y.clone(), &[2])
        + DiffForm::term(&TruncatedPoly::one(n, cap) + &y.pow(2), &[0])
        + DiffForm::term(&v(1) * &y.pow(2), &[1]);
    assert!(matches!(reduce_p(&w, 1, cap), Err(Error::NotIntegrable(_))));
}

#[test]
fn reduce_p1_matches_normal_form_shape() {
    let mut r = testgen::rng(37);
    let (n, cap) = (3, 5);
    let h = &x(0, n, cap) + &x(1, n, cap).pow(2);
    let f = h.pow(2);
    let g = h.pow(3);
    let w0 = mv_to_form(&normal_form_seed(&f, &g), &VolumeForm::standard(n, cap));
    let s = testgen::random_poly(&mut r, n, cap, 1, 2, 2);
    let res = reduce_p(&perturb_reduced(&w0, 1, &s), 1, cap).unwrap();
    assert!(res.certificate.holds());
    // affine in y with closed slices, as in the normal form
    for a in &res.alphas {
        assert!(crate::exterior::exterior_derivative(a)
            .with_cap(cap - 1)
            .is_zero());
    }
    let nf = normal_form(&form_to_mv(&res.form, &VolumeForm::standard(n, cap)), cap).unwrap();
    assert!(nf.certificate.holds());
}

#[test]
fn p2_factor_closed_formula() {
    let (n, cap) = (3, 6);
    let f = x(0, n, cap);
    let y = x(2, n, cap);
    // a = t^2, b = t, c = t^3
    let coeff = f.pow(2).scale_int(3) + &f * &f.scale_int(2) + &y * &f.scale_int(2) + y.pow(2);
    let w0 = DiffForm::term(y.pow(2), &[2]) + differential(&f).mul_fn(&coeff);
    let res = p2_factor(&w0).unwrap();
    assert!(res.certificate.holds());
    assert_eq!(res.g.with_cap(cap), f.pow(2));
    assert_eq!(res.h.with_cap(cap), f);
    assert_eq!(res.k.with_cap(cap), f.pow(3));
}

#[test]
fn p2_factor_degenerate_and_violated() {
    let (n, cap) = (3, 5);
    let y = x(2, n, cap);
    let k = &x(0, n, cap) * &x(1, n, cap);
    let w0 = DiffForm::term(y.pow(2), &[2]) + differential(&k);
    let res = p2_factor(&w0).unwrap();
    assert!(res.g.is_zero() && res.h.is_zero());
    assert_eq!(res.k.with_cap(cap), k);

    // α0 = dx1, α1 = dx2: α0 ∧ α1 ≠ 0
    let w0 = DiffForm::term(y.pow(2), &[2])
        + DiffForm::basis(n, cap, &[0])
        + DiffForm::term(y.clone(), &[1]);
    match p2_factor(&w0) {
        Err(Error::NotIntegrable(m)) => assert!(m.contains("a0^a1"), "{}", m),
        other => panic!("unexpected {:?}", other.map(|r| r.certificate)),
    }
}

#[test]
fn verify_pullback_examples() {
    let (n, cap) = (3, 5);
    let x1 = x(0, n, cap);
    let y = x(2, n, cap);
    let w = DiffForm::term(x1.scale_int(2) + &y * &x1.pow(2).scale_int(3), &[0])
        + DiffForm::term(y.clone(), &[2]);
    let (u, v) = (x(0, 2, cap), x(1, 2, cap));
    let w2 = DiffForm::term(u.scale_int(2) + &u.pow(2).scale_int(3) * &v, &[0])
        + DiffForm::term(v.clone(), &[1]);
    let one = TruncatedPoly::one(n, cap);
    assert!(verify_pullback(&w, &x1, &w2, &one).unwrap().holds());

    let zero = DiffForm::zero(2, cap, 1);
    let v0 = verify_pullback(&w, &x1, &zero, &one).unwrap();
    assert!(!v0.holds());
    assert!(v0.checks[0].witness.is_some());

    // scaling the input by a unit and passing the unit back
    let unit = &one + &x(1, n, cap);
    let scaled = w.mul_fn(&unit.inverse().unwrap());
    assert!(verify_pullback(&scaled, &x1, &w2, &unit).unwrap().holds());
    assert!(matches!(
        verify_pullback(&w, &x1, &w2, &x1),
        Err(Error::NotUnit)
    ));
}
