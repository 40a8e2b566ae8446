use nambu_core::exterior::*;
use nambu_core::testgen::{self, random_field};
use proptest::prelude::*;
use rand::Rng;

fn sign(e: i64) -> bool {
    e.rem_euclid(2) == 0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schouten_leibniz(s in any::<u64>(), n in 2usize..=4) {
        let mut r = testgen::rng(s);
        let degs: Vec<usize> = (0..3).map(|_| r.gen_range(0..=2)).collect();
        let a: MultiVector = random_field(&mut r, n, 6, degs[0], 2, 2);
        let b: MultiVector = random_field(&mut r, n, 6, degs[1], 2, 2);
        let c: MultiVector = random_field(&mut r, n, 6, degs[2], 2, 2);
        let (da, db) = (degs[0] as i64, degs[1] as i64);
        let lhs = schouten(&a, &b.wedge(&c));
        let first = schouten(&a, &b).wedge(&c);
        let second = b.wedge(&schouten(&a, &c));
        let rhs = if sign((da - 1) * db) { first + second } else { first - second };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn schouten_jacobi(s in any::<u64>(), n in 2usize..=4) {
        let mut r = testgen::rng(s);
        let degs: Vec<usize> = (0..3).map(|_| r.gen_range(0..=2)).collect();
        let a: MultiVector = random_field(&mut r, n, 6, degs[0], 2, 2);
        let b: MultiVector = random_field(&mut r, n, 6, degs[1], 2, 2);
        let c: MultiVector = random_field(&mut r, n, 6, degs[2], 2, 2);
        let (da, db) = (degs[0] as i64, degs[1] as i64);
        let lhs = schouten(&a, &schouten(&b, &c));
        let first = schouten(&schouten(&a, &b), &c);
        let second = schouten(&b, &schouten(&a, &c));
        let rhs = if sign((da - 1) * (db - 1)) { first + second } else { first - second };
        prop_assert_eq!(lhs.with_cap(4), rhs.with_cap(4));
    }
}
