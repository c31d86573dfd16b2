use std::collections::BTreeSet;

use elliptic_ruijsenaars::operators::{build, Family};
use elliptic_ruijsenaars::shiftalg::{
    coefficient, commutator, compose, equal_at, relative_residual, FormalOperator, SamplerConfig, ShiftKey,
};
use elliptic_ruijsenaars::specialfn::{ModelParams, VariantKind};
use elliptic_ruijsenaars::{Result, C64};
use proptest::prelude::*;

fn steps() -> Vec<C64> {
    vec![C64::new(0.14, 0.19), C64::new(-0.28, 0.09)]
}

type TermSpec = (i32, i32, f64, f64, f64);

/// Terms `(k0, k1, a, b, c)` with coefficient `a + b·v0 + c·sin(v1)`.
fn operator(spec: &[TermSpec]) -> FormalOperator {
    let mut op = FormalOperator::zero(1, steps());
    for &(k0, k1, a, b, c) in spec {
        op.push_term(
            ShiftKey(vec![k0, k1]),
            coefficient(move |v| Ok(C64::new(a, 0.0) + v[0] * b + v[1].sin() * c)),
        );
    }
    op
}

fn terms() -> impl Strategy<Value = Vec<TermSpec>> {
    prop::collection::vec((-2i32..=2, -2i32..=2, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0), 1..4)
}

fn test_fn(v: &[C64]) -> Result<C64> {
    Ok((v[0] * C64::new(1.1, 0.3)).exp() + v[1] * v[1] * v[0])
}

fn cfg() -> SamplerConfig {
    SamplerConfig::default().with_samples(8).with_tolerance(1e-9)
}

fn pt() -> Vec<C64> {
    vec![C64::new(0.17, -0.04), C64::new(-0.31, 0.12)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(a in terms(), b in terms(), c in terms()) {
        let (a, b, c) = (operator(&a), operator(&b), operator(&c));
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        let rep = equal_at("assoc", &left, &right, &cfg()).unwrap();
        prop_assert!(rep.passed(), "{}", rep.max_residual);
    }

    #[test]
    fn composed_keys_are_pairwise_sums(a in terms(), b in terms()) {
        let (a, b) = (operator(&a), operator(&b));
        let ab = compose(&a, &b).unwrap();
        let want: BTreeSet<ShiftKey> = a.keys().flat_map(|ka| b.keys().map(move |kb| ka.add(kb))).collect();
        let got: BTreeSet<ShiftKey> = ab.keys().cloned().collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn apply_respects_composition(a in terms(), b in terms()) {
        let (a, b) = (operator(&a), operator(&b));
        let ab = compose(&a, &b).unwrap();
        let direct = ab.apply(test_fn, &pt()).unwrap();
        let nested = a.apply(|w| b.apply(test_fn, w), &pt()).unwrap();
        prop_assert!(relative_residual(direct, nested) < 1e-10);
    }

    #[test]
    fn composed_coefficients_match_explicit_sum(a in terms(), b in terms()) {
        let (a, b) = (operator(&a), operator(&b));
        let ab = compose(&a, &b).unwrap();
        let p = pt();
        for key in ab.keys() {
            let mut want = C64::new(0.0, 0.0);
            for ka in a.keys() {
                for kb in b.keys() {
                    if &ka.add(kb) == key {
                        let shifted = a.shifted_point(&p, ka);
                        want += a.coefficient_at(ka, &p).unwrap() * b.coefficient_at(kb, &shifted).unwrap();
                    }
                }
            }
            prop_assert!(relative_residual(ab.coefficient_at(key, &p).unwrap(), want) < 1e-12);
        }
    }
}

#[test]
fn shifts_do_not_commute_with_multiplication() {
    let shift = FormalOperator::shift(1, steps(), ShiftKey(vec![1, 0]));
    let mult = FormalOperator::multiplication(1, steps(), coefficient(|v| Ok(v[0])));
    let c = commutator(&shift, &mult).unwrap();
    let p = pt();
    // [T, x] = δ T
    let v = c.coefficient_at(&ShiftKey(vec![1, 0]), &p).unwrap();
    assert!(relative_residual(v, steps()[0]) < 1e-15);
}

#[test]
fn h_operators_apply_consistently() {
    let params = ModelParams::generic(VariantKind::Elliptic);
    let h1 = build(Family::H, 1, 1, 1, &params).unwrap();
    let d2 = build(Family::D, 1, 1, 2, &params).unwrap();
    let prod = compose(&h1, &d2).unwrap();
    let f = |v: &[C64]| Ok((v[0] - v[1] * 0.5).cos());
    let direct = prod.apply(f, &pt()).unwrap();
    let nested = h1.apply(|w| d2.apply(f, w), &pt()).unwrap();
    assert!(relative_residual(direct, nested) < 1e-10);
}

#[test]
fn mismatched_slots_are_rejected() {
    let a = FormalOperator::identity(1, steps());
    let b = FormalOperator::identity(1, vec![C64::new(0.1, 0.0)]);
    assert!(compose(&a, &b).is_err());
    assert!(equal_at("x", &a, &b, &cfg()).is_err());
}
