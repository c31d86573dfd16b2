use elliptic_ruijsenaars::independence::{
    check_independence, coefficient_matrix, free_shift_sum, kappa_eq_delta_suite, lemma_f, numeric_rank,
    weighted_partitions, DEFAULT_RANK_THRESHOLD,
};
use elliptic_ruijsenaars::operators::{build_h, compositions};
use elliptic_ruijsenaars::shiftalg::{
    coefficient, equal_at, relative_residual, PointSampler, SamplerConfig, ShiftKey, Verdict,
};
use elliptic_ruijsenaars::specialfn::{ModelParams, VariantKind};
use elliptic_ruijsenaars::C64;

fn pts(n: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    let cfg = SamplerConfig::default().with_seed(seed);
    (0..count).map(|i| PointSampler::new(&cfg, i as u64).point(n)).collect()
}

#[test]
fn matrix_shapes() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    let mat = coefficient_matrix(2, 1, 3, &pts(3, 2, 1), &p).unwrap();
    assert_eq!(mat.n_rows(), 3);
    assert_eq!(mat.keys.len(), compositions(3, 3).len());
    assert_eq!(mat.n_cols(), 2 * mat.keys.len());
    let single = coefficient_matrix(1, 1, 1, &pts(2, 1, 1), &p).unwrap();
    assert_eq!(single.rows, vec![vec![1, 0]]);
    assert!(single.entries.iter().all(|v| v.norm() > 0.0));
    assert_eq!(weighted_partitions(2, 2).len(), 2);
}

/// Entries of the `(1,1)`, `N = 2` matrix rebuilt from `H^{(1)}`, `H^{(2)}` by
/// summing products of shifted coefficients by hand.
#[test]
fn entries_match_hand_composition() {
    let p = ModelParams::generic(VariantKind::Trigonometric);
    let points = pts(2, 2, 5);
    let mat = coefficient_matrix(1, 1, 2, &points, &p).unwrap();
    let h1 = build_h(1, 1, 1, &p).unwrap();
    let h2 = build_h(1, 1, 2, &p).unwrap();
    for (pi, pt) in points.iter().enumerate() {
        for (ci, key) in mat.keys.iter().enumerate() {
            for (ri, lambda) in mat.rows.iter().enumerate() {
                let want = if lambda == &vec![2, 0] {
                    let mut acc = C64::new(0.0, 0.0);
                    for ka in h1.keys() {
                        for kb in h1.keys() {
                            if &ka.add(kb) == key {
                                let shifted = h1.shifted_point(pt, ka);
                                acc += h1.coefficient_at(ka, pt).unwrap() * h1.coefficient_at(kb, &shifted).unwrap();
                            }
                        }
                    }
                    acc
                } else {
                    h2.coefficient_at(key, pt).unwrap_or_default()
                };
                let got = mat.entries[(ri, pi * mat.keys.len() + ci)];
                assert!(relative_residual(got, want) < 1e-12, "λ={lambda:?} key={key:?}");
            }
        }
    }
}

#[test]
fn full_rank_small_degrees_all_variants() {
    let cfg = SamplerConfig::default();
    for kind in VariantKind::ALL {
        let p = ModelParams::generic(kind);
        for (m, r) in [(1, 1), (2, 1), (1, 2)] {
            let rep = check_independence(m, r, 3, 3, &p, &cfg).unwrap();
            assert!(rep.passed(), "{kind:?} ({m},{r}): {:?}", rep.verdict);
            assert!(rep.stable);
        }
    }
}

#[test]
fn duplicated_row_is_rank_deficient() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    let mat = coefficient_matrix(1, 1, 2, &pts(2, 3, 2), &p).unwrap();
    let e = &mat.entries;
    let stacked = e.clone().insert_row(e.nrows(), C64::new(0.0, 0.0));
    let mut dup = stacked.clone();
    dup.set_row(e.nrows(), &(e.row(0) * C64::new(0.5, -1.5)));
    let cert = numeric_rank(&dup, DEFAULT_RANK_THRESHOLD);
    assert_eq!(cert.rank, e.nrows());
    assert_eq!(cert.verdict, Verdict::Fail);
    assert_eq!(numeric_rank(e, DEFAULT_RANK_THRESHOLD).verdict, Verdict::Pass);
}

#[test]
fn kappa_equal_delta_factorization() {
    let cfg = SamplerConfig::default().with_tolerance(1e-9);
    for kind in VariantKind::ALL {
        let p = ModelParams::generic(kind);
        for (m, r) in [(1, 1), (2, 1), (1, 2)] {
            let rep = kappa_eq_delta_suite(m, r, 2, &p, &cfg).unwrap();
            assert!(rep.passed(), "{kind:?} ({m},{r}) {}", rep.max_residual);
        }
    }
}

#[test]
fn conjugation_by_f_then_its_inverse_is_the_identity() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    let p = p.with_steps(p.delta, p.delta);
    let op = free_shift_sum(1, 1, 2, p.delta);
    let f = coefficient(move |v: &[C64]| Ok(lemma_f(&v[..1], &v[1..], &p)));
    let f_inv = coefficient(move |v: &[C64]| Ok(1.0 / lemma_f(&v[..1], &v[1..], &p)));
    let back = op.conjugated(f).conjugated(f_inv);
    assert!(equal_at("involution", &op, &back, &SamplerConfig::default()).unwrap().max_residual < 1e-12);
}

#[test]
fn factorization_fails_with_wrong_conjugator() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    let p = p.with_steps(p.delta, p.delta);
    let wrong = coefficient(move |v: &[C64]| Ok(1.0 / p.bracket(v[0] - v[1] + p.delta)));
    let h = build_h(1, 1, 1, &p).unwrap();
    let rhs = free_shift_sum(1, 1, 1, p.delta).conjugated(wrong);
    assert!(!equal_at("wrong", &h, &rhs, &SamplerConfig::default()).unwrap().passed());
    assert_eq!(free_shift_sum(1, 1, 0, p.delta).keys().collect::<Vec<_>>(), vec![&ShiftKey(vec![0, 0])]);
}
