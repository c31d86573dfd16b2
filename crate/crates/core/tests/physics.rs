use elliptic_ruijsenaars::operators::{build_h, build_hat_h};
use elliptic_ruijsenaars::physics::{
    build_boost, build_s_pm_gauged, check_delta_gauge, check_gauge_identification, check_poincare, gauge_shift,
};
use elliptic_ruijsenaars::shiftalg::{compose, equal_at, relative_residual, PointSampler, SamplerConfig, ShiftKey};
use elliptic_ruijsenaars::specialfn::{ModelParams, VariantKind};
use elliptic_ruijsenaars::C64;

const I: C64 = C64::new(0.0, 1.0);

fn cfg() -> SamplerConfig {
    SamplerConfig::default().with_tolerance(1e-9)
}

#[test]
fn generators_are_first_order() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    for plus in [true, false] {
        let s = build_s_pm_gauged(2, 1, &p, plus).unwrap();
        for key in s.keys() {
            assert_eq!(key.0.iter().map(|v| v.abs()).sum::<i32>(), 1);
        }
        assert_eq!(s.term_count(), 3);
    }
    let b = build_boost(2, 1, &p);
    assert_eq!(b.keys().collect::<Vec<_>>(), vec![&ShiftKey::zero(3)]);
}

#[test]
fn poincare_relations_all_variants() {
    for kind in VariantKind::ALL {
        let p = ModelParams::generic(kind);
        for (m, r) in [(1, 1), (2, 1), (1, 2)] {
            let rep = check_poincare(m, r, &p, &SamplerConfig::default()).unwrap();
            assert!(rep.passed(), "{kind:?} ({m},{r}) {}", rep.max_residual);
        }
    }
}

/// `[H, B]` from the shift rule: each `e^{±δ∂}` term picks up `B(v + shift) − B(v)`.
#[test]
fn boost_commutator_by_shift_rule() {
    let p = ModelParams::generic(VariantKind::Hyperbolic);
    let (m, r) = (2, 1);
    let sp = build_s_pm_gauged(m, r, &p, true).unwrap();
    let sm = build_s_pm_gauged(m, r, &p, false).unwrap();
    let h = sp.add(&sm).unwrap();
    let b = build_boost(m, r, &p);
    let hb = compose(&h, &b).unwrap().sub(&compose(&b, &h).unwrap()).unwrap();
    let boost = |v: &[C64]| I / p.delta * (v[0] + v[1]) - I / p.kappa * v[2];
    let mut sampler = PointSampler::new(&SamplerConfig::default(), 3);
    for _ in 0..10 {
        let v = sampler.point(3);
        for key in h.keys() {
            let shifted = h.shifted_point(&v, key);
            let want = h.coefficient_at(key, &v).unwrap() * (boost(&shifted) - boost(&v));
            assert!(relative_residual(hb.coefficient_at(key, &v).unwrap(), want) < 1e-12);
        }
    }
}

#[test]
fn gauge_identification_and_delta_weight() {
    for kind in VariantKind::ALL {
        let p = ModelParams::generic(kind);
        for (m, r) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            assert!(check_gauge_identification(m, r, &p, &cfg()).unwrap().passed(), "{kind:?} ({m},{r})");
        }
    }
    let p = ModelParams::generic(VariantKind::Elliptic);
    assert!(check_delta_gauge(1, 1, &p, &cfg()).unwrap().passed());
}

/// Shifting `S⁺` by `x → x + δ/2`, `y → y − κ/2` does not give `H^{(1)}`.
#[test]
fn opposite_gauge_shift_fails() {
    let p = ModelParams::generic(VariantKind::Elliptic);
    let flipped: Vec<C64> = gauge_shift(1, 1, &p).iter().map(|s| -s).collect();
    let sp = build_s_pm_gauged(1, 1, &p, true).unwrap().translated(&flipped).unwrap();
    let rep = equal_at("flipped", &sp, &build_h(1, 1, 1, &p).unwrap(), &cfg()).unwrap();
    assert!(rep.max_residual > 1e-3, "{}", rep.max_residual);
}

/// `[H, P] = 0` after gauging is the first-order commutativity of `H^{(1)}` and `Ĥ^{(1)}`.
#[test]
fn hp_matches_first_order_commutativity() {
    let p = ModelParams::generic(VariantKind::Trigonometric);
    let h = build_h(2, 1, 1, &p).unwrap();
    let hh = build_hat_h(2, 1, 1, &p).unwrap();
    let rep = equal_at("h_hat_h", &compose(&h, &hh).unwrap(), &compose(&hh, &h).unwrap(), &cfg()).unwrap();
    assert!(rep.passed());
}
