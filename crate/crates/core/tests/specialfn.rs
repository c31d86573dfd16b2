use std::f64::consts::PI;

use elliptic_ruijsenaars::shiftalg::relative_residual;
use elliptic_ruijsenaars::specialfn::{
    default_delta, default_kappa, default_tau, elliptic_gamma, g_step, min_truncation_terms, shifted_factorial,
    theta, BracketContext, VariantKind,
};
use elliptic_ruijsenaars::{Error, C64};
use proptest::prelude::*;

const I: C64 = C64::new(0.0, 1.0);

fn point() -> impl Strategy<Value = C64> {
    (-0.5f64..0.5, -0.25f64..0.25).prop_map(|(re, im)| C64::new(re, im))
}

fn contexts() -> Vec<BracketContext> {
    VariantKind::ALL.iter().map(|&k| BracketContext::default_for(k)).collect()
}

/// Product definition with an explicit factor count, written independently of the library.
fn theta_oracle(z: C64, p: C64, terms: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut pj = C64::new(1.0, 0.0);
    for _ in 0..terms {
        acc *= (1.0 - pj * z) * (1.0 - pj * p / z);
        pj *= p;
    }
    acc
}

fn gamma_oracle(z: C64, p: C64, q: C64, terms: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    for j in 0..terms {
        for k in 0..terms {
            let pq = p.powu(j as u32) * q.powu(k as u32);
            acc *= (1.0 - pq * p * q / z) / (1.0 - pq * z);
        }
    }
    acc
}

fn cases() -> ProptestConfig {
    ProptestConfig::with_cases(100)
}

proptest! {
    #![proptest_config(cases())]

    #[test]
    fn bracket_is_odd(x in point()) {
        for ctx in contexts() {
            let r = relative_residual(ctx.eval(-x), -ctx.eval(x));
            prop_assert!(r < 1e-12, "{:?}: {r}", ctx.variant());
        }
    }

    #[test]
    fn three_term_identity(x in point(), y in point(), u in point(), v in point()) {
        for ctx in contexts() {
            let b = |a: C64| ctx.eval(a);
            let t1 = b(x + y) * b(x - y) * b(u + v) * b(u - v);
            let t2 = b(x + v) * b(x - v) * b(y + u) * b(y - u);
            let t3 = b(x + u) * b(x - u) * b(y + v) * b(y - v);
            let r = relative_residual(t1 + t2, t3);
            prop_assert!(r < 1e-10, "{:?}: {r}", ctx.variant());
        }
    }

    #[test]
    fn elliptic_quasi_periodicity(x in point()) {
        let tau = default_tau();
        let ctx = BracketContext::elliptic_from_tau(tau).unwrap();
        prop_assert!(relative_residual(ctx.eval(x + 1.0), -ctx.eval(x)) < 1e-10);
        let want = -(-I * PI * (2.0 * x + tau)).exp() * ctx.eval(x);
        prop_assert!(relative_residual(ctx.eval(x + tau), want) < 1e-10);
    }

    #[test]
    fn factorial_splices(x in point(), j in -3i64..=3, k in -3i64..=3) {
        let step = default_delta();
        for ctx in contexts() {
            let whole = shifted_factorial(x, j + k, step, &ctx);
            let left = shifted_factorial(x, j, step, &ctx);
            let right = shifted_factorial(x + step * j as f64, k, step, &ctx);
            if let (Ok(w), Ok(l), Ok(r)) = (whole, left, right) {
                let res = relative_residual(w, l * r);
                prop_assert!(res < 1e-10, "{:?} j={j} k={k}: {res}", ctx.variant());
            }
        }
    }

    #[test]
    fn g_functional_equation_both_half_planes(x in point()) {
        for step in [default_delta(), default_delta().conj(), default_kappa(), -default_kappa()] {
            for ctx in contexts() {
                let lhs = g_step(x + step, step, &ctx).unwrap();
                let rhs = ctx.eval(x) * g_step(x, step, &ctx).unwrap();
                let r = relative_residual(lhs, rhs);
                prop_assert!(r < 1e-10, "{:?} step={step}: {r}", ctx.variant());
            }
        }
    }

    #[test]
    fn elliptic_gamma_difference_equation(x in point()) {
        let p = C64::new(0.3, 0.0);
        let q = (2.0 * PI * I * default_delta()).exp();
        let z = (2.0 * PI * I * x).exp();
        let ratio = elliptic_gamma(q * z, p, q).unwrap() / elliptic_gamma(z, p, q).unwrap();
        prop_assert!(relative_residual(ratio, theta(z, p).unwrap()) < 1e-10);
    }

    #[test]
    fn theta_matches_doubled_truncation(x in point()) {
        let p = BracketContext::elliptic_from_tau(default_tau()).unwrap().nome().unwrap();
        let z = (2.0 * PI * I * x).exp();
        let doubled = theta_oracle(z, p, 2 * min_truncation_terms(p));
        prop_assert!(relative_residual(theta(z, p).unwrap(), doubled) < 1e-12);
    }
}

#[test]
fn theta_reference_values() {
    let z = C64::new(0.3, 0.1);
    assert!(relative_residual(theta(z, C64::new(0.2, 0.0)).unwrap(), theta_oracle(z, C64::new(0.2, 0.0), 80)) < 1e-12);
    assert_eq!(theta(C64::new(1.0, 0.0), C64::new(0.4, 0.2)).unwrap(), C64::new(0.0, 0.0));
    assert!(relative_residual(theta(z, C64::new(0.0, 0.0)).unwrap(), 1.0 - z) < 1e-15);
    assert!(matches!(theta(z, C64::new(1.0, 0.0)), Err(Error::Domain(_))));
}

#[test]
fn elliptic_gamma_reference_values() {
    let (z, p, q) = (C64::new(0.4, 0.0), C64::new(0.1, 0.0), C64::new(0.2, 0.0));
    assert!(relative_residual(elliptic_gamma(z, p, q).unwrap(), gamma_oracle(z, p, q, 60)) < 1e-12);
    let zero = C64::new(0.0, 0.0);
    assert!(relative_residual(elliptic_gamma(z, zero, zero).unwrap(), 1.0 / (1.0 - z)) < 1e-15);
    assert!(elliptic_gamma(z, p, C64::new(1.2, 0.0)).is_err());
}

#[test]
fn trig_bracket_is_the_zero_nome_limit() {
    let trig = BracketContext::trigonometric(C64::new(1.0, 0.0)).unwrap();
    for x in [C64::new(0.13, 0.07), C64::new(-0.41, 0.2), C64::new(0.3, -0.11)] {
        let want = -2.0 * I * (PI * x).sin();
        assert!(relative_residual(trig.eval(x), want) < 1e-15);
        let p0 = (-I * PI * x).exp() * (1.0 - (2.0 * PI * I * x).exp());
        assert!(relative_residual(trig.eval(x), p0) < 1e-14);
    }
}

#[test]
fn unit_modulus_step_is_unsupported() {
    let ctx = BracketContext::elliptic_from_tau(default_tau()).unwrap();
    let real_step = C64::new(0.3, 0.0);
    assert!(matches!(g_step(C64::new(0.1, 0.05), real_step, &ctx), Err(Error::UnsupportedRegime(_))));
}

#[test]
fn factorial_special_orders() {
    let ctx = BracketContext::elliptic_from_tau(default_tau()).unwrap();
    let (x, d) = (C64::new(0.21, 0.03), default_delta());
    assert_eq!(shifted_factorial(x, 0, d, &ctx).unwrap(), C64::new(1.0, 0.0));
    let two = shifted_factorial(x, 2, d, &ctx).unwrap();
    assert!(relative_residual(two, ctx.eval(x) * ctx.eval(x + d)) < 1e-15);
    let minus_one = shifted_factorial(x, -1, d, &ctx).unwrap();
    assert!(relative_residual(minus_one, 1.0 / ctx.eval(x - d)) < 1e-15);
    assert!(matches!(shifted_factorial(d, -1, d, &ctx), Err(Error::Pole { index: 1, .. })));
}
