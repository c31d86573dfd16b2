//! The deformed Ruijsenaars operators `S^±` in gauge-transformed form, the
//! weight `Δ`, the boost `B`, and their relation to `H^{(1)}` and `Ĥ^{(1)}`.
//!
//! Slots follow the operator convention: x-slots step by `δ`, y-slots by `−κ`.
//! So `e^{±δ∂_{x_i}}` has key `±e_i` and `e^{∓κ∂_{y_i}}` has key `±e_{m+i}`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operators::{build_hat_h, build_h, slot_steps};
use crate::shiftalg::{
    coefficient, compose, equal_at, equal_at_scaled, relative_residual, sample_residuals, Coefficient, FormalOperator, ResidualReport,
    SamplerConfig, ShiftKey,
};
use crate::specialfn::ModelParams;

fn unit_key(n: usize, slot: usize, sign: i32) -> ShiftKey {
    let mut k = vec![0; n];
    k[slot] = sign;
    ShiftKey(k)
}

fn pm(plus: bool) -> f64 {
    if plus {
        1.0
    } else {
        -1.0
    }
}

/// Coefficient of `e^{±δ∂_{x_i}}` in `Δ^{-1/2} S^± Δ^{1/2}`.
pub fn gauged_x_coefficient(i: usize, plus: bool, x: &[C64], y: &[C64], params: &ModelParams) -> C64 {
    let b = |z: C64| params.bracket(z);
    let (d, k, s) = (params.delta, params.kappa, pm(plus));
    let mut v = b(k) / b(d);
    for (j, xj) in x.iter().enumerate() {
        if j != i {
            v *= b(x[i] - xj + s * k) / b(x[i] - xj);
        }
    }
    for yj in y {
        let e = x[i] - yj;
        v *= b(e + s * (k / 2.0 - d / 2.0)) / b(e + s * (k / 2.0 + d / 2.0));
    }
    v
}

/// Coefficient of `e^{∓κ∂_{y_i}}` in `Δ^{-1/2} S^± Δ^{1/2}`, sign included.
pub fn gauged_y_coefficient(i: usize, plus: bool, x: &[C64], y: &[C64], params: &ModelParams) -> C64 {
    let b = |z: C64| params.bracket(z);
    let (d, k, s) = (params.delta, params.kappa, pm(plus));
    let mut v = C64::new(-1.0, 0.0);
    for (j, yj) in y.iter().enumerate() {
        if j != i {
            v *= b(y[i] - yj - s * d) / b(y[i] - yj);
        }
    }
    for xj in x {
        let e = y[i] - xj;
        v *= b(e - s * (d / 2.0 - k / 2.0)) / b(e - s * (d / 2.0 + k / 2.0));
    }
    v
}

/// `Δ^{-1/2} S^± Δ^{1/2}` as a first-order operator.
pub fn build_s_pm_gauged(m: usize, r: usize, params: &ModelParams, plus: bool) -> Result<FormalOperator> {
    params.require_generic(1)?;
    let n = m + r;
    let sign = if plus { 1 } else { -1 };
    let mut op = FormalOperator::zero(m, slot_steps(m, r, params));
    for i in 0..m {
        let p = *params;
        op.push_term(
            unit_key(n, i, sign),
            coefficient(move |v| Ok(gauged_x_coefficient(i, plus, &v[..m], &v[m..], &p))),
        );
    }
    for i in 0..r {
        let p = *params;
        op.push_term(
            unit_key(n, m + i, sign),
            coefficient(move |v| Ok(gauged_y_coefficient(i, plus, &v[..m], &v[m..], &p))),
        );
    }
    Ok(op)
}

/// The weight `Δ(x;y)`, evaluable wherever the `G` functions are.
pub fn build_delta_weight(m: usize, r: usize, params: &ModelParams) -> Result<Coefficient> {
    params.require_off_unit_circle()?;
    let p = *params;
    Ok(coefficient(move |v: &[C64]| {
        if v.len() != m + r {
            return Err(Error::ArityMismatch(format!("Δ on {} variables evaluated at {}", m + r, v.len())));
        }
        delta_weight(&v[..m], &v[m..], &p)
    }))
}

fn delta_weight(x: &[C64], y: &[C64], p: &ModelParams) -> Result<C64> {
    let (d, k) = (p.delta, p.kappa);
    let mut w = C64::new(1.0, 0.0);
    for (i, xi) in x.iter().enumerate() {
        for (j, xj) in x.iter().enumerate() {
            if i != j {
                w *= p.g_delta(xi - xj + k)? / p.g_delta(xi - xj)?;
            }
        }
    }
    for (i, yi) in y.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if i != j {
                w *= p.g_minus_kappa(yi - yj - d)? / p.g_minus_kappa(yi - yj)?;
            }
        }
    }
    for xi in x {
        for yj in y {
            w /= p.bracket(xi - yj + k / 2.0 - d / 2.0) * p.bracket(yj - xi + k / 2.0 - d / 2.0);
        }
    }
    Ok(w)
}

/// `(A_i^±)²` and `(B_i^±)²`: the ungauged factors without their square roots.
fn a_squared(i: usize, plus: bool, x: &[C64], y: &[C64], p: &ModelParams) -> C64 {
    let b = |z: C64| p.bracket(z);
    let (d, k, s) = (p.delta, p.kappa, pm(plus));
    let mut v = C64::new(1.0, 0.0);
    for (j, xj) in x.iter().enumerate() {
        if j != i {
            v *= b(x[i] - xj - s * k) / b(x[i] - xj);
        }
    }
    for yj in y {
        let e = x[i] - yj;
        v *= b(e - s * k / 2.0 + s * d / 2.0) / b(e - s * k / 2.0 - s * d / 2.0);
    }
    v
}

fn b_squared(i: usize, plus: bool, x: &[C64], y: &[C64], p: &ModelParams) -> C64 {
    let b = |z: C64| p.bracket(z);
    let (d, k, s) = (p.delta, p.kappa, pm(plus));
    let mut v = C64::new(1.0, 0.0);
    for (j, yj) in y.iter().enumerate() {
        if j != i {
            v *= b(y[i] - yj + s * d) / b(y[i] - yj);
        }
    }
    for xj in x {
        let e = y[i] - xj;
        v *= b(e + s * d / 2.0 - s * k / 2.0) / b(e + s * d / 2.0 + s * k / 2.0);
    }
    v
}

/// Root-free check of `Δ^{-1/2} S^± Δ^{1/2}` against the ungauged `S^±`:
/// every gauged coefficient squared equals
/// `(prefactor)² · (A^∓)²(v) · (A^±)²(v + shift) · Δ(v + shift) / Δ(v)`, likewise with `B`.
pub fn check_delta_gauge(m: usize, r: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    params.require_generic(1)?;
    params.require_off_unit_circle()?;
    let p = *params;
    let report = sample_residuals("delta_gauge", cfg, m + r, |v| {
        let (x, y) = v.split_at(m);
        let base = delta_weight(x, y, &p)?;
        let pre = p.bracket(p.kappa) / p.bracket(p.delta);
        let mut worst: f64 = 0.0;
        for plus in [true, false] {
            let s = pm(plus);
            for i in 0..m {
                let mut w = v.to_vec();
                w[i] += s * p.delta;
                let (wx, wy) = w.split_at(m);
                let lhs = gauged_x_coefficient(i, plus, x, y, &p).powi(2);
                let rhs = pre * pre
                    * a_squared(i, !plus, x, y, &p)
                    * a_squared(i, plus, wx, wy, &p)
                    * delta_weight(wx, wy, &p)?
                    / base;
                worst = worst.max(relative_residual(lhs, rhs));
            }
            for i in 0..r {
                let mut w = v.to_vec();
                w[m + i] -= s * p.kappa;
                let (wx, wy) = w.split_at(m);
                let lhs = gauged_y_coefficient(i, plus, x, y, &p).powi(2);
                let rhs = b_squared(i, !plus, x, y, &p) * b_squared(i, plus, wx, wy, &p) * delta_weight(wx, wy, &p)? / base;
                worst = worst.max(relative_residual(lhs, rhs));
            }
        }
        Ok(worst)
    })?;
    Ok(report.with_param("m", m).with_param("r", r))
}

/// Boost `B = (i/δ) Σ x_i − (i/κ) Σ y_i` as a multiplication operator.
pub fn build_boost(m: usize, r: usize, params: &ModelParams) -> FormalOperator {
    let (d, k) = (params.delta, params.kappa);
    let i = C64::new(0.0, 1.0);
    FormalOperator::multiplication(
        m,
        slot_steps(m, r, params),
        coefficient(move |v: &[C64]| {
            let sx: C64 = v[..m].iter().sum();
            let sy: C64 = v[m..].iter().sum();
            Ok(i / d * sx - i / k * sy)
        }),
    )
}

/// The three Poincaré relations, each in split form:
/// `H∘P` vs `P∘H`, `H∘B` vs `B∘H + iP`, `P∘B` vs `B∘P + iH`.
pub fn poincare_parts(m: usize, r: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<Vec<ResidualReport>> {
    let sp = build_s_pm_gauged(m, r, params, true)?;
    let sm = build_s_pm_gauged(m, r, params, false)?;
    let h = sp.add(&sm)?;
    let p = sp.sub(&sm)?;
    let b = build_boost(m, r, params);
    let i = C64::new(0.0, 1.0);
    let tag = |rep: ResidualReport| rep.with_param("m", m).with_param("r", r);
    Ok(vec![
        tag(equal_at_scaled("poincare_hp", &compose(&h, &p)?, &compose(&p, &h)?, cfg)?),
        tag(equal_at("poincare_hb", &compose(&h, &b)?, &compose(&b, &h)?.add(&p.scaled(i))?, cfg)?),
        tag(equal_at("poincare_pb", &compose(&p, &b)?, &compose(&b, &p)?.add(&h.scaled(i))?, cfg)?),
    ])
}

pub fn check_poincare(m: usize, r: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let parts = poincare_parts(m, r, params, cfg)?;
    Ok(ResidualReport::merge("poincare", cfg, &parts).with_param("m", m).with_param("r", r))
}

/// The variable shift turning the gauged `S^±` into `H^{(1)}`, `Ĥ^{(1)}`:
/// `x → x − δ/2`, `y → y + κ/2` for both signs.
pub fn gauge_shift(m: usize, r: usize, params: &ModelParams) -> Vec<C64> {
    let mut s = vec![-params.delta / 2.0; m];
    s.extend(std::iter::repeat_n(params.kappa / 2.0, r));
    s
}

/// Shifted gauged `S^+` against `H^{(1)}` and shifted gauged `S^-` against `Ĥ^{(1)}`.
pub fn check_gauge_identification(
    m: usize,
    r: usize,
    params: &ModelParams,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    let shift = gauge_shift(m, r, params);
    let sp = build_s_pm_gauged(m, r, params, true)?.translated(&shift)?;
    let sm = build_s_pm_gauged(m, r, params, false)?.translated(&shift)?;
    let parts = [
        equal_at("gauge_h", &sp, &build_h(m, r, 1, params)?, cfg)?,
        equal_at("gauge_hat_h", &sm, &build_hat_h(m, r, 1, params)?, cfg)?,
    ];
    Ok(ResidualReport::merge("gauge", cfg, &parts).with_param("m", m).with_param("r", r))
}

/// `Δ` at a single point whose first `m` entries are the x-variables.
pub fn delta_weight_at(m: usize, params: &ModelParams, point: &[C64]) -> Result<C64> {
    build_delta_weight(m, point.len() - m, params)?(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::VariantKind;

    #[test]
    fn one_particle_is_a_single_shift() {
        let p = ModelParams::generic(VariantKind::Elliptic);
        let op = build_s_pm_gauged(1, 0, &p, true).unwrap();
        assert_eq!(op.term_count(), 1);
        let c = op.coefficient_at(&ShiftKey(vec![1]), &[C64::new(0.2, 0.1)]).unwrap();
        let want = p.bracket(p.kappa) / p.bracket(p.delta);
        assert!((c - want).norm() < 1e-14 * want.norm());
    }

    #[test]
    fn empty_weight_is_one() {
        let p = ModelParams::generic(VariantKind::Trigonometric);
        assert_eq!(delta_weight_at(0, &p, &[]).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn boost_commutes_with_itself() {
        let p = ModelParams::generic(VariantKind::Rational);
        let b = build_boost(1, 1, &p);
        let rep = equal_at("bb", &compose(&b, &b).unwrap(), &compose(&b, &b).unwrap(), &SamplerConfig::default()).unwrap();
        assert_eq!(rep.max_residual, 0.0);
    }
}
