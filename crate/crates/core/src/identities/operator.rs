//! Wronski relation between the `D` and `H` families and the recursions it implies.

use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::operators::{build_bold, build_d, build_h, slot_steps, Family};
use crate::shiftalg::{compose, equal_at_scaled, FormalOperator, ResidualReport, SamplerConfig};
use crate::specialfn::{theta_truncated, ModelParams, Variant};

/// The Wronski sum split as `[Kδ] H^{(K)}` against `-Σ_{k≥1} [kκ+(K-k)δ] D^{(k)} H^{(K-k)}`.
pub fn wronski_sides(m: usize, r: usize, big_k: u32, params: &ModelParams) -> Result<(FormalOperator, FormalOperator)> {
    let b = |x: C64| params.bracket(x);
    let (d, kk) = (params.delta, params.kappa);
    let lhs = build_h(m, r, big_k, params)?.scaled(b(d * big_k as f64));
    let mut rhs = FormalOperator::zero(m, slot_steps(m, r, params));
    for k in 1..=big_k {
        let l = big_k - k;
        let term = compose(&build_d(m, r, k, params)?, &build_h(m, r, l, params)?)?;
        rhs = rhs.add(&term.scaled(-b(kk * k as f64 + d * l as f64)))?;
    }
    Ok((lhs, rhs))
}

pub fn check_wronski(m: usize, r: usize, big_k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let (lhs, rhs) = wronski_sides(m, r, big_k, params)?;
    Ok(equal_at_scaled("wronski", &lhs, &rhs, cfg)?
        .with_param("m", m)
        .with_param("r", r)
        .with_param("K", big_k))
}

/// `H^{(1..=l)}` rebuilt from `D^{(k)}` by `H^{(K)} = -(1/[Kδ]) Σ_{k=1}^K [kκ+(K-k)δ] D^{(k)} H^{(K-k)}`.
pub fn h_via_recursion(m: usize, r: usize, l: u32, params: &ModelParams) -> Result<Vec<FormalOperator>> {
    let b = |x: C64| params.bracket(x);
    let (d, kk) = (params.delta, params.kappa);
    let ds: Vec<FormalOperator> = (0..=l).map(|k| build_d(m, r, k, params)).collect::<Result<_>>()?;
    let mut hs = vec![FormalOperator::identity(m, slot_steps(m, r, params))];
    for big_k in 1..=l {
        let mut acc = FormalOperator::zero(m, slot_steps(m, r, params));
        for k in 1..=big_k {
            let term = compose(&ds[k as usize], &hs[(big_k - k) as usize])?;
            acc = acc.add(&term.scaled(b(kk * k as f64 + d * (big_k - k) as f64)))?;
        }
        hs.push(acc.scaled(-b(d * big_k as f64).inv()));
    }
    Ok(hs)
}

/// `D^{(1..=l)}` rebuilt from `H^{(k)}` by `D^{(K)} = -(1/[Kκ]) Σ_{k=1}^K [(K-k)κ+kδ] D^{(K-k)} H^{(k)}`.
pub fn d_via_recursion(m: usize, r: usize, l: u32, params: &ModelParams) -> Result<Vec<FormalOperator>> {
    let b = |x: C64| params.bracket(x);
    let (d, kk) = (params.delta, params.kappa);
    let hs: Vec<FormalOperator> = (0..=l).map(|k| build_h(m, r, k, params)).collect::<Result<_>>()?;
    let mut ds = vec![FormalOperator::identity(m, slot_steps(m, r, params))];
    for big_k in 1..=l {
        let mut acc = FormalOperator::zero(m, slot_steps(m, r, params));
        for k in 1..=big_k {
            let term = compose(&ds[(big_k - k) as usize], &hs[k as usize])?;
            acc = acc.add(&term.scaled(b(kk * (big_k - k) as f64 + d * k as f64)))?;
        }
        ds.push(acc.scaled(-b(kk * big_k as f64).inv()));
    }
    Ok(ds)
}

/// Recursion-built `H^{(l)}` against the direct construction, for `1 ≤ l ≤ l_max`.
pub fn check_h_via_recursion(m: usize, r: usize, l_max: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let hs = h_via_recursion(m, r, l_max, params)?;
    let mut parts = Vec::new();
    for l in 1..=l_max {
        parts.push(equal_at_scaled("determinant", &hs[l as usize], &build_h(m, r, l, params)?, cfg)?);
    }
    Ok(ResidualReport::merge("determinant", cfg, &parts)
        .with_param("m", m)
        .with_param("r", r)
        .with_param("l_max", l_max))
}

/// Recursion-built `D^{(l)}` against the direct construction, for `1 ≤ l ≤ l_max`.
pub fn check_d_via_recursion(m: usize, r: usize, l_max: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let ds = d_via_recursion(m, r, l_max, params)?;
    let mut parts = Vec::new();
    for l in 1..=l_max {
        parts.push(equal_at_scaled("determinant_inverse", &ds[l as usize], &build_d(m, r, l, params)?, cfg)?);
    }
    Ok(ResidualReport::merge("determinant_inverse", cfg, &parts)
        .with_param("m", m)
        .with_param("r", r)
        .with_param("l_max", l_max))
}

/// Multiplicative Wronski relation `Σ_{k+l=N} t^k θ(q^k t^l) 𝐇^{(k)} 𝐃^{(l)} = 0`,
/// split as the `k = 0` term against the rest.
pub fn check_wronski_bold(m: usize, r: usize, big_n: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let (p, terms) = match params.context.variant() {
        Variant::Elliptic { p } => (p, params.context.truncation_terms()),
        _ => (C64::new(0.0, 0.0), 0),
    };
    let (q, t) = (params.q(), params.t());
    let weight = |k: u32, l: u32| t.powi(k as i32) * theta_truncated(q.powi(k as i32) * t.powi(l as i32), p, terms);
    let lhs = build_bold(Family::D, m, r, big_n, params)?.scaled(weight(0, big_n));
    let mut rhs = FormalOperator::zero(m, slot_steps(m, r, params));
    for k in 1..=big_n {
        let l = big_n - k;
        let term = compose(&build_bold(Family::H, m, r, k, params)?, &build_bold(Family::D, m, r, l, params)?)?;
        rhs = rhs.add(&term.scaled(-weight(k, l)))?;
    }
    Ok(equal_at_scaled("wronski_bold", &lhs, &rhs, cfg)?
        .with_param("m", m)
        .with_param("r", r)
        .with_param("N", big_n))
}
