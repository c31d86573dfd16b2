//! Multiplicative forms of the four families, coded from the theta-function
//! display in the variables `z = e^{2πix}`, `w = e^{2πiy}`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::{index_pairs, slot_steps, to_multiplicative, Family, Layout, Ratio, I};
use crate::error::{Error, Result};
use crate::shiftalg::{coefficient, FormalOperator};
use crate::specialfn::{theta_truncated, ModelParams, Variant};

/// The multiplicative coefficient `C_{μ,I}(z; w)` with bases `(q, t)` and nome `p`.
#[allow(clippy::too_many_arguments)]
pub fn coeff_c_multiplicative(
    mu: &[u32],
    subset: &[bool],
    z: &[C64],
    w: &[C64],
    q: C64,
    t: C64,
    p: C64,
    terms: usize,
    pole_floor: f64,
) -> Result<C64> {
    let m = z.len();
    let r = w.len();
    let th = |x: C64| theta_truncated(x, p, terms);
    let poch = |a: C64, k: u32| {
        let mut acc = C64::new(1.0, 0.0);
        let mut x = a;
        for _ in 0..k {
            acc *= th(x);
            x *= q;
        }
        acc
    };
    let size_i = subset.iter().filter(|&&s| s).count() as i32;
    let size_mu: i32 = mu.iter().map(|&v| v as i32).sum();
    let mut acc = Ratio::new(pole_floor);
    let sign = if size_i % 2 == 1 { -1.0 } else { 1.0 };
    acc.mul((t.powi(-(m as i32)) * q.powi(r as i32)).powi(size_mu) * sign);
    acc.mul(q.powi(size_i * (size_i - 1) / 2));
    for i in (0..r).filter(|&i| subset[i]) {
        for j in (0..r).filter(|&j| !subset[j]) {
            let u = w[j] / w[i];
            acc.mul(th(q * u));
            acc.div(th(u), "w-ratio", i * r + j)?;
        }
    }
    for i in 0..m {
        for j in 0..m {
            let u = z[i] / z[j];
            acc.mul(poch(t * u, mu[i]));
            acc.div(poch(q * u, mu[i]), "z-pochhammer", i * m + j)?;
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let u = z[i] / z[j];
            acc.mul(q.powi(mu[j] as i32) * th(q.powi(mu[i] as i32 - mu[j] as i32) * u));
            acc.div(th(u), "z-ratio", i * m + j)?;
        }
    }
    for i in 0..m {
        for j in 0..r {
            let u = z[i] / w[j];
            if subset[j] {
                acc.mul(th(u / t));
                acc.div(th(q.powi(mu[i] as i32) * u), "zw-cross", i * r + j)?;
            } else {
                acc.mul(th(u / q));
                acc.div(th(q.powi(mu[i] as i32 - 1) * u), "zw-cross", i * r + j)?;
            }
        }
    }
    Ok(acc.value())
}

/// `e^{iπk((r'-1)δ' - m'κ')}` relating a bold family to its additive form,
/// where `(m', r', δ', κ')` are the arguments of `H` defining the family.
pub fn bold_prefactor(family: Family, m: usize, r: usize, k: u32, params: &ModelParams) -> C64 {
    let layout = Layout::of(family, m, r, params);
    let (m1, r1) = (layout.first.len() as f64, layout.second.len() as f64);
    (I * PI * k as f64 * ((r1 - 1.0) * layout.d - m1 * layout.kk)).exp()
}

/// Bold operator of the given family, written in the additive slot variables
/// (the coefficient is evaluated at `z = e^{2πix}`, `w = e^{2πiy}`).
/// Whether [`build_bold`] is available for this bracket.
pub fn bold_supported(params: &ModelParams) -> bool {
    match params.context.variant() {
        Variant::Elliptic { .. } => true,
        Variant::Trigonometric { omega } => (omega - 1.0).norm() < 1e-15,
        _ => false,
    }
}

pub fn build_bold(family: Family, m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    let p = match params.context.variant() {
        Variant::Elliptic { p } => p,
        Variant::Trigonometric { omega } if (omega - 1.0).norm() < 1e-15 => C64::new(0.0, 0.0),
        _ => {
            return Err(Error::UnsupportedRegime(
                "multiplicative operators need the theta normalization of the bracket",
            ))
        }
    };
    params.require_generic(k as usize)?;
    let terms = params.context.truncation_terms();
    let floor = params.pole_floor;
    let layout = Layout::of(family, m, r, params);
    let q = (2.0 * PI * I * layout.d).exp();
    let t = (2.0 * PI * I * layout.kk).exp();
    let n = m + r;
    let mut op = FormalOperator::zero(m, slot_steps(m, r, params));
    for (mu, subset) in index_pairs(layout.first.len(), layout.second.len(), k) {
        let key = layout.key(n, &mu, &subset);
        let layout = layout.clone();
        op.push_term(
            key,
            coefficient(move |v| {
                let (a, b) = layout.split(v);
                let z = to_multiplicative(&a);
                let w = to_multiplicative(&b);
                coeff_c_multiplicative(&mu, &subset, &z, &w, q, t, p, terms, floor)
            }),
        );
    }
    if op.is_zero() {
        op = op.mark_degree_exceeded();
    }
    Ok(op)
}
