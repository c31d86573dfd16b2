//! Constructors for the operator families `H`, `D`, `Ĥ`, `D̂`, the classical
//! Ruijsenaars and Noumi–Sano operators, and the multiplicative (bold) forms.
//!
//! All operators act on the flat variable vector `(x_1..x_m, y_1..y_r)` with
//! unit shifts `δ` on x-slots and `-κ` on y-slots.

mod bold;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shiftalg::{coefficient, compose, FormalOperator, ShiftKey};
use crate::specialfn::{BracketContext, ModelParams};

pub use bold::{bold_prefactor, bold_supported, build_bold, coeff_c_multiplicative};

const I: C64 = C64::new(0.0, 1.0);

/// The four commuting families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    H,
    D,
    HatH,
    HatD,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::H, Family::HatH, Family::D, Family::HatD];

    pub fn name(&self) -> &'static str {
        match self {
            Family::H => "H",
            Family::D => "D",
            Family::HatH => "hatH",
            Family::HatD => "hatD",
        }
    }
}

/// Flat slot steps `[δ; m] ++ [-κ; r]`.
pub fn slot_steps(m: usize, r: usize, params: &ModelParams) -> Vec<C64> {
    let mut steps = vec![params.delta; m];
    steps.extend(std::iter::repeat_n(-params.kappa, r));
    steps
}

/// How a family is obtained from `H_{m',r'}(a; b; δ', κ')`: which slots play
/// the role of `a` and `b`, the constant offsets added to them, the effective
/// `(δ', κ')`, and the direction of the induced shifts in slot units.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub first_offset: C64,
    pub second_offset: C64,
    pub d: C64,
    pub kk: C64,
    pub key_sign: i32,
}

impl Layout {
    pub fn of(family: Family, m: usize, r: usize, params: &ModelParams) -> Self {
        let xs: Vec<usize> = (0..m).collect();
        let ys: Vec<usize> = (m..m + r).collect();
        let (delta, kappa) = (params.delta, params.kappa);
        let zero = C64::new(0.0, 0.0);
        match family {
            Family::H => Layout {
                first: xs,
                second: ys,
                first_offset: zero,
                second_offset: zero,
                d: delta,
                kk: kappa,
                key_sign: 1,
            },
            Family::D => Layout {
                first: ys,
                second: xs,
                first_offset: zero,
                second_offset: zero,
                d: -kappa,
                kk: -delta,
                key_sign: 1,
            },
            Family::HatH => Layout {
                first: xs,
                second: ys,
                first_offset: -delta,
                second_offset: kappa,
                d: -delta,
                kk: -kappa,
                key_sign: -1,
            },
            Family::HatD => Layout {
                first: ys,
                second: xs,
                first_offset: kappa,
                second_offset: -delta,
                d: kappa,
                kk: delta,
                key_sign: -1,
            },
        }
    }

    pub fn split(&self, v: &[C64]) -> (Vec<C64>, Vec<C64>) {
        (
            self.first.iter().map(|&i| v[i] + self.first_offset).collect(),
            self.second.iter().map(|&i| v[i] + self.second_offset).collect(),
        )
    }

    pub fn key(&self, n: usize, mu: &[u32], subset: &[bool]) -> ShiftKey {
        let mut key = vec![0i32; n];
        for (slot, &v) in self.first.iter().zip(mu) {
            key[*slot] = self.key_sign * v as i32;
        }
        for (slot, &b) in self.second.iter().zip(subset) {
            key[*slot] = self.key_sign * b as i32;
        }
        ShiftKey(key)
    }
}

/// All compositions of `total` into `len` non-negative parts, in lexicographic order.
pub fn compositions(len: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        if len == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=total {
            prefix.push(v);
            rec(len - 1, total - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, total, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Index pairs `(μ, I)` with `|μ| + |I| = k`, ordered by `μ` then by the bitmask of `I`.
pub fn index_pairs(m: usize, r: usize, k: u32) -> Vec<(Vec<u32>, Vec<bool>)> {
    assert!(r < 64, "subset bitmask");
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << r) {
        let size = mask.count_ones();
        if size > k {
            continue;
        }
        for mu in compositions(m, k - size) {
            out.push((mu, mask));
        }
    }
    out.sort();
    out.into_iter()
        .map(|(mu, mask)| (mu, (0..r).map(|j| mask >> j & 1 == 1).collect()))
        .collect()
}

/// `Σ_j C(r, j) C(k - j + m - 1, m - 1)`.
pub fn term_count(m: usize, r: usize, k: u32) -> u64 {
    fn binom(n: i64, k: i64) -> u64 {
        if k < 0 || n < 0 || k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc: u64 = 1;
        for i in 0..k {
            acc = acc * (n - i) as u64 / (i + 1) as u64;
        }
        acc
    }
    let k = k as i64;
    (0..=k.min(r as i64))
        .map(|j| {
            let parts = if m == 0 {
                u64::from(k == j)
            } else {
                binom(k - j + m as i64 - 1, m as i64 - 1)
            };
            binom(r as i64, j) * parts
        })
        .sum()
}

/// Running quotient with a pole check on every denominator factor.
pub(crate) struct Ratio {
    num: C64,
    den: C64,
    floor: f64,
}

impl Ratio {
    pub fn new(floor: f64) -> Self {
        Self {
            num: C64::new(1.0, 0.0),
            den: C64::new(1.0, 0.0),
            floor,
        }
    }

    #[inline]
    pub fn mul(&mut self, v: C64) {
        self.num *= v;
    }

    #[inline]
    pub fn div(&mut self, v: C64, factor: &'static str, index: usize) -> Result<()> {
        let a = v.norm();
        if a < self.floor || !a.is_finite() {
            return Err(Error::Pole {
                factor,
                index,
                magnitude: a,
            });
        }
        self.den *= v;
        Ok(())
    }

    pub fn value(&self) -> C64 {
        self.num / self.den
    }
}

/// The coefficient `C_{μ,I}(a; b; d, kk)` of `H_{m',r'}^{(k)}`, with shifted
/// factorials taken in steps of `d`.
#[allow(clippy::too_many_arguments)]
pub fn coeff_c(
    mu: &[u32],
    subset: &[bool],
    a: &[C64],
    b: &[C64],
    d: C64,
    kk: C64,
    ctx: &BracketContext,
    pole_floor: f64,
) -> Result<C64> {
    let m = a.len();
    let r = b.len();
    if mu.len() != m || subset.len() != r {
        return Err(Error::ArityMismatch(format!(
            "index pair of shape ({}, {}) for arity ({m}, {r})",
            mu.len(),
            subset.len()
        )));
    }
    let br = |x: C64| ctx.eval(x);
    let mut acc = Ratio::new(pole_floor);
    for i in 0..m {
        for j in i + 1..m {
            let dx = a[i] - a[j];
            acc.mul(br(dx + d * (mu[i] as f64 - mu[j] as f64)));
            acc.div(br(dx), "x-difference", i * m + j)?;
        }
    }
    for i in (0..r).filter(|&i| subset[i]) {
        for j in (0..r).filter(|&j| !subset[j]) {
            let dy = b[i] - b[j];
            acc.mul(br(dy - d));
            acc.div(br(dy), "y-difference", i * r + j)?;
        }
    }
    for i in 0..m {
        for j in 0..m {
            let dx = a[i] - a[j];
            for l in 0..mu[i] {
                let s = d * l as f64;
                acc.mul(br(dx + kk + s));
                acc.div(br(dx + d + s), "x-factorial", i * m + j)?;
            }
        }
    }
    for i in 0..m {
        let mi = mu[i] as f64;
        for j in 0..r {
            let dxy = a[i] - b[j];
            if subset[j] {
                acc.mul(br(dxy - kk));
                acc.div(br(dxy + d * mi), "xy-cross", i * r + j)?;
            } else {
                acc.mul(br(dxy - d));
                acc.div(br(dxy + d * (mi - 1.0)), "xy-cross", i * r + j)?;
            }
        }
    }
    let sign = if subset.iter().filter(|&&s| s).count() % 2 == 1 {
        -1.0
    } else {
        1.0
    };
    Ok(acc.value() * sign)
}

/// `H_{m,r}^{(k)}`, `D_{m,r}^{(k)}`, `Ĥ_{m,r}^{(k)}` or `D̂_{m,r}^{(k)}`.
pub fn build(family: Family, m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    params.require_generic(k as usize)?;
    let layout = Layout::of(family, m, r, params);
    let (m1, r1) = (layout.first.len(), layout.second.len());
    let n = m + r;
    let mut op = FormalOperator::zero(m, slot_steps(m, r, params));
    let ctx = params.context;
    let floor = params.pole_floor;
    for (mu, subset) in index_pairs(m1, r1, k) {
        let key = layout.key(n, &mu, &subset);
        let layout = layout.clone();
        op.push_term(
            key,
            coefficient(move |v| {
                let (a, b) = layout.split(v);
                coeff_c(&mu, &subset, &a, &b, layout.d, layout.kk, &ctx, floor)
            }),
        );
    }
    if op.is_zero() {
        op = op.mark_degree_exceeded();
    }
    Ok(op)
}

pub fn build_h(m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    build(Family::H, m, r, k, params)
}

pub fn build_d(m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    build(Family::D, m, r, k, params)
}

pub fn build_hat_h(m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    build(Family::HatH, m, r, k, params)
}

pub fn build_hat_d(m: usize, r: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    build(Family::HatD, m, r, k, params)
}

/// Ruijsenaars operator `D_n^{(k)} = Σ_{|I|=k} ∏_{i∈I, j∉I} [x_i-x_j+κ]/[x_i-x_j] T^{δI}`.
/// For `k > n` the zero operator is returned, flagged as degree-exceeded.
pub fn build_ruijsenaars(n: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    params.require_generic(k as usize)?;
    let steps = vec![params.delta; n];
    let mut op = FormalOperator::zero(n, steps);
    if k as usize > n {
        return Ok(op.mark_degree_exceeded());
    }
    let ctx = params.context;
    let floor = params.pole_floor;
    let kappa = params.kappa;
    for mask in 0u64..(1u64 << n) {
        if mask.count_ones() != k {
            continue;
        }
        let inside: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
        let key = ShiftKey(inside.iter().map(|&b| b as i32).collect());
        op.push_term(
            key,
            coefficient(move |v| {
                let mut acc = Ratio::new(floor);
                for i in (0..n).filter(|&i| inside[i]) {
                    for j in (0..n).filter(|&j| !inside[j]) {
                        let dx = v[i] - v[j];
                        acc.mul(ctx.eval(dx + kappa));
                        acc.div(ctx.eval(dx), "ruijsenaars", i * n + j)?;
                    }
                }
                Ok(acc.value())
            }),
        );
    }
    Ok(op)
}

/// Noumi–Sano operator `H_n^{(k)}`.
pub fn build_noumi_sano(n: usize, k: u32, params: &ModelParams) -> Result<FormalOperator> {
    params.require_generic(k as usize)?;
    let steps = vec![params.delta; n];
    let mut op = FormalOperator::zero(n, steps);
    let ctx = params.context;
    let floor = params.pole_floor;
    let (delta, kappa) = (params.delta, params.kappa);
    for mu in compositions(n, k) {
        let key = ShiftKey(mu.iter().map(|&v| v as i32).collect());
        op.push_term(
            key,
            coefficient(move |v| {
                let mut acc = Ratio::new(floor);
                for i in 0..n {
                    for j in i + 1..n {
                        let dx = v[i] - v[j];
                        acc.mul(ctx.eval(dx + delta * (mu[i] as f64 - mu[j] as f64)));
                        acc.div(ctx.eval(dx), "noumi-sano", i * n + j)?;
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let dx = v[i] - v[j];
                        let mut num = C64::new(1.0, 0.0);
                        let mut den = C64::new(1.0, 0.0);
                        for l in 0..mu[i] {
                            num *= ctx.eval(dx + kappa + delta * l as f64);
                            den *= ctx.eval(dx + delta * (l + 1) as f64);
                        }
                        acc.mul(num);
                        acc.div(den, "noumi-sano factorial", i * n + j)?;
                    }
                }
                Ok(acc.value())
            }),
        );
    }
    if op.is_zero() {
        op = op.mark_degree_exceeded();
    }
    Ok(op)
}

/// `(X^{(1)})^{λ_1} ∘ (X^{(2)})^{λ_2} ∘ ⋯` for the chosen family.
pub fn build_monomial(
    lambda: &[u32],
    family: Family,
    m: usize,
    r: usize,
    params: &ModelParams,
) -> Result<FormalOperator> {
    let mut acc = FormalOperator::identity(m, slot_steps(m, r, params));
    for (j, &power) in lambda.iter().enumerate() {
        if power == 0 {
            continue;
        }
        let factor = build(family, m, r, j as u32 + 1, params)?;
        for _ in 0..power {
            acc = compose(&acc, &factor)?;
        }
    }
    Ok(acc)
}

/// `e^{2πi a}` for each entry.
pub(crate) fn to_multiplicative(a: &[C64]) -> Vec<C64> {
    a.iter().map(|x| (2.0 * PI * I * x).exp()).collect()
}
