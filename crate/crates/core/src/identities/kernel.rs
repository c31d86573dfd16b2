//! Kernel functions and the kernel function identities.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{build_bold, build_h, Family};
use crate::shiftalg::{relative_residual, sample_residuals, FormalOperator, ResidualReport, SamplerConfig};
use crate::specialfn::{elliptic_gamma_any_base, theta_truncated, ModelParams, Variant};

const I: C64 = C64::new(0.0, 1.0);

/// Sizes `(m, r)` of the `(x; y)` variables and `(n, s)` of the `(X; Y)` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelShape {
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub s: usize,
}

impl KernelShape {
    pub fn new(m: usize, r: usize, n: usize, s: usize) -> Self {
        Self { m, r, n, s }
    }

    pub fn dim(&self) -> usize {
        self.m + self.r + self.n + self.s
    }

    /// Splits a flat vector into `(x, y, X, Y)`.
    pub fn split<'a>(&self, v: &'a [C64]) -> (&'a [C64], &'a [C64], &'a [C64], &'a [C64]) {
        let (x, rest) = v.split_at(self.m);
        let (y, rest) = rest.split_at(self.r);
        let (bx, by) = rest.split_at(self.n);
        (x, y, bx, &by[..self.s])
    }
}

/// `κ` forced by `(m - n)κ = (r - s)δ`; `None` when `m = n` and `r = s` (any `κ`).
pub fn balanced_kappa(shape: KernelShape, delta: C64) -> Result<Option<C64>> {
    let dm = shape.m as f64 - shape.n as f64;
    let dr = shape.r as f64 - shape.s as f64;
    if dm != 0.0 {
        Ok(Some(delta * (dr / dm)))
    } else if dr == 0.0 {
        Ok(None)
    } else {
        Err(Error::Balancing((delta * dr).norm()))
    }
}

/// Errors unless `(m - n)κ = (r - s)δ` to `1e-12`.
pub fn require_balanced(shape: KernelShape, params: &ModelParams) -> Result<()> {
    let gap = params.kappa * (shape.m as f64 - shape.n as f64) - params.delta * (shape.r as f64 - shape.s as f64);
    let scale = 1.0 + params.delta.norm() + params.kappa.norm();
    if gap.norm() > 1e-12 * scale {
        return Err(Error::Balancing(gap.norm()));
    }
    Ok(())
}

/// The additive kernel function `Φ(x; y; X; Y)`.
pub fn kernel_phi(x: &[C64], y: &[C64], bx: &[C64], by: &[C64], params: &ModelParams) -> Result<C64> {
    let (d, kk) = (params.delta, params.kappa);
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    for xi in x {
        for xj in bx {
            num *= params.g_delta(xi + xj - kk)?;
            den *= params.g_delta(xi + xj)?;
        }
        for yj in by {
            num *= params.bracket(xi + yj);
        }
    }
    for yi in y {
        for yj in by {
            num *= params.g_minus_kappa(yi + yj + d)?;
            den *= params.g_minus_kappa(yi + yj)?;
        }
        for xj in bx {
            num *= params.bracket(yi + xj);
        }
    }
    if den.norm() < params.pole_floor || !den.is_finite() {
        return Err(Error::Pole {
            factor: "kernel gamma quotient",
            index: 0,
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

fn nome(params: &ModelParams) -> Result<(C64, usize)> {
    match params.context.variant() {
        Variant::Elliptic { p } => Ok((p, params.context.truncation_terms())),
        Variant::Trigonometric { omega } if (omega - 1.0).norm() < 1e-15 => Ok((C64::new(0.0, 0.0), 0)),
        _ => Err(Error::UnsupportedRegime(
            "multiplicative kernel needs the theta normalization of the bracket",
        )),
    }
}

/// The multiplicative kernel function in `z = e^{2πix}` etc., with the
/// reciprocal replacement for gamma bases of modulus above one.
pub fn kernel_phi_bold(z: &[C64], w: &[C64], bz: &[C64], bw: &[C64], params: &ModelParams) -> Result<C64> {
    params.require_off_unit_circle()?;
    let (p, terms) = nome(params)?;
    let (q, t) = (params.q(), params.t());
    let tinv = t.inv();
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    for zi in z {
        for zj in bz {
            num *= elliptic_gamma_any_base(tinv * zi * zj, p, q)?;
            den *= elliptic_gamma_any_base(zi * zj, p, q)?;
        }
        for wj in bw {
            num *= theta_truncated(zi * wj, p, terms);
        }
    }
    for wi in w {
        for wj in bw {
            num *= elliptic_gamma_any_base(q * wi * wj, p, tinv)?;
            den *= elliptic_gamma_any_base(wi * wj, p, tinv)?;
        }
        for zj in bz {
            num *= theta_truncated(wi * zj, p, terms);
        }
    }
    if den.norm() < params.pole_floor || !den.is_finite() {
        return Err(Error::Pole {
            factor: "bold kernel gamma quotient",
            index: 0,
            magnitude: den.norm(),
        });
    }
    Ok(num / den)
}

fn exp_vec(v: &[C64]) -> Vec<C64> {
    v.iter().map(|x| (2.0 * PI * I * x).exp()).collect()
}

/// `(H(x;y)Φ)/Φ` and `(H(X;Y)Φ)/Φ` at one point, given the two operators and a kernel.
pub fn kernel_identity_sides<F>(
    shape: KernelShape,
    op_xy: &FormalOperator,
    op_bxy: &FormalOperator,
    phi: F,
    point: &[C64],
) -> Result<(C64, C64)>
where
    F: Fn(&[C64], &[C64], &[C64], &[C64]) -> Result<C64>,
{
    let (x, y, bx, by) = shape.split(point);
    let base = phi(x, y, bx, by)?;
    if base.norm() < 1e-300 || !base.is_finite() {
        return Err(Error::Pole {
            factor: "kernel value",
            index: 0,
            magnitude: base.norm(),
        });
    }
    let xy: Vec<C64> = x.iter().chain(y).copied().collect();
    let bxy: Vec<C64> = bx.iter().chain(by).copied().collect();
    let lhs = op_xy.apply(|v| phi(&v[..shape.m], &v[shape.m..], bx, by), &xy)?;
    let rhs = op_bxy.apply(|v| phi(x, y, &v[..shape.n], &v[shape.n..]), &bxy)?;
    Ok((lhs / base, rhs / base))
}

/// Residual of `H_{m,r}^{(k)}(x;y) Φ = H_{n,s}^{(k)}(X;Y) Φ`, both sides divided by `Φ`.
pub fn check_kernel(shape: KernelShape, k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    require_balanced(shape, params)?;
    params.require_off_unit_circle()?;
    let a = build_h(shape.m, shape.r, k, params)?;
    let b = build_h(shape.n, shape.s, k, params)?;
    let rep = sample_residuals("kernel_additive", cfg, shape.dim(), |v| {
        let (l, r) = kernel_identity_sides(shape, &a, &b, |x, y, bx, by| kernel_phi(x, y, bx, by, params), v)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("shape", [shape.m, shape.r, shape.n, shape.s]).with_param("k", k))
}

/// Multiplicative version with the bold operators and the bold kernel.
pub fn check_kernel_bold(shape: KernelShape, k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    require_balanced(shape, params)?;
    let a = build_bold(Family::H, shape.m, shape.r, k, params)?;
    let b = build_bold(Family::H, shape.n, shape.s, k, params)?;
    let phi = |x: &[C64], y: &[C64], bx: &[C64], by: &[C64]| {
        kernel_phi_bold(&exp_vec(x), &exp_vec(y), &exp_vec(bx), &exp_vec(by), params)
    };
    let rep = sample_residuals("kernel_multiplicative", cfg, shape.dim(), |v| {
        let (l, r) = kernel_identity_sides(shape, &a, &b, phi, v)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("shape", [shape.m, shape.r, shape.n, shape.s]).with_param("k", k))
}
