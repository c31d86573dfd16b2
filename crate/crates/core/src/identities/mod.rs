//! Scalar and operator identities, each evaluated as a residual at random points.

mod kernel;
mod operator;
mod source;
mod transform;

use std::cell::Cell;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specialfn::{shifted_factorial_floor, ModelParams};

pub use kernel::{
    balanced_kappa, check_kernel, check_kernel_bold, kernel_identity_sides, kernel_phi, kernel_phi_bold,
    require_balanced, KernelShape,
};
pub use operator::{
    check_d_via_recursion, check_h_via_recursion, check_wronski, check_wronski_bold, d_via_recursion,
    h_via_recursion, wronski_sides,
};
pub use source::{
    check_frobenius, check_ksni, check_nssi, check_rsi, frobenius_sides, ksni_sides, nssi_terms, rsi_sides,
};
pub use transform::{
    check_csp, check_ktp, check_lss, check_tt, csp_s, ktp_sides, ktp_sides_with_scale, lss_sides, solve_balancing, tt_t,
};

/// Names of the identity checks, as used in reports and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityName {
    Rsi,
    Nssi,
    Ksni,
    Frobenius,
    Csp,
    TtLsl,
    Lss,
    Ktp,
    Wronski,
    Determinant,
    KernelAdditive,
    KernelMultiplicative,
}

impl IdentityName {
    pub const ALL: [IdentityName; 12] = [
        IdentityName::Rsi,
        IdentityName::Nssi,
        IdentityName::Ksni,
        IdentityName::Frobenius,
        IdentityName::Csp,
        IdentityName::TtLsl,
        IdentityName::Lss,
        IdentityName::Ktp,
        IdentityName::Wronski,
        IdentityName::Determinant,
        IdentityName::KernelAdditive,
        IdentityName::KernelMultiplicative,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            IdentityName::Rsi => "rsi",
            IdentityName::Nssi => "nssi",
            IdentityName::Ksni => "ksni",
            IdentityName::Frobenius => "frobenius",
            IdentityName::Csp => "csp",
            IdentityName::TtLsl => "tt_lsl",
            IdentityName::Lss => "lss",
            IdentityName::Ktp => "ktp",
            IdentityName::Wronski => "wronski",
            IdentityName::Determinant => "determinant",
            IdentityName::KernelAdditive => "kernel_additive",
            IdentityName::KernelMultiplicative => "kernel_multiplicative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|n| n.name() == s)
    }
}

/// All subsets of `{0..n}` of the given size (every size when `None`), as
/// membership vectors in ascending bitmask order.
pub fn subsets(n: usize, size: Option<usize>) -> Vec<Vec<bool>> {
    (0u64..(1u64 << n))
        .filter(|mask| size.is_none_or(|s| mask.count_ones() as usize == s))
        .map(|mask| (0..n).map(|j| mask >> j & 1 == 1).collect())
        .collect()
}

/// Bracket evaluation with pole-checked division, shared by the scalar identities.
/// Denominator factors go through [`Eval::bd`] / [`Eval::fact_d`], which track
/// the smallest factor seen; [`Eval::div`] turns a factor below the pole floor
/// into a pole error.
pub(crate) struct Eval<'a> {
    pub p: &'a ModelParams,
    min_den: Cell<f64>,
}

impl<'a> Eval<'a> {
    pub fn new(p: &'a ModelParams) -> Self {
        Self {
            p,
            min_den: Cell::new(f64::INFINITY),
        }
    }

    /// `[x]` as a denominator factor.
    #[inline]
    pub fn bd(&self, x: C64) -> C64 {
        let v = self.p.bracket(x);
        self.min_den.set(self.min_den.get().min(v.norm()));
        v
    }

    /// `[x]_k` as a denominator factor.
    pub fn fact_d(&self, x: C64, k: i64) -> Result<C64> {
        if k < 0 {
            return self.fact(x, k);
        }
        Ok((0..k).map(|j| self.bd(x + self.p.delta * j as f64)).product())
    }

    #[inline]
    pub fn b(&self, x: C64) -> C64 {
        self.p.bracket(x)
    }

    /// `[x]_k` in steps of `δ`.
    pub fn fact(&self, x: C64, k: i64) -> Result<C64> {
        shifted_factorial_floor(x, k, self.p.delta, &self.p.context, self.p.pole_floor)
    }

    pub fn div(&self, num: C64, den: C64, factor: &'static str) -> Result<C64> {
        let smallest = self.min_den.replace(f64::INFINITY);
        let a = smallest.min(den.norm().max(f64::MIN_POSITIVE));
        if smallest < self.p.pole_floor || !den.is_finite() || den.norm() == 0.0 {
            return Err(Error::Pole {
                factor,
                index: 0,
                magnitude: a,
            });
        }
        Ok(num / den)
    }
}

pub(crate) fn sign(odd: bool) -> f64 {
    if odd {
        -1.0
    } else {
        1.0
    }
}
