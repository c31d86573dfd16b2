//! Theta products and the bracket function in its four normalizations.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Which solution of the three-term identity is in use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Variant {
    /// `[x] = exp(-iπx) θ(exp(2πix); p)`.
    Elliptic { p: C64 },
    /// `[x] = -2i sin(πx/ω)`; equals the elliptic variant at `p = 0` when `ω = 1`.
    Trigonometric { omega: C64 },
    /// `[x] = sinh(πx/ω)`.
    Hyperbolic { omega: C64 },
    /// `[x] = x`.
    Rational,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Elliptic { .. } => "elliptic",
            Variant::Trigonometric { .. } => "trigonometric",
            Variant::Hyperbolic { .. } => "hyperbolic",
            Variant::Rational => "rational",
        }
    }
}

/// Minimum number of product factors so that `|p|^N` is below machine epsilon,
/// plus a fixed margin of 8.
pub fn min_truncation_terms(p: C64) -> usize {
    let ap = p.norm();
    if ap == 0.0 {
        return 8;
    }
    (f64::EPSILON.ln() / ap.ln()).ceil().max(0.0) as usize + 8
}

/// A chosen bracket function `x ↦ [x]`. Immutable and `Copy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketContext {
    variant: Variant,
    truncation_terms: usize,
}

impl BracketContext {
    pub fn elliptic(p: C64) -> Result<Self> {
        check_nome(p)?;
        Ok(Self {
            variant: Variant::Elliptic { p },
            truncation_terms: min_truncation_terms(p),
        })
    }

    /// Elliptic context with nome `p = exp(2πiτ)`, `Im τ > 0`.
    pub fn elliptic_from_tau(tau: C64) -> Result<Self> {
        if !tau.is_finite() {
            return Err(Error::NonFinite("elliptic_from_tau"));
        }
        if tau.im <= 0.0 {
            return Err(Error::Domain(format!("Im τ must be positive, got {}", tau.im)));
        }
        Self::elliptic((2.0 * PI * I * tau).exp())
    }

    pub fn trigonometric(omega: C64) -> Result<Self> {
        check_period(omega)?;
        Ok(Self {
            variant: Variant::Trigonometric { omega },
            truncation_terms: 0,
        })
    }

    pub fn hyperbolic(omega: C64) -> Result<Self> {
        check_period(omega)?;
        Ok(Self {
            variant: Variant::Hyperbolic { omega },
            truncation_terms: 0,
        })
    }

    pub fn rational() -> Self {
        Self {
            variant: Variant::Rational,
            truncation_terms: 0,
        }
    }

    pub fn from_variant(variant: Variant) -> Result<Self> {
        match variant {
            Variant::Elliptic { p } => Self::elliptic(p),
            Variant::Trigonometric { omega } => Self::trigonometric(omega),
            Variant::Hyperbolic { omega } => Self::hyperbolic(omega),
            Variant::Rational => Ok(Self::rational()),
        }
    }

    /// Override the theta truncation. Values below the minimum for `|p|` are rejected.
    pub fn with_truncation(mut self, terms: usize) -> Result<Self> {
        if let Variant::Elliptic { p } = self.variant {
            let min = min_truncation_terms(p);
            if terms < min {
                return Err(Error::Domain(format!(
                    "truncation {terms} below the minimum {min} for |p| = {}",
                    p.norm()
                )));
            }
            self.truncation_terms = terms;
        }
        Ok(self)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn truncation_terms(&self) -> usize {
        self.truncation_terms
    }

    /// The elliptic nome, or `None` for the degenerate variants.
    pub fn nome(&self) -> Option<C64> {
        match self.variant {
            Variant::Elliptic { p } => Some(p),
            _ => None,
        }
    }

    /// `[x]`, with a finiteness check on the input.
    pub fn bracket(&self, x: C64) -> Result<C64> {
        if !x.is_finite() {
            return Err(Error::NonFinite("bracket"));
        }
        Ok(self.eval(x))
    }

    /// `[x]` without input validation; used on hot paths.
    #[inline]
    pub fn eval(&self, x: C64) -> C64 {
        match self.variant {
            Variant::Elliptic { p } => {
                (-I * PI * x).exp() * theta_truncated((2.0 * PI * I * x).exp(), p, self.truncation_terms)
            }
            Variant::Trigonometric { omega } => -2.0 * I * (PI * x / omega).sin(),
            Variant::Hyperbolic { omega } => (PI * x / omega).sinh(),
            Variant::Rational => x,
        }
    }
}

fn check_nome(p: C64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::NonFinite("elliptic nome"));
    }
    if p.norm() >= 1.0 {
        return Err(Error::Domain(format!("elliptic nome needs |p| < 1, got {}", p.norm())));
    }
    Ok(())
}

fn check_period(omega: C64) -> Result<()> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("period"));
    }
    if omega.norm() == 0.0 {
        return Err(Error::Domain("period must be non-zero".into()));
    }
    Ok(())
}

/// `θ(z; p) = ∏_{j≥0} (1 - p^j z)(1 - p^{j+1}/z)`, truncated after the default
/// number of factors for `|p|`.
pub fn theta(z: C64, p: C64) -> Result<C64> {
    if !z.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    check_nome(p)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("theta is singular at z = 0".into()));
    }
    Ok(theta_truncated(z, p, min_truncation_terms(p)))
}

/// The product over `0 ≤ j ≤ terms`, extended by enough factors that the
/// neglected `p^j z` and `p^{j+1}/z` stay below epsilon when `|z|` is far from 1.
pub fn theta_truncated(z: C64, p: C64, terms: usize) -> C64 {
    let ap = p.norm();
    if ap == 0.0 {
        return C64::new(1.0, 0.0) - z;
    }
    let spread = z.norm().ln().abs();
    let extra = (spread / -ap.ln()).ceil() as usize;
    let zinv = z.inv();
    let mut acc = C64::new(1.0, 0.0);
    let mut pj = C64::new(1.0, 0.0);
    for _ in 0..=terms + extra {
        acc *= 1.0 - pj * z;
        pj *= p;
        acc *= 1.0 - pj * zinv;
    }
    acc
}

/// `(a; q, p)_k = θ(a) θ(aq) ⋯ θ(aq^{k-1})` for `k ≥ 0`.
pub fn theta_pochhammer(a: C64, q: C64, p: C64, k: usize, terms: usize) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut aq = a;
    for _ in 0..k {
        acc *= theta_truncated(aq, p, terms);
        aq *= q;
    }
    acc
}
