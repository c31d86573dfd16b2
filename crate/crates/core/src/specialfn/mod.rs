//! Bracket function, theta products, shifted factorials, elliptic gamma and `G_δ`.

mod gamma;
mod theta;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use gamma::{elliptic_gamma, elliptic_gamma_any_base, gamma, g_step, ln_gamma};
pub use theta::{
    min_truncation_terms, theta, theta_pochhammer, theta_truncated, BracketContext, Variant,
};

/// Below this a bracket value is treated as an exact zero.
pub const NUMERICAL_ZERO: f64 = 1e-12;

pub const DEFAULT_POLE_FLOOR: f64 = 1e-6;
pub const DEFAULT_GENERICITY_FLOOR: f64 = 1e-6;

const I: C64 = C64::new(0.0, 1.0);

/// `[x]_k` with step `step`: `[x][x+step]⋯[x+(k-1)step]` for `k ≥ 0` and
/// `1/([x-|k|step]⋯[x-step])` for `k < 0`.
pub fn shifted_factorial(x: C64, k: i64, step: C64, ctx: &BracketContext) -> Result<C64> {
    if !(x.is_finite() && step.is_finite()) {
        return Err(Error::NonFinite("shifted_factorial"));
    }
    shifted_factorial_floor(x, k, step, ctx, NUMERICAL_ZERO)
}

/// As [`shifted_factorial`], reporting a pole when a denominator factor has
/// magnitude below `floor`. The error index is `j` for the factor `[x - j·step]`.
pub fn shifted_factorial_floor(
    x: C64,
    k: i64,
    step: C64,
    ctx: &BracketContext,
    floor: f64,
) -> Result<C64> {
    if k >= 0 {
        let mut acc = C64::new(1.0, 0.0);
        for j in 0..k {
            acc *= ctx.eval(x + step * j as f64);
        }
        Ok(acc)
    } else {
        let mut den = C64::new(1.0, 0.0);
        for j in 1..=(-k) {
            let b = ctx.eval(x - step * j as f64);
            if b.norm() < floor {
                return Err(Error::Pole {
                    factor: "shifted_factorial",
                    index: j as usize,
                    magnitude: b.norm(),
                });
            }
            den *= b;
        }
        Ok(den.inv())
    }
}

/// Model parameters `(δ, κ)` together with the bracket in use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub delta: C64,
    pub kappa: C64,
    pub context: BracketContext,
    /// Denominators smaller than this are reported as poles.
    pub pole_floor: f64,
    /// `|[nδ]|`, `|[nκ]|` must exceed this for the parameters to count as generic.
    pub genericity_floor: f64,
}

impl ModelParams {
    pub fn new(delta: C64, kappa: C64, context: BracketContext) -> Result<Self> {
        if !(delta.is_finite() && kappa.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(Self {
            delta,
            kappa,
            context,
            pole_floor: DEFAULT_POLE_FLOOR,
            genericity_floor: DEFAULT_GENERICITY_FLOOR,
        })
    }

    pub fn with_floors(mut self, pole_floor: f64, genericity_floor: f64) -> Self {
        self.pole_floor = pole_floor;
        self.genericity_floor = genericity_floor;
        self
    }

    /// Same bracket and floors, different `(δ, κ)`.
    pub fn with_steps(&self, delta: C64, kappa: C64) -> Self {
        Self {
            delta,
            kappa,
            ..*self
        }
    }

    /// `q = e^{2πiδ}`.
    pub fn q(&self) -> C64 {
        (2.0 * PI * I * self.delta).exp()
    }

    /// `t = e^{2πiκ}`.
    pub fn t(&self) -> C64 {
        (2.0 * PI * I * self.kappa).exp()
    }

    #[inline]
    pub fn bracket(&self, x: C64) -> C64 {
        self.context.eval(x)
    }

    /// `G_δ`.
    pub fn g_delta(&self, x: C64) -> Result<C64> {
        g_step(x, self.delta, &self.context)
    }

    /// `G_{-κ}`.
    pub fn g_minus_kappa(&self, x: C64) -> Result<C64> {
        g_step(x, -self.kappa, &self.context)
    }

    /// Errors unless `|q| ≠ 1` and `|t| ≠ 1`, as needed by anything built from `G`.
    pub fn require_off_unit_circle(&self) -> Result<()> {
        if matches!(self.context.variant(), Variant::Rational) {
            return Ok(());
        }
        let (qd, qk) = match self.context.variant() {
            Variant::Trigonometric { omega } | Variant::Hyperbolic { omega } => {
                let w = if matches!(self.context.variant(), Variant::Hyperbolic { .. }) {
                    -I * omega
                } else {
                    omega
                };
                (self.delta / w, self.kappa / w)
            }
            _ => (self.delta, self.kappa),
        };
        if qd.im.abs() < 1e-12 {
            return Err(Error::UnsupportedRegime("|q| = 1"));
        }
        if qk.im.abs() < 1e-12 {
            return Err(Error::UnsupportedRegime("|t| = 1"));
        }
        Ok(())
    }

    /// Errors unless `|[jδ]|` and `|[jκ]|` exceed the genericity floor for `1 ≤ j ≤ n_max`.
    pub fn require_generic(&self, n_max: usize) -> Result<()> {
        let report = check_genericity(self, n_max);
        match report.failure {
            None => Ok(()),
            Some((which, n, magnitude)) => Err(Error::Genericity { which, n, magnitude }),
        }
    }
}

/// Bracket variant without its parameters, for configuration and reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantKind {
    Elliptic,
    #[serde(alias = "trig")]
    Trigonometric,
    Hyperbolic,
    Rational,
}

impl VariantKind {
    pub const ALL: [VariantKind; 4] = [
        VariantKind::Elliptic,
        VariantKind::Trigonometric,
        VariantKind::Hyperbolic,
        VariantKind::Rational,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            VariantKind::Elliptic => "elliptic",
            VariantKind::Trigonometric => "trigonometric",
            VariantKind::Hyperbolic => "hyperbolic",
            VariantKind::Rational => "rational",
        }
    }
}

/// Default `δ`: `|q| ≈ 0.30`, `Im δ > 0`.
pub fn default_delta() -> C64 {
    C64::new(2f64.sqrt() / 10.0, 3f64.sqrt() / 9.0)
}

/// Default `κ`: `|t| ≈ 1.74`, `Im κ < 0`.
pub fn default_kappa() -> C64 {
    C64::new(5f64.sqrt() / 8.0, -(7f64.sqrt()) / 30.0)
}

/// Default `τ` with `|p| = 0.3` and an irrational real part.
pub fn default_tau() -> C64 {
    C64::new(11f64.sqrt() / 29.0, (1.0f64 / 0.3).ln() / (2.0 * PI))
}

impl BracketContext {
    /// The variant with default parameters: `τ` from [`default_tau`], `ω = 1`.
    pub fn default_for(kind: VariantKind) -> Self {
        let one = C64::new(1.0, 0.0);
        match kind {
            VariantKind::Elliptic => BracketContext::elliptic_from_tau(default_tau()),
            VariantKind::Trigonometric => BracketContext::trigonometric(one),
            VariantKind::Hyperbolic => BracketContext::hyperbolic(one),
            VariantKind::Rational => Ok(BracketContext::rational()),
        }
        .expect("default bracket parameters are valid")
    }

    pub fn kind(&self) -> VariantKind {
        match self.variant() {
            Variant::Elliptic { .. } => VariantKind::Elliptic,
            Variant::Trigonometric { .. } => VariantKind::Trigonometric,
            Variant::Hyperbolic { .. } => VariantKind::Hyperbolic,
            Variant::Rational => VariantKind::Rational,
        }
    }
}

impl ModelParams {
    /// Default generic parameters for a bracket variant.
    pub fn generic(kind: VariantKind) -> Self {
        Self::new(default_delta(), default_kappa(), BracketContext::default_for(kind))
            .expect("default parameters are finite")
    }
}

/// Result of scanning `[nδ]`, `[nκ]` for `1 ≤ n ≤ n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenericityReport {
    pub n_max: usize,
    pub floor: f64,
    pub min_delta: f64,
    pub min_kappa: f64,
    /// First offending `(parameter, n, |[n·parameter]|)`, scanning `n` upwards.
    pub failure: Option<(&'static str, usize, f64)>,
    pub pass: bool,
}

pub fn check_genericity(params: &ModelParams, n_max: usize) -> GenericityReport {
    let mut min_delta = f64::INFINITY;
    let mut min_kappa = f64::INFINITY;
    let mut failure = None;
    for n in 1..=n_max {
        let bd = params.bracket(params.delta * n as f64).norm();
        let bk = params.bracket(params.kappa * n as f64).norm();
        min_delta = min_delta.min(bd);
        min_kappa = min_kappa.min(bk);
        if failure.is_none() {
            if bd <= params.genericity_floor {
                failure = Some(("delta", n, bd));
            } else if bk <= params.genericity_floor {
                failure = Some(("kappa", n, bk));
            }
        }
    }
    GenericityReport {
        n_max,
        floor: params.genericity_floor,
        min_delta,
        min_kappa,
        pass: failure.is_none(),
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> BracketContext {
        BracketContext::elliptic(C64::new(0.21, 0.13)).unwrap()
    }

    #[test]
    fn factorial_small_cases() {
        let c = ctx();
        let x = C64::new(0.31, 0.07);
        let d = C64::new(0.14, 0.19);
        assert_eq!(shifted_factorial(x, 0, d, &c).unwrap(), C64::new(1.0, 0.0));
        let two = shifted_factorial(x, 2, d, &c).unwrap();
        assert!((two - c.eval(x) * c.eval(x + d)).norm() < 1e-15 * two.norm());
        let m1 = shifted_factorial(x, -1, d, &c).unwrap();
        assert!((m1 - c.eval(x - d).inv()).norm() < 1e-14 * m1.norm());
    }

    #[test]
    fn factorial_pole_carries_index() {
        let c = ctx();
        let d = C64::new(0.14, 0.19);
        // [x - 2d] = 0 when x = 2d.
        let r = shifted_factorial(d * 2.0, -3, d, &c);
        match r {
            Err(Error::Pole { index, .. }) => assert_eq!(index, 2),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn genericity_detects_half_period() {
        let p = ModelParams::new(C64::new(0.5, 0.0), C64::new(0.123, 0.1), ctx()).unwrap();
        let rep = check_genericity(&p, 4);
        assert!(!rep.pass);
        assert_eq!(rep.failure.map(|f| (f.0, f.1)), Some(("delta", 2)));
        let vacuous = check_genericity(&p, 0);
        assert!(vacuous.pass);
    }

    #[test]
    fn unit_circle_guard() {
        let p = ModelParams::new(C64::new(0.2, 0.0), C64::new(0.1, 0.1), ctx()).unwrap();
        assert!(matches!(p.require_off_unit_circle(), Err(Error::UnsupportedRegime(_))));
        assert!(matches!(p.g_delta(C64::new(0.1, 0.2)), Err(Error::UnsupportedRegime(_))));
    }
}
