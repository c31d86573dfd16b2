use std::path::Path;

use serde::{Deserialize, Serialize};

use super::VerifyArgs;
use crate::error::{Error, Result};
use crate::shiftalg::SamplerConfig;
use crate::specialfn::{
    default_delta, default_kappa, default_tau, BracketContext, ModelParams, VariantKind, DEFAULT_GENERICITY_FLOOR,
    DEFAULT_POLE_FLOOR,
};
use crate::C64;

/// Everything a run depends on. Loaded from JSON (missing keys take defaults)
/// and then overridden by command-line flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub variant: VariantKind,
    /// Elliptic nome; when set it replaces `tau`.
    pub p: Option<C64>,
    pub tau: C64,
    pub omega: C64,
    pub delta: C64,
    pub kappa: C64,
    pub m: usize,
    pub r: usize,
    pub n: usize,
    pub s: usize,
    pub k_max: u32,
    pub big_k_max: u32,
    pub n_max: u32,
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub pole_floor: f64,
    pub genericity_floor: f64,
    pub relax_genericity: bool,
    /// Theta series length; `None` picks it from `|p|`.
    pub theta_terms: Option<usize>,
    /// Seeds used for the rank-stability check.
    pub rank_seeds: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            variant: VariantKind::Elliptic,
            p: None,
            tau: default_tau(),
            omega: C64::new(1.0, 0.0),
            delta: default_delta(),
            kappa: default_kappa(),
            m: 1,
            r: 1,
            n: 1,
            s: 1,
            k_max: 2,
            big_k_max: 3,
            n_max: 3,
            samples: 20,
            tolerance: 1e-8,
            seed: SamplerConfig::default().seed,
            pole_floor: DEFAULT_POLE_FLOOR,
            genericity_floor: DEFAULT_GENERICITY_FLOOR,
            relax_genericity: false,
            theta_terms: None,
            rank_seeds: 5,
        }
    }
}

impl SuiteConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Parses and validates a JSON config; missing keys take their defaults.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    /// Config file (if any) overlaid with the flags that were given.
    pub fn from_args(a: &VerifyArgs) -> Result<Self> {
        let mut c = match &a.config {
            Some(path) => Self::from_json_file(path)?,
            None => Self::default(),
        };
        macro_rules! take {
            ($($flag:ident => $field:ident),* $(,)?) => {
                $( if let Some(v) = a.$flag { c.$field = v; } )*
            };
        }
        take!(tau => tau, omega => omega, delta => delta, kappa => kappa, m => m, r => r, n => n, s => s,
              kmax => k_max, big_kmax => big_k_max, nmax => n_max, samples => samples, tol => tolerance,
              seed => seed, pole_floor => pole_floor, genericity_floor => genericity_floor);
        if let Some(v) = a.variant {
            c.variant = v.into();
        }
        if a.p.is_some() {
            c.p = a.p;
        }
        if a.relax_genericity {
            c.relax_genericity = true;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Config(format!("tolerance {} is not in (0, 1)", self.tolerance)));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if self.rank_seeds == 0 {
            return Err(Error::Config("rank_seeds must be at least 1".into()));
        }
        if !(self.pole_floor >= 0.0 && self.genericity_floor >= 0.0) {
            return Err(Error::Config("floors must be non-negative".into()));
        }
        for (name, v) in [("delta", self.delta), ("kappa", self.kappa), ("tau", self.tau), ("omega", self.omega)] {
            if !v.is_finite() {
                return Err(Error::Config(format!("{name} is not finite")));
            }
        }
        if let Some(p) = self.p {
            if !(p.norm() > 0.0 && p.norm() < 1.0) {
                return Err(Error::Config(format!("|p| = {} is not in (0, 1)", p.norm())));
            }
        }
        Ok(())
    }

    pub fn context(&self) -> Result<BracketContext> {
        let ctx = match self.variant {
            VariantKind::Elliptic => match self.p {
                Some(p) => BracketContext::elliptic(p)?,
                None => BracketContext::elliptic_from_tau(self.tau)?,
            },
            VariantKind::Trigonometric => BracketContext::trigonometric(self.omega)?,
            VariantKind::Hyperbolic => BracketContext::hyperbolic(self.omega)?,
            VariantKind::Rational => BracketContext::rational(),
        };
        match self.theta_terms {
            Some(t) => ctx.with_truncation(t),
            None => Ok(ctx),
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        let floor = if self.relax_genericity { 0.0 } else { self.genericity_floor };
        Ok(ModelParams::new(self.delta, self.kappa, self.context()?)?.with_floors(self.pole_floor, floor))
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig::default()
            .with_samples(self.samples)
            .with_tolerance(self.tolerance)
            .with_seed(self.seed)
    }
}
