//! Seeded random-point testing of operator and scalar identities.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FormalOperator;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
    /// Redraws allowed per sample after a pole hit.
    pub max_retries: usize,
    /// Points are drawn uniformly from `[-re, re] × [-im, im]` per coordinate.
    pub re_half_width: f64,
    pub im_half_width: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            samples: 20,
            tolerance: 1e-8,
            seed: 0x5eed,
            max_retries: 1000,
            re_half_width: 0.5,
            im_half_width: 0.25,
        }
    }
}

impl SamplerConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Draws points for one sample index. Each index owns its own ChaCha stream, so
/// results do not depend on how samples are scheduled across threads.
pub struct PointSampler {
    rng: ChaCha8Rng,
    re: f64,
    im: f64,
}

impl PointSampler {
    pub fn new(cfg: &SamplerConfig, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(index);
        Self {
            rng,
            re: cfg.re_half_width,
            im: cfg.im_half_width,
        }
    }

    pub fn complex(&mut self) -> C64 {
        let a: f64 = self.rng.random_range(-1.0..1.0);
        let b: f64 = self.rng.random_range(-1.0..1.0);
        C64::new(a * self.re, b * self.im)
    }

    pub fn point(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub name: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
    pub samples: usize,
    pub tolerance: f64,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub median_residual: f64,
    /// Total number of redraws caused by pole hits.
    pub retries: usize,
    pub verdict: Verdict,
}

impl ResidualReport {
    pub fn from_residuals(
        name: impl Into<String>,
        cfg: &SamplerConfig,
        residuals: Vec<f64>,
        retries: usize,
    ) -> Self {
        let residuals: Vec<f64> = residuals
            .into_iter()
            .map(|r| if r.is_nan() { f64::INFINITY } else { r })
            .collect();
        let max = residuals.iter().copied().fold(0.0, f64::max);
        let median = median(&residuals);
        let verdict = if max < cfg.tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Self {
            name: name.into(),
            params: BTreeMap::new(),
            seed: cfg.seed,
            samples: residuals.len(),
            tolerance: cfg.tolerance,
            residuals,
            max_residual: max,
            median_residual: median,
            retries,
            verdict,
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.params.insert(key.to_string(), v);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Folds several reports into one under a new name; the verdict is the
    /// worst of the parts.
    pub fn merge(name: impl Into<String>, cfg: &SamplerConfig, parts: &[ResidualReport]) -> Self {
        let residuals: Vec<f64> = parts.iter().flat_map(|p| p.residuals.iter().copied()).collect();
        let retries = parts.iter().map(|p| p.retries).sum();
        let mut out = Self::from_residuals(name, cfg, residuals, retries);
        if out.verdict == Verdict::Pass && parts.iter().any(|p| p.verdict == Verdict::Inconclusive) {
            out.verdict = Verdict::Inconclusive;
        }
        if parts.iter().any(|p| p.verdict == Verdict::Fail) {
            out.verdict = Verdict::Fail;
        }
        let plain = parts
            .iter()
            .filter_map(|p| p.params.get("plain_max_residual").and_then(|v| v.as_f64()))
            .reduce(f64::max);
        if let Some(plain) = plain {
            out = out.with_param("plain_max_residual", plain);
        }
        out
    }
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `|a − b| / (|a| + |b| + 1)`.
pub fn relative_residual(a: C64, b: C64) -> f64 {
    (a - b).norm() / (a.norm() + b.norm() + 1.0)
}

/// Evaluates `residual` at `cfg.samples` random points of dimension `dim`,
/// redrawing a point whenever the evaluation hits a pole.
pub fn sample_residuals<F>(
    name: impl Into<String>,
    cfg: &SamplerConfig,
    dim: usize,
    residual: F,
) -> Result<ResidualReport>
where
    F: Fn(&[C64]) -> Result<f64> + Sync,
{
    let per_sample: Vec<Result<(f64, usize)>> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let mut sampler = PointSampler::new(cfg, i as u64);
            for attempt in 0..=cfg.max_retries {
                let pt = sampler.point(dim);
                match residual(&pt) {
                    Ok(r) => return Ok((r, attempt)),
                    Err(Error::Pole { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(Error::SamplerExhausted(cfg.max_retries))
        })
        .collect();
    let mut residuals = Vec::with_capacity(cfg.samples);
    let mut retries = 0;
    for r in per_sample {
        let (v, n) = r?;
        residuals.push(v);
        retries += n;
    }
    Ok(ResidualReport::from_residuals(name, cfg, residuals, retries))
}

/// Compares two operators coefficient-wise on the union of their keys.
pub fn equal_at(
    name: impl Into<String>,
    a: &FormalOperator,
    b: &FormalOperator,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    a.check_compatible(b)?;
    sample_residuals(name, cfg, a.n_slots(), |pt| {
        let ca = a.coefficients_at(pt)?;
        let cb = b.coefficients_at(pt)?;
        let zero = C64::new(0.0, 0.0);
        let mut worst: f64 = 0.0;
        for (k, va) in &ca {
            let vb = cb.get(k).copied().unwrap_or(zero);
            worst = worst.max(nan_to_inf(relative_residual(*va, vb)));
        }
        for (k, vb) in &cb {
            if !ca.contains_key(k) {
                worst = worst.max(nan_to_inf(relative_residual(zero, *vb)));
            }
        }
        Ok(worst)
    })
}

/// Like [`equal_at`], but each coefficient difference is divided by
/// `Σ|summands of a| + Σ|summands of b| + 1` instead of `|a| + |b| + 1`.
/// For identities whose sides are long sums that cancel, this is the scale
/// at which double precision can resolve the difference. The plain residual
/// maximum is kept in the report as `plain_max_residual`.
pub fn equal_at_scaled(
    name: impl Into<String>,
    a: &FormalOperator,
    b: &FormalOperator,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    a.check_compatible(b)?;
    let plain = equal_at("plain", a, b, cfg)?;
    let report = sample_residuals(name, cfg, a.n_slots(), |pt| {
        let ca = a.coefficients_with_scale_at(pt)?;
        let cb = b.coefficients_with_scale_at(pt)?;
        let zero = (C64::new(0.0, 0.0), 0.0);
        let mut worst: f64 = 0.0;
        let mut visit = |(va, sa): (C64, f64), (vb, sb): (C64, f64)| {
            worst = worst.max(nan_to_inf((va - vb).norm() / (sa + sb + 1.0)));
        };
        for (k, va) in &ca {
            visit(*va, cb.get(k).copied().unwrap_or(zero));
        }
        for (k, vb) in &cb {
            if !ca.contains_key(k) {
                visit(zero, *vb);
            }
        }
        Ok(worst)
    })?;
    Ok(report.with_param("plain_max_residual", plain.max_residual))
}

fn nan_to_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shiftalg::{coefficient, ShiftKey};

    fn op() -> FormalOperator {
        let steps = vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.05)];
        let mut a = FormalOperator::zero(1, steps);
        a.push_term(ShiftKey(vec![1, 0]), coefficient(|v| Ok(v[0].exp() * v[1])));
        a.push_term(ShiftKey(vec![0, 1]), coefficient(|v| Ok(v[1].cos())));
        a
    }

    #[test]
    fn self_equality_is_exact() {
        let a = op();
        let rep = equal_at("self", &a, &a, &SamplerConfig::default()).unwrap();
        assert_eq!(rep.max_residual, 0.0);
        assert!(rep.passed());
        assert_eq!(rep.samples, 20);
    }

    #[test]
    fn differing_operators_fail() {
        let a = op();
        let b = a.scaled(C64::new(1.1, 0.0));
        let rep = equal_at("scaled", &a, &b, &SamplerConfig::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::Fail);
    }

    #[test]
    fn reports_are_deterministic() {
        let cfg = SamplerConfig::default().with_seed(42);
        let f = |v: &[C64]| Ok((v[0] * v[1]).norm());
        let r1 = sample_residuals("det", &cfg, 2, f).unwrap();
        let r2 = sample_residuals("det", &cfg, 2, f).unwrap();
        assert_eq!(r1, r2);
        let r3 = sample_residuals("det", &cfg.with_seed(43), 2, f).unwrap();
        assert_ne!(r1.residuals, r3.residuals);
    }

    #[test]
    fn poles_trigger_redraws() {
        let cfg = SamplerConfig::default();
        let rep = sample_residuals("poles", &cfg, 1, |v| {
            if v[0].re < 0.0 {
                Err(Error::Pole { factor: "test", index: 0, magnitude: 0.0 })
            } else {
                Ok(0.0)
            }
        })
        .unwrap();
        assert!(rep.retries > 0);
        assert!(rep.passed());
    }

    #[test]
    fn exhausted_sampler_is_an_error() {
        let cfg = SamplerConfig { max_retries: 5, ..SamplerConfig::default() };
        let err = sample_residuals("never", &cfg, 1, |_| {
            Err::<f64, _>(Error::Pole { factor: "test", index: 0, magnitude: 0.0 })
        })
        .unwrap_err();
        assert_eq!(err, Error::SamplerExhausted(5));
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[]), 0.0);
    }
}
