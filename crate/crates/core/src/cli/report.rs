use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{SuiteConfig, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_PASS};
use crate::error::Error;
use crate::independence::IndependenceReport;
use crate::shiftalg::{ResidualReport, Verdict};
use crate::specialfn::VariantKind;

/// One line of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    /// `None` for checks without a residual (rank certificates) and for
    /// non-finite residuals, which JSON cannot carry.
    pub max_residual: Option<f64>,
    pub median_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub retries: usize,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl From<ResidualReport> for CheckRecord {
    fn from(r: ResidualReport) -> Self {
        Self {
            name: r.name,
            params: r.params,
            samples: r.samples,
            max_residual: finite(r.max_residual),
            median_residual: finite(r.median_residual),
            tolerance: Some(r.tolerance),
            retries: r.retries,
            verdict: r.verdict,
            error: None,
        }
    }
}

impl From<IndependenceReport> for CheckRecord {
    fn from(r: IndependenceReport) -> Self {
        let mut params = BTreeMap::new();
        params.insert("m".into(), r.m.into());
        params.insert("r".into(), r.r.into());
        params.insert("n_max".into(), r.n_max.into());
        params.insert("seeds".into(), r.seeds.clone().into());
        params.insert("stable".into(), r.stable.into());
        let per_degree: Vec<Value> = (1..=r.n_max)
            .map(|d| {
                let at: Vec<_> = r.degrees.iter().filter(|g| g.degree == d).collect();
                let gap = at.iter().map(|g| g.certificate.gap).fold(f64::INFINITY, f64::min);
                serde_json::json!({
                    "degree": d,
                    "rows": at.first().map(|g| g.certificate.rows),
                    "ranks": at.iter().map(|g| g.certificate.rank).collect::<Vec<_>>(),
                    "min_gap": finite(gap),
                })
            })
            .collect();
        params.insert("degrees".into(), per_degree.into());
        let retries = r.degrees.iter().map(|g| g.retries).sum();
        Self {
            name: r.name,
            params,
            samples: r.points,
            max_residual: None,
            median_residual: None,
            tolerance: None,
            retries,
            verdict: r.verdict,
            error: None,
        }
    }
}

impl CheckRecord {
    /// A check that could not be evaluated (sampler exhausted, overflow, ...).
    pub fn errored(name: &str, params: BTreeMap<String, Value>, err: &Error) -> Self {
        Self {
            name: name.into(),
            params,
            samples: 0,
            max_residual: None,
            median_residual: None,
            tolerance: None,
            retries: 0,
            verdict: Verdict::Fail,
            error: Some(err.to_string()),
        }
    }

    fn sort_key(&self) -> (String, String) {
        (self.name.clone(), serde_json::to_string(&self.params).unwrap_or_default())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub library: String,
    pub version: String,
    pub variant: VariantKind,
    pub seed: u64,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: &SuiteConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by_key(|c| c.sort_key());
        let count = |v: Verdict| checks.iter().filter(|c| c.verdict == v).count();
        let summary = Summary {
            total: checks.len(),
            passed: count(Verdict::Pass),
            failed: count(Verdict::Fail),
            inconclusive: count(Verdict::Inconclusive),
        };
        Self {
            library: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            variant: config.variant,
            seed: config.seed,
            config: config.clone(),
            checks,
            summary,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.failed > 0 {
            EXIT_FAIL
        } else if self.summary.inconclusive > 0 {
            EXIT_INCONCLUSIVE
        } else {
            EXIT_PASS
        }
    }

    /// Pretty JSON with a trailing newline. Maps are ordered, so equal reports
    /// serialize to equal bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is serializable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}  variant={}  seed={}  samples={}  tol={:e}",
            self.library,
            self.version,
            self.variant.name(),
            self.seed,
            self.config.samples,
            self.config.tolerance
        );
        for c in &self.checks {
            let res = match (c.max_residual, &c.error) {
                (_, Some(e)) => format!("error: {e}"),
                (Some(r), None) => format!("{r:.2e}"),
                (None, None) => "-".into(),
            };
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Inconclusive => "INCONCLUSIVE",
            };
            let _ = writeln!(out, "{verdict:<12} {:<22} {res:<10} {}", c.name, params.join(" "));
        }
        let s = self.summary;
        let _ = writeln!(
            out,
            "{} checks: {} passed, {} failed, {} inconclusive",
            s.total, s.passed, s.failed, s.inconclusive
        );
        out
    }
}
