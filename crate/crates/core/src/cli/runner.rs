use std::collections::BTreeMap;

use clap::ValueEnum;
use serde_json::{json, Value};

use super::{CheckRecord, Report, SuiteConfig};
use crate::error::{Error, Result};
use crate::identities::{self as ids, IdentityName, KernelShape};
use crate::independence::{check_independence, kappa_eq_delta_suite};
use crate::operators::{bold_supported, build, Family};
use crate::physics::{check_delta_gauge, check_gauge_identification, poincare_parts};
use crate::shiftalg::{compose, equal_at, ResidualReport, SamplerConfig};
use crate::specialfn::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Commutativity,
    Wronski,
    Kernel,
    Sources,
    Transforms,
    Independence,
    Poincare,
}

impl Suite {
    /// Case-insensitive lookup by the command-line name.
    pub fn parse(name: &str) -> Option<Suite> {
        <Suite as ValueEnum>::from_str(name, true).ok()
    }

    const GROUPS: [Suite; 7] = [
        Suite::Commutativity,
        Suite::Wronski,
        Suite::Kernel,
        Suite::Sources,
        Suite::Transforms,
        Suite::Independence,
        Suite::Poincare,
    ];
}

/// Errors that mean the run itself is misconfigured, as opposed to a check
/// that merely could not be evaluated at the sampled points.
fn is_fatal(e: &Error) -> bool {
    !matches!(e, Error::Pole { .. } | Error::SamplerExhausted(_) | Error::NonFinite(_))
}

struct Ctx {
    params: ModelParams,
    cfg: SamplerConfig,
    out: Vec<CheckRecord>,
}

impl Ctx {
    fn push(&mut self, name: &str, params: Value, r: Result<ResidualReport>) -> Result<()> {
        match r {
            Ok(rep) => self.out.push(rep.into()),
            Err(e) if !is_fatal(&e) => {
                let params: BTreeMap<String, Value> = match params {
                    Value::Object(m) => m.into_iter().collect(),
                    _ => BTreeMap::new(),
                };
                self.out.push(CheckRecord::errored(name, params, &e));
            }
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

/// Runs one group of checks, or all of them.
pub fn run_suite(config: &SuiteConfig, suite: Suite) -> Result<Report> {
    config.validate()?;
    let mut ctx = Ctx {
        params: config.params()?,
        cfg: config.sampler(),
        out: Vec::new(),
    };
    let groups: Vec<Suite> = match suite {
        Suite::All => Suite::GROUPS.to_vec(),
        s => vec![s],
    };
    for g in groups {
        match g {
            Suite::Commutativity => commutativity(config, &mut ctx)?,
            Suite::Wronski => wronski(config, &mut ctx)?,
            Suite::Kernel => kernel(config, &mut ctx)?,
            Suite::Sources => sources(config, &mut ctx)?,
            Suite::Transforms => transforms(config, &mut ctx)?,
            Suite::Independence => independence(config, &mut ctx)?,
            Suite::Poincare => poincare(config, &mut ctx)?,
            Suite::All => unreachable!(),
        }
    }
    Ok(Report::new(config, ctx.out))
}

/// Runs a single identity at order `k` (default `k_max`).
pub fn run_identity(config: &SuiteConfig, id: IdentityName, k: Option<u32>) -> Result<Report> {
    config.validate()?;
    let mut ctx = Ctx {
        params: config.params()?,
        cfg: config.sampler(),
        out: Vec::new(),
    };
    let k = k.unwrap_or(config.k_max);
    let (m, r, n, s) = (config.m, config.r, config.n, config.s);
    let (p, cfg) = (ctx.params, ctx.cfg);
    let name = id.name();
    let base = json!({ "m": m, "r": r, "n": n, "s": s, "k": k });
    let rep = match id {
        IdentityName::Rsi => ids::check_rsi(n, k as usize, &p, &cfg),
        IdentityName::Nssi => ids::check_nssi(n, &p, &cfg),
        IdentityName::Ksni => ids::check_ksni(n, k as usize, &p, &cfg),
        IdentityName::Frobenius => ids::check_frobenius(n, &p, &cfg),
        IdentityName::Csp => ids::check_csp(&staircase(m), r, k, &p, &cfg),
        IdentityName::TtLsl => ids::check_tt(m, r, k, &p, &cfg),
        IdentityName::Lss => ids::check_lss(m, k, &p, &cfg),
        IdentityName::Ktp => ids::check_ktp((m, r, n, s), k, &p, &cfg),
        IdentityName::Wronski => ids::check_wronski(m, r, k, &p, &cfg),
        IdentityName::Determinant => {
            ctx.push(name, base.clone(), ids::check_h_via_recursion(m, r, k, &p, &cfg))?;
            ids::check_d_via_recursion(m, r, k, &p, &cfg)
        }
        IdentityName::KernelAdditive => {
            let p = balanced(config, &p)?;
            ids::check_kernel(KernelShape::new(m, r, n, s), k, &p, &cfg)
        }
        IdentityName::KernelMultiplicative => {
            let p = balanced(config, &p)?;
            ids::check_kernel_bold(KernelShape::new(m, r, n, s), k, &p, &cfg)
        }
    };
    ctx.push(name, base, rep)?;
    Ok(Report::new(config, ctx.out))
}

/// `(m, m-1, …, 1)`, the partition used for the symmetry check.
fn staircase(m: usize) -> Vec<u32> {
    (0..m).map(|i| (m - i) as u32).collect()
}

/// Parameters with `κ` replaced by the balanced value when the shapes force one.
fn balanced(config: &SuiteConfig, p: &ModelParams) -> Result<ModelParams> {
    let shape = KernelShape::new(config.m, config.r, config.n, config.s);
    Ok(match ids::balanced_kappa(shape, p.delta)? {
        Some(kappa) => p.with_steps(p.delta, kappa),
        None => *p,
    })
}

fn commutativity(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let mut ops = Vec::new();
    for family in Family::ALL {
        for k in 1..=c.k_max {
            ops.push((family, k, build(family, c.m, c.r, k, &ctx.params)?));
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let (fa, ka, a) = &ops[i];
            let (fb, kb, b) = &ops[j];
            let params = json!({ "a": format!("{}^({ka})", fa.name()), "b": format!("{}^({kb})", fb.name()), "m": c.m, "r": c.r });
            let rep = compose(a, b).and_then(|ab| {
                let ba = compose(b, a)?;
                Ok(equal_at("commutativity", &ab, &ba, &ctx.cfg)?
                    .with_param("a", format!("{}^({ka})", fa.name()))
                    .with_param("b", format!("{}^({kb})", fb.name()))
                    .with_param("m", c.m)
                    .with_param("r", c.r))
            });
            ctx.push("commutativity", params, rep)?;
        }
    }
    Ok(())
}

fn wronski(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let (p, cfg) = (ctx.params, ctx.cfg);
    for big_k in 1..=c.big_k_max {
        let params = json!({ "m": c.m, "r": c.r, "K": big_k });
        ctx.push("wronski", params, ids::check_wronski(c.m, c.r, big_k, &p, &cfg))?;
    }
    let params = json!({ "m": c.m, "r": c.r, "l_max": c.big_k_max });
    ctx.push("determinant", params.clone(), ids::check_h_via_recursion(c.m, c.r, c.big_k_max, &p, &cfg))?;
    ctx.push("determinant_inverse", params, ids::check_d_via_recursion(c.m, c.r, c.big_k_max, &p, &cfg))?;
    if bold_supported(&p) {
        for big_n in 1..=c.big_k_max {
            let params = json!({ "m": c.m, "r": c.r, "N": big_n });
            ctx.push("wronski_bold", params, ids::check_wronski_bold(c.m, c.r, big_n, &p, &cfg))?;
        }
    }
    Ok(())
}

fn kernel(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let shape = KernelShape::new(c.m, c.r, c.n, c.s);
    let p = balanced(c, &ctx.params)?;
    let cfg = ctx.cfg;
    for k in 1..=c.k_max {
        let params = json!({ "shape": [c.m, c.r, c.n, c.s], "k": k });
        ctx.push("kernel_additive", params, ids::check_kernel(shape, k, &p, &cfg))?;
    }
    if bold_supported(&p) {
        for k in 1..=c.k_max {
            let params = json!({ "shape": [c.m, c.r, c.n, c.s], "k": k });
            ctx.push("kernel_multiplicative", params, ids::check_kernel_bold(shape, k, &p, &cfg))?;
        }
    }
    Ok(())
}

fn sources(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let (p, cfg, n) = (ctx.params, ctx.cfg, c.n);
    for k in 0..=n {
        ctx.push("rsi", json!({ "n": n, "k": k }), ids::check_rsi(n, k, &p, &cfg))?;
        ctx.push("ksni", json!({ "n": n, "k": k }), ids::check_ksni(n, k, &p, &cfg))?;
    }
    ctx.push("nssi", json!({ "n": n }), ids::check_nssi(n, &p, &cfg))?;
    ctx.push("frobenius", json!({ "n": n }), ids::check_frobenius(n, &p, &cfg))?;
    Ok(())
}

fn transforms(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let (p, cfg) = (ctx.params, ctx.cfg);
    for k in 1..=c.k_max {
        let params = json!({ "m": c.m, "r": c.r, "k": k });
        ctx.push("csp", params.clone(), ids::check_csp(&staircase(c.m), c.r, k, &p, &cfg))?;
        ctx.push("tt_lsl", params, ids::check_tt(c.m, c.r, k, &p, &cfg))?;
        ctx.push("lss", json!({ "m": c.m, "k": k }), ids::check_lss(c.m, k, &p, &cfg))?;
        let params = json!({ "shape": [c.m, c.r, c.n, c.s], "k": k });
        ctx.push("ktp", params, ids::check_ktp((c.m, c.r, c.n, c.s), k, &p, &cfg))?;
    }
    Ok(())
}

fn independence(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let (p, cfg) = (ctx.params, ctx.cfg);
    match check_independence(c.m, c.r, c.n_max, c.rank_seeds, &p, &cfg) {
        Ok(rep) => ctx.out.push(rep.into()),
        Err(e) if !is_fatal(&e) => {
            let params = [("m".to_string(), json!(c.m)), ("r".to_string(), json!(c.r))].into();
            ctx.out.push(CheckRecord::errored("independence", params, &e));
        }
        Err(e) => return Err(e),
    }
    let params = json!({ "m": c.m, "r": c.r, "k_max": c.k_max });
    ctx.push("kappa_eq_delta", params, kappa_eq_delta_suite(c.m, c.r, c.k_max, &p, &cfg))
}

fn poincare(c: &SuiteConfig, ctx: &mut Ctx) -> Result<()> {
    let (p, cfg) = (ctx.params, ctx.cfg);
    let params = json!({ "m": c.m, "r": c.r });
    match poincare_parts(c.m, c.r, &p, &cfg) {
        Ok(parts) => ctx.out.extend(parts.into_iter().map(CheckRecord::from)),
        Err(e) => ctx.push("poincare", params.clone(), Err(e))?,
    }
    ctx.push("gauge", params.clone(), check_gauge_identification(c.m, c.r, &p, &cfg))?;
    ctx.push("delta_gauge", params, check_delta_gauge(c.m, c.r, &p, &cfg))
}
