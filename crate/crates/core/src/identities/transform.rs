//! Transformation formulas: the `S_k` symmetry, `T_k`, the `r = 0` case of
//! `T_k`, and the balanced transformation with free parameters `a`.

use num_complex::Complex64 as C64;

use super::{sign, Eval};
use crate::error::{Error, Result};
use crate::operators::{compositions, index_pairs};
use crate::shiftalg::{relative_residual, sample_residuals, ResidualReport, SamplerConfig};
use crate::specialfn::ModelParams;

/// `S_k(x; y)` for the multi-index `λ`, summing over `0 ≤ μ ≤ λ`.
pub fn csp_s(lambda: &[u32], x: &[C64], y: &[C64], k: u32, params: &ModelParams) -> Result<C64> {
    let ev = Eval::new(params);
    let (d, kk) = (params.delta, params.kappa);
    let m = x.len();
    let r = y.len();
    let mut total = C64::new(0.0, 0.0);
    for (mu, set) in index_pairs(m, r, k) {
        if mu.iter().zip(lambda).any(|(a, b)| a > b) {
            continue;
        }
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        let mut acc = C64::new(1.0, 0.0);
        for i in (0..r).filter(|&i| set[i]) {
            for j in (0..r).filter(|&j| !set[j]) {
                let e = y[i] - y[j];
                num *= ev.b(e - d) * ev.b(e + d - kk);
                den *= ev.bd(e) * ev.bd(e - kk);
            }
        }
        for i in 0..m {
            let mi = mu[i] as i64;
            for j in 0..m {
                let e = x[i] - x[j];
                let mj = mu[j] as i64;
                let lj = lambda[j] as f64;
                acc *= ev.fact(e + d, mi - mj)?;
                acc *= ev.div(C64::new(1.0, 0.0), ev.fact_d(e + kk, mi - mj)?, "csp x-factorial")?;
                num *= ev.fact(e + kk, mi)? * ev.fact(e - d * lj, mi)?;
                den *= ev.fact_d(e + d, mi)? * ev.fact_d(e - d * (lj - 1.0) - kk, mi)?;
            }
            let li = lambda[i] as f64;
            let mf = mi as f64;
            for j in 0..r {
                let e = x[i] - y[j];
                if set[j] {
                    num *= ev.b(e + d * li) * ev.b(e + d * (mf - 1.0) + kk);
                    den *= ev.bd(e + d * mf) * ev.bd(e + d * (li - 1.0) + kk);
                } else {
                    num *= ev.b(e - d) * ev.b(e + d * mf - kk);
                    den *= ev.bd(e - kk) * ev.bd(e + d * (mf - 1.0));
                }
            }
        }
        total += acc * ev.div(num, den, "csp")?;
    }
    Ok(total)
}

/// Residual of `S_k = S_{|λ|+r-k}` at random `(x, y)`.
pub fn check_csp(lambda: &[u32], r: usize, k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let m = lambda.len();
    let total = lambda.iter().sum::<u32>() + r as u32;
    let rep = sample_residuals("csp", cfg, m + r, |v| {
        let (x, y) = v.split_at(m);
        let lhs = csp_s(lambda, x, y, k, params)?;
        let rhs = if k > total {
            C64::new(0.0, 0.0)
        } else {
            csp_s(lambda, x, y, total - k, params)?
        };
        Ok(relative_residual(lhs, rhs))
    })?;
    Ok(rep.with_param("lambda", lambda).with_param("r", r).with_param("k", k))
}

/// `T_k(x; y; z)`.
pub fn tt_t(x: &[C64], y: &[C64], z: &[C64], k: u32, params: &ModelParams) -> Result<C64> {
    let ev = Eval::new(params);
    let (d, kk) = (params.delta, params.kappa);
    let m = x.len();
    let r = y.len();
    let mut total = C64::new(0.0, 0.0);
    for (mu, set) in index_pairs(m, r, k) {
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        let mut acc = C64::new(1.0, 0.0);
        for i in (0..r).filter(|&i| set[i]) {
            for j in (0..r).filter(|&j| !set[j]) {
                let e = y[i] - y[j];
                num *= ev.b(e - d) * ev.b(e + d - kk);
                den *= ev.bd(e) * ev.bd(e - kk);
            }
        }
        for i in 0..m {
            let mi = mu[i] as i64;
            let mf = mi as f64;
            for j in 0..m {
                let e = x[i] - x[j];
                let mj = mu[j] as i64;
                acc *= ev.fact(e + d, mi - mj)?;
                acc *= ev.div(C64::new(1.0, 0.0), ev.fact_d(e + kk, mi - mj)?, "tt x-factorial")?;
                num *= ev.fact(e + kk, mi)? * ev.fact(x[i] + z[j], mi)?;
                den *= ev.fact_d(e + d, mi)? * ev.fact_d(x[i] + z[j] + d - kk, mi)?;
            }
            for j in 0..r {
                let e = x[i] - y[j];
                if set[j] {
                    num *= ev.b(z[i] + y[j]) * ev.b(e + d * (mf - 1.0) + kk);
                    den *= ev.bd(z[i] + y[j] + d - kk) * ev.bd(e + d * mf);
                } else {
                    num *= ev.b(e - d) * ev.b(e + d * mf - kk);
                    den *= ev.bd(e - kk) * ev.bd(e + d * (mf - 1.0));
                }
            }
        }
        total += acc * ev.div(num, den, "tt")?;
    }
    Ok(total)
}

/// Residual of `T_k(x; y; z) = T_k(z; ŷ; x)` with `ŷ = -y - δ`, for unrestricted `z`.
pub fn check_tt(m: usize, r: usize, k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("tt_lsl", cfg, 2 * m + r, |v| {
        let (x, rest) = v.split_at(m);
        let (y, z) = rest.split_at(r);
        let yh: Vec<C64> = y.iter().map(|v| -v - params.delta).collect();
        let lhs = tt_t(x, y, z, k, params)?;
        let rhs = tt_t(z, &yh, x, k, params)?;
        Ok(relative_residual(lhs, rhs))
    })?;
    Ok(rep.with_param("m", m).with_param("r", r).with_param("k", k))
}

fn lss_sum(ev: &Eval, x: &[C64], z: &[C64], k: u32) -> Result<C64> {
    let (d, kk) = (ev.p.delta, ev.p.kappa);
    let m = x.len();
    let mut total = C64::new(0.0, 0.0);
    for mu in compositions(m, k) {
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        for i in 0..m {
            let mi = mu[i] as i64;
            for j in 0..m {
                let e = x[i] - x[j];
                let dm = mi - mu[j] as i64;
                num *= ev.fact(e + d, dm)? * ev.fact(e + kk, mi)? * ev.fact(x[i] + z[j], mi)?;
                den *= ev.fact_d(e + kk, dm)? * ev.fact_d(e + d, mi)? * ev.fact_d(x[i] + z[j] + d - kk, mi)?;
            }
        }
        total += ev.div(num, den, "lss")?;
    }
    Ok(total)
}

/// Both sides of the `x ↔ z` symmetric transformation.
pub fn lss_sides(x: &[C64], z: &[C64], k: u32, params: &ModelParams) -> Result<(C64, C64)> {
    let ev = Eval::new(params);
    Ok((lss_sum(&ev, x, z, k)?, lss_sum(&ev, z, x, k)?))
}

pub fn check_lss(m: usize, k: u32, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("lss", cfg, 2 * m, |v| {
        let (l, r) = lss_sides(&v[..m], &v[m..], k, params)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("m", m).with_param("k", k))
}

/// Completes `a` (length `m + n - 1`) so that `|x| + |a| + sδ = |X| + rδ`.
pub fn solve_balancing(x: &[C64], big_x: &[C64], a_free: &[C64], r: usize, s: usize, delta: C64) -> C64 {
    let sx: C64 = x.iter().sum();
    let sbx: C64 = big_x.iter().sum();
    let sa: C64 = a_free.iter().sum();
    sbx + delta * r as f64 - sx - sa - delta * s as f64
}

/// One side of the balanced transformation, written for `(x; y)` against `(X; Y)`
/// with parameters `a` entering as `[x_i + a_j]` (`flip = 1`) or `[X_i - a_j]` (`flip = -1`).
/// `xa[i][j]` is the precomputed argument `x_i + flip·a_j`.
/// Returns the sum and the sum of the absolute values of its terms.
#[allow(clippy::too_many_arguments)]
fn ktp_sum(
    ev: &Eval,
    x: &[C64],
    y: &[C64],
    bx: &[C64],
    by: &[C64],
    a: &[C64],
    xa: &[Vec<C64>],
    flip: f64,
    k: u32,
) -> Result<(C64, f64)> {
    let d = ev.p.delta;
    let m = x.len();
    let r = y.len();
    let mut total = C64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (mu, set) in index_pairs(m, r, k) {
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        for i in 0..m {
            for j in i + 1..m {
                num *= ev.b(x[i] - x[j] + d * (mu[i] as f64 - mu[j] as f64));
                den *= ev.bd(x[i] - x[j]);
            }
        }
        for i in (0..r).filter(|&i| set[i]) {
            for j in (0..r).filter(|&j| !set[j]) {
                num *= ev.b(y[i] - y[j] - d);
                den *= ev.bd(y[i] - y[j]);
            }
        }
        for i in 0..m {
            let mi = mu[i] as i64;
            let mf = mi as f64;
            for j in (0..r).filter(|&j| !set[j]) {
                num *= ev.b(x[i] - y[j] - d);
                den *= ev.bd(x[i] - y[j] + d * (mf - 1.0));
            }
            for &arg in &xa[i] {
                num *= ev.fact(arg, mi)?;
            }
            for xj in x {
                den *= ev.fact_d(x[i] - xj + d, mi)?;
            }
            for bj in bx {
                den *= ev.fact_d(x[i] + bj, mi)?;
            }
            for bj in by {
                num *= ev.b(x[i] + bj + d * mf);
                den *= ev.bd(x[i] + bj);
            }
        }
        for i in (0..r).filter(|&i| set[i]) {
            for aj in a {
                num *= ev.b(y[i] + aj * flip);
            }
            for j in 0..m {
                den *= ev.bd(y[i] - x[j] - d * mu[j] as f64);
            }
            for bj in bx {
                den *= ev.bd(y[i] + bj);
            }
            for bj in by {
                num *= ev.b(y[i] + bj + d);
                den *= ev.bd(y[i] + bj);
            }
        }
        let size = set.iter().filter(|&&s| s).count();
        let term = ev.div(num, den, "ktp")? * sign(size % 2 == 1);
        total += term;
        scale += term.norm();
    }
    Ok((total, scale))
}

/// Both sides of the balanced transformation. Fails with a balancing error if
/// `|x| + |a| + sδ ≠ |X| + rδ` beyond `1e-12`.
pub fn ktp_sides(
    x: &[C64],
    y: &[C64],
    bx: &[C64],
    by: &[C64],
    a: &[C64],
    k: u32,
    params: &ModelParams,
) -> Result<(C64, C64)> {
    let ((l, _), (r, _)) = ktp_sides_with_scale(x, y, bx, by, a, k, params)?;
    Ok((l, r))
}

/// As [`ktp_sides`], with each side paired with the sum of its terms' magnitudes.
pub fn ktp_sides_with_scale(
    x: &[C64],
    y: &[C64],
    bx: &[C64],
    by: &[C64],
    a: &[C64],
    k: u32,
    params: &ModelParams,
) -> Result<((C64, f64), (C64, f64))> {
    let (m, n) = (x.len(), bx.len());
    if a.len() != m + n {
        return Err(Error::ArityMismatch(format!("{} parameters a for m + n = {}", a.len(), m + n)));
    }
    let d = params.delta;
    let lhs_sum: C64 = x.iter().chain(a).sum::<C64>() + d * by.len() as f64;
    let rhs_sum: C64 = bx.iter().sum::<C64>() + d * y.len() as f64;
    let gap = (lhs_sum - rhs_sum).norm();
    if gap > 1e-12 * (1.0 + lhs_sum.norm()) {
        return Err(Error::Balancing(gap));
    }
    let args = |u: &[C64], flip: f64| -> Vec<Vec<C64>> {
        u.iter().map(|&ui| a.iter().map(|&aj| ui + aj * flip).collect()).collect()
    };
    ktp_eval(x, y, bx, by, a, &args(x, 1.0), &args(bx, -1.0), k, params)
}

#[allow(clippy::too_many_arguments)]
fn ktp_eval(
    x: &[C64],
    y: &[C64],
    bx: &[C64],
    by: &[C64],
    a: &[C64],
    xa: &[Vec<C64>],
    bxa: &[Vec<C64>],
    k: u32,
    params: &ModelParams,
) -> Result<((C64, f64), (C64, f64))> {
    let ev = Eval::new(params);
    Ok((
        ktp_sum(&ev, x, y, bx, by, a, xa, 1.0, k)?,
        ktp_sum(&ev, bx, by, x, y, a, bxa, -1.0, k)?,
    ))
}

/// Both sides with the last parameter solved from the balancing condition.
/// The arguments `x_i + a_last` and `X_i - a_last` are formed without adding
/// and subtracting `x_i` (resp. `X_i`), so a factor that vanishes exactly,
/// such as `[x_i + a_last + lδ]` with `x_i + a_last = -lδ`, evaluates to zero
/// instead of to a rounding error times the remaining factors.
fn ktp_sides_balanced(
    x: &[C64],
    y: &[C64],
    bx: &[C64],
    by: &[C64],
    a_free: &[C64],
    k: u32,
    params: &ModelParams,
) -> Result<((C64, f64), (C64, f64))> {
    let d = params.delta;
    let (r, s) = (y.len() as f64, by.len() as f64);
    let sum = |v: &[C64]| v.iter().sum::<C64>();
    let sum_but = |v: &[C64], i: usize| v.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, &u)| u).sum::<C64>();
    let shift = d * (r - s);
    let (sx, sbx, sa) = (sum(x), sum(bx), sum(a_free));
    let mut a = a_free.to_vec();
    a.push(solve_balancing(x, bx, a_free, y.len(), by.len(), d));
    let xa: Vec<Vec<C64>> = (0..x.len())
        .map(|i| {
            let mut row: Vec<C64> = a_free.iter().map(|&aj| x[i] + aj).collect();
            row.push(sbx + shift - sum_but(x, i) - sa);
            row
        })
        .collect();
    let bxa: Vec<Vec<C64>> = (0..bx.len())
        .map(|i| {
            let mut row: Vec<C64> = a_free.iter().map(|&aj| bx[i] - aj).collect();
            row.push(sx + sa - sum_but(bx, i) - shift);
            row
        })
        .collect();
    ktp_eval(x, y, bx, by, &a, &xa, &bxa, k, params)
}

/// Residual of the balanced transformation with random `x, y, X, Y` and random
/// free `a_1..a_{m+n-1}`; the last parameter is solved from the balancing condition.
///
/// The difference of the two sides is divided by the summed term magnitudes
/// plus one. When one side is an empty sum the other is a sum of terms that
/// cancel to zero, and near zeros of the elliptic bracket those terms get large.
/// The plain relative residual is kept as `plain_max_residual`.
pub fn check_ktp(
    (m, r, n, s): (usize, usize, usize, usize),
    k: u32,
    params: &ModelParams,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    if m + n == 0 {
        return Err(Error::Config("the balanced transformation needs m + n ≥ 1".into()));
    }
    let dim = m + r + n + s + m + n - 1;
    let sides = |v: &[C64]| {
        let (x, rest) = v.split_at(m);
        let (y, rest) = rest.split_at(r);
        let (bx, rest) = rest.split_at(n);
        let (by, a_free) = rest.split_at(s);
        ktp_sides_balanced(x, y, bx, by, a_free, k, params)
    };
    let plain = sample_residuals("ktp", cfg, dim, |v| {
        let ((l, _), (rr, _)) = sides(v)?;
        Ok(relative_residual(l, rr))
    })?;
    let rep = sample_residuals("ktp", cfg, dim, |v| {
        let ((l, sl), (rr, sr)) = sides(v)?;
        Ok((l - rr).norm() / (sl + sr + 1.0))
    })?;
    Ok(rep
        .with_param("shape", [m, r, n, s])
        .with_param("k", k)
        .with_param("plain_max_residual", plain.max_residual))
}
