//! Source identities and the Frobenius determinant.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{sign, subsets, Eval};
use crate::error::Result;
use crate::shiftalg::{relative_residual, sample_residuals, ResidualReport, SamplerConfig};
use crate::specialfn::ModelParams;

fn rsi_sum(ev: &Eval, z: &[C64], a: C64, b: C64, size: usize) -> Result<C64> {
    let n = z.len();
    let mut total = C64::new(0.0, 0.0);
    for set in subsets(n, Some(size)) {
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        for i in (0..n).filter(|&i| set[i]) {
            for j in (0..n).filter(|&j| !set[j]) {
                let d = z[i] - z[j];
                num *= ev.b(d - a) * ev.b(d - b);
                den *= ev.bd(d) * ev.bd(d - a - b);
            }
        }
        total += ev.div(num, den, "rsi")?;
    }
    Ok(total)
}

/// Both sides of Ruijsenaars' identity: sums over `|I| = k` and `|I| = n - k`.
pub fn rsi_sides(z: &[C64], a: C64, b: C64, k: usize, params: &ModelParams) -> Result<(C64, C64)> {
    let ev = Eval::new(params);
    let n = z.len();
    if k > n {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    Ok((rsi_sum(&ev, z, a, b, k)?, rsi_sum(&ev, z, a, b, n - k)?))
}

pub fn check_rsi(n: usize, k: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("rsi", cfg, n + 2, |v| {
        let (l, r) = rsi_sides(&v[..n], v[n], v[n + 1], k, params)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("n", n).with_param("k", k))
}

/// The individual terms of the Noumi–Sano sum, indexed by subset; they add up to zero.
pub fn nssi_terms(z: &[C64], w: &[C64], a: C64, params: &ModelParams) -> Result<Vec<C64>> {
    let ev = Eval::new(params);
    let n = z.len();
    let zw: C64 = z.iter().sum::<C64>() - w.iter().sum::<C64>();
    let mut out = Vec::with_capacity(1 << n);
    for set in subsets(n, None) {
        let size = set.iter().filter(|&&s| s).count();
        let mut num = ev.b(zw + a * size as f64);
        let mut den = ev.bd(zw);
        for i in (0..n).filter(|&i| set[i]) {
            for j in (0..n).filter(|&j| !set[j]) {
                num *= ev.b(z[i] - z[j] + a);
                den *= ev.bd(z[i] - z[j]);
            }
            for wj in w {
                num *= ev.b(z[i] - wj);
                den *= ev.bd(z[i] - wj + a);
            }
        }
        out.push(ev.div(num, den, "nssi")? * sign(size % 2 == 1));
    }
    Ok(out)
}

/// `|Σ terms| / max |term|`.
pub fn check_nssi(n: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("nssi", cfg, 2 * n + 1, |v| {
        let terms = nssi_terms(&v[..n], &v[n..2 * n], v[2 * n], params)?;
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        let s: C64 = terms.iter().sum();
        Ok(if scale == 0.0 { s.norm() } else { s.norm() / scale })
    })?;
    Ok(rep.with_param("n", n))
}

fn ksni_sum(ev: &Eval, z: &[C64], w: &[C64], a: C64, k: usize) -> Result<C64> {
    let n = z.len();
    let mut total = C64::new(0.0, 0.0);
    for set in subsets(n, Some(k)) {
        let mut num = C64::new(1.0, 0.0);
        let mut den = C64::new(1.0, 0.0);
        for i in (0..n).filter(|&i| set[i]) {
            for j in (0..n).filter(|&j| !set[j]) {
                num *= ev.b(z[i] - z[j] - a);
                den *= ev.bd(z[i] - z[j]);
            }
            for wj in w {
                num *= ev.b(z[i] + wj + a);
                den *= ev.bd(z[i] + wj);
            }
        }
        total += ev.div(num, den, "ksni")?;
    }
    Ok(total)
}

/// Both sides of the Kajihara–Noumi identity.
pub fn ksni_sides(z: &[C64], w: &[C64], a: C64, k: usize, params: &ModelParams) -> Result<(C64, C64)> {
    let ev = Eval::new(params);
    Ok((ksni_sum(&ev, z, w, a, k)?, ksni_sum(&ev, w, z, a, k)?))
}

pub fn check_ksni(n: usize, k: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("ksni", cfg, 2 * n + 1, |v| {
        let (l, r) = ksni_sides(&v[..n], &v[n..2 * n], v[2 * n], k, params)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("n", n).with_param("k", k))
}

/// `det([λ+z_i+w_j] / ([λ][z_i+w_j]))` and the closed product.
pub fn frobenius_sides(lambda: C64, z: &[C64], w: &[C64], params: &ModelParams) -> Result<(C64, C64)> {
    let ev = Eval::new(params);
    let n = z.len();
    let bl = ev.b(lambda);
    let mut entries = Vec::with_capacity(n * n);
    for zi in z {
        for wj in w {
            entries.push(ev.div(ev.b(lambda + zi + wj), bl * ev.b(zi + wj), "frobenius entry")?);
        }
    }
    let det = DMatrix::from_row_slice(n, n, &entries).determinant();
    let total: C64 = z.iter().chain(w).sum();
    let mut num = ev.b(lambda + total);
    let mut den = bl;
    for i in 0..n {
        for j in i + 1..n {
            num *= ev.b(z[i] - z[j]) * ev.b(w[i] - w[j]);
        }
        for wj in w {
            den *= ev.bd(z[i] + wj);
        }
    }
    Ok((det, ev.div(num, den, "frobenius product")?))
}

pub fn check_frobenius(n: usize, params: &ModelParams, cfg: &SamplerConfig) -> Result<ResidualReport> {
    let rep = sample_residuals("frobenius", cfg, 2 * n + 1, |v| {
        let (l, r) = frobenius_sides(v[2 * n], &v[..n], &v[n..2 * n], params)?;
        Ok(relative_residual(l, r))
    })?;
    Ok(rep.with_param("n", n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::VariantKind;

    #[test]
    fn rsi_degenerate_a_gives_binomial() {
        let p = ModelParams::generic(VariantKind::Elliptic);
        let z = [C64::new(0.1, 0.02), C64::new(-0.3, 0.05), C64::new(0.42, -0.04), C64::new(0.2, 0.1)];
        let (l, r) = rsi_sides(&z, C64::new(0.0, 0.0), C64::new(0.17, 0.03), 2, &p).unwrap();
        assert!((l - 6.0).norm() < 1e-12 && (r - 6.0).norm() < 1e-12);
    }

    #[test]
    fn nssi_with_zero_shift_is_alternating_binomial() {
        let p = ModelParams::generic(VariantKind::Trigonometric);
        let z = [C64::new(0.1, 0.02), C64::new(-0.3, 0.05), C64::new(0.42, -0.04)];
        let w = [C64::new(0.15, 0.0), C64::new(-0.2, 0.03), C64::new(0.05, -0.01)];
        let t = nssi_terms(&z, &w, C64::new(0.0, 0.0), &p).unwrap();
        assert_eq!(t.len(), 8);
        for (mask, term) in t.iter().enumerate() {
            let s = if (mask as u32).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            assert!((term - s).norm() < 1e-13);
        }
    }

    #[test]
    fn frobenius_two_by_two_cofactor() {
        let p = ModelParams::generic(VariantKind::Elliptic);
        let ev = Eval::new(&p);
        let l = C64::new(0.23, 0.04);
        let z = [C64::new(0.1, 0.02), C64::new(-0.3, 0.05)];
        let w = [C64::new(0.15, 0.0), C64::new(-0.2, 0.03)];
        let e = |i: usize, j: usize| ev.b(l + z[i] + w[j]) / (ev.b(l) * ev.b(z[i] + w[j]));
        let cof = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
        let (det, rhs) = frobenius_sides(l, &z, &w, &p).unwrap();
        assert!(relative_residual(det, cof) < 1e-14);
        assert!(relative_residual(det, rhs) < 1e-10);
    }
}
