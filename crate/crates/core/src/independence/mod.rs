//! Numeric rank of the coefficient matrices `(C^λ_{μ,ν})` of the monomials
//! `H^λ = (H^{(1)})^{λ_1} ⋯ (H^{(m+r)})^{λ_{m+r}}`, and the `κ = δ` factorization.
//!
//! The monomials with `‖λ‖ = λ_1 + 2λ_2 + ⋯ = N` are linearly independent iff the
//! matrix with rows `λ` and columns `(μ, ν)`, `|μ| + |ν| = N`, has full row
//! rank as a matrix of meromorphic functions. We certify that by evaluating
//! at a few random points, stacking the evaluations as extra columns.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::subsets;
use crate::operators::{build_h, build_monomial, compositions, slot_steps, Family};
use crate::shiftalg::{coefficient, equal_at, FormalOperator, PointSampler, ResidualReport, SamplerConfig, ShiftKey, Verdict};
use crate::specialfn::ModelParams;

/// Default relative singular-value cutoff.
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-10;
/// Retained/discarded singular values closer than this ratio make the rank ambiguous.
pub const MIN_GAP: f64 = 1e3;
/// Points stacked per coefficient matrix.
pub const DEFAULT_POINTS: usize = 3;

/// All `λ ∈ ℤ_{≥0}^{parts}` with `Σ_j j·λ_j = total`, lexicographic.
pub fn weighted_partitions(parts: usize, total: u32) -> Vec<Vec<u32>> {
    fn go(j: usize, parts: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if j == parts {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = j as u32 + 1;
        for c in 0..=left / w {
            cur.push(c);
            go(j + 1, parts, left - c * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, parts, total, &mut Vec::with_capacity(parts), &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct CoefficientMatrix {
    pub m: usize,
    pub r: usize,
    pub degree: u32,
    /// Row labels `λ`.
    pub rows: Vec<Vec<u32>>,
    /// Column labels `(μ, ν)` as shift keys; repeated once per point.
    pub keys: Vec<ShiftKey>,
    pub points: Vec<Vec<C64>>,
    /// `rows.len() × (keys.len() · points.len())`, point-major.
    pub entries: DMatrix<C64>,
}

impl CoefficientMatrix {
    pub fn n_rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.entries.ncols()
    }
}

/// Coefficient matrix at the given points.
pub fn coefficient_matrix(
    m: usize,
    r: usize,
    degree: u32,
    points: &[Vec<C64>],
    params: &ModelParams,
) -> Result<CoefficientMatrix> {
    if degree == 0 {
        return Err(Error::Domain("coefficient matrix needs N ≥ 1".into()));
    }
    params.require_generic(m + r)?;
    let rows = weighted_partitions(m + r, degree);
    let keys: Vec<ShiftKey> = compositions(m + r, degree)
        .into_iter()
        .map(|c| ShiftKey(c.into_iter().map(|v| v as i32).collect()))
        .collect();
    let ops: Vec<FormalOperator> = rows
        .par_iter()
        .map(|lambda| build_monomial(lambda, Family::H, m, r, params))
        .collect::<Result<_>>()?;
    let ncols = keys.len() * points.len();
    let mut entries = DMatrix::<C64>::zeros(rows.len(), ncols);
    for (i, op) in ops.iter().enumerate() {
        for (p, pt) in points.iter().enumerate() {
            let coeffs = op.coefficients_at(pt)?;
            for (c, key) in keys.iter().enumerate() {
                let v = coeffs.get(key).copied().unwrap_or_default();
                if !v.is_finite() {
                    return Err(Error::NonFinite("coefficient matrix entry"));
                }
                entries[(i, p * keys.len() + c)] = v;
            }
        }
    }
    Ok(CoefficientMatrix {
        m,
        r,
        degree,
        rows,
        keys,
        points: points.to_vec(),
        entries,
    })
}

/// Coefficient matrix at `n_points` random points, redrawing a point whose
/// evaluation hits a pole. Returns the matrix and the number of redraws.
pub fn sample_coefficient_matrix(
    m: usize,
    r: usize,
    degree: u32,
    n_points: usize,
    params: &ModelParams,
    cfg: &SamplerConfig,
) -> Result<(CoefficientMatrix, usize)> {
    let mut samplers: Vec<PointSampler> = (0..n_points).map(|i| PointSampler::new(cfg, i as u64)).collect();
    let mut points: Vec<Vec<C64>> = samplers.iter_mut().map(|s| s.point(m + r)).collect();
    let mut retries = 0;
    loop {
        match coefficient_matrix(m, r, degree, &points, params) {
            Ok(mat) => return Ok((mat, retries)),
            Err(Error::Pole { .. }) | Err(Error::NonFinite(_)) if retries < cfg.max_retries => {
                retries += 1;
                for (s, pt) in samplers.iter_mut().zip(points.iter_mut()) {
                    *pt = s.point(m + r);
                }
            }
            Err(Error::Pole { .. }) | Err(Error::NonFinite(_)) => return Err(Error::SamplerExhausted(cfg.max_retries)),
            Err(e) => return Err(e),
        }
    }
}

/// Result of a singular-value rank determination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    /// Singular values of the equilibrated matrix, descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Smallest retained over largest discarded singular value. When nothing
    /// is discarded the cutoff `threshold · σ_1` stands in for the latter.
    pub gap: f64,
    /// `Pass` for full row rank, `Fail` for a clear deficit, `Inconclusive`
    /// when the gap is below [`MIN_GAP`].
    pub verdict: Verdict,
}

/// Rank by singular-value thresholding after scaling rows, then columns, to
/// unit norm. Scaling by invertible diagonals does not change the rank but
/// removes the huge spread in coefficient magnitudes.
pub fn numeric_rank(matrix: &DMatrix<C64>, threshold: f64) -> RankCertificate {
    let (rows, cols) = matrix.shape();
    let mut a = matrix.clone();
    for mut row in a.row_iter_mut() {
        let n = row.norm();
        if n > 0.0 {
            row /= C64::new(n, 0.0);
        }
    }
    for mut col in a.column_iter_mut() {
        let n = col.norm();
        if n > 0.0 {
            col /= C64::new(n, 0.0);
        }
    }
    let mut sv: Vec<f64> = if rows == 0 || cols == 0 {
        Vec::new()
    } else {
        a.singular_values().iter().copied().collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    let cutoff = sv.first().copied().unwrap_or(0.0) * threshold;
    let rank = sv.iter().take_while(|&&s| s > cutoff && s > 0.0).count();
    let gap = match (rank.checked_sub(1).map(|i| sv[i]), sv.get(rank)) {
        (Some(kept), Some(&dropped)) if dropped > 0.0 => kept / dropped,
        (Some(_), Some(_)) => f64::INFINITY,
        (Some(kept), None) => kept / cutoff,
        (None, _) => 0.0,
    };
    let verdict = if gap < MIN_GAP {
        Verdict::Inconclusive
    } else if rank == rows {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    RankCertificate {
        rows,
        cols,
        rank,
        singular_values: sv,
        threshold,
        gap,
        verdict,
    }
}

/// One degree at one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeRank {
    pub degree: u32,
    pub seed: u64,
    pub retries: usize,
    pub certificate: RankCertificate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub name: String,
    pub m: usize,
    pub r: usize,
    pub n_max: u32,
    pub points: usize,
    pub seeds: Vec<u64>,
    pub degrees: Vec<DegreeRank>,
    /// Every degree has the same rank under every seed.
    pub stable: bool,
    pub verdict: Verdict,
}

impl IndependenceReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Full-rank certification for `1 ≤ N ≤ n_max` at `n_seeds` consecutive seeds
/// starting from `cfg.seed`.
pub fn check_independence(
    m: usize,
    r: usize,
    n_max: u32,
    n_seeds: usize,
    params: &ModelParams,
    cfg: &SamplerConfig,
) -> Result<IndependenceReport> {
    let seeds: Vec<u64> = (0..n_seeds as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
    let mut degrees = Vec::new();
    for degree in 1..=n_max {
        for &seed in &seeds {
            let cfg = cfg.with_seed(seed);
            let (mat, retries) = sample_coefficient_matrix(m, r, degree, DEFAULT_POINTS, params, &cfg)?;
            degrees.push(DegreeRank {
                degree,
                seed,
                retries,
                certificate: numeric_rank(&mat.entries, DEFAULT_RANK_THRESHOLD),
            });
        }
    }
    let stable = (1..=n_max).all(|d| {
        let mut ranks = degrees.iter().filter(|g| g.degree == d).map(|g| g.certificate.rank);
        let first = ranks.next();
        ranks.all(|x| Some(x) == first)
    });
    let worst = |v: Verdict| degrees.iter().any(|g| g.certificate.verdict == v);
    let verdict = if worst(Verdict::Fail) || !stable {
        Verdict::Fail
    } else if worst(Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(IndependenceReport {
        name: "independence".into(),
        m,
        r,
        n_max,
        points: DEFAULT_POINTS,
        seeds,
        degrees,
        stable,
        verdict,
    })
}

/// `F(x;y) = ∏_{i<j}[x_i−x_j] ∏_{i<j}[y_i−y_j] / ∏_{i,j}[x_i−y_j−δ]`.
pub fn lemma_f(x: &[C64], y: &[C64], params: &ModelParams) -> C64 {
    let b = |z: C64| params.bracket(z);
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            num *= b(x[i] - x[j]);
        }
        for yj in y {
            den *= b(x[i] - yj - params.delta);
        }
    }
    for i in 0..y.len() {
        for j in i + 1..y.len() {
            num *= b(y[i] - y[j]);
        }
    }
    num / den
}

/// `Σ_{|μ|+|I|=k} (−1)^{|I|} T_x^{δμ} T_y^{−δI}` as an operator with constant coefficients.
pub fn free_shift_sum(m: usize, r: usize, k: u32, delta: C64) -> FormalOperator {
    let steps = slot_steps_for(m, r, delta);
    let mut op = FormalOperator::zero(m, steps);
    for size in 0..=(k as usize).min(r) {
        let sign = if size % 2 == 1 { -1.0 } else { 1.0 };
        for mu in compositions(m, k - size as u32) {
            for subset in subsets(r, Some(size)) {
                let mut key: Vec<i32> = mu.iter().map(|&v| v as i32).collect();
                key.extend(subset.iter().map(|&inside| inside as i32));
                op.push_term(ShiftKey(key), coefficient(move |_| Ok(C64::new(sign, 0.0))));
            }
        }
    }
    op
}

fn slot_steps_for(m: usize, r: usize, delta: C64) -> Vec<C64> {
    let mut s = vec![delta; m];
    s.extend(std::iter::repeat_n(-delta, r));
    s
}

/// `F⁻¹ ∘ (free shift sum) ∘ F` against `H^{(k)}` at `κ = δ`, for `0 ≤ k ≤ k_max`.
pub fn kappa_eq_delta_suite(
    m: usize,
    r: usize,
    k_max: u32,
    params: &ModelParams,
    cfg: &SamplerConfig,
) -> Result<ResidualReport> {
    let p = params.with_steps(params.delta, params.delta);
    let f = coefficient(move |v: &[C64]| Ok(lemma_f(&v[..m], &v[m..], &p)));
    let mut parts = Vec::new();
    for k in 0..=k_max {
        let h = build_h(m, r, k, &p)?;
        debug_assert_eq!(h.steps(), slot_steps(m, r, &p).as_slice());
        let rhs = free_shift_sum(m, r, k, p.delta).conjugated(Arc::clone(&f));
        parts.push(equal_at("kappa_eq_delta", &h, &rhs, cfg)?);
    }
    Ok(ResidualReport::merge("kappa_eq_delta", cfg, &parts)
        .with_param("m", m)
        .with_param("r", r)
        .with_param("k_max", k_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_partition_counts() {
        assert_eq!(weighted_partitions(3, 3).len(), 3);
        assert_eq!(weighted_partitions(2, 2), vec![vec![0, 1], vec![2, 0]]);
        assert_eq!(weighted_partitions(1, 4), vec![vec![4]]);
        for v in weighted_partitions(4, 5) {
            assert_eq!(v.iter().enumerate().map(|(j, c)| (j as u32 + 1) * c).sum::<u32>(), 5);
        }
    }

    #[test]
    fn rank_of_identity_and_outer_product() {
        let id = DMatrix::<C64>::identity(4, 4);
        let c = numeric_rank(&id, DEFAULT_RANK_THRESHOLD);
        assert_eq!((c.rank, c.verdict), (4, Verdict::Pass));

        let u = DMatrix::from_fn(3, 1, |i, _| C64::new(1.0 + i as f64, 0.5));
        let v = DMatrix::from_fn(1, 5, |_, j| C64::new(0.3, j as f64 - 1.0));
        let c = numeric_rank(&(u * v), DEFAULT_RANK_THRESHOLD);
        assert_eq!((c.rank, c.verdict), (1, Verdict::Fail));
    }

    #[test]
    fn near_degenerate_is_inconclusive() {
        // rescaling rows and columns cannot separate two nearly parallel rows
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0 + 1e-9, 0.0)],
        );
        let c = numeric_rank(&m, DEFAULT_RANK_THRESHOLD);
        assert_eq!(c.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn free_shift_sum_size() {
        // h_i(ξ) e_j(η) terms: compositions × subsets
        let op = free_shift_sum(2, 2, 2, C64::new(0.1, 0.2));
        assert_eq!(op.term_count(), 3 + 2 * 2 + 1);
    }
}
