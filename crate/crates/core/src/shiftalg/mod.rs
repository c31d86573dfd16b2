//! Finite sums of shift operators with function-valued coefficients.
//!
//! A term with key `k` acts as `f ↦ c(v) · f(v + k ⊙ steps)`, where `v` is the
//! flat vector of variables (x-slots first, then y-slots) and `steps` holds the
//! unit shift of each slot. Coefficients are closures; nothing is simplified
//! symbolically, so cancellations only show up numerically.

mod sampler;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use sampler::{
    equal_at, equal_at_scaled, relative_residual, sample_residuals, PointSampler, ResidualReport, SamplerConfig,
    Verdict,
};

/// Integer shift multi-index, one entry per slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ShiftKey(pub Vec<i32>);

impl ShiftKey {
    pub fn zero(n: usize) -> Self {
        ShiftKey(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|&v| v as i64).sum()
    }

    pub fn add(&self, other: &ShiftKey) -> ShiftKey {
        ShiftKey(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl fmt::Display for ShiftKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// A coefficient function of the flat variable vector.
pub type Coefficient = Arc<dyn Fn(&[C64]) -> Result<C64> + Send + Sync>;

pub fn coefficient<F>(f: F) -> Coefficient
where
    F: Fn(&[C64]) -> Result<C64> + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Finite formal sum `Σ_k c_k(v) T^k`.
#[derive(Clone)]
pub struct FormalOperator {
    n_x: usize,
    steps: Vec<C64>,
    terms: BTreeMap<ShiftKey, Vec<Coefficient>>,
    /// Set when a constructor returned the zero operator because the requested
    /// order exceeds what the family supports.
    degree_exceeded: bool,
}

impl fmt::Debug for FormalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormalOperator")
            .field("n_x", &self.n_x)
            .field("steps", &self.steps)
            .field("keys", &self.terms.keys().collect::<Vec<_>>())
            .field("degree_exceeded", &self.degree_exceeded)
            .finish()
    }
}

impl FormalOperator {
    /// The zero operator on slots with the given unit shifts; the first `n_x`
    /// slots are labelled as x-variables.
    pub fn zero(n_x: usize, steps: Vec<C64>) -> Self {
        assert!(n_x <= steps.len(), "more x-slots than slots");
        Self {
            n_x,
            steps,
            terms: BTreeMap::new(),
            degree_exceeded: false,
        }
    }

    pub fn identity(n_x: usize, steps: Vec<C64>) -> Self {
        let n = steps.len();
        Self::shift(n_x, steps, ShiftKey::zero(n))
    }

    /// A pure shift with coefficient 1.
    pub fn shift(n_x: usize, steps: Vec<C64>, key: ShiftKey) -> Self {
        assert_eq!(key.len(), steps.len());
        let mut op = Self::zero(n_x, steps);
        op.push_term(key, coefficient(|_| Ok(C64::new(1.0, 0.0))));
        op
    }

    /// Multiplication by a function.
    pub fn multiplication(n_x: usize, steps: Vec<C64>, f: Coefficient) -> Self {
        let n = steps.len();
        let mut op = Self::zero(n_x, steps);
        op.push_term(ShiftKey::zero(n), f);
        op
    }

    pub(crate) fn mark_degree_exceeded(mut self) -> Self {
        self.degree_exceeded = true;
        self
    }

    /// True if this is a zero operator produced for an out-of-range order.
    pub fn degree_exceeded(&self) -> bool {
        self.degree_exceeded
    }

    pub fn push_term(&mut self, key: ShiftKey, c: Coefficient) {
        assert_eq!(key.len(), self.steps.len(), "shift key length");
        self.terms.entry(key).or_default().push(c);
    }

    pub fn n_slots(&self) -> usize {
        self.steps.len()
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_y(&self) -> usize {
        self.steps.len() - self.n_x
    }

    pub fn steps(&self) -> &[C64] {
        &self.steps
    }

    pub fn keys(&self) -> impl Iterator<Item = &ShiftKey> {
        self.terms.keys()
    }

    /// Number of distinct shift keys.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Number of stored coefficient closures (a key may carry several).
    pub fn closure_count(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether two operators act on the same slots with the same unit shifts.
    pub fn compatible(&self, other: &FormalOperator) -> bool {
        self.steps.len() == other.steps.len()
            && self
                .steps
                .iter()
                .zip(&other.steps)
                .all(|(a, b)| (a - b).norm() <= 1e-14 * (1.0 + a.norm()))
    }

    fn check_compatible(&self, other: &FormalOperator) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::ArityMismatch(format!(
                "{} slots {:?} vs {} slots {:?}",
                self.steps.len(),
                self.steps,
                other.steps.len(),
                other.steps
            )))
        }
    }

    /// `point + key ⊙ steps`.
    pub fn shifted_point(&self, point: &[C64], key: &ShiftKey) -> Vec<C64> {
        shift_point(point, &key.0, &self.steps)
    }

    /// Coefficient of `key` at `point` (zero when the key is absent).
    pub fn coefficient_at(&self, key: &ShiftKey, point: &[C64]) -> Result<C64> {
        self.check_point(point)?;
        match self.terms.get(key) {
            None => Ok(C64::new(0.0, 0.0)),
            Some(list) => sum_closures(list, point),
        }
    }

    /// All coefficients at `point`, keyed by shift.
    pub fn coefficients_at(&self, point: &[C64]) -> Result<BTreeMap<ShiftKey, C64>> {
        self.check_point(point)?;
        self.terms
            .iter()
            .map(|(k, list)| Ok((k.clone(), sum_closures(list, point)?)))
            .collect()
    }

    /// Coefficients at `point` together with `Σ|c_i(point)|` over the stored
    /// summands of each coefficient. The second number is the scale on which
    /// rounding error in the first is measured.
    pub fn coefficients_with_scale_at(&self, point: &[C64]) -> Result<BTreeMap<ShiftKey, (C64, f64)>> {
        self.check_point(point)?;
        self.terms
            .iter()
            .map(|(k, list)| {
                let mut acc = C64::new(0.0, 0.0);
                let mut scale = 0.0;
                for f in list {
                    let v = f(point)?;
                    acc += v;
                    scale += v.norm();
                }
                Ok((k.clone(), (acc, scale)))
            })
            .collect()
    }

    fn check_point(&self, point: &[C64]) -> Result<()> {
        if point.len() != self.steps.len() {
            return Err(Error::ArityMismatch(format!(
                "point of length {} for an operator on {} slots",
                point.len(),
                self.steps.len()
            )));
        }
        Ok(())
    }

    /// `(A f)(point) = Σ_k c_k(point) f(point + k ⊙ steps)`.
    pub fn apply<F>(&self, f: F, point: &[C64]) -> Result<C64>
    where
        F: Fn(&[C64]) -> Result<C64>,
    {
        self.check_point(point)?;
        let mut acc = C64::new(0.0, 0.0);
        for (k, list) in &self.terms {
            let c = sum_closures(list, point)?;
            acc += c * f(&self.shifted_point(point, k))?;
        }
        Ok(acc)
    }

    /// `c · A`.
    pub fn scaled(&self, c: C64) -> FormalOperator {
        let mut out = FormalOperator::zero(self.n_x, self.steps.clone());
        for (k, list) in &self.terms {
            for f in list {
                let f = f.clone();
                out.push_term(k.clone(), coefficient(move |v| Ok(c * f(v)?)));
            }
        }
        out
    }

    /// `A + B`.
    pub fn add(&self, other: &FormalOperator) -> Result<FormalOperator> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.degree_exceeded = false;
        for (k, list) in &other.terms {
            for f in list {
                out.push_term(k.clone(), f.clone());
            }
        }
        Ok(out)
    }

    /// `A - B`.
    pub fn sub(&self, other: &FormalOperator) -> Result<FormalOperator> {
        self.add(&other.scaled(C64::new(-1.0, 0.0)))
    }

    /// Operator with every coefficient evaluated at `point + offset`, i.e. the
    /// same operator written in translated variables.
    pub fn translated(&self, offset: &[C64]) -> Result<FormalOperator> {
        self.check_point(offset)?;
        let offset: Arc<[C64]> = offset.into();
        let mut out = FormalOperator::zero(self.n_x, self.steps.clone());
        for (k, list) in &self.terms {
            for f in list {
                let f = f.clone();
                let off = offset.clone();
                out.push_term(
                    k.clone(),
                    coefficient(move |v| {
                        let w: Vec<C64> = v.iter().zip(off.iter()).map(|(a, b)| a + b).collect();
                        f(&w)
                    }),
                );
            }
        }
        Ok(out)
    }

    /// `g⁻¹ ∘ A ∘ g` for a multiplication operator `g`: the coefficient of key
    /// `k` becomes `c_k(v) · g(v + k ⊙ steps) / g(v)`.
    pub fn conjugated(&self, g: Coefficient) -> FormalOperator {
        let steps: Arc<[C64]> = self.steps.clone().into();
        let mut out = FormalOperator::zero(self.n_x, self.steps.clone());
        out.degree_exceeded = self.degree_exceeded;
        for (k, list) in &self.terms {
            let shift = k.0.clone();
            for f in list {
                let (f, g, shift, steps) = (f.clone(), g.clone(), shift.clone(), steps.clone());
                out.push_term(
                    k.clone(),
                    coefficient(move |v| {
                        let w = shift_point(v, &shift, &steps);
                        let base = g(v)?;
                        if base.norm() == 0.0 || !base.is_finite() {
                            return Err(Error::Pole {
                                factor: "conjugating function",
                                index: 0,
                                magnitude: base.norm(),
                            });
                        }
                        Ok(f(v)? * g(&w)? / base)
                    }),
                );
            }
        }
        out
    }
}

fn shift_point(point: &[C64], key: &[i32], steps: &[C64]) -> Vec<C64> {
    point
        .iter()
        .zip(key)
        .zip(steps)
        .map(|((v, &k), s)| if k == 0 { *v } else { v + s * k as f64 })
        .collect()
}

fn sum_closures(list: &[Coefficient], point: &[C64]) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for f in list {
        acc += f(point)?;
    }
    Ok(acc)
}

/// `A ∘ B`: the term for `k_A + k_B` has coefficient `c_A(v) · c_B(v + k_A ⊙ steps)`.
pub fn compose(a: &FormalOperator, b: &FormalOperator) -> Result<FormalOperator> {
    a.check_compatible(b)?;
    let steps: Arc<[C64]> = a.steps.clone().into();
    let mut out = FormalOperator::zero(a.n_x, a.steps.clone());
    for (ka, la) in &a.terms {
        let la: Arc<[Coefficient]> = la.clone().into();
        for (kb, lb) in &b.terms {
            let lb: Arc<[Coefficient]> = lb.clone().into();
            let la = la.clone();
            let shift = ka.0.clone();
            let steps = steps.clone();
            out.push_term(
                ka.add(kb),
                coefficient(move |v| {
                    let ca = sum_closures(&la, v)?;
                    let w = shift_point(v, &shift, &steps);
                    Ok(ca * sum_closures(&lb, &w)?)
                }),
            );
        }
    }
    Ok(out)
}

/// `[A, B] = A∘B - B∘A`.
pub fn commutator(a: &FormalOperator, b: &FormalOperator) -> Result<FormalOperator> {
    compose(a, b)?.sub(&compose(b, a)?)
}

/// `A_1 ∘ A_2 ∘ ⋯ ∘ A_n`; the identity on `(n_x, steps)` for an empty list.
pub fn compose_all(n_x: usize, steps: Vec<C64>, ops: &[&FormalOperator]) -> Result<FormalOperator> {
    let mut acc = FormalOperator::identity(n_x, steps);
    for op in ops {
        acc = compose(&acc, op)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn steps() -> Vec<C64> {
        vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.05)]
    }

    fn f(v: &[C64]) -> Result<C64> {
        Ok((v[0] * 1.3).sin() + v[1] * v[1] * C64::new(0.2, 0.7))
    }

    #[test]
    fn identity_apply() {
        let id = FormalOperator::identity(1, steps());
        let pt = [C64::new(0.1, 0.2), C64::new(-0.4, 0.3)];
        assert_eq!(id.apply(f, &pt).unwrap(), f(&pt).unwrap());
    }

    #[test]
    fn shift_apply() {
        let t = FormalOperator::shift(1, steps(), ShiftKey(vec![1, 0]));
        let pt = [C64::new(0.1, 0.2), C64::new(-0.4, 0.3)];
        let want = f(&[pt[0] + steps()[0], pt[1]]).unwrap();
        assert_eq!(t.apply(f, &pt).unwrap(), want);
    }

    #[test]
    fn compose_shift_with_weighted_shift() {
        let t = FormalOperator::shift(1, steps(), ShiftKey(vec![1, 0]));
        let mut wt = FormalOperator::zero(1, steps());
        wt.push_term(ShiftKey(vec![1, 0]), coefficient(|v| Ok(v[0] * v[1])));
        let c = compose(&t, &wt).unwrap();
        assert_eq!(c.keys().cloned().collect::<Vec<_>>(), vec![ShiftKey(vec![2, 0])]);
        let pt = [C64::new(0.1, 0.2), C64::new(-0.4, 0.3)];
        let got = c.coefficient_at(&ShiftKey(vec![2, 0]), &pt).unwrap();
        assert_eq!(got, (pt[0] + steps()[0]) * pt[1]);
    }

    #[test]
    fn arity_mismatch_rejected() {
        let a = FormalOperator::identity(1, steps());
        let b = FormalOperator::identity(1, vec![C64::new(0.3, 0.1)]);
        assert!(matches!(compose(&a, &b), Err(Error::ArityMismatch(_))));
        assert!(matches!(commutator(&a, &b), Err(Error::ArityMismatch(_))));
    }

    #[test]
    fn commutator_with_self_vanishes() {
        let mut a = FormalOperator::zero(1, steps());
        a.push_term(ShiftKey(vec![1, 0]), coefficient(|v| Ok(v[0].exp())));
        a.push_term(ShiftKey(vec![0, 1]), coefficient(|v| Ok(v[1] + v[0])));
        let c = commutator(&a, &a).unwrap();
        let pt = [C64::new(0.1, 0.2), C64::new(-0.4, 0.3)];
        for v in c.coefficients_at(&pt).unwrap().values() {
            assert!(v.norm() < 1e-13);
        }
    }

    #[test]
    fn translated_evaluates_at_offset() {
        let mut a = FormalOperator::zero(1, steps());
        a.push_term(ShiftKey(vec![1, 0]), coefficient(|v| Ok(v[0] * 2.0 + v[1])));
        let off = [C64::new(0.5, 0.0), C64::new(0.0, -1.0)];
        let b = a.translated(&off).unwrap();
        let pt = [C64::new(0.1, 0.2), C64::new(-0.4, 0.3)];
        let got = b.coefficient_at(&ShiftKey(vec![1, 0]), &pt).unwrap();
        assert!((got - ((pt[0] + off[0]) * 2.0 + pt[1] + off[1])).norm() < 1e-15);
    }
}
