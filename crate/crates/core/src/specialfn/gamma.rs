//! Elliptic gamma function, Euler gamma on ℂ, and solutions of `G(x + step) = [x] G(x)`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use super::theta::{BracketContext, Variant};
use crate::error::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Factors whose correction is below this are dropped from double products.
const TAIL: f64 = 1e-18;

/// `Γ(z; p, q) = ∏_{j,k≥0} (1 - p^{j+1} q^{k+1}/z) / (1 - p^j q^k z)` for `|p|, |q| < 1`.
pub fn elliptic_gamma(z: C64, p: C64, q: C64) -> Result<C64> {
    if !(z.is_finite() && p.is_finite() && q.is_finite()) {
        return Err(Error::NonFinite("elliptic_gamma"));
    }
    if p.norm() >= 1.0 {
        return Err(Error::Domain(format!("elliptic gamma needs |p| < 1, got {}", p.norm())));
    }
    if q.norm() >= 1.0 {
        return Err(Error::Domain(format!(
            "elliptic gamma needs |q| < 1, got {}; use the reciprocal branch",
            q.norm()
        )));
    }
    if z.norm() == 0.0 {
        return Err(Error::Domain("elliptic gamma is singular at z = 0".into()));
    }
    let (num, den) = elliptic_gamma_parts(z, p, q);
    if den.norm() == 0.0 {
        return Err(Error::Pole {
            factor: "elliptic_gamma",
            index: 0,
            magnitude: 0.0,
        });
    }
    Ok(num / den)
}

fn elliptic_gamma_parts(z: C64, p: C64, q: C64) -> (C64, C64) {
    let zinv = z.inv();
    let pq = p * q;
    let mut num = C64::new(1.0, 0.0);
    let mut den = C64::new(1.0, 0.0);
    let mut pj = C64::new(1.0, 0.0);
    loop {
        let lead_den = (pj * z).norm();
        let lead_num = (pj * pq * zinv).norm();
        if pj.norm() == 0.0 || (lead_den < TAIL && lead_num < TAIL) {
            break;
        }
        let mut a = pj * z;
        let mut b = pj * pq * zinv;
        loop {
            if a.norm() < TAIL && b.norm() < TAIL {
                break;
            }
            den *= 1.0 - a;
            num *= 1.0 - b;
            a *= q;
            b *= q;
            if q.norm() == 0.0 {
                break;
            }
        }
        pj *= p;
    }
    (num, den)
}

/// `Γ(x; p, s)` with the replacement `Γ(x; p, s) ↦ 1/Γ(s x; p, 1/s)` when `|s| > 1`.
pub fn elliptic_gamma_any_base(z: C64, p: C64, s: C64) -> Result<C64> {
    let a = s.norm();
    if (a - 1.0).abs() < 1e-12 {
        return Err(Error::UnsupportedRegime("elliptic gamma with |base| = 1"));
    }
    if a < 1.0 {
        elliptic_gamma(z, p, s)
    } else {
        Ok(elliptic_gamma(s * z, p, s.inv())?.inv())
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(z)` on ℂ up to a multiple of `2πi` (Lanczos, with reflection for `Re z < 1/2`).
pub fn ln_gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let s = (PI * z).sin();
        return C64::new(PI.ln(), 0.0) - s.ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = C64::new(LANCZOS[0], 0.0);
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Euler `Γ(z)` on ℂ.
pub fn gamma(z: C64) -> C64 {
    ln_gamma(z).exp()
}

/// A meromorphic solution of `G(x + step) = [x] G(x)` for the bracket in `ctx`.
///
/// Elliptic: built from `Γ(e^{2πix}; p, q)`, `q = e^{2πi step}`, taking the
/// reciprocal form when `Im step < 0`. The degenerate variants reduce to the
/// `p = 0` case by rescaling, or to Euler's gamma in the rational case.
pub fn g_step(x: C64, step: C64, ctx: &BracketContext) -> Result<C64> {
    if !(x.is_finite() && step.is_finite()) {
        return Err(Error::NonFinite("G"));
    }
    if step.norm() == 0.0 {
        return Err(Error::Domain("G needs a non-zero step".into()));
    }
    match ctx.variant() {
        Variant::Elliptic { p } => g_elliptic(x, step, p),
        Variant::Trigonometric { omega } => g_elliptic(x / omega, step / omega, C64::new(0.0, 0.0)),
        Variant::Hyperbolic { omega } => {
            // sinh(πx/ω) = ½ · (-2i sin(πx/ω')) with ω' = -iω
            let omega_t = -I * omega;
            let base = g_elliptic(x / omega_t, step / omega_t, C64::new(0.0, 0.0))?;
            Ok(base * (-(x / step) * std::f64::consts::LN_2).exp())
        }
        Variant::Rational => {
            let u = x / step;
            Ok((u * step.ln() + ln_gamma(u)).exp())
        }
    }
}

fn g_elliptic(x: C64, step: C64, p: C64) -> Result<C64> {
    let q = (2.0 * PI * I * step).exp();
    if (q.norm() - 1.0).abs() < 1e-12 {
        return Err(Error::UnsupportedRegime("G_δ with |q| = 1 (real step)"));
    }
    let gauss = (I * PI * x * (step - x) / (2.0 * step)).exp();
    let z = (2.0 * PI * I * x).exp();
    if step.im > 0.0 {
        Ok(gauss * elliptic_gamma(z, p, q)?)
    } else {
        Ok(gauss / elliptic_gamma(z / q, p, q.inv())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn zero_nomes_leave_one_factor() {
        let z = C64::new(0.37, -0.2);
        let g = elliptic_gamma(z, C64::new(0.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(rel(g, (1.0 - z).inv()) < 1e-15);
    }

    #[test]
    fn euler_gamma_known_values() {
        assert!(rel(gamma(C64::new(5.0, 0.0)), C64::new(24.0, 0.0)) < 1e-13);
        assert!(rel(gamma(C64::new(0.5, 0.0)), C64::new(PI.sqrt(), 0.0)) < 1e-13);
        let z = C64::new(-1.3, 0.7);
        // Γ(z+1) = z Γ(z)
        assert!(rel(gamma(z + 1.0), z * gamma(z)) < 1e-12);
    }

    #[test]
    fn reciprocal_base_rejected_at_unit_modulus() {
        let r = elliptic_gamma_any_base(C64::new(0.3, 0.0), C64::new(0.1, 0.0), C64::new(0.0, 1.0));
        assert!(matches!(r, Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn real_step_is_unsupported() {
        let ctx = BracketContext::elliptic(C64::new(0.2, 0.0)).unwrap();
        let r = g_step(C64::new(0.1, 0.1), C64::new(0.3, 0.0), &ctx);
        assert!(matches!(r, Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn large_base_rejected_by_direct_gamma() {
        let r = elliptic_gamma(C64::new(0.3, 0.0), C64::new(0.1, 0.0), C64::new(1.5, 0.0));
        assert!(matches!(r, Err(Error::Domain(_))));
    }
}
