//! C ABI for `elliptic-ruijsenaars`.
//!
//! Objects cross the boundary as opaque pointers (`RuijsParams`,
//! `RuijsOperator`) created and freed by this library. Every fallible call
//! returns a `RuijsStatus`; the message for the most recent failure on the
//! calling thread is available from `ruijs_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use elliptic_ruijsenaars::cli::{run_identity, run_suite, Suite, SuiteConfig};
use elliptic_ruijsenaars::identities::IdentityName;
use elliptic_ruijsenaars::operators::{build, Family};
use elliptic_ruijsenaars::shiftalg::{compose, equal_at, FormalOperator, SamplerConfig, ShiftKey};
use elliptic_ruijsenaars::specialfn::{elliptic_gamma, theta, BracketContext, ModelParams, VariantKind};
use elliptic_ruijsenaars::{Error, C64};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuijsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonFinite = 3,
    Pole = 4,
    UnsupportedRegime = 5,
    Genericity = 6,
    Balancing = 7,
    SamplerExhausted = 8,
    Config = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuijsVariant {
    Elliptic = 0,
    Trigonometric = 1,
    Hyperbolic = 2,
    Rational = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuijsFamily {
    H = 0,
    D = 1,
    HatH = 2,
    HatD = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RuijsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<RuijsComplex> for C64 {
    fn from(c: RuijsComplex) -> Self {
        C64::new(c.re, c.im)
    }
}

impl From<C64> for RuijsComplex {
    fn from(c: C64) -> Self {
        Self { re: c.re, im: c.im }
    }
}

/// Model parameters `(δ, κ)` and the bracket variant.
pub struct RuijsParams(ModelParams);

/// A difference operator.
pub struct RuijsOperator(FormalOperator);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RuijsStatus {
    match e {
        Error::NonFinite(_) => RuijsStatus::NonFinite,
        Error::Domain(_) | Error::ArityMismatch(_) => RuijsStatus::InvalidArgument,
        Error::Pole { .. } => RuijsStatus::Pole,
        Error::UnsupportedRegime(_) => RuijsStatus::UnsupportedRegime,
        Error::Genericity { .. } => RuijsStatus::Genericity,
        Error::Balancing(_) => RuijsStatus::Balancing,
        Error::SamplerExhausted(_) => RuijsStatus::SamplerExhausted,
        Error::Config(_) => RuijsStatus::Config,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F>(f: F) -> RuijsStatus
where
    F: FnOnce() -> Result<(), (RuijsStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RuijsStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            RuijsStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (RuijsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RuijsStatus, String) {
    (RuijsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> (RuijsStatus, String) {
    (RuijsStatus::InvalidArgument, msg.into())
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (RuijsStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn slice<'a, T>(data: *const T, len: usize, what: &str) -> Result<&'a [T], (RuijsStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if data.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(data, len))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ruijs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default parameters for a variant: generic `δ`, `κ`, `|p| = 0.3`, `ω = 1`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_params_default(variant: RuijsVariant, out: *mut *mut RuijsParams) -> RuijsStatus {
    guard(|| {
        let p = ModelParams::generic(kind_of(variant));
        write_out(out, Box::into_raw(Box::new(RuijsParams(p))), "out")
    })
}

/// Parameters with an explicit modulus: `τ` for the elliptic variant, `ω` for
/// trigonometric and hyperbolic, ignored for rational.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_params_new(
    variant: RuijsVariant,
    modulus: RuijsComplex,
    delta: RuijsComplex,
    kappa: RuijsComplex,
    out: *mut *mut RuijsParams,
) -> RuijsStatus {
    guard(|| {
        let ctx = match variant {
            RuijsVariant::Elliptic => BracketContext::elliptic_from_tau(modulus.into()),
            RuijsVariant::Trigonometric => BracketContext::trigonometric(modulus.into()),
            RuijsVariant::Hyperbolic => BracketContext::hyperbolic(modulus.into()),
            RuijsVariant::Rational => Ok(BracketContext::rational()),
        }
        .map_err(lib_err)?;
        let p = ModelParams::new(delta.into(), kappa.into(), ctx).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(RuijsParams(p))), "out")
    })
}

/// # Safety
/// `params` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ruijs_params_free(params: *mut RuijsParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

fn kind_of(v: RuijsVariant) -> VariantKind {
    match v {
        RuijsVariant::Elliptic => VariantKind::Elliptic,
        RuijsVariant::Trigonometric => VariantKind::Trigonometric,
        RuijsVariant::Hyperbolic => VariantKind::Hyperbolic,
        RuijsVariant::Rational => VariantKind::Rational,
    }
}

fn family_of(f: RuijsFamily) -> Family {
    match f {
        RuijsFamily::H => Family::H,
        RuijsFamily::D => Family::D,
        RuijsFamily::HatH => Family::HatH,
        RuijsFamily::HatD => Family::HatD,
    }
}

/// The bracket `[x]`.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_bracket(
    params: *const RuijsParams,
    x: RuijsComplex,
    out: *mut RuijsComplex,
) -> RuijsStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let v = p.0.context.bracket(x.into()).map_err(lib_err)?;
        write_out(out, v.into(), "out")
    })
}

/// `θ(z; p)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_theta(z: RuijsComplex, p: RuijsComplex, out: *mut RuijsComplex) -> RuijsStatus {
    guard(|| {
        let v = theta(z.into(), p.into()).map_err(lib_err)?;
        write_out(out, v.into(), "out")
    })
}

/// `Γ(z; p, q)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_elliptic_gamma(
    z: RuijsComplex,
    p: RuijsComplex,
    q: RuijsComplex,
    out: *mut RuijsComplex,
) -> RuijsStatus {
    guard(|| {
        let v = elliptic_gamma(z.into(), p.into(), q.into()).map_err(lib_err)?;
        write_out(out, v.into(), "out")
    })
}

/// Builds `H^{(k)}_{m,r}` or one of its companion families.
///
/// # Safety
/// `params` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_build(
    params: *const RuijsParams,
    family: RuijsFamily,
    m: usize,
    r: usize,
    k: u32,
    out: *mut *mut RuijsOperator,
) -> RuijsStatus {
    guard(|| {
        let p = params.as_ref().ok_or_else(|| null("params"))?;
        let op = build(family_of(family), m, r, k, &p.0).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(RuijsOperator(op))), "out")
    })
}

/// `a ∘ b`.
///
/// # Safety
/// `a`, `b` must be live handles and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_compose(
    a: *const RuijsOperator,
    b: *const RuijsOperator,
    out: *mut *mut RuijsOperator,
) -> RuijsStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let op = compose(&a.0, &b.0).map_err(lib_err)?;
        write_out(out, Box::into_raw(Box::new(RuijsOperator(op))), "out")
    })
}

/// # Safety
/// `op` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_free(op: *mut RuijsOperator) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Number of variables (`m + r`) the operator acts on.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_slots(op: *const RuijsOperator, out: *mut usize) -> RuijsStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        write_out(out, op.0.n_slots(), "out")
    })
}

/// Number of distinct shifts with a stored coefficient.
///
/// # Safety
/// `op` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_term_count(op: *const RuijsOperator, out: *mut usize) -> RuijsStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        write_out(out, op.0.term_count(), "out")
    })
}

/// Coefficient of the shift `key` at `point`; both arrays have one entry per slot.
///
/// # Safety
/// `op` must be a live handle, `key` and `point` valid for `len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_operator_coefficient(
    op: *const RuijsOperator,
    key: *const i32,
    point: *const RuijsComplex,
    len: usize,
    out: *mut RuijsComplex,
) -> RuijsStatus {
    guard(|| {
        let op = op.as_ref().ok_or_else(|| null("op"))?;
        if len != op.0.n_slots() {
            return Err(invalid(format!("expected {} slots, got {len}", op.0.n_slots())));
        }
        let key = ShiftKey(slice(key, len, "key")?.to_vec());
        let point: Vec<C64> = slice(point, len, "point")?.iter().map(|&c| c.into()).collect();
        let v = op.0.coefficient_at(&key, &point).map_err(lib_err)?;
        write_out(out, v.into(), "out")
    })
}

/// Compares `a ∘ b` with `b ∘ a` at `samples` seeded random points and
/// writes the largest relative residual.
///
/// # Safety
/// `a`, `b` must be live handles and `max_residual` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_check_commute(
    a: *const RuijsOperator,
    b: *const RuijsOperator,
    samples: usize,
    seed: u64,
    max_residual: *mut f64,
) -> RuijsStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        if samples == 0 {
            return Err(invalid("samples must be positive"));
        }
        let cfg = SamplerConfig::default().with_samples(samples).with_seed(seed);
        let ab = compose(&a.0, &b.0).map_err(lib_err)?;
        let ba = compose(&b.0, &a.0).map_err(lib_err)?;
        let rep = equal_at("commute", &ab, &ba, &cfg).map_err(lib_err)?;
        write_out(max_residual, rep.max_residual, "max_residual")
    })
}

/// Runs a suite (`all`, `commutativity`, `wronski`, `kernel`, `sources`,
/// `transforms`, `independence`, `poincare`) or, if `name` is an identity name,
/// that identity. `config_json` may be null for defaults. On success
/// `*report_json` holds the JSON report (free with `ruijs_string_free`) and
/// `*exit_code` the CLI exit code (0 pass, 1 fail, 2 inconclusive).
///
/// # Safety
/// String arguments must be null or NUL-terminated UTF-8; out pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ruijs_verify_json(
    config_json: *const c_char,
    name: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> RuijsStatus {
    guard(|| {
        let config = if config_json.is_null() {
            SuiteConfig::default()
        } else {
            let text = CStr::from_ptr(config_json).to_str().map_err(|e| invalid(e.to_string()))?;
            SuiteConfig::from_json_str(text).map_err(lib_err)?
        };
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|e| invalid(e.to_string()))?;
        let report = match IdentityName::parse(name) {
            Some(id) => run_identity(&config, id, None),
            None => {
                let suite = Suite::parse(name).ok_or_else(|| invalid(format!("unknown suite or identity `{name}`")))?;
                run_suite(&config, suite)
            }
        }
        .map_err(lib_err)?;
        let json = CString::new(report.to_json()).map_err(|e| invalid(e.to_string()))?;
        write_out(exit_code, report.exit_code(), "exit_code")?;
        write_out(report_json, json.into_raw(), "report_json")
    })
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ruijs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
