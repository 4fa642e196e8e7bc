//! C ABI over `genshift`.
//!
//! Maps and operators cross the boundary as opaque handles created by a
//! `gs_*_new`/`gs_*_from_*` function and released with the matching
//! `gs_*_free`. Every fallible function returns a [`GsStatus`]; on failure
//! [`gs_last_error_message`] describes the problem. Complex vectors are
//! passed as two `double` arrays (real and imaginary parts) of equal length.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;

use genshift::derivcheck::{CheckOptions, Checker};
use genshift::shiftop::{fibers, shift_operator_norm};
use genshift::structure::{
    classify_psi_lambda, generalized_derivation_feasible, higher_tail_space_with_flavor, recover_r, synthesize_pair,
    twisted_derivation_space, Classification,
};
use genshift::verify::{self, VerifyConfig};
use genshift::{wire, Complex64, DenseMatrix, Error, Flavor, IndexMap, LinOp, PExponent, SeqVector};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    DimensionMismatch = 3,
    IndexOutOfRange = 4,
    ParseError = 5,
    AuxiliaryCheckFailed = 6,
    Panic = 7,
}

/// Identity family for generalized and higher derivations.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsFlavor {
    Plain = 0,
    Jordan = 1,
    JordanTriple = 2,
}

impl From<GsFlavor> for Flavor {
    fn from(f: GsFlavor) -> Self {
        match f {
            GsFlavor::Plain => Flavor::Plain,
            GsFlavor::Jordan => Flavor::Jordan,
            GsFlavor::JordanTriple => Flavor::JordanTriple,
        }
    }
}

/// Opaque self-map of `{0, …, n-1}`.
pub struct GsIndexMap(IndexMap);

/// Opaque linear operator on ℂⁿ.
pub struct GsLinOp(LinOp);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Fail {
    status: GsStatus,
    message: String,
}

impl Fail {
    fn new(status: GsStatus, message: impl Into<String>) -> Self {
        Fail { status, message: message.into() }
    }
}

impl From<Error> for Fail {
    fn from(err: Error) -> Self {
        let status = match &err {
            Error::InvalidInput(_) => GsStatus::InvalidInput,
            Error::DimensionMismatch { .. } => GsStatus::DimensionMismatch,
            Error::IndexOutOfRange { .. } => GsStatus::IndexOutOfRange,
            Error::Parse(_) => GsStatus::ParseError,
            Error::AuxiliaryCheckFailed { .. } => GsStatus::AuxiliaryCheckFailed,
        };
        Fail::new(status, err.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(fail)) => {
            set_error(fail.message);
            fail.status
        }
        Err(_) => {
            set_error("internal panic".into());
            GsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::new(GsStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail::new(GsStatus::NullPointer, format!("{name} is NULL")))
}

unsafe fn doubles<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(Fail::new(GsStatus::NullPointer, format!("{name} is NULL")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn doubles_mut<'a>(p: *mut f64, len: usize, name: &str) -> Result<&'a mut [f64], Fail> {
    if p.is_null() {
        return Err(Fail::new(GsStatus::NullPointer, format!("{name} is NULL")));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Reads `len` complex numbers; a NULL imaginary array means all-real input.
unsafe fn complex_input(re: *const f64, im: *const f64, len: usize, name: &str) -> Result<Vec<Complex64>, Fail> {
    let re = doubles(re, len, name)?;
    let im = if im.is_null() { None } else { Some(std::slice::from_raw_parts(im, len)) };
    Ok((0..len).map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i]))).collect())
}

unsafe fn complex_output(v: &SeqVector, re: *mut f64, im: *mut f64, len: usize) -> Result<(), Fail> {
    if len != v.len() {
        return Err(Error::DimensionMismatch { expected: v.len(), found: len }.into());
    }
    let re = doubles_mut(re, len, "re_out")?;
    let im = doubles_mut(im, len, "im_out")?;
    for (i, z) in v.entries().iter().enumerate() {
        re[i] = z.re;
        im[i] = z.im;
    }
    Ok(())
}

unsafe fn c_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(Fail::new(GsStatus::NullPointer, format!("{name} is NULL")));
    }
    CStr::from_ptr(s).to_str().map_err(|_| Fail::new(GsStatus::ParseError, format!("{name} is not UTF-8")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

fn emit<T>(slot: *mut *mut T, value: T) -> Result<(), Fail> {
    // SAFETY: callers pass a pointer checked by `out` or NULL.
    let slot = unsafe { out(slot, "out")? };
    *slot = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer returned by `gs_linop_to_json` or
/// `gs_verify` that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Creates a map from its image list `image[0..n]`.
///
/// # Safety
/// `image` must point to `n` readable `size_t` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_index_map_new(image: *const usize, n: usize, out: *mut *mut GsIndexMap) -> GsStatus {
    guard(|| {
        if image.is_null() {
            return Err(Fail::new(GsStatus::NullPointer, "image is NULL"));
        }
        let map = IndexMap::new(std::slice::from_raw_parts(image, n).to_vec())?;
        emit(out, GsIndexMap(map))
    })
}

/// Parses `{"n": …, "map": […]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_index_map_from_json(json: *const c_char, out: *mut *mut GsIndexMap) -> GsStatus {
    guard(|| {
        let map = wire::parse_index_map(c_str(json, "json")?)?;
        emit(out, GsIndexMap(map))
    })
}

/// # Safety
/// `map` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gs_index_map_free(map: *mut GsIndexMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Domain size `n`, or 0 for a NULL handle.
///
/// # Safety
/// `map` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_index_map_len(map: *const GsIndexMap) -> usize {
    map.as_ref().map_or(0, |m| m.0.n())
}

/// Largest fiber size `max_β |φ⁻¹(β)|`.
///
/// # Safety
/// `map` must be a live handle and `bound` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_index_map_fiber_bound(map: *const GsIndexMap, bound: *mut usize) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        *out(bound, "bound")? = fibers(&map.0).bound;
        Ok(())
    })
}

/// Operator norm of `σ_φ` on ℓᵖ. Pass `p = INFINITY` for the sup norm.
///
/// # Safety
/// `map` must be a live handle and `norm` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_shift_operator_norm(map: *const GsIndexMap, p: f64, norm: *mut f64) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        let p = PExponent::finite(p)?;
        *out(norm, "norm")? = shift_operator_norm(&map.0, p);
        Ok(())
    })
}

/// `σ_φ` as an operator handle.
///
/// # Safety
/// `map` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_shift(map: *const GsIndexMap, out: *mut *mut GsLinOp) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        emit(out, GsLinOp(LinOp::shift(&map.0)))
    })
}

/// `x ↦ (r_α x_{φ(α)})_α`. `r_im` may be NULL for a real multiplier.
///
/// # Safety
/// `r_re` (and `r_im` unless NULL) must hold `n` doubles; `map` must be live.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_multiplier_shift(
    map: *const GsIndexMap,
    r_re: *const f64,
    r_im: *const f64,
    n: usize,
    out: *mut *mut GsLinOp,
) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        let r = SeqVector::new(complex_input(r_re, r_im, n, "r_re")?)?;
        emit(out, GsLinOp(LinOp::multiplier_shift(r, map.0.clone())?))
    })
}

/// Dense `n×n` operator from row-major parts. `im` may be NULL.
///
/// # Safety
/// `re` (and `im` unless NULL) must hold `n*n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_dense(n: usize, re: *const f64, im: *const f64, out: *mut *mut GsLinOp) -> GsStatus {
    guard(|| {
        let len = n.checked_mul(n).ok_or_else(|| Fail::new(GsStatus::InvalidInput, "n too large"))?;
        let data = complex_input(re, im, len, "re")?;
        emit(out, GsLinOp(LinOp::Dense(DenseMatrix::from_flat(n, data)?)))
    })
}

/// Parses the dense or multiplier-shift JSON operator format.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_from_json(json: *const c_char, out: *mut *mut GsLinOp) -> GsStatus {
    guard(|| {
        let op = wire::parse_linop(c_str(json, "json")?)?;
        emit(out, GsLinOp(op))
    })
}

/// Serializes an operator; release the string with `gs_string_free`.
///
/// # Safety
/// `op` must be a live handle and `json` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_to_json(op: *const GsLinOp, json: *mut *mut c_char) -> GsStatus {
    guard(|| {
        let op = borrow(op, "op")?;
        let text = serde_json::to_string(&op.0).map_err(|e| Fail::new(GsStatus::InvalidInput, e.to_string()))?;
        *out(json, "json")? = into_c_string(text);
        Ok(())
    })
}

/// # Safety
/// `op` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_free(op: *mut GsLinOp) {
    if !op.is_null() {
        drop(Box::from_raw(op));
    }
}

/// Dimension `n`, or 0 for a NULL handle.
///
/// # Safety
/// `op` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_dim(op: *const GsLinOp) -> usize {
    op.as_ref().map_or(0, |o| o.0.n())
}

/// `y = op(x)`. `x_im` may be NULL; outputs must hold `n` doubles each.
///
/// # Safety
/// All arrays must hold `n` doubles; `op` must be live.
#[no_mangle]
pub unsafe extern "C" fn gs_linop_apply(
    op: *const GsLinOp,
    x_re: *const f64,
    x_im: *const f64,
    n: usize,
    y_re: *mut f64,
    y_im: *mut f64,
) -> GsStatus {
    guard(|| {
        let op = borrow(op, "op")?;
        let x = SeqVector::new(complex_input(x_re, x_im, n, "x_re")?)?;
        complex_output(&op.0.apply(&x)?, y_re, y_im, n)
    })
}

fn checker() -> Checker {
    Checker::new(CheckOptions::default())
}

/// `d(ab) = d(a)ψ(b) + λ(a)d(b)` on ℂⁿ.
///
/// # Safety
/// Handles must be live; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_is_psi_lambda_derivation(
    d: *const GsLinOp,
    psi: *const GsLinOp,
    lambda: *const GsLinOp,
    holds: *mut bool,
) -> GsStatus {
    guard(|| {
        let r = checker().psi_lambda(&borrow(d, "d")?.0, &borrow(psi, "psi")?.0, &borrow(lambda, "lambda")?.0)?;
        *out(holds, "holds")? = r.holds;
        Ok(())
    })
}

/// # Safety
/// `d` must be live; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_is_derivation(d: *const GsLinOp, holds: *mut bool) -> GsStatus {
    guard(|| {
        *out(holds, "holds")? = checker().derivation(&borrow(d, "d")?.0)?.holds;
        Ok(())
    })
}

/// # Safety
/// `d` must be live; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_is_jordan_derivation(d: *const GsLinOp, holds: *mut bool) -> GsStatus {
    guard(|| {
        *out(holds, "holds")? = checker().jordan(&borrow(d, "d")?.0)?.holds;
        Ok(())
    })
}

/// # Safety
/// `d` must be live; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_is_jordan_triple_derivation(d: *const GsLinOp, holds: *mut bool) -> GsStatus {
    guard(|| {
        *out(holds, "holds")? = checker().jordan_triple(&borrow(d, "d")?.0)?.holds;
        Ok(())
    })
}

/// Generalized (Jordan, Jordan triple) derivation check for `D` with
/// auxiliary `d`. Returns `GS_STATUS_AUXILIARY_CHECK_FAILED` when `d` is not
/// of the kind the flavor requires.
///
/// # Safety
/// Handles must be live; `holds` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_is_generalized_derivation(
    big_d: *const GsLinOp,
    d: *const GsLinOp,
    flavor: GsFlavor,
    holds: *mut bool,
) -> GsStatus {
    guard(|| {
        let r = checker().generalized_flavor(&borrow(big_d, "D")?.0, &borrow(d, "d")?.0, flavor.into())?;
        *out(holds, "holds")? = r.holds;
        Ok(())
    })
}

/// `ψ = r·σ_φ`, `λ = (1 − r)·σ_φ`. `r_im` may be NULL.
///
/// # Safety
/// `r_re` (and `r_im` unless NULL) must hold `n` doubles; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn gs_synthesize_pair(
    map: *const GsIndexMap,
    r_re: *const f64,
    r_im: *const f64,
    n: usize,
    psi_out: *mut *mut GsLinOp,
    lambda_out: *mut *mut GsLinOp,
) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        let r = SeqVector::new(complex_input(r_re, r_im, n, "r_re")?)?;
        let (psi, lambda) = synthesize_pair(&map.0, &r)?;
        out(lambda_out, "lambda_out")?;
        emit(psi_out, GsLinOp(psi))?;
        emit(lambda_out, GsLinOp(lambda))
    })
}

/// `r_α = π_α(ψ(w^{φ(α)}))` written to `r_re`/`r_im` (length `n`).
///
/// # Safety
/// Handles must be live; outputs must hold `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_recover_r(
    map: *const GsIndexMap,
    psi: *const GsLinOp,
    r_re: *mut f64,
    r_im: *mut f64,
    n: usize,
) -> GsStatus {
    guard(|| {
        let r = recover_r(&borrow(map, "map")?.0, &borrow(psi, "psi")?.0)?;
        complex_output(&r, r_re, r_im, n)
    })
}

/// Sets `accepted` and, when accepted and `r_re`/`r_im` are non-NULL,
/// writes the recovered multiplier.
///
/// # Safety
/// Handles must be live; `r_re`/`r_im` NULL or holding `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn gs_classify_psi_lambda(
    map: *const GsIndexMap,
    psi: *const GsLinOp,
    lambda: *const GsLinOp,
    accepted: *mut bool,
    r_re: *mut f64,
    r_im: *mut f64,
    n: usize,
) -> GsStatus {
    guard(|| {
        let verdict =
            classify_psi_lambda(&borrow(map, "map")?.0, &borrow(psi, "psi")?.0, &borrow(lambda, "lambda")?.0)?;
        let flag = out(accepted, "accepted")?;
        *flag = verdict.is_accept();
        if let Classification::Accept(r) = verdict {
            if !r_re.is_null() && !r_im.is_null() {
                complex_output(&r, r_re, r_im, n)?;
            }
        }
        Ok(())
    })
}

/// Dimension of `{d : d(ab) = d(a)ψ(b) + λ(a)d(b)}`.
///
/// # Safety
/// Handles must be live; `dimension` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_twisted_derivation_dimension(
    psi: *const GsLinOp,
    lambda: *const GsLinOp,
    dimension: *mut usize,
) -> GsStatus {
    guard(|| {
        let report = twisted_derivation_space(&borrow(psi, "psi")?.0, &borrow(lambda, "lambda")?.0)?;
        *out(dimension, "dimension")? = report.dimension();
        Ok(())
    })
}

/// Whether `σ_φ` is a generalized derivation of the given flavor.
///
/// # Safety
/// `map` must be live; `feasible` writable.
#[no_mangle]
pub unsafe extern "C" fn gs_generalized_derivation_feasible(
    map: *const GsIndexMap,
    flavor: GsFlavor,
    feasible: *mut bool,
) -> GsStatus {
    guard(|| {
        let report = generalized_derivation_feasible(&borrow(map, "map")?.0, flavor.into());
        *out(feasible, "feasible")? = report.feasible();
        Ok(())
    })
}

/// Solution-space dimension at levels `1..=depth` of a higher derivation
/// with `d₀ = σ_φ`, written to `dimensions[0..depth]`. `all_zero` reports
/// whether every chosen `d_k` vanished. Levels after an inconsistent one are
/// reported as `SIZE_MAX`.
///
/// # Safety
/// `map` must be live; `dimensions` must hold `depth` values.
#[no_mangle]
pub unsafe extern "C" fn gs_higher_tail_dimensions(
    map: *const GsIndexMap,
    flavor: GsFlavor,
    depth: usize,
    dimensions: *mut usize,
    all_zero: *mut bool,
) -> GsStatus {
    guard(|| {
        let map = borrow(map, "map")?;
        if dimensions.is_null() {
            return Err(Fail::new(GsStatus::NullPointer, "dimensions is NULL"));
        }
        let report = higher_tail_space_with_flavor(&map.0, depth, flavor.into())?;
        let dims = std::slice::from_raw_parts_mut(dimensions, depth);
        let found = report.dimensions();
        for (k, slot) in dims.iter_mut().enumerate() {
            *slot = found.get(k).copied().unwrap_or(usize::MAX);
        }
        let zero = report.solutions().len() == depth
            && report.solutions().iter().all(|d| d.to_dense().max_abs() <= genshift::tolerance::DEFAULT_TOLERANCE);
        *out(all_zero, "all_zero")? = zero;
        Ok(())
    })
}

/// Runs the verification suite. `report_json` may be NULL; otherwise it
/// receives the JSON report, to be released with `gs_string_free`.
///
/// # Safety
/// `passed` must be writable; `report_json` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn gs_verify(
    n_max: usize,
    seed: u64,
    passed: *mut bool,
    report_json: *mut *mut c_char,
) -> GsStatus {
    guard(|| {
        let flag = out(passed, "passed")?;
        let report = verify::run(&VerifyConfig::new(n_max, seed))?;
        *flag = report.passed;
        if let Some(slot) = report_json.as_mut() {
            let text = serde_json::to_string(&report).map_err(|e| Fail::new(GsStatus::InvalidInput, e.to_string()))?;
            *slot = into_c_string(text);
        }
        Ok(())
    })
}
