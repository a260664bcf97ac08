//! C interface to `kgeom`.
//!
//! Models are opaque handles created by `kg_fit`, `kg_signature_fit` or
//! `kg_model_from_json` and released with `kg_model_free`. Every fallible
//! function returns a `KgStatus`; on failure a description is available from
//! `kg_last_error_message` on the same thread. Point sets are passed as
//! row-major `double` arrays of `count * dim` entries.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use kgeom::geometry::curvatures;
use kgeom::interpolant::{deserialize, fit, gpr_variance, serialize, Model};
use kgeom::surface_ops::{assemble_operator, laplace_beltrami, surface_gradient, OperatorKind};
use kgeom::{signature_model, Error, KernelSpec, PointCloud};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    LengthMismatch = 4,
    DuplicatePoints = 5,
    NonFinite = 6,
    IllConditioned = 7,
    DegenerateGradient = 8,
    NonDifferentiableKernel = 9,
    MalformedInput = 10,
    Panic = 11,
}

/// `kind` value selecting the Laplace-Beltrami operator in
/// `kg_assemble_operator`. Values `0..dim` select a surface-gradient component.
pub const KG_OPERATOR_LAPLACE_BELTRAMI: i32 = -1;

/// Diagnostics of the linear solve behind a fit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KgSolveReport {
    pub jitter_added: f64,
    pub cholesky_attempts: usize,
    pub residual_norm: f64,
}

/// A fitted kernel model.
pub struct KgModel {
    inner: Model,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> KgStatus {
    match e {
        Error::NonDifferentiableKernel { .. } => KgStatus::NonDifferentiableKernel,
        Error::DuplicatePoints { .. } => KgStatus::DuplicatePoints,
        Error::NonFinite { .. } => KgStatus::NonFinite,
        Error::DimensionMismatch { .. } => KgStatus::DimensionMismatch,
        Error::LengthMismatch { .. } => KgStatus::LengthMismatch,
        Error::IllConditioned { .. } => KgStatus::IllConditioned,
        Error::DegenerateGradient { .. } | Error::DegenerateAt { .. } => KgStatus::DegenerateGradient,
        Error::MalformedModelFile(_) | Error::MalformedDescriptor { .. } => KgStatus::MalformedInput,
        Error::EmptyCloud | Error::ZeroReference | Error::OffSurfacePoint { .. } | Error::InvalidParameter(_) => {
            KgStatus::InvalidArgument
        }
    }
}

struct Failure(KgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(KgStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            KgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            KgStatus::Panic
        }
    }
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a>(p: *const KgModel) -> Result<&'a Model, Failure> {
    p.as_ref().map(|m| &m.inner).ok_or_else(|| null("model"))
}

unsafe fn kernel(p: *const c_char) -> Result<KernelSpec, Failure> {
    if p.is_null() {
        return Ok(KernelSpec::default());
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(KgStatus::InvalidArgument, "kernel descriptor is not UTF-8".into()))?;
    Ok(s.parse()?)
}

fn check_dim(dim: usize) -> Result<(), Failure> {
    if dim == 0 {
        return Err(Failure(KgStatus::InvalidArgument, "dim must be positive".into()));
    }
    Ok(())
}

unsafe fn cloud(coords: *const f64, count: usize, dim: usize, distinct: bool) -> Result<PointCloud, Failure> {
    check_dim(dim)?;
    let len = count.checked_mul(dim).ok_or_else(|| Failure(KgStatus::InvalidArgument, "size overflow".into()))?;
    let c = slice(coords, len, "coords")?.to_vec();
    Ok(if distinct { PointCloud::new(dim, c)? } else { PointCloud::new_unchecked_distinct(dim, c)? })
}

unsafe fn point<'a>(m: &Model, x: *const f64, dim: usize) -> Result<&'a [f64], Failure> {
    if dim != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: dim }.into());
    }
    slice(x, dim, "x")
}

unsafe fn store<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn report_of(r: &kgeom::SolveReport) -> KgSolveReport {
    KgSolveReport {
        jitter_added: r.jitter_added,
        cholesky_attempts: r.cholesky_attempts,
        residual_norm: r.residual_norm,
    }
}

/// Message describing the most recent failure on this thread, or an empty
/// string. The pointer stays valid until the next call into this library
/// from the same thread.
#[no_mangle]
pub extern "C" fn kg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Fits `values` on `count` distinct points. `kernel_desc` is a descriptor such as
/// `"laplace:eps=1"` or `"gauss:l=0.5"`; NULL selects `laplace:eps=1`.
/// `out_report` may be NULL.
///
/// # Safety
/// Pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn kg_fit(
    kernel_desc: *const c_char,
    coords: *const f64,
    count: usize,
    dim: usize,
    values: *const f64,
    alpha: f64,
    out_model: *mut *mut KgModel,
    out_report: *mut KgSolveReport,
) -> KgStatus {
    guard(|| {
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        let spec = kernel(kernel_desc)?;
        let pts = cloud(coords, count, dim, true)?;
        let y = slice(values, count, "values")?;
        let (m, r) = fit(&spec, &pts, y, alpha)?;
        if !out_report.is_null() {
            out_report.write(report_of(&r));
        }
        out_model.write(Box::into_raw(Box::new(KgModel { inner: m })));
        Ok(())
    })
}

/// Fits the constant 1 on the points: the signature function.
///
/// # Safety
/// As for `kg_fit`.
#[no_mangle]
pub unsafe extern "C" fn kg_signature_fit(
    kernel_desc: *const c_char,
    coords: *const f64,
    count: usize,
    dim: usize,
    alpha: f64,
    out_model: *mut *mut KgModel,
    out_report: *mut KgSolveReport,
) -> KgStatus {
    guard(|| {
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        let spec = kernel(kernel_desc)?;
        let pts = cloud(coords, count, dim, true)?;
        let (m, r) = signature_model(&spec, &pts, alpha)?;
        if !out_report.is_null() {
            out_report.write(report_of(&r));
        }
        out_model.write(Box::into_raw(Box::new(KgModel { inner: m })));
        Ok(())
    })
}

/// Releases a model. NULL is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kg_model_free(model: *mut KgModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Ambient dimension, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_model_dim(model: *const KgModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.dim())
}

/// Number of centers, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kg_model_len(model: *const KgModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.centers().len())
}

/// # Safety
/// `x` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kg_model_evaluate(
    model: *const KgModel,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> KgStatus {
    guard(|| {
        let m = handle(model)?;
        let v = m.evaluate(point(m, x, dim)?)?;
        store(out, v, "out")
    })
}

/// Writes the `dim` gradient components to `out_grad`.
///
/// # Safety
/// `x` and `out_grad` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kg_model_gradient(
    model: *const KgModel,
    x: *const f64,
    dim: usize,
    out_grad: *mut f64,
) -> KgStatus {
    guard(|| {
        let m = handle(model)?;
        let jet = m.evaluate_jet(point(m, x, dim)?, 1)?;
        slice_mut(out_grad, dim, "out_grad")?.copy_from_slice(jet.gradient.as_slice());
        Ok(())
    })
}

/// Normal and curvatures of the level set of a signature model through `x`.
/// `out_normal` receives `dim` values, `out_kappas` the `dim - 1` principal
/// curvatures in ascending order. Any output may be NULL.
///
/// # Safety
/// Non-NULL outputs must hold the stated number of values.
#[no_mangle]
pub unsafe extern "C" fn kg_model_curvatures(
    model: *const KgModel,
    x: *const f64,
    dim: usize,
    tau_grad: f64,
    out_normal: *mut f64,
    out_kappas: *mut f64,
    out_mean_curvature: *mut f64,
    out_gauss_curvature: *mut f64,
    out_grad_norm: *mut f64,
) -> KgStatus {
    guard(|| {
        let m = handle(model)?;
        let f = curvatures(m, point(m, x, dim)?, tau_grad)?;
        if !out_normal.is_null() {
            slice_mut(out_normal, dim, "out_normal")?.copy_from_slice(f.normal.as_slice());
        }
        if !out_kappas.is_null() {
            slice_mut(out_kappas, dim - 1, "out_kappas")?.copy_from_slice(&f.principal_curvatures);
        }
        for (p, v) in [
            (out_mean_curvature, f.mean_curvature),
            (out_gauss_curvature, f.gauss_curvature),
            (out_grad_norm, f.grad_norm),
        ] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Surface gradient at `x` of the data model `f`, with geometry from the
/// signature model `sig`. Writes `dim` values.
///
/// # Safety
/// `x` and `out_grad` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kg_surface_gradient(
    sig: *const KgModel,
    f: *const KgModel,
    x: *const f64,
    dim: usize,
    tau_grad: f64,
    out_grad: *mut f64,
) -> KgStatus {
    guard(|| {
        let (s, fm) = (handle(sig)?, handle(f)?);
        let g = surface_gradient(s, fm, point(s, x, dim)?, tau_grad)?;
        slice_mut(out_grad, dim, "out_grad")?.copy_from_slice(g.as_slice());
        Ok(())
    })
}

/// Laplace-Beltrami at `x` of the data model `f`, with geometry from `sig`.
///
/// # Safety
/// `x` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kg_laplace_beltrami(
    sig: *const KgModel,
    f: *const KgModel,
    x: *const f64,
    dim: usize,
    tau_grad: f64,
    out: *mut f64,
) -> KgStatus {
    guard(|| {
        let (s, fm) = (handle(sig)?, handle(f)?);
        let v = laplace_beltrami(s, fm, point(s, x, dim)?, tau_grad)?;
        store(out, v, "out")
    })
}

/// Dense `n x count` operator matrix, row-major, mapping values on the
/// points to operator values at `eval`. `kind` is
/// `KG_OPERATOR_LAPLACE_BELTRAMI` or a gradient component in `0..dim`.
///
/// # Safety
/// `out` must hold `n * count` values.
#[no_mangle]
pub unsafe extern "C" fn kg_assemble_operator(
    kernel_desc: *const c_char,
    coords: *const f64,
    count: usize,
    dim: usize,
    alpha: f64,
    eval: *const f64,
    n: usize,
    kind: i32,
    tau_grad: f64,
    out: *mut f64,
) -> KgStatus {
    guard(|| {
        let spec = kernel(kernel_desc)?;
        let pts = cloud(coords, count, dim, true)?;
        let ev = cloud(eval, n, dim, false)?;
        let kind = match kind {
            KG_OPERATOR_LAPLACE_BELTRAMI => OperatorKind::LaplaceBeltrami,
            i if i >= 0 => OperatorKind::SurfaceGradientComponent(i as usize),
            other => return Err(Failure(KgStatus::InvalidArgument, format!("unknown operator kind {other}"))),
        };
        let op = assemble_operator(&spec, &pts, alpha, &ev, kind, tau_grad)?;
        let dst = slice_mut(out, n * count, "out")?;
        for r in 0..n {
            for c in 0..count {
                dst[r * count + c] = op.matrix[(r, c)];
            }
        }
        Ok(())
    })
}

/// Posterior variance at `x` of the Gaussian process with covariance
/// `kernel` and noise variance `sigma2`, conditioned on the points.
///
/// # Safety
/// `x` must hold `dim` values.
#[no_mangle]
pub unsafe extern "C" fn kg_gpr_variance(
    kernel_desc: *const c_char,
    coords: *const f64,
    count: usize,
    dim: usize,
    sigma2: f64,
    x: *const f64,
    out: *mut f64,
) -> KgStatus {
    guard(|| {
        let spec = kernel(kernel_desc)?;
        check_dim(dim)?;
        let pts = if count == 0 { PointCloud::empty(dim) } else { cloud(coords, count, dim, true)? };
        let v = gpr_variance(&spec, &pts, slice(x, dim, "x")?, sigma2)?;
        store(out, v, "out")
    })
}

/// Serializes a model to JSON. Release the string with `kg_string_free`.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kg_model_to_json(model: *const KgModel, out_json: *mut *mut c_char) -> KgStatus {
    guard(|| {
        let m = handle(model)?;
        let s = CString::new(serialize(m)).map_err(|_| Failure(KgStatus::Panic, "interior NUL".into()))?;
        store(out_json, s.into_raw(), "out_json")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn kg_model_from_json(json: *const c_char, out_model: *mut *mut KgModel) -> KgStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out_model.is_null() {
            return Err(null("out_model"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Failure(KgStatus::MalformedInput, "model text is not UTF-8".into()))?;
        let m = deserialize(text)?;
        out_model.write(Box::into_raw(Box::new(KgModel { inner: m })));
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
