//! C ABI for the weighted-region shortest path solver.
//!
//! Meshes and results are opaque handles created and freed by this library.
//! Every fallible call returns a [`WrspError`]; the message of the most
//! recent failure on the calling thread is available through
//! [`wrsp_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wrsp_core::wavefront::Status;
use wrsp_core::{
    parse_mesh, shortest_path, PathResult, PlanarSubdivision, SolverConfig, SolverError,
};

/// Opaque triangulated weighted mesh.
pub struct WrspMesh(PlanarSubdivision);

/// Opaque solver outcome.
pub struct WrspResult(PathResult);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrspError {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseMesh = 3,
    UnknownVertex = 4,
    BadConfig = 5,
    NoPath = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WrspStatus {
    Complete = 0,
    /// A resource cap stopped the run; the path, if any, is the best found.
    Partial = 1,
    NoPath = 2,
}

/// Solver parameters. Start from [`wrsp_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrspConfig {
    pub epsilon: f64,
    pub k_const: f64,
    /// Spacing of critically reflected rays; `<= 0` selects the default.
    pub delta: f64,
    pub min_angle: f64,
    pub max_rays: u64,
    pub max_events: u64,
    pub max_traced_rays: u64,
    pub audit: bool,
    pub polish: bool,
}

impl From<&WrspConfig> for SolverConfig {
    fn from(c: &WrspConfig) -> Self {
        SolverConfig {
            epsilon: c.epsilon,
            k_const: c.k_const,
            delta: (c.delta > 0.0).then_some(c.delta),
            min_angle: c.min_angle,
            max_rays: c.max_rays,
            max_events: c.max_events,
            max_traced_rays: c.max_traced_rays,
            audit: c.audit,
            polish: c.polish,
            ..SolverConfig::default()
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(code: WrspError, message: impl Into<String>) -> WrspError {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
    code
}

fn guard(f: impl FnOnce() -> WrspError) -> WrspError {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(WrspError::Panic, "internal panic"))
}

/// Message for the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn wrsp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn wrsp_config_default() -> WrspConfig {
    let d = SolverConfig::default();
    WrspConfig {
        epsilon: d.epsilon,
        k_const: d.k_const,
        delta: 0.0,
        min_angle: d.min_angle,
        max_rays: d.max_rays,
        max_events: d.max_events,
        max_traced_rays: d.max_traced_rays,
        audit: d.audit,
        polish: d.polish,
    }
}

/// Parses a mesh from NUL-terminated text in the `v x y` / `f a b c w`
/// format.
///
/// # Safety
/// `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wrsp_mesh_parse(
    text: *const c_char,
    out: *mut *mut WrspMesh,
) -> WrspError {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(WrspError::NullPointer, "null argument");
        }
        // SAFETY: checked non-null; the caller guarantees NUL termination.
        let Ok(text) = unsafe { CStr::from_ptr(text) }.to_str() else {
            return fail(WrspError::InvalidUtf8, "mesh text is not UTF-8");
        };
        match parse_mesh(text) {
            Ok(sub) => {
                // SAFETY: checked non-null; the caller guarantees validity.
                unsafe { *out = Box::into_raw(Box::new(WrspMesh(sub))) };
                WrspError::Ok
            }
            Err(e) => fail(WrspError::ParseMesh, e.to_string()),
        }
    })
}

/// # Safety
/// `mesh` must be NULL or a handle from [`wrsp_mesh_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wrsp_mesh_free(mesh: *mut WrspMesh) {
    if !mesh.is_null() {
        // SAFETY: the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(mesh) });
    }
}

/// # Safety
/// `mesh` must be NULL or a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn wrsp_mesh_vertex_count(mesh: *const WrspMesh) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { mesh.as_ref() }.map_or(0, |m| m.0.vertex_count())
}

/// # Safety
/// `mesh` must be NULL or a live mesh handle.
#[no_mangle]
pub unsafe extern "C" fn wrsp_mesh_face_count(mesh: *const WrspMesh) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { mesh.as_ref() }.map_or(0, |m| m.0.faces().len())
}

/// Runs the solver from vertex `source` to vertex `target`. A NULL `config`
/// uses the defaults. A run that ends without a path still yields a result
/// handle; query it with [`wrsp_result_status`].
///
/// # Safety
/// `mesh` must be a live mesh handle, `config` NULL or valid, and `out`
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wrsp_solve(
    mesh: *const WrspMesh,
    source: usize,
    target: usize,
    config: *const WrspConfig,
    out: *mut *mut WrspResult,
) -> WrspError {
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let Some(mesh) = (unsafe { mesh.as_ref() }) else {
            return fail(WrspError::NullPointer, "null mesh");
        };
        if out.is_null() {
            return fail(WrspError::NullPointer, "null output pointer");
        }
        // SAFETY: caller guarantees a valid config or NULL.
        let cfg = unsafe { config.as_ref() }.map_or_else(SolverConfig::default, SolverConfig::from);
        match shortest_path(&mesh.0, source, target, &cfg) {
            Ok(r) => {
                // SAFETY: checked non-null.
                unsafe { *out = Box::into_raw(Box::new(WrspResult(r))) };
                WrspError::Ok
            }
            Err(e @ SolverError::UnknownVertex(_)) => fail(WrspError::UnknownVertex, e.to_string()),
            Err(e @ SolverError::BadConfig { .. }) => fail(WrspError::BadConfig, e.to_string()),
        }
    })
}

/// # Safety
/// `result` must be NULL or a handle from [`wrsp_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_free(result: *mut WrspResult) {
    if !result.is_null() {
        // SAFETY: the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(result) });
    }
}

/// # Safety
/// `result` must be a live result handle.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_status(result: *const WrspResult) -> WrspStatus {
    // SAFETY: caller guarantees a live handle or NULL.
    match unsafe { result.as_ref() }.map(|r| r.0.status) {
        Some(Status::Complete) => WrspStatus::Complete,
        Some(Status::Partial { .. }) => WrspStatus::Partial,
        Some(Status::NoPath) | None => WrspStatus::NoPath,
    }
}

/// Weighted length of the reported path.
///
/// # Safety
/// `result` must be a live result handle and `cost` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_cost(result: *const WrspResult, cost: *mut f64) -> WrspError {
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let Some(r) = (unsafe { result.as_ref() }) else {
            return fail(WrspError::NullPointer, "null result");
        };
        if cost.is_null() {
            return fail(WrspError::NullPointer, "null output pointer");
        }
        match r.0.cost {
            Some(c) => {
                // SAFETY: checked non-null.
                unsafe { *cost = c };
                WrspError::Ok
            }
            None => fail(WrspError::NoPath, "no path was found"),
        }
    })
}

/// Number of polyline points of the reported path (0 without a path).
///
/// # Safety
/// `result` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_point_count(result: *const WrspResult) -> usize {
    // SAFETY: caller guarantees a live handle or NULL.
    unsafe { result.as_ref() }.map_or(0, |r| r.0.polyline.len())
}

/// Copies the path polyline into `xs` and `ys`, each holding `capacity`
/// values.
///
/// # Safety
/// `result` must be a live result handle; `xs` and `ys` must be valid for
/// `capacity` writes.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_points(
    result: *const WrspResult,
    xs: *mut f64,
    ys: *mut f64,
    capacity: usize,
) -> WrspError {
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let Some(r) = (unsafe { result.as_ref() }) else {
            return fail(WrspError::NullPointer, "null result");
        };
        let pts = &r.0.polyline;
        if pts.len() > capacity {
            return fail(
                WrspError::BufferTooSmall,
                format!("need room for {} points", pts.len()),
            );
        }
        if pts.is_empty() {
            return WrspError::Ok;
        }
        if xs.is_null() || ys.is_null() {
            return fail(WrspError::NullPointer, "null output buffer");
        }
        for (i, p) in pts.iter().enumerate() {
            // SAFETY: i < len <= capacity, and the caller sized the buffers.
            unsafe {
                *xs.add(i) = p.x;
                *ys.add(i) = p.y;
            }
        }
        WrspError::Ok
    })
}

/// The full result as a JSON document. Free it with [`wrsp_string_free`].
/// Returns NULL on failure.
///
/// # Safety
/// `result` must be NULL or a live result handle.
#[no_mangle]
pub unsafe extern "C" fn wrsp_result_json(result: *const WrspResult) -> *mut c_char {
    let mut text = None;
    guard(|| {
        // SAFETY: caller guarantees a live handle or NULL.
        let Some(r) = (unsafe { result.as_ref() }) else {
            return fail(WrspError::NullPointer, "null result");
        };
        let json = serde_json::to_string(&r.0).expect("result serializes");
        text = CString::new(json).ok();
        WrspError::Ok
    });
    text.map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wrsp_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: the string came from CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}
