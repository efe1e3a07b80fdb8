//! C ABI over the quench library.
//!
//! Every function returns an [`XyStatus`]; on failure the message is kept per
//! thread and read with [`xy_last_error`]. Panics are caught at the boundary
//! and reported as [`XyStatus::Panic`]. Quench protocols are opaque handles
//! created by [`xy_quench_new`] and released by [`xy_quench_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use xydqpt::fisher::{critical_beta, find_crossings, CriticalBeta};
use xydqpt::loschmidt::{mode_amplitude, rate_finite, rate_integral};
use xydqpt::magnetization::{m_z, order_parameter, Direction, LimitStatus, OrderParamConfig};
use xydqpt::pfaffian::{pfaffian, SkewMatrix};
use xydqpt::{Error, InitialStateParams, ModelParams, QuenchProtocol, SystemSize};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Numerical = 3,
    BufferTooSmall = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XyDirection {
    X = 0,
    Y = 1,
}

/// Opaque quench protocol.
pub struct XyQuench {
    proto: QuenchProtocol,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(XyStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::NotSkew { .. } | Error::OddDimension(_) => XyStatus::InvalidArgument,
            ref e if e.is_numerical() => XyStatus::Numerical,
            _ => XyStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(XyStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> XyStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            XyStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            XyStatus::Panic
        }
    }
}

/// Writes through `out` after checking it.
///
/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn xy_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`) and returns the full message length plus one. Returns
/// 0 when the last call succeeded.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn xy_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match &*e.borrow() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
                *buf.add(n - 1) = 0;
            }
            bytes.len()
        }
    })
}

/// Creates a quench protocol. `n_sites = 0` selects the thermodynamic limit;
/// otherwise the chain length must be even.
///
/// # Safety
/// `out` must be valid for a pointer write. The handle must be released
/// with [`xy_quench_free`].
#[no_mangle]
pub unsafe extern "C" fn xy_quench_new(
    gamma0: f64,
    lambda0: f64,
    gammaf: f64,
    lambdaf: f64,
    beta: f64,
    phi: f64,
    n_sites: usize,
    out: *mut *mut XyQuench,
) -> XyStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let size = if n_sites == 0 {
            SystemSize::Thermodynamic
        } else {
            SystemSize::Finite(n_sites)
        };
        let proto = QuenchProtocol::new(
            ModelParams::new(gamma0, lambda0)?,
            ModelParams::new(gammaf, lambdaf)?,
            InitialStateParams::new(beta, phi)?,
            size,
        )?;
        out.write(Box::into_raw(Box::new(XyQuench { proto })));
        Ok(())
    })
}

/// Releases a handle from [`xy_quench_new`]. Null is ignored.
///
/// # Safety
/// `q` must be null or a live handle; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn xy_quench_free(q: *mut XyQuench) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// # Safety
/// `q` must be a live handle or null.
unsafe fn handle<'a>(q: *const XyQuench) -> Result<&'a QuenchProtocol, Failure> {
    q.as_ref()
        .map(|h| &h.proto)
        .ok_or_else(|| null("quench handle"))
}

/// Single-mode Loschmidt amplitude `G_k(t)`.
///
/// # Safety
/// `q` must be a live handle; `re` and `im` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xy_mode_amplitude(
    q: *const XyQuench,
    k: f64,
    t: f64,
    re: *mut f64,
    im: *mut f64,
) -> XyStatus {
    guard(|| {
        let g = mode_amplitude(handle(q)?, k, t)?;
        write(re, g.re, "re")?;
        write(im, g.im, "im")
    })
}

/// Rate function at `len` increasing times: the finite-chain sum for a finite
/// handle, the momentum integral otherwise.
///
/// # Safety
/// `times` must hold `len` values and `values` room for `len`.
#[no_mangle]
pub unsafe extern "C" fn xy_rate(
    q: *const XyQuench,
    times: *const f64,
    len: usize,
    values: *mut f64,
) -> XyStatus {
    guard(|| {
        let proto = handle(q)?;
        if times.is_null() || values.is_null() {
            return Err(null("times or values"));
        }
        let times = std::slice::from_raw_parts(times, len);
        let trace = match proto.size {
            SystemSize::Finite(_) => rate_finite(proto, times)?,
            SystemSize::Thermodynamic => rate_integral(proto, times)?,
        };
        ptr::copy_nonoverlapping(trace.values.as_ptr(), values, len);
        Ok(())
    })
}

/// Momenta `k*` where the Fisher zeros cross the imaginary axis, with the
/// post-quench energies there. `count` receives the number found; if it
/// exceeds `capacity` the first `capacity` are written and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `k_star` and `eps_post` must have room for `capacity` values (either may be
/// null when `capacity` is 0); `count` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xy_find_crossings(
    q: *const XyQuench,
    k_star: *mut f64,
    eps_post: *mut f64,
    capacity: usize,
    count: *mut usize,
) -> XyStatus {
    guard(|| {
        let found = find_crossings(handle(q)?);
        write(count, found.len(), "count")?;
        let n = found.len().min(capacity);
        if n > 0 && (k_star.is_null() || eps_post.is_null()) {
            return Err(null("k_star or eps_post"));
        }
        for (i, c) in found.iter().take(n).enumerate() {
            *k_star.add(i) = c.k_star;
            *eps_post.add(i) = c.eps_post;
        }
        if found.len() > capacity {
            return Err(Failure(
                XyStatus::BufferTooSmall,
                format!("{} crossings, capacity {capacity}", found.len()),
            ));
        }
        Ok(())
    })
}

/// Critical β of the handle's protocol with β left free: `+inf` when every β
/// in the bracket has a crossing and 0 when none has.
///
/// # Safety
/// `q` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xy_critical_beta(q: *const XyQuench, out: *mut f64) -> XyStatus {
    guard(|| {
        let value = match critical_beta(handle(q)?)? {
            CriticalBeta::Value(b) => b,
            CriticalBeta::AlwaysTransition => f64::INFINITY,
            CriticalBeta::NoTransition => 0.0,
        };
        write(out, value, "out")
    })
}

/// Long-distance order parameter of the initial state along `direction`.
/// `tol <= 0` selects the default tolerance. `converged` receives 1 if the
/// correlator limit converged, 0 otherwise.
///
/// # Safety
/// `value`, `r_used` and `converged` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xy_order_parameter(
    gamma: f64,
    lambda: f64,
    beta: f64,
    phi: f64,
    direction: XyDirection,
    tol: f64,
    value: *mut f64,
    r_used: *mut usize,
    converged: *mut i32,
) -> XyStatus {
    guard(|| {
        let mut cfg = OrderParamConfig::default();
        if tol > 0.0 {
            cfg.tol = tol;
        }
        let dir = match direction {
            XyDirection::X => Direction::X,
            XyDirection::Y => Direction::Y,
        };
        let m = order_parameter(
            &ModelParams::new(gamma, lambda)?,
            &InitialStateParams::new(beta, phi)?,
            dir,
            &cfg,
        )?;
        write(value, m.value, "value")?;
        write(r_used, m.r_used, "r_used")?;
        write(
            converged,
            i32::from(m.status == LimitStatus::Converged),
            "converged",
        )
    })
}

/// Transverse magnetization of the initial state on an even chain of `n_sites`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn xy_m_z(
    gamma: f64,
    lambda: f64,
    beta: f64,
    phi: f64,
    n_sites: usize,
    out: *mut f64,
) -> XyStatus {
    guard(|| {
        let v = m_z(
            &ModelParams::new(gamma, lambda)?,
            &InitialStateParams::new(beta, phi)?,
            n_sites,
        )?;
        write(out, v, "out")
    })
}

/// Pfaffian of a row-major skew-symmetric `dim × dim` matrix. `im` may be
/// null for a real matrix.
///
/// # Safety
/// `re` (and `im` when non-null) must hold `dim * dim` values; `out_re` and
/// `out_im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn xy_pfaffian(
    re: *const f64,
    im: *const f64,
    dim: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> XyStatus {
    guard(|| {
        if re.is_null() {
            return Err(null("re"));
        }
        let len = dim
            .checked_mul(dim)
            .ok_or_else(|| Failure(XyStatus::InvalidArgument, "dimension overflows".into()))?;
        let re = std::slice::from_raw_parts(re, len);
        let pf = if im.is_null() {
            Complex64::new(pfaffian(&SkewMatrix::new(dim, re.to_vec())?), 0.0)
        } else {
            let im = std::slice::from_raw_parts(im, len);
            let data = re
                .iter()
                .zip(im)
                .map(|(&a, &b)| Complex64::new(a, b))
                .collect();
            pfaffian(&SkewMatrix::new(dim, data)?)
        };
        write(out_re, pf.re, "out_re")?;
        write(out_im, pf.im, "out_im")
    })
}
