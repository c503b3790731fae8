//! C ABI over `sparse-ldp`.
//!
//! Channels and specs are opaque handles created by `*_new`/`*_from_json`
//! and released with the matching `*_free`. Every fallible call returns an
//! [`SldpStatus`]; on failure a message is available from
//! [`sldp_last_error_message`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sparse_ldp::{
    calibration, mechanism::KernelFamily, privacy, Error, MechanismSpec, TruncatedMechanism,
    TruncatedParams,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SldpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    EvenSupportSize = 3,
    InputNotFound = 4,
    ParseError = 5,
    InvalidSpec = 6,
    BufferTooSmall = 7,
    Precondition = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SldpFamily {
    Laplace = 0,
    Gaussian = 1,
}

/// Opaque radius-truncated channel.
pub struct SldpTruncated(TruncatedMechanism);

/// Opaque general mechanism spec.
pub struct SldpSpec(MechanismSpec);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SldpDefect {
    pub support_leakage: f64,
    pub overlap_excess: f64,
    pub total: f64,
}

/// Pure-LDP level. `epsilon_star` is meaningful only when `finite`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SldpPureLdp {
    pub finite: bool,
    pub epsilon_star: f64,
    pub has_witness: bool,
    pub witness_x: i64,
    pub witness_x_prime: i64,
    pub witness_output: i64,
}

/// Design search outcome. `s_chosen`, `delta_star`, `r1`, `r2` are
/// meaningful only when `feasible`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SldpDesign {
    pub feasible: bool,
    pub s_chosen: u64,
    pub delta_star: f64,
    pub r1: f64,
    pub r2: f64,
    pub s_scanned_max: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn status_of(e: &Error) -> SldpStatus {
    match e {
        Error::InputNotFound(_) => SldpStatus::InputNotFound,
        Error::EvenSupportSize(_) => SldpStatus::EvenSupportSize,
        Error::InvalidSpec(_) => SldpStatus::InvalidSpec,
        Error::Parse(_) => SldpStatus::ParseError,
        Error::Precondition(_) => SldpStatus::Precondition,
        Error::InvalidKernel(_)
        | Error::InvalidArgument(_)
        | Error::NotNormalized(_)
        | Error::OutsideOverlap { .. }
        | Error::ZeroSeparation => SldpStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SldpStatusError>) -> SldpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SldpStatus::Ok,
        Ok(Err(SldpStatusError(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            SldpStatus::Panic
        }
    }
}

struct SldpStatusError(SldpStatus, String);

impl From<Error> for SldpStatusError {
    fn from(e: Error) -> Self {
        SldpStatusError(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> SldpStatusError {
    SldpStatusError(SldpStatus::NullPointer, format!("`{what}` is null"))
}

fn family(kind: SldpFamily, param: f64) -> Result<KernelFamily, Error> {
    match kind {
        SldpFamily::Laplace => KernelFamily::laplace(param),
        SldpFamily::Gaussian => KernelFamily::gaussian(param),
    }
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sldp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Creates a truncated channel with odd support size `s`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_new(
    kind: SldpFamily,
    param: f64,
    s: u64,
    out: *mut *mut SldpTruncated,
) -> SldpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let mechanism = TruncatedMechanism::new(family(kind, param)?, s)?;
        *out = Box::into_raw(Box::new(SldpTruncated(mechanism)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or a pointer from [`sldp_truncated_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_free(handle: *mut SldpTruncated) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Support size, or 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_support_size(handle: *const SldpTruncated) -> u64 {
    handle.as_ref().map_or(0, |h| h.0.support_size())
}

/// Writes the `s` atoms of `Q(· | x)` into `outputs`/`probs` (capacity
/// `capacity`) and their count into `len`. With too small a buffer, `len`
/// receives the required capacity and `BufferTooSmall` is returned.
///
/// # Safety
/// `handle` must be live; `outputs` and `probs` must point to `capacity`
/// writable elements; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_pmf(
    handle: *const SldpTruncated,
    x: i64,
    outputs: *mut i64,
    probs: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if len.is_null() {
            return Err(null("len"));
        }
        let atoms = h.0.support_pmf(x);
        *len = atoms.len();
        if capacity < atoms.len() {
            return Err(SldpStatusError(
                SldpStatus::BufferTooSmall,
                format!("need capacity {}, got {capacity}", atoms.len()),
            ));
        }
        if outputs.is_null() || probs.is_null() {
            return Err(null("outputs/probs"));
        }
        for (i, (y, p)) in atoms.into_iter().enumerate() {
            *outputs.add(i) = y;
            *probs.add(i) = p;
        }
        Ok(())
    })
}

/// # Safety
/// `handle` must be live; `r1` and `r2` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_moments(
    handle: *const SldpTruncated,
    r1: *mut f64,
    r2: *mut f64,
) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if r1.is_null() || r2.is_null() {
            return Err(null("r1/r2"));
        }
        let m = h.0.distortion_moments();
        *r1 = m.r1;
        *r2 = m.r2;
        Ok(())
    })
}

/// Defect between inputs `0` and `h`.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_separation_defect(
    handle: *const SldpTruncated,
    epsilon: f64,
    h: u64,
    out: *mut SldpDefect,
) -> SldpStatus {
    guard(|| {
        let handle = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        // validates epsilon
        TruncatedParams::new(handle.0.family(), handle.0.support_size(), h, epsilon)?;
        let b = privacy::separation_breakdown(handle.0.family(), handle.0.radius(), h, epsilon);
        *out = SldpDefect {
            support_leakage: b.support_leakage,
            overlap_excess: b.overlap_excess,
            total: b.total,
        };
        Ok(())
    })
}

/// Worst defect over separations `0..=range`, with the smallest maximizing
/// separation.
///
/// # Safety
/// `handle` must be live; `delta_star` and `argmax_h` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_worst_case(
    handle: *const SldpTruncated,
    epsilon: f64,
    range: u64,
    delta_star: *mut f64,
    argmax_h: *mut u64,
) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if delta_star.is_null() || argmax_h.is_null() {
            return Err(null("delta_star/argmax_h"));
        }
        let params = TruncatedParams::new(h.0.family(), h.0.support_size(), range, epsilon)?;
        let worst = privacy::worst_case_defect(&params);
        *delta_star = worst.delta_star;
        *argmax_h = worst.argmax_h;
        Ok(())
    })
}

/// Writes `n` seeded draws from `Q(· | x)` into `out`.
///
/// # Safety
/// `handle` must be live; `out` must point to `n` writable elements.
#[no_mangle]
pub unsafe extern "C" fn sldp_truncated_sample(
    handle: *const SldpTruncated,
    x: i64,
    seed: u64,
    n: usize,
    out: *mut i64,
) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if n > 0 && out.is_null() {
            return Err(null("out"));
        }
        let draws = sparse_ldp::sample(&h.0, x, seed, n)?;
        for (i, d) in draws.into_iter().enumerate() {
            *out.add(i) = d;
        }
        Ok(())
    })
}

/// Smallest odd support size whose worst defect over `0..=range` is at most
/// `delta`. `s_max = 0` selects the default scan limit.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_min_feasible_support(
    kind: SldpFamily,
    param: f64,
    epsilon: f64,
    delta: f64,
    range: u64,
    s_max: u64,
    out: *mut SldpDesign,
) -> SldpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s_max = (s_max != 0).then_some(s_max);
        let r = calibration::min_feasible_support(family(kind, param)?, epsilon, delta, range, s_max)?;
        let moments = r.moments.unwrap_or(sparse_ldp::DistortionMoments { r1: 0.0, r2: 0.0 });
        *out = SldpDesign {
            feasible: r.feasible,
            s_chosen: r.s_chosen.unwrap_or(0),
            delta_star: r.achieved_delta_star.unwrap_or(f64::NAN),
            r1: moments.r1,
            r2: moments.r2,
            s_scanned_max: r.s_scanned_max,
        };
        Ok(())
    })
}

/// Parses a mechanism spec from a NUL-terminated UTF-8 JSON document.
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_spec_from_json(json: *const c_char, out: *mut *mut SldpSpec) -> SldpStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| SldpStatusError(SldpStatus::ParseError, e.to_string()))?;
        let spec = MechanismSpec::from_json(text)?;
        *out = Box::into_raw(Box::new(SldpSpec(spec)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or a live pointer from [`sldp_spec_from_json`].
#[no_mangle]
pub unsafe extern "C" fn sldp_spec_free(handle: *mut SldpSpec) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_spec_pure_ldp(handle: *const SldpSpec, out: *mut SldpPureLdp) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let r = privacy::pure_ldp_epsilon(&h.0);
        let w = r.witness;
        *out = SldpPureLdp {
            finite: r.finite,
            epsilon_star: r.epsilon_star.unwrap_or(f64::INFINITY),
            has_witness: w.is_some(),
            witness_x: w.map_or(0, |w| w.x),
            witness_x_prime: w.map_or(0, |w| w.x_prime),
            witness_output: w.map_or(0, |w| w.output),
        };
        Ok(())
    })
}

/// Ordered defect of `x` against `x_prime` at level `epsilon`.
///
/// # Safety
/// `handle` must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sldp_spec_ordered_defect(
    handle: *const SldpSpec,
    x: i64,
    x_prime: i64,
    epsilon: f64,
    out: *mut SldpDefect,
) -> SldpStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = privacy::ordered_defect(&h.0, x, x_prime, epsilon)?;
        *out = SldpDefect {
            support_leakage: b.support_leakage,
            overlap_excess: b.overlap_excess,
            total: b.total,
        };
        Ok(())
    })
}
