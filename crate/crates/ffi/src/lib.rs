//! C ABI over `schro_lab`.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns an
//! [`SlStatus`]; on failure the message is available from
//! [`sl_last_error_message`] until the next failing call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schro_lab::maximal::{random_bump_field, threshold, BumpField, BumpProfile, Family, ThresholdQuery};
use schro_lab::sequence::{build_block_sequence, build_power_sequence, weak_lr_quasinorm, BlockSpec, TimeSequence};
use schro_lab::{Error, SpectralField, SymbolKind};

/// Result codes. `SL_STATUS_OK` is zero; everything else is a failure.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Unsupported = 4,
    Parse = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Dispersion relation selector. `param` carries `a` for `Fractional` and
/// the sign (±1) for `Saddle`; it is ignored otherwise.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlSymbolKind {
    Elliptic = 0,
    Fractional = 1,
    Nonelliptic = 2,
    /// `ξ₁ξ₂` in two dimensions.
    Hyperbolic = 3,
    /// `ξ₁ξ₂ ± ξ₃²` in three dimensions.
    Saddle = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct SlSymbol {
    pub kind: SlSymbolKind,
    pub param: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlFamily {
    Schrodinger = 0,
    Fractional = 1,
    Nonelliptic = 2,
}

/// Opaque band-limited field.
pub struct SlField(SpectralField);

/// Opaque time sequence.
pub struct SlSequence(TimeSequence);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: SlStatus, msg: impl Into<String>) -> SlStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> SlStatus {
    let status = match &e {
        Error::DimensionMismatch { .. } => SlStatus::DimensionMismatch,
        Error::Unsupported(_) => SlStatus::Unsupported,
        Error::Json(_) => SlStatus::Parse,
        Error::Io(_) => SlStatus::Internal,
        _ => SlStatus::InvalidArgument,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `SL_STATUS_INTERNAL`.
fn guard(f: impl FnOnce() -> SlStatus) -> SlStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(SlStatus::Internal, "panic inside schro_lab"))
}

fn symbol(s: &SlSymbol, dimension: usize) -> SymbolKind {
    match s.kind {
        SlSymbolKind::Elliptic => SymbolKind::Elliptic,
        SlSymbolKind::Fractional => SymbolKind::Fractional { a: s.param },
        SlSymbolKind::Nonelliptic => SymbolKind::nonelliptic(dimension.max(1)),
        SlSymbolKind::Hyperbolic => SymbolKind::Hyperbolic2D,
        SlSymbolKind::Saddle => SymbolKind::Saddle3D {
            sign: if s.param < 0.0 { -1 } else { 1 },
        },
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(SlStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message for the most recent failure on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn sl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a field from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_from_json(json: *const c_char, out: *mut *mut SlField) -> SlStatus {
    non_null!(json, out);
    guard(|| {
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => return fail(SlStatus::Parse, "input is not valid UTF-8"),
        };
        match SpectralField::from_json(text) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(SlField(f)));
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Serializes a field to JSON. Release the string with [`sl_string_free`].
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_to_json(field: *const SlField, out: *mut *mut c_char) -> SlStatus {
    non_null!(field, out);
    guard(|| match (*field).0.to_json() {
        Ok(s) => match CString::new(s) {
            Ok(c) => {
                *out = c.into_raw();
                SlStatus::Ok
            }
            Err(_) => fail(SlStatus::Internal, "serialized field contains NUL"),
        },
        Err(e) => from_error(e),
    })
}

/// Seeded random sum of smooth bumps supported in `inner ≤ |ξ| < outer`,
/// sampled on the lattice `atom_step·ℤ^N`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_random(
    dimension: usize,
    inner: f64,
    outer: f64,
    atom_step: f64,
    bumps: usize,
    seed: u64,
    out: *mut *mut SlField,
) -> SlStatus {
    non_null!(out);
    guard(|| {
        let cfg = BumpField {
            dimension,
            inner,
            outer,
            atom_step,
            atom_offset: 0.0,
            bumps,
            width_fraction: 0.25,
            shift_radius: 1.0,
            profile: BumpProfile::Compact,
        };
        match random_bump_field(&cfg, &mut ChaCha8Rng::seed_from_u64(seed)) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(SlField(f)));
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `field` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_field_free(field: *mut SlField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_dimension(field: *const SlField, out: *mut usize) -> SlStatus {
    non_null!(field, out);
    *out = (*field).0.dimension();
    SlStatus::Ok
}

/// Frequency-side L² norm.
///
/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_l2_norm(field: *const SlField, out: *mut f64) -> SlStatus {
    non_null!(field, out);
    *out = (*field).0.l2_norm();
    SlStatus::Ok
}

/// # Safety
/// `field` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_sobolev_norm(field: *const SlField, s: f64, out: *mut f64) -> SlStatus {
    non_null!(field, out);
    *out = (*field).0.sobolev_norm(s);
    SlStatus::Ok
}

/// New field `e^{itσ(D)}f`.
///
/// # Safety
/// `field` must be a live handle; `sym` must point to a valid symbol; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_propagate(
    field: *const SlField,
    t: f64,
    sym: *const SlSymbol,
    out: *mut *mut SlField,
) -> SlStatus {
    non_null!(field, sym, out);
    guard(|| {
        let f = &(*field).0;
        match f.propagate(t, &symbol(&*sym, f.dimension())) {
            Ok(g) => {
                *out = Box::into_raw(Box::new(SlField(g)));
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// `e^{itσ(D)}f(x)` written to `re`/`im`. `x` holds `len` coordinates.
///
/// # Safety
/// `field` must be a live handle; `x` must point to `len` doubles; `sym`
/// must be valid; `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_field_evaluate(
    field: *const SlField,
    x: *const f64,
    len: usize,
    t: f64,
    sym: *const SlSymbol,
    re: *mut f64,
    im: *mut f64,
) -> SlStatus {
    non_null!(field, x, sym, re, im);
    guard(|| {
        let f = &(*field).0;
        let x = std::slice::from_raw_parts(x, len);
        match f.evaluate(x, t, &symbol(&*sym, f.dimension())) {
            Ok(v) => {
                *re = v.re;
                *im = v.im;
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

fn store_sequence(out: *mut *mut SlSequence, seq: schro_lab::Result<TimeSequence>) -> SlStatus {
    match seq {
        Ok(s) => {
            // SAFETY: callers check `out` before building the sequence.
            unsafe { *out = Box::into_raw(Box::new(SlSequence(s))) };
            SlStatus::Ok
        }
        Err(e) => from_error(e),
    }
}

/// `t_n = (n+1)^{−1/r}` for `n = 1..=count`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_power(r: f64, count: usize, out: *mut *mut SlSequence) -> SlStatus {
    non_null!(out);
    guard(|| store_sequence(out, build_power_sequence(r, count)))
}

/// Concatenated lattice blocks at scales `R_1 = first_scale, R_2, …`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_block(
    r: f64,
    dimension: usize,
    first_scale: f64,
    block_count: usize,
    out: *mut *mut SlSequence,
) -> SlStatus {
    non_null!(out);
    guard(|| {
        let spec = BlockSpec {
            r,
            dimension,
            first_scale,
            block_count,
        };
        store_sequence(out, build_block_sequence(&spec).map(|b| b.sequence))
    })
}

/// # Safety
/// `seq` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_free(seq: *mut SlSequence) {
    if !seq.is_null() {
        drop(Box::from_raw(seq));
    }
}

/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_len(seq: *const SlSequence, out: *mut usize) -> SlStatus {
    non_null!(seq, out);
    *out = (*seq).0.len();
    SlStatus::Ok
}

/// Copies the decreasing times into `buf`, which must hold `sl_sequence_len` values.
///
/// # Safety
/// `seq` must be a live handle; `buf` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_values(seq: *const SlSequence, buf: *mut f64, capacity: usize) -> SlStatus {
    non_null!(seq, buf);
    let values = (*seq).0.values();
    if capacity < values.len() {
        return fail(
            SlStatus::BufferTooSmall,
            format!("need {} values, buffer holds {capacity}", values.len()),
        );
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    SlStatus::Ok
}

/// `sup_b b^r ♯{n : t_n > b}`.
///
/// # Safety
/// `seq` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_sequence_quasinorm(seq: *const SlSequence, r: f64, out: *mut f64) -> SlStatus {
    non_null!(seq, out);
    guard(|| match weak_lr_quasinorm(&(*seq).0, r) {
        Ok(rep) => {
            *out = rep.quasinorm;
            SlStatus::Ok
        }
        Err(e) => from_error(e),
    })
}

/// Sharp regularity threshold `s₀`. Pass `r = INFINITY` for the continuous
/// case; `a` is read only for the fractional family. `inclusive` is set to 1
/// when the endpoint itself is admissible.
///
/// # Safety
/// `family` must be one of the enumerators; `s0` and `inclusive` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sl_threshold(
    family: SlFamily,
    a: f64,
    dimension: usize,
    r: f64,
    s0: *mut f64,
    inclusive: *mut i32,
) -> SlStatus {
    non_null!(s0, inclusive);
    guard(|| {
        let family = match family {
            SlFamily::Schrodinger => Family::Schrodinger,
            SlFamily::Fractional => Family::Fractional { a },
            SlFamily::Nonelliptic => Family::Nonelliptic,
        };
        let q = ThresholdQuery {
            family,
            dimension,
            r: if r == f64::INFINITY { None } else { Some(r) },
        };
        match threshold(&q) {
            Ok(t) => {
                *s0 = t.s0;
                *inclusive = i32::from(t.inclusive);
                SlStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}
