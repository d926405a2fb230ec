//! C interface to the channel-metrics library: opaque channel handles, flat
//! report structs, and status codes matching the CLI exit codes where the two
//! overlap (parse 2, validation 3, dimension mismatch 4).
//!
//! Every function is panic-proof: failures come back as a [`QchanStatus`]
//! with detail retrievable through [`qchan_last_error_message`]. Strings
//! returned through out-pointers are owned by the caller and must be released
//! with [`qchan_string_free`]; channels with [`qchan_channel_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qchan::circuit::{estimate_superfidelity, exact_p0, ShotPlan};
use qchan::families::{dephasing_qubit, depolarizing, werner_holevo};
use qchan::metrics::process_metrics;
use qchan::random::{random_channel, RandomSource};
use qchan::spec_file::{channel_to_json, parse_channel};
use qchan::{C64, Channel, QchanError};

/// Opaque channel handle; build one with a constructor or
/// [`qchan_channel_from_json`], release it with [`qchan_channel_free`].
pub struct QchanChannel {
    inner: Channel,
}

/// Call outcome. Zero is success; anything else leaves a human-readable
/// explanation in [`qchan_last_error_message`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QchanStatus {
    Ok = 0,
    NullArgument = 1,
    ParseError = 2,
    ValidationError = 3,
    DimensionMismatch = 4,
    InvalidParameter = 5,
    NumericalError = 6,
}

/// Every similarity and distance measure between two channels, evaluated on
/// their Jamiołkowski states.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QchanMetricReport {
    /// Fidelity F, clamped to [0, 1].
    pub fidelity: f64,
    /// Superfidelity G ≥ F, clamped to [0, 1].
    pub superfidelity: f64,
    /// Trace distance ½·tr|ρ−σ|.
    pub trace_distance: f64,
    /// √(2 − 2√F).
    pub bures_bf: f64,
    /// √(1 − F).
    pub root_infidelity_cf: f64,
    /// √(1 − G); a metric.
    pub root_superinfidelity_cg: f64,
    /// arccos(G); a metric.
    pub angle_ag2: f64,
    /// √(2 − 2√G); NOT a metric, diagnostic only.
    pub bures_bg: f64,
    /// Fidelity before clamping.
    pub raw_fidelity: f64,
    /// Superfidelity before clamping.
    pub raw_superfidelity: f64,
}

/// Outcome of the three-stage interference estimate of the superfidelity.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QchanEstimateReport {
    pub superfidelity_estimate: f64,
    pub superfidelity_exact: f64,
    pub overlap_estimate: f64,
    pub overlap_exact: f64,
    pub purity_a_estimate: f64,
    pub purity_a_exact: f64,
    pub purity_b_estimate: f64,
    pub purity_b_exact: f64,
    pub overlap_stderr: f64,
    pub purity_a_stderr: f64,
    pub purity_b_stderr: f64,
    pub overlap_shots: u64,
    pub purity_a_shots: u64,
    pub purity_b_shots: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let owned = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(owned));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn status_of(err: &QchanError) -> QchanStatus {
    match err {
        QchanError::Parse(_) => QchanStatus::ParseError,
        QchanError::Validation(_)
        | QchanError::NotPositive { .. }
        | QchanError::NotHermitian { .. } => QchanStatus::ValidationError,
        QchanError::DimMismatch { .. } => QchanStatus::DimensionMismatch,
        QchanError::InvalidParameter { .. } | QchanError::NotDistribution(_) => {
            QchanStatus::InvalidParameter
        }
        _ => QchanStatus::NumericalError,
    }
}

fn fail(err: QchanError) -> QchanStatus {
    let status = status_of(&err);
    set_last_error(&err.to_string());
    status
}

fn null_argument(name: &str) -> QchanStatus {
    set_last_error(&format!("{name} must not be null"));
    QchanStatus::NullArgument
}

fn guarded(f: impl FnOnce() -> QchanStatus) -> QchanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            QchanStatus::NumericalError
        }
    }
}

fn channel_ref<'a>(ptr: *const QchanChannel, name: &str) -> Result<&'a Channel, QchanStatus> {
    if ptr.is_null() {
        return Err(null_argument(name));
    }
    Ok(unsafe { &(*ptr).inner })
}

fn deliver(result: qchan::Result<Channel>, out: *mut *mut QchanChannel) -> QchanStatus {
    if out.is_null() {
        return null_argument("out");
    }
    match result {
        Ok(ch) => {
            clear_last_error();
            unsafe { *out = Box::into_raw(Box::new(QchanChannel { inner: ch })) };
            QchanStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn qchan_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static one-line description of a status code; never freed.
#[no_mangle]
pub extern "C" fn qchan_status_message(status: QchanStatus) -> *const c_char {
    let text: &'static str = match status {
        QchanStatus::Ok => "ok\0",
        QchanStatus::NullArgument => "a required pointer was null\0",
        QchanStatus::ParseError => "input could not be parsed\0",
        QchanStatus::ValidationError => "channel is not CP-TP within tolerance\0",
        QchanStatus::DimensionMismatch => "operands have different dimensions\0",
        QchanStatus::InvalidParameter => "parameter outside its admissible range\0",
        QchanStatus::NumericalError => "numerical computation failed\0",
    };
    text.as_ptr() as *const c_char
}

/// Detail of the most recent failure on this thread, or null when the last
/// call succeeded. The caller owns the string: release it with
/// [`qchan_string_free`].
#[no_mangle]
pub extern "C" fn qchan_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Releases a string returned by this library. Null is a no-op.
#[no_mangle]
pub extern "C" fn qchan_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Parses a channel from its JSON description (Kraus, Choi, superoperator,
/// affine, or named family form).
#[no_mangle]
pub extern "C" fn qchan_channel_from_json(
    json: *const c_char,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| {
        if json.is_null() {
            return null_argument("json");
        }
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => {
                set_last_error("channel JSON is not valid UTF-8");
                return QchanStatus::ParseError;
            }
        };
        deliver(parse_channel(text), out)
    })
}

/// Serializes a channel to JSON in its stored representation.
#[no_mangle]
pub extern "C" fn qchan_channel_to_json(
    ch: *const QchanChannel,
    out: *mut *mut c_char,
) -> QchanStatus {
    guarded(|| {
        let channel = match channel_ref(ch, "channel") {
            Ok(c) => c,
            Err(s) => return s,
        };
        if out.is_null() {
            return null_argument("out");
        }
        match channel_to_json(channel) {
            Ok(json) => match CString::new(json) {
                Ok(owned) => {
                    clear_last_error();
                    unsafe { *out = owned.into_raw() };
                    QchanStatus::Ok
                }
                Err(_) => {
                    set_last_error("serialized JSON contained a NUL byte");
                    QchanStatus::NumericalError
                }
            },
            Err(e) => fail(e),
        }
    })
}

/// Releases a channel handle. Null is a no-op.
#[no_mangle]
pub extern "C" fn qchan_channel_free(ch: *mut QchanChannel) {
    if !ch.is_null() {
        drop(unsafe { Box::from_raw(ch) });
    }
}

/// The dimension the channel acts on, or 0 for a null handle.
#[no_mangle]
pub extern "C" fn qchan_channel_dim(ch: *const QchanChannel) -> usize {
    match channel_ref(ch, "channel") {
        Ok(c) => c.dim(),
        Err(_) => 0,
    }
}

/// Checks the channel is CP-TP within tolerance; the failure message carries
/// the defect magnitudes.
#[no_mangle]
pub extern "C" fn qchan_channel_validate(ch: *const QchanChannel) -> QchanStatus {
    guarded(|| match channel_ref(ch, "channel") {
        Ok(c) => match c.validate() {
            Ok(()) => {
                clear_last_error();
                QchanStatus::Ok
            }
            Err(e) => fail(e),
        },
        Err(s) => s,
    })
}

/// The identity channel on `dim`-dimensional states.
#[no_mangle]
pub extern "C" fn qchan_channel_identity(dim: usize, out: *mut *mut QchanChannel) -> QchanStatus {
    guarded(|| {
        if dim == 0 {
            return fail(QchanError::InvalidParameter {
                name: "dim".into(),
                value: "0".into(),
                bound: "≥ 1".into(),
            });
        }
        deliver(Ok(Channel::identity(dim)), out)
    })
}

/// Depolarizing channel `ρ ↦ p·ρ + (1−p)·I/d` for `p ∈ [−1/(d²−1), 1]`.
#[no_mangle]
pub extern "C" fn qchan_channel_depolarizing(
    dim: usize,
    p: f64,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| deliver(depolarizing(dim, p), out))
}

/// Werner–Holevo channel `ρ ↦ p·ρᵀ + (1−p)·I/d` for `p ∈ [−1/(d−1), 1/(d+1)]`.
#[no_mangle]
pub extern "C" fn qchan_channel_werner_holevo(
    dim: usize,
    p: f64,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| deliver(werner_holevo(dim, p), out))
}

/// Qubit dephasing channel scaling the off-diagonal element by `f`, `|f| ≤ 1`.
#[no_mangle]
pub extern "C" fn qchan_channel_dephasing_qubit(
    f_re: f64,
    f_im: f64,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| deliver(dephasing_qubit(C64::new(f_re, f_im)), out))
}

/// A CP-TP channel drawn from the Ginibre-based ensemble, deterministic in
/// the seed.
#[no_mangle]
pub extern "C" fn qchan_channel_random(
    seed: u64,
    dim: usize,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| {
        let mut rng = RandomSource::new(seed).rng();
        deliver(random_channel(&mut rng, dim), out)
    })
}

/// The composition applying `earlier` first and `later` second.
#[no_mangle]
pub extern "C" fn qchan_channel_compose(
    later: *const QchanChannel,
    earlier: *const QchanChannel,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| {
        let l = match channel_ref(later, "later") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let e = match channel_ref(earlier, "earlier") {
            Ok(c) => c,
            Err(s) => return s,
        };
        deliver(l.compose(e), out)
    })
}

/// The tensor product channel acting factor-wise.
#[no_mangle]
pub extern "C" fn qchan_channel_tensor(
    a: *const QchanChannel,
    b: *const QchanChannel,
    out: *mut *mut QchanChannel,
) -> QchanStatus {
    guarded(|| {
        let left = match channel_ref(a, "a") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let right = match channel_ref(b, "b") {
            Ok(c) => c,
            Err(s) => return s,
        };
        deliver(Ok(left.tensor(right)), out)
    })
}

/// Computes every metric between two channels after validating both.
#[no_mangle]
pub extern "C" fn qchan_process_metrics(
    a: *const QchanChannel,
    b: *const QchanChannel,
    out: *mut QchanMetricReport,
) -> QchanStatus {
    guarded(|| {
        let left = match channel_ref(a, "a") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let right = match channel_ref(b, "b") {
            Ok(c) => c,
            Err(s) => return s,
        };
        if out.is_null() {
            return null_argument("out");
        }
        match process_metrics(left, right) {
            Ok(r) => {
                clear_last_error();
                unsafe {
                    *out = QchanMetricReport {
                        fidelity: r.fidelity,
                        superfidelity: r.superfidelity,
                        trace_distance: r.trace_distance,
                        bures_bf: r.bures_bf,
                        root_infidelity_cf: r.root_infidelity_cf,
                        root_superinfidelity_cg: r.root_superinfidelity_cg,
                        angle_ag2: r.angle_ag2,
                        bures_bg: r.bures_bg,
                        raw_fidelity: r.raw_fidelity,
                        raw_superfidelity: r.raw_superfidelity,
                    };
                }
                QchanStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Exact control-zero probability `(1 + tr(ρ_a ρ_b))/2` of the interference
/// stage.
#[no_mangle]
pub extern "C" fn qchan_exact_p0(
    a: *const QchanChannel,
    b: *const QchanChannel,
    out: *mut f64,
) -> QchanStatus {
    guarded(|| {
        let left = match channel_ref(a, "a") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let right = match channel_ref(b, "b") {
            Ok(c) => c,
            Err(s) => return s,
        };
        if out.is_null() {
            return null_argument("out");
        }
        match exact_p0(left, right) {
            Ok(p) => {
                clear_last_error();
                unsafe { *out = p };
                QchanStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Superfidelity estimate from the three-stage interference experiment with
/// `shots` measurements per stage, deterministic in the seed. `shots = 0`
/// reproduces the exact values.
#[no_mangle]
pub extern "C" fn qchan_estimate_superfidelity(
    a: *const QchanChannel,
    b: *const QchanChannel,
    shots: u64,
    seed: u64,
    out: *mut QchanEstimateReport,
) -> QchanStatus {
    guarded(|| {
        let left = match channel_ref(a, "a") {
            Ok(c) => c,
            Err(s) => return s,
        };
        let right = match channel_ref(b, "b") {
            Ok(c) => c,
            Err(s) => return s,
        };
        if out.is_null() {
            return null_argument("out");
        }
        let mut rng = RandomSource::new(seed).rng();
        match estimate_superfidelity(left, right, &ShotPlan::uniform(shots), &mut rng) {
            Ok(r) => {
                clear_last_error();
                unsafe {
                    *out = QchanEstimateReport {
                        superfidelity_estimate: r.superfidelity_estimate,
                        superfidelity_exact: r.superfidelity_exact,
                        overlap_estimate: r.overlap_estimate,
                        overlap_exact: r.overlap_exact,
                        purity_a_estimate: r.purity_a_estimate,
                        purity_a_exact: r.purity_a_exact,
                        purity_b_estimate: r.purity_b_estimate,
                        purity_b_exact: r.purity_b_exact,
                        overlap_stderr: r.overlap_stderr,
                        purity_a_stderr: r.purity_a_stderr,
                        purity_b_stderr: r.purity_b_stderr,
                        overlap_shots: r.plan.overlap_shots,
                        purity_a_shots: r.plan.purity_a_shots,
                        purity_b_shots: r.plan.purity_b_shots,
                    };
                }
                QchanStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
