//! C ABI over `kakeya-arcs`.
//!
//! Scenes and plans are opaque heap handles released with their `_free`
//! function. Every call returns a [`KkStatus`]; on failure a message is
//! available from [`kk_last_error_message`] on the same thread. Strings
//! returned through out-parameters are released with [`kk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kakeya_arcs::area::{monte_carlo_swept_area, tn_minus_delta_area, AreaEstimate};
use kakeya_arcs::cli::verify_reports;
use kakeya_arcs::geometry::horn_area;
use kakeya_arcs::motion::{build_motion_plan, pose_at, MotionPlan, DEFAULT_ARC_LEN};
use kakeya_arcs::sprouting::{build_scene, SproutConfig, SproutScene, DEFAULT_R};
use kakeya_arcs::{KakeyaError, Precision, Scalar};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidSpec = 3,
    HypothesesViolated = 4,
    ConstructionFailed = 5,
    SceneIncomplete = 6,
    ArcTooLong = 7,
    RecursionInfeasible = 8,
    OutOfRange = 9,
    GeometryError = 10,
    Internal = 11,
}

/// Scene parameters. Numbers are decimal strings so that big-float scenes
/// are read exactly; a null `r` means the default 1.227.
#[repr(C)]
pub struct KkConfig {
    pub h: *const c_char,
    pub eps: *const c_char,
    pub r: *const c_char,
    pub n: u32,
    /// 0 for hardware doubles, otherwise a mantissa width of at least 64 bits.
    pub precision_bits: u32,
    pub strict: bool,
}

/// An arc in f64: centre, radius, start angle and signed sweep.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KkPose {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub start_angle: f64,
    pub sweep: f64,
}

pub struct KkScene(SproutScene);

pub struct KkPlan(MotionPlan);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &KakeyaError) -> KkStatus {
    match e {
        KakeyaError::InvalidSpec(_) => KkStatus::InvalidSpec,
        KakeyaError::HypothesesViolated(_) => KkStatus::HypothesesViolated,
        KakeyaError::ConstructionFailed { .. } => KkStatus::ConstructionFailed,
        KakeyaError::SceneIncomplete => KkStatus::SceneIncomplete,
        KakeyaError::ArcTooLong(_) => KkStatus::ArcTooLong,
        KakeyaError::RecursionInfeasible(_) => KkStatus::RecursionInfeasible,
        KakeyaError::OutOfRange(_) | KakeyaError::IndexOutOfRange(_) | KakeyaError::NegativeInput(_) => KkStatus::OutOfRange,
        KakeyaError::Io(_) | KakeyaError::Json(_) => KkStatus::Internal,
        _ => KkStatus::GeometryError,
    }
}

struct Fail(KkStatus, String);

impl From<KakeyaError> for Fail {
    fn from(e: KakeyaError) -> Fail {
        Fail(status_of(&e), format!("{}: {e}", e.code()))
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KkStatus::Ok
        }
        Ok(Err(Fail(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            KkStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(KkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(KkStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn precision(bits: u32) -> Result<Precision, Fail> {
    let p = if bits == 0 { Precision::Hardware } else { Precision::Big(bits) };
    if !p.is_valid() {
        return Err(Fail(KkStatus::InvalidSpec, format!("precision must be 0 or at least {} bits", Precision::MIN_BIG_BITS)));
    }
    Ok(p)
}

fn json_out(v: &serde_json::Value, dst: *mut *mut c_char) -> Result<(), Fail> {
    let dst = unsafe { out(dst, "out")? };
    let s = serde_json::to_string(v).map_err(KakeyaError::from)?;
    *dst = CString::new(s).map_err(|_| Fail(KkStatus::Internal, "JSON contains NUL".into()))?.into_raw();
    Ok(())
}

fn write_estimate(e: &AreaEstimate, value: *mut f64, stderr: *mut f64) -> Result<(), Fail> {
    unsafe {
        *out(value, "value")? = e.value.to_f64();
        if let Some(s) = stderr.as_mut() {
            *s = e.stderr.to_f64();
        }
    }
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn kk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn kk_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn kk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a scene; on success `*out_scene` owns a new handle.
///
/// # Safety
/// `cfg` must point to a valid config whose strings are NUL-terminated;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_scene_build(cfg: *const KkConfig, out_scene: *mut *mut KkScene) -> KkStatus {
    guard(|| {
        let dst = out(out_scene, "out_scene")?;
        *dst = ptr::null_mut();
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let prec = precision(cfg.precision_bits)?;
        let r = if cfg.r.is_null() { DEFAULT_R } else { text(cfg.r, "r")? };
        let r = Scalar::parse(r, prec).ok_or_else(|| Fail(KkStatus::InvalidSpec, format!("cannot parse R = {r:?}")))?;
        let sc = SproutConfig::from_decimal(text(cfg.h, "h")?, text(cfg.eps, "eps")?, cfg.n, prec, cfg.strict)?.with_r(r);
        let scene = build_scene(&sc)?;
        *dst = Box::into_raw(Box::new(KkScene(scene)));
        Ok(())
    })
}

/// Releases a scene handle.
///
/// # Safety
/// `scene` must come from [`kk_scene_build`] or be null.
#[no_mangle]
pub unsafe extern "C" fn kk_scene_free(scene: *mut KkScene) {
    if !scene.is_null() {
        drop(Box::from_raw(scene));
    }
}

/// Scene as JSON with full-precision decimal strings.
///
/// # Safety
/// `scene` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_scene_to_json(scene: *const KkScene, out_json: *mut *mut c_char) -> KkStatus {
    guard(|| {
        let s = scene.as_ref().ok_or_else(|| null("scene"))?;
        json_out(&s.0.to_json(), out_json)
    })
}

/// Runs every check; `out_violations` receives the number of failed
/// reports whose hypotheses held. A null `arc_len` means 1.31.
///
/// # Safety
/// `scene` must be a live handle; `out_violations` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_scene_verify(scene: *const KkScene, arc_len: *const c_char, out_violations: *mut u32) -> KkStatus {
    guard(|| {
        let s = scene.as_ref().ok_or_else(|| null("scene"))?;
        let dst = out(out_violations, "out_violations")?;
        let len = arc_length(arc_len, s.0.precision())?;
        let reports = verify_reports(&s.0, &len)?;
        *dst = reports.iter().filter(|r| r.is_violation()).count() as u32;
        Ok(())
    })
}

unsafe fn arc_length(p: *const c_char, prec: Precision) -> Result<Scalar, Fail> {
    let t = if p.is_null() { DEFAULT_ARC_LEN } else { text(p, "arc_len")? };
    Scalar::parse(t, prec).ok_or_else(|| Fail(KkStatus::InvalidArgument, format!("cannot parse arc_len = {t:?}")))
}

/// Builds the motion plan through a complete scene. A null `arc_len` means 1.31.
///
/// # Safety
/// `scene` must be a live handle; `out_plan` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_build(scene: *const KkScene, arc_len: *const c_char, out_plan: *mut *mut KkPlan) -> KkStatus {
    guard(|| {
        let dst = out(out_plan, "out_plan")?;
        *dst = ptr::null_mut();
        let s = scene.as_ref().ok_or_else(|| null("scene"))?;
        let len = arc_length(arc_len, s.0.precision())?;
        let plan = build_motion_plan(&s.0, &len)?;
        *dst = Box::into_raw(Box::new(KkPlan(plan)));
        Ok(())
    })
}

/// Releases a plan handle.
///
/// # Safety
/// `plan` must come from [`kk_plan_build`] or be null.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_free(plan: *mut KkPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Plan as JSON.
///
/// # Safety
/// `plan` must be a live handle and `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_to_json(plan: *const KkPlan, out_json: *mut *mut c_char) -> KkStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        json_out(&p.0.to_json(), out_json)
    })
}

/// Number of pivot and slide steps.
///
/// # Safety
/// `plan` must be a live handle and `out_count` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_step_count(plan: *const KkPlan, out_count: *mut usize) -> KkStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        *out(out_count, "out_count")? = p.0.len();
        Ok(())
    })
}

/// Sum of the per-pivot horn areas.
///
/// # Safety
/// `plan` must be a live handle and `out_area` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_total_swept_bound(plan: *const KkPlan, out_area: *mut f64) -> KkStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        *out(out_area, "out_area")? = p.0.total_swept_bound.to_f64();
        Ok(())
    })
}

/// Pose at normalized time `t` in `[0, 1]`.
///
/// # Safety
/// `plan` must be a live handle and `out_pose` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_plan_pose_at(plan: *const KkPlan, t: f64, out_pose: *mut KkPose) -> KkStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        let dst = out(out_pose, "out_pose")?;
        let pose = pose_at(&p.0, &Scalar::from_f64(t, p.0.precision))?;
        let c = pose.circle().center.to_f64();
        *dst = KkPose {
            cx: c[0],
            cy: c[1],
            radius: pose.circle().radius.to_f64(),
            start_angle: pose.arc.start_angle.to_f64(),
            sweep: pose.arc.sweep.to_f64(),
        };
        Ok(())
    })
}

/// Monte-Carlo area of everything the plan sweeps. `out_stderr` may be null.
///
/// # Safety
/// `plan` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_area_mc_plan(plan: *const KkPlan, samples: u64, seed: u64, out_value: *mut f64, out_stderr: *mut f64) -> KkStatus {
    guard(|| {
        let p = plan.as_ref().ok_or_else(|| null("plan"))?;
        write_estimate(&monte_carlo_swept_area(&p.0, samples, seed)?, out_value, out_stderr)
    })
}

/// Monte-Carlo area of `T_n` minus the seed horn. `out_stderr` may be null.
///
/// # Safety
/// `scene` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn kk_tn_minus_delta(scene: *const KkScene, samples: u64, seed: u64, out_value: *mut f64, out_stderr: *mut f64) -> KkStatus {
    guard(|| {
        let s = scene.as_ref().ok_or_else(|| null("scene"))?;
        write_estimate(&tn_minus_delta_area(&s.0, samples, seed)?, out_value, out_stderr)
    })
}

/// Area `chord^2 angle / 2` of the region swept by rotating an arc about an endpoint.
///
/// # Safety
/// `out_area` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kk_horn_area(chord: f64, angle: f64, out_area: *mut f64) -> KkStatus {
    guard(|| {
        let dst = out(out_area, "out_area")?;
        *dst = horn_area(&Scalar::Hw(chord), &Scalar::Hw(angle))?.to_f64();
        Ok(())
    })
}
