use std::ffi::{CStr, CString};
use std::ptr;

use kakeya_arcs_ffi::*;

fn cfg(h: &CString, eps: &CString, n: u32, bits: u32, strict: bool) -> KkConfig {
    KkConfig { h: h.as_ptr(), eps: eps.as_ptr(), r: ptr::null(), n, precision_bits: bits, strict }
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(kk_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn scene_plan_round_trip() {
    let (h, eps) = (CString::new("1e-3").unwrap(), CString::new("0.05").unwrap());
    let c = cfg(&h, &eps, 4, 0, false);
    unsafe {
        let mut scene = ptr::null_mut();
        assert_eq!(kk_scene_build(&c, &mut scene), KkStatus::Ok);
        assert!(!scene.is_null());

        let mut json = ptr::null_mut();
        assert_eq!(kk_scene_to_json(scene, &mut json), KkStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(v["config"]["n"], 4);
        kk_string_free(json);

        let mut violations = 99;
        assert_eq!(kk_scene_verify(scene, ptr::null(), &mut violations), KkStatus::Ok);
        assert_eq!(violations, 0);

        let mut plan = ptr::null_mut();
        assert_eq!(kk_plan_build(scene, ptr::null(), &mut plan), KkStatus::Ok);
        let mut steps = 0usize;
        assert_eq!(kk_plan_step_count(plan, &mut steps), KkStatus::Ok);
        assert_eq!(steps, 63);
        let mut bound = 0.0;
        assert_eq!(kk_plan_total_swept_bound(plan, &mut bound), KkStatus::Ok);
        assert!(bound > 0.0);

        let mut pose = KkPose::default();
        assert_eq!(kk_plan_pose_at(plan, 0.0, &mut pose), KkStatus::Ok);
        assert!((pose.radius - 1.0).abs() < 1e-12);
        assert!((pose.sweep - 1.31).abs() < 1e-12);
        assert_eq!(kk_plan_pose_at(plan, 2.0, &mut pose), KkStatus::OutOfRange);
        assert!(last_error().starts_with("OUT_OF_RANGE"));

        let (mut value, mut stderr) = (-1.0, -1.0);
        assert_eq!(kk_area_mc_plan(plan, 100_000, 42, &mut value, &mut stderr), KkStatus::Ok);
        assert!(value <= bound + 3.0 * stderr);
        assert_eq!(kk_tn_minus_delta(scene, 100_000, 42, &mut value, ptr::null_mut()), KkStatus::Ok);
        assert!(value > 0.0);
        assert_eq!(kk_area_mc_plan(plan, 10, 42, &mut value, ptr::null_mut()), KkStatus::OutOfRange);

        let mut pj = ptr::null_mut();
        assert_eq!(kk_plan_to_json(plan, &mut pj), KkStatus::Ok);
        kk_string_free(pj);
        kk_plan_free(plan);
        kk_scene_free(scene);
    }
}

#[test]
fn error_codes() {
    let (h, eps) = (CString::new("9e-10").unwrap(), CString::new("1e-5").unwrap());
    unsafe {
        let mut scene = ptr::null_mut();
        assert_eq!(kk_scene_build(&cfg(&h, &eps, 2, 256, true), &mut scene), KkStatus::HypothesesViolated);
        assert!(scene.is_null());
        assert!(last_error().contains("eps < 1e-6"));
        assert_eq!(kk_scene_build(&cfg(&h, &eps, 2, 12, false), &mut scene), KkStatus::InvalidSpec);
        assert_eq!(kk_scene_build(ptr::null(), &mut scene), KkStatus::NullPointer);
        let bad = CString::new("abc").unwrap();
        assert_eq!(kk_scene_build(&cfg(&bad, &eps, 2, 0, false), &mut scene), KkStatus::InvalidSpec);

        let mut area = 0.0;
        assert_eq!(kk_horn_area(2.0, std::f64::consts::FRAC_PI_2, &mut area), KkStatus::Ok);
        assert!((area - std::f64::consts::PI).abs() < 1e-15);
        assert!(last_error().is_empty());
        assert_eq!(kk_horn_area(-1.0, 1.0, &mut area), KkStatus::OutOfRange);
        assert_eq!(kk_horn_area(1.0, 1.0, ptr::null_mut()), KkStatus::NullPointer);
        kk_scene_free(ptr::null_mut());
        kk_string_free(ptr::null_mut());
    }
    let v = unsafe { CStr::from_ptr(kk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let dir = env!("CARGO_MANIFEST_DIR");
    let header = format!("{dir}/include/kakeya_arcs.h");
    assert!(std::path::Path::new(&header).exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["kk_scene_build", "kk_plan_pose_at", "kk_last_error_message", "KK_STATUS_OK", "typedef struct KkScene KkScene"] {
        assert!(text.contains(name), "{name}");
    }
    for (cc, lang) in [("cc", "c"), ("c++", "c++")] {
        let Ok(out) = std::process::Command::new(cc).args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang, &header]).output() else {
            continue;
        };
        assert!(out.status.success(), "{cc}: {}", String::from_utf8_lossy(&out.stderr));
    }
}
