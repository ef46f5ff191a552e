use std::path::PathBuf;
use std::process::Command;

use kakeya_arcs::cli::{parse_args, Command as Cmd, ExperimentSpec, Format};
use kakeya_arcs::Precision;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kakeya-arcs"))
}

#[test]
fn no_arguments_prints_usage() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn unknown_flag_is_reported() {
    let out = bin().args(["plan", "--speed", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--speed"));
}

#[test]
fn verify_passes_then_fails_with_fault() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bin().args(["verify", "--n", "4"]).arg(format!("--out={}", dir.path().join("ok.json").display())).output().unwrap();
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let reports: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("ok.json")).unwrap()).unwrap();
    assert!(reports.as_array().unwrap().len() > 20);

    let bad = bin().args(["verify", "--n", "4", "--inject-fault"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("violations"));
}

#[test]
fn relaxed_verify_is_not_a_failure() {
    let out = bin().args(["verify", "--relaxed", "--n", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn render_writes_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["render", "--n", "4"]).arg(format!("--out={}", dir.path().display())).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<PathBuf> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    assert_eq!(names.len(), 24);
    assert!(names.iter().all(|p| p.extension().is_some_and(|e| e == "svg")));
    let first = std::fs::read_to_string(&names[0]).unwrap();
    assert!(first.contains(r#"id="pose""#));
}

#[test]
fn area_csv_and_refine_failure() {
    let out = bin().args(["area", "--relaxed", "--n", "0,2", "--samples", "20000"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,area,stderr,samples,analytic_bound,runtime_seconds"));
    assert!(lines.next().unwrap().starts_with("0,0e0,"));
    assert!(lines.next().unwrap().starts_with("2,"));

    let out = bin().args(["plan", "--n", "3", "--depth", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("RECURSION_INFEASIBLE"));
}

#[test]
fn theorem1_chain_json() {
    let out = bin().args(["theorem1", "--distance", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["links"].as_array().unwrap().len(), 3);
}

#[test]
fn outputs_are_reproducible() {
    let run = || bin().args(["plan", "--relaxed", "--n", "5"]).output().unwrap().stdout;
    assert_eq!(run(), run());
}

fn command() -> impl Strategy<Value = Cmd> {
    prop_oneof![
        Just(Cmd::Sprout),
        Just(Cmd::Verify),
        Just(Cmd::Plan),
        Just(Cmd::Area),
        Just(Cmd::Render),
        Just(Cmd::Theorem1)
    ]
}

prop_compose! {
    fn spec()(
        command in command(),
        strict: bool,
        hm in 1u32..9, he in 10i32..14,
        em in 1u32..9, ee in 7i32..9,
        n0 in 0u32..8, extra in proptest::collection::btree_set(9u32..16, 0..3),
        bits in prop_oneof![Just(None), (64u32..300).prop_map(Some)],
        arc in 100u32..131,
        samples in 1000u64..10_000_000, seed: u64, depth in 0u32..3,
        out in proptest::option::of("[a-z]{1,8}(/[a-z]{1,8})?\\.(json|csv)"),
        frames in 1usize..50, dist in 0u32..20, budget in 1u32..9,
        inject_fault: bool,
    ) -> ExperimentSpec {
        // strict values stay inside the hypotheses, relaxed ones do not need to
        let (h, eps) = if strict { (format!("{hm}e-{he}"), format!("{em}e-{ee}")) } else { (format!("{hm}e-4"), format!("0.0{em}")) };
        let mut n_list = vec![n0];
        if command == Cmd::Area {
            n_list.extend(extra);
        }
        let format = match command {
            Cmd::Area => Format::Csv,
            Cmd::Render => Format::Svg,
            _ => Format::Json,
        };
        ExperimentSpec {
            command,
            strict,
            h,
            eps,
            r: "1.227".into(),
            n_list,
            precision: bits.map_or(Precision::Hardware, Precision::Big),
            arc_len: format!("1.{arc:03}").trim_end_matches('0').to_string(),
            samples,
            seed,
            depth,
            output_path: out.map(PathBuf::from),
            format,
            frames,
            distance: dist.to_string(),
            budget: format!("0.0{budget}"),
            inject_fault,
        }
    }
}

proptest! {
    #[test]
    fn spec_round_trip(s in spec()) {
        prop_assume!(s.validate().is_ok());
        let argv = std::iter::once("kakeya-arcs".to_string()).chain(s.to_args());
        let back = parse_args(argv).map_err(|e| TestCaseError::fail(e.message))?;
        prop_assert_eq!(back, s);
    }
}
