use std::path::PathBuf;
use std::process::{Command, Output};

use gsep::io::{digest, parse_grid_csv, ReportDocument};
use gsep::Verdict;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn gsep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn run(sub: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![sub, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    gsep(&args)
}

#[test]
fn vacuum_is_not_witnessed() {
    for name in ["vacuum-2", "vacuum-3", "vacuum-4"] {
        let out = run("analyze", name, &[]);
        assert_eq!(code(&out), 0, "{name}: {}", stdout(&out));
    }
    let out = run("analyze", "vacuum-2", &[]);
    assert!(stdout(&out).contains("verdict: separable"));
}

#[test]
fn single_coupling_is_witnessed() {
    let out = run("analyze", "three-mode-xy-0.667", &[]);
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    assert!(text.contains("verdict: entangled-witnessed"), "{text}");
    let depth: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("depth: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((depth - 0.05).abs() < 1e-12, "{depth}");
}

#[test]
fn ppt_blind_state_is_caught_by_the_search() {
    let ppt = run("ppt", "three-mode-ppt-blind", &[]);
    assert_eq!(code(&ppt), 0, "{}", stdout(&ppt));
    assert!(stdout(&ppt).contains("witnessed: no"));
    assert_eq!(code(&run("analyze", "three-mode-ppt-blind", &[])), 3);
}

#[test]
fn ppt_accepts_an_explicit_pattern() {
    let out = run("ppt", "three-mode-xy-0.667", &["--pattern", "-,+,+"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("pattern: -,+,+"));
}

#[test]
fn eval_reports_minors() {
    let out = run("eval", "three-mode-xy-0.667", &["--lambda", "0.5,-0.5,0.5"]);
    let text = stdout(&out);
    assert_eq!(code(&out), 3, "{text}");
    assert!(text.contains("minor order 4"));
    assert!(text.contains("minor order 6"));

    let out = run("eval", "vacuum-3", &["--lambda", "0,1,1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("sigma: undefined"));
}

#[test]
fn input_errors_exit_with_one() {
    let missing = gsep(&["analyze", "/nonexistent/state.json"]);
    assert_eq!(code(&missing), 1);
    assert!(!missing.stderr.is_empty());

    assert_eq!(code(&run("analyze", "vacuum-3", &["--bogus"])), 1);
    assert_eq!(code(&run("eval", "vacuum-3", &["--lambda", "1.5,1,1"])), 1);
    assert_eq!(code(&run("eval", "vacuum-3", &["--lambda", "1,1"])), 1);
    assert_eq!(code(&run("eval", "vacuum-3", &["--lambda", "a,b,c"])), 1);
    assert_eq!(code(&run("scan", "vacuum-3", &["--axes", "2,3"])), 1);
    assert_eq!(
        code(&run(
            "scan",
            "vacuum-3",
            &["--axes", "2,2", "--fix", "1=0.5"]
        )),
        1
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"pure","n":2,"couplings":{"1,2":1.5}}"#).unwrap();
    assert_eq!(code(&gsep(&["validate", bad.to_str().unwrap()])), 1);
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&gsep(&["validate", bad.to_str().unwrap()])), 1);
}

#[test]
fn unphysical_input_is_rejected_by_validate_and_analyze() {
    let out = run("validate", "mixed-four-mode", &[]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("physical: no"));
    assert_eq!(code(&run("analyze", "mixed-four-mode", &[])), 1);

    assert_eq!(code(&run("validate", "mixed-three-mode", &[])), 0);
}

#[test]
fn scan_writes_the_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("slice.csv");
    let out = run(
        "scan",
        "four-mode-full-c34-0.5",
        &[
            "--fix",
            "1=-1",
            "--fix",
            "2=0.5",
            "--axes",
            "3,4",
            "--out",
            csv.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("negative fraction"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("lambda_3,lambda_4,sigma_raw,sigma_reg\n"));
    let rows = parse_grid_csv(&text).unwrap();
    assert_eq!(rows.len(), 101 * 101);
    assert_eq!((rows[0].lambda_a, rows[0].lambda_b), (-1.0, -1.0));
    assert_eq!(rows[50].lambda_b, 0.0);
    assert!(rows[50].sigma_raw.is_none());
}

#[test]
fn scan_to_stdout() {
    let out = run(
        "scan",
        "vacuum-3",
        &["--fix", "1=1", "--axes", "2,3", "--grid", "5"],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(parse_grid_csv(&stdout(&out)).unwrap().len(), 25);
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative fraction"));
}

#[test]
fn json_report_round_trips() {
    let out = run(
        "analyze",
        "three-mode-full-c23-0.5",
        &["--json", "--starts", "8", "--seed", "7"],
    );
    assert_eq!(code(&out), 3);
    let text = stdout(&out);
    let doc = ReportDocument::from_json(&text).unwrap();
    assert_eq!(doc.verdict, Verdict::EntangledWitnessed);
    assert_eq!(doc.modes, 3);
    assert_eq!(doc.parameters.seed, 7);
    let input = std::fs::read_to_string(fixture("three-mode-full-c23-0.5")).unwrap();
    assert_eq!(doc.input_digest, digest(&input));
    assert_eq!(ReportDocument::from_json(&doc.to_json()).unwrap(), doc);

    let again = run(
        "analyze",
        "three-mode-full-c23-0.5",
        &["--json", "--starts", "8", "--seed", "7"],
    );
    assert_eq!(stdout(&again), text);
}
