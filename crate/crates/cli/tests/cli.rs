use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn vecgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vecgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn error_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1, "stderr: {text}");
    serde_json::from_str(lines[0]).expect("stderr is JSON")
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_3dm(dir: &TempDir, name: &str, q: u32, tuples: &[[u32; 3]]) -> PathBuf {
    let p = path(dir, name);
    let doc = serde_json::json!({ "format_version": 1, "q": q, "tuples": tuples });
    std::fs::write(&p, doc.to_string()).unwrap();
    p
}

fn conflict_q2(dir: &TempDir) -> PathBuf {
    write_3dm(
        dir,
        "conflict.json",
        2,
        &[[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]],
    )
}

fn cyclic_q3(dir: &TempDir) -> PathBuf {
    write_3dm(
        dir,
        "cyclic.json",
        3,
        &[
            [1, 1, 1],
            [2, 2, 2],
            [3, 3, 3],
            [1, 2, 3],
            [2, 3, 1],
            [3, 1, 2],
        ],
    )
}

fn run_pipeline(dir: &TempDir) -> Vec<(String, Vec<u8>)> {
    let m = path(dir, "m.json");
    let inst = path(dir, "inst.json");
    let sol = path(dir, "sol.json");
    let rep = path(dir, "rep.json");
    assert_eq!(
        code(&vecgap(&[
            "gen",
            "--q",
            "3",
            "--seed",
            "42",
            "--out",
            s(&m)
        ])),
        0
    );
    assert_eq!(
        code(&vecgap(&[
            "reduce",
            "--mode",
            "pack",
            "--in",
            s(&m),
            "--out",
            s(&inst)
        ])),
        0
    );
    assert_eq!(
        code(&vecgap(&["solve", "--in", s(&inst), "--out", s(&sol)])),
        0
    );
    assert_eq!(
        code(&vecgap(&[
            "verify",
            "lemmas",
            "--in",
            s(&inst),
            "--out",
            s(&rep)
        ])),
        0
    );
    [m, inst, sol, rep]
        .iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(p).unwrap(),
            )
        })
        .collect()
}

#[test]
fn pipeline_is_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert_eq!(run_pipeline(&a), run_pipeline(&b));
}

#[test]
fn gen_summary_and_document() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "e2.json");
    let o = vecgap(&["gen", "--q", "4", "--seed", "3", "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "q=4 tuples=8 e2=true");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["q"], 4);
    assert_eq!(doc["tuples"].as_array().unwrap().len(), 8);
}

#[test]
fn reduce_planted_q3_has_eighteen_items() {
    let dir = TempDir::new().unwrap();
    let m = path(&dir, "p.json");
    let inst = path(&dir, "inst.json");
    vecgap(&[
        "gen",
        "--q",
        "3",
        "--kind",
        "planted",
        "--extra",
        "3",
        "--out",
        s(&m),
    ]);
    let o = vecgap(&["reduce", "--mode", "pack", "--in", s(&m), "--out", s(&inst)]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.contains("items=18"), "{line}");
    assert!(line.contains("dummies=3"), "{line}");
    assert!(line.contains("r=192"), "{line}");
    assert!(line.contains("b=1358954511"), "{line}");
}

#[test]
fn reduce_skew_reports_m() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let inst = path(&dir, "skew.json");
    let o = vecgap(&[
        "reduce",
        "--mode",
        "skew",
        "--delta",
        "7/20",
        "--in",
        s(&m),
        "--out",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains(" m=5"));
}

#[test]
fn skew_without_delta_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let o = vecgap(&[
        "reduce",
        "--mode",
        "skew",
        "--in",
        s(&m),
        "--out",
        s(&path(&dir, "x.json")),
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
    assert!(!path(&dir, "x.json").exists());
}

#[test]
fn beta_too_large_exits_two() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let o = vecgap(&[
        "reduce",
        "--mode",
        "cover",
        "--beta",
        "5",
        "--in",
        s(&m),
        "--out",
        s(&path(&dir, "c.json")),
    ]);
    assert_eq!(code(&o), 2);
    let e = error_json(&o);
    assert_eq!(e["error"]["kind"], "gadget");
    assert!(e["error"]["message"].as_str().unwrap().contains("dummy"));
}

#[test]
fn solve_objective_lines() {
    let dir = TempDir::new().unwrap();
    let m = cyclic_q3(&dir);
    let pack = path(&dir, "pack.json");
    let cover = path(&dir, "cover.json");
    vecgap(&[
        "reduce",
        "--mode",
        "pack",
        "--beta",
        "3",
        "--in",
        s(&m),
        "--out",
        s(&pack),
    ]);
    vecgap(&[
        "reduce",
        "--mode",
        "cover",
        "--beta",
        "3",
        "--in",
        s(&m),
        "--out",
        s(&cover),
    ]);
    assert_eq!(
        stdout(&vecgap(&["solve", "--in", s(&pack)])).trim(),
        "bins=6"
    );
    assert_eq!(
        stdout(&vecgap(&["solve", "--in", s(&cover)])).trim(),
        "covers=6"
    );
    let ff = stdout(&vecgap(&["solve", "--algo", "ff", "--in", s(&pack)]));
    let bins: usize = ff.trim().strip_prefix("bins=").unwrap().parse().unwrap();
    assert!(bins >= 6);
    let greedy = stdout(&vecgap(&[
        "solve",
        "--algo",
        "greedy-cover",
        "--in",
        s(&cover),
    ]));
    let covers: usize = greedy
        .trim()
        .strip_prefix("covers=")
        .unwrap()
        .parse()
        .unwrap();
    assert!(covers <= 6);
    let o = vecgap(&[
        "solve",
        "--algo",
        "ffd",
        "--objective",
        "cover",
        "--in",
        s(&cover),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solver_size_limit_exits_two() {
    let dir = TempDir::new().unwrap();
    let m = cyclic_q3(&dir);
    let pack = path(&dir, "pack.json");
    vecgap(&[
        "reduce",
        "--mode",
        "pack",
        "--beta",
        "3",
        "--in",
        s(&m),
        "--out",
        s(&pack),
    ]);
    let o = vecgap(&["solve", "--max-items", "10", "--in", s(&pack)]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "limit");
    let o = vecgap(&["solve", "--max-items", "40", "--in", s(&pack)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_all_on_q2_pack_instance() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let inst = path(&dir, "pack.json");
    let rep = path(&dir, "rep.json");
    vecgap(&["reduce", "--mode", "pack", "--in", s(&m), "--out", s(&inst)]);
    let o = vecgap(&["verify", "lemmas", "--in", s(&inst), "--out", s(&rep)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(doc["status"], "verified");
    let reports = doc["reports"].as_array().unwrap();
    assert!(reports.iter().all(|r| r["verdict"] == "verified"));
    assert!(reports.iter().all(|r| r["wall_time_ms"] == 0));
    assert!(reports
        .iter()
        .any(|r| r["claim_id"] == "vector-correspondence"));
}

#[test]
fn verify_cover_expected_falsified_controls_exit() {
    let dir = TempDir::new().unwrap();
    let m = cyclic_q3(&dir);
    let inst = path(&dir, "cover.json");
    vecgap(&[
        "reduce",
        "--mode",
        "cover",
        "--in",
        s(&m),
        "--out",
        s(&inst),
    ]);
    let strict = vecgap(&["verify", "lemmas", "--in", s(&inst)]);
    assert_eq!(code(&strict), 1);
    assert!(stdout(&strict).contains("cover-any-five: falsified"));
    let lenient = vecgap(&[
        "verify",
        "lemmas",
        "--in",
        s(&inst),
        "--expected-falsified",
        "cover-any-five",
        "--format",
        "json",
    ]);
    assert_eq!(code(&lenient), 0);
    let summary: Value = serde_json::from_str(stdout(&lenient).trim()).unwrap();
    assert_eq!(summary["status"], "verified");
}

#[test]
fn verify_selected_claims() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let inst = path(&dir, "pack.json");
    vecgap(&["reduce", "--mode", "pack", "--in", s(&m), "--out", s(&inst)]);
    let o = vecgap(&[
        "verify",
        "lemmas",
        "--claims",
        "bin-size-pairs",
        "--in",
        s(&inst),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = vecgap(&[
        "verify",
        "lemmas",
        "--claims",
        "cover-no-single",
        "--in",
        s(&inst),
    ]);
    assert_eq!(code(&o), 2);
    let o = vecgap(&[
        "verify",
        "lemmas",
        "--claims",
        "no-such-claim",
        "--in",
        s(&inst),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_budget_exceeded_exits_two() {
    let dir = TempDir::new().unwrap();
    let m = conflict_q2(&dir);
    let inst = path(&dir, "pack.json");
    vecgap(&["reduce", "--mode", "pack", "--in", s(&m), "--out", s(&inst)]);
    let o = vecgap(&["verify", "lemmas", "--budget", "50", "--in", s(&inst)]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "limit");
}

#[test]
fn verify_counterexample_q3() {
    let o = vecgap(&["verify", "counterexample", "--q", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("r^4 = 84934656 > 3r^3 + 3r^2 + 6r + 6 = 2682438: true"));
    assert!(text.contains("> 1: true"));
    assert_eq!(code(&vecgap(&["verify", "counterexample", "--q", "2"])), 2);
}

#[test]
fn verify_gap_pinches_on_cyclic_instance() {
    let dir = TempDir::new().unwrap();
    let m = cyclic_q3(&dir);
    for (mode, extra) in [("pack", None), ("cover", None), ("skew", Some("2/5"))] {
        let mut args = vec![
            "verify",
            "gap",
            "--mode",
            mode,
            "--beta",
            "3",
            "--in",
            s(&m),
        ];
        if let Some(d) = extra {
            args.extend(["--delta", d]);
        }
        args.extend(["--format", "json"]);
        let o = vecgap(&args);
        assert_eq!(code(&o), 0, "{mode}: {}", stdout(&o));
        let r: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(r["alpha"], 3);
        assert_eq!(r["solver_opt"], 6, "{mode}");
        assert_eq!(r["pinched"], true, "{mode}");
    }
}

#[test]
fn bounds_table_and_exit() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "bounds.json");
    let o = vecgap(&["bounds", "--m-max", "8", "--out", s(&out)]);
    // the covering comparison fails under the theorem constants
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text
        .lines()
        .any(|l| l.starts_with("packing ") && l.ends_with("holds")));
    assert!(text
        .lines()
        .any(|l| l.starts_with("covering ") && l.ends_with("FAILS")));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["bounds"].as_array().unwrap().len(), 4 + 5);
    let o = vecgap(&["bounds", "--constants", "restated", "--m-max", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&vecgap(&["bounds", "--m-min", "3"])), 2);
}

#[test]
fn unknown_subcommand_is_json_usage_error() {
    let o = vecgap(&["frobnicate"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
    let o = vecgap(&["verify"]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "usage");
}

#[test]
fn malformed_input_reports_parse_error() {
    let dir = TempDir::new().unwrap();
    let p = path(&dir, "bad.json");
    std::fs::write(
        &p,
        "{ \"format_version\": 1,\n  \"q\": 2,\n  \"tuples\": [[1,1]] }",
    )
    .unwrap();
    let o = vecgap(&[
        "reduce",
        "--mode",
        "pack",
        "--in",
        s(&p),
        "--out",
        s(&path(&dir, "x.json")),
    ]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "parse");
    let o = vecgap(&["solve", "--in", s(&path(&dir, "missing.json"))]);
    assert_eq!(code(&o), 2);
    assert_eq!(error_json(&o)["error"]["kind"], "io");
}
