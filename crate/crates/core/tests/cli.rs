use std::fs;
use std::path::Path;
use std::process::Command;

use alloc_hardness::allocation::{AllocationInstance, Good};
use alloc_hardness::boolean_functions::FunctionTable;
use alloc_hardness::cli::run_from;
use alloc_hardness::rational::Rational;
use alloc_hardness::report::{Outcome, Report};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(out: &Path, args: &[&str]) -> Run {
    let mut full = vec!["alloc-hardness", "--out", out.to_str().unwrap()];
    full.extend_from_slice(args);
    let (mut so, mut se) = (Vec::new(), Vec::new());
    let code = run_from(full, &mut so, &mut se);
    Run {
        code,
        stdout: String::from_utf8(so).unwrap(),
        stderr: String::from_utf8(se).unwrap(),
    }
}

fn report(dir: &Path) -> Report {
    Report::from_csv(&fs::read_to_string(dir.join("report.csv")).unwrap()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distributions_and_ratios_write_passing_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let res = run(&out, &["distributions", "--q", "2", "--eps", "1/10", "--eps", "1/100"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    let rep = report(&out);
    assert!(rep.all_pass());
    assert!(rep.rows.iter().any(|r| r.exact == "1/810"));
    assert!(out.join("report.json").exists());

    let out = dir.path().join("r");
    assert_eq!(run(&out, &["ratios", "--eps", "1/1000000"]).code, 0);
    assert!(report(&out).rows.iter().any(|r| r.outcome == Outcome::Pass));
}

#[test]
fn gadget_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let res = run(&out, &["gadget-completeness", "--R", "1", "--R", "2"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(report(&out).all_pass());

    // the exhaustive R = 2 landscape has non-dictators at the maximum
    let out = dir.path().join("s");
    let res = run(&out, &["gadget-soundness", "--R", "2", "--exhaustive"]);
    assert_eq!(res.code, 1);
    assert_eq!(report(&out).failures().count(), 2);

    let out = dir.path().join("sampled");
    let res = run(&out, &["gadget-soundness", "--R", "4", "--eps", "1/10", "--samples", "20"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
}

#[test]
fn decompose_reads_a_function_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = FunctionTable::dictator(2, 1, 2).unwrap();
    let file = dir.path().join("f.json");
    fs::write(&file, serde_json::to_string(&f.to_document()).unwrap()).unwrap();
    let out = dir.path().join("o");
    let res = run(&out, &["decompose", "--function", path(&file)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(report(&out).all_pass());

    let out = dir.path().join("random");
    assert_eq!(run(&out, &["decompose", "--R", "3", "--seed", "4"]).code, 0);
}

#[test]
fn reduction_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let ug_dir = dir.path().join("ug");
    let res = run(&ug_dir, &["build-ug", "--a", "2", "--b", "2", "--delta-b", "2", "--R", "1", "--planted"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    let ug = ug_dir.join("ug.json");
    let labeling = ug_dir.join("labeling.json");
    assert!(ug.exists() && labeling.exists());

    let out = dir.path().join("decode");
    let res = run(&out, &["decode", "--ug", path(&ug), "--labeling", path(&labeling)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(out.join("decoded_labeling.json").exists());

    let out = dir.path().join("reduction");
    let res = run(&out, &["build-reduction", "--ug", path(&ug), "--eps", "1/10"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    let instance = out.join("instance.json");
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&instance).unwrap()).unwrap();
    assert_eq!(doc["n_agents"], 6);

    // thousands of goods: far beyond the exhaustive solver
    let res = run(&dir.path().join("solve"), &["solve", "--instance", path(&instance)]);
    assert_eq!(res.code, 4);

    let out = dir.path().join("yes");
    let res = run(&out, &["yes-case", "--ug", path(&ug), "--labeling", path(&labeling)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(out.join("utilities.csv").exists());

    let out = dir.path().join("no");
    assert_eq!(run(&out, &["no-bound", "--ug", path(&ug), "--seed", "3"]).code, 0);

    let out = dir.path().join("gap");
    let res = run(&out, &["gap-instance", "--ug", path(&ug), "--labeling", path(&labeling)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(out.join("gap_instance.json").exists());
}

#[test]
fn solve_small_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = AllocationInstance::new(
        2,
        vec![
            Good::new(0, vec![(0, Rational::one())]),
            Good::new(1, vec![(1, Rational::one())]),
        ],
    )
    .unwrap();
    let file = dir.path().join("inst.json");
    fs::write(&file, serde_json::to_string(&inst.to_document()).unwrap()).unwrap();
    let out = dir.path().join("o");
    let res = run(&out, &["solve", "--instance", path(&file), "--objective", "nash"]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    let solved: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("solve.json")).unwrap()).unwrap();
    assert_eq!(solved["best_value"], "1/1");
    assert_eq!(solved["explored"], 9);

    // budgeted needs budgets
    let res = run(&out, &["solve", "--instance", path(&file), "--objective", "budgeted"]);
    assert_eq!(res.code, 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    assert_eq!(run(&out, &["no-such-command"]).code, 2);
    assert_eq!(run(&out, &[]).code, 2);
    assert_eq!(run(&out, &["ratios", "--eps", "1/2"]).code, 3);
    assert_eq!(run(&out, &["ratios", "--eps", "abc"]).code, 2);
    let res = run(&out, &["--cap-decomposition-r", "2", "decompose", "--R", "3"]);
    assert_eq!(res.code, 4, "{}", res.stderr);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&out, &["solve", "--instance", path(&missing)]).code, 5);
    assert_eq!(run(&out, &["--config", path(&missing)]).code, 5);
    let help = run(&out, &["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("gadget-soundness"));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("from-config");
    let cfg = dir.path().join("run.json");
    let body = serde_json::json!({
        "command": "distributions",
        "params": {"q": 2, "eps": ["1/10", "1/100"]},
        "out_dir": out,
    });
    fs::write(&cfg, body.to_string()).unwrap();
    let res = run(&dir.path().join("ignored"), &["--config", path(&cfg)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert!(report(&out).all_pass());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"command": "ratios", "surprise": 1}"#).unwrap();
    assert_eq!(run(&out, &["--config", path(&bad)]).code, 3);
    fs::write(&bad, r#"{"command": "ratios", "params": {"nope": "1"}}"#).unwrap();
    assert_eq!(run(&out, &["--config", path(&bad)]).code, 3);
    fs::write(&bad, "not json").unwrap();
    assert_eq!(run(&out, &["--config", path(&bad)]).code, 3);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gadget-soundness", "--R", "4", "--eps", "1/10", "--samples", "10", "--seed", "5"];
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run(&a, &args).code, 0);
    assert_eq!(run(&b, &args).code, 0);
    for file in ["report.csv", "report.json"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap());
    }
}

#[test]
fn binary_honours_output_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("env-out");
    let status = Command::new(env!("CARGO_BIN_EXE_alloc-hardness"))
        .args(["ratios", "--eps", "1/100"])
        .env("ALLOC_HARDNESS_OUT", &out)
        .current_dir(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("report.csv").exists());
}
