use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn linctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linctx"))
        .args(args)
        .env_remove("LINCTX_SEED")
        .output()
        .expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).expect("each line is JSON"))
        .collect()
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

#[test]
fn equivalent_functions() {
    let out = linctx(&["equiv", &path("f1.lpcf"), &path("f2.lpcf"), "--depth", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["verdict"], "equivalent-within-bounds");
    assert_eq!(r["counterexample"], Value::Null);
}

#[test]
fn inequivalent_functions() {
    let out = linctx(&["equiv", &path("succ.lpcf"), &path("plus2.lpcf")]);
    assert_eq!(out.status.code(), Some(1));
    let r = &records(&out)[0];
    assert_eq!(r["verdict"], "inequivalent");
    assert_eq!(r["counterexample"], "@(0), 1");
    assert_eq!(r["taken_by"], "left");
}

#[test]
fn distinguisher_outcomes() {
    let out = linctx(&["eval", &path("distinguisher_f1.lpcf")]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["values"], serde_json::json!(["val(false)", "val(true)"]));
    assert_eq!(r["timed_out"], false);
    let out = linctx(&["eval", &path("distinguisher_f2.lpcf")]);
    assert_eq!(records(&out)[0]["values"], serde_json::json!(["val(true)"]));
}

#[test]
fn ill_typed_program() {
    let out = linctx(&["typecheck", &path("illtyped.lpcf")]);
    assert_eq!(out.status.code(), Some(2));
    let r = &records(&out)[0];
    assert_eq!(r["kind"], "LinearityViolation");
    assert!(String::from_utf8_lossy(&out.stderr).contains("illtyped.lpcf"));
}

#[test]
fn syntax_error_has_position() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.lpcf");
    std::fs::write(&file, "fn x:Nat.\n  succ (").unwrap();
    let out = linctx(&["typecheck", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let r = &records(&out)[0];
    assert_eq!(r["kind"], "SyntaxError");
    assert_eq!(r["line"], 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.lpcf:2:"));
}

#[test]
fn divergence_times_out() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("loop.lpcf");
    std::fs::write(
        &file,
        "fix[Nat -> Nat] (fn! f:Nat -> Nat. fn! x:Nat. f (succ x)) 0",
    )
    .unwrap();
    let out = linctx(&["eval", file.to_str().unwrap(), "--fuel", "50"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(records(&out)[0]["timed_out"], true);
}

#[test]
fn trace_listing() {
    let out = linctx(&["traces", &path("f1.lpcf"), "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let rs = records(&out);
    let traces: Vec<&str> = rs.iter().filter_map(|r| r["trace"].as_str()).collect();
    assert!(traces.contains(&"T, @(0), T, 1"));
    assert!(traces.contains(&"T, @(0), T, 0"));
    assert_eq!(rs.last().unwrap()["count"], traces.len());
}

#[test]
fn pool_file_extends_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let pool = dir.path().join("pool.txt");
    std::fs::write(&pool, "type Nat : 7\n").unwrap();
    let out = linctx(&[
        "traces",
        &path("succ.lpcf"),
        "--depth",
        "2",
        "--pool",
        pool.to_str().unwrap(),
    ]);
    let traces: Vec<String> = records(&out)
        .iter()
        .filter_map(|r| r["trace"].as_str().map(String::from))
        .collect();
    assert!(traces.contains(&"@(7), 8".to_string()), "{traces:?}");
}

#[test]
fn context_reductions() {
    let out = linctx(&[
        "lcr",
        &path("apply_ctx.lpcf"),
        "--hole-type",
        "Nat -o Nat",
        &path("succ.lpcf"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["successor"], "succ 2");
    assert_eq!(r["form"]["kind"], "interaction");
    assert_eq!(r["form"]["action"], "@(2)");
    let out = linctx(&[
        "lcr",
        &path("pred_ctx.lpcf"),
        "--hole-type",
        "Nat",
        &path("redex.lpcf"),
    ]);
    assert_eq!(records(&out)[0]["form"]["kind"], "program-step");
}

#[test]
fn trace_context() {
    let out = linctx(&[
        "scontext",
        "--trace",
        &path("trace.txt"),
        "--hole-type",
        "T (Nat -> T Nat)",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["result_type"], "T Nat");
    // the synthesized context, plugged with either function, may converge
    let dir = tempfile::tempdir().unwrap();
    let ctx = r["context"].as_str().unwrap();
    for f in ["f1.lpcf", "f2.lpcf"] {
        let prog = std::fs::read_to_string(data(f)).unwrap();
        let file = dir.path().join(f);
        std::fs::write(&file, ctx.replace("HOLE", &format!("({})", prog.trim()))).unwrap();
        let out = linctx(&["eval", file.to_str().unwrap()]);
        assert_eq!(records(&out)[0]["values"], serde_json::json!(["val(0)"]));
    }
}

#[test]
fn checks_run_and_report() {
    let out = linctx(&["check", "determinacy", "--count", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert_eq!(r["name"], "determinacy");
    assert_eq!(r["passed"], true);
    let out = linctx(&["check", "no_such_check"]);
    assert_eq!(out.status.code(), Some(2));
    let out = linctx(&["check", "list"]);
    assert!(records(&out).iter().any(|r| r["name"] == "soundness"));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "check",
        "generator_soundness",
        "--count",
        "40",
        "--seed",
        "9",
    ];
    let a = linctx(&args);
    let b = linctx(&args);
    assert_eq!(a.stdout, b.stdout);
    let t1 = linctx(&["traces", &path("f2.lpcf")]);
    let t2 = linctx(&["traces", &path("f2.lpcf")]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn seed_environment_overrides_flag() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_linctx"));
        cmd.args([
            "check",
            "generator_soundness",
            "--count",
            "40",
            "--seed",
            seed,
        ]);
        match env {
            Some(v) => cmd.env("LINCTX_SEED", v),
            None => cmd.env_remove("LINCTX_SEED"),
        };
        cmd.output().unwrap()
    };
    assert_eq!(run(Some("5"), "1").stdout, run(None, "5").stdout);
    assert_eq!(run(Some("oops"), "1").status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(linctx(&["equiv", &path("f1.lpcf")]).status.code(), Some(2));
    assert_eq!(
        linctx(&["eval", "/nonexistent.lpcf"]).status.code(),
        Some(2)
    );
    let out = linctx(&["equiv", &path("f1.lpcf"), &path("succ.lpcf")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pretty_output() {
    let out = linctx(&["--pretty", "typecheck", &path("succ.lpcf")]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        "fn x:Nat. succ x : Nat -o Nat"
    );
}
