use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symrigid"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin()
        .args(args)
        .env_remove("SYMRIGID_CAP")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("symrigid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_counterexample_is_tight() {
    let (code, out, _) = run(&[
        "check",
        "gallery:counterexample-loop",
        "--k",
        "8",
        "--spec",
        "zkj",
        "--j",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "zkj:4 tight");
}

#[test]
fn check_balanced_triangle_is_sparse_not_tight() {
    let p = scratch("tri.gg", "group 8\nvertex a free\nvertex b free\nvertex c free\nedge a b 0\nedge b c 0\nedge c a 0\n");
    let (code, out, _) = run(&["check", p.to_str().unwrap(), "--spec", "gain:0,1"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "gain:0,1 sparse, not tight");
}

#[test]
fn check_rejects_out_of_range_gain() {
    let p = scratch(
        "bad.gg",
        "group 8\nvertex a free\nvertex b free\nedge a b 9\n",
    );
    let (code, _, err) = run(&["check", p.to_str().unwrap(), "--spec", "gain:0,1"]);
    assert_eq!(code, 2);
    assert!(err.contains("gain out of range"), "{err}");
}

#[test]
fn check_reports_witness_and_exit_one_when_not_sparse() {
    let p = scratch(
        "dense.gg",
        "group 5\nvertex a free\nedge a a 1\nedge a a 2\nedge a a 2\n",
    );
    let (code, _, err) = run(&["check", p.to_str().unwrap(), "--spec", "zkj:2"]);
    // Parallel loops with equal gain are rejected at parse time.
    assert_eq!(code, 2, "{err}");
    let p = scratch("dense2.gg", "group 5\nvertex a free\nvertex b free\nedge a b 0\nedge a b 1\nedge a b 2\nedge a b 3\nedge a b 4\n");
    let (code, out, _) = run(&["check", p.to_str().unwrap(), "--spec", "zkj:2"]);
    assert_eq!(code, 1);
    assert!(out.contains("not sparse; witness"), "{out}");
}

#[test]
fn file_group_must_match_k() {
    let p = scratch("tri6.gg", "group 6\nvertex a free\nedge a a 1\n");
    let (code, _, err) = run(&["analyze", p.to_str().unwrap(), "--k", "8"]);
    assert_eq!(code, 2);
    assert!(err.contains("does not match"), "{err}");
}

#[test]
fn analyze_counterexample_disagrees_at_half_turn() {
    let (code, out, _) = run(&["analyze", "gallery:counterexample-loop", "--k", "8"]);
    assert_eq!(code, 1);
    let bad: Vec<&str> = out.lines().filter(|l| l.contains("agree=false")).collect();
    assert_eq!(bad.len(), 1);
    assert!(bad[0].starts_with("j=4 comb=tight"));
    assert!(out.contains("certified=false"));
}

#[test]
fn analyze_loop_vertex_agrees() {
    let (code, out, _) = run(&["analyze", "gallery:single-loop", "--k", "5"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("rigid=false"));
}

#[test]
fn analyze_single_block_and_json() {
    let (code, out, _) = run(&["analyze", "gallery:figure1", "--k", "6", "--j", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("j=")).count(), 1);
    let (_, out, _) = run(&[
        "analyze",
        "gallery:figure1",
        "--k",
        "6",
        "--json",
        "--trials",
        "3",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["blocks"].as_array().unwrap().len(), 6);
    assert_eq!(v["rigid"], true);
}

#[test]
fn reduce_exit_codes() {
    let (code, out, _) = run(&["reduce", "gallery:figure4b", "--k", "6", "--j", "3"]);
    assert_eq!(code, 3);
    assert!(out.trim_end().ends_with("terminal special-case"));
    let (code, out, _) = run(&["reduce", "gallery:figure4a", "--k", "6", "--j", "3"]);
    assert_eq!(code, 0);
    assert!(out.contains(" twovertex "));
    let (code, _, err) = run(&["reduce", "gallery:single-loop", "--k", "5", "--j", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("not Z_5^2-tight"), "{err}");
}

#[test]
fn random_then_reduce_round_trip() {
    let dir = std::env::temp_dir().join(format!("symrigid-rand-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.gg"), dir.join("b.gg"));
    for p in [&a, &b] {
        let (code, _, _) = run(&[
            "random",
            "--k",
            "7",
            "--j",
            "2",
            "--steps",
            "4",
            "--seed",
            "1",
            "-o",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (code, out, _) = run(&["reduce", a.to_str().unwrap(), "--j", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("step ")).count(), 4);
}

#[test]
fn lift_figure1_has_thirteen_points() {
    let (code, out, _) = run(&["lift", "gallery:figure1", "--k", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("point ")).count(), 13);
    assert_eq!(out.lines().filter(|l| l.starts_with("bond ")).count(), 24);
}

#[test]
fn gallery_output_parses_back() {
    let (code, out, _) = run(&["gallery", "counterexample-fixed", "--k", "10"]);
    assert_eq!(code, 0);
    let g = symrigid::gain_graph::parse(&out).unwrap();
    g.validate().unwrap();
    assert_eq!(g.k(), 10);
}

#[test]
fn capacity_errors_exit_two() {
    let (code, _, err) = run(&[
        "check",
        "gallery:five-vertex",
        "--k",
        "7",
        "--spec",
        "zkj:3",
        "--cap",
        "5",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("capacity"), "{err}");
}
