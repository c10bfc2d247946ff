//! End-to-end checks of the command-line surface: instance files round
//! through the subcommands, reports are byte-stable, and exit codes follow
//! the record statuses.

use std::process::Command;

fn hypact() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypact"))
}

fn run_ok(args: &[&str]) -> String {
    let out = hypact().args(args).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed:\nstdout: {}\nstderr: {}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

#[test]
fn gen_writes_the_advertised_instances() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "f2-tree", "--depth", "4", "--out-dir", d]);
    run_ok(&["gen", "cycle", "--n", "8", "--out-dir", d]);
    run_ok(&["gen", "f2-boundary", "--depth", "3", "--words", "6", "--out-dir", d]);
    run_ok(&["gen", "z2-action", "--n", "9", "--out-dir", d]);

    let tree = std::fs::read_to_string(dir.path().join("f2-tree-4.graph")).unwrap();
    // 161 vertices; every edge line names two words.
    let edge_count = tree.lines().filter(|l| !l.starts_with("base")).count();
    assert_eq!(edge_count, 160);
    assert!(tree.contains("base e"));

    let cycle = std::fs::read_to_string(dir.path().join("cycle-8.graph")).unwrap();
    assert_eq!(cycle.lines().filter(|l| !l.starts_with("base")).count(), 8);

    let bnd = std::fs::read_to_string(dir.path().join("f2-boundary-3.bnd")).unwrap();
    assert!(bnd.contains("depth=3"));
    assert!(bnd.contains("buffer=9"));
    assert!(dir.path().join("f2.action").exists());
    assert!(dir.path().join("z2-torus-9.graph").exists());
    assert!(dir.path().join("z2-torus-9.action").exists());
}

#[test]
fn verify_lemmas_is_byte_stable_and_green() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "cycle", "--n", "8", "--out-dir", d]);
    let graph = dir.path().join("cycle-8.graph");
    let out1 = dir.path().join("r1.txt");
    let out2 = dir.path().join("r2.txt");
    for out in [&out1, &out2] {
        run_ok(&[
            "verify-lemmas",
            "--graph",
            graph.to_str().unwrap(),
            "--mode",
            "exhaustive",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "reports must be byte-identical for equal config");
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("format=hypact-report-v1"));
    assert!(text.contains("record=four-point"));
    assert!(!text.contains("status=fail"));
}

#[test]
fn dynamics_and_condition_c_run_green() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "f2-boundary", "--depth", "4", "--words", "6", "--out-dir", d]);
    let bnd = dir.path().join("f2-boundary-4.bnd");
    let action = dir.path().join("f2.action");
    run_ok(&[
        "dynamics",
        "--boundary",
        bnd.to_str().unwrap(),
        "--action",
        action.to_str().unwrap(),
        "--g",
        "a",
        "--depths",
        "1,2",
        "--words",
        "5",
    ]);
    run_ok(&[
        "condition-c",
        "--boundary",
        bnd.to_str().unwrap(),
        "--action",
        action.to_str().unwrap(),
        "--x",
        "a",
        "--y",
        "A",
        "--tuples",
        "6",
        "--words",
        "5",
    ]);
}

#[test]
fn annulus_certificates_run_green_at_small_depth() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "f2-boundary", "--depth", "3", "--words", "9", "--out-dir", d]);
    let bnd = dir.path().join("f2-boundary-3.bnd");
    let action = dir.path().join("f2.action");
    let out = dir.path().join("annulus.txt");
    let export = dir.path().join("sigma");
    run_ok(&[
        "annulus",
        "--boundary",
        bnd.to_str().unwrap(),
        "--action",
        action.to_str().unwrap(),
        "--words",
        "4",
        "--n-max",
        "3",
        "--samples",
        "40",
        "--sigma",
        "--sigma-words",
        "3",
        "--export-sigma",
        export.to_str().unwrap(),
        "--max-edges",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("record=loxodromic-certificate"));
    assert!(text.contains("detail.chain-witness="));
    assert!(text.contains("record=wpd-certificate"));
    assert!(text.contains("record=sigma-exactness"));
    assert!(!text.contains("status=fail"));
    // The export names every triple and lists unit edges by vertex index.
    let vertices = std::fs::read_to_string(dir.path().join("sigma.vertices")).unwrap();
    assert_eq!(vertices.lines().count(), 36 * 35 * 34);
    let edges = std::fs::read_to_string(dir.path().join("sigma.edges")).unwrap();
    assert!(!edges.is_empty());
}

#[test]
fn verify_lemmas_appends_boundary_records() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "cycle", "--n", "6", "--out-dir", d]);
    run_ok(&["gen", "f2-boundary", "--depth", "3", "--words", "4", "--out-dir", d]);
    let out = dir.path().join("rep.txt");
    run_ok(&[
        "verify-lemmas",
        "--graph",
        dir.path().join("cycle-6.graph").to_str().unwrap(),
        "--boundary",
        dir.path().join("f2-boundary-3.bnd").to_str().unwrap(),
        "--mode",
        "exhaustive",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("record=boundary-sandwich"));
    assert!(text.contains("record=boundary-ultrametric"));
    assert!(!text.contains("status=fail"));
}

#[test]
fn full_pipeline_exits_green_at_small_depth() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("full.txt");
    run_ok(&[
        "full",
        "--depth",
        "2",
        "--words",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("record=wpd-certificate"));
    assert!(!text.contains("status=fail"));
}

#[test]
fn torus_condition_c_runs_green() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "z2-action", "--n", "13", "--out-dir", d]);
    run_ok(&[
        "condition-c",
        "--graph",
        dir.path().join("z2-torus-13.graph").to_str().unwrap(),
        "--action",
        dir.path().join("z2-torus-13.action").to_str().unwrap(),
        "--x",
        "t000x000",
        "--y",
        "t006x006",
        "--tuples",
        "5",
        "--words",
        "4",
    ]);
}

#[test]
fn unstabilized_counts_fail_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    run_ok(&["gen", "f2-boundary", "--depth", "3", "--words", "6", "--out-dir", d]);
    // A word window shorter than the tail cannot stabilize anything.
    let out = hypact()
        .args([
            "condition-c",
            "--boundary",
            dir.path().join("f2-boundary-3.bnd").to_str().unwrap(),
            "--action",
            dir.path().join("f2.action").to_str().unwrap(),
            "--x",
            "a",
            "--y",
            "A",
            "--tuples",
            "3",
            "--words",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // A missing file is an error, not a failed record.
    let out = hypact()
        .args(["verify-lemmas", "--graph", "/nonexistent.graph"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
