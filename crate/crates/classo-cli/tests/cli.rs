//! End-to-end runs of the `classo` binary.

use std::process::Command;

fn classo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_classo"))
}

#[test]
fn bench_subcommand_writes_artifacts_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let output = classo()
        .args([
            "bench",
            "--m",
            "12",
            "--n",
            "40",
            "--scenario",
            "sum-zero",
            "--lambda-l",
            "1e-1,1e-2",
            "--solvers",
            "ssnal,admm",
            "--seed",
            "5",
            "--out",
        ])
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("gap_ssnal"), "table missing: {stdout}");
    for file in ["summary.csv", "summary.json", "table.txt"] {
        assert!(out.join(file).exists(), "{file} missing");
    }
    let traces = std::fs::read_dir(&out)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("trace_")
        })
        .count();
    assert_eq!(traces, 4, "2 penalties x 2 solvers");
}

#[test]
fn solve_subcommand_ingests_libsvm() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("toy.libsvm");
    // 8 samples, 3 raw features; degree 2 expands to C(5,2) = 10 columns
    let mut text = String::new();
    for i in 0..8 {
        let x1 = (i as f64) / 4.0 - 1.0;
        let x2 = ((i * 3 % 7) as f64) / 3.0 - 1.0;
        let x3 = ((i * 5 % 11) as f64) / 5.0 - 1.0;
        let y = 2.0 * x1 - x2 + 0.5 * x3 * x3;
        text.push_str(&format!("{y} 1:{x1} 2:{x2} 3:{x3}\n"));
    }
    std::fs::write(&input, text).unwrap();

    let out = dir.path().join("run");
    let output = classo()
        .args(["solve", "--degree", "2", "--lambda-l", "1e-1", "--solvers", "ssnal", "--input"])
        .arg(&input)
        .arg("--out")
        .arg(&out)
        .output()
        .expect("binary runs");
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    // expanded dimension shows up in the record (m=8, n=10, s=1)
    assert!(summary.contains(",8,10,1,"), "summary: {summary}");
}

#[test]
fn invalid_arguments_exit_nonzero() {
    let out = classo()
        .args(["bench", "--m", "10", "--n", "20", "--lambda-l", "2.0"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());

    let out = classo()
        .args(["solve", "--input", "/nonexistent/file.libsvm"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
}
