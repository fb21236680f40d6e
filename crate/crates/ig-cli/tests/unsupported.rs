//! The unsupported-regime exit code through the binary.

use std::process::Command;

#[test]
fn tiny_coset_bound_gives_exit_two() {
    let dir = std::env::temp_dir();
    let t4 = dir.join(format!("ig-unsup-{}.json", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_ig"))
        .args(["gen", "tn", "4", "-o", t4.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_ig"))
        .args([
            "decide",
            t4.to_str().unwrap(),
            "0100 0110",
            "0100 0110",
            "--tc-bound",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("unsupported"), "got: {text}");
}
