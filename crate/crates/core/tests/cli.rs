use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fingergrover"));
    cmd.env_remove("FINGERGROVER_SEED");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn text_file(name: &str, contents: &[u8]) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fingergrover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn search_reports_json() {
    let text = text_file("search.txt", b"0110100110010110\n");
    let out = run(&[
        "search",
        "--text",
        text.to_str().unwrap(),
        "--pattern",
        "1001011",
        "--verify",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["queries"], 2);
    assert_eq!(v["qubits"]["ancilla"], 1);
    assert!(v["is_correct"].is_boolean());
    assert!(out.stdout.ends_with(b"\n"));
}

#[test]
fn search_rejects_non_binary_pattern() {
    let text = text_file("digit.txt", b"0011");
    let out = run(&["search", "--text", text.to_str().unwrap(), "--pattern", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid binary digit"));
}

#[test]
fn absent_pattern_is_contract_violation() {
    let text = text_file("absent.txt", b"0000");
    let out = run(&["search", "--text", text.to_str().unwrap(), "--pattern", "11"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "search",
        "--text",
        text.to_str().unwrap(),
        "--pattern",
        "11",
        "--allow-out-of-contract",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["marked_count"], 0);
}

#[test]
fn missing_text_file_is_io_error() {
    let out = run(&[
        "search",
        "--text",
        "/nonexistent/fingergrover.txt",
        "--pattern",
        "01",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn seed_falls_back_to_environment() {
    let text = text_file("seed.txt", b"0110100110010110");
    let args = ["search", "--text", text.to_str().unwrap(), "--pattern", "1001011"];
    let from_env = bin().args(args).env("FINGERGROVER_SEED", "17").output().unwrap();
    let explicit = run(&[&args[..], &["--seed", "17"]].concat());
    assert_eq!(from_env.status.code(), Some(0));
    assert_eq!(from_env.stdout, explicit.stdout);
}

#[test]
fn raw_bits_reads_packed_bytes() {
    let ascii = text_file("ascii.txt", b"0110100110010110");
    let packed = text_file("packed.bin", &[0b0110_1001, 0b1001_0110]);
    let a = run(&[
        "search",
        "--text",
        ascii.to_str().unwrap(),
        "--pattern",
        "1001011",
        "--seed",
        "3",
    ]);
    let b = run(&[
        "search",
        "--text",
        packed.to_str().unwrap(),
        "--pattern",
        "1001011",
        "--seed",
        "3",
        "--raw-bits",
    ]);
    assert_eq!(b.status.code(), Some(0), "{}", String::from_utf8_lossy(&b.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_examples() {
    let v = json(&run(&["analyze", "--n", "1024", "--m", "8"]));
    assert_eq!(v["queries"], 25);
    assert_eq!(v["d"], 3 * 1024 * 8);
    let v = json(&run(&["analyze", "--n", "3", "--m", "2", "--c", "3"]));
    assert_eq!(
        (v["d"].as_u64(), v["l"].as_u64(), v["qubits_total"].as_u64()),
        (Some(18), Some(6), Some(9))
    );
    let out = run(&["analyze", "--n", "3", "--m", "2", "--c", "2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn selftest_passes_deterministically() {
    let a = run(&["selftest"]);
    let b = run(&["selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selftest_catches_corrupt_diffusion() {
    let out = run(&["selftest", "--corrupt-diffusion"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL grover_equivalence"));
}

#[test]
fn sweep_outputs() {
    let out = run(&[
        "sweep", "--n", "8,16", "--m", "8", "--trials", "100", "--seed", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let again = run(&[
        "sweep", "--n", "8,16", "--m", "8", "--trials", "100", "--seed", "5",
    ]);
    assert_eq!(csv.as_bytes(), again.stdout);

    let empty = run(&["sweep", "--trials", "100"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(String::from_utf8(empty.stdout).unwrap().lines().count(), 1);

    let v = json(&run(&[
        "sweep", "--n", "8", "--trials", "100", "--format", "json",
    ]));
    assert_eq!(v["rows"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_family_exit_codes() {
    assert_eq!(
        run(&["verify-family", "--n", "2", "--m", "3"]).status.code(),
        Some(0)
    );
    assert_eq!(
        run(&["verify-family", "--n", "2", "--m", "3", "--eps", "0.01"])
            .status
            .code(),
        Some(2)
    );
}
