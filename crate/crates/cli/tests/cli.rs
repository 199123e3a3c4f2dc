use std::path::PathBuf;
use std::process::{Command, Output};

use zeropres::battery::battery;
use zeropres_cli::{parse_operator, serialize_operator};

fn write_op(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn zeropres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeropres"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const TIMES_Z: &str = r#"{"form": "diff", "N": 8, "qs": {"0": [[0, 0], [1, 0]]}}"#;
const SHIFTED: &str = r#"{"form": "diff", "N": 8, "qs": {"0": [[0, 0], [-1, 0]], "1": [[1, 0]]}}"#;
const IDENTITY: &str = r#"{"form": "diff", "N": 8, "qs": {"0": [[1, 0]]}}"#;

#[test]
fn multiplication_by_z_fails_the_open_class() {
    let op = write_op("times_z.json", TIMES_Z);
    let out = zeropres(&["certify", op.to_str().unwrap(), "--class", "open", "--json"]);
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "falsified");
    assert_eq!(v["command"], "certify");
}

#[test]
fn shifted_derivative_fails_on_the_lower_half_plane() {
    let op = write_op("shifted.json", SHIFTED);
    let out = zeropres(&[
        "certify",
        op.to_str().unwrap(),
        "--class",
        "open",
        "--domain",
        "lower-half-plane",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn identity_symbol_has_no_zero() {
    let op = write_op("identity.json", IDENTITY);
    let out = zeropres(&["symbol", op.to_str().unwrap(), "--n", "3", "--domain", "unit-disk"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn usage_and_input_errors_exit_with_2() {
    let bad = write_op("bad.json", "{\n  \"form\": \"monomial\",\n  \"N\": 2,,\n}");
    let out = zeropres(&["certify", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("line 3"), "{text}");

    assert_eq!(code(&zeropres(&["certify", "/nonexistent/op.json"])), 2);
    assert_eq!(code(&zeropres(&["certify", "--class", "ajar"])), 2);
    assert_eq!(code(&zeropres(&["classify-point", "--z", "1,x"])), 2);
}

#[test]
fn classify_point_reports_the_tag() {
    let out = zeropres(&["classify-point", "--z", "0,1", "--json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tag"], "interior");
}

#[test]
fn runs_are_reproducible() {
    let op = write_op("shifted_again.json", SHIFTED);
    let args = [
        "falsify",
        op.to_str().unwrap(),
        "--source",
        "interior",
        "--target",
        "interior",
        "--domain",
        "lower-half-plane",
        "--seed",
        "5",
        "--json",
    ];
    let a = zeropres(&args);
    let b = zeropres(&args);
    assert_eq!(code(&a), 1);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn battery_operators_round_trip_through_files() {
    for e in battery(8, 3) {
        let text = serialize_operator(&e.op);
        let back = parse_operator(&text).unwrap_or_else(|err| panic!("{}: {err}", e.name));
        assert_eq!(back, e.op, "{}", e.name);
    }
}
