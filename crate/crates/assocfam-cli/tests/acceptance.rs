//! CLI acceptance: exit-code contract, report formats, and criterion 10
//! (byte-identical reports across runs).

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_assocfam"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn assocfam")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("assocfam_accept_{tag}_{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn criterion_10_reports_are_byte_identical_across_runs() {
    let dir = tmpdir("c10");
    let configs: Vec<(&str, Vec<&str>)> = vec![
        (
            "verify.json",
            vec![
                "verify",
                "--space",
                "E(1,0)",
                "--surface",
                "slice-product",
                "--grid",
                "21x21",
                "--tol",
                "1e-8",
            ],
        ),
        (
            "family.json",
            vec![
                "family",
                "--space",
                "E(-1,0)",
                "--surface",
                "helicoid-product",
                "--law",
                "canonical",
                "--thetas",
                "0,0.5235987755982988,0.7853981633974483",
                "--grid",
                "11x11",
            ],
        ),
        (
            "classify.json",
            vec!["classify", "--surface", "nil3-vertical-plane"],
        ),
        (
            "verify.csv",
            vec![
                "verify",
                "--space",
                "E(0,0.5)",
                "--surface",
                "nil3-vertical-plane",
                "--format",
                "csv",
            ],
        ),
    ];
    for (name, args) in configs {
        let out_a = dir.join(format!("a_{name}"));
        let out_b = dir.join(format!("b_{name}"));
        let mut args_a: Vec<&str> = args.clone();
        let path_a = out_a.to_str().unwrap().to_string();
        args_a.extend_from_slice(&["--out", &path_a]);
        let mut args_b: Vec<&str> = args.clone();
        let path_b = out_b.to_str().unwrap().to_string();
        args_b.extend_from_slice(&["--out", &path_b]);
        // Different thread counts must not change a single byte either.
        let s1 = bin().args(&args_a).env("ASSOCFAM_THREADS", "1").output().unwrap();
        let s2 = bin().args(&args_b).env("ASSOCFAM_THREADS", "4").output().unwrap();
        assert_eq!(s1.status.code(), s2.status.code(), "{name}");
        let bytes_a = std::fs::read(&out_a).unwrap();
        let bytes_b = std::fs::read(&out_b).unwrap();
        assert!(!bytes_a.is_empty(), "{name}: empty report");
        assert_eq!(bytes_a, bytes_b, "{name}: reports differ between runs");
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("criterion 10 (byte-identical reports): PASS");
}

#[test]
fn verify_exit_codes_match_contract() {
    // Passing suite: exit 0.
    let out = run(&[
        "verify",
        "--space",
        "E(1,0)",
        "--surface",
        "slice-product",
        "--grid",
        "21x21",
        "--tol",
        "1e-8",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // The Heisenberg vertical plane is itself a valid immersion: exit 0.
    let out = run(&[
        "verify",
        "--space",
        "E(0,0.5)",
        "--surface",
        "nil3-vertical-plane",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // Malformed space descriptor: exit 2 with a diagnostic on stderr.
    let out = run(&["verify", "--space", "E(1,0", "--surface", "slice-product"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    // Unknown surface: exit 2.
    let out = run(&["verify", "--surface", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown flag: exit 2.
    let out = run(&["verify", "--surface", "slice-product", "--frobnicate", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn family_sweep_exit_codes_and_reports() {
    // Existence case. Theta list from the worked CLI example.
    let out = run(&[
        "family",
        "--space",
        "E(-1,0)",
        "--surface",
        "helicoid-product",
        "--law",
        "canonical",
        "--thetas",
        "0,0.5236,0.7854,1.5708",
        "--grid",
        "11x11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["kind"], "family_sweep");
    assert_eq!(report["pass"], true);
    assert_eq!(report["members"].as_array().unwrap().len(), 4);

    // Heisenberg obstruction: exit 1, first failing theta reported, and the
    // failing member carries a residual >= 0.05.
    let out = run(&[
        "family",
        "--surface",
        "nil3-vertical-plane",
        "--law",
        "canonical",
        "--thetas",
        "0.39269908169872414,0.7853981633974483,1.1780972450961724",
        "--grid",
        "11x11",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("first failing theta"));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], false);
    let worst = report["members"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|m| m["equations"].as_array().unwrap())
        .map(|e| e["max_abs"].as_f64().unwrap())
        .fold(0.0f64, f64::max);
    assert!(worst >= 0.05, "worst member residual {worst}");

    // theta = 0 alone always passes when the base does.
    let out = run(&[
        "family",
        "--surface",
        "nil3-vertical-plane",
        "--thetas",
        "0",
        "--grid",
        "11x11",
    ]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn classify_outcomes_and_exit_codes() {
    // Heisenberg vertical plane: definite NotExists, exit 0, spec keys.
    let out = run(&["classify", "--surface", "nil3-vertical-plane"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "NotExists");
    assert_eq!(v["obstruction"], "relationHandtau");
    assert_eq!(v["case"], "T_equals_dt");

    // Helicoid: minimal surface in a product.
    let out = run(&["classify", "--space", "E(-1,0)", "--surface", "helicoid-product"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "ExistsMinimalProduct");

    // Warped slice: totally umbilical.
    let out = run(&[
        "classify",
        "--space",
        "W(1,1,0,0,a=poly[1,0,1],I=[0.25,0.75])",
        "--surface",
        "slice-product",
        "--param",
        "t0=0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "ExistsTotallyUmbilical");

    // Mixed case: a graph whose structure field vanishes at the grid center
    // and is generic elsewhere. Undetermined, exit 3.
    let out = run(&[
        "classify",
        "--space",
        "E(1,0)",
        "--surface",
        "graph",
        "--param",
        "phi=0.2*(u*u+v*v)",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["outcome"], "Undetermined");
    assert_eq!(v["case"], "mixed");
    assert!(v["subverdicts"].as_array().unwrap().len() >= 2);
}

#[test]
fn csv_projection_has_expected_shape() {
    let out = run(&[
        "family",
        "--space",
        "E(-1,0)",
        "--surface",
        "helicoid-product",
        "--thetas",
        "0.5,1.0",
        "--grid",
        "7x7",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "theta,equation,max_abs,mean_abs,argmax_u,argmax_v,pass");
    // two thetas x four homogeneous equations
    assert_eq!(lines.len(), 1 + 2 * 4);
}
