use std::process::Command;

use serde_json::Value;

fn logdrw(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_logdrw"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).expect("valid JSON report")
}

#[test]
fn verify_identities_example() {
    let (code, out, _) = logdrw(&[
        "verify", "--suite", "identities", "--model", "poly:p=3,n=2,e=1,f=0", "--m", "3", "--trials", "20", "--seed",
        "42",
    ]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["suite"], "identities");
    assert_eq!(r["config"]["seed"], "42");
    assert_eq!(r["checks"].as_array().unwrap().len(), 8);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert!(r["timing_ms"].is_null());
}

#[test]
fn compare_lift_example() {
    let (code, out, _) = logdrw(&[
        "compare-lift", "--model", "semistable:p=2,n=2,e=2,f=0,d=2", "--m", "2", "--max-num", "8", "--max-den", "1",
    ]);
    assert_eq!(code, 0);
    let r = json(&out);
    let rows = r["tables"][0]["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    for row in rows {
        assert_eq!(row["drw"], row["lift"]);
    }
    // divisors are strings "p^s"
    let any = rows.iter().flat_map(|r| r["drw"].as_array().unwrap()).flat_map(|d| d.as_array().unwrap()).next();
    assert!(any.unwrap().as_str().unwrap().starts_with("2^"));
}

#[test]
fn gauss_example() {
    let (code, out, _) = logdrw(&["gauss", "--model", "poly:p=3,n=1,e=0,f=0", "--N", "3", "--trials", "200", "--eps", "1/2"]);
    assert_eq!(code, 0);
    let r = json(&out);
    assert_eq!(r["checks"][0]["name"], "norm_equals_coordinate_formula");
    assert_eq!(r["checks"][0]["details"]["instances"], 600);
}

#[test]
fn other_subcommands() {
    let semi = "semistable:p=3,n=2,e=2,f=0,d=2";
    for cmd in ["e1", "mv", "steenbrink"] {
        let (code, out, err) = logdrw(&[cmd, "--model", semi, "--m", "1"]);
        assert_eq!(code, 0, "{cmd}: {err}");
        assert_eq!(json(&out)["suite"], if cmd == "mv" { "mv" } else { cmd });
    }
    let (code, out, _) = logdrw(&["cohomology", "--model", semi, "--m", "2", "--weight", "[1,0]", "--variant", "lift"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["tables"][0]["rows"][0]["variant"], "lift");
}

#[test]
fn parse_errors_exit_with_two() {
    assert_eq!(logdrw(&["frobnicate"]).0, 2);
    assert_eq!(logdrw(&["verify", "--suite", "identities", "--model", "poly:p=4,n=1,e=0,f=0"]).0, 2);
    assert_eq!(logdrw(&["verify", "--model", "poly:p=3,n=1,e=0,f=0"]).0, 2);
    assert_eq!(logdrw(&["verify", "--suite", "nope", "--model", "poly:p=3,n=1,e=0,f=0"]).0, 2);
    assert_eq!(logdrw(&["gauss", "--model", "poly:p=3,n=1,e=0,f=0", "--eps=0"]).0, 2);
    assert_eq!(logdrw(&["mv", "--model", "poly:p=3,n=1,e=0,f=0"]).0, 2);
    assert_eq!(logdrw(&["cohomology", "--model", "poly:p=3,n=1,e=0,f=0", "--weight", "[x]"]).0, 2);
    assert_eq!(logdrw(&["--help"]).0, 0);
}

#[test]
fn config_file_is_overridden_by_flags_and_reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("suite.conf");
    std::fs::write(&conf, "suite=normal-form\nmodel=semistable:p=2,n=2,e=2,f=0,d=2\ntrials=30\nseed=1\n").unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let (code, _, _) = logdrw(&[
            "verify",
            "--config",
            conf.to_str().unwrap(),
            "--seed",
            "9",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let r = json(std::str::from_utf8(&ja).unwrap());
    assert_eq!(r["config"]["seed"], "9");
    assert_eq!(r["config"]["trials"], "30");
    assert_eq!(r["suite"], "normal-form");
}
