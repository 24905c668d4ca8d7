use std::path::Path;
use std::process::{Command, Output};

fn sosbid(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosbid")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sosbid(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn t1_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--toy", "t1", "-o", "t1.json"]);
    ok(d, &["solve", "t1.json", "--prove", "--mps-out", "t1.mps", "-o", "sos1.txt"]);
    let sol = std::fs::read_to_string(d.join("sos1.txt")).unwrap();
    assert!(sol.contains("OBJECTIVE 50.000000000000\n"));
    assert!(sol.contains("DEGRADATION_PCT 38.888888888889\n"));
    assert!(sol.ends_with("COLUMN D_c1_1 1.000000000000\nBID c1 0.400000000000\n"));
    assert!(ok(d, &["verify", "t1.json", "sos1.txt"]).starts_with("OK objective 50.0"));

    // The MPS file solves to the same answer, just without bids.
    let from_mps = ok(d, &["solve", "t1.mps", "--prove"]);
    assert!(from_mps.contains("OBJECTIVE 50.000000000000\n"));
    assert!(!from_mps.contains("BID"));

    let s3 = ok(d, &["solve", "t1.json", "--strategy", "3"]);
    assert!(s3.contains("DEGRADATION_PCT 0.000000000000\n"));
    assert!(s3.contains("BID c1 0.536363636364\n"));

    assert_eq!(ok(d, &["oracle", "t1.json"]), "OBJECTIVE 50.000000000000\nLEVEL c1 1\n");
    assert_eq!(
        ok(d, &["oracle", "t1.json", "--sos", "2"]),
        "OBJECTIVE 81.818181818182\nLEVEL c1 1 0.545454545455 2 0.454545454545\n"
    );
}

#[test]
fn convert_round_trips_through_mps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--businesses", "2", "--campaigns", "2-3", "--seed", "11", "-o", "g.json"]);
    let mps = ok(d, &["convert", "g.json"]);
    std::fs::write(d.join("g.mps"), &mps).unwrap();
    assert_eq!(ok(d, &["convert", "g.json", "-o", "again.mps"]), "");
    assert_eq!(std::fs::read_to_string(d.join("again.mps")).unwrap(), mps);
    let json: serde_json::Value = serde_json::from_str(&ok(d, &["convert", "g.mps"])).unwrap();
    let cols = json["columns"].as_array().unwrap().len();
    assert_eq!(cols, mps.matches(" OBJ ").count());
    assert!(json["sos"].as_array().unwrap().iter().all(|s| s["type"] == 1));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = ["generate", "--businesses", "2", "--campaigns", "3", "--levels", "2-5", "--seed", "5"];
    let a = ok(d, &gen);
    assert_eq!(a, ok(d, &gen));
    std::fs::write(d.join("g.json"), &a).unwrap();
    for strategy in ["none", "1", "2", "3"] {
        let args = ["solve", "g.json", "--strategy", strategy];
        assert_eq!(ok(d, &args), ok(d, &args), "strategy {strategy}");
    }
    let bench = ["bench", "g.json", "--scale", "6,9", "--seed", "3"];
    let csv = ok(d, &bench);
    assert_eq!(csv, ok(d, &bench));
    assert_eq!(csv.lines().count(), 1 + 3 * 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(sosbid(d, &["solve", "missing.json"]).status.code(), Some(3));
    std::fs::write(d.join("bad.json"), "{ not json").unwrap();
    assert_eq!(sosbid(d, &["solve", "bad.json"]).status.code(), Some(3));
    std::fs::write(d.join("bad.mps"), "NAME x\nROWS\n N  OBJ\nCOLUMNS\n    X  NOPE  1\nENDATA\n").unwrap();
    let out = sosbid(d, &["solve", "bad.mps"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 5"));

    ok(d, &["generate", "--toy", "t1", "-o", "t1.json"]);
    let out = Command::new(env!("CARGO_BIN_EXE_sosbid"))
        .current_dir(d)
        .args(["solve", "t1.json"])
        .env("SOSBID_ZERO_TOL", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    // Every instance is feasible (do nothing), so break the model instead.
    let mps = ok(d, &["convert", "t1.json"]).replace("IMP       1000", "IMP       -1");
    std::fs::write(d.join("inf.mps"), mps).unwrap();
    let out = sosbid(d, &["solve", "inf.mps"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("STATUS infeasible\n"));

    ok(d, &["generate", "--campaigns", "6", "--seed", "2", "-o", "g.json"]);
    let out = sosbid(d, &["solve", "g.json", "--node-limit", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("STATUS limit\nOBJECTIVE NA\n"));
}

#[test]
fn rollback_and_verify_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--toy", "fixing-trap", "-o", "trap.json"]);
    let sol = ok(d, &["solve", "trap.json", "--strategy", "2", "-o", "s.txt"]);
    assert_eq!(sol, "");
    let text = std::fs::read_to_string(d.join("s.txt")).unwrap();
    assert!(text.contains("OBJECTIVE 0.000000000000\n"));
    assert!(!text.contains("COLUMN"));
    ok(d, &["verify", "trap.json", "s.txt"]);

    // Claiming the top level of t1 breaks its budget.
    ok(d, &["generate", "--toy", "t1", "-o", "t1.json"]);
    let forged = "STATUS optimal\nOBJECTIVE 120\nLP_BOUND 120\nDEGRADATION_PCT 0\nSTRATEGY none\nSOS_TYPE 1\nSECONDS NA\nNODES 1\nCOLUMN D_c1_2 1\n";
    std::fs::write(d.join("forged.txt"), forged).unwrap();
    let out = sosbid(d, &["verify", "t1.json", "forged.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget of business k1"), "{}", String::from_utf8_lossy(&out.stderr));
}
