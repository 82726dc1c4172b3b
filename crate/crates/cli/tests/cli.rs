use std::fs;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lab"))
}

#[test]
fn list_names_every_experiment() {
    let out = lab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["stechkin", "khintchine", "modulation-conjugation", "isometry-l2"] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn unknown_experiment_is_a_usage_error() {
    let out = lab().args(["run", "no-such-thing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_flag_is_a_usage_error() {
    let out = lab().args(["run", "stechkin", "--grid", "abc"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for tag in ["a", "b"] {
        let out = dir.path().join(tag);
        let status = lab()
            .args(["run", "isometry-l2", "--grid", "16,1024", "--window", "3,3", "--trials", "8", "--seed", "7"])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        files.push(fs::read(out.join("isometry-l2.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn stechkin_sign_symbol_on_l2() {
    let dir = tempfile::tempdir().unwrap();
    let status = lab()
        .args(["run", "stechkin", "--grid", "16,512", "--space", "Lp:2", "--set", "symbol=sign"])
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("stechkin.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next().unwrap(), "experiment,parameters,trial,metric,value,bound,pass");
    let row = rows.next().unwrap();
    let fields: Vec<&str> = row.rsplitn(4, ',').collect();
    let (pass, bound, value) = (fields[0], fields[1], fields[2]);
    let value: f64 = value.parse().unwrap();
    let bound: f64 = bound.parse().unwrap();
    assert!((value - 1.0).abs() < 1e-6, "{value}");
    assert!((bound - 3.0).abs() < 1e-9, "{bound}");
    assert_eq!(pass, "true");
    let summary = fs::read_to_string(dir.path().join("stechkin.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert!(json["wall_time_s"].as_f64().is_some());
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let status = lab()
        .args(["run", "khintchine", "--trials", "4"])
        .env("LAB_OUTPUT_DIR", dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("khintchine.csv").exists());
}

#[test]
fn stechkin_reads_a_symbol_file() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("step.txt");
    // A single jump of height 2 at ω = 0.5: ‖a‖_V = 1 + 2.
    fs::write(&table, "# omega re\n-100 1\n0.49 1\n0.51 -1\n100 -1\n").unwrap();
    let status = lab()
        .args(["run", "stechkin", "--grid", "16,512", "--space", "Lp:2"])
        .arg("--set")
        .arg(format!("symbol={}", table.display()))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(dir.path().join("stechkin.csv")).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.rsplitn(4, ',').collect();
    let value: f64 = fields[2].parse().unwrap();
    let bound: f64 = fields[1].parse().unwrap();
    assert!((value - 1.0).abs() < 1e-6, "{value}");
    assert!((bound - 3.0).abs() < 1e-6, "{bound}");
}
