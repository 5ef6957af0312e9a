use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cmguard(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmguard"))
        .current_dir(dir)
        .env_remove("CMGUARD_OUT")
        .args(args)
        .output()
        .unwrap()
}

fn ok(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

const SMALL: &str = "[memory]\nrows = 8\ncols = 16\n[tasks]\ncount = 4\nframes = [3, 5, 2, 5]\n[campaign]\nruns = 10\n";

fn small(dir: &Path) -> String {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn snapshot_is_deterministic_and_lists_every_task() {
    let dir = tempfile::tempdir().unwrap();
    ok(&cmguard(dir.path(), &["--out", "a", "snapshot"]));
    ok(&cmguard(dir.path(), &["--out", "b", "snapshot"]));
    let a = fs::read_to_string(dir.path().join("a/golden.txt")).unwrap();
    assert_eq!(a, fs::read_to_string(dir.path().join("b/golden.txt")).unwrap());
    let hashes: Vec<_> = a.lines().filter(|l| l.starts_with("hash ")).collect();
    assert_eq!(hashes.len(), 10);
    assert!(hashes.iter().all(|l| l.split_whitespace().nth(2).unwrap().len() == 128));
}

#[test]
fn inject_scan_correct_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    for sub in ["snapshot", "inject"] {
        ok(&cmguard(dir.path(), &["--config", &cfg, "--out", "o", sub]));
    }
    let faults = fs::read_to_string(dir.path().join("o/faults.txt")).unwrap();
    let task: usize = faults.lines().find(|l| !l.starts_with('#')).unwrap().split_whitespace().next().unwrap().parse().unwrap();

    ok(&cmguard(dir.path(), &["--config", &cfg, "--out", "o", "scan"]));
    let scan: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/scan.json")).unwrap()).unwrap();
    assert_eq!(scan["faulty_tasks"], serde_json::json!([task]));

    ok(&cmguard(dir.path(), &["--config", &cfg, "--out", "o", "correct"]));
    let c: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("o/correct.json")).unwrap()).unwrap();
    assert_eq!(c["restored"], true);
}

#[test]
fn campaign_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let campaign = ok(&cmguard(dir.path(), &["--config", &cfg, "--out", "o", "campaign"]));
    for f in ["proposed.jsonl", "scrubbing.jsonl", "summary.csv", "redundancy.dat", "latency.dat"] {
        assert!(dir.path().join("o").join(f).exists(), "{f}");
    }
    let lines = fs::read_to_string(dir.path().join("o/proposed.jsonl")).unwrap().lines().count();
    assert_eq!(lines, 10);
    let report = ok(&cmguard(dir.path(), &["--out", "o", "report"]));
    assert_eq!(report, campaign);
}

#[test]
fn no_faults_means_every_run_is_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    ok(&cmguard(dir.path(), &["--config", &cfg, "--out", "o", "--fault-model", "none", "campaign"]));
    let text = fs::read_to_string(dir.path().join("o/proposed.jsonl")).unwrap();
    for line in text.lines() {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["clean"], 4);
        assert_eq!(r["corrupted_tasks"], serde_json::json!([]));
        assert_eq!(r["frames_downloaded"], 0);
    }
}

#[test]
fn bad_input_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small(dir.path());
    let cases: [&[&str]; 5] = [
        &["--out", "missing", "report"],
        &["--config", "nope.toml", "snapshot"],
        &["--config", &cfg, "--weights", "1,2,0,0", "campaign"],
        &["--config", &cfg, "--fault-model", "cosmic", "inject"],
        &["--config", &cfg, "--out", "o", "scan", "--faults", "absent.txt"],
    ];
    for args in cases {
        let o = cmguard(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_cmguard"))
        .current_dir(dir.path())
        .env("CMGUARD_OUT", "from-env")
        .arg("snapshot")
        .output()
        .unwrap();
    ok(&o);
    assert!(dir.path().join("from-env/golden.txt").exists());
}
