use std::path::PathBuf;
use std::process::Command;

use qkdsim::channel::Transcript;

fn qkdsim() -> Command {
    Command::new(PathBuf::from(env!("CARGO_BIN_EXE_qkdsim")))
}

fn run(args: &[&str]) -> (bool, String) {
    let out = qkdsim().args(args).env_remove("RUST_BACKTRACE").output().unwrap();
    (out.status.success(), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn run_writes_result_and_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let (ok, stdout) = run(&["run", "--rounds", "4096", "--seed", "3", "--transcript", path.to_str().unwrap()]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["outcome"], "success");
    let t = Transcript::read_jsonl(std::fs::read(&path).unwrap().as_slice()).unwrap();
    assert_eq!(v["transcript"]["sha256"], t.digest_hex());
}

#[test]
fn abort_is_not_an_error() {
    let (ok, stdout) = run(&["run", "--rounds", "1024", "--eve", "intercept:random:1"]);
    assert!(ok);
    assert!(stdout.contains("\"aborted\""));
}

#[test]
fn bad_arguments_fail() {
    assert!(!run(&["run", "--px", "1.5"]).0);
    assert!(!run(&["run", "--eve", "bogus"]).0);
    assert!(!run(&["sweep", "--kind", "run-once", "--grid", "1"]).0);
    assert!(!run(&["otp-demo", "--message", "zz"]).0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"n_rounds": 4096, "noise": {"p_x": 0.002}, "seed": 9}"#).unwrap();
    let (ok, a) = run(&["run", "--config", path.to_str().unwrap()]);
    assert!(ok);
    let (_, b) = run(&["run", "--config", path.to_str().unwrap(), "--seed", "10"]);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["stats"]["raw_len"], 4096);
    assert_ne!(a, b);
    std::fs::write(&path, r#"{"rounds": 5}"#).unwrap();
    assert!(!run(&["run", "--config", path.to_str().unwrap()]).0);
}

#[test]
fn sweep_csv_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let (ok, _) = run(&[
            "sweep",
            "--kind",
            "qber-vs-eve",
            "--grid",
            "0,0.25,0.5,1",
            "--reps",
            "2",
            "--rounds",
            "2048",
            "--qmax",
            "0.9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(ok);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 5);
    assert!(text
        .starts_with("param,grid_index,base_seed,reps,qber_mean,qber_std,abort_rate,final_len_mean,leak_mean,eps_qkd"));
}

#[test]
fn demos_print_json() {
    let (ok, out) = run(&["teleport-demo", "--trials", "50"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["trials"], 50);

    let (ok, out) = run(&["cloning-demo", "--copies", "100"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["alice_measures_z"]["inferred_basis"], "Z");

    let (ok, out) = run(&["otp-demo", "--message", "48656c6c6f"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["recovered"], true);
    assert_eq!(v["decrypted_hex"], "48656c6c6f");
}
