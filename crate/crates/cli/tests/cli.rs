use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn stratmine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratmine"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

fn synth(dir: &TempDir, game: &str, name: &str, extra: &[&str]) -> String {
    let out = path(dir, name);
    let mut args = vec!["synth", "--game", game, "--out", &out];
    args.extend_from_slice(extra);
    let o = stratmine(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn rps_reference_shape() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "rps", "rps.csv", &[]);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 601);
    let arff = path(&dir, "rps.arff");
    let o = stratmine(&["featurize", &csv, "--game", "rps", "--window", "3", "--out", &arff]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "540 instances");
    assert!(fs::read_to_string(&arff).unwrap().contains("@attribute next {R,P,S}"));
}

#[test]
fn ct_reference_shape() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "ct", "ct.csv", &["--n", "371"]);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 372);
    let arff = path(&dir, "ct.arff");
    let o = stratmine(&["featurize", &csv, "--game", "ct", "--out", &arff]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "371 instances");
}

#[test]
fn window_longer_than_episodes_names_the_episode() {
    let dir = TempDir::new().unwrap();
    let csv = synth(
        &dir,
        "rps",
        "short.csv",
        &["--subjects", "1", "--threads", "1", "--turns", "4"],
    );
    let o = stratmine(&[
        "featurize",
        &csv,
        "--game",
        "rps",
        "--window",
        "5",
        "--out",
        &path(&dir, "x.arff"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("s01") && err.contains("t1"), "{err}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    fs::write(
        &csv,
        "subject_id,thread_id,turn_index,own,opp\ns,t,0,R,P\ns,t,1,SPOCK,P\n",
    )
    .unwrap();
    let o = stratmine(&[
        "featurize",
        csv.to_str().unwrap(),
        "--game",
        "rps",
        "--out",
        &path(&dir, "x.arff"),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(stratmine(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(stratmine(&["synth", "--game", "chess"]).status.code(), Some(1));
    let o = stratmine(&["synth", "--game", "rps", "--adherence", "0.1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stratmine(&["--help"]).status.success());
}

#[test]
fn version_subcommand() {
    let o = stratmine(&["version"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), format!("stratmine {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn synth_is_reproducible() {
    let dir = TempDir::new().unwrap();
    for game in ["rps", "ct"] {
        let a = synth(&dir, game, "a.csv", &["--seed", "17"]);
        let a = fs::read(a).unwrap();
        let b = synth(&dir, game, "b.csv", &["--seed", "17"]);
        assert_eq!(a, fs::read(b).unwrap());
        let c = synth(&dir, game, "c.csv", &["--seed", "18"]);
        assert_ne!(a, fs::read(c).unwrap());
    }
}

#[test]
fn evaluate_json_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "rps", "rps.csv", &["--adherence", "0.8"]);
    let run = |name: &str| {
        let out = path(&dir, name);
        let o = stratmine(&["evaluate", &csv, "--game", "rps", "--seed", "3", "--out", &out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        fs::read(out).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["seed"], 3);
    assert_eq!(v["config"]["classifiers"].as_array().unwrap().len(), 6);
    let winner = v["runs"][0]["ranking"]["winner"].as_str().unwrap();
    assert!(["one_r", "decision_table", "smo"].contains(&winner), "{winner}");
}

#[test]
fn featurize_json_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "ct", "ct.csv", &[]);
    let arff = path(&dir, "ct.arff");
    let args = ["featurize", &csv, "--game", "ct", "--out", &arff, "--json"];
    let a = stratmine(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, stratmine(&args).stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["instances"], 371);
}

#[test]
fn two_folds_on_ten_instances() {
    let dir = TempDir::new().unwrap();
    let arff = dir.path().join("ten.arff");
    let mut text = String::from("@relation ten\n@attribute a {x,y}\n@attribute c {p,q}\n@data\n");
    for i in 0..10 {
        text.push_str(if i % 2 == 0 { "x,p\n" } else { "y,q\n" });
    }
    fs::write(&arff, text).unwrap();
    let o = stratmine(&[
        "evaluate",
        arff.to_str().unwrap(),
        "--folds",
        "2",
        "--classifiers",
        "zero_r,one_r",
        "--json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let folds = v["runs"][0]["ranking"]["ranking"][0]["folds"]
        .as_array()
        .unwrap()
        .clone();
    let sizes: Vec<u64> = folds.iter().map(|f| f["size"].as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![5, 5]);
}

#[test]
fn too_many_folds_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "ct", "ct.csv", &["--n", "5"]);
    let o = stratmine(&["evaluate", &csv, "--game", "ct", "--folds", "6"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn window_sweep_compares_runs() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "rps", "rps.csv", &[]);
    let o = stratmine(&[
        "evaluate",
        &csv,
        "--game",
        "rps",
        "--window",
        "1,3,5",
        "--classifiers",
        "one_r,zero_r",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    for w in ["w=1", "w=3", "w=5"] {
        assert!(text.lines().any(|l| l.starts_with(w)), "{text}");
    }
}

fn mine(arff: &Path) -> serde_json::Value {
    let o = stratmine(&["mine", arff.to_str().unwrap(), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn mine_pure_shift_rule() {
    let dir = TempDir::new().unwrap();
    // an own-history shift at full adherence cycles with period 3, which
    // makes own_prev_3 an equally perfect predictor
    let csv = synth(&dir, "rps", "rps.csv", &["--adherence", "1", "--source", "opp"]);
    let arff = dir.path().join("rps.arff");
    assert!(
        stratmine(&["featurize", &csv, "--game", "rps", "--out", arff.to_str().unwrap()])
            .status
            .success()
    );
    let v = mine(&arff);
    assert_eq!(v["rules"][0]["conformance"], 1.0);
    assert_eq!(
        v["rules"][0]["rule"],
        "IF opp_prev_1=R THEN next=P; IF opp_prev_1=P THEN next=S; IF opp_prev_1=S THEN next=R"
    );
    let text = stdout(&stratmine(&["mine", arff.to_str().unwrap()]));
    assert!(text.contains("conformance 100.00%"));
}

#[test]
fn mine_flags_noise_as_weak() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "rps", "noise.csv", &["--adherence", "0.3333333333333333"]);
    let arff = dir.path().join("noise.arff");
    assert!(
        stratmine(&["featurize", &csv, "--game", "rps", "--out", arff.to_str().unwrap()])
            .status
            .success()
    );
    let v = mine(&arff);
    assert_eq!(v["rules"][0]["weak"], true);
    let majority = v["majority_frequency"].as_f64().unwrap();
    let c = v["rules"][0]["conformance"].as_f64().unwrap();
    assert!(c >= majority && c - majority < 0.05);
}

#[test]
fn mine_ct_refusal_table() {
    let dir = TempDir::new().unwrap();
    let csv = synth(&dir, "ct", "ct.csv", &["--n", "2000"]);
    let arff = dir.path().join("ct.arff");
    assert!(
        stratmine(&["featurize", &csv, "--game", "ct", "--out", arff.to_str().unwrap()])
            .status
            .success()
    );
    let v = mine(&arff);
    let table = &v["rules"][1];
    assert_eq!(table["classifier"]["id"], "decision_table");
    assert!((table["conformance"].as_f64().unwrap() - 0.9515).abs() < 0.03);
    let rule = table["rule"].as_str().unwrap();
    assert!(rule.contains("proposer_delta=0.45 AND responder_delta=0 THEN reply=accept"));
    assert!(rule.contains("proposer_delta=-0.45 AND responder_delta=0 THEN reply=reject"));
}
