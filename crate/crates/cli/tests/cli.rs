use std::path::PathBuf;
use std::process::{Command, Output};

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../programs")
        .join(name)
}

fn ae(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ae"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path(name: &str) -> String {
    program(name).to_str().unwrap().to_string()
}

#[test]
fn run_prints_table_and_result() {
    let out = ae(&["run", &path("bab_l1_x.ae")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("n  | op | v1"));
    assert!(text.contains("v7 = v5 × v1"));
    assert!(text.contains("7* | ÷"));
    assert_eq!(text.lines().last(), Some("v3'' = 2"));
}

#[test]
fn init_overrides_file_values() {
    let out = ae(&[
        "run",
        &path("bab_l1_xy.ae"),
        "--init",
        "v1=7,v2=-12,v3=-45,v4=4,v5=9,v6=6",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let tail: Vec<&str> = text.lines().rev().take(2).collect();
    assert_eq!(tail, vec!["v5''' = −2", "v4' = 3"]);
}

#[test]
fn json_and_csv_formats() {
    let out = ae(&["run", &path("bab_l1_xy.ae"), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 13);
    assert_eq!(doc["final"]["5"]["value"], "3");

    let out = ae(&["run", &path("bab_l1_x.ae"), "--format", "csv"]);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 8);
    assert!(text.starts_with("n,nature,reads,"));
}

#[test]
fn asm_and_cards_agree() {
    let asm = ae(&["asm", &path("bab_l1_xy.ae")]);
    let cards = ae(&["cards", &path("bab_l1_xy.ae")]);
    assert_eq!(asm.status.code(), Some(0));
    assert_eq!(asm.stdout, cards.stdout);
    let deck: serde_json::Value = serde_json::from_slice(&asm.stdout).unwrap();
    assert_eq!(deck["processor"].as_array().unwrap().len(), 10);
    assert_eq!(deck["memory"].as_array().unwrap().len(), 33);

    let text = stdout(&ae(&["asm", &path("bab_l1_x.ae"), "--text"]));
    assert!(text.starts_with("INIT v1 = 1\n"));
    assert!(text.contains("\nOP ×\n  SUPPLY 1 v5\n"));
}

#[test]
fn solve2x2_with_oracle() {
    let out = ae(&[
        "solve2x2", "--a", "1", "--b", "2", "--c", "-8", "--ap", "1", "--bp", "-1", "--cp", "1",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        stdout(&out),
        "x = 2, y = 3\nclosed form: x = 2, y = 3\nMATCH\n"
    );
}

#[test]
fn runtime_faults_exit_one() {
    let singular = ae(&[
        "solve2x2", "--a", "2", "--b", "3", "--c", "1", "--ap", "4", "--bp", "6", "--cp", "5",
    ]);
    assert_eq!(singular.status.code(), Some(1));
    assert!(stderr(&singular).contains("SingularSystem"));
    assert!(stderr(&singular).contains("step 7"));

    let flat = ae(&[
        "solve2x2", "--a", "2", "--b", "0", "--c", "-4", "--ap", "1", "--bp", "1", "--cp", "-5",
    ]);
    assert_eq!(flat.status.code(), Some(1));
    assert!(stderr(&flat).contains("DegenerateB"));
    assert!(stderr(&flat).contains("step 13"));

    let inexact = ae(&[
        "solve2x2", "--a", "1", "--b", "4", "--c", "-7", "--ap", "1", "--bp", "-4", "--cp", "5",
    ]);
    assert_eq!(inexact.status.code(), Some(1));
    assert!(stderr(&inexact).contains("InexactDivision"));
    assert!(stderr(&inexact).contains("step 13"));

    let run = ae(&["run", &path("bab_l1_x.ae"), "--init", "v2=3,v4=1,v6=2"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(stderr(&run).contains("step 7"));
}

#[test]
fn truncating_division_flag() {
    // v4' = 5 - 0, v1'' = 1 - 3, so step 7 divides 5 by -2.
    let inits = "v1=1,v2=1,v3=0,v4=3,v5=1,v6=5";
    let exact = ae(&["run", &path("bab_l1_x.ae"), "--init", inits]);
    assert_eq!(exact.status.code(), Some(1));
    assert!(stderr(&exact).contains("step 7"));

    let out = ae(&[
        "run",
        &path("bab_l1_x.ae"),
        "--init",
        inits,
        "--division",
        "truncate",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().last(), Some("v3'' = −2"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let bad = std::env::temp_dir().join(format!("ae-bad-{}.ae", std::process::id()));
    std::fs::write(&bad, "INIT v1 = 1\nOP *\n  RETAIN 1\n").unwrap();
    let out = ae(&["run", bad.to_str().unwrap()]);
    std::fs::remove_file(&bad).unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    for args in [
        vec!["run", "/nonexistent/program.ae"],
        vec!["run", &path("bab_l1_x.ae"), "--init", "x1=3"],
        vec!["run", &path("bab_l1_x.ae"), "--init", "v100=3"],
        vec!["run", &path("bab_l1_x.ae"), "--format", "yaml"],
        vec!["run", &path("bab_l1_x.ae"), "--digits", "0"],
        vec!["solve2x2", "--a", "1"],
        vec!["frobnicate"],
    ] {
        let out = ae(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(out.stdout.is_empty(), "{args:?}");
    }
}
