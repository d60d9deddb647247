use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ramsey-forge"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ramsey-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn trees_enumerate_lists_nine_trees() {
    let v = json(&["trees", "enumerate", "--max-nodes", "4"]);
    assert_eq!(v["count"], 9);
    let trees: Vec<&str> = v["trees"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
    assert_eq!(trees[..4], ["()", "(())", "((()))", "(()())"]);
}

#[test]
fn gr_two_three_three_is_not_a_witness() {
    let v = json(&["witness", "check", "--instance", "gr", "--k", "2", "--l", "3", "--m", "3", "-c", "2"]);
    assert_eq!(v["verdict"], "not_witness");
    assert_eq!(v["smalls"], 3);
    let bad: Vec<u64> = v["bad_coloring"].as_array().unwrap().iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(bad.len(), 3);
    assert!(bad.iter().any(|&c| c != bad[0]));
}

#[test]
fn moore_two_three_holds() {
    let v = json(&["moore", "check", "--m", "2", "--n", "3"]);
    assert_eq!(v["verdict"], "holds");
    assert_eq!(v["counterexample"], Value::Null);
}

#[test]
fn moore_three_three_reports_a_counterexample() {
    let v = json(&["moore", "check", "--m", "3", "--n", "3"]);
    assert_eq!(v["verdict"], "counterexample");
    assert_eq!(v["counterexample"], "10");
}

#[test]
fn budget_exhaustion_exits_two() {
    let (code, stdout, _) = run(&["witness", "check", "--instance", "gr", "--k", "2", "--l", "3", "--m", "6", "--budget", "1"]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["verdict"], "inconclusive");
    assert!(v["reason"].as_str().unwrap().contains("budget of 1"));
}

#[test]
fn coloring_cap_comes_from_the_environment() {
    let out = bin()
        .args(["moore", "check", "--m", "3", "--n", "4"])
        .env("RAMSEY_FORGE_CAP", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["reason"].as_str().unwrap().contains("cap of 8"));
}

#[test]
fn usage_errors_name_the_flag() {
    let (code, _, stderr) = run(&["trees", "enumerate"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--max-nodes"), "{stderr}");

    let (code, _, stderr) = run(&["trees", "enumerate", "--max-nodes", "3", "--bogus"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--bogus"), "{stderr}");

    let (code, _, stderr) = run(&["witness", "check", "--instance", "leeb", "--s", "()", "--t", "()"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--u"), "{stderr}");

    let (code, _, stderr) = run(&["witness", "check", "--instance", "leeb", "--s", "(()", "--t", "()", "--u", "()"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--s"), "{stderr}");

    let (code, _, stderr) = run(&["fullsets", "check", "--factor", "4,1,2"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("not prime"), "{stderr}");

    let (code, _, stderr) = run(&["--workers", "0", "trees", "enumerate", "--max-nodes", "2"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--workers"), "{stderr}");
}

#[test]
fn trees_can_come_from_a_file() {
    let path = scratch("trees.toml");
    std::fs::write(&path, "s = \"(())\"\nt = \"(()())\"\nu = \"((())())\"\n").unwrap();
    let from_file = json(&["witness", "check", "--instance", "leeb", "--file", path.to_str().unwrap()]);
    let inline = json(&["witness", "check", "--instance", "leeb", "--s", "(())", "--t", "(()())", "--u", "((())())"]);
    assert_eq!(from_file, inline);

    std::fs::write(&path, "source = \"((()))\"\ntarget = \"(())\"\n").unwrap();
    let v = json(&["maps", "enumerate", "--file", path.to_str().unwrap()]);
    assert_eq!(v["count"], 3);

    std::fs::write(&path, "colour = 3\n").unwrap();
    let (code, _, stderr) = run(&["maps", "enumerate", "--file", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("colour"), "{stderr}");
}

#[test]
fn axioms_check_and_dump() {
    let path = scratch("fragment.json");
    let v = json(&["axioms", "check", "--max-nodes", "3", "-c", "2", "--dump", path.to_str().unwrap()]);
    assert_eq!(v["all_passed"], true);
    assert_eq!(v["elements"], 6);
    assert_eq!(v["lp_implies_r"]["violations"], Value::Array(vec![]));
    let dump: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dump["a_elems"].as_array().unwrap().len(), 6);
    assert_eq!(dump["p_sets"].as_array().unwrap().len(), 13);
}

#[test]
fn table_mode_carries_the_same_fields() {
    let args = ["moore", "check", "--m", "3", "--n", "4"];
    let v = json(&args);
    let mut with_table = args.to_vec();
    with_table.extend(["--format", "table"]);
    let (code, table, _) = run(&with_table);
    assert_eq!(code, 0);
    for key in v.as_object().unwrap().keys() {
        assert!(table.lines().any(|l| l.starts_with(key.as_str())), "{key} missing from\n{table}");
    }
}

#[test]
fn fullsets_sweeps() {
    let v = json(&["fullsets", "check", "--factor", "2,1,1", "-c", "2"]);
    assert_eq!(v["elements"], 3);
    assert_eq!(v["colorings_checked"], 8);
    let v = json(&["fullsets", "check", "--factor", "2,0,2", "-c", "2"]);
    assert_eq!(v["verdict"], "counterexample");
}

#[test]
fn minimal_witness_search() {
    let v = json(&["witness", "search", "--instance", "gr", "--k", "2", "--l", "3", "-c", "2", "--max-size", "6"]);
    assert_eq!(v["found"], "6");
    assert_eq!(v["verdict"], "witness");
    let v = json(&["witness", "search", "--instance", "dual-tree", "--s", "(())", "--t", "(())", "--max-size", "3"]);
    assert_eq!(v["found"], "(())");
}

#[test]
fn partitions_enumerate_warns_on_indivisible_homogeneous() {
    let v = json(&["partitions", "enumerate", "--m", "5", "--k", "2", "--homogeneous"]);
    assert_eq!(v["count"], 0);
    assert!(v["warning"].is_string());
}
