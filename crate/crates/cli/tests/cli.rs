use std::path::PathBuf;
use std::process::{Command, Output};

use relconn::catalog::builtin_library;
use relconn::formula::parse_formula;
use relconn::graph::{solutions, SolutionGraph};

fn fixture(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("fixtures");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn relconn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relconn"))
        .args(args)
        .output()
        .expect("run relconn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn classify_set_prints_table_row() {
    let out = relconn(&["classify-set", &fixture("m.rel")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out).trim(),
        "SchaeferNotCPSS; Conn_C: coNP-complete; st-Conn_C: P; diameter: O(n)"
    );
    let out = relconn(&["classify-set", "--builtin", "R_PSPA"]);
    assert!(stdout(&out).starts_with("NotSafelyTight;"));
}

#[test]
fn triangle_is_disconnected() {
    let out = relconn(&["conn", &fixture("triangle.cnfs"), "--method", "cpss"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "disconnected");
    let out = relconn(&["--exit-status", "conn", &fixture("triangle.cnfs")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_exits_2() {
    let out = relconn(&["conn", "nonexistent.file"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent.file"));
    let out = relconn(&["conn"]);
    assert_eq!(out.status.code(), Some(2));
    let out = relconn(&["conn", &fixture("t.cnfs"), "--method", "cpss"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn projections_miss_disconnection_of_t() {
    let t = fixture("t.cnfs");
    assert_eq!(
        stdout(&relconn(&["conn", &t, "--method", "brute"])).trim(),
        "disconnected"
    );
    assert_eq!(
        stdout(&relconn(&["conn", &t, "--method", "projections"])).trim(),
        "connected"
    );
    assert_eq!(stdout(&relconn(&["conn", &t])).trim(), "disconnected");
}

#[test]
fn conn_json_schema() {
    let out = relconn(&[
        "--json",
        "conn",
        &fixture("triangle.cnfs"),
        "--method",
        "cpss",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["connected"], false);
    assert_eq!(v["method"], "cpss (bijunctive)");
    let p = &v["projections"][0];
    assert_eq!(p["vars"], serde_json::json!(["x", "y"]));
    assert_eq!(p["relation"], serde_json::json!(["00", "11"]));
    assert_eq!(p["components"], 2);
}

#[test]
fn stconn_path_and_exit_status() {
    let t = fixture("t.cnfs");
    let out = relconn(&["stconn", &t, "--from", "010000", "--to", "101010"]);
    let text = stdout(&out);
    assert!(text.starts_with("connected (distance"));
    let out = relconn(&[
        "--exit-status",
        "stconn",
        &t,
        "--from",
        "000000",
        "--to",
        "111111",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "not connected");
    let out = relconn(&["stconn", &t, "--from", "100000", "--to", "111111"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn components_and_diameter() {
    let t = fixture("t.cnfs");
    let out = relconn(&["components", &t]);
    assert!(stdout(&out).starts_with("11 solution(s), 2 component(s)"));
    let out = relconn(&["diameter", &fixture("m.cnfs")]);
    assert_eq!(stdout(&out).trim(), "4");
}

#[test]
fn graph_dot_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.dot");
    let out = relconn(&["graph", &fixture("m.cnfs"), "--dot", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("graph G {"));
    assert_eq!(dot.matches(" -- ").count(), 4);
}

#[test]
fn reduce_output_round_trips() {
    let out = relconn(&["reduce", &fixture("psi.cnfs")]);
    assert_eq!(out.status.code(), Some(0));
    let phi = parse_formula(&stdout(&out), &builtin_library()).unwrap();
    assert_eq!(SolutionGraph::new(&phi).unwrap().components().len(), 2);
}

#[test]
fn express_m_output_defines_m() {
    let out = relconn(&["express-m", "--builtin", "PHI_coNP"]);
    assert_eq!(out.status.code(), Some(0));
    let phi = parse_formula(&stdout(&out), &builtin_library()).unwrap();
    assert_eq!(
        solutions(&phi).unwrap(),
        vec![0b000, 0b001, 0b010, 0b101, 0b111]
    );
    let out = relconn(&["express-m", "--builtin", "NAND"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn horn_commands() {
    let h = fixture("t.horn");
    let out = relconn(&["horn", "selfimp", &h]);
    assert_eq!(stdout(&out), "{}\n{u,v,w,x,y,z}\n");
    let out = relconn(&["horn", "imp", &h, "--set", "x,y"]);
    assert_eq!(stdout(&out).trim(), "Imp({x,y}) = {v,x,y,z}");
    let out = relconn(&["horn", "normalize", &fixture("rule_c.horn")]);
    assert_eq!(
        stdout(&out),
        "# rule (c): y | -x\nvar x y z\nz | -x\ny | -z\nz | -y\n"
    );
}

#[test]
fn random_is_deterministic() {
    let a = relconn(&["--json", "random", "--seed", "11", "--class", "affine"]);
    let b = relconn(&["--json", "random", "--seed", "11", "--class", "affine"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&relconn(&["random", "--seed", "11", "--class", "affine"]));
    assert!(parse_formula(&text, &builtin_library()).is_ok());
}

#[test]
fn classify_relation_profile() {
    let out = relconn(&["classify-relation", "--builtin", "R_PSPA"]);
    let text = stdout(&out);
    assert!(text.contains("  OR-free: yes\n"));
    assert!(text.contains("  safely OR-free: no\n"));
    let out = relconn(&["--json", "classify-relation", &fixture("m.rel")]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["horn"], true);
    assert_eq!(v[0]["safely_componentwise_ihsb_minus"], false);
}
