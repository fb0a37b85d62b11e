use std::path::PathBuf;
use std::process::{Command, Output};

use hocart::complexes::{ChainMap, Complex, Ring};
use hocart::io;
use hocart::lattice::IntMatrix;
use hocart::paper::{build_star, lemma2};
use hocart::squares::CommutativeSquare;
use serde_json::{json, Value};

fn hocart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hocart")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str, v: &Value) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, serde_json::to_string_pretty(v).unwrap()).unwrap();
    path
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn identity_square() -> CommutativeSquare {
    let z = Ring::Integers;
    let b = Complex::new(z.clone(), [(1, 1), (2, 1)], [(1, IntMatrix::from_i64(&[&[3]]))]).unwrap();
    let c = Complex::concentrated(z, 1, 2);
    let g = ChainMap::new(&b, &c, [(1, IntMatrix::from_i64(&[&[1], &[2]]))]).unwrap();
    CommutativeSquare::new(g.clone(), g, ChainMap::identity(&b), ChainMap::identity(&c)).unwrap()
}

#[test]
fn paper_verify_claimed_range_passes() {
    let o = hocart(&["paper", "verify", "--a-min", "3", "--a-max", "12"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("summary: 10/10 passed"));
}

#[test]
fn paper_verify_below_range_needs_flag() {
    assert_eq!(code(&hocart(&["paper", "verify", "--a-min", "2"])), 3);
    let o = hocart(&["paper", "verify", "--a-min", "2", "--a-max", "2", "--allow-unclaimed", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 1);
    assert_ne!(code(&o), 3);
}

#[test]
fn paper_verify_json_is_parseable() {
    let o = hocart(&["paper", "verify", "--a-min", "5", "--a-max", "5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["reports"][0]["claim1_not_homotopy_cartesian"]["modulus"], "25");
}

#[test]
fn square_check_exit_codes() {
    let yes = fixture("identity_square.json", &identity_square().to_json());
    assert_eq!(code(&hocart(&["square", "check", path_str(&yes)])), 0);

    let middle = fixture("middle_square.json", &build_star(3).unwrap().middle.to_json());
    let o = hocart(&["square", "check", path_str(&middle), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "no");
    assert_eq!(v["modulus"], "9");

    let text = serde_json::to_string(&identity_square().to_json()).unwrap();
    let truncated = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&hocart(&["square", "check", path_str(&truncated)])), 3);
    assert_eq!(code(&hocart(&["square", "check", "/nonexistent/square.json"])), 3);
}

#[test]
fn square_file_parameters_are_substituted() {
    let mut v = build_star(4).unwrap().middle.to_json();
    // replace the degree-0 differential of B by an expression in a
    assert_eq!(v["B"]["differentials"]["0"], json!([["-64"], ["16"]]));
    v["B"]["differentials"]["0"] = json!([["-a^3"], ["a^2"]]);
    v["parameters"] = json!({ "a": 4 });
    let f = fixture("middle_square_param.json", &v);
    let o = hocart(&["square", "check", path_str(&f)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("modulo 16"));
}

#[test]
fn complex_homology_of_multiplication() {
    let f = fixture(
        "mult9.json",
        &json!({ "ring": "Z", "degrees": { "0": 1, "1": 1 }, "differentials": { "0": [[9]] } }),
    );
    let o = hocart(&["complex", "homology", path_str(&f), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["homology"]["0"]["free_rank"], 0);
    assert_eq!(v["homology"]["1"]["invariant_factors"], json!(["9"]));
}

#[test]
fn triangle_verify_with_and_without_witness() {
    let inst = lemma2(2, 3, 0).unwrap();
    let mut v = inst.triangle.to_json();
    let f = fixture("lemma_tri.json", &v);
    assert_eq!(code(&hocart(&["triangle", "verify", path_str(&f)])), 0);
    v["u"] = io::chain_map_to_json(&inst.u);
    let f = fixture("lemma_tri_u.json", &v);
    assert_eq!(code(&hocart(&["triangle", "verify", path_str(&f)])), 0);
    // a zero third map cannot be distinguished here
    v["u"] = io::chain_map_to_json(&ChainMap::zero(inst.u.source(), inst.u.target()).unwrap());
    let f = fixture("lemma_tri_bad_u.json", &v);
    assert_eq!(code(&hocart(&["triangle", "verify", path_str(&f)])), 1);
}

#[test]
fn unit_lemma_cases() {
    let o = hocart(&["unit-lemma", "--ring", "z", "--eps", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o).trim(), "no solution");

    let o = hocart(&["unit-lemma", "--ring", "z", "--eps", "-2"]);
    assert_eq!(code(&o), 0);

    let o = hocart(&["unit-lemma", "--ring", "zmod:9", "--eps", "3", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["coefficient"], "0");

    let o = hocart(&["unit-lemma", "--ring", "matf:2:2", "--eps", "[[0,1],[0,0]]", "--variant", "beta"]);
    assert_eq!(code(&o), 0);

    assert_eq!(code(&hocart(&["unit-lemma", "--ring", "matf:4:2", "--eps", "[[0,1],[0,0]]"])), 3);
    assert_eq!(code(&hocart(&["unit-lemma", "--ring", "zmod:9", "--eps", "{"])), 3);
    assert_eq!(code(&hocart(&["unit-lemma", "--ring", "poly", "--eps", "1"])), 3);
}

#[test]
fn fuzz_cases() {
    let o = hocart(&["fuzz", "prop2", "--field", "3", "--trials", "25", "--seed", "42"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("25/25 passed"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trial 24"));

    let o = hocart(&["fuzz", "prop2", "--field", "2", "--trials", "0"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));

    assert_eq!(code(&hocart(&["fuzz", "prop2", "--field", "4", "--trials", "1"])), 3);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(code(&hocart(&["bogus"])), 3);
    assert_eq!(code(&hocart(&["paper", "verify", "--a-min", "x"])), 3);
    assert_eq!(code(&hocart(&["--help"])), 0);
}
