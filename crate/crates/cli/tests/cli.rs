use std::io::Write;
use std::process::{Command, Output, Stdio};

const EX: &str = "(1+t)*x1*s^3(x2) + t^2*s(x2) + 1";

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_diffkap"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn trop_at_a_point() {
    let out = run(&["trop", EX, "--at", "3*r^2,-2/r"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["argmin"].as_array().unwrap().len(), 2);
    assert_eq!(v["pieces"].as_array().unwrap().len(), 3);
}

#[test]
fn initial_form_of_the_example() {
    let out = run(&["initial", EX, "--at", "3*r^2,-2/r"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["initial"], "s(x2) + 1");
    assert_eq!(v["monomial"], false);
}

#[test]
fn polynomial_from_stdin() {
    let out = run(&["hypersurface", "-"], Some("x1 + x2 + 1\n"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["cells"].as_array().unwrap().len(), 4);
}

#[test]
fn svg_for_plane_curves() {
    let out = run(&["--format", "svg", "hypersurface", "x1 + x2 + 1"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));
}

#[test]
fn verify_reports_success() {
    let out = run(&["verify", "x1 + x2 + 1", "--grid=-2:2:5"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["summary"]["ok"], true);
}

#[test]
fn missing_residue_root_exits_with_one() {
    // the initial form x1 + s(x1) at 0 is 2 x1 once sigma acts trivially
    let out = run(&["verify", "x1 + s(x1)", "--grid=-1:1:3"], None);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["summary"]["ok"], false);
    assert_eq!(v["lift_results"][0]["status"], "no_residue_root");
}

#[test]
fn input_errors_exit_with_two() {
    let out = run(&["trop", "x1 + y"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("1:6"));
    assert_eq!(run(&["initial", "x1 + 1", "--at", "1,2"], None).status.code(), Some(2));
    assert_eq!(run(&["--format", "svg", "trop", "x1 + 1"], None).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(run(&["verify", "x1 + 1", "--grid", "1:0"], None).status.code(), Some(2));
}

#[test]
fn rho_option_changes_the_order() {
    // r - 3 changes sign between the two constants
    let pi = json(&run(&["trop", "x1 + t^(r-3)", "--at", "0"], None));
    let e = json(&run(&["--rho", "e", "trop", "x1 + t^(r-3)", "--at", "0"], None));
    assert_ne!(pi["argmin"], e["argmin"]);
}
