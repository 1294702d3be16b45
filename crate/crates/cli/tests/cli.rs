use std::process::Command;

use vopa::parse::{parse_reduced, symbolic_to_rf};
use vopa::solver::solved_w2_4;
use vopa_cli::{run_command, Status};

fn run(args: &[&str]) -> (Status, String, u8) {
    let r = run_command(args);
    (r.status, r.payload, r.exit_code)
}

fn fixture(name: &str) -> String {
    format!("{}/../core/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn singular_part_of_t_with_j() {
    assert_eq!(run(&["ope", "T", "J"]), (Status::Pass, "2: J\n1: D(J)".to_string(), 0));
}

#[test]
fn regular_products_print_zero() {
    assert_eq!(run(&["ope", "J", "T"]).1, "2: J");
    let (status, payload, _) = run(&["ope", "G+", "G+"]);
    assert_eq!((status, payload.as_str()), (Status::Pass, "0"));
}

#[test]
fn ope_payload_parses_back() {
    let (_, payload, _) = run(&["ope", "G+", "G-"]);
    let engine = solved_w2_4().unwrap().engine().unwrap();
    let parse = |t: &str| parse_reduced(t, &engine, "k", symbolic_to_rf).unwrap();
    let expected = engine.ope_singular(&parse("G+"), &parse("G-"));
    let lines: Vec<&str> = payload.lines().collect();
    assert_eq!(lines.len(), expected.poles.len());
    for line in lines {
        let (order, body) = line.split_once(": ").unwrap();
        let order: u32 = order.parse().unwrap();
        let pole = expected.poles.iter().find(|(n, _)| n + 1 == order).map(|(_, e)| e.clone()).unwrap();
        assert_eq!(parse(body), pole, "pole {order}");
    }
}

#[test]
fn nth_products_and_normal_forms() {
    let (_, payload, code) = run(&["nprod", "J", "J", "1"]);
    assert_eq!(code, 0);
    assert_eq!(
        vopa::parse::parse_coefficient(&payload, "k").unwrap(),
        vopa::parse::parse_coefficient("2+3*k/4", "k").unwrap()
    );
    assert_eq!(run(&["nprod", "J", "J", "1", "--eval", "k=4"]).1, "5");
    assert_eq!(run(&["nprod", "T", "J", "-1"]).1, ":J T: + 1/2*D^2(J)");
    assert_eq!(run(&["normal-form", ":T J:"]).1, ":J T: + 1/2*D^2(J)");
}

#[test]
fn evaluation_specializes_outputs() {
    assert_eq!(run(&["ope", "J", "J", "--eval", "k=1"]).1, "2: 11/4");
    let (status, payload, code) = run(&["ope", "J", "J", "--eval", "x=1"]);
    assert_eq!((status, code), (Status::Error, 2));
    assert!(payload.starts_with("error:"), "{payload}");
}

#[test]
fn jacobi_checks() {
    let (status, payload, code) = run(&["jacobi-check", "J", "G+", "G-"]);
    assert_eq!((status, code), (Status::Pass, 0));
    assert!(payload.starts_with("PASS"), "{payload}");

    let (status, payload, code) = run(&["jacobi-check", "W", "W", "W", "--algebra", "w2_4"]);
    assert_eq!((status, code), (Status::Fail, 1));
    assert!(payload.starts_with("FAIL"));
    assert!(payload.lines().nth(1).unwrap().starts_with("r=0, s=0:"));

    let (_, payload, code) = run(&["jacobi-check", "T", "J", "W", "--range", "1,1"]);
    assert_eq!(code, 0);
    assert!(payload.contains("1 identities hold"), "{payload}");
}

#[test]
fn jacobi_solve_determines_the_ansatz() {
    let (status, payload, code) = run(&["jacobi-solve", "--algebra", &fixture("w2_4.vopa")]);
    assert_eq!((status, code), (Status::Pass, 0), "{payload}");
    assert!(payload.contains("WW_"));
    let (_, payload, code) = run(&["jacobi-solve", "--algebra", "w2_4", "--stages", "J W W, T W W; W G+ G-"]);
    assert_eq!(code, 0, "{payload}");
    assert!(run(&["jacobi-solve", "--algebra", "w2_4", "--stages", "J W"]).2 == 2);
}

#[test]
fn relations_and_cosets() {
    let (_, payload, code) = run(&["relations", "--n", "1", "--eval", "k=1"]);
    assert_eq!(code, 0);
    assert!(payload.starts_with("77/120 * U_{0,6}"), "{payload}");
    assert!(payload.ends_with("reconstruction identity: holds"));

    let (_, payload, _) = run(&["coset", "--virasoro"]);
    assert_eq!(payload, "T^C = T - 2/(3*k+8)*:J J:\nc = -(24*k^2+116*k+140)/(k+4)");
    let c = vopa::parse::parse_coefficient("-(24*k^2+116*k+140)/(k+4)", "k").unwrap();
    assert_eq!(c, vopa::parse::parse_coefficient("-4*(5+2*k)*(7+3*k)/(4+k)", "k").unwrap());

    let (_, payload, code) = run(&["coset", "--correct", "0", "--eval", "k=1"]);
    assert_eq!(code, 0);
    assert!(payload.starts_with(":G+ G-:"), "{payload}");
}

#[test]
fn extension_block() {
    let (_, payload, code) = run(&["extension", "--n", "3", "--r", "4"]);
    assert_eq!(code, 0);
    for needle in ["confDim = 4/3", "qdim = +1", "ell = -5/4", "kConj = -5/3", "grading = integer"] {
        assert!(payload.contains(needle), "missing {needle} in\n{payload}");
    }
    let (_, payload, code) = run(&["extension", "--n", "3", "--r", "3"]);
    assert_eq!(code, 2);
    assert!(payload.contains("theorem gate"));
}

#[test]
fn usage_errors() {
    for args in [&["bogus"][..], &["ope", "T"], &["nprod", "J", "J", "x"], &["coset", "--correct", "0", "--virasoro"]] {
        let (status, payload, code) = run(args);
        assert_eq!((status, code), (Status::Error, 2), "{args:?}");
        assert!(payload.starts_with("usage error:") && payload.ends_with("(try `vopa --help`)"), "{payload}");
        assert_eq!(payload.lines().count(), 1);
    }
    assert_eq!(run(&["--help"]).2, 0);
    let (status, payload, code) = run(&["ope", "T", "Q"]);
    assert_eq!((status, code), (Status::Error, 2));
    assert!(payload.starts_with("error:"));
    assert_eq!(run(&["--algebra", "/nonexistent.vopa", "ope", "T", "J"]).2, 2);
}

#[test]
fn fast_paper_check_passes() {
    let (status, payload, code) = run(&["paper-check", "--fast"]);
    assert_eq!((status, code), (Status::Pass, 0), "{payload}");
    assert!(payload.starts_with("PASS (9/9"));
    assert_eq!(payload.lines().filter(|l| l.starts_with("PASS ")).count(), 10);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_vopa");
    let out = Command::new(bin).args(["ope", "T", "J"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "2: J\n1: D(J)\n");
    let out = Command::new(bin).arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("usage error:"));
    let out = Command::new(bin).args(["--algebra", "w2_4", "jacobi-check", "W", "W", "W"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn file_presentations_load() {
    let (_, payload, code) = run(&["--algebra", &fixture("r4_ansatz.vopa"), "ope", "J", "X1"]);
    assert_eq!(code, 0, "{payload}");
}
