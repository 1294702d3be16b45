use vopa::arith::RationalFunction;
use vopa::coeff::Unknown;
use vopa::paper_check::{expected_ansatz_coefficients, expected_ww_leading};
use vopa::parse::parse_coefficient;
use vopa::presentation::builtin;
use vopa::solver::{
    all_triples, jacobi_defects, reconstruct_subregular, solve_unknowns, solved_w2_4, triples, w2_4_stages,
};
use vopa::VopaError;

fn rf(text: &str) -> RationalFunction {
    parse_coefficient(text, "k").unwrap()
}

#[test]
fn w2_4_is_determined_by_two_stages() {
    let p = builtin("w2_4").unwrap();
    let report = solve_unknowns(&p, &w2_4_stages(&p).unwrap()).unwrap();
    assert!(report.is_consistent());
    assert!(report.free.is_empty());
    assert_eq!(report.stages.len(), 2);
    // the first stage leaves a few unknowns that only (W, G+, G-) fixes
    assert!(!report.stages[0].free.is_empty());
    assert!(report.stages[1].free.is_empty());
    assert!(!report.presentation.has_unknowns());
    let w = p.gen("W").unwrap();
    let top = &report.presentation.entry(w, w).unwrap().poles[&5];
    assert_eq!(top.vacuum_coeff().as_constant(), Some(&expected_ww_leading()));
    assert_eq!(report.value("WW_5_1"), Some(RationalFunction::zero()));
}

#[test]
fn solved_w2_4_satisfies_all_jacobi_identities_at_a_level() {
    let p = solved_w2_4().unwrap();
    let engine = p.engine_at(&vopa::arith::rat(5, 7)).unwrap();
    assert!(jacobi_defects(&engine, &all_triples(&p.generators)).is_empty());
}

#[test]
fn quadratic_stage_is_rejected() {
    let p = builtin("w2_4").unwrap();
    let stage = triples(&p, &[("W", "W", "W")]).unwrap();
    assert_eq!(solve_unknowns(&p, &[stage]).unwrap_err(), VopaError::NonlinearStage);
}

#[test]
fn unknown_triple_names_are_errors() {
    let p = builtin("w2_4").unwrap();
    assert!(matches!(triples(&p, &[("J", "X", "W")]), Err(VopaError::UnknownGenerator(_))));
}

#[test]
fn subregular_reconstruction() {
    let p = builtin("r4_ansatz").unwrap();
    let rec = reconstruct_subregular(&p).unwrap();
    for (u, v) in expected_ansatz_coefficients() {
        assert_eq!(rec.coefficients[&u].as_constant(), Some(&v), "{u}");
    }
    assert_eq!(rec.undetermined, vec![Unknown::new("a5")]);

    let obstruction = rec.a5_zero_obstruction.as_ref().expect("a5 = 0 must be inconsistent");
    assert!(!obstruction.rows.is_empty());
    let (x1, xn1) = (p.gen("X1").unwrap(), p.gen("Xn1").unwrap());
    assert!(obstruction.rows.iter().all(|r| r.triple == (x1, x1, xn1)));

    assert_eq!(rec.ww_leading, Some(rf("2*(k+4)*(2*k+5)*(3*k+7)*(5*k+16)/(3*k+8)")));
    assert!(rec.normalized.is_consistent());
    assert!(rec.normalized.free.is_empty());
}

#[test]
fn reconstruction_reproduces_the_w2_4_tables() {
    let rec = reconstruct_subregular(&builtin("r4_ansatz").unwrap()).unwrap();
    let solved = solved_w2_4().unwrap();
    let reconstructed = &rec.normalized.presentation;
    for e in solved.entries() {
        assert_eq!(reconstructed.entry(e.a, e.b).map(|x| &x.poles), Some(&e.poles));
    }
    assert_eq!(reconstructed.entries().len(), solved.entries().len());
}

#[test]
fn leading_constant_of_the_simple_current_pairing() {
    let p = builtin("r4_ansatz").unwrap();
    let (x1, xn1) = (p.gen("X1").unwrap(), p.gen("Xn1").unwrap());
    let top = &p.entry(x1, xn1).unwrap().poles[&3];
    let (w, c) = top.iter().next().unwrap();
    assert!(w.is_vacuum());
    assert_eq!(c.as_constant(), Some(&rf("(2+k)*(5+2*k)*(8+3*k)")));
}
