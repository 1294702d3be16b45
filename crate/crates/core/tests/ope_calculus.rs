use proptest::prelude::*;

use vopa::arith::{int, rat, BigRational, RationalFunction};
use vopa::coeff::{Coeff, Symbolic, Unknown};
use vopa::expr::{Expression, Homogeneity, Letter, Word};
use vopa::ope::Engine;
use vopa::paper_check::{derivative_rule, skew_double_transport};
use vopa::parse::{parse_coefficient, parse_reduced, symbolic_at, symbolic_to_rf};
use vopa::presentation::builtin;
use vopa::solver::solved_w2_4;

fn rf(text: &str) -> RationalFunction {
    parse_coefficient(text, "k").unwrap()
}

fn engine() -> Engine<RationalFunction> {
    solved_w2_4().unwrap().engine().unwrap()
}

fn e(engine: &Engine<RationalFunction>, text: &str) -> Expression<RationalFunction> {
    parse_reduced(text, engine, "k", symbolic_to_rf).unwrap()
}

fn raw(text: &str) -> Expression<RationalFunction> {
    let p = solved_w2_4().unwrap();
    p.parse(text).unwrap().try_map_coeffs(symbolic_to_rf).unwrap()
}

fn show(engine: &Engine<RationalFunction>, x: &Expression<RationalFunction>) -> String {
    x.render(engine.generators(), "k")
}

#[test]
fn grades() {
    let en = engine();
    let gens = en.generators();
    let grade = |t: &str| {
        let g = raw(t).grade(gens);
        (g.weight.pure().unwrap().to_rational(), g.charge.pure().unwrap())
    };
    assert_eq!(grade(":J T:"), (int(3), 0));
    assert_eq!(grade("D^2(G+)"), (int(4), 1));
    assert_eq!(grade(":D(G+) D^2(G-):"), (int(7), 0));
    assert_eq!(grade("D(J)"), (int(2), 0));
    assert_eq!(raw("J + T").grade(gens).weight, Homogeneity::Mixed);
}

#[test]
fn derivatives() {
    let en = engine();
    assert!(en.derivative(&Expression::scalar(RationalFunction::one())).is_zero());
    assert_eq!(show(&en, &en.derivative(&e(&en, ":J J:"))), "2*:D(J) J:");
}

#[test]
fn linear_combinations() {
    let en = engine();
    assert!(e(&en, "J - J").is_zero());
    assert_eq!(show(&en, &e(&en, "(2+k)*W + 0*T")), "(k+2)*W");
    let p = solved_w2_4().unwrap();
    let a5 = p.parse("?a5*W + (k+2)*W").unwrap();
    let (w, c) = a5.iter().next().unwrap();
    assert_eq!(p.generators.fmt_word(w), "W");
    assert_eq!(c.terms().get(&Unknown::new("a5")), Some(&RationalFunction::one()));
    assert_eq!(c.constant_part(), &rf("k+2"));
}

#[test]
fn nth_products() {
    let en = engine();
    let j = e(&en, "J");
    assert_eq!(en.product(&j, &j, 1), Expression::scalar(rf("2+3*k/4")));
    assert_eq!(en.product(&e(&en, "D(J)"), &j, 2), Expression::scalar(rf("-2*(2+3*k/4)")));
    assert_eq!(en.product(&j, &e(&en, ":J J:"), 1), j.scaled(&rf("2*(2+3*k/4)")));
}

#[test]
fn singular_parts() {
    let en = engine();
    assert_eq!(en.ope_singular(&e(&en, "T"), &e(&en, "J")).render(en.generators(), "k"), "2: J\n1: D(J)");
    let jg = en.ope_singular(&e(&en, "J"), &e(&en, "G+"));
    assert_eq!(jg.poles, vec![(0, e(&en, "G+"))]);
    assert!(en.ope_singular(&e(&en, "J"), &Expression::scalar(RationalFunction::one())).is_empty());
}

#[test]
fn wick_products_and_canonical_forms() {
    let en = engine();
    let (j, t) = (e(&en, "J"), e(&en, "T"));
    assert_eq!(en.wick(&Expression::scalar(RationalFunction::one()), &j), j);
    assert_eq!(show(&en, &en.wick(&j, &j)), ":J J:");
    assert_eq!(show(&en, &en.wick(&t, &j)), ":J T: + 1/2*D^2(J)");
    assert_eq!(show(&en, &en.canonical_form(&raw(":J D(J):"))), ":D(J) J:");
    assert_eq!(show(&en, &en.canonical_form(&raw(":T J:"))), ":J T: + 1/2*D^2(J)");
    assert_eq!(show(&en, &en.canonical_form(&raw(":J T:"))), ":J T:");
}

#[test]
fn skew_transport() {
    let en = engine();
    let p = solved_w2_4().unwrap();
    let (gp, gm, t, j) = (p.gen("G+").unwrap(), p.gen("G-").unwrap(), p.gen("T").unwrap(), p.gen("J").unwrap());
    assert_eq!(en.skew_transport(gp, gm, 3), Expression::scalar(rf("(2+k)*(5+2*k)*(8+3*k)")));
    assert_eq!(en.skew_transport(gp, gm, 2), e(&en, "J").scaled(&rf("-4*(2+k)*(5+2*k)")));
    assert_eq!(en.skew_transport(t, j, 1), e(&en, "J"));
}

#[test]
fn jacobi_defects() {
    let en = engine();
    let (j, t, gp, gm) = (e(&en, "J"), e(&en, "T"), e(&en, "G+"), e(&en, "G-"));
    assert!(en.jacobi_defect(&j, &j, &j, 0, 0).is_zero());
    assert!(en.jacobi_defect(&t, &j, &j, 1, 1).is_zero());
    assert!(en.jacobi_defect(&j, &gp, &gm, 0, 3).is_zero());
}

#[test]
fn the_same_products_at_specialized_levels() {
    let p = solved_w2_4().unwrap();
    let en = engine();
    for k0 in [int(1), int(2), rat(5, 7)] {
        let at = p.engine_at(&k0).unwrap();
        let q = |text: &str| parse_reduced(text, &at, "k", |c: &Symbolic| symbolic_at(c, &k0)).unwrap();
        for (a, b, n) in [("T", "J", -1), ("D(J)", "J", 2), ("J", ":J J:", 1), ("W", "W", 1), ("G+", "G-", -1)] {
            let symbolic = en.product(&e(&en, a), &e(&en, b), n);
            let specialized = symbolic.try_map_coeffs(|c: &RationalFunction| c.eval(&k0)).unwrap();
            assert_eq!(specialized, at.product(&q(a), &q(b), n), "{a}_({n}){b} at k = {k0}");
        }
    }
}

#[test]
fn nonlinear_unknown_products_are_flagged() {
    let p = builtin("w2_4").unwrap();
    let en = p.engine_symbolic().unwrap();
    let w = Expression::generator(p.gen("W").unwrap());
    // W_(1)W carries unknowns; a product of two such expressions is not affine
    let x = en.product(&w, &w, 1);
    let y = en.product(&x, &x, 3);
    assert!(y.iter().any(|(_, c)| c.is_nonlinear()));
}

#[test]
fn skew_symmetry_and_derivative_rule_on_generators() {
    assert!(skew_double_transport(&engine()));
    assert!(derivative_rule(&engine()));
    let at = solved_w2_4().unwrap().engine_at(&rat(5, 7)).unwrap();
    assert!(skew_double_transport(&at));
    assert!(derivative_rule(&at));
    for name in ["heisenberg", "virasoro"] {
        let en = builtin(name).unwrap().engine().unwrap();
        assert!(skew_double_transport(&en));
        assert!(derivative_rule(&en));
    }
}

/// Words of weight at most 8 in arbitrary letter order, with small
/// rational coefficients.
fn expression() -> impl Strategy<Value = Expression<BigRational>> {
    bounded_expression(8)
}

fn bounded_expression(max_weight: i64) -> impl Strategy<Value = Expression<BigRational>> {
    let letter = (0usize..5, 0u32..=2);
    let word = prop::collection::vec(letter, 1..=4);
    let term = (word, -5i64..=5, 1i64..=3);
    prop::collection::vec(term, 1..=3).prop_map(move |terms| {
        let gens = solved_w2_4().unwrap().generators.clone();
        let mut out = Expression::zero();
        for (letters, n, d) in terms {
            let mut budget = max_weight;
            let mut kept = Vec::new();
            for (g, der) in letters {
                let w = gens.get(g).weight.floor() + der as i64;
                if w <= budget {
                    budget -= w;
                    kept.push(Letter::new(g, der));
                }
            }
            out.add_term(Word::from_letters(&kept), rat(n, d));
        }
        out
    })
}

fn engine_at_two() -> &'static Engine<BigRational> {
    static ENGINE: std::sync::OnceLock<Engine<BigRational>> = std::sync::OnceLock::new();
    ENGINE.get_or_init(|| solved_w2_4().unwrap().engine_at(&int(2)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_is_idempotent(x in expression()) {
        let en = engine_at_two();
        let once = en.canonical_form(&x);
        prop_assert!(once.is_canonical());
        prop_assert_eq!(en.canonical_form(&once), once);
    }

    #[test]
    fn printing_round_trips(x in expression()) {
        let en = engine_at_two();
        let once = en.canonical_form(&x);
        let text = once.render(en.generators(), "k");
        let back = parse_reduced(&text, en, "k", |c: &Symbolic| symbolic_at(c, &int(2))).unwrap();
        prop_assert_eq!(back, once);
    }

    #[test]
    fn derivative_is_a_derivation_of_wick_products(x in bounded_expression(4), y in bounded_expression(4)) {
        let en = engine_at_two();
        let lhs = en.derivative(&en.wick(&x, &y));
        let rhs = en.wick(&en.derivative(&x), &y).plus(&en.wick(&x, &en.derivative(&y)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn grades_are_additive(x in expression()) {
        let en = engine_at_two();
        let gens = en.generators();
        for (w, _) in en.canonical_form(&x).iter() {
            let weight: i64 = w.letters().iter().map(|l| gens.letter_weight(*l).floor()).sum();
            prop_assert_eq!(gens.word_weight(w).floor(), weight);
        }
    }
}

#[test]
fn canonical_forms_preserve_grade() {
    let en = engine_at_two();
    let x = Expression::word(Word::from_letters(&[Letter::new(3, 1), Letter::new(1, 0), Letter::new(4, 0)]));
    let c = en.canonical_form(&x);
    let g = c.grade(en.generators());
    assert_eq!(g.weight.pure().map(|w| w.floor()), Some(7));
    assert_eq!(g.charge.pure(), Some(0));
    assert!(x.iter().all(|(_, c)| *c == <BigRational as Coeff>::one()));
}
