use std::collections::BTreeSet;

use proptest::prelude::*;

use vopa::arith::{int, rat, BigRational, Polynomial, RationalFunction};
use vopa::basis::{enumerate_basis, full_alphabet};
use vopa::coeff::{Coeff, Unknown};
use vopa::expr::{Expression, Generators, HalfInt, Letter};
use vopa::linalg::{
    bareiss_determinant, determinant, reconstruct_rational, solve_linear, LinearSolution, LinearSystem,
};
use vopa::parse::{parse_coefficient, parse_reduced, symbolic_to_rf};
use vopa::solver::solved_w2_4;
use vopa::VopaError;

fn rf(text: &str) -> RationalFunction {
    parse_coefficient(text, "k").unwrap()
}

fn names(n: usize) -> Vec<Unknown> {
    (0..n).map(|i| Unknown::new(&format!("x{i}"))).collect()
}

fn basis_names(gens: &Generators, weight: i64, charge: i64) -> Vec<String> {
    let b = enumerate_basis(gens, HalfInt::from_int(weight), charge, &full_alphabet(gens), None).unwrap();
    b.words.iter().map(|w| gens.fmt_word(w)).collect()
}

#[test]
fn small_weight_bases() {
    let gens = &solved_w2_4().unwrap().generators;
    assert_eq!(basis_names(gens, 1, 0), vec!["J"]);
    let mut two = basis_names(gens, 2, 0);
    two.sort();
    assert_eq!(two, vec![":J J:", "D(J)", "T"]);
    assert_eq!(basis_names(gens, 2, 1), vec!["G+"]);
    assert_eq!(basis_names(gens, 0, 0), vec!["1"]);
}

/// Every multiset of letters with the given total weight and charge.
fn brute_force(gens: &Generators, weight: i64, charge: i64) -> BTreeSet<Vec<Letter>> {
    fn go(gens: &Generators, left: i64, charge: i64, current: &mut Vec<Letter>, out: &mut BTreeSet<Vec<Letter>>) {
        if left == 0 {
            let c: i64 = current.iter().map(|l| gens.get(l.gen as usize).charge).sum();
            if c == charge {
                let mut m = current.clone();
                m.sort_by_key(|l| (l.gen, l.der));
                out.insert(m);
            }
            return;
        }
        for g in 0..gens.len() {
            let w = gens.get(g).weight.floor();
            for d in 0..=(left - w).max(-1) {
                current.push(Letter::new(g, d as u32));
                go(gens, left - w - d, charge, current, out);
                current.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(gens, weight, charge, &mut Vec::new(), &mut out);
    out
}

#[test]
fn basis_matches_brute_force_up_to_weight_six() {
    let gens = &solved_w2_4().unwrap().generators;
    for weight in 0..=6 {
        for charge in -2..=2 {
            let b = enumerate_basis(gens, HalfInt::from_int(weight), charge, &full_alphabet(gens), None).unwrap();
            let found: BTreeSet<Vec<Letter>> = b
                .words
                .iter()
                .map(|w| {
                    assert!(w.is_canonical());
                    let mut m = w.letters().to_vec();
                    m.sort_by_key(|l| (l.gen, l.der));
                    m
                })
                .collect();
            assert_eq!(found.len(), b.len(), "repeated word at weight {weight}");
            assert_eq!(found, brute_force(gens, weight, charge), "weight {weight}, charge {charge}");
        }
    }
}

#[test]
fn coordinates_in_a_weight_basis() {
    let p = solved_w2_4().unwrap();
    let engine = p.engine().unwrap();
    let gens = &p.generators;
    let b = enumerate_basis(gens, HalfInt::from_int(2), 0, &full_alphabet(gens), None).unwrap();
    let tc = parse_reduced("T - 2/(8+3*k)*:J J:", &engine, "k", symbolic_to_rf).unwrap();
    let coords = b.coordinates(&tc, gens).unwrap();
    let at = |name: &str| {
        coords[b.position(&tc.words().find(|w| gens.fmt_word(w) == name).unwrap().clone()).unwrap()].clone()
    };
    assert_eq!(at("T"), RationalFunction::one());
    assert_eq!(at(":J J:"), rf("-2/(8+3*k)"));
    assert_eq!(coords.iter().filter(|c| c.is_zero()).count(), 1);
    assert!(b.coordinates(&Expression::<RationalFunction>::zero(), gens).unwrap().iter().all(|c| c.is_zero()));
    let gp = Expression::<RationalFunction>::generator(p.gen("G+").unwrap());
    assert!(matches!(b.coordinates(&gp, gens), Err(VopaError::UnsupportedWord(_))));
    assert_eq!(b.reconstruct(&coords), tc);
}

#[test]
fn square_system() {
    let sys =
        LinearSystem::from_rows(names(2), vec![vec![int(1), int(1)], vec![int(1), int(-1)]], vec![int(2), int(0)])
            .unwrap();
    assert_eq!(solve_linear(&sys).unwrap(), LinearSolution::Unique(vec![int(1), int(1)]));
}

#[test]
fn kernel_over_qk() {
    let sys =
        LinearSystem::from_rows(names(2), vec![vec![rf("2+k"), rf("2+k")]], vec![RationalFunction::zero()]).unwrap();
    match solve_linear(&sys).unwrap() {
        LinearSolution::Family { kernel, free, .. } => {
            assert_eq!(free.len(), 1);
            assert_eq!(kernel.len(), 1);
            let v = &kernel[0];
            assert!(!v[0].is_zero());
            assert_eq!(v[0], v[1].neg());
        }
        other => panic!("expected a one-parameter family, got {other:?}"),
    }
}

#[test]
fn scalar_over_qk() {
    let sys = LinearSystem::from_rows(names(1), vec![vec![rf("4+k")]], vec![RationalFunction::one()]).unwrap();
    assert_eq!(solve_linear(&sys).unwrap(), LinearSolution::Unique(vec![rf("1/(4+k)")]));
}

#[test]
fn inconsistent_system_has_a_certificate() {
    let sys = LinearSystem::from_rows(names(2), vec![vec![int(1), int(2)], vec![int(2), int(4)]], vec![int(1), int(3)])
        .unwrap();
    let sol = solve_linear(&sys).unwrap();
    assert!(!sol.is_consistent());
    assert!(sol.verify(&sys));
}

#[test]
fn singular_at_the_sample_level_is_still_exact() {
    // the coefficient k - 7919/1031 vanishes at the level used to pick rows
    let sys = LinearSystem::from_rows(
        names(2),
        vec![vec![rf("k-7919/1031"), RationalFunction::zero()], vec![RationalFunction::one(), RationalFunction::one()]],
        vec![RationalFunction::one(), RationalFunction::zero()],
    )
    .unwrap();
    let sol = solve_linear(&sys).unwrap();
    assert_eq!(sol.particular().unwrap()[0], rf("1/(k-7919/1031)"));
    assert!(sol.verify(&sys));
}

#[test]
fn rational_reconstruction_from_samples() {
    let f = rf("(2+k)*(5+2*k)*(8+3*k)/(360*(4+k))");
    let samples: Vec<(BigRational, BigRational)> =
        (0..8).map(|i| rat(i, 3)).map(|x| (x.clone(), f.eval(&x).unwrap())).collect();
    assert_eq!(reconstruct_rational(&samples).unwrap(), Some(f));
    let few: Vec<_> = (0..3).map(|i| (int(i), int(i * i * i))).collect();
    assert_eq!(reconstruct_rational(&few).unwrap(), None);
}

fn cofactor_determinant(m: &[Vec<Polynomial>]) -> Polynomial {
    if m.is_empty() {
        return Polynomial::one();
    }
    let mut total = Polynomial::zero();
    for (j, a) in m[0].iter().enumerate() {
        let minor: Vec<Vec<Polynomial>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = a * &cofactor_determinant(&minor);
        total = if j % 2 == 0 { &total + &term } else { &total - &term };
    }
    total
}

fn small_poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-4i64..=4, 0..=3).prop_map(|c| Polynomial::from_i64_coeffs(&c))
}

fn small_rf() -> impl Strategy<Value = RationalFunction> {
    (small_poly(), small_poly().prop_filter("nonzero", |p| !p.is_zero()))
        .prop_map(|(n, d)| RationalFunction::new(n, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bareiss_matches_cofactor_expansion(m in prop::collection::vec(prop::collection::vec(small_poly(), 4), 4)) {
        prop_assert_eq!(bareiss_determinant(&m), cofactor_determinant(&m));
        let f: Vec<Vec<RationalFunction>> =
            m.iter().map(|r| r.iter().cloned().map(RationalFunction::from_poly).collect()).collect();
        prop_assert_eq!(determinant(&f).unwrap(), RationalFunction::from_poly(cofactor_determinant(&m)));
    }

    #[test]
    fn rational_solutions_satisfy_the_system(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..=6),
        rhs in prop::collection::vec(-3i64..=3, 6),
    ) {
        let a: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        let b: Vec<BigRational> = rhs[..a.len()].iter().map(|&x| int(x)).collect();
        let sys = LinearSystem::from_rows(names(4), a, b).unwrap();
        let sol = solve_linear(&sys).unwrap();
        prop_assert!(sol.verify(&sys));
        if let Some(x) = sol.particular() {
            prop_assert!(sys.residual(x).iter().all(|r| r.is_zero()));
        }
    }

    #[test]
    fn solutions_over_qk_satisfy_the_system(
        rows in prop::collection::vec(prop::collection::vec(small_rf(), 3), 1..=4),
        rhs in prop::collection::vec(small_rf(), 4),
    ) {
        let b = rhs[..rows.len()].to_vec();
        let sys = LinearSystem::from_rows(names(3), rows, b).unwrap();
        let sol = solve_linear(&sys).unwrap();
        prop_assert!(sol.verify(&sys));
        if let LinearSolution::Family { particular, kernel, free } = &sol {
            prop_assert_eq!(kernel.len(), free.len());
            prop_assert!(sys.residual(particular).iter().all(|r| r.is_zero()));
        }
    }
}
