//! Determining unknown structure constants from Jacobi identities.
//!
//! Each stage lists generator triples. Every Jacobi defect of those triples
//! in its weight window is expanded in the monomial basis of its slice; each
//! coordinate must vanish, which is one affine equation in the unknowns.
//! A stage is solved exactly, its solution is substituted, and the next
//! stage starts from the updated table.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::arith::RationalFunction;
use crate::basis::{enumerate_basis, full_alphabet, WeightBasis};
use crate::coeff::{Coeff, Symbolic, Unknown};
use crate::error::VopaError;
use crate::expr::{Expression, Generators, HalfInt};
use crate::linalg::{solve_linear, LinearSolution, LinearSystem};
use crate::ope::Engine;
use crate::presentation::{builtin, AlgebraPresentation};

/// Generator indices `(a, b, c)` of a Jacobi identity.
pub type Triple = (usize, usize, usize);

/// One Jacobi identity: a triple and the pair `(r, s)` of product indices.
pub type JacobiJob = (Triple, u32, i64);

/// Where one equation of a stage came from.
#[derive(Clone, Debug, PartialEq)]
pub struct RowOrigin {
    pub triple: Triple,
    pub r: u32,
    pub s: i64,
    /// The basis word whose coefficient gave the equation, rendered.
    pub word: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageSummary {
    pub triples: Vec<Triple>,
    /// Nonzero defects among all `(triple, r, s)` of the stage.
    pub nonzero_defects: usize,
    pub equations: usize,
    /// Unknowns the stage's equations involve.
    pub unknowns: Vec<Unknown>,
    /// Involved unknowns left undetermined by the stage.
    pub free: Vec<Unknown>,
    pub elapsed: Duration,
}

/// A stage whose equations have no solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub stage: usize,
    /// The equations combined by the inconsistency certificate.
    pub rows: Vec<RowOrigin>,
}

#[derive(Clone, Debug)]
pub struct AssignmentReport {
    /// Values of determined unknowns; affine in the free ones.
    pub solved: BTreeMap<Unknown, Symbolic>,
    /// Unknowns still present after the last stage.
    pub free: Vec<Unknown>,
    pub obstruction: Option<Obstruction>,
    pub stages: Vec<StageSummary>,
    /// The input presentation with all solved values substituted.
    pub presentation: AlgebraPresentation,
}

impl AssignmentReport {
    pub fn is_consistent(&self) -> bool {
        self.obstruction.is_none()
    }

    /// The value of a solved unknown as a rational function, if it does not
    /// depend on free unknowns.
    pub fn value(&self, name: &str) -> Option<RationalFunction> {
        self.solved.get(&Unknown::new(name)).and_then(|v| v.as_constant().cloned())
    }
}

/// Resolve generator names into triples.
pub fn triples(p: &AlgebraPresentation, names: &[(&str, &str, &str)]) -> Result<Vec<Triple>, VopaError> {
    names.iter().map(|(a, b, c)| Ok((p.gen(a)?, p.gen(b)?, p.gen(c)?))).collect()
}

/// Every ordered triple of generators.
pub fn all_triples(gens: &Generators) -> Vec<Triple> {
    let n = gens.len();
    let mut out = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                out.push((a, b, c));
            }
        }
    }
    out
}

/// Every `(triple, r, s)` of a list of triples within the Jacobi window.
pub fn jacobi_jobs<C: Coeff>(engine: &Engine<C>, triples: &[Triple]) -> Vec<JacobiJob> {
    triples
        .iter()
        .flat_map(|&(a, b, c)| engine.jacobi_window(a, b, c).into_iter().map(move |(r, s)| ((a, b, c), r, s)))
        .collect()
}

/// The nonzero Jacobi defects of the listed triples, computed in parallel.
pub fn jacobi_defects<C: Coeff>(engine: &Engine<C>, triples: &[Triple]) -> Vec<(JacobiJob, Expression<C>)> {
    jacobi_jobs(engine, triples)
        .into_par_iter()
        .map(|job| {
            let ((a, b, c), r, s) = job;
            let d = engine.jacobi_defect(
                &Expression::generator(a),
                &Expression::generator(b),
                &Expression::generator(c),
                r,
                s,
            );
            (job, d)
        })
        .filter(|(_, d)| !d.is_zero())
        .collect()
}

/// Solve the unknowns of `p` stage by stage.
///
/// Stops at the first stage whose equations are inconsistent and reports
/// the obstruction. A defect that is not affine in the unknowns is an error.
pub fn solve_unknowns(p: &AlgebraPresentation, stages: &[Vec<Triple>]) -> Result<AssignmentReport, VopaError> {
    let mut current = p.clone();
    let mut solved: BTreeMap<Unknown, Symbolic> = BTreeMap::new();
    let mut summaries = Vec::new();
    let mut obstruction = None;
    for (index, stage) in stages.iter().enumerate() {
        let start = Instant::now();
        let engine = current.engine_symbolic()?;
        let defects = jacobi_defects(&engine, stage);
        let (system, origins) = equations(&current.generators, &defects)?;
        let mut summary = StageSummary {
            triples: stage.clone(),
            nonzero_defects: defects.len(),
            equations: system.len(),
            unknowns: system.unknowns().to_vec(),
            free: Vec::new(),
            elapsed: Duration::ZERO,
        };
        let solution = solve_linear(&system)?;
        match &solution {
            LinearSolution::Inconsistent { certificate } => {
                let rows =
                    certificate.iter().zip(&origins).filter(|(y, _)| !y.is_zero()).map(|(_, o)| o.clone()).collect();
                obstruction = Some(Obstruction { stage: index, rows });
            }
            _ => {
                let values = assignment(&system, &solution);
                summary.free = solution.free().to_vec();
                for v in solved.values_mut() {
                    *v = v.substitute(&values);
                }
                solved.extend(values.clone());
                current = current.substitute(&values);
            }
        }
        summary.elapsed = start.elapsed();
        summaries.push(summary);
        if obstruction.is_some() {
            break;
        }
    }
    Ok(AssignmentReport {
        solved,
        free: current.unknowns().to_vec(),
        obstruction,
        stages: summaries,
        presentation: current,
    })
}

/// One equation per basis coordinate of each defect.
fn equations(
    gens: &Generators,
    defects: &[(JacobiJob, Expression<Symbolic>)],
) -> Result<(LinearSystem<RationalFunction>, Vec<RowOrigin>), VopaError> {
    let mut bases: HashMap<(HalfInt, i64), WeightBasis> = HashMap::new();
    let mut involved = BTreeSet::new();
    let mut coords = Vec::new();
    for (job, d) in defects {
        if d.iter().any(|(_, c)| c.is_nonlinear()) {
            return Err(VopaError::NonlinearStage);
        }
        let grade = d.grade(gens);
        let (weight, charge) = match (grade.weight.pure(), grade.charge.pure()) {
            (Some(w), Some(c)) => (w, c),
            _ => return Err(VopaError::Internal("inhomogeneous Jacobi defect".into())),
        };
        if let std::collections::hash_map::Entry::Vacant(e) = bases.entry((weight, charge)) {
            let b = enumerate_basis(gens, weight, charge, &full_alphabet(gens), None)?;
            e.insert(b);
        }
        let basis = &bases[&(weight, charge)];
        let c = basis.coordinates(d, gens)?;
        for (i, x) in c.into_iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            involved.extend(x.unknowns().cloned());
            let (triple, r, s) = *job;
            coords.push((RowOrigin { triple, r, s, word: gens.fmt_word(&basis.words[i]) }, x));
        }
    }
    let unknowns: Vec<Unknown> = involved.into_iter().collect();
    let column: HashMap<&Unknown, usize> = unknowns.iter().enumerate().map(|(i, u)| (u, i)).collect();
    let mut system = LinearSystem::new(unknowns.clone());
    let mut origins = Vec::with_capacity(coords.len());
    for (origin, x) in coords {
        let mut row = vec![RationalFunction::zero(); unknowns.len()];
        for (u, c) in x.terms() {
            row[column[u]] = c.clone();
        }
        system.push_row(row, x.constant_part().neg())?;
        origins.push(origin);
    }
    Ok((system, origins))
}

/// Values of the determined unknowns, affine in the free ones.
fn assignment(
    system: &LinearSystem<RationalFunction>,
    solution: &LinearSolution<RationalFunction>,
) -> BTreeMap<Unknown, Symbolic> {
    let unknowns = system.unknowns();
    let mut out = BTreeMap::new();
    let Some(x) = solution.particular() else { return out };
    let (free, kernel): (&[Unknown], &[Vec<RationalFunction>]) = match solution {
        LinearSolution::Family { free, kernel, .. } => (free, kernel),
        _ => (&[], &[]),
    };
    for (i, u) in unknowns.iter().enumerate() {
        if free.contains(u) {
            continue;
        }
        let mut v = Symbolic::constant(x[i].clone());
        for (f, k) in free.iter().zip(kernel) {
            if !k[i].is_zero() {
                v = v.add(&Symbolic::scaled_unknown(f.clone(), k[i].clone()));
            }
        }
        out.insert(u.clone(), v);
    }
    out
}

/// The stages that determine the `W W` table of `w2_4`: the Heisenberg and
/// Virasoro identities first, then the identity that ties `W W` to
/// `G+ G-`.
pub fn w2_4_stages(p: &AlgebraPresentation) -> Result<Vec<Vec<Triple>>, VopaError> {
    Ok(vec![triples(p, &[("J", "W", "W"), ("T", "W", "W")])?, triples(p, &[("W", "G+", "G-")])?])
}

/// `w2_4` with its `W W` table solved, computed once per process.
pub fn solved_w2_4() -> Result<&'static AlgebraPresentation, VopaError> {
    static SOLVED: OnceLock<Result<AlgebraPresentation, VopaError>> = OnceLock::new();
    SOLVED
        .get_or_init(|| {
            let p = builtin("w2_4")?;
            let report = solve_unknowns(&p, &w2_4_stages(&p)?)?;
            if let Some(o) = report.obstruction {
                return Err(VopaError::Internal(format!(
                    "w2_4 Jacobi identities are inconsistent at stage {}",
                    o.stage
                )));
            }
            if !report.free.is_empty() {
                let names: Vec<String> = report.free.iter().map(|u| u.to_string()).collect();
                return Err(VopaError::Internal(format!("w2_4 W W table not determined: {}", names.join(", "))));
            }
            Ok(report.presentation)
        })
        .as_ref()
        .map_err(Clone::clone)
}

/// Outcome of reconstructing the OPE algebra of `r4_ansatz`.
#[derive(Clone, Debug)]
pub struct SubregularReconstruction {
    /// `a1..a10` after the Heisenberg and Virasoro identities; undetermined
    /// ones are absent.
    pub coefficients: BTreeMap<Unknown, Symbolic>,
    /// Which of `a1..a10` the first stage leaves undetermined.
    pub undetermined: Vec<Unknown>,
    /// The inconsistency found for `a5 = 0`, if any.
    pub a5_zero_obstruction: Option<Obstruction>,
    /// The leading `W W` coefficient after normalizing `a5 = k + 2`.
    pub ww_leading: Option<RationalFunction>,
    /// The stages with `a5 = k + 2`.
    pub normalized: AssignmentReport,
}

/// Names `a1..a10` of the `X1 Xn1` ansatz.
pub fn ansatz_coefficients() -> Vec<Unknown> {
    (1..=10).map(|i| Unknown::new(&format!("a{i}"))).collect()
}

/// Reconstruct `r4_ansatz` in the order of the argument: the Heisenberg and
/// Virasoro identities with `X1 Xn1`; the `(X1, X1, Xn1)` identities with
/// `a5 = 0`; then, with `a5 = k + 2`, the identities of `T` and `J` with
/// `W` and `X1`, `Xn1`, and finally `(W, X1, Xn1)`.
pub fn reconstruct_subregular(p: &AlgebraPresentation) -> Result<SubregularReconstruction, VopaError> {
    let first = solve_unknowns(p, &[triples(p, &[("J", "X1", "Xn1"), ("T", "X1", "Xn1")])?])?;
    if let Some(o) = &first.obstruction {
        return Err(VopaError::Internal(format!(
            "Heisenberg and Virasoro identities inconsistent at stage {}",
            o.stage
        )));
    }
    let names = ansatz_coefficients();
    let coefficients: BTreeMap<Unknown, Symbolic> =
        first.solved.iter().filter(|(u, _)| names.contains(u)).map(|(u, v)| (u.clone(), v.clone())).collect();
    let undetermined = names.iter().filter(|u| !coefficients.contains_key(u)).cloned().collect();

    let a5 = Unknown::new("a5");
    let fixed = |value: RationalFunction| {
        let mut m = BTreeMap::new();
        m.insert(a5.clone(), Symbolic::constant(value));
        first.presentation.substitute(&m)
    };
    let zero = solve_unknowns(&fixed(RationalFunction::zero()), &[triples(p, &[("X1", "X1", "Xn1")])?])?;

    let k_plus_2 = RationalFunction::from_poly(crate::arith::Polynomial::linear(2, 1));
    let stages = vec![
        triples(p, &[("T", "W", "X1"), ("J", "W", "X1"), ("T", "W", "Xn1"), ("J", "W", "Xn1")])?,
        triples(p, &[("W", "X1", "Xn1")])?,
    ];
    let normalized = solve_unknowns(&fixed(k_plus_2), &stages)?;
    let w = p.gen("W")?;
    let ww_leading = normalized
        .presentation
        .entry(w, w)
        .and_then(|e| e.poles.get(&5))
        .and_then(|e| e.iter().next().filter(|(word, _)| word.is_vacuum()).map(|(_, c)| c.clone()))
        .and_then(|c| c.as_constant().cloned());
    Ok(SubregularReconstruction {
        coefficients,
        undetermined,
        a5_zero_obstruction: zero.obstruction,
        ww_leading,
        normalized,
    })
}
