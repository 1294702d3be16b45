//! The U(1)-orbifold of `w2_4` and the Heisenberg coset.
//!
//! The charge-zero part is spanned by `J`, `T`, `W` and the fields
//! `U_{i,j} = :(D^i G+)(D^j G-):`. Normally ordered products of `U` fields
//! satisfy decoupling relations that express `U_{0,n+5}` through lower
//! fields; the coefficient of `U_{0,n+5}` vanishes only at special levels.
//! Adding corrections from the orbifold to a field yields fields that
//! commute with `J`; the corrected `T` is the coset Virasoro field.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{binomial, BigRational, RationalFunction};
use crate::basis::{enumerate_basis, full_alphabet};
use crate::coeff::{Coeff, Unknown};
use crate::error::VopaError;
use crate::expr::{Expression, Generators, Letter, Word};
use crate::linalg::{reconstruct_rational, solve_linear, LinearSolution, LinearSystem, Scalar};
use crate::ope::Engine;
use crate::solver::solved_w2_4;

fn charged_pair(gens: &Generators) -> Result<(usize, usize), VopaError> {
    let find = |n: &str| gens.index_of(n).ok_or_else(|| VopaError::UnknownGenerator(n.to_string()));
    Ok((find("G+")?, find("G-")?))
}

/// `U_{i,j} = :(D^i G+)(D^j G-):` of weight `i + j + 4`.
pub fn u_field<C: Coeff>(gens: &Generators, i: u32, j: u32) -> Result<Expression<C>, VopaError> {
    let (gp, gm) = charged_pair(gens)?;
    let w = Word::from_letters(&[Letter::new(gp, i), Letter::new(gm, j)]);
    if !w.is_canonical() {
        return Err(VopaError::Internal("G+ must precede G- in the generator order".into()));
    }
    Ok(Expression::word(w))
}

/// `:X D^m(U_{0,j}):` for a word `X` free of `G+`, `G-`, or `X` alone.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct UMonomial {
    pub prefix: Word,
    /// `(m, j)` for a factor `D^m U_{0,j}`.
    pub u: Option<(u32, u32)>,
}

impl UMonomial {
    /// The monomial as an expression in the free generators.
    pub fn expand<C: Coeff>(&self, gens: &Generators) -> Result<Expression<C>, VopaError> {
        let Some((m, j)) = self.u else { return Ok(Expression::word(self.prefix.clone())) };
        let (gp, gm) = charged_pair(gens)?;
        let mut out = Expression::zero();
        for l in 0..=m {
            let mut letters = self.prefix.letters().to_vec();
            letters.push(Letter::new(gp, l));
            letters.push(Letter::new(gm, m - l + j));
            out.add_term(Word::from_letters(&letters), C::from_rational(&binomial(m, l)));
        }
        Ok(out)
    }

    pub fn render(&self, gens: &Generators) -> String {
        let u = self.u.map(|(m, j)| match m {
            0 => format!("U_{{0,{j}}}"),
            1 => format!("D(U_{{0,{j}}})"),
            _ => format!("D^{m}(U_{{0,{j}}})"),
        });
        let mut parts: Vec<String> = self.prefix.letters().iter().map(|l| gens.fmt_letter(*l)).collect();
        parts.extend(u);
        match parts.len() {
            0 => "1".into(),
            1 => parts.pop().unwrap_or_default(),
            _ => format!(":{}:", parts.join(" ")),
        }
    }
}

/// `coefficient * U_{0,n+5} - (:U_{0,0} U_{1,n}: - :U_{0,n} U_{1,0}:) + tail = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecouplingResult<C> {
    pub n: u32,
    pub coefficient: C,
    /// Remaining monomials in `J`, `T`, `W`, `U_{0,i}` with `i <= n + 4`
    /// and derivatives, in monomial order.
    pub tail: Vec<(UMonomial, C)>,
    /// `:U_{0,0} U_{1,n}: - :U_{0,n} U_{1,0}:` in the free generators.
    pub target: Expression<C>,
}

impl<C: Coeff> DecouplingResult<C> {
    /// The tail as an expression in the free generators.
    pub fn tail_expression(&self, gens: &Generators) -> Result<Expression<C>, VopaError> {
        let mut out = Expression::zero();
        for (m, c) in &self.tail {
            out.add_scaled(&m.expand(gens)?, c);
        }
        Ok(out)
    }

    /// Whether `coefficient * U_{0,n+5} - target + tail` vanishes.
    pub fn reconstruction_holds(&self, gens: &Generators) -> Result<bool, VopaError> {
        let mut sum = u_field::<C>(gens, 0, self.n + 5)?.scaled(&self.coefficient);
        sum = sum.sub(&self.target);
        sum.add_expr(&self.tail_expression(gens)?);
        Ok(sum.is_zero())
    }

    pub fn render(&self, gens: &Generators, param: &str) -> String {
        let mut s = format!("{} * U_{{0,{}}}", crate::coeff::wrap(&self.coefficient.render(param)), self.n + 5);
        s.push_str(&format!(" = :U_{{0,0}} U_{{1,{0}}}: - :U_{{0,{0}}} U_{{1,0}}:", self.n));
        // the tail moves to the right-hand side with its sign flipped
        for (m, c) in &self.tail {
            let (sign, a) = if c.render_negative() { (" + ", c.neg()) } else { (" - ", c.clone()) };
            let c = a.render(param);
            if c == "1" {
                s.push_str(&format!("{sign}{}", m.render(gens)));
            } else {
                s.push_str(&format!("{sign}{}*{}", crate::coeff::wrap(&c), m.render(gens)));
            }
        }
        s
    }
}

/// Split a charge-zero expression into monomials `:X D^m U_{0,j}:`.
///
/// Every word must contain at most one `G+` and one `G-`. Words with both
/// end in `(D^a G+)(D^b G-)`; for fixed `X` and `N = a + b` the monomials
/// `:X D^m U_{0,N-m}:` are unitriangular against these words, which gives
/// the coefficients by back substitution from `m = N` down.
pub fn u_monomials<C: Coeff>(e: &Expression<C>, gens: &Generators) -> Result<Vec<(UMonomial, C)>, VopaError> {
    let (gp, gm) = charged_pair(gens)?;
    let mut groups: BTreeMap<(Word, u32), BTreeMap<u32, C>> = BTreeMap::new();
    let mut out = Vec::new();
    for (w, c) in e.iter() {
        let letters = w.letters();
        let plus: Vec<&Letter> = letters.iter().filter(|l| l.gen as usize == gp).collect();
        let minus: Vec<&Letter> = letters.iter().filter(|l| l.gen as usize == gm).collect();
        match (plus.len(), minus.len()) {
            (0, 0) => out.push((UMonomial { prefix: w.clone(), u: None }, c.clone())),
            (1, 1) => {
                let n = letters.len();
                let (lp, lm) = (letters[n - 2], letters[n - 1]);
                if lp.gen as usize != gp || lm.gen as usize != gm {
                    return Err(VopaError::UnsupportedWord(gens.fmt_word(w)));
                }
                let prefix = Word::from_letters(&letters[..n - 2]);
                let (a, b) = (lp.der as u32, lm.der as u32);
                groups.entry((prefix, a + b)).or_default().insert(a, c.clone());
            }
            _ => return Err(VopaError::UnsupportedWord(gens.fmt_word(w))),
        }
    }
    for ((prefix, total), v) in groups {
        let mut d: Vec<C> = vec![C::zero(); total as usize + 1];
        for m in (0..=total).rev() {
            let mut x = v.get(&m).cloned().unwrap_or_else(C::zero);
            for a in m + 1..=total {
                x = x.sub(&d[a as usize].scale(&binomial(a, m)));
            }
            d[m as usize] = x;
        }
        for (m, x) in d.into_iter().enumerate() {
            if !x.is_zero() {
                out.push((UMonomial { prefix: prefix.clone(), u: Some((m as u32, total - m as u32)) }, x));
            }
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// The decoupling relation expressing `U_{0,n+5}` through
/// `:U_{0,0} U_{1,n}: - :U_{0,n} U_{1,0}:` and lower monomials.
pub fn decoupling_relation<C: Coeff>(engine: &Engine<C>, n: u32) -> Result<DecouplingResult<C>, VopaError> {
    if n == 0 {
        return Err(VopaError::Presentation("decoupling relations start at n = 1".into()));
    }
    let gens = engine.generators();
    let u = |i, j| u_field::<C>(gens, i, j);
    let target = engine.wick(&u(0, 0)?, &u(1, n)?).sub(&engine.wick(&u(0, n)?, &u(1, 0)?));
    let monomials = u_monomials(&target, gens)?;
    let lead = UMonomial { prefix: Word::vacuum(), u: Some((0, n + 5)) };
    let coefficient = monomials.iter().find(|(m, _)| *m == lead).map(|(_, c)| c.clone()).unwrap_or_else(C::zero);
    let tail = monomials.into_iter().filter(|(m, _)| *m != lead).collect();
    Ok(DecouplingResult { n, coefficient, tail, target })
}

/// The decoupling relation of `w2_4` over Q(k).
pub fn decoupling_relation_symbolic(n: u32) -> Result<DecouplingResult<RationalFunction>, VopaError> {
    decoupling_relation(&solved_w2_4()?.engine()?, n)
}

/// The decoupling relation of `w2_4` at the level `k0`.
pub fn decoupling_relation_at(n: u32, k0: &BigRational) -> Result<DecouplingResult<BigRational>, VopaError> {
    decoupling_relation(&solved_w2_4()?.engine_at(k0)?, n)
}

/// The leading decoupling coefficient as a function of `k`, reconstructed
/// from its values at the given levels (evaluated in parallel). Errors if
/// the values do not determine a rational function of total degree at most
/// `points.len() - 2`.
pub fn decoupling_coefficient_interpolated(n: u32, points: &[BigRational]) -> Result<RationalFunction, VopaError> {
    let samples = points
        .par_iter()
        .map(|k0| Ok((k0.clone(), decoupling_relation_at(n, k0)?.coefficient)))
        .collect::<Result<Vec<_>, VopaError>>()?;
    reconstruct_rational(&samples)?
        .ok_or_else(|| VopaError::Internal("too few sample levels to reconstruct the coefficient".into()))
}

/// A correction `w` of equal weight and charge zero such that `J_(m)(e + w)`
/// vanishes for every `m >= 1`.
///
/// The correction is a combination of the charge-zero words of the same
/// weight that do not occur in `e`. Undetermined coefficients are set to
/// zero.
pub fn commutant_correction<C: Scalar>(engine: &Engine<C>, e: &Expression<C>) -> Result<Expression<C>, VopaError> {
    let gens = engine.generators();
    let j = gens.index_of("J").ok_or_else(|| VopaError::UnknownGenerator("J".into()))?;
    let e = engine.canonical_form(e);
    let grade = e.grade(gens);
    let weight = grade.weight.pure().ok_or_else(|| VopaError::Presentation("field is not homogeneous".into()))?;
    if grade.charge.pure() != Some(0) {
        return Err(VopaError::Presentation("commutant corrections need a charge-zero field".into()));
    }
    let basis = enumerate_basis(gens, weight, 0, &full_alphabet(gens), None)?;
    let candidates: Vec<Word> = basis.words.iter().filter(|w| e.coeff(w).is_none()).cloned().collect();
    let jf = Expression::<C>::generator(j);
    let top = weight.floor();
    let act = |x: &Expression<C>| -> Vec<(i64, Expression<C>)> {
        (1..=top).map(|m| (m, engine.product(&jf, x, m))).collect()
    };
    let images: Vec<Vec<(i64, Expression<C>)>> =
        candidates.par_iter().map(|w| act(&Expression::word(w.clone()))).collect();
    let target = act(&e);

    let mut index: BTreeMap<(i64, Word), usize> = BTreeMap::new();
    let mut keys = |images: &[(i64, Expression<C>)]| {
        for (m, x) in images {
            for w in x.words() {
                let len = index.len();
                index.entry((*m, w.clone())).or_insert(len);
            }
        }
    };
    keys(&target);
    images.iter().for_each(|im| keys(im));
    let unknowns: Vec<Unknown> = (0..candidates.len()).map(|i| Unknown::new(&format!("w{i}"))).collect();
    let mut rows = vec![vec![C::zero(); candidates.len()]; index.len()];
    let mut rhs = vec![C::zero(); index.len()];
    for (col, im) in images.iter().enumerate() {
        for (m, x) in im {
            for (w, c) in x.iter() {
                rows[index[&(*m, w.clone())]][col] = c.clone();
            }
        }
    }
    for (m, x) in &target {
        for (w, c) in x.iter() {
            rhs[index[&(*m, w.clone())]] = c.neg();
        }
    }
    let system = LinearSystem::from_rows(unknowns, rows, rhs)?;
    let solution = solve_linear(&system)?;
    let x = match &solution {
        LinearSolution::Inconsistent { .. } => return Err(VopaError::NoCommutant),
        s => s.particular().map(<[C]>::to_vec).unwrap_or_default(),
    };
    let mut omega = Expression::zero();
    for (w, c) in candidates.into_iter().zip(x) {
        omega.add_term(w, c);
    }
    if e.plus(&omega).is_zero() {
        return Err(VopaError::NoCommutant);
    }
    Ok(omega)
}

/// Central charge of a Virasoro field: `t_(0)t = Dt`, `t_(1)t = 2t`,
/// `t_(2)t = 0` and `t_(3)t = c/2`, with nothing above.
pub fn central_charge_of<C: Coeff>(engine: &Engine<C>, t: &Expression<C>) -> Result<C, VopaError> {
    let gens = engine.generators();
    let t = engine.canonical_form(t);
    let fail = |pole: i64, what: &str, got: &Expression<C>| {
        VopaError::Shape(format!("pole {}: expected {what}, got {}", pole + 1, got.render(gens, "k")))
    };
    let p0 = engine.product(&t, &t, 0);
    if p0 != engine.derivative(&t) {
        return Err(fail(0, "D(t)", &p0));
    }
    let p1 = engine.product(&t, &t, 1);
    if p1 != t.scaled_q(&crate::arith::int(2)) {
        return Err(fail(1, "2*t", &p1));
    }
    let p2 = engine.product(&t, &t, 2);
    if !p2.is_zero() {
        return Err(fail(2, "0", &p2));
    }
    let p3 = engine.product(&t, &t, 3);
    if p3.iter().any(|(w, _)| !w.is_vacuum()) {
        return Err(fail(3, "a multiple of 1", &p3));
    }
    let top = engine.locality_bound(&t, &t).unwrap_or(3);
    for n in 4..=top {
        let p = engine.product(&t, &t, n);
        if !p.is_zero() {
            return Err(fail(n, "0", &p));
        }
    }
    Ok(p3.vacuum_coeff().scale(&crate::arith::int(2)))
}

/// The coset Virasoro field `T + w` and its central charge.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetVirasoro {
    pub field: Expression<RationalFunction>,
    pub central_charge: RationalFunction,
}

/// The Virasoro field `T + w` of the Heisenberg coset of an algebra with
/// generators `J` and `T`, certified to commute with `J`.
pub fn coset_virasoro_in<C: Scalar>(engine: &Engine<C>) -> Result<(Expression<C>, C), VopaError> {
    let gens = engine.generators();
    let index = |name: &str| gens.index_of(name).ok_or_else(|| VopaError::UnknownGenerator(name.into()));
    let t = Expression::generator(index("T")?);
    let field = t.plus(&commutant_correction(engine, &t)?);
    let central_charge = central_charge_of(engine, &field)?;
    let j = Expression::generator(index("J")?);
    if !engine.ope_singular(&j, &field).is_empty() {
        return Err(VopaError::Internal("coset Virasoro field does not commute with J".into()));
    }
    Ok((field, central_charge))
}

/// The Virasoro field of the Heisenberg coset of `w2_4` over Q(k).
pub fn coset_virasoro() -> Result<CosetVirasoro, VopaError> {
    let (field, central_charge) = coset_virasoro_in(&solved_w2_4()?.engine()?)?;
    Ok(CosetVirasoro { field, central_charge })
}
