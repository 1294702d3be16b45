//! Algebra presentations: generators plus a table of singular OPEs.
//!
//! Presentations are read from a line-oriented text format:
//!
//! ```text
//! algebra NAME
//! param k
//! generator NAME weight W parity even|odd charge C [virasoro]
//! ope A B
//! N: EXPRESSION
//! N: ?ansatz(weight=W, charge=C)
//! end
//! ```
//!
//! `N` is the pole order, so `N: x` states `A_(N-1)B = x`. Lines starting
//! with `#` are comments; a line inside an `ope` block that does not start
//! with a pole order continues the previous expression. An `?ansatz`
//! directive expands to a combination of fresh unknowns over the monomial
//! basis of the given weight and charge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::arith::{BigRational, RationalFunction};
use crate::basis::{enumerate_basis, full_alphabet};
use crate::coeff::{Coeff, Symbolic, Unknown};
use crate::error::VopaError;
use crate::expr::{Expression, GeneratorSymbol, Generators, HalfInt, Parity};
use crate::ope::{Engine, PairTable};
use crate::parse::{parse_expression_at, symbolic_at, symbolic_to_rf};

const W2_4: &str = include_str!("../fixtures/w2_4.vopa");
const R4_ANSATZ: &str = include_str!("../fixtures/r4_ansatz.vopa");

/// The singular OPE of one ordered generator pair: `poles[n] = a_(n)b`.
#[derive(Clone, Debug, PartialEq)]
pub struct OpeEntry {
    pub a: usize,
    pub b: usize,
    pub poles: BTreeMap<u32, Expression<Symbolic>>,
}

impl OpeEntry {
    pub fn has_unknowns(&self) -> bool {
        self.poles.values().any(|e| e.iter().any(|(_, c)| !c.is_constant()))
    }

    fn products(&self) -> Vec<Expression<Symbolic>> {
        let top = self.poles.keys().next_back().map_or(0, |n| n + 1);
        (0..top).map(|n| self.poles.get(&n).cloned().unwrap_or_else(Expression::zero)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraPresentation {
    pub name: String,
    pub param: String,
    pub generators: Generators,
    pub virasoro: Option<usize>,
    entries: Vec<OpeEntry>,
    /// Entries given in both orientations; the second orientation is kept
    /// here and checked against skew-symmetry by `validate`.
    redundant: Vec<OpeEntry>,
    unknowns: Vec<Unknown>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    Homogeneity,
    Virasoro,
    SkewSymmetry,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Self-pair entries whose skew-symmetry could not be checked because
    /// they still contain unknowns.
    pub unresolved: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl AlgebraPresentation {
    pub fn new(name: &str, param: &str, generators: Generators, virasoro: Option<usize>) -> Self {
        AlgebraPresentation {
            name: name.to_string(),
            param: param.to_string(),
            generators,
            virasoro,
            entries: Vec::new(),
            redundant: Vec::new(),
            unknowns: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[OpeEntry] {
        &self.entries
    }

    pub fn redundant_entries(&self) -> &[OpeEntry] {
        &self.redundant
    }

    /// The entry stored for `(a, b)` in this orientation.
    pub fn entry(&self, a: usize, b: usize) -> Option<&OpeEntry> {
        self.entries.iter().find(|e| e.a == a && e.b == b)
    }

    pub fn gen(&self, name: &str) -> Result<usize, VopaError> {
        self.generators.index_of(name).ok_or_else(|| VopaError::UnknownGenerator(name.to_string()))
    }

    /// Unknowns still present in the table, in order of introduction.
    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn has_unknowns(&self) -> bool {
        !self.unknowns.is_empty()
    }

    /// Insert or replace the entry of `(a, b)`. Any stored reverse
    /// orientation is dropped. New unknowns are registered.
    pub fn set_entry(&mut self, a: usize, b: usize, poles: BTreeMap<u32, Expression<Symbolic>>) {
        self.entries.retain(|e| !((e.a == a && e.b == b) || (e.a == b && e.b == a)));
        self.redundant.retain(|e| !((e.a == a && e.b == b) || (e.a == b && e.b == a)));
        let poles = poles.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        self.entries.push(OpeEntry { a, b, poles });
        self.refresh_unknowns();
    }

    fn refresh_unknowns(&mut self) {
        let present: BTreeSet<Unknown> = self
            .entries
            .iter()
            .flat_map(|e| e.poles.values())
            .flat_map(|x| x.iter().flat_map(|(_, c)| c.unknowns().cloned().collect::<Vec<_>>()))
            .collect();
        let mut ordered: Vec<Unknown> = self.unknowns.iter().filter(|u| present.contains(u)).cloned().collect();
        for u in present {
            if !ordered.contains(&u) {
                ordered.push(u);
            }
        }
        self.unknowns = ordered;
    }

    /// Replace unknowns by values.
    pub fn substitute(&self, values: &BTreeMap<Unknown, Symbolic>) -> AlgebraPresentation {
        let map = |e: &OpeEntry| OpeEntry {
            a: e.a,
            b: e.b,
            poles: e
                .poles
                .iter()
                .map(|(n, x)| (*n, x.map_coeffs(|c| c.substitute(values))))
                .filter(|(_, x)| !x.is_zero())
                .collect(),
        };
        let mut out = self.clone();
        out.entries = self.entries.iter().map(map).collect();
        out.redundant = self.redundant.iter().map(map).collect();
        out.refresh_unknowns();
        out
    }

    /// Parse an expression in this presentation's generators, without
    /// normal ordering.
    pub fn parse(&self, text: &str) -> Result<Expression<Symbolic>, VopaError> {
        parse_expression_at(text, &self.generators, &self.param, 1)
    }

    fn tables<C: Coeff>(
        &self,
        convert: impl Fn(&Symbolic) -> Result<C, VopaError>,
    ) -> Result<Vec<PairTable<C>>, VopaError> {
        self.entries
            .iter()
            .map(|e| {
                let products =
                    e.products().iter().map(|x| x.try_map_coeffs(&convert)).collect::<Result<Vec<_>, _>>()?;
                Ok(PairTable { a: e.a, b: e.b, products })
            })
            .collect()
    }

    /// Engine with coefficients affine in the table's unknowns.
    pub fn engine_symbolic(&self) -> Result<Engine<Symbolic>, VopaError> {
        Engine::new(self.generators.clone(), self.tables(|c| Ok(c.clone()))?)
    }

    /// Engine over Q(k); fails if unknowns remain.
    pub fn engine(&self) -> Result<Engine<RationalFunction>, VopaError> {
        Engine::new(self.generators.clone(), self.tables(symbolic_to_rf)?)
    }

    /// Engine over Q with the parameter specialized to `k0`.
    pub fn engine_at(&self, k0: &BigRational) -> Result<Engine<BigRational>, VopaError> {
        Engine::new(self.generators.clone(), self.tables(|c| symbolic_at(c, k0))?)
    }

    /// Weight of `a_(n)b`.
    pub fn product_weight(&self, a: usize, b: usize, n: u32) -> HalfInt {
        self.generators.get(a).weight + self.generators.get(b).weight - HalfInt::from_int(n as i64 + 1)
    }

    /// Check homogeneity of every entry, the Virasoro conditions
    /// `T_(0)a = Da`, `T_(1)a = wt(a) a`, and skew-symmetry of redundantly
    /// stored orientations and of self-pairs.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let gens = &self.generators;
        for e in self.entries.iter().chain(&self.redundant) {
            let (na, nb) = (&gens.get(e.a).name, &gens.get(e.b).name);
            let charge = gens.get(e.a).charge + gens.get(e.b).charge;
            for (n, x) in &e.poles {
                let want = self.product_weight(e.a, e.b, *n);
                for w in x.words() {
                    let (ww, wc) = (gens.word_weight(w), gens.word_charge(w));
                    if ww != want || wc != charge {
                        report.violations.push(Violation {
                            kind: ViolationKind::Homogeneity,
                            message: format!(
                                "({na}, {nb}) pole {}: term {} has weight {ww} and charge {wc}, expected weight {want} and charge {charge}",
                                n + 1,
                                gens.fmt_word(w)
                            ),
                        });
                    }
                }
            }
        }
        if !report.violations.is_empty() {
            return report;
        }
        let engine = match self.engine_symbolic() {
            Ok(e) => e,
            Err(err) => {
                report.violations.push(Violation { kind: ViolationKind::Homogeneity, message: err.to_string() });
                return report;
            }
        };
        if let Some(t) = self.virasoro {
            let tn = &gens.get(t).name;
            for (a, g) in gens.iter().enumerate() {
                let x = Expression::generator(a);
                let t0 = engine.generator_product(t, a, 0);
                let d = engine.derivative(&x);
                if t0 != d {
                    report.violations.push(Violation {
                        kind: ViolationKind::Virasoro,
                        message: format!(
                            "{tn}_(0){} = {}, expected D({})",
                            g.name,
                            t0.render(gens, &self.param),
                            g.name
                        ),
                    });
                }
                let t1 = engine.generator_product(t, a, 1);
                let want = x.scaled(&Symbolic::from_rational(&g.weight.to_rational()));
                if t1 != want {
                    report.violations.push(Violation {
                        kind: ViolationKind::Virasoro,
                        message: format!(
                            "{tn}_(1){} = {}, expected {}",
                            g.name,
                            t1.render(gens, &self.param),
                            want.render(gens, &self.param)
                        ),
                    });
                }
            }
        }
        for r in &self.redundant {
            let (na, nb) = (&gens.get(r.a).name, &gens.get(r.b).name);
            let top = self.product_weight(r.a, r.b, 0).floor().max(-1);
            for n in 0..=top {
                let given = r.poles.get(&(n as u32)).map(|x| engine.canonical_form(x)).unwrap_or_else(Expression::zero);
                let transported = engine.generator_product(r.a, r.b, n as u32);
                if given != transported {
                    report.violations.push(Violation {
                        kind: ViolationKind::SkewSymmetry,
                        message: format!(
                            "({na}, {nb}) pole {} disagrees with skew-symmetry: given {}, expected {}",
                            n + 1,
                            given.render(gens, &self.param),
                            transported.render(gens, &self.param)
                        ),
                    });
                }
            }
        }
        for e in self.entries.iter().filter(|e| e.a == e.b) {
            let name = &gens.get(e.a).name;
            if e.has_unknowns() {
                report.unresolved.push(format!("({name}, {name})"));
                continue;
            }
            let top = self.product_weight(e.a, e.a, 0).floor().max(-1);
            for n in 0..=top {
                let given = engine.generator_product(e.a, e.a, n as u32);
                let transported = engine.skew_transport(e.a, e.a, n as u32);
                if given != transported {
                    report.violations.push(Violation {
                        kind: ViolationKind::SkewSymmetry,
                        message: format!(
                            "({name}, {name}) pole {} is not skew-symmetric: {} versus {}",
                            n + 1,
                            given.render(gens, &self.param),
                            transported.render(gens, &self.param)
                        ),
                    });
                }
            }
        }
        report
    }

    /// Render in the `.vopa` format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "algebra {}", self.name);
        let _ = writeln!(s, "param {}", self.param);
        for (i, g) in self.generators.iter().enumerate() {
            let parity = if g.parity.is_odd() { "odd" } else { "even" };
            let vir = if self.virasoro == Some(i) { " virasoro" } else { "" };
            let _ =
                writeln!(s, "generator {} weight {} parity {} charge {}{}", g.name, g.weight, parity, g.charge, vir);
        }
        for e in self.entries.iter().chain(&self.redundant) {
            let _ = writeln!(s, "\nope {} {}", self.generators.get(e.a).name, self.generators.get(e.b).name);
            for (n, x) in e.poles.iter().rev() {
                let _ = writeln!(s, "{}: {}", n + 1, x.render(&self.generators, &self.param));
            }
            let _ = writeln!(s, "end");
        }
        s
    }

    /// Read a presentation from `.vopa` text.
    pub fn load(text: &str) -> Result<AlgebraPresentation, VopaError> {
        Loader::default().run(text)
    }

    pub fn load_file(path: &std::path::Path) -> Result<AlgebraPresentation, VopaError> {
        let text = std::fs::read_to_string(path).map_err(|e| VopaError::Io(format!("{}: {e}", path.display())))?;
        Self::load(&text)
    }
}

/// A built-in presentation: `heisenberg` (level `k`), `virasoro` (central
/// charge `k`), `w2_4`, or `r4_ansatz`, the undetermined OPE algebra of two
/// weight-2 simple currents `X1`, `Xn1` over `J`, `T`, `W`.
pub fn builtin(name: &str) -> Result<AlgebraPresentation, VopaError> {
    match name {
        "heisenberg" => AlgebraPresentation::load(
            "algebra heisenberg\nparam k\ngenerator J weight 1 parity even charge 0\nope J J\n2: k\nend\n",
        ),
        "virasoro" => AlgebraPresentation::load(
            "algebra virasoro\nparam k\ngenerator T weight 2 parity even charge 0 virasoro\n\
             ope T T\n4: k/2\n2: 2*T\n1: D(T)\nend\n",
        ),
        "w2_4" => AlgebraPresentation::load(W2_4),
        "r4_ansatz" => AlgebraPresentation::load(R4_ANSATZ),
        other => Err(VopaError::Presentation(format!(
            "unknown built-in algebra `{other}` (expected heisenberg, virasoro, w2_4 or r4_ansatz)"
        ))),
    }
}

#[derive(Default)]
struct Loader {
    name: Option<String>,
    param: Option<String>,
    gens: Vec<GeneratorSymbol>,
    virasoro: Option<usize>,
}

struct Block {
    a: usize,
    b: usize,
    line: usize,
    poles: Vec<(u32, usize, String)>,
}

fn syntax(line: usize, message: impl Into<String>) -> VopaError {
    VopaError::Syntax { line, column: 1, message: message.into() }
}

fn unknown_prefix(a: &str, b: &str, pole: u32) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| match c {
                '+' => 'p',
                '-' => 'm',
                c if c.is_ascii_alphanumeric() => c,
                _ => '_',
            })
            .collect()
    };
    format!("{}{}_{}", clean(a), clean(b), pole)
}

impl Loader {
    fn run(mut self, text: &str) -> Result<AlgebraPresentation, VopaError> {
        let mut blocks: Vec<Block> = Vec::new();
        let mut open: Option<Block> = None;
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(block) = open.as_mut() {
                if line == "end" {
                    blocks.push(open.take().expect("open block"));
                    continue;
                }
                match line.split_once(':') {
                    Some((n, rest)) if !n.is_empty() && n.trim().chars().all(|c| c.is_ascii_digit()) => {
                        let pole: u32 = n.trim().parse().map_err(|_| syntax(lineno, "bad pole order"))?;
                        if pole == 0 {
                            return Err(syntax(lineno, "pole orders start at 1"));
                        }
                        if block.poles.iter().any(|(p, _, _)| *p == pole) {
                            return Err(syntax(lineno, format!("pole {pole} given twice")));
                        }
                        block.poles.push((pole, lineno, rest.trim().to_string()));
                    }
                    _ => match block.poles.last_mut() {
                        Some((_, _, text)) => {
                            text.push('\n');
                            text.push_str(line);
                        }
                        None => return Err(syntax(lineno, "expected `N: expression` or `end`")),
                    },
                }
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match words[0] {
                "algebra" if words.len() == 2 && self.name.is_none() => self.name = Some(words[1].to_string()),
                "param" if words.len() == 2 && self.param.is_none() => self.param = Some(words[1].to_string()),
                "generator" => self.generator(&words, lineno)?,
                "ope" if words.len() == 3 => {
                    let find = |n: &str| {
                        self.gens
                            .iter()
                            .position(|g| g.name == n)
                            .ok_or_else(|| VopaError::UnknownGenerator(n.to_string()))
                    };
                    open = Some(Block { a: find(words[1])?, b: find(words[2])?, line: lineno, poles: Vec::new() });
                }
                _ => return Err(syntax(lineno, format!("malformed line `{line}`"))),
            }
        }
        if let Some(b) = open {
            return Err(syntax(b.line, "`ope` block without `end`"));
        }
        let name = self.name.ok_or_else(|| syntax(1, "missing `algebra NAME`"))?;
        let param = self.param.ok_or_else(|| syntax(1, "missing `param NAME`"))?;
        let gens = Generators::new(self.gens);
        let mut p = AlgebraPresentation::new(&name, &param, gens, self.virasoro);
        for block in blocks {
            let (na, nb) = (p.generators.get(block.a).name.clone(), p.generators.get(block.b).name.clone());
            if p.entry(block.a, block.b).is_some() {
                return Err(syntax(block.line, format!("duplicate `ope {na} {nb}` block")));
            }
            let mut poles = BTreeMap::new();
            for (pole, line, text) in &block.poles {
                let e = if let Some(spec) = text.strip_prefix("?ansatz") {
                    let (weight, charge) = parse_ansatz(spec, *line)?;
                    let basis = enumerate_basis(&p.generators, weight, charge, &full_alphabet(&p.generators), None)?;
                    let (e, names) = basis.ansatz(&unknown_prefix(&na, &nb, *pole));
                    p.unknowns.extend(names);
                    e
                } else {
                    parse_expression_at(text, &p.generators, &param, *line)?
                };
                if !e.is_zero() {
                    poles.insert(pole - 1, e);
                }
            }
            let entry = OpeEntry { a: block.a, b: block.b, poles };
            if block.a != block.b && p.entry(block.b, block.a).is_some() {
                if p.redundant.iter().any(|r| r.a == block.a && r.b == block.b) {
                    return Err(syntax(block.line, format!("duplicate `ope {na} {nb}` block")));
                }
                p.redundant.push(entry);
            } else {
                p.entries.push(entry);
            }
        }
        p.refresh_unknowns();
        Ok(p)
    }

    fn generator(&mut self, words: &[&str], line: usize) -> Result<(), VopaError> {
        if words.len() < 2 {
            return Err(syntax(line, "generator needs a name"));
        }
        let name = words[1].to_string();
        if self.gens.iter().any(|g| g.name == name) {
            return Err(syntax(line, format!("duplicate generator `{name}`")));
        }
        let (mut weight, mut parity, mut charge, mut vir) = (None, Parity::Even, 0i64, false);
        let mut i = 2;
        while i < words.len() {
            match words[i] {
                "virasoro" => {
                    vir = true;
                    i += 1;
                    continue;
                }
                key => {
                    let value = words.get(i + 1).ok_or_else(|| syntax(line, format!("`{key}` needs a value")))?;
                    match key {
                        "weight" => {
                            weight = Some(
                                HalfInt::parse(value)
                                    .ok_or_else(|| syntax(line, format!("weight `{value}` is not a half-integer")))?,
                            )
                        }
                        "parity" => {
                            parity = match *value {
                                "even" => Parity::Even,
                                "odd" => Parity::Odd,
                                _ => return Err(syntax(line, format!("parity `{value}` is not even or odd"))),
                            }
                        }
                        "charge" => {
                            charge = value
                                .parse()
                                .map_err(|_| syntax(line, format!("charge `{value}` is not an integer")))?
                        }
                        _ => return Err(syntax(line, format!("unknown generator attribute `{key}`"))),
                    }
                    i += 2;
                }
            }
        }
        let weight = weight.ok_or_else(|| syntax(line, "generator needs a weight"))?;
        if weight < HalfInt::ZERO {
            return Err(syntax(line, "negative weight"));
        }
        if vir {
            if self.virasoro.is_some() {
                return Err(syntax(line, "two generators marked virasoro"));
            }
            self.virasoro = Some(self.gens.len());
        }
        self.gens.push(GeneratorSymbol { name, weight, parity, charge });
        Ok(())
    }
}

/// Parse `(weight=W, charge=C)`.
fn parse_ansatz(spec: &str, line: usize) -> Result<(HalfInt, i64), VopaError> {
    let inner = spec
        .trim()
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| syntax(line, "expected `?ansatz(weight=W, charge=C)`"))?;
    let (mut weight, mut charge) = (None, None);
    for part in inner.split(',') {
        let (k, v) = part.split_once('=').ok_or_else(|| syntax(line, "expected `key=value` in ansatz"))?;
        match k.trim() {
            "weight" => weight = HalfInt::parse(v.trim()),
            "charge" => charge = v.trim().parse().ok(),
            other => return Err(syntax(line, format!("unknown ansatz key `{other}`"))),
        }
    }
    match (weight, charge) {
        (Some(w), Some(c)) => Ok((w, c)),
        _ => Err(syntax(line, "ansatz needs an integer charge and a half-integer weight")),
    }
}
