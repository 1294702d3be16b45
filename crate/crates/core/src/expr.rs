//! Generators, derivative letters, right-nested normally ordered words and
//! their linear combinations.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use smallvec::SmallVec;

use crate::arith::BigRational;
use crate::coeff::{wrap, Coeff};

/// A half-integer stored as twice its value.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    pub fn from_twice(t: i64) -> Self {
        HalfInt(t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Largest integer not exceeding the value.
    pub fn floor(self) -> i64 {
        self.0.div_euclid(2)
    }

    pub fn to_rational(self) -> BigRational {
        crate::arith::rat(self.0, 2)
    }

    /// Parses `3`, `-1`, `3/2`.
    pub fn parse(s: &str) -> Option<Self> {
        let q = crate::arith::parse_rational(s)?;
        let t = q * crate::arith::int(2);
        if !t.is_integer() {
            return None;
        }
        use num_traits::ToPrimitive;
        t.to_integer().to_i64().map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        matches!(self, Parity::Odd)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GeneratorSymbol {
    pub name: String,
    pub weight: HalfInt,
    pub parity: Parity,
    pub charge: i64,
}

impl GeneratorSymbol {
    pub fn even(name: &str, weight: i64, charge: i64) -> Self {
        GeneratorSymbol { name: name.to_string(), weight: HalfInt::from_int(weight), parity: Parity::Even, charge }
    }
}

/// The ordered generator list of a presentation. The position of a generator
/// in this list fixes the global letter order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Generators {
    list: Vec<GeneratorSymbol>,
}

impl Generators {
    pub fn new(list: Vec<GeneratorSymbol>) -> Self {
        Generators { list }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn get(&self, i: usize) -> &GeneratorSymbol {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &GeneratorSymbol> {
        self.list.iter()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.list.iter().position(|g| g.name == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.list.iter().map(|g| g.name.as_str())
    }

    pub fn letter_weight(&self, l: Letter) -> HalfInt {
        self.list[l.gen as usize].weight + HalfInt::from_int(l.der as i64)
    }

    pub fn word_weight(&self, w: &Word) -> HalfInt {
        w.letters().iter().fold(HalfInt::ZERO, |acc, &l| acc + self.letter_weight(l))
    }

    /// Sum of generator weights, ignoring derivatives.
    pub fn word_generator_weight(&self, w: &Word) -> HalfInt {
        w.letters().iter().fold(HalfInt::ZERO, |acc, &l| acc + self.list[l.gen as usize].weight)
    }

    pub fn word_charge(&self, w: &Word) -> i64 {
        w.letters().iter().map(|l| self.list[l.gen as usize].charge).sum()
    }

    pub fn word_is_odd(&self, w: &Word) -> bool {
        w.letters().iter().filter(|l| self.list[l.gen as usize].parity.is_odd()).count() % 2 == 1
    }

    pub fn letter_is_odd(&self, l: Letter) -> bool {
        self.list[l.gen as usize].parity.is_odd()
    }

    pub fn fmt_letter(&self, l: Letter) -> String {
        let name = &self.list[l.gen as usize].name;
        match l.der {
            0 => name.clone(),
            1 => format!("D({name})"),
            d => format!("D^{d}({name})"),
        }
    }

    pub fn fmt_word(&self, w: &Word) -> String {
        match w.len() {
            0 => "1".to_string(),
            1 => self.fmt_letter(w.letters()[0]),
            _ => {
                let parts: Vec<String> = w.letters().iter().map(|&l| self.fmt_letter(l)).collect();
                format!(":{}:", parts.join(" "))
            }
        }
    }
}

/// `D^der` applied to generator number `gen`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Letter {
    pub gen: u16,
    pub der: u16,
}

impl Letter {
    pub fn new(gen: usize, der: u32) -> Self {
        Letter { gen: gen as u16, der: der as u16 }
    }

    pub fn derive(self, times: u32) -> Self {
        Letter { gen: self.gen, der: self.der + times as u16 }
    }
}

/// The global letter order: generator index ascending, then derivative order
/// descending.
impl Ord for Letter {
    fn cmp(&self, o: &Self) -> Ordering {
        self.gen.cmp(&o.gen).then(o.der.cmp(&self.der))
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

pub type Letters = SmallVec<[Letter; 6]>;

/// Right-nested normally ordered product `:l1 :l2 ... ln::`; empty is the vacuum.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(Letters);

impl Word {
    pub fn vacuum() -> Self {
        Word(SmallVec::new())
    }

    pub fn single(l: Letter) -> Self {
        let mut v = SmallVec::new();
        v.push(l);
        Word(v)
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(SmallVec::from_slice(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    /// The word without its first letter.
    pub fn rest(&self) -> Word {
        Word(SmallVec::from_slice(&self.0[1..]))
    }

    pub fn prepend(&self, l: Letter) -> Word {
        let mut v = SmallVec::with_capacity(self.0.len() + 1);
        v.push(l);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Letters appear in nondecreasing global letter order.
    pub fn is_canonical(&self) -> bool {
        self.0.windows(2).all(|p| p[0] <= p[1])
    }

    pub fn total_derivatives(&self) -> u32 {
        self.0.iter().map(|l| l.der as u32).sum()
    }
}

/// Basis order: reverse lexicographic in the letter order, so that words led
/// by later generators come first (e.g. `T`, `:J J:`, `D(J)` at weight 2).
impl Ord for Word {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.as_slice().cmp(self.0.as_slice())
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Either a single value shared by every term, or a mix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Homogeneity<T> {
    /// The zero expression has no grade.
    Empty,
    Pure(T),
    Mixed,
}

impl<T: PartialEq + Copy> Homogeneity<T> {
    fn absorb(self, x: T) -> Self {
        match self {
            Homogeneity::Empty => Homogeneity::Pure(x),
            Homogeneity::Pure(y) if y == x => self,
            _ => Homogeneity::Mixed,
        }
    }

    pub fn pure(self) -> Option<T> {
        match self {
            Homogeneity::Pure(x) => Some(x),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Grade {
    pub weight: Homogeneity<HalfInt>,
    pub charge: Homogeneity<i64>,
}

/// A finite linear combination of words. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Expression<C> {
    terms: BTreeMap<Word, C>,
}

impl<C: Coeff> Default for Expression<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> Expression<C> {
    pub fn zero() -> Self {
        Expression { terms: BTreeMap::new() }
    }

    pub fn term(w: Word, c: C) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, C::one())
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(Word::single(l))
    }

    pub fn generator(i: usize) -> Self {
        Self::letter(Letter::new(i, 0))
    }

    /// `c` times the vacuum.
    pub fn scalar(c: C) -> Self {
        Self::term(Word::vacuum(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coeff(&self, w: &Word) -> Option<&C> {
        self.terms.get(w)
    }

    /// Coefficient of the vacuum, zero if absent.
    pub fn vacuum_coeff(&self) -> C {
        self.terms.get(&Word::vacuum()).cloned().unwrap_or_else(C::zero)
    }

    pub fn into_terms(self) -> BTreeMap<Word, C> {
        self.terms
    }

    pub fn add_term(&mut self, w: Word, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                x.add_assign(&c);
                if x.is_zero() {
                    self.terms.remove(&w);
                }
            }
            None => {
                self.terms.insert(w, c);
            }
        }
    }

    pub fn add_expr(&mut self, o: &Self) {
        for (w, c) in &o.terms {
            self.add_term(w.clone(), c.clone());
        }
    }

    /// `self += c * o`
    pub fn add_scaled(&mut self, o: &Self, c: &C) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &o.terms {
            self.add_term(w.clone(), x.mul(c));
        }
    }

    /// `self += q * o` for a rational `q`.
    pub fn add_scaled_q(&mut self, o: &Self, q: &BigRational) {
        if num_traits::Zero::is_zero(q) {
            return;
        }
        for (w, x) in &o.terms {
            self.add_term(w.clone(), x.scale(q));
        }
    }

    pub fn scaled(&self, c: &C) -> Self {
        let mut e = Self::zero();
        e.add_scaled(self, c);
        e
    }

    pub fn scaled_q(&self, q: &BigRational) -> Self {
        let mut e = Self::zero();
        e.add_scaled_q(self, q);
        e
    }

    pub fn neg(&self) -> Self {
        Expression { terms: self.terms.iter().map(|(w, c)| (w.clone(), c.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut e = self.clone();
        e.add_scaled(o, &C::one().neg());
        e
    }

    pub fn plus(&self, o: &Self) -> Self {
        let mut e = self.clone();
        e.add_expr(o);
        e
    }

    pub fn try_map_coeffs<D: Coeff, E>(&self, f: impl Fn(&C) -> Result<D, E>) -> Result<Expression<D>, E> {
        let mut out = Expression::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Expression<D> {
        let mut out = Expression::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// True when every word is in canonical letter order.
    pub fn is_canonical(&self) -> bool {
        self.terms.keys().all(Word::is_canonical)
    }

    /// The grade of the expression with respect to conformal weight and charge.
    pub fn grade(&self, gens: &Generators) -> Grade {
        let mut weight = Homogeneity::Empty;
        let mut charge = Homogeneity::Empty;
        for w in self.terms.keys() {
            weight = weight.absorb(gens.word_weight(w));
            charge = charge.absorb(gens.word_charge(w));
        }
        Grade { weight, charge }
    }

    /// Largest weight of a term, or `None` for zero.
    pub fn max_weight(&self, gens: &Generators) -> Option<HalfInt> {
        self.terms.keys().map(|w| gens.word_weight(w)).max()
    }

    /// Leibniz derivative on the stored words without reordering letters.
    /// The result is a correct value but its words need not be canonical.
    pub fn raw_derivative(&self) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            for i in 0..w.len() {
                let mut letters: Letters = SmallVec::from_slice(w.letters());
                letters[i] = letters[i].derive(1);
                out.add_term(Word(letters), c.clone());
            }
        }
        out
    }

    /// Render in the text grammar accepted by the parser.
    pub fn display<'a>(&'a self, gens: &'a Generators, param: &'a str) -> impl fmt::Display + 'a {
        ExprDisplay { e: self, gens, param }
    }

    pub fn render(&self, gens: &Generators, param: &str) -> String {
        self.display(gens, param).to_string()
    }
}

struct ExprDisplay<'a, C> {
    e: &'a Expression<C>,
    gens: &'a Generators,
    param: &'a str,
}

impl<C: Coeff> fmt::Display for ExprDisplay<'_, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.e.terms.iter().enumerate() {
            let neg = c.render_negative();
            let a = if neg { c.neg() } else { c.clone() };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let cs = a.render(self.param);
            if w.is_vacuum() && self.e.len() == 1 && !neg {
                write!(f, "{cs}")?;
            } else if w.is_vacuum() {
                write!(f, "{}", wrap(&cs))?;
            } else if a == C::one() {
                write!(f, "{}", self.gens.fmt_word(w))?;
            } else {
                write!(f, "{}*{}", wrap(&cs), self.gens.fmt_word(w))?;
            }
        }
        Ok(())
    }
}

/// Exact linear combination of expressions.
pub fn combine<C: Coeff>(parts: &[(C, Expression<C>)]) -> Expression<C> {
    let mut out = Expression::zero();
    for (c, e) in parts {
        out.add_scaled(e, c);
    }
    out
}
