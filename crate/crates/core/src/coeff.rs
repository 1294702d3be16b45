//! Coefficient rings for expressions.
//!
//! The engine is generic over the coefficient type so the same rewriting code
//! runs over Q(k), over Q after specializing the level, and over affine
//! combinations of named unknowns.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::arith::{ArithError, BigRational, RationalFunction};

pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(q: &BigRational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Multiplication by a rational scalar.
    fn scale(&self, q: &BigRational) -> Self;

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }

    /// Text form in the coefficient grammar of the expression parser.
    fn render(&self, param: &str) -> String;

    /// Sign used when printing a sum: true if the rendered value begins with `-`.
    fn render_negative(&self) -> bool;
}

/// A coefficient field: every nonzero element has an inverse.
pub trait Field: Coeff {
    fn inv(&self) -> Result<Self, ArithError>;

    fn div(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self.mul(&o.inv()?))
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, q: &BigRational) -> Self {
        self * q
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
    fn render(&self, _param: &str) -> String {
        self.to_string()
    }
    fn render_negative(&self) -> bool {
        self.is_negative()
    }
}

impl Field for BigRational {
    fn inv(&self) -> Result<Self, ArithError> {
        if Zero::is_zero(self) {
            Err(ArithError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }
}

impl Coeff for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn from_rational(q: &BigRational) -> Self {
        RationalFunction::from_rational(q.clone())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale(&self, q: &BigRational) -> Self {
        RationalFunction::scale(self, q)
    }
    fn render(&self, param: &str) -> String {
        self.display(param).to_string()
    }
    fn render_negative(&self) -> bool {
        self.looks_negative()
    }
}

impl Field for RationalFunction {
    fn inv(&self) -> Result<Self, ArithError> {
        self.recip()
    }
}

/// A named unknown coefficient, e.g. one introduced by an ansatz.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Unknown(Arc<str>);

impl Unknown {
    pub fn new(name: &str) -> Self {
        Unknown(Arc::from(name))
    }
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

impl fmt::Display for Unknown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// `constant + sum_i c_i u_i` over a base field.
///
/// Products of two non-constant values are not representable; such a product
/// sets the `nonlinear` flag, which poisons every value derived from it.
#[derive(Clone, PartialEq, Debug)]
pub struct Affine<F> {
    constant: F,
    terms: BTreeMap<Unknown, F>,
    nonlinear: bool,
}

impl<F: Coeff> Affine<F> {
    pub fn constant(c: F) -> Self {
        Affine { constant: c, terms: BTreeMap::new(), nonlinear: false }
    }

    pub fn unknown(u: Unknown) -> Self {
        Self::scaled_unknown(u, F::one())
    }

    pub fn scaled_unknown(u: Unknown, c: F) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(u, c);
        }
        Affine { constant: F::zero(), terms, nonlinear: false }
    }

    pub fn constant_part(&self) -> &F {
        &self.constant
    }

    pub fn terms(&self) -> &BTreeMap<Unknown, F> {
        &self.terms
    }

    pub fn is_nonlinear(&self) -> bool {
        self.nonlinear
    }

    pub fn is_constant(&self) -> bool {
        !self.nonlinear && self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&F> {
        self.is_constant().then_some(&self.constant)
    }

    pub fn unknowns(&self) -> impl Iterator<Item = &Unknown> {
        self.terms.keys()
    }

    /// Replace unknowns by affine values. Unknowns missing from `values` stay.
    pub fn substitute(&self, values: &BTreeMap<Unknown, Affine<F>>) -> Self {
        let mut out = Affine { constant: self.constant.clone(), terms: BTreeMap::new(), nonlinear: self.nonlinear };
        for (u, c) in &self.terms {
            match values.get(u) {
                Some(v) => out = out.add(&v.scale_by(c)),
                None => out = out.add(&Affine::scaled_unknown(u.clone(), c.clone())),
            }
        }
        out
    }

    /// Multiply by an element of the base field.
    pub fn scale_by(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Affine {
            constant: self.constant.mul(c),
            terms: self.terms.iter().map(|(u, x)| (u.clone(), x.mul(c))).collect(),
            nonlinear: self.nonlinear,
        }
    }

    /// Map the base field, e.g. to specialize the level.
    pub fn try_map<G: Coeff, E>(&self, f: impl Fn(&F) -> Result<G, E>) -> Result<Affine<G>, E> {
        let mut terms = BTreeMap::new();
        for (u, c) in &self.terms {
            let g = f(c)?;
            if !g.is_zero() {
                terms.insert(u.clone(), g);
            }
        }
        Ok(Affine { constant: f(&self.constant)?, terms, nonlinear: self.nonlinear })
    }
}

impl<F: Coeff> Coeff for Affine<F> {
    fn zero() -> Self {
        Self::constant(F::zero())
    }
    fn one() -> Self {
        Self::constant(F::one())
    }
    fn is_zero(&self) -> bool {
        !self.nonlinear && self.constant.is_zero() && self.terms.is_empty()
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::constant(F::from_rational(q))
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
    fn add_assign(&mut self, o: &Self) {
        self.constant.add_assign(&o.constant);
        for (u, c) in &o.terms {
            match self.terms.get_mut(u) {
                Some(x) => {
                    x.add_assign(c);
                    if x.is_zero() {
                        self.terms.remove(u);
                    }
                }
                None => {
                    self.terms.insert(u.clone(), c.clone());
                }
            }
        }
        self.nonlinear |= o.nonlinear;
    }
    fn neg(&self) -> Self {
        Affine {
            constant: self.constant.neg(),
            terms: self.terms.iter().map(|(u, c)| (u.clone(), c.neg())).collect(),
            nonlinear: self.nonlinear,
        }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_constant() {
            return o.scale_by(&self.constant);
        }
        if o.is_constant() {
            return self.scale_by(&o.constant);
        }
        let mut out = self.scale_by(&o.constant).add(&o.scale_by(&self.constant));
        out.nonlinear = true;
        out
    }
    fn scale(&self, q: &BigRational) -> Self {
        let c = F::from_rational(q);
        self.scale_by(&c)
    }
    fn render(&self, param: &str) -> String {
        if self.terms.is_empty() {
            return self.constant.render(param);
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (u, c) in &self.terms {
            let neg = c.render_negative();
            let a = if neg { c.neg() } else { c.clone() };
            let s = if a == F::one() { u.to_string() } else { format!("{}*{}", wrap(&a.render(param)), u) };
            parts.push((neg, s));
        }
        if !self.constant.is_zero() {
            let neg = self.constant.render_negative();
            let a = if neg { self.constant.neg() } else { self.constant.clone() };
            parts.push((neg, a.render(param)));
        }
        let mut s = String::new();
        for (i, (neg, p)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            s.push_str(p);
        }
        if self.nonlinear {
            s.push_str(" + <nonlinear>");
        }
        s
    }
    fn render_negative(&self) -> bool {
        if self.terms.is_empty() {
            return self.constant.render_negative();
        }
        // a single negative term prints as a difference
        let s = self.render("k");
        s.starts_with('-') && wrap(&s) == s
    }
}

/// Wrap a rendered coefficient in parentheses when it has a top-level sum, so
/// that `c*factor` parses back as intended.
pub(crate) fn wrap(s: &str) -> String {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 && i > 0 => return format!("({s})"),
            ' ' if depth == 0 => return format!("({s})"),
            _ => {}
        }
    }
    s.to_string()
}

/// Coefficients of the form used for table entries and parsed input.
pub type Symbolic = Affine<RationalFunction>;
