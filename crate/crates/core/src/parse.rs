//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ['-'] INT)?
//! atom   := INT | PARAM | '?' NAME | GEN | 'D' ['^' INT] factor
//!         | ':' factor factor+ ':' | '(' expr ')'
//! factor := GEN | 'D' ['^' INT] factor | ':' factor factor+ ':' | '(' expr ')'
//! ```
//!
//! Coefficients are rational functions in the parameter, optionally affine in
//! unknowns written `?name`. Generator names are matched longest first, so
//! `G+` and `G-` are single tokens. Inside a Wick group a `:` opens a nested
//! group while fewer than two factors have been read and closes the group
//! otherwise.
//!
//! Parsing yields an [`Ast`]. [`parse_expression`] evaluates it structurally:
//! Wick groups become right-nested words without any reordering. Fully
//! reduced evaluation of products goes through [`evaluate`] with an engine.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::{BigRational, RationalFunction};
use crate::coeff::{Coeff, Symbolic, Unknown};
use crate::error::VopaError;
use crate::expr::{Expression, Generators, Word};
use crate::ope::Engine;

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Int(BigInt),
    Param,
    Unknown(String),
    Gen(usize),
    /// `D^n(x)`
    Deriv(u32, Box<Ast>),
    /// Right-nested Wick product of at least two factors.
    Wick(Vec<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, i32),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    gens: &'a Generators,
    param: &'a str,
    line_base: usize,
}

/// Parse `text` into a syntax tree. `line` is the 1-based line used in error
/// positions for the first line of `text`.
pub fn parse_ast(text: &str, gens: &Generators, param: &str, line: usize) -> Result<Ast, VopaError> {
    let mut p = Parser { src: text, pos: 0, gens, param, line_base: line };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected `{}`", p.peek().unwrap_or(' '))));
    }
    Ok(ast)
}

impl Parser<'_> {
    fn error(&self, message: String) -> VopaError {
        let before = &self.src[..self.pos];
        let line = self.line_base + before.matches('\n').count();
        let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        VopaError::Syntax { line, column, message }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    /// Consume `c` after optional whitespace.
    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), VopaError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |x| format!("`{x}`"));
            Err(self.error(format!("expected `{c}`, found {found}")))
        }
    }

    fn expr(&mut self) -> Result<Ast, VopaError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Ast, VopaError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, VopaError> {
        if self.eat('-') {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = self.integer()?.to_i32().ok_or_else(|| self.error("exponent too large".into()))?;
            return Ok(Ast::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, VopaError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer".into()));
        }
        Ok(self.src[start..self.pos].parse().expect("digits"))
    }

    fn atom(&mut self) -> Result<Ast, VopaError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => Ok(Ast::Int(self.integer()?)),
            Some('?') => {
                self.pos += 1;
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.') {
                    self.pos += 1;
                }
                if start == self.pos {
                    return Err(self.error("expected an unknown name after `?`".into()));
                }
                Ok(Ast::Unknown(self.src[start..self.pos].to_string()))
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<Ast, VopaError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(':') => {
                self.pos += 1;
                self.wick_group()
            }
            Some(c) if c.is_alphabetic() || c == '_' => self.name(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    /// After the opening `:`.
    fn wick_group(&mut self) -> Result<Ast, VopaError> {
        let mut factors = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None => return Err(self.error("unbalanced `:`".into())),
                Some(':') if factors.len() >= 2 => {
                    self.pos += 1;
                    return Ok(Ast::Wick(factors));
                }
                Some(_) => factors.push(self.factor()?),
            }
        }
    }

    fn name(&mut self) -> Result<Ast, VopaError> {
        let start = self.pos;
        let mut end = start;
        for (i, c) in self.rest().char_indices() {
            if c.is_alphanumeric() || c == '_' {
                end = start + i + c.len_utf8();
            } else {
                break;
            }
        }
        let ident = &self.src[start..end];
        let rest = self.rest();
        let gen = self
            .gens
            .iter()
            .enumerate()
            .filter(|(_, g)| rest.starts_with(g.name.as_str()) && g.name.len() >= ident.len())
            .max_by_key(|(_, g)| g.name.len())
            .map(|(i, g)| (i, g.name.len()));
        if ident == self.param {
            self.pos = end;
            return Ok(Ast::Param);
        }
        if let Some((i, len)) = gen {
            self.pos += len;
            return Ok(Ast::Gen(i));
        }
        if ident == "D" {
            self.pos = end;
            let order = if self.eat('^') {
                self.integer()?.to_u32().ok_or_else(|| self.error("derivative order too large".into()))?
            } else {
                1
            };
            let inner = self.factor()?;
            return Ok(Ast::Deriv(order, Box::new(inner)));
        }
        Err(VopaError::UnknownGenerator(ident.to_string()))
    }
}

/// A value during evaluation: a coefficient or a field.
enum Value<C> {
    Scalar(Symbolic),
    Field(Expression<C>),
}

/// How Wick products and derivatives are formed during evaluation.
pub trait FieldOps<C: Coeff> {
    fn coefficient(&self, s: &Symbolic) -> Result<C, VopaError>;
    fn wick(&self, a: &Expression<C>, b: &Expression<C>) -> Result<Expression<C>, VopaError>;
    fn derivative(&self, a: &Expression<C>, order: u32) -> Result<Expression<C>, VopaError>;
}

/// Structural evaluation: Wick groups become right-nested words verbatim.
pub struct Structural;

impl FieldOps<Symbolic> for Structural {
    fn coefficient(&self, s: &Symbolic) -> Result<Symbolic, VopaError> {
        Ok(s.clone())
    }

    fn wick(&self, a: &Expression<Symbolic>, b: &Expression<Symbolic>) -> Result<Expression<Symbolic>, VopaError> {
        let mut out = Expression::zero();
        for (wa, ca) in a.iter() {
            if wa.len() > 1 {
                return Err(VopaError::Presentation(
                    "a composite left factor in a Wick group needs normal ordering; use an engine".into(),
                ));
            }
            for (wb, cb) in b.iter() {
                let mut letters = wa.letters().to_vec();
                letters.extend_from_slice(wb.letters());
                let c = ca.mul(cb);
                if c.is_nonlinear() {
                    return Err(VopaError::Nonlinear);
                }
                out.add_term(Word::from_letters(&letters), c);
            }
        }
        Ok(out)
    }

    fn derivative(&self, a: &Expression<Symbolic>, order: u32) -> Result<Expression<Symbolic>, VopaError> {
        let mut out = a.clone();
        for _ in 0..order {
            out = out.raw_derivative();
        }
        Ok(out)
    }
}

/// Fully reduced evaluation through an engine, with a coefficient map.
pub struct Reduced<'a, C: Coeff, F> {
    pub engine: &'a Engine<C>,
    pub convert: F,
}

impl<C: Coeff, F: Fn(&Symbolic) -> Result<C, VopaError>> FieldOps<C> for Reduced<'_, C, F> {
    fn coefficient(&self, s: &Symbolic) -> Result<C, VopaError> {
        (self.convert)(s)
    }

    fn wick(&self, a: &Expression<C>, b: &Expression<C>) -> Result<Expression<C>, VopaError> {
        Ok(self.engine.product(a, b, -1))
    }

    fn derivative(&self, a: &Expression<C>, order: u32) -> Result<Expression<C>, VopaError> {
        Ok(self.engine.derivative_n(a, order))
    }
}

/// Evaluate a syntax tree to an expression.
pub fn evaluate<C: Coeff>(ast: &Ast, ops: &impl FieldOps<C>) -> Result<Expression<C>, VopaError> {
    match eval(ast, ops)? {
        Value::Scalar(s) => Ok(Expression::scalar(ops.coefficient(&s)?)),
        Value::Field(e) => Ok(e),
    }
}

fn into_field<C: Coeff>(v: Value<C>, ops: &impl FieldOps<C>) -> Result<Expression<C>, VopaError> {
    match v {
        Value::Scalar(s) => Ok(Expression::scalar(ops.coefficient(&s)?)),
        Value::Field(e) => Ok(e),
    }
}

fn eval<C: Coeff>(ast: &Ast, ops: &impl FieldOps<C>) -> Result<Value<C>, VopaError> {
    Ok(match ast {
        Ast::Int(n) => Value::Scalar(Symbolic::from_rational(&BigRational::from_integer(n.clone()))),
        Ast::Param => Value::Scalar(Symbolic::constant(RationalFunction::var())),
        Ast::Unknown(name) => Value::Scalar(Symbolic::unknown(Unknown::new(name))),
        Ast::Gen(i) => Value::Field(Expression::generator(*i)),
        Ast::Deriv(order, inner) => {
            let e = into_field(eval(inner, ops)?, ops)?;
            Value::Field(ops.derivative(&e, *order)?)
        }
        Ast::Wick(factors) => {
            let mut acc = into_field(eval(factors.last().expect("two factors"), ops)?, ops)?;
            for f in factors[..factors.len() - 1].iter().rev() {
                let left = into_field(eval(f, ops)?, ops)?;
                acc = ops.wick(&left, &acc)?;
            }
            Value::Field(acc)
        }
        Ast::Neg(x) => match eval(x, ops)? {
            Value::Scalar(s) => Value::Scalar(s.neg()),
            Value::Field(e) => Value::Field(e.neg()),
        },
        Ast::Add(x, y) | Ast::Sub(x, y) => {
            let sub = matches!(ast, Ast::Sub(..));
            match (eval(x, ops)?, eval(y, ops)?) {
                (Value::Scalar(a), Value::Scalar(b)) => Value::Scalar(if sub { a.sub(&b) } else { a.add(&b) }),
                (a, b) => {
                    let a = into_field(a, ops)?;
                    let b = into_field(b, ops)?;
                    Value::Field(if sub { a.sub(&b) } else { a.plus(&b) })
                }
            }
        }
        Ast::Mul(x, y) => match (eval(x, ops)?, eval(y, ops)?) {
            (Value::Scalar(a), Value::Scalar(b)) => {
                let c = a.mul(&b);
                if c.is_nonlinear() {
                    return Err(VopaError::Nonlinear);
                }
                Value::Scalar(c)
            }
            (Value::Scalar(s), Value::Field(e)) | (Value::Field(e), Value::Scalar(s)) => {
                let c = ops.coefficient(&s)?;
                Value::Field(e.scaled(&c))
            }
            (Value::Field(_), Value::Field(_)) => {
                return Err(VopaError::Presentation(
                    "product of two fields; write the normally ordered product as :a b:".into(),
                ))
            }
        },
        Ast::Div(x, y) => {
            let d = match eval(y, ops)? {
                Value::Scalar(s) => s,
                Value::Field(_) => return Err(VopaError::Presentation("division by a field".into())),
            };
            let d = d
                .as_constant()
                .ok_or_else(|| VopaError::Presentation("division by an expression in unknowns".into()))?
                .recip()?;
            let d = Symbolic::constant(d);
            match eval(x, ops)? {
                Value::Scalar(s) => Value::Scalar(s.mul(&d)),
                Value::Field(e) => Value::Field(e.scaled(&ops.coefficient(&d)?)),
            }
        }
        Ast::Pow(x, e) => match eval(x, ops)? {
            Value::Scalar(s) => {
                if *e == 1 {
                    Value::Scalar(s)
                } else {
                    let c = s
                        .as_constant()
                        .ok_or_else(|| VopaError::Presentation("power of an expression in unknowns".into()))?;
                    Value::Scalar(Symbolic::constant(c.pow(*e)?))
                }
            }
            Value::Field(_) => return Err(VopaError::Presentation("power of a field".into())),
        },
    })
}

/// Parse an expression and evaluate it structurally: the result may contain
/// non-canonical words, exactly as written.
pub fn parse_expression(text: &str, gens: &Generators, param: &str) -> Result<Expression<Symbolic>, VopaError> {
    parse_expression_at(text, gens, param, 1)
}

pub(crate) fn parse_expression_at(
    text: &str,
    gens: &Generators,
    param: &str,
    line: usize,
) -> Result<Expression<Symbolic>, VopaError> {
    let ast = parse_ast(text, gens, param, line)?;
    evaluate(&ast, &Structural)
}

/// Parse a coefficient: an expression without generators.
pub fn parse_coefficient(text: &str, param: &str) -> Result<RationalFunction, VopaError> {
    let gens = Generators::default();
    let e = parse_expression(text, &gens, param)?;
    if e.words().any(|w| !w.is_vacuum()) {
        return Err(VopaError::Presentation(format!("`{text}` is not a coefficient")));
    }
    e.vacuum_coeff()
        .as_constant()
        .cloned()
        .ok_or_else(|| VopaError::Presentation(format!("`{text}` contains unknowns")))
}

/// Parse a rational number such as `5/7` or `-2`.
pub fn parse_rational_value(text: &str) -> Result<BigRational, VopaError> {
    let c = parse_coefficient(text, "k")?;
    c.as_constant().ok_or_else(|| VopaError::Presentation(format!("`{text}` is not a rational number")))
}

/// Convert a coefficient to a rational function, rejecting unknowns.
pub fn symbolic_to_rf(s: &Symbolic) -> Result<RationalFunction, VopaError> {
    s.as_constant()
        .cloned()
        .ok_or_else(|| VopaError::Presentation(format!("coefficient `{}` contains unknowns", s.render("k"))))
}

/// Convert a coefficient to a rational number by evaluating at `k0`.
pub fn symbolic_at(s: &Symbolic, k0: &BigRational) -> Result<BigRational, VopaError> {
    Ok(symbolic_to_rf(s)?.eval(k0)?)
}

/// Parse an expression and normal order it with an engine, converting
/// coefficients with `convert`.
pub fn parse_reduced<C: Coeff>(
    text: &str,
    engine: &Engine<C>,
    param: &str,
    convert: impl Fn(&Symbolic) -> Result<C, VopaError>,
) -> Result<Expression<C>, VopaError> {
    let ast = parse_ast(text, engine.generators(), param, 1)?;
    let e = evaluate(&ast, &Reduced { engine, convert })?;
    Ok(engine.canonical_form(&e))
}
