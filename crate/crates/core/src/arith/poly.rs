//! Dense univariate polynomials over Q in the level parameter.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A polynomial in the formal parameter, coefficients stored low degree first.
///
/// The coefficient vector never has trailing zeros, so the zero polynomial is
/// the empty vector and `degree()` returns `None` for it.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_i64(c: i64) -> Self {
        Self::constant(q(c))
    }

    /// The parameter itself.
    pub fn var() -> Self {
        Self::from_coeffs(vec![BigRational::zero(), BigRational::one()])
    }

    /// `a + b*k`
    pub fn linear(a: i64, b: i64) -> Self {
        Self::from_coeffs(vec![q(a), q(b)])
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64_coeffs(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Rescale so the leading coefficient is 1. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) if l.is_one() => self.clone(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Euclidean division over Q. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        let dd = d.degree().expect("polynomial division by zero");
        let lead_inv = d.coeffs[dd].recip();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &c * dc;
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    /// Division that is known to be exact.
    pub fn exact_div(&self, d: &Polynomial) -> Polynomial {
        if d.is_one() {
            return self.clone();
        }
        let (quot, rem) = self.div_rem(d);
        debug_assert!(rem.is_zero(), "inexact polynomial division");
        quot
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() {
            return other.monic();
        }
        if other.is_zero() {
            return self.monic();
        }
        if self.is_constant() || other.is_constant() {
            return Self::one();
        }
        // linear fast path: test the single root
        for (lin, p) in [(self, other), (other, self)] {
            if lin.degree() == Some(1) {
                let root = -(&lin.coeffs[0] / &lin.coeffs[1]);
                return if p.eval(&root).is_zero() { lin.monic() } else { Self::one() };
            }
        }
        let a = IntPoly::primitive_of(self);
        let b = IntPoly::primitive_of(other);
        let g = if a.degree() >= b.degree() { a.prs_gcd(b) } else { b.prs_gcd(a) };
        g.to_poly().monic()
    }

    /// Formal derivative in the parameter.
    pub fn derivative(&self) -> Polynomial {
        Self::from_coeffs(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
    }

    /// Rational roots with multiplicity, found by the rational root test on the
    /// primitive integer form.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut roots = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let mut p = self.clone();
        while p.constant_term().is_zero() && !p.is_zero() {
            roots.push(BigRational::zero());
            p = Polynomial::from_coeffs(p.coeffs[1..].to_vec());
        }
        let ip = IntPoly::primitive_of(&p);
        if ip.degree() == 0 {
            return roots;
        }
        let c0 = ip.c[0].abs();
        let cn = ip.c.last().unwrap().abs();
        let (Some(c0s), Some(cns)) = (small_divisors(&c0), small_divisors(&cn)) else {
            return roots;
        };
        let mut cands: Vec<BigRational> = Vec::new();
        for a in &c0s {
            for b in &cns {
                let r = BigRational::new(a.clone(), b.clone());
                if !cands.contains(&r) {
                    cands.push(r.clone());
                    cands.push(-r);
                }
            }
        }
        for r in cands {
            let lin = Polynomial::from_coeffs(vec![-r.clone(), BigRational::one()]);
            loop {
                if p.degree().unwrap_or(0) == 0 || !p.eval(&r).is_zero() {
                    break;
                }
                p = p.exact_div(&lin);
                roots.push(r.clone());
            }
        }
        roots
    }

    fn fmt_with(&self, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }

    /// Display with an explicit parameter name.
    pub fn display<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Polynomial, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(self.1, f)
            }
        }
        D(self, var)
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }
}

fn small_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    use num_traits::ToPrimitive;
    let n = n.to_u64()?;
    if n == 0 || n > 1_000_000_000_000 {
        return None;
    }
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
    }
    Some(out)
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with("k", f)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        let (long, short) = if self.coeffs.len() >= o.coeffs.len() { (self, o) } else { (o, self) };
        let mut c = long.coeffs.clone();
        for (x, y) in c.iter_mut().zip(&short.coeffs) {
            *x += y;
        }
        Polynomial::from_coeffs(c)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) - o.coeff(i));
        }
        Polynomial::from_coeffs(c)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(c)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: Polynomial) -> Polynomial {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

/// Integer polynomial used by the primitive remainder sequence.
#[derive(Clone, Debug)]
pub(crate) struct IntPoly {
    pub(crate) c: Vec<BigInt>,
}

impl IntPoly {
    /// Clear denominators and divide out the content.
    pub(crate) fn primitive_of(p: &Polynomial) -> IntPoly {
        let mut l = BigInt::one();
        for c in p.coeffs() {
            l = l.lcm(c.denom());
        }
        let c: Vec<BigInt> = p.coeffs().iter().map(|x| (x * &l).to_integer()).collect();
        IntPoly { c }.primitive()
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn trim(mut self) -> Self {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        self
    }

    fn primitive(self) -> IntPoly {
        let s = self.trim();
        if s.is_zero() {
            return s;
        }
        let mut g = BigInt::zero();
        for x in &s.c {
            g = g.gcd(x);
            if g.is_one() {
                break;
            }
        }
        let mut c: Vec<BigInt> = if g.is_one() { s.c } else { s.c.into_iter().map(|x| x / &g).collect() };
        if c.last().unwrap().is_negative() {
            for x in c.iter_mut() {
                *x = -x.clone();
            }
        }
        IntPoly { c }
    }

    /// Pseudo-remainder of `self` by `d`.
    fn prem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree();
        let lc = d.c[dd].clone();
        let mut r = self.c.clone();
        while r.len() > dd && !r.is_empty() {
            let top = r.len() - 1;
            let t = r[top].clone();
            if t.is_zero() {
                r.pop();
                continue;
            }
            for x in r.iter_mut() {
                *x *= &lc;
            }
            let shift = top - dd;
            for (j, dc) in d.c.iter().enumerate() {
                r[shift + j] -= &t * dc;
            }
            r.pop();
        }
        IntPoly { c: r }.trim()
    }

    /// Primitive PRS gcd; requires `deg self >= deg other`.
    fn prs_gcd(self, other: IntPoly) -> IntPoly {
        let mut a = self;
        let mut b = other;
        while !b.is_zero() {
            if b.degree() == 0 {
                return IntPoly { c: vec![BigInt::one()] };
            }
            let r = a.prem(&b).primitive();
            a = b;
            b = r;
        }
        a
    }

    fn to_poly(&self) -> Polynomial {
        Polynomial::from_coeffs(self.c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_i64_coeffs(c)
    }

    #[test]
    fn gcd_of_shared_linear_factor() {
        // (k-2)(k+2) and (k-2)(k+5)
        let a = p(&[-4, 0, 1]);
        let b = &p(&[-2, 1]) * &p(&[5, 1]);
        assert_eq!(a.gcd(&b), p(&[-2, 1]));
    }

    #[test]
    fn gcd_of_quadratic_factor() {
        let f = p(&[1, 0, 1]);
        let a = &f * &p(&[3, 2, 7]);
        let b = &f * &p(&[1, -1, 0, 4]);
        assert_eq!(a.gcd(&b), f);
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[2, 0, 3])), Polynomial::one());
    }

    #[test]
    fn division_round_trip() {
        let a = p(&[3, -1, 4, 1, 5]);
        let d = p(&[2, 0, 3]);
        let (qt, r) = a.div_rem(&d);
        assert_eq!(&(&qt * &d) + &r, a);
        assert!(r.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn roots_of_product() {
        let f = &(&p(&[2, 1]) * &p(&[5, 2])) * &p(&[8, 3]);
        let mut roots = f.rational_roots();
        roots.sort();
        let want = vec![q(-8) / q(3), q(-5) / q(2), q(-2)];
        let mut want = want;
        want.sort();
        assert_eq!(roots, want);
    }

    #[test]
    fn display_is_high_degree_first() {
        assert_eq!(p(&[26, 17, 3]).to_string(), "3*k^2+17*k+26");
        assert_eq!(p(&[0, -1]).to_string(), "-k");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }
}
