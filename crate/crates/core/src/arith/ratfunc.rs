//! The field Q(k) of rational functions in the level.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Polynomial;
use super::ArithError;

/// A reduced fraction `num/den` with `den` monic and coprime to `num`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl Default for RationalFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_i64(c: i64) -> Self {
        Self::from_poly(Polynomial::from_i64(c))
    }

    pub fn var() -> Self {
        Self::from_poly(Polynomial::var())
    }

    /// Canonical form of `num/den`.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, ArithError> {
        if den.is_zero() {
            return Err(ArithError::ZeroPolynomialDivision);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g), den.exact_div(&g)) };
        Self::make_monic(num, den)
    }

    fn make_monic(num: Polynomial, den: Polynomial) -> Self {
        let l = den.leading().expect("nonzero denominator").clone();
        if l.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = l.recip();
            RationalFunction { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// True when the value does not depend on the parameter.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        self.is_constant().then(|| self.num.constant_term())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn recip(&self) -> Result<Self, ArithError> {
        if self.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(Self::make_monic(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, ArithError> {
        Ok(self * &o.recip()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, ArithError> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = Self::one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        Ok(out)
    }

    /// Value at `k = k0`.
    pub fn eval(&self, k0: &BigRational) -> Result<BigRational, ArithError> {
        let d = self.den.eval(k0);
        if d.is_zero() {
            return Err(ArithError::Pole { at: k0.clone(), denominator: self.den.to_string() });
        }
        Ok(self.num.eval(k0) / d)
    }

    /// Rational zeros of the numerator.
    pub fn rational_zeros(&self) -> Vec<BigRational> {
        self.num.rational_roots()
    }

    /// Rational poles.
    pub fn rational_poles(&self) -> Vec<BigRational> {
        self.den.rational_roots()
    }

    pub fn display<'a>(&'a self, var: &'a str) -> impl fmt::Display + 'a {
        struct D<'a>(&'a RationalFunction, &'a str);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(self.1, f)
            }
        }
        D(self, var)
    }

    /// True when the printed form starts with a minus sign.
    pub fn looks_negative(&self) -> bool {
        self.num.leading().is_some_and(|l| l.is_negative())
    }

    fn fmt_with(&self, var: &str, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() && self.num.coeffs().iter().all(|c| c.is_integer()) {
            return write!(f, "{}", self.num.display(var));
        }
        // the denominator is monic, so it is 1 whenever the value is constant;
        // print both parts with integer coefficients and the sign in front
        let (num, den) = integral_parts(&self.num, &self.den);
        let (sign, num) = if self.looks_negative() { ("-", -&num) } else { ("", num) };
        let ns = if num.term_count() > 1 { format!("({})", num.display(var)) } else { num.display(var).to_string() };
        // a single-term denominator with a coefficient still needs parentheses
        let ds = den.display(var).to_string();
        let ds = if den.term_count() > 1 || ds.contains('*') { format!("({ds})") } else { ds };
        write!(f, "{sign}{ns}/{ds}")
    }
}

/// `num` and `den` rescaled by a common factor so that both have coprime
/// integer coefficients.
fn integral_parts(num: &Polynomial, den: &Polynomial) -> (Polynomial, Polynomial) {
    let mut l = BigInt::one();
    let mut g = BigInt::zero();
    for c in num.coeffs().iter().chain(den.coeffs()) {
        l = l.lcm(c.denom());
    }
    for c in num.coeffs().iter().chain(den.coeffs()) {
        g = g.gcd(&(c.numer() * (&l / c.denom())));
    }
    let factor = BigRational::new(l, g);
    (num.scale(&factor), den.scale(&factor))
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with("k", f)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            if self.den.is_one() {
                return RationalFunction::from_poly(&self.num + &o.num);
            }
            return RationalFunction::normalize(&self.num + &o.num, self.den.clone());
        }
        if self.den.is_one() {
            // gcd(a*d + n, d) = gcd(n, d) = 1
            return RationalFunction { num: &(&self.num * &o.den) + &o.num, den: o.den.clone() };
        }
        if o.den.is_one() {
            return RationalFunction { num: &(&o.num * &self.den) + &self.num, den: self.den.clone() };
        }
        let d1 = self.den.gcd(&o.den);
        if d1.is_one() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            if num.is_zero() {
                return RationalFunction::zero();
            }
            return RationalFunction { num, den: &self.den * &o.den };
        }
        let a_red = self.den.exact_div(&d1);
        let b_red = o.den.exact_div(&d1);
        let t = &(&self.num * &b_red) + &(&o.num * &a_red);
        if t.is_zero() {
            return RationalFunction::zero();
        }
        let d2 = t.gcd(&d1);
        let num = t.exact_div(&d2);
        let den = &a_red * &o.den.exact_div(&d2);
        RationalFunction::make_monic(num, den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, o: &RationalFunction) -> RationalFunction {
        self + &(-o)
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, o: &RationalFunction) -> RationalFunction {
        if self.is_zero() || o.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RationalFunction::from_poly(&self.num * &o.num);
        }
        if let Some(c) = self.as_constant() {
            return o.scale(&c);
        }
        if let Some(c) = o.as_constant() {
            return self.scale(&c);
        }
        let g1 = self.num.gcd(&o.den);
        let g2 = o.num.gcd(&self.den);
        let num = &self.num.exact_div(&g1) * &o.num.exact_div(&g2);
        let den = &self.den.exact_div(&g2) * &o.den.exact_div(&g1);
        RationalFunction::make_monic(num, den)
    }
}

impl Div for &RationalFunction {
    type Output = RationalFunction;
    /// Panics on division by zero; use [`RationalFunction::checked_div`] for a `Result`.
    fn div(self, o: &RationalFunction) -> RationalFunction {
        self.checked_div(o).expect("division by zero rational function")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, o: RationalFunction) -> RationalFunction {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<i64> for RationalFunction {
    fn from(c: i64) -> Self {
        Self::from_i64(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn lin(a: i64, b: i64) -> Polynomial {
        Polynomial::linear(a, b)
    }

    fn rq(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn normalize_cancels_common_factors() {
        let f = RationalFunction::new(&lin(2, 1) * &lin(5, 2), lin(2, 1)).unwrap();
        assert_eq!(f, RationalFunction::from_poly(lin(5, 2)));
        let g = RationalFunction::new(Polynomial::from_i64_coeffs(&[-4, 0, 1]), lin(-2, 1)).unwrap();
        assert_eq!(g, RationalFunction::from_poly(lin(2, 1)));
        let z = RationalFunction::new(Polynomial::zero(), lin(8, 3)).unwrap();
        assert!(z.is_zero());
        assert!(z.denom().is_one());
    }

    #[test]
    fn zero_denominator_is_an_error() {
        let e = RationalFunction::new(Polynomial::one(), Polynomial::zero()).unwrap_err();
        assert_eq!(e.to_string(), "division by zero polynomial");
    }

    #[test]
    fn field_operations() {
        let inv = RationalFunction::new(Polynomial::one(), lin(4, 1)).unwrap();
        let three = inv.scale(&rq(3, 1));
        let sum = &inv + &three;
        assert_eq!(sum, RationalFunction::new(Polynomial::from_i64(4), lin(4, 1)).unwrap());
        let a = RationalFunction::from_poly(lin(2, 1));
        let b = a.recip().unwrap();
        assert!((&a * &b).is_one());
        assert!(RationalFunction::one().checked_div(&RationalFunction::zero()).is_err());
    }

    #[test]
    fn evaluation() {
        let f = RationalFunction::from_poly(Polynomial::from_coeffs(vec![rq(2, 1), rq(3, 4)]));
        assert_eq!(f.eval(&rq(4, 1)).unwrap(), rq(5, 1));
        // c = -4(5+2k)(7+3k)/(4+k)
        let c = RationalFunction::new((&lin(5, 2) * &lin(7, 3)).scale(&rq(-4, 1)), lin(4, 1)).unwrap();
        assert_eq!(c.eval(&rq(-5, 3)).unwrap(), rq(-40, 7));
        let pole = RationalFunction::new(Polynomial::one(), lin(4, 1)).unwrap();
        assert!(matches!(pole.eval(&rq(-4, 1)), Err(ArithError::Pole { .. })));
    }

    #[test]
    fn display_forms() {
        let f = RationalFunction::new(lin(-8, -3), lin(4, 1)).unwrap();
        assert_eq!(f.to_string(), "-(3*k+8)/(k+4)");
        assert_eq!(RationalFunction::from_rational(rq(-1, 2)).to_string(), "-1/2");
    }
}
