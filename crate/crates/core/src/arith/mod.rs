//! Exact arithmetic in Q and Q(k).

mod poly;
mod ratfunc;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use poly::Polynomial;
pub use ratfunc::RationalFunction;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("division by zero polynomial")]
    ZeroPolynomialDivision,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at k = {at}: denominator {denominator} vanishes")]
    Pole { at: BigRational, denominator: String },
}

/// Shorthand for the rational `n/d`.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse `p/q` or an integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d == BigInt::from(0) {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> BigRational {
    let mut acc = BigInt::from(1);
    for i in 2..=n {
        acc *= i;
    }
    BigRational::from_integer(acc)
}

/// Binomial coefficient `C(n, k)` for `0 <= k <= n`.
pub fn binomial(n: u32, k: u32) -> BigRational {
    if k > n {
        return int(0);
    }
    let mut acc = BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    BigRational::from_integer(acc)
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling(n: i64, k: u32) -> BigRational {
    let mut acc = BigInt::from(1);
    for i in 0..k as i64 {
        acc *= n - i;
    }
    BigRational::from_integer(acc)
}
