//! Exact linear algebra over Q and Q(k).
//!
//! Systems are solved by fraction-free (Bareiss) elimination: every row is
//! first cleared of denominators, elimination then runs in the polynomial
//! ring (or the integers), and only the final back substitution divides.
//! Large overdetermined systems are first thinned to an independent set of
//! rows, chosen by elimination at a sample value of the level and confirmed
//! exactly afterwards.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{rat, BigRational, Polynomial, RationalFunction};
use crate::coeff::{Coeff, Field, Unknown};
use crate::error::VopaError;

/// An integral domain with exact division, the setting of fraction-free
/// elimination.
pub trait Domain: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / d`, where `d` is known to divide `self`.
    fn exact_div(&self, d: &Self) -> Self;
    /// A greatest common divisor; zero only if both arguments are zero.
    fn gcd(&self, o: &Self) -> Self;
}

impl Domain for Polynomial {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn one() -> Self {
        Polynomial::one()
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, d: &Self) -> Self {
        Polynomial::exact_div(self, d)
    }
    fn gcd(&self, o: &Self) -> Self {
        Polynomial::gcd(self, o)
    }
}

impl Domain for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
}

/// A field that is the fraction field of a [`Domain`].
pub trait Scalar: Field {
    type Ring: Domain;

    /// `(scale, scale * row)` with the product in the ring.
    fn clear_row(row: &[Self]) -> (Self, Vec<Self::Ring>);

    fn from_ring(r: &Self::Ring) -> Self;

    /// The value at the screening point, if defined there.
    fn sample(&self) -> Option<BigRational>;
}

/// Level at which large systems are screened for independent rows.
fn sample_point() -> BigRational {
    rat(7919, 1031)
}

impl Scalar for RationalFunction {
    type Ring = Polynomial;

    fn clear_row(row: &[Self]) -> (Self, Vec<Polynomial>) {
        let mut l = Polynomial::one();
        for x in row {
            if !x.denom().is_one() {
                let g = l.gcd(x.denom());
                l = &l * &x.denom().exact_div(&g);
            }
        }
        let cleared = row.iter().map(|x| &x.numer().clone() * &l.exact_div(x.denom())).collect();
        (RationalFunction::from_poly(l), cleared)
    }

    fn from_ring(r: &Polynomial) -> Self {
        RationalFunction::from_poly(r.clone())
    }

    fn sample(&self) -> Option<BigRational> {
        self.eval(&sample_point()).ok()
    }
}

impl Scalar for BigRational {
    type Ring = BigInt;

    fn clear_row(row: &[Self]) -> (Self, Vec<BigInt>) {
        let l = row.iter().fold(<BigInt as One>::one(), |l, x| l.lcm(x.denom()));
        let cleared = row.iter().map(|x| x.numer() * (&l / x.denom())).collect();
        (BigRational::from_integer(l), cleared)
    }

    fn from_ring(r: &BigInt) -> Self {
        BigRational::from_integer(r.clone())
    }

    fn sample(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// `A x = b` with named unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem<F> {
    unknowns: Vec<Unknown>,
    rows: Vec<Vec<F>>,
    rhs: Vec<F>,
}

impl<F: Scalar> LinearSystem<F> {
    pub fn new(unknowns: Vec<Unknown>) -> Self {
        LinearSystem { unknowns, rows: Vec::new(), rhs: Vec::new() }
    }

    /// A system from its rows; every row must have one entry per unknown.
    pub fn from_rows(unknowns: Vec<Unknown>, rows: Vec<Vec<F>>, rhs: Vec<F>) -> Result<Self, VopaError> {
        if rows.len() != rhs.len() {
            return Err(VopaError::Internal(format!("{} rows but {} right-hand sides", rows.len(), rhs.len())));
        }
        let mut sys = Self::new(unknowns);
        for (row, b) in rows.into_iter().zip(rhs) {
            sys.push_row(row, b)?;
        }
        Ok(sys)
    }

    pub fn push_row(&mut self, row: Vec<F>, rhs: F) -> Result<(), VopaError> {
        if row.len() != self.unknowns.len() {
            return Err(VopaError::Internal(format!(
                "row of length {} in a system of {} unknowns",
                row.len(),
                self.unknowns.len()
            )));
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        Ok(())
    }

    pub fn unknowns(&self) -> &[Unknown] {
        &self.unknowns
    }

    pub fn rows(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[F] {
        &self.rhs
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `A x - b`.
    pub fn residual(&self, x: &[F]) -> Vec<F> {
        self.rows.iter().zip(&self.rhs).map(|(row, b)| dot(row, x).sub(b)).collect()
    }

    /// `A v`.
    fn apply(&self, v: &[F]) -> Vec<F> {
        self.rows.iter().map(|row| dot(row, v)).collect()
    }

    fn augmented(&self, i: usize) -> Vec<F> {
        let mut r = self.rows[i].clone();
        r.push(self.rhs[i].clone());
        r
    }

    fn subsystem(&self, pick: &[usize]) -> Self {
        LinearSystem {
            unknowns: self.unknowns.clone(),
            rows: pick.iter().map(|&i| self.rows[i].clone()).collect(),
            rhs: pick.iter().map(|&i| self.rhs[i].clone()).collect(),
        }
    }
}

fn dot<F: Coeff>(a: &[F], b: &[F]) -> F {
    let mut s = F::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s.add_assign(&x.mul(y));
        }
    }
    s
}

/// Outcome of [`solve_linear`].
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution<F> {
    /// The only solution.
    Unique(Vec<F>),
    /// `particular + sum_j t_j kernel[j]`, one parameter per free unknown;
    /// the particular solution has every free unknown equal to zero.
    Family { particular: Vec<F>, free: Vec<Unknown>, kernel: Vec<Vec<F>> },
    /// Row multipliers `y` with `y A = 0` and `y b = 1`.
    Inconsistent { certificate: Vec<F> },
}

impl<F: Scalar> LinearSolution<F> {
    pub fn is_consistent(&self) -> bool {
        !matches!(self, LinearSolution::Inconsistent { .. })
    }

    /// The solution with every free unknown set to zero.
    pub fn particular(&self) -> Option<&[F]> {
        match self {
            LinearSolution::Unique(x) => Some(x),
            LinearSolution::Family { particular, .. } => Some(particular),
            LinearSolution::Inconsistent { .. } => None,
        }
    }

    pub fn free(&self) -> &[Unknown] {
        match self {
            LinearSolution::Family { free, .. } => free,
            _ => &[],
        }
    }

    /// Values of the determined unknowns; free unknowns are omitted.
    pub fn determined(&self, unknowns: &[Unknown]) -> BTreeMap<Unknown, F> {
        let mut out = BTreeMap::new();
        if let Some(x) = self.particular() {
            let free = self.free();
            for (u, v) in unknowns.iter().zip(x) {
                if !free.contains(u) {
                    out.insert(u.clone(), v.clone());
                }
            }
        }
        out
    }

    /// Whether this outcome is correct for `sys`, checked by substitution.
    pub fn verify(&self, sys: &LinearSystem<F>) -> bool {
        match self {
            LinearSolution::Unique(x) => sys.residual(x).iter().all(|r| r.is_zero()),
            LinearSolution::Family { particular, kernel, .. } => {
                sys.residual(particular).iter().all(|r| r.is_zero())
                    && kernel.iter().all(|v| sys.apply(v).iter().all(|r| r.is_zero()))
            }
            LinearSolution::Inconsistent { certificate } => {
                let n = sys.unknowns.len();
                let mut combo = vec![F::zero(); n + 1];
                for (i, y) in certificate.iter().enumerate() {
                    if y.is_zero() {
                        continue;
                    }
                    for (j, c) in combo.iter_mut().enumerate() {
                        c.add_assign(&y.mul(if j < n { &sys.rows[i][j] } else { &sys.rhs[i] }));
                    }
                }
                combo[..n].iter().all(|c| c.is_zero()) && combo[n] == F::one()
            }
        }
    }
}

/// Row echelon form by Bareiss elimination, in place. Pivots are the first
/// nonzero entry in column order. Returns the pivot columns and whether an
/// odd number of row swaps happened.
pub fn bareiss_echelon<R: Domain>(m: &mut [Vec<R>], ncols: usize) -> (Vec<usize>, bool) {
    let mut pivots = Vec::new();
    let mut odd = false;
    let mut prev = R::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        if p != r {
            m.swap(p, r);
            odd = !odd;
        }
        let (top, bottom) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pv = &pivot_row[c];
        for row in bottom.iter_mut() {
            let f = row[c].clone();
            for j in c + 1..ncols {
                let v = pv.mul(&row[j]);
                let v = if f.is_zero() { v } else { v.sub(&f.mul(&pivot_row[j])) };
                row[j] = v.exact_div(&prev);
            }
            row[c] = R::zero();
        }
        // entries left of the pivot are already zero; keep the rows tidy
        prev = pv.clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, odd)
}

/// Reduced row echelon form without leaving the ring, in place.
///
/// Each elimination step replaces a row by `a*row - b*pivot_row` with
/// `a/b` the reduced ratio of the pivot and the eliminated entry, and then
/// divides the row by the gcd of its entries. Pivots are the first nonzero
/// entry in column order. Returns the pivot columns; the first
/// `pivots.len()` rows are the nonzero rows.
pub fn fraction_free_rref<R: Domain>(m: &mut [Vec<R>], ncols: usize) -> Vec<usize> {
    for row in m.iter_mut() {
        make_primitive(row);
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, r);
        let pivot_row = m[r].clone();
        let pv = &pivot_row[c];
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[c]);
            let a = pv.exact_div(&g);
            let b = row[c].exact_div(&g);
            for j in 0..ncols {
                let keep = if row[j].is_zero() { R::zero() } else { a.mul(&row[j]) };
                row[j] = if pivot_row[j].is_zero() { keep } else { keep.sub(&b.mul(&pivot_row[j])) };
            }
            make_primitive(row);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

fn make_primitive<R: Domain>(row: &mut [R]) {
    let g = row.iter().fold(R::zero(), |g, x| if x.is_zero() { g } else { g.gcd(x) });
    if g.is_zero() || g == R::one() {
        return;
    }
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x = x.exact_div(&g);
        }
    }
}

/// Determinant by Bareiss elimination.
pub fn bareiss_determinant<R: Domain>(m: &[Vec<R>]) -> R {
    let n = m.len();
    if n == 0 {
        return R::one();
    }
    let mut a = m.to_vec();
    let (pivots, odd) = bareiss_echelon(&mut a, n);
    if pivots.len() < n {
        return R::zero();
    }
    let d = a[n - 1][n - 1].clone();
    if odd {
        d.neg()
    } else {
        d
    }
}

/// Determinant of a square matrix over the field.
pub fn determinant<F: Scalar>(m: &[Vec<F>]) -> Result<F, VopaError> {
    let mut scale = F::one();
    let mut rows = Vec::with_capacity(m.len());
    for row in m {
        if row.len() != m.len() {
            return Err(VopaError::Internal("determinant of a non-square matrix".into()));
        }
        let (s, r) = F::clear_row(row);
        scale = scale.mul(&s);
        rows.push(r);
    }
    Ok(F::from_ring(&bareiss_determinant(&rows)).div(&scale)?)
}

/// Incremental Gauss-Jordan elimination: feeds rows one at a time and keeps
/// those independent of the rows kept so far.
#[derive(Clone, Debug)]
pub struct RowReducer<F> {
    width: usize,
    /// Echelon rows with pivot entry one, sorted by pivot column.
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: Field> RowReducer<F> {
    pub fn new(width: usize) -> Self {
        RowReducer { width, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }

    /// Reduce `row` against the kept rows; keep it if a nonzero remainder is
    /// left. Returns whether it was kept.
    pub fn insert(&mut self, mut row: Vec<F>) -> Result<bool, VopaError> {
        debug_assert_eq!(row.len(), self.width);
        for (p, r) in &self.rows {
            let f = row[*p].clone();
            if f.is_zero() {
                continue;
            }
            for j in *p..self.width {
                if !r[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&r[j]));
                }
            }
        }
        let Some(p) = row.iter().position(|x| !x.is_zero()) else { return Ok(false) };
        let inv = row[p].inv()?;
        for x in row.iter_mut().skip(p) {
            *x = x.mul(&inv);
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, row));
        Ok(true)
    }
}

/// Indices of a maximal set of independent rows of `[A | b]`, chosen at the
/// screening point. Rows whose entries are undefined there are always kept.
fn screen_rows<F: Scalar>(sys: &LinearSystem<F>) -> Vec<usize> {
    let n = sys.unknowns.len();
    let mut reducer = RowReducer::<BigRational>::new(n + 1);
    let mut keep = Vec::new();
    for i in 0..sys.len() {
        let sampled: Option<Vec<BigRational>> = sys.augmented(i).iter().map(Scalar::sample).collect();
        match sampled {
            Some(row) => {
                if reducer.insert(row).unwrap_or(true) {
                    keep.push(i);
                }
            }
            None => keep.push(i),
        }
        if reducer.rank() == n + 1 {
            break;
        }
    }
    keep
}

/// Independent rows of `[A | b]`, chosen exactly.
fn exact_rows<F: Scalar>(sys: &LinearSystem<F>) -> Result<Vec<usize>, VopaError> {
    let mut reducer = RowReducer::<F>::new(sys.unknowns.len() + 1);
    let mut keep = Vec::new();
    for i in 0..sys.len() {
        if reducer.insert(sys.augmented(i))? {
            keep.push(i);
        }
    }
    Ok(keep)
}

/// Solve by fraction-free elimination on the full augmented matrix, then
/// divide each row by its pivot.
fn solve_direct<F: Scalar>(sys: &LinearSystem<F>) -> Result<LinearSolution<F>, VopaError> {
    let n = sys.unknowns.len();
    let mut m: Vec<Vec<F::Ring>> = (0..sys.len()).map(|i| F::clear_row(&sys.augmented(i)).1).collect();
    let pivots = fraction_free_rref(&mut m, n + 1);
    if pivots.last() == Some(&n) {
        return certificate(sys).map(|certificate| LinearSolution::Inconsistent { certificate });
    }
    let mut rref: Vec<Vec<F>> = Vec::with_capacity(pivots.len());
    for (row, &c) in m.iter().zip(&pivots) {
        let inv = F::from_ring(&row[c]).inv()?;
        rref.push(row.iter().map(|x| if x.is_zero() { F::zero() } else { F::from_ring(x).mul(&inv) }).collect());
    }
    let mut particular = vec![F::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        particular[c] = rref[i][n].clone();
    }
    let free_cols: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free_cols.is_empty() {
        return Ok(LinearSolution::Unique(particular));
    }
    let kernel = free_cols
        .iter()
        .map(|&f| {
            let mut v = vec![F::zero(); n];
            v[f] = F::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = rref[i][f].neg();
            }
            v
        })
        .collect();
    let free = free_cols.iter().map(|&c| sys.unknowns[c].clone()).collect();
    Ok(LinearSolution::Family { particular, free, kernel })
}

/// Multipliers `y` with `y A = 0`, `y b = 1` for an inconsistent system,
/// found by solving the transposed system.
fn certificate<F: Scalar>(sys: &LinearSystem<F>) -> Result<Vec<F>, VopaError> {
    let n = sys.unknowns.len();
    let m = sys.len();
    let ys: Vec<Unknown> = (0..m).map(|i| Unknown::new(&format!("y{i}"))).collect();
    let mut t = LinearSystem::new(ys);
    for j in 0..=n {
        let row = (0..m).map(|i| if j < n { sys.rows[i][j].clone() } else { sys.rhs[i].clone() }).collect();
        t.push_row(row, if j < n { F::zero() } else { F::one() })?;
    }
    match solve_direct(&t)? {
        LinearSolution::Unique(y) => Ok(y),
        LinearSolution::Family { particular, .. } => Ok(particular),
        LinearSolution::Inconsistent { .. } => {
            Err(VopaError::Internal("no inconsistency certificate for an inconsistent system".into()))
        }
    }
}

fn embed<F: Scalar>(sol: LinearSolution<F>, pick: &[usize], total: usize) -> LinearSolution<F> {
    match sol {
        LinearSolution::Inconsistent { certificate } => {
            let mut y = vec![F::zero(); total];
            for (&i, v) in pick.iter().zip(certificate) {
                y[i] = v;
            }
            LinearSolution::Inconsistent { certificate: y }
        }
        other => other,
    }
}

/// Solve `A x = b` exactly.
///
/// Independent rows are selected first, the selection is solved by
/// fraction-free elimination, and the result is checked against every row.
/// Inconsistency is a result, not an error.
pub fn solve_linear<F: Scalar>(sys: &LinearSystem<F>) -> Result<LinearSolution<F>, VopaError> {
    let pick = screen_rows(sys);
    let sol = embed(solve_direct(&sys.subsystem(&pick))?, &pick, sys.len());
    if sol.verify(sys) {
        return Ok(sol);
    }
    let pick = exact_rows(sys)?;
    let sol = embed(solve_direct(&sys.subsystem(&pick))?, &pick, sys.len());
    if sol.verify(sys) {
        Ok(sol)
    } else {
        Err(VopaError::Internal("linear solution failed verification".into()))
    }
}

/// The rational function of least total degree through the samples
/// `(x, y)`, found among degrees that leave at least one sample as a check.
pub fn reconstruct_rational(samples: &[(BigRational, BigRational)]) -> Result<Option<RationalFunction>, VopaError> {
    let powers = |x: &BigRational, d: usize| -> Vec<BigRational> {
        let mut out = Vec::with_capacity(d + 1);
        let mut p = <BigRational as One>::one();
        for _ in 0..=d {
            out.push(p.clone());
            p *= x;
        }
        out
    };
    for total in 0..samples.len().saturating_sub(1) {
        for dq in 0..=total {
            let dp = total - dq;
            // unknowns p_0..p_dp and q_0..q_{dq-1}; q is monic of degree dq
            let names: Vec<Unknown> = (0..=total).map(|i| Unknown::new(&format!("c{i}"))).collect();
            let mut sys = LinearSystem::new(names);
            for (x, y) in &samples[..=total] {
                let xp = powers(x, total);
                let mut row: Vec<BigRational> = xp[..=dp].to_vec();
                row.extend(xp[..dq].iter().map(|v| -(v * y)));
                sys.push_row(row, y * &xp[dq])?;
            }
            let Some(c) = solve_linear(&sys)?.particular().map(<[BigRational]>::to_vec) else { continue };
            let num = Polynomial::from_coeffs(c[..=dp].to_vec());
            let mut qc = c[dp + 1..].to_vec();
            qc.push(<BigRational as One>::one());
            let den = Polynomial::from_coeffs(qc);
            let Ok(f) = RationalFunction::new(num, den) else { continue };
            if samples.iter().all(|(x, y)| f.eval(x).is_ok_and(|v| &v == y)) {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn q(n: i64) -> BigRational {
        int(n)
    }

    fn names(n: usize) -> Vec<Unknown> {
        (1..=n).map(|i| Unknown::new(&format!("x{i}"))).collect()
    }

    #[test]
    fn square_rational_system() {
        let sys =
            LinearSystem::from_rows(names(2), vec![vec![q(1), q(1)], vec![q(1), q(-1)]], vec![q(2), q(0)]).unwrap();
        assert_eq!(solve_linear(&sys).unwrap(), LinearSolution::Unique(vec![q(1), q(1)]));
    }

    #[test]
    fn kernel_over_qk() {
        let a = RationalFunction::from_poly(Polynomial::linear(2, 1));
        let sys = LinearSystem::from_rows(names(2), vec![vec![a.clone(), a]], vec![RationalFunction::zero()]).unwrap();
        match solve_linear(&sys).unwrap() {
            LinearSolution::Family { particular, free, kernel } => {
                assert_eq!(free, vec![Unknown::new("x2")]);
                assert!(particular.iter().all(|x| x.is_zero()));
                assert_eq!(kernel, vec![vec![RationalFunction::from_i64(-1), RationalFunction::one()]]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scalar_over_qk() {
        let a = RationalFunction::from_poly(Polynomial::linear(4, 1));
        let sys = LinearSystem::from_rows(
            names(1),
            vec![vec![a.clone()], vec![RationalFunction::zero()]],
            vec![RationalFunction::one(), RationalFunction::zero()],
        )
        .unwrap();
        assert_eq!(solve_linear(&sys).unwrap(), LinearSolution::Unique(vec![a.recip().unwrap()]));
    }

    #[test]
    fn inconsistent_certificate() {
        let sys = LinearSystem::from_rows(
            names(2),
            vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(1)]],
            vec![q(1), q(3), q(0)],
        )
        .unwrap();
        let sol = solve_linear(&sys).unwrap();
        assert!(!sol.is_consistent());
        assert!(sol.verify(&sys));
    }

    #[test]
    fn singular_at_screening_point_is_still_exact() {
        // the row (k - 7919/1031) vanishes at the screening point
        let k = RationalFunction::var();
        let c = RationalFunction::from_rational(sample_point());
        let sys = LinearSystem::from_rows(names(1), vec![vec![&k - &c]], vec![RationalFunction::one()]).unwrap();
        let sol = solve_linear(&sys).unwrap();
        assert!(sol.verify(&sys));
        assert!(matches!(sol, LinearSolution::Unique(_)));
    }

    #[test]
    fn rational_reconstruction() {
        // (2+k)(5+2k)(8+3k)/360 from six samples
        let f = |k: &BigRational| (k + q(2)) * (k * q(2) + q(5)) * (k * q(3) + q(8)) / q(360);
        let samples: Vec<_> = (1..=6).map(|i| (q(i), f(&q(i)))).collect();
        let g = reconstruct_rational(&samples).unwrap().unwrap();
        assert_eq!(g.eval(&q(-2)).unwrap(), q(0));
        assert_eq!(g.eval(&q(10)).unwrap(), f(&q(10)));
        // 1/(k+4)
        let samples: Vec<_> = (0..4).map(|i| (q(i), <BigRational as One>::one() / q(i + 4))).collect();
        let g = reconstruct_rational(&samples).unwrap().unwrap();
        assert_eq!(g.denom(), &Polynomial::linear(4, 1));
        assert!(reconstruct_rational(&samples[..1]).unwrap().is_none());
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![q(2), q(1)], vec![q(7), q(4)]];
        assert_eq!(determinant(&m).unwrap(), q(1));
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(determinant(&m).unwrap(), q(-1));
    }
}
