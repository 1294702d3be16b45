//! Numerology of the simple current extensions `A(n, r)` of
//! `V_L ⊗ W(n, r)`, with `L = sqrt(nr) Z`.
//!
//! Everything here is exact rational arithmetic in `n`, `r` and the level.

use std::fmt;

use num_integer::Integer;

use crate::arith::{int, rat, BigRational, RationalFunction};
use crate::error::VopaError;

/// The coprimality conditions on `(n, r)`. They are reported, not enforced,
/// except where an operation states otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateReport {
    pub n: i64,
    pub r: i64,
    /// `gcd(n+1, n+r)`; the base condition asks for 1.
    pub base_gcd: i64,
    /// Whether `nr` is even.
    pub nr_even: bool,
    /// `gcd(n-1, n+1)` and `gcd(n-1, n+r)`; the reconstruction condition
    /// asks for one of them to be 1.
    pub theorem_gcds: (i64, i64),
}

impl GateReport {
    pub fn base(&self) -> bool {
        self.base_gcd == 1
    }

    pub fn theorem(&self) -> bool {
        self.theorem_gcds.0 == 1 || self.theorem_gcds.1 == 1
    }
}

impl fmt::Display for GateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, r) = (self.n, self.r);
        let verdict = |ok: bool| if ok { "pass" } else { "fail" };
        writeln!(f, "base gate: gcd({}, {}) = {} -> {}", n + 1, n + r, self.base_gcd, verdict(self.base()))?;
        writeln!(f, "nr even: {}", self.nr_even)?;
        write!(
            f,
            "theorem gate: gcd({}, {}) = {}, gcd({}, {}) = {} -> {}",
            n - 1,
            n + 1,
            self.theorem_gcds.0,
            n - 1,
            n + r,
            self.theorem_gcds.1,
            verdict(self.theorem())
        )
    }
}

fn check_range(n: i64, r: i64) -> Result<(), VopaError> {
    if n <= 1 || r <= 1 {
        return Err(VopaError::Gate(format!("need n > 1 and r > 1, got n = {n}, r = {r}")));
    }
    Ok(())
}

pub fn gates(n: i64, r: i64) -> GateReport {
    GateReport {
        n,
        r,
        base_gcd: (n + 1).gcd(&(n + r)),
        nr_even: (n * r) % 2 == 0,
        theorem_gcds: ((n - 1).gcd(&(n + 1)), (n - 1).gcd(&(n + r))),
    }
}

/// `(ell, k)` with `ell + n = (n+r)/(n+1)` the level of `W(n, r)` and
/// `k + r = (n+r)/(r-1)` the conjectural subregular level.
pub fn levels(n: i64, r: i64) -> Result<(BigRational, BigRational), VopaError> {
    check_range(n, r)?;
    let ell = rat(n + r, n + 1) - int(n);
    let k = rat(n + r, r - 1) - int(r);
    Ok((ell, k))
}

/// Data of the simple current generating the extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleCurrentData {
    /// Conformal dimension `(n-1)r/(2n)` of the `W(n, r)` module.
    pub conf_dim: BigRational,
    /// Quantum dimension `(-1)^r`.
    pub qdim: i64,
    /// Conformal dimension `r/(2n)` of the lattice module `L + r/sqrt(rn)`.
    pub lattice_generator_weight: BigRational,
}

pub fn simple_current_data(n: i64, r: i64) -> Result<SimpleCurrentData, VopaError> {
    check_range(n, r)?;
    Ok(SimpleCurrentData {
        conf_dim: rat((n - 1) * r, 2 * n),
        qdim: if r % 2 == 0 { 1 } else { -1 },
        lattice_generator_weight: rat(r, 2 * n),
    })
}

/// The conformal dimension of the simple current from the Casimir formula
/// `(n+1)/(2(n+r)) (rw, rw + 2 rho) - (rw, rho)`, with `w` the first
/// fundamental weight of `sl_n`, computed from explicit coordinates.
pub fn conformal_dimension_casimir(n: i64, r: i64) -> Result<BigRational, VopaError> {
    check_range(n, r)?;
    let nn = n as usize;
    // sl_n weights as vectors in Q^n orthogonal to (1, ..., 1)
    let w: Vec<BigRational> = (0..nn).map(|i| if i == 0 { int(1) - rat(1, n) } else { -rat(1, n) }).collect();
    let rho: Vec<BigRational> = (0..nn).map(|i| rat(n + 1, 2) - int(i as i64 + 1)).collect();
    let dot = |a: &[BigRational], b: &[BigRational]| a.iter().zip(b).map(|(x, y)| x * y).sum::<BigRational>();
    let rw: Vec<BigRational> = w.iter().map(|x| x * int(r)).collect();
    let shifted: Vec<BigRational> = rw.iter().zip(&rho).map(|(x, y)| x + y * int(2)).collect();
    Ok(rat(n + 1, 2 * (n + r)) * dot(&rw, &shifted) - dot(&rw, &rho))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grading {
    Integer,
    HalfInteger,
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grading::Integer => "integer",
            Grading::HalfInteger => "half-integer",
        })
    }
}

/// The summand `V_{L + rs/sqrt(rn)} ⊗ L_{r w_s}` of `A(n, r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Summand {
    pub s: i64,
    /// Lowest conformal weight of the lattice coset: `r min(s, n-s)^2 / (2n)`.
    pub lattice_coset_weight: BigRational,
    /// Conformal dimension of `L_{r w_s}`: `r s (n-s) / (2n)`.
    pub simple_current_weight: BigRational,
    /// `min(sr/2, (n-s)r/2)`.
    pub lowest_weight: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionData {
    pub n: i64,
    pub r: i64,
    pub ell: BigRational,
    pub k_conj: BigRational,
    /// `nr`, the norm of the generator of `L`.
    pub lattice: i64,
    pub summands: Vec<Summand>,
    pub grading: Grading,
    pub qdim_generator: i64,
    pub gates: GateReport,
}

impl ExtensionData {
    pub fn lowest_weights(&self) -> Vec<BigRational> {
        self.summands.iter().map(|s| s.lowest_weight.clone()).collect()
    }
}

impl fmt::Display for ExtensionData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sc = simple_current_data(self.n, self.r).map_err(|_| fmt::Error)?;
        writeln!(f, "n = {}, r = {}", self.n, self.r)?;
        writeln!(f, "{}", self.gates)?;
        writeln!(f, "ell = {}", self.ell)?;
        writeln!(f, "kConj = {}", self.k_conj)?;
        writeln!(f, "lattice = sqrt({})Z", self.lattice)?;
        writeln!(f, "confDim = {}", sc.conf_dim)?;
        writeln!(f, "qdim = {}", if sc.qdim > 0 { "+1" } else { "-1" })?;
        writeln!(f, "latticeGeneratorWeight = {}", sc.lattice_generator_weight)?;
        writeln!(f, "grading = {}", self.grading)?;
        writeln!(f, "summands (s, latticeCosetWeight, simpleCurrentWeight, lowestWeight):")?;
        for s in &self.summands {
            writeln!(f, "  {}, {}, {}, {}", s.s, s.lattice_coset_weight, s.simple_current_weight, s.lowest_weight)?;
        }
        let lw: Vec<String> = self.summands.iter().map(|s| s.lowest_weight.to_string()).collect();
        write!(f, "lowestWeights = ({})", lw.join(","))
    }
}

/// The decomposition of `A(n, r)` into `n` summands. Fails when `n` or `r`
/// is at most 1 or when neither `gcd(n-1, n+1)` nor `gcd(n-1, n+r)` is 1;
/// the base gate is reported in the result.
pub fn extension_decomposition(n: i64, r: i64) -> Result<ExtensionData, VopaError> {
    check_range(n, r)?;
    let g = gates(n, r);
    if !g.theorem() {
        return Err(VopaError::Gate(format!(
            "theorem gate: gcd({}, {}) = {} and gcd({}, {}) = {}",
            n - 1,
            n + 1,
            g.theorem_gcds.0,
            n - 1,
            n + r,
            g.theorem_gcds.1
        )));
    }
    let (ell, k_conj) = levels(n, r)?;
    let summands = (0..n)
        .map(|s| {
            let m = s.min(n - s);
            Summand {
                s,
                lattice_coset_weight: rat(r * m * m, 2 * n),
                simple_current_weight: rat(r * s * (n - s), 2 * n),
                lowest_weight: rat(s * r, 2).min(rat((n - s) * r, 2)),
            }
        })
        .collect();
    Ok(ExtensionData {
        n,
        r,
        ell,
        k_conj,
        lattice: n * r,
        summands,
        grading: if r % 2 == 0 { Grading::Integer } else { Grading::HalfInteger },
        qdim_generator: simple_current_data(n, r)?.qdim,
        gates: g,
    })
}

/// Normalizations at the boundary of the extension: the leading constant
/// `prod_{i=1}^{n-1} (i(k+n-1) - 1)` of `X1 Xn1`, and the Heisenberg level
/// `(n-1)k/n + n - 2`.
pub fn boundary_ope_data(n: i64, k: &RationalFunction) -> Result<(RationalFunction, RationalFunction), VopaError> {
    if n <= 1 {
        return Err(VopaError::Gate(format!("need n > 1, got {n}")));
    }
    let mut pairing = RationalFunction::one();
    for i in 1..n {
        // i(k + n - 1) - 1
        let factor = &k.scale(&int(i)) + &RationalFunction::from_i64(i * (n - 1) - 1);
        pairing = &pairing * &factor;
    }
    let heis = &k.scale(&rat(n - 1, n)) + &RationalFunction::from_i64(n - 2);
    Ok((pairing, heis))
}

/// `boundary_ope_data` at the symbolic level `k`.
pub fn boundary_ope_data_symbolic(n: i64) -> Result<(RationalFunction, RationalFunction), VopaError> {
    boundary_ope_data(n, &RationalFunction::var())
}

/// Whether the conjectural level of `(3k+8, 4)` is `k` again.
pub fn r4_level_round_trip(k: i64) -> Result<bool, VopaError> {
    let (_, kc) = levels(3 * k + 8, 4)?;
    Ok(kc == int(k))
}
