//! Exact operator product expansions for vertex algebras with coefficients
//! in the rational-function field Q(k).
//!
//! The crate is organized in layers:
//!
//! * [`arith`]: rationals, polynomials and rational functions in `k`;
//! * [`coeff`]: the coefficient abstraction, including affine combinations
//!   of named unknowns;
//! * [`expr`]: generators, letters, canonical words and expressions;
//! * [`ope`]: the n-th product rewriting engine;

pub mod arith;
pub mod basis;
pub mod coeff;
pub mod error;
pub mod expr;
pub mod extension;
pub mod linalg;
pub mod ope;
pub mod orbifold;
pub mod paper_check;
pub mod parse;
pub mod presentation;
pub mod solver;

pub use error::VopaError;
