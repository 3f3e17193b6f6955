//! Hermite constants and the lattice-quotient Bravyi–Terhal distance bound
//! `d < m·√γ_D·(√D + 4ρ)·n^{(D−1)/D}`, valid when `n^{1/D} ≥ 8ρ√γ_D`.
//!
//! Applicability is decided on exact rationals after raising both sides to
//! the `2D`-th power. The bound itself is irrational in general and is
//! reported rounded upwards.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{decompose, TwoBlockCode};
use crate::realnum::{self, ExactRational, REPORT_BITS};

/// `γ_D^D` as an exact rational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteValue {
    pub dim: usize,
    pub gamma_pow_dim: ExactRational,
    /// `false` when `gamma_pow_dim` is only the Minkowski-type upper bound.
    pub is_exact: bool,
    /// `γ_D` rounded up, for display.
    pub gamma_approx: f64,
}

impl HermiteValue {
    pub fn gamma_pow_dim(&self) -> &BigRational {
        &self.gamma_pow_dim.0
    }
}

/// Known values of `γ_D^D` for `D = 1 … 8`.
const HERMITE_TABLE: [(i64, i64); 8] = [(1, 1), (4, 3), (2, 1), (4, 1), (8, 1), (64, 3), (64, 1), (256, 1)];

pub fn hermite(dim: usize) -> HermiteValue {
    assert!(dim >= 1, "Hermite constant needs D ≥ 1");
    let (value, is_exact) = match HERMITE_TABLE.get(dim - 1) {
        Some(&(p, q)) => (realnum::rat(p, q), true),
        None => {
            let base = BigRational::one() + realnum::rat(dim as i64, 4);
            (num_traits::pow(base, dim), false)
        }
    };
    let gamma_approx = realnum::to_f64_up(&realnum::root_upper(&value, dim as u32, REPORT_BITS));
    HermiteValue { dim, gamma_pow_dim: ExactRational(value), is_exact, gamma_approx }
}

/// `(8ρ)^{2D}·γ_D^D`, the threshold that `n²` must reach.
pub fn applicability_threshold(rho: &BigRational, dim: usize) -> BigRational {
    let eight_rho = BigRational::from_integer(BigInt::from(8)) * rho;
    num_traits::pow(eight_rho, 2 * dim) * hermite(dim).gamma_pow_dim()
}

pub fn is_applicable(n: &BigInt, rho: &BigRational, dim: usize) -> bool {
    let n_sq = BigRational::from_integer(n * n);
    n_sq >= applicability_threshold(rho, dim)
}

/// The exact comparison behind the applicability verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApplicabilityRecord {
    /// `n²`.
    pub n_squared: ExactRational,
    /// `(8ρ)^{2D}·γ_D^D`.
    pub threshold: ExactRational,
    /// `n² − threshold`; applicable iff nonnegative.
    pub margin: ExactRational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: u64,
    pub rho: ExactRational,
    pub dim: usize,
    pub n: u64,
    pub hermite: HermiteValue,
    pub applicable: bool,
    pub applicability: ApplicabilityRecord,
    /// Upper bound on `m·√γ_D·(√D + 4ρ)·n^{(D−1)/D}`, the smallest `f64`
    /// above a 128-bit rational upper bracket.
    pub bound_value: f64,
    /// The same upper bracket as a decimal rounded up at 20 digits.
    pub bound_decimal: String,
    /// The inequality is strict: `d < bound`.
    pub strict: bool,
}

impl BoundReport {
    /// Whether `d` respects the reported (rounded-up) bound.
    pub fn admits(&self, d: u64) -> bool {
        (d as f64) <= self.bound_value
    }
}

/// Rational brackets `lo ≤ m·√γ_D·(√D + 4ρ)·n^{(D−1)/D} ≤ hi`.
pub fn bound_bracket(m: u64, rho: &BigRational, dim: usize, n: u64, bits: u32) -> (BigRational, BigRational) {
    let d = dim as u32;
    let gamma = hermite(dim);
    let (g_lo, g_hi) = realnum::root_bracket(gamma.gamma_pow_dim(), 2 * d, bits);
    let (s_lo, s_hi) = realnum::root_bracket(&realnum::int(dim as i64), 2, bits);
    let n_pow = BigRational::from_integer(num_traits::pow(BigInt::from(n), dim - 1));
    let (p_lo, p_hi) = realnum::root_bracket(&n_pow, d, bits);
    let four_rho = BigRational::from_integer(BigInt::from(4)) * rho;
    let m = BigRational::from_integer(BigInt::from(m));
    let lo = &m * g_lo * (s_lo + &four_rho) * p_lo;
    let hi = &m * g_hi * (s_hi + &four_rho) * p_hi;
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("ρ must be positive")]
    NonPositiveRho,
    #[error("D must be at least 1")]
    ZeroDim,
    #[error("n must be at least 1")]
    ZeroN,
    #[error("the code is not normalized: both a and b must contain the identity")]
    NotNormalized,
    #[error("the code decomposes into {index} copies of a smaller code; bound each component instead")]
    Decomposable { index: usize },
}

pub fn bt_bound(m: u64, rho: &BigRational, dim: usize, n: u64) -> Result<BoundReport, BoundError> {
    if m == 0 {
        return Err(BoundError::ZeroM);
    }
    if !rho.is_positive() {
        return Err(BoundError::NonPositiveRho);
    }
    if dim == 0 {
        return Err(BoundError::ZeroDim);
    }
    if n == 0 {
        return Err(BoundError::ZeroN);
    }
    let hermite = hermite(dim);
    let n_big = BigInt::from(n);
    let n_sq = BigRational::from_integer(&n_big * &n_big);
    let threshold = applicability_threshold(rho, dim);
    let margin = &n_sq - &threshold;
    let (_, hi) = bound_bracket(m, rho, dim, n, REPORT_BITS);
    Ok(BoundReport {
        m,
        rho: ExactRational(rho.clone()),
        dim,
        n,
        hermite,
        applicable: !margin.is_negative(),
        applicability: ApplicabilityRecord {
            n_squared: ExactRational(n_sq),
            threshold: ExactRational(threshold),
            margin: ExactRational(margin),
        },
        bound_value: realnum::to_f64_up(&hi),
        bound_decimal: realnum::decimal_up(&hi, 20),
        strict: true,
    })
}

/// The bound for a normalized, indecomposable 2BGA code: `m = 2`, `ρ = 1`,
/// `D = w − 2` and `n = |G|`. For a decomposable code, bound one component;
/// the distance of the whole code equals the component distance.
pub fn two_block_bound(code: &TwoBlockCode) -> Result<BoundReport, BoundError> {
    if !code.is_normalized() {
        return Err(BoundError::NotNormalized);
    }
    let dec = decompose(code).map_err(|_| BoundError::NotNormalized)?;
    if !dec.is_trivial() {
        return Err(BoundError::Decomposable { index: dec.index() });
    }
    let dim = code.weight().checked_sub(2).ok_or(BoundError::ZeroDim)?;
    bt_bound(2, &BigRational::one(), dim, code.n() as u64)
}

/// Smallest `n` for which the bound applies, found by exact comparison.
pub fn minimal_applicable_n(rho: &BigRational, dim: usize) -> BigInt {
    let threshold = applicability_threshold(rho, dim);
    let mut n = realnum::floor_sqrt(&threshold);
    while BigRational::from_integer(&n * &n) < threshold {
        n += 1;
    }
    n
}
