//! Full-rank integer lattices `Λ ⊆ ℤ^D` and their finite quotients `ℤ^D/Λ`.
//!
//! All arithmetic is exact. Quotient points are represented canonically by
//! reducing against the lower-triangular Hermite normal form `H` of the
//! basis: the canonical representatives are the integer points of the box
//! `Π [0, H_jj)`, listed in lexicographic order.

mod good_basis;
pub mod normal_form;
pub mod reduction;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use good_basis::{good_basis, GoodBasis, GoodBasisChecks, ParallelotopePartition};
pub use normal_form::{hermite_normal_form, smith_normal_form, IntMatrix};
pub use reduction::GramSchmidt;

use normal_form::{determinant, to_big};

/// Quotients larger than this are not enumerated.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;
/// Largest dimension handled by exact shortest/closest vector enumeration.
pub const MAX_ENUMERATION_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("basis must be a nonempty square matrix, got {rows} rows of lengths {lengths:?}")]
    NotSquare { rows: usize, lengths: Vec<usize> },
    #[error("basis is singular")]
    Singular,
    #[error("point has dimension {found}, lattice has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("quotient has {size} points, above the enumeration budget of {budget}")]
    BudgetExceeded { size: BigInt, budget: u64 },
    #[error("dimension {0} exceeds the exact enumeration limit of {MAX_ENUMERATION_DIM}")]
    DimensionTooLarge(usize),
    #[error("partition not applicable: n² = {n_sq} < (8ρ)^(2D)·γ_D^D = {threshold}")]
    NotApplicable { n_sq: String, threshold: String },
    #[error("locality radius must be positive")]
    NonPositiveRadius,
    #[error("coordinate does not fit in 64 bits")]
    Overflow,
}

/// A full-rank integer lattice given by a basis (rows).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct IntegerLattice {
    basis: IntMatrix,
    hnf: IntMatrix,
    det: BigInt,
}

/// JSON form `{"basis": [[...], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub basis: Vec<Vec<i64>>,
}

impl TryFrom<LatticeSpec> for IntegerLattice {
    type Error = LatticeError;

    fn try_from(spec: LatticeSpec) -> Result<Self, Self::Error> {
        IntegerLattice::new(&spec.basis)
    }
}

impl From<IntegerLattice> for LatticeSpec {
    fn from(l: IntegerLattice) -> Self {
        LatticeSpec { basis: l.basis_i64().expect("lattice basis entries fit in 64 bits") }
    }
}

impl IntegerLattice {
    pub fn new(basis: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::from_big(to_big(basis))
    }

    pub fn from_big(basis: IntMatrix) -> Result<Self, LatticeError> {
        let d = basis.len();
        if d == 0 || basis.iter().any(|r| r.len() != d) {
            return Err(LatticeError::NotSquare {
                rows: d,
                lengths: basis.iter().map(Vec::len).collect(),
            });
        }
        let det = determinant(&basis).abs();
        if det.is_zero() {
            return Err(LatticeError::Singular);
        }
        let (hnf, _) = hermite_normal_form(&basis);
        Ok(IntegerLattice { basis, hnf, det })
    }

    /// `ℤ^D` scaled coordinatewise: the lattice `d₁ℤ × … × d_Dℤ`.
    pub fn diagonal(diag: &[i64]) -> Result<Self, LatticeError> {
        let d = diag.len();
        let basis: Vec<Vec<i64>> = (0..d)
            .map(|i| (0..d).map(|j| if i == j { diag[i] } else { 0 }).collect())
            .collect();
        Self::new(&basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_i64(&self) -> Result<Vec<Vec<i64>>, LatticeError> {
        self.basis
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(LatticeError::Overflow)).collect())
            .collect()
    }

    /// Lower-triangular Hermite normal form of the basis.
    pub fn hnf(&self) -> &IntMatrix {
        &self.hnf
    }

    /// `n = |det Λ| = |ℤ^D/Λ|`.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    pub fn det_u64(&self) -> Option<u64> {
        self.det.to_u64()
    }

    fn check_dim(&self, len: usize) -> Result<(), LatticeError> {
        if len == self.dim() {
            Ok(())
        } else {
            Err(LatticeError::DimensionMismatch { expected: self.dim(), found: len })
        }
    }

    /// Canonical representative of `p + Λ`.
    pub fn reduce_big(&self, p: &[BigInt]) -> Result<Vec<BigInt>, LatticeError> {
        self.check_dim(p.len())?;
        let mut x = p.to_vec();
        for j in (0..self.dim()).rev() {
            let q = x[j].div_floor(&self.hnf[j][j]);
            if q.is_zero() {
                continue;
            }
            for (xi, hi) in x.iter_mut().zip(&self.hnf[j]).take(j + 1) {
                *xi -= &q * hi;
            }
        }
        Ok(x)
    }

    pub fn reduce(&self, p: &[i64]) -> Result<Vec<i64>, LatticeError> {
        let big: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        self.reduce_big(&big)?
            .iter()
            .map(|x| x.to_i64().ok_or(LatticeError::Overflow))
            .collect()
    }

    pub fn contains(&self, p: &[i64]) -> Result<bool, LatticeError> {
        Ok(self.reduce(p)?.iter().all(|&x| x == 0))
    }

    pub fn contains_big(&self, p: &[BigInt]) -> Result<bool, LatticeError> {
        Ok(self.reduce_big(p)?.iter().all(Zero::is_zero))
    }

    /// The canonical coset representatives, in lexicographic order.
    pub fn enumerate_quotient(&self) -> Result<Vec<Vec<i64>>, LatticeError> {
        self.enumerate_quotient_with_budget(DEFAULT_ENUMERATION_BUDGET)
    }

    pub fn enumerate_quotient_with_budget(&self, budget: u64) -> Result<Vec<Vec<i64>>, LatticeError> {
        let n = match self.det.to_u64() {
            Some(n) if n <= budget => n,
            _ => return Err(LatticeError::BudgetExceeded { size: self.det.clone(), budget }),
        };
        let diag: Vec<i64> = (0..self.dim())
            .map(|j| self.hnf[j][j].to_i64().expect("diagonal entries divide n"))
            .collect();
        let mut out = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; self.dim()];
        loop {
            out.push(cur.clone());
            let mut j = self.dim();
            loop {
                if j == 0 {
                    return Ok(out);
                }
                j -= 1;
                cur[j] += 1;
                if cur[j] < diag[j] {
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    /// Position of a canonical representative in [`Self::enumerate_quotient`].
    pub fn quotient_index(&self, canonical: &[i64]) -> Result<usize, LatticeError> {
        self.check_dim(canonical.len())?;
        let mut idx: u64 = 0;
        for (j, &x) in canonical.iter().enumerate() {
            let d = self.hnf[j][j].to_u64().ok_or(LatticeError::Overflow)?;
            idx = idx.checked_mul(d).ok_or(LatticeError::Overflow)? + x as u64;
        }
        usize::try_from(idx).map_err(|_| LatticeError::Overflow)
    }

    /// Exact squared distance between `p + Λ` and `q + Λ` in the quotient.
    pub fn quotient_distance_sq(&self, p: &[i64], q: &[i64]) -> Result<BigInt, LatticeError> {
        self.check_dim(p.len())?;
        self.check_dim(q.len())?;
        if self.dim() > MAX_ENUMERATION_DIM {
            return Err(LatticeError::DimensionTooLarge(self.dim()));
        }
        let t: Vec<BigInt> = p.iter().zip(q).map(|(a, b)| BigInt::from(*a) - BigInt::from(*b)).collect();
        Ok(reduction::closest_distance_sq(&self.basis, &t))
    }

    /// Shortest nonzero vector; ties go to the lexicographically smallest
    /// vector whose first nonzero coordinate is positive.
    pub fn shortest_vector(&self) -> Result<Vec<BigInt>, LatticeError> {
        if self.dim() > MAX_ENUMERATION_DIM {
            return Err(LatticeError::DimensionTooLarge(self.dim()));
        }
        Ok(reduction::shortest_vector(&self.basis))
    }

    /// `n·Λ*`, the dual lattice scaled by the determinant. It is integral and
    /// has basis `±adj(B)ᵀ`.
    pub fn scaled_dual(&self) -> IntegerLattice {
        let d = self.dim();
        let rb: Vec<Vec<BigRational>> =
            self.basis.iter().map(|r| reduction::to_rational(r)).collect();
        let inv = invert(&rb);
        let n = BigRational::from_integer(self.det.clone());
        // Row i of the dual basis is column i of B⁻¹.
        let dual: IntMatrix = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        let v = &inv[j][i] * &n;
                        assert!(v.is_integer());
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        IntegerLattice::from_big(dual).expect("dual of a full-rank lattice is full rank")
    }
}

fn invert(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let d = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..d).map(|j| if i == j { BigRational::from_integer(1.into()) } else { BigRational::zero() }));
            row
        })
        .collect();
    for c in 0..d {
        let p = (c..d).find(|&r| !a[r][c].is_zero()).expect("matrix is invertible");
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        for r in 0..d {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[d..].to_vec()).collect()
}

/// Kernel and image data of `φ: ℤ^s → ℤ_{d₁} × … × ℤ_{d_t}`, `x ↦ x·E mod d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomomorphismLattices {
    /// Basis (rows) of `ker φ ⊆ ℤ^s`; it has rank `s`.
    pub kernel: IntMatrix,
    /// Lower-triangular HNF of the image lattice `ℤ^s·E + dℤ^t ⊆ ℤ^t`; the
    /// identity exactly when `φ` is onto.
    pub image_hnf: IntMatrix,
    /// Row `i` is an `x` with `φ(x) ≡` row `i` of `image_hnf`.
    pub preimage: IntMatrix,
}

impl HomomorphismLattices {
    pub fn is_surjective(&self) -> bool {
        self.image_hnf
            .iter()
            .enumerate()
            .all(|(i, r)| r.iter().enumerate().all(|(j, x)| *x == BigInt::from((i == j) as i64)))
    }
}

/// One HNF of the stacked matrix `[E; diag(d)]` yields the kernel (top `s`
/// rows of the transform, restricted to the first `s` columns) and preimages
/// of the image generators (the remaining rows).
pub fn homomorphism_lattices(exponents: &[Vec<i64>], orders: &[u32]) -> HomomorphismLattices {
    let s = exponents.len();
    let t = orders.len();
    let mut stacked: IntMatrix = exponents
        .iter()
        .map(|r| {
            assert_eq!(r.len(), t, "exponent vectors must match the number of cyclic factors");
            r.iter().map(|&x| BigInt::from(x)).collect()
        })
        .collect();
    for (i, &d) in orders.iter().enumerate() {
        stacked.push((0..t).map(|j| if i == j { BigInt::from(d) } else { BigInt::zero() }).collect());
    }
    let (h, u) = hermite_normal_form(&stacked);
    HomomorphismLattices {
        kernel: u[..s].iter().map(|r| r[..s].to_vec()).collect(),
        image_hnf: h[s..].to_vec(),
        preimage: u[s..].iter().map(|r| r[..s].to_vec()).collect(),
    }
}

/// Slab partition of the quotient; errors when `n² < (8ρ)^{2D}·γ_D^D`.
pub fn build_partition(basis: GoodBasis, rho: BigRational) -> Result<ParallelotopePartition, LatticeError> {
    ParallelotopePartition::new(basis, rho)
}

/// Random full-rank lattice for property tests: `U₁ · diag(d) · U₂` where the
/// diagonal entries lie in `diag_range` and the unimodular factors are built
/// from at most `max_ops` elementary row additions with multipliers in
/// `[-3, 3]`. The determinant is the product of the diagonal.
pub fn random_lattice<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    diag_range: std::ops::RangeInclusive<i64>,
    max_ops: usize,
) -> IntegerLattice {
    loop {
        let diag: Vec<i64> = (0..dim).map(|_| rng.random_range(diag_range.clone())).collect();
        let total_ops = rng.random_range(0..=max_ops);
        let left_ops = rng.random_range(0..=total_ops);
        let left = random_unimodular(rng, dim, left_ops);
        let right = random_unimodular(rng, dim, total_ops - left_ops);
        let mut middle = normal_form::identity(dim);
        for (i, &d) in diag.iter().enumerate() {
            middle[i][i] = BigInt::from(d);
        }
        let basis = normal_form::mat_mul(&normal_form::mat_mul(&left, &middle), &right);
        let fits = basis.iter().flatten().all(|x| x.to_i64().is_some());
        if fits {
            return IntegerLattice::from_big(basis).expect("product of nonsingular factors");
        }
    }
}

fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, dim: usize, ops: usize) -> IntMatrix {
    let mut u = normal_form::identity(dim);
    if dim < 2 {
        if rng.random_bool(0.5) {
            u[0][0] = BigInt::from(-1);
        }
        return u;
    }
    for _ in 0..ops {
        let i = rng.random_range(0..dim);
        let mut j = rng.random_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        let c = loop {
            let c = rng.random_range(-3i64..=3);
            if c != 0 {
                break c;
            }
        };
        let source = u[j].clone();
        for (x, y) in u[i].iter_mut().zip(&source) {
            *x += BigInt::from(c) * y;
        }
    }
    u
}
