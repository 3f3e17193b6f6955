//! Bases whose first `D−1` vectors span a minimal-volume hyperplane
//! sublattice, and the slab partition of the quotient they induce.
//!
//! The hyperplane is `v*⊥` for a shortest vector `v*` of the dual lattice:
//! every primitive hyperplane sublattice `Λ ∩ y⊥` with `y ∈ Λ*` primitive has
//! volume `n·‖y‖`, so minimizing `‖y‖` minimizes the volume. We work with
//! `v' = n·v*`, a vector of the integral lattice `n·Λ*`, so the squared
//! hyperplane volume is the integer `‖v'‖²` and `‖u*_D‖² = n²/‖v'‖²`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::normal_form::{dot, smith_normal_form, vec_mat, IntMatrix};
use super::reduction::{lll, round, GramSchmidt};
use super::{IntegerLattice, LatticeError, MAX_ENUMERATION_DIM};
use crate::bound::{applicability_threshold, hermite};
use crate::realnum::{self, format_rational};

#[derive(Debug, Clone)]
pub struct GoodBasis {
    lattice: IntegerLattice,
    vectors: IntMatrix,
    gram_schmidt: GramSchmidt,
    hyperplane_vol_sq: BigRational,
    last_len_sq: BigRational,
    dual_vector: Vec<BigInt>,
    normal: Vec<BigInt>,
    normal_scale: BigInt,
}

/// Result of checking the three defining inequalities of a good basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GoodBasisChecks {
    /// `Π‖u*ᵢ‖² = n²`.
    pub volume_factorization: bool,
    /// `vol(u₁…u_{D−1})^{2D} ≤ γ_D^D·n^{2(D−1)}`.
    pub hyperplane_bound: bool,
    /// `‖u*_D‖^{2D}·γ_D^D ≥ n²`.
    pub last_length_bound: bool,
}

impl GoodBasisChecks {
    pub fn all(&self) -> bool {
        self.volume_factorization && self.hyperplane_bound && self.last_length_bound
    }
}

pub fn good_basis(lattice: &IntegerLattice) -> Result<GoodBasis, LatticeError> {
    let d = lattice.dim();
    if d > MAX_ENUMERATION_DIM {
        return Err(LatticeError::DimensionTooLarge(d));
    }
    let n = lattice.det().clone();
    let dual = lattice.scaled_dual();
    let v = dual.shortest_vector()?;

    // Coefficients cᵢ = ⟨bᵢ, v*⟩ = ⟨bᵢ, v'⟩/n are coprime integers because v*
    // is primitive in Λ*. A unimodular U with U·c = (1, 0, …, 0)ᵀ·(±1) gives
    // a basis U·B of Λ whose rows 1… are orthogonal to v* and whose row 0 has
    // unit pairing with it.
    let c: Vec<BigInt> = lattice
        .basis()
        .iter()
        .map(|b| {
            let p = dot(b, &v);
            debug_assert!(p.is_multiple_of(&n));
            p / &n
        })
        .collect();
    let column: IntMatrix = c.iter().map(|x| vec![x.clone()]).collect();
    let (s, u, _) = smith_normal_form(&column);
    debug_assert!(s[0][0].is_one());

    let rows: Vec<Vec<BigInt>> = u.iter().map(|r| vec_mat(r, lattice.basis())).collect();
    let mut hyper: Vec<Vec<BigInt>> = lll(&rows[1..]);
    let mut last = rows[0].clone();
    if !hyper.is_empty() {
        // Size-reduce the completing vector against the hyperplane part.
        let gs = GramSchmidt::new(&hyper);
        for j in (0..hyper.len()).rev() {
            let lr = super::reduction::to_rational(&last);
            let m = lr.iter().zip(&gs.vectors[j]).map(|(a, b)| a * b).sum::<BigRational>() / &gs.norms_sq[j];
            let q = round(&m);
            if !q.is_zero() {
                for (x, y) in last.iter_mut().zip(&hyper[j]) {
                    *x -= &q * y;
                }
            }
        }
    }
    hyper.push(last);
    let vectors = hyper;
    let gram_schmidt = GramSchmidt::new(&vectors);
    let hyperplane_vol_sq = gram_schmidt.norms_sq[..d - 1].iter().fold(BigRational::one(), |a, x| a * x);
    let last_len_sq = gram_schmidt.norms_sq[d - 1].clone();

    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut normal: Vec<BigInt> = v.iter().map(|x| x / &g).collect();
    let mut normal_scale = dot(&vectors[d - 1], &normal);
    if normal_scale.is_negative() {
        normal.iter_mut().for_each(|x| *x = -&*x);
        normal_scale = -normal_scale;
    }

    Ok(GoodBasis {
        lattice: lattice.clone(),
        vectors,
        gram_schmidt,
        hyperplane_vol_sq,
        last_len_sq,
        dual_vector: v,
        normal,
        normal_scale,
    })
}

impl GoodBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn lattice(&self) -> &IntegerLattice {
        &self.lattice
    }

    /// Basis rows `u₁ … u_D`.
    pub fn vectors(&self) -> &IntMatrix {
        &self.vectors
    }

    pub fn gram_schmidt(&self) -> &GramSchmidt {
        &self.gram_schmidt
    }

    /// Squared volume of the sublattice spanned by `u₁ … u_{D−1}`.
    pub fn hyperplane_vol_sq(&self) -> &BigRational {
        &self.hyperplane_vol_sq
    }

    /// `ℓ² = ‖u*_D‖²`.
    pub fn last_len_sq(&self) -> &BigRational {
        &self.last_len_sq
    }

    /// Shortest vector of `n·Λ*` defining the hyperplane.
    pub fn dual_vector(&self) -> &[BigInt] {
        &self.dual_vector
    }

    pub fn n(&self) -> &BigInt {
        self.lattice.det()
    }

    /// The last coordinate `x_D` of `p` in the basis `u₁ … u_D`.
    pub fn last_coordinate(&self, p: &[BigInt]) -> BigRational {
        BigRational::new(dot(p, &self.normal), self.normal_scale.clone())
    }

    pub fn checks(&self) -> GoodBasisChecks {
        let d = self.dim();
        let n = BigRational::from_integer(self.n().clone());
        let n_sq = &n * &n;
        let gamma = hermite(d);
        let gamma = gamma.gamma_pow_dim();
        GoodBasisChecks {
            volume_factorization: self.gram_schmidt.volume_sq() == n_sq,
            hyperplane_bound: num_traits::pow(self.hyperplane_vol_sq.clone(), d)
                <= gamma * num_traits::pow(n_sq.clone(), d - 1),
            last_length_bound: num_traits::pow(self.last_len_sq.clone(), d) * gamma >= n_sq,
        }
    }
}

/// Splits `ℝ^D/Λ` into `μ` slabs `T_k = {x_D mod 1 ∈ [k/μ, (k+1)/μ)}` of
/// width `λ = ℓ/μ` along `u*_D`.
#[derive(Debug, Clone)]
pub struct ParallelotopePartition {
    basis: GoodBasis,
    rho: BigRational,
    mu: u64,
    lambda_sq: BigRational,
}

impl ParallelotopePartition {
    /// Refuses inputs outside `n² ≥ (8ρ)^{2D}·γ_D^D`.
    pub fn new(basis: GoodBasis, rho: BigRational) -> Result<Self, LatticeError> {
        if !rho.is_positive() {
            return Err(LatticeError::NonPositiveRadius);
        }
        let d = basis.dim();
        let n = basis.n().clone();
        let n_sq = BigRational::from_integer(&n * &n);
        let threshold = applicability_threshold(&rho, d);
        if n_sq < threshold {
            return Err(LatticeError::NotApplicable {
                n_sq: format_rational(&n_sq),
                threshold: format_rational(&threshold),
            });
        }
        Self::build(basis, rho)
    }

    /// Builds the partition whenever `ℓ ≥ 4ρ`, without the applicability
    /// test. Used to inspect lattices that are too small for the bound.
    pub fn new_unchecked(basis: GoodBasis, rho: BigRational) -> Result<Self, LatticeError> {
        if !rho.is_positive() {
            return Err(LatticeError::NonPositiveRadius);
        }
        Self::build(basis, rho)
    }

    fn build(basis: GoodBasis, rho: BigRational) -> Result<Self, LatticeError> {
        let two_rho = BigRational::from_integer(BigInt::from(2)) * &rho;
        let t = realnum::floor_sqrt(&(basis.last_len_sq() / (&two_rho * &two_rho)));
        let t = t.to_u64().ok_or(LatticeError::Overflow)?;
        let mu = if t % 2 == 0 { t } else { t - 1 };
        if mu < 2 {
            return Err(LatticeError::NotApplicable {
                n_sq: format_rational(&BigRational::from_integer(basis.n() * basis.n())),
                threshold: format_rational(&applicability_threshold(&rho, basis.dim())),
            });
        }
        let mu_sq = BigRational::from_integer(BigInt::from(mu * mu));
        let lambda_sq = basis.last_len_sq() / mu_sq;
        Ok(ParallelotopePartition { basis, rho, mu, lambda_sq })
    }

    pub fn basis(&self) -> &GoodBasis {
        &self.basis
    }

    pub fn rho(&self) -> &BigRational {
        &self.rho
    }

    pub fn mu(&self) -> u64 {
        self.mu
    }

    /// `λ² = ℓ²/μ²`.
    pub fn lambda_sq(&self) -> &BigRational {
        &self.lambda_sq
    }

    /// `μ` even and at least 2, and `2ρ ≤ λ < 4ρ`, checked on squares.
    pub fn width_checks(&self) -> bool {
        let four_rho_sq = BigRational::from_integer(BigInt::from(4)) * &self.rho * &self.rho;
        let sixteen_rho_sq = BigRational::from_integer(BigInt::from(16)) * &self.rho * &self.rho;
        self.mu.is_multiple_of(2) && self.mu >= 2 && self.lambda_sq >= four_rho_sq && self.lambda_sq < sixteen_rho_sq
    }

    /// Slab index of a quotient point; any representative of the coset gives
    /// the same answer.
    pub fn slab_index(&self, p: &[i64]) -> usize {
        let big: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
        self.slab_index_big(&big)
    }

    pub fn slab_index_big(&self, p: &[BigInt]) -> usize {
        let q = &self.basis.normal_scale;
        let r = dot(p, &self.basis.normal).mod_floor(q);
        let k = (r * BigInt::from(self.mu)).div_floor(q);
        k.to_usize().expect("slab index is below μ")
    }

    /// Number of quotient points in every slab.
    pub fn slab_counts(&self) -> Result<Vec<u64>, LatticeError> {
        let mut counts = vec![0u64; self.mu as usize];
        for p in self.basis.lattice.enumerate_quotient()? {
            counts[self.slab_index(&p)] += 1;
        }
        Ok(counts)
    }

    pub fn count_integral_points(&self, k: usize) -> Result<u64, LatticeError> {
        Ok(self.slab_counts()?.get(k).copied().unwrap_or(0))
    }

    /// Exact test of `count ≤ (n/ℓ)(λ + √D) = n/μ + n√D/ℓ`.
    pub fn integral_point_bound_holds(&self, count: u64) -> bool {
        let n = BigRational::from_integer(self.basis.n().clone());
        let excess = BigRational::from_integer(BigInt::from(count)) - &n / BigRational::from_integer(self.mu.into());
        if !excess.is_positive() {
            return true;
        }
        let d = BigRational::from_integer(BigInt::from(self.basis.dim()));
        &excess * &excess * self.basis.last_len_sq() <= &n * &n * d
    }

    /// Rational brackets of `(n/ℓ)(λ + √D)` with width at most `2^-bits·n`.
    pub fn integral_point_bound_bracket(&self, bits: u32) -> (BigRational, BigRational) {
        let n = BigRational::from_integer(self.basis.n().clone());
        let base = &n / BigRational::from_integer(self.mu.into());
        let ratio = BigRational::from_integer(BigInt::from(self.basis.dim())) / self.basis.last_len_sq();
        let (lo, hi) = realnum::root_bracket(&ratio, 2, bits);
        (&base + &n * lo, base + n * hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::random_lattice;
    use crate::realnum::{int, rat};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn square_lattice_24() {
        let l = IntegerLattice::diagonal(&[24, 24]).unwrap();
        let g = good_basis(&l).unwrap();
        assert_eq!(g.hyperplane_vol_sq(), &int(576));
        assert_eq!(g.last_len_sq(), &int(576));
        assert!(g.checks().all());
        let p = ParallelotopePartition::new(g, int(1)).unwrap();
        assert_eq!(p.mu(), 12);
        assert_eq!(p.lambda_sq(), &int(4));
        assert!(p.width_checks());
        assert_eq!(p.slab_index(&[0, 0]), 0);
        let counts = p.slab_counts().unwrap();
        assert_eq!(counts, vec![48; 12]);
        assert!(counts.iter().all(|&c| p.integral_point_bound_holds(c)));
        let (lo, hi) = p.integral_point_bound_bracket(64);
        assert!(lo > int(81) && hi < int(82));
    }

    #[test]
    fn slab_of_0_13_in_24z_squared() {
        let l = IntegerLattice::diagonal(&[24, 24]).unwrap();
        let p = ParallelotopePartition::new(good_basis(&l).unwrap(), int(1)).unwrap();
        // The tie-broken dual vector is (0, 24), so the slabs run along y.
        assert_eq!(p.basis().dual_vector(), &big(&[0, 24])[..]);
        assert_eq!(p.basis().last_coordinate(&big(&[0, 13])), rat(13, 24));
        assert_eq!(p.slab_index(&[0, 13]), 6);
        assert_eq!(p.slab_index(&[5, 13 + 24]), 6);
    }

    #[test]
    fn z_times_nz() {
        for n in [5i64, 12, 100] {
            let l = IntegerLattice::diagonal(&[1, n]).unwrap();
            let g = good_basis(&l).unwrap();
            assert_eq!(g.vectors()[0].iter().map(|x| x.abs()).collect::<Vec<_>>(), big(&[1, 0]));
            assert_eq!(g.last_len_sq(), &int(n * n));
            assert_eq!(g.hyperplane_vol_sq(), &int(1));
        }
        let l = IntegerLattice::diagonal(&[1, 100]).unwrap();
        let p = ParallelotopePartition::new(good_basis(&l).unwrap(), int(1)).unwrap();
        let per = 100.0 / p.mu() as f64;
        for c in p.slab_counts().unwrap() {
            assert!((c as f64 - per).abs() <= 1.0);
        }
    }

    #[test]
    fn width_rule_for_length_14() {
        // ℓ = 14 via ℤ × 14ℤ; partition checks do not need applicability here.
        let l = IntegerLattice::diagonal(&[1, 14]).unwrap();
        let p = ParallelotopePartition::new_unchecked(good_basis(&l).unwrap(), int(1)).unwrap();
        assert_eq!(p.mu(), 6);
        assert_eq!(p.lambda_sq(), &rat(49, 9));
        assert!(p.width_checks());
    }

    #[test]
    fn small_quotient_is_not_applicable() {
        let l = IntegerLattice::diagonal(&[3, 3]).unwrap();
        let e = ParallelotopePartition::new(good_basis(&l).unwrap(), int(1)).unwrap_err();
        assert!(matches!(e, LatticeError::NotApplicable { .. }));
    }

    #[test]
    fn one_dimensional_lattice() {
        let l = IntegerLattice::new(&[vec![-20]]).unwrap();
        let g = good_basis(&l).unwrap();
        assert_eq!(g.last_len_sq(), &int(400));
        assert_eq!(g.hyperplane_vol_sq(), &int(1));
        assert!(g.checks().all());
        let p = ParallelotopePartition::new(g, int(1)).unwrap();
        assert_eq!(p.mu(), 10);
        assert_eq!(p.slab_counts().unwrap(), vec![2; 10]);
    }

    #[test]
    fn random_lattices_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for dim in 2..=4 {
            for _ in 0..15 {
                let l = random_lattice(&mut rng, dim, 1..=20, 30);
                let g = good_basis(&l).unwrap();
                assert!(g.checks().all(), "{:?}", l.basis());
                assert_eq!(g.hyperplane_vol_sq(), &BigRational::from_integer(dot(g.dual_vector(), g.dual_vector())));
                let rebuilt = IntegerLattice::from_big(g.vectors().clone()).unwrap();
                assert_eq!(rebuilt.hnf(), l.hnf());
                for (i, u) in g.vectors()[..dim - 1].iter().enumerate() {
                    assert!(dot(u, g.dual_vector()).is_zero(), "row {i} leaves the hyperplane");
                }
            }
        }
    }
}
