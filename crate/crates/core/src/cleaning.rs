//! Pauli operators in symplectic form, the cleaning lemma, and localization of
//! a logical operator inside one slab of a parallelotope partition.
//!
//! A Pauli operator on `N` qubits is a pair `(x | z)` of bit vectors with
//! phases dropped. Two operators commute iff `x_p·z_q + z_p·x_q = 0`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::code::CssCode;
use crate::embedding::QubitLayout;
use crate::f2::{BitMatrix, BitVec, Echelon};
use crate::lattice::{LatticeError, ParallelotopePartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CleaningError {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("check matrix must have an even number of columns, found {0}")]
    OddWidth(usize),
    #[error("stabilizer rows {0} and {1} anticommute")]
    NotCommuting(usize, usize),
    #[error("qubit {0} is out of range")]
    QubitOutOfRange(usize),
    #[error("operator is not a nontrivial logical")]
    NotLogical,
    #[error("a nontrivial logical operator is supported inside the region")]
    LogicalInRegion(Box<PauliOperator>),
    #[error("cleaning solver failed although the region hosts no logical")]
    SolverFailure,
    #[error("the code encodes no logical qubits")]
    NoLogicalQubits,
    #[error("partition is invalid for localization: μ = {mu}, needs μ even and λ ≥ 2ρ")]
    InvalidPartition { mu: u64 },
    #[error("stabilizer row {row} touches slabs {slabs:?}, which are not within two adjacent slabs")]
    SlabSpread { row: usize, slabs: Vec<usize> },
    #[error("factor on slab {0} does not commute with the stabilizers")]
    FactorDoesNotCommute(usize),
    #[error("localized operator violates its guarantee: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `(x | z)` with phases dropped.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "PauliRecord")]
pub struct PauliOperator {
    pub x: BitVec,
    pub z: BitVec,
}

#[derive(Serialize)]
struct PauliRecord {
    x: String,
    z: String,
    support: Vec<usize>,
    weight: usize,
}

impl From<PauliOperator> for PauliRecord {
    fn from(p: PauliOperator) -> Self {
        PauliRecord { x: p.x.to_bit_string(), z: p.z.to_bit_string(), support: p.support(), weight: p.weight() }
    }
}

impl std::fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Pauli(x={}, z={})", self.x.to_bit_string(), self.z.to_bit_string())
    }
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        PauliOperator { x: BitVec::zeros(n), z: BitVec::zeros(n) }
    }

    pub fn new(x: BitVec, z: BitVec) -> Result<Self, CleaningError> {
        if x.len() != z.len() {
            return Err(CleaningError::LengthMismatch { expected: x.len(), found: z.len() });
        }
        Ok(PauliOperator { x, z })
    }

    pub fn x_type(x: BitVec) -> Self {
        let z = BitVec::zeros(x.len());
        PauliOperator { x, z }
    }

    pub fn z_type(z: BitVec) -> Self {
        let x = BitVec::zeros(z.len());
        PauliOperator { x, z }
    }

    /// Splits a length-`2N` vector `(x | z)`.
    pub fn from_symplectic(v: &BitVec) -> Self {
        let n = v.len() / 2;
        PauliOperator { x: v.slice(0, n), z: v.slice(n, n) }
    }

    pub fn to_symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn support_mask(&self) -> BitVec {
        self.x.or(&self.z)
    }

    pub fn support(&self) -> Vec<usize> {
        self.support_mask().ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().weight()
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Product up to phase.
    pub fn mul(&self, other: &Self) -> Self {
        PauliOperator { x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }

    /// The operator with every qubit outside `mask` set to identity.
    pub fn restrict(&self, mask: &BitVec) -> Self {
        PauliOperator { x: self.x.and(mask), z: self.z.and(mask) }
    }

    pub fn is_supported_in(&self, mask: &BitVec) -> bool {
        self.support_mask().and_not(mask).is_zero()
    }
}

pub fn symplectic_commutes(p: &PauliOperator, q: &PauliOperator) -> Result<bool, CleaningError> {
    if p.num_qubits() != q.num_qubits() {
        return Err(CleaningError::LengthMismatch { expected: p.num_qubits(), found: q.num_qubits() });
    }
    Ok(p.x.dot(&q.z) == p.z.dot(&q.x))
}

/// A stabilizer code given by its check matrix `H = (A_X | A_Z)`.
#[derive(Debug, Clone)]
pub struct StabilizerCodeView {
    n: usize,
    h: BitMatrix,
    /// `(A_Z | A_X)`, so that `commute · (x|z)` lists the symplectic products.
    commute: BitMatrix,
    stabilizers: Echelon,
    css: Option<(BitMatrix, BitMatrix)>,
}

impl StabilizerCodeView {
    pub fn new(h: BitMatrix) -> Result<Self, CleaningError> {
        if !h.cols().is_multiple_of(2) {
            return Err(CleaningError::OddWidth(h.cols()));
        }
        let n = h.cols() / 2;
        let cols_x: Vec<usize> = (0..n).collect();
        let cols_z: Vec<usize> = (n..2 * n).collect();
        let ax = h.select_columns(&cols_x);
        let az = h.select_columns(&cols_z);
        let form = ax.mul(&az.transpose()).add(&az.mul(&ax.transpose()));
        if let Some((i, j)) = (0..h.rows()).flat_map(|i| (0..h.rows()).map(move |j| (i, j))).find(|&(i, j)| form.get(i, j)) {
            return Err(CleaningError::NotCommuting(i, j));
        }
        let commute = az.hstack(&ax);
        let stabilizers = Echelon::new(&h);
        Ok(StabilizerCodeView { n, h, commute, stabilizers, css: None })
    }

    /// `H = [[H_X, 0], [0, H_Z]]`, remembering the CSS structure for the
    /// sector-wise cleaning path.
    pub fn from_css(code: &CssCode) -> Self {
        let n = code.len();
        let hx = code.hx().hstack(&BitMatrix::zeros(code.hx().rows(), n));
        let hz = BitMatrix::zeros(code.hz().rows(), n).hstack(code.hz());
        let mut view = Self::new(hx.vstack(&hz)).expect("CSS checks commute");
        view.css = Some((code.hx().clone(), code.hz().clone()));
        view
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn check_matrix(&self) -> &BitMatrix {
        &self.h
    }

    pub fn is_css(&self) -> bool {
        self.css.is_some()
    }

    /// `k = N − rank H`.
    pub fn k(&self) -> usize {
        self.n - self.stabilizers.rank()
    }

    pub fn row_operator(&self, r: usize) -> PauliOperator {
        PauliOperator::from_symplectic(&self.h.row(r))
    }

    fn check_len(&self, p: &PauliOperator) -> Result<(), CleaningError> {
        if p.num_qubits() != self.n {
            return Err(CleaningError::LengthMismatch { expected: self.n, found: p.num_qubits() });
        }
        Ok(())
    }

    pub fn commutes_with_stabilizers(&self, p: &PauliOperator) -> Result<bool, CleaningError> {
        self.check_len(p)?;
        Ok(self.commute.mul_vec(&p.to_symplectic()).expect("lengths match").is_zero())
    }

    pub fn is_stabilizer(&self, p: &PauliOperator) -> Result<bool, CleaningError> {
        self.check_len(p)?;
        Ok(self.stabilizers.contains(&p.to_symplectic()).expect("lengths match"))
    }

    /// Commutes with every check and is not itself a stabilizer.
    pub fn is_logical(&self, p: &PauliOperator) -> Result<bool, CleaningError> {
        Ok(self.commutes_with_stabilizers(p)? && !self.is_stabilizer(p)?)
    }

    pub fn equivalent(&self, p: &PauliOperator, q: &PauliOperator) -> Result<bool, CleaningError> {
        self.is_stabilizer(&p.mul(q))
    }

    /// The first vector of the commutant basis that is not a stabilizer.
    pub fn first_logical(&self) -> Option<PauliOperator> {
        self.commute
            .nullspace_basis()
            .into_iter()
            .find(|v| !self.stabilizers.contains(v).expect("lengths match"))
            .map(|v| PauliOperator::from_symplectic(&v))
    }

    fn region_mask(&self, region: &[usize]) -> Result<BitVec, CleaningError> {
        if let Some(&q) = region.iter().find(|&&q| q >= self.n) {
            return Err(CleaningError::QubitOutOfRange(q));
        }
        Ok(BitVec::from_indices(self.n, region.iter().copied()))
    }

    /// A nontrivial logical supported in `region`, if any.
    pub fn logical_in_region(&self, region: &[usize]) -> Result<Option<PauliOperator>, CleaningError> {
        let qubits: Vec<usize> = self.region_mask(region)?.ones().collect();
        if qubits.is_empty() {
            return Ok(None);
        }
        let cols: Vec<usize> = qubits.iter().copied().chain(qubits.iter().map(|q| q + self.n)).collect();
        let local = self.commute.select_columns(&cols);
        for v in local.nullspace_basis() {
            let full = BitVec::from_indices(2 * self.n, v.ones().map(|i| cols[i]));
            if !self.stabilizers.contains(&full).expect("lengths match") {
                return Ok(Some(PauliOperator::from_symplectic(&full)));
            }
        }
        Ok(None)
    }

    /// Multiplies `op` by a stabilizer so that the result acts trivially on
    /// `region`. Both preconditions are verified first: `op` is a nontrivial
    /// logical and no nontrivial logical lives inside `region`.
    pub fn clean(&self, op: &PauliOperator, region: &[usize]) -> Result<PauliOperator, CleaningError> {
        self.clean_with(op, region, CleanPath::Auto)
    }

    pub fn clean_with(&self, op: &PauliOperator, region: &[usize], path: CleanPath) -> Result<PauliOperator, CleaningError> {
        if !self.is_logical(op)? {
            return Err(CleaningError::NotLogical);
        }
        if let Some(l) = self.logical_in_region(region)? {
            return Err(CleaningError::LogicalInRegion(Box::new(l)));
        }
        self.clean_unchecked(op, region, path)
    }

    fn clean_unchecked(&self, op: &PauliOperator, region: &[usize], path: CleanPath) -> Result<PauliOperator, CleaningError> {
        let mask = self.region_mask(region)?;
        let qubits: Vec<usize> = mask.ones().collect();
        if qubits.is_empty() {
            return Ok(op.clone());
        }
        let out = match (&self.css, path) {
            (Some((hx, hz)), CleanPath::Auto | CleanPath::Css) => {
                let sx = cancel_on(hx, &op.x, &qubits)?;
                let sz = cancel_on(hz, &op.z, &qubits)?;
                PauliOperator { x: op.x.xor(&sx), z: op.z.xor(&sz) }
            }
            _ => {
                let cols: Vec<usize> = qubits.iter().copied().chain(qubits.iter().map(|q| q + self.n)).collect();
                let s = cancel_on(&self.h, &op.to_symplectic(), &cols)?;
                op.mul(&PauliOperator::from_symplectic(&s))
            }
        };
        if !out.restrict(&mask).is_identity() {
            return Err(CleaningError::SolverFailure);
        }
        Ok(out)
    }
}

/// Which linear system `clean` solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CleanPath {
    /// The CSS path when the view came from a CSS code, else symplectic.
    Auto,
    Symplectic,
    /// Falls back to symplectic on non-CSS views.
    Css,
}

/// A sum of rows of `m` agreeing with `target` on `cols`. Only rows meeting
/// `cols` take part, so the result is supported near `cols`.
fn cancel_on(m: &BitMatrix, target: &BitVec, cols: &[usize]) -> Result<BitVec, CleaningError> {
    let local_target = target.select(cols);
    if local_target.is_zero() {
        return Ok(BitVec::zeros(m.cols()));
    }
    let col_mask = BitVec::from_indices(m.cols(), cols.iter().copied());
    let rows: Vec<usize> = (0..m.rows()).filter(|&r| m.row(r).intersects(&col_mask)).collect();
    let touching = m.select_rows(&rows);
    let y = touching
        .select_columns(cols)
        .solve(&local_target)
        .expect("lengths match")
        .ok_or(CleaningError::SolverFailure)?;
    Ok(touching.combine_rows(&y).expect("lengths match"))
}

pub fn logical_in_region(code: &StabilizerCodeView, region: &[usize]) -> Result<Option<PauliOperator>, CleaningError> {
    code.logical_in_region(region)
}

pub fn clean(code: &StabilizerCodeView, op: &PauliOperator, region: &[usize]) -> Result<PauliOperator, CleaningError> {
    code.clean(op, region)
}

/// How the localized operator was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizationStep {
    /// An odd slab already hosted a logical.
    OddSlab,
    /// Cleaned off every odd slab and factored over the even ones.
    CleanedAndFactored,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalizedLogical {
    pub slab: usize,
    pub operator: PauliOperator,
    pub weight: usize,
    /// Quotient points in the slab.
    pub slab_population: u64,
    /// `m · slab_population`.
    pub weight_limit: u64,
    pub step: LocalizationStep,
}

/// Finds a nontrivial logical supported in a single slab of `partition`.
///
/// Odd slabs (in zero-based numbering) are tried first. Otherwise the first
/// logical of the commutant is cleaned off each odd slab in ascending order,
/// and the first even-slab factor that is not a stabilizer is returned.
pub fn localize_logical(
    code: &StabilizerCodeView,
    partition: &ParallelotopePartition,
    layout: &QubitLayout,
) -> Result<LocalizedLogical, CleaningError> {
    let n = code.num_qubits();
    if layout.num_qubits() != n {
        return Err(CleaningError::LengthMismatch { expected: n, found: layout.num_qubits() });
    }
    let mu = partition.mu();
    let rho = partition.rho();
    let four = num_rational::BigRational::from_integer(4.into());
    if mu < 2 || !mu.is_multiple_of(2) || partition.lambda_sq() < &(four * rho * rho) {
        return Err(CleaningError::InvalidPartition { mu });
    }
    if code.k() == 0 {
        return Err(CleaningError::NoLogicalQubits);
    }
    let mu = mu as usize;
    let slab_of: Vec<usize> = layout.vertex_of_qubit.iter().map(|v| partition.slab_index(v)).collect();
    let mut slabs: Vec<Vec<usize>> = vec![Vec::new(); mu];
    for (q, &s) in slab_of.iter().enumerate() {
        slabs[s].push(q);
    }
    check_spread(code, &slab_of, mu)?;

    let odd: Vec<usize> = (1..mu).step_by(2).collect();
    let found = odd
        .par_iter()
        .map(|&s| code.logical_in_region(&slabs[s]).map(|l| l.map(|l| (s, l))))
        .find_first(|r| !matches!(r, Ok(None)));
    let (slab, operator, step) = match found {
        Some(r) => {
            let (s, l) = r?.expect("filtered to found operators");
            (s, l, LocalizationStep::OddSlab)
        }
        None => {
            let mut op = code.first_logical().ok_or(CleaningError::NoLogicalQubits)?;
            for &s in &odd {
                op = code.clean_unchecked(&op, &slabs[s], CleanPath::Auto)?;
            }
            let (s, f) = even_factor(code, &op, &slabs, n)?;
            (s, f, LocalizationStep::CleanedAndFactored)
        }
    };

    let population = partition.count_integral_points(slab)?;
    let weight_limit = layout.m as u64 * population;
    let mask = BitVec::from_indices(n, slabs[slab].iter().copied());
    if !code.is_logical(&operator)? {
        return Err(CleaningError::Postcondition("not a nontrivial logical".into()));
    }
    if !operator.is_supported_in(&mask) {
        return Err(CleaningError::Postcondition(format!("support leaves slab {slab}")));
    }
    if operator.weight() as u64 > weight_limit {
        return Err(CleaningError::Postcondition(format!("weight {} exceeds {weight_limit}", operator.weight())));
    }
    Ok(LocalizedLogical { slab, weight: operator.weight(), operator, slab_population: population, weight_limit, step })
}

/// Every check must touch at most two slabs, and two only if they are
/// cyclically adjacent.
fn check_spread(code: &StabilizerCodeView, slab_of: &[usize], mu: usize) -> Result<(), CleaningError> {
    for r in 0..code.check_matrix().rows() {
        let mut touched: Vec<usize> = code.row_operator(r).support().into_iter().map(|q| slab_of[q]).collect();
        touched.sort_unstable();
        touched.dedup();
        let ok = match touched.as_slice() {
            [] | [_] => true,
            &[a, b] => b - a == 1 || (a == 0 && b == mu - 1),
            _ => false,
        };
        if !ok {
            return Err(CleaningError::SlabSpread { row: r, slabs: touched });
        }
    }
    Ok(())
}

fn even_factor(
    code: &StabilizerCodeView,
    op: &PauliOperator,
    slabs: &[Vec<usize>],
    n: usize,
) -> Result<(usize, PauliOperator), CleaningError> {
    for (s, qubits) in slabs.iter().enumerate() {
        let mask = BitVec::from_indices(n, qubits.iter().copied());
        if s % 2 == 1 {
            if !op.restrict(&mask).is_identity() {
                return Err(CleaningError::SolverFailure);
            }
            continue;
        }
        let factor = op.restrict(&mask);
        if factor.is_identity() {
            continue;
        }
        if !code.commutes_with_stabilizers(&factor)? {
            return Err(CleaningError::FactorDoesNotCommute(s));
        }
        if !code.is_stabilizer(&factor)? {
            return Ok((s, factor));
        }
    }
    Err(CleaningError::Postcondition("every even-slab factor is a stabilizer".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_two_block, TwoBlockCode};
    use crate::embedding::{build_psi, qubit_layout};
    use crate::group::{FiniteAbelianGroup, GroupAlgebraElement};
    use crate::lattice::good_basis;
    use crate::realnum::int;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toric(l: i64) -> TwoBlockCode {
        let g = FiniteAbelianGroup::new(&[l, l]).unwrap();
        let el = |s: &[[i64; 2]]| GroupAlgebraElement::from_exponents(&g, &s.iter().map(|e| e.to_vec()).collect::<Vec<_>>()).unwrap();
        build_two_block(&el(&[[0, 0], [1, 0]]), &el(&[[0, 0], [0, 1]])).unwrap()
    }

    fn single(n: usize, q: usize, x: bool, z: bool) -> PauliOperator {
        let mut p = PauliOperator::identity(n);
        p.x.set(q, x);
        p.z.set(q, z);
        p
    }

    #[test]
    fn commutation_examples() {
        let x1 = single(3, 0, true, false);
        let z1 = single(3, 0, false, true);
        let z2 = single(3, 1, false, true);
        assert!(!symplectic_commutes(&x1, &z1).unwrap());
        assert!(symplectic_commutes(&x1, &z2).unwrap());
        assert!(symplectic_commutes(&z1, &z1).unwrap());
        assert!(symplectic_commutes(&x1, &PauliOperator::identity(4)).is_err());
        let y = single(3, 0, true, true);
        assert_eq!(y.weight(), 1);
        assert_eq!(PauliOperator::identity(3).weight(), 0);
    }

    #[test]
    fn rejects_anticommuting_checks() {
        let h = BitMatrix::from_dense(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0]]);
        assert_eq!(StabilizerCodeView::new(h).unwrap_err(), CleaningError::NotCommuting(0, 1));
    }

    #[test]
    fn region_logicals_on_toric() {
        let code = toric(3);
        let view = StabilizerCodeView::from_css(code.css());
        assert_eq!(view.k(), 2);
        let all: Vec<usize> = (0..18).collect();
        assert!(view.logical_in_region(&all).unwrap().is_some());
        assert!(view.logical_in_region(&[]).unwrap().is_none());

        // Column i = 0 of the torus: vertices (0, j), both qubits each.
        let column: Vec<usize> = (0..3).flat_map(|j| [j, 9 + j]).collect();
        let l = view.logical_in_region(&column).unwrap().expect("a column hosts a logical");
        assert!(view.is_logical(&l).unwrap());
        assert!(l.support().iter().all(|q| column.contains(q)));
        // Exhaustive minimum over the 2⁶·2⁶ operators on the column.
        let mut best = usize::MAX;
        for xs in 0u32..64 {
            for zs in 0u32..64 {
                let pick = |bits: u32| BitVec::from_indices(18, (0..6).filter(|i| bits >> i & 1 == 1).map(|i| column[i]));
                let p = PauliOperator { x: pick(xs), z: pick(zs) };
                if view.is_logical(&p).unwrap() {
                    best = best.min(p.weight());
                }
            }
        }
        assert_eq!(best, 3);
        // One vertex alone hosts nothing.
        assert!(view.logical_in_region(&[4, 13]).unwrap().is_none());
    }

    #[test]
    fn cleaning_examples() {
        let code = toric(3);
        let view = StabilizerCodeView::from_css(code.css());
        let logical = view.first_logical().unwrap();
        assert_eq!(view.clean(&logical, &[]).unwrap(), logical);

        let region = [0, 9, 1, 10];
        assert!(view.logical_in_region(&region).unwrap().is_none());
        for path in [CleanPath::Auto, CleanPath::Symplectic, CleanPath::Css] {
            let cleaned = view.clean_with(&logical, &region, path).unwrap();
            let mask = BitVec::from_indices(18, region);
            assert!(cleaned.restrict(&mask).is_identity());
            assert!(view.is_logical(&cleaned).unwrap());
            assert!(view.equivalent(&cleaned, &logical).unwrap());
        }

        let column: Vec<usize> = (0..3).flat_map(|j| [j, 9 + j]).collect();
        assert!(matches!(view.clean(&logical, &column), Err(CleaningError::LogicalInRegion(_))));
        let stab = view.row_operator(0);
        assert_eq!(view.clean(&stab, &region), Err(CleaningError::NotLogical));
    }

    #[test]
    fn general_view_matches_css_view() {
        let code = toric(4);
        let css = StabilizerCodeView::from_css(code.css());
        let general = StabilizerCodeView::new(css.check_matrix().clone()).unwrap();
        assert!(!general.is_css());
        let logical = css.first_logical().unwrap();
        let region: Vec<usize> = vec![0, 16, 5, 21];
        let a = css.clean(&logical, &region).unwrap();
        let b = general.clean(&logical, &region).unwrap();
        assert!(general.equivalent(&a, &b).unwrap());
        assert_eq!(css.logical_in_region(&region).unwrap().is_some(), general.logical_in_region(&region).unwrap().is_some());
    }

    #[test]
    fn toric_nine_localizes() {
        let code = toric(9);
        let psi = build_psi(code.a(), code.b()).unwrap();
        let layout = qubit_layout(&code, &psi).unwrap();
        let partition = ParallelotopePartition::new(good_basis(&layout.lattice).unwrap(), int(1)).unwrap();
        let view = StabilizerCodeView::from_css(code.css());
        let out = localize_logical(&view, &partition, &layout).unwrap();
        assert!(out.weight >= 9);
        assert!(out.weight as u64 <= 2 * out.slab_population);
        assert!(view.is_logical(&out.operator).unwrap());
    }

    #[test]
    fn small_partition_is_rejected_when_too_narrow() {
        let code = toric(3);
        let psi = build_psi(code.a(), code.b()).unwrap();
        let layout = qubit_layout(&code, &psi).unwrap();
        assert!(ParallelotopePartition::new_unchecked(good_basis(&layout.lattice).unwrap(), int(1)).is_err());
    }

    fn random_weight_five(rng: &mut ChaCha8Rng) -> Option<TwoBlockCode> {
        let orders: Vec<i64> = vec![rng.random_range(4..=12), rng.random_range(4..=12)];
        let g = FiniteAbelianGroup::new(&orders).unwrap();
        let n = g.order();
        let a = GroupAlgebraElement::from_support(&g, [0, rng.random_range(1..n), rng.random_range(1..n)]).ok()?;
        let b = GroupAlgebraElement::from_support(&g, [0, rng.random_range(1..n)]).ok()?;
        let code = build_two_block(&a, &b).ok()?;
        (code.weight() == 5).then_some(code)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn localization_invariants(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let Some(code) = random_weight_five(&mut rng) else { return Ok(()) };
            let Ok(psi) = build_psi(code.a(), code.b()) else { return Ok(()) };
            let Ok(layout) = qubit_layout(&code, &psi) else { return Ok(()) };
            let Ok(partition) = ParallelotopePartition::new_unchecked(good_basis(&layout.lattice).unwrap(), int(1)) else { return Ok(()) };
            let view = StabilizerCodeView::from_css(code.css());
            if view.k() == 0 {
                return Ok(());
            }
            let out = localize_logical(&view, &partition, &layout).unwrap();
            prop_assert!(view.is_logical(&out.operator).unwrap());
            prop_assert!(out.weight as u64 <= out.weight_limit);
            prop_assert_eq!(out.weight, out.operator.weight());
            let slab_of = |q: usize| partition.slab_index(&layout.vertex_of_qubit[q]);
            prop_assert!(out.operator.support().iter().all(|&q| slab_of(q) == out.slab));
        }
    }
}
