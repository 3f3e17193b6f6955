//! Embedding a 2BGA code on a lattice quotient `ℤ^D/Λ`.
//!
//! For a normalized code, the non-identity support elements
//! `g_{a₁} … g_{a_r}, g_{b₁} … g_{b_s}` define `Ψ: ℤ^{r+s} → G`,
//! `εᵢ ↦ gᵢ`. When `Ψ` is onto, `ℤ^D/ker Ψ ≅ G` with `D = r + s = w − 2`,
//! and qubits `j` and `n + j` are placed on the vertex `Ψ̄⁻¹(g_j)`. Every check
//! then fits in a ball of radius 1 around its own group element: X checks
//! reach `center − εᵢ`, Z checks reach `center + εᵢ`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CssCode, TwoBlockCode};
use crate::f2::BitMatrix;
use crate::group::{FiniteAbelianGroup, GroupAlgebraElement};
use crate::lattice::{homomorphism_lattices, HomomorphismLattices, IntegerLattice, LatticeError};
use crate::realnum::ExactRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmbeddingError {
    #[error("the identity must lie in the supports of both a and b")]
    NotNormalized,
    #[error("a and b belong to different groups")]
    GroupMismatch,
    #[error("Ψ is not surjective: its image has index {index} in G")]
    NotSurjective { index: BigInt },
    #[error("Ψ has no generators (D = 0), so there is no lattice to embed into")]
    ZeroDimension,
    #[error("layout has {found} vertices, code has {expected} qubits")]
    LayoutSize { expected: usize, found: usize },
    #[error("row-centered locality needs one check per vertex: {rows} rows for {vertices} vertices")]
    RowCountMismatch { rows: usize, vertices: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// `Ψ: ℤ^D → G`.
#[derive(Debug, Clone)]
pub struct PsiMap {
    group: FiniteAbelianGroup,
    generators: Vec<usize>,
    hom: Option<HomomorphismLattices>,
}

/// Generators: non-identity support of `a`, then of `b`, each in group
/// enumeration order. An element in both supports appears twice.
pub fn build_psi(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<PsiMap, EmbeddingError> {
    if a.group() != b.group() {
        return Err(EmbeddingError::GroupMismatch);
    }
    let group = a.group().clone();
    let e = group.identity();
    if !a.contains(e) || !b.contains(e) {
        return Err(EmbeddingError::NotNormalized);
    }
    let generators: Vec<usize> =
        a.support().iter().chain(b.support()).copied().filter(|&g| g != e).collect();
    let hom = (!generators.is_empty()).then(|| {
        let exps: Vec<Vec<i64>> = generators
            .iter()
            .map(|&g| group.exponents(g).into_iter().map(i64::from).collect())
            .collect();
        homomorphism_lattices(&exps, group.cyclic_orders())
    });
    Ok(PsiMap { group, generators, hom })
}

impl PsiMap {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// `D = r + s`.
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    /// `Ψ(x)` as a group element index.
    pub fn apply(&self, x: &[i64]) -> usize {
        assert_eq!(x.len(), self.dim());
        let mut acc = vec![0i64; self.group.rank()];
        for (&c, &g) in x.iter().zip(&self.generators) {
            for (a, e) in acc.iter_mut().zip(self.group.exponents(g)) {
                *a += c * i64::from(e);
            }
        }
        self.group.index_of_reduced(&acc)
    }

    /// `[G : im Ψ]`.
    pub fn image_index(&self) -> BigInt {
        match &self.hom {
            Some(h) => h.image_hnf.iter().enumerate().map(|(i, r)| r[i].clone()).product(),
            None => BigInt::from(self.group.order()),
        }
    }

    pub fn is_surjective(&self) -> bool {
        match &self.hom {
            Some(h) => h.is_surjective(),
            None => self.group.order() == 1,
        }
    }

    fn onto(&self) -> Result<&HomomorphismLattices, EmbeddingError> {
        let hom = self.hom.as_ref().ok_or(EmbeddingError::ZeroDimension)?;
        if !hom.is_surjective() {
            return Err(EmbeddingError::NotSurjective { index: self.image_index() });
        }
        Ok(hom)
    }

    /// `Λ = ker Ψ`; it has determinant `n` when `Ψ` is onto.
    pub fn kernel_lattice(&self) -> Result<IntegerLattice, EmbeddingError> {
        let hom = self.onto()?;
        Ok(IntegerLattice::from_big(hom.kernel.clone())?)
    }

    /// Some `x` with `Ψ(x) = g` (not reduced).
    pub fn preimage(&self, g: usize) -> Result<Vec<i64>, EmbeddingError> {
        let hom = self.onto()?;
        let exps = self.group.exponents(g);
        let mut x = vec![BigInt::from(0); self.dim()];
        for (e, row) in exps.iter().zip(&hom.preimage) {
            for (xi, p) in x.iter_mut().zip(row) {
                *xi += BigInt::from(*e) * p;
            }
        }
        x.into_iter().map(|v| v.to_i64().ok_or(EmbeddingError::Lattice(LatticeError::Overflow))).collect()
    }
}

pub fn is_surjective(psi: &PsiMap) -> bool {
    psi.is_surjective()
}

pub fn kernel_lattice(psi: &PsiMap) -> Result<IntegerLattice, EmbeddingError> {
    psi.kernel_lattice()
}

/// Qubits placed on vertices of `ℤ^D/Λ`, `m` per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    pub lattice: IntegerLattice,
    /// Canonical coset representative carrying each qubit.
    pub vertex_of_qubit: Vec<Vec<i64>>,
    /// Qubits per vertex.
    pub m: usize,
}

impl QubitLayout {
    /// A layout for an arbitrary code; the vertices are reduced to canonical
    /// representatives.
    pub fn new(lattice: IntegerLattice, vertices: &[Vec<i64>], m: usize) -> Result<Self, EmbeddingError> {
        let vertex_of_qubit = vertices.iter().map(|v| lattice.reduce(v)).collect::<Result<Vec<_>, _>>()?;
        Ok(QubitLayout { lattice, vertex_of_qubit, m })
    }

    pub fn num_qubits(&self) -> usize {
        self.vertex_of_qubit.len()
    }

    /// Qubits grouped by vertex in quotient enumeration order.
    pub fn qubits_per_vertex(&self) -> Result<Vec<Vec<usize>>, EmbeddingError> {
        let n = self.lattice.det_u64().ok_or(LatticeError::Overflow)? as usize;
        let mut out = vec![Vec::new(); n];
        for (q, v) in self.vertex_of_qubit.iter().enumerate() {
            out[self.lattice.quotient_index(v)?].push(q);
        }
        Ok(out)
    }
}

/// Places qubits `j` and `n + j` on the canonical representative of
/// `Ψ̄⁻¹(g_j)`.
pub fn qubit_layout(code: &TwoBlockCode, psi: &PsiMap) -> Result<QubitLayout, EmbeddingError> {
    let lattice = psi.kernel_lattice()?;
    let n = code.n();
    let mut vertices = Vec::with_capacity(n);
    for g in code.group().elements() {
        vertices.push(lattice.reduce(&psi.preimage(g)?)?);
    }
    let vertex_of_qubit: Vec<Vec<i64>> = vertices.iter().chain(vertices.iter()).cloned().collect();
    Ok(QubitLayout { lattice, vertex_of_qubit, m: 2 })
}

/// How the center of a check's ball is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterMode {
    /// Row `i` is centered at the vertex of qubit `i`, as for 2BGA codes.
    RowVertex,
    /// The support vertex minimizing the row's radius.
    BestSupportVertex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub holds: bool,
    pub rho: ExactRational,
    /// Largest squared quotient distance from a check's center to its support.
    pub max_radius_sq: ExactRational,
    /// `("X" | "Z", row)` attaining the maximum.
    pub worst_row: Option<(String, usize)>,
}

/// Checks that every row of `H_X` and `H_Z` lies within quotient distance
/// `ρ` of its center.
pub fn verify_locality(
    code: &CssCode,
    layout: &QubitLayout,
    rho: &BigRational,
    center: CenterMode,
) -> Result<LocalityReport, EmbeddingError> {
    if layout.num_qubits() != code.len() {
        return Err(EmbeddingError::LayoutSize { expected: code.len(), found: layout.num_qubits() });
    }
    let mut rows: Vec<(&'static str, usize, Vec<usize>)> = Vec::new();
    for (name, m) in [("X", code.hx()), ("Z", code.hz())] {
        if center == CenterMode::RowVertex && m.rows() > layout.num_qubits() {
            return Err(EmbeddingError::RowCountMismatch { rows: m.rows(), vertices: layout.num_qubits() });
        }
        rows.extend(row_supports(m).into_iter().enumerate().map(|(i, s)| (name, i, s)));
    }
    let lattice = &layout.lattice;
    let verts = &layout.vertex_of_qubit;

    // Distances depend only on the reduced difference of the two vertices.
    let mut diffs: HashMap<Vec<i64>, Option<BigInt>> = HashMap::new();
    let centers_of = |i: usize, support: &[usize]| -> Vec<usize> {
        match center {
            CenterMode::RowVertex => vec![i],
            CenterMode::BestSupportVertex => support.to_vec(),
        }
    };
    let diff = |p: &[i64], q: &[i64]| -> Result<Vec<i64>, LatticeError> {
        let d: Vec<i64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        lattice.reduce(&d)
    };
    for (_, i, support) in &rows {
        for c in centers_of(*i, support) {
            for &q in support {
                diffs.entry(diff(&verts[q], &verts[c])?).or_insert(None);
            }
        }
    }
    let keys: Vec<Vec<i64>> = diffs.keys().cloned().collect();
    let zero = vec![0i64; lattice.dim()];
    let values: Vec<BigInt> = keys
        .par_iter()
        .map(|k| lattice.quotient_distance_sq(k, &zero))
        .collect::<Result<_, _>>()?;
    for (k, v) in keys.into_iter().zip(values) {
        diffs.insert(k, Some(v));
    }
    let lookup = |p: &[i64], q: &[i64]| -> BigInt {
        diffs[&diff(p, q).expect("reduced before")].clone().expect("computed")
    };

    let mut max: Option<(BigInt, String, usize)> = None;
    for (name, i, support) in &rows {
        if support.is_empty() {
            continue;
        }
        let radius = centers_of(*i, support)
            .into_iter()
            .map(|c| support.iter().map(|&q| lookup(&verts[q], &verts[c])).max().expect("nonempty"))
            .min()
            .expect("at least one center");
        if max.as_ref().is_none_or(|(m, _, _)| radius > *m) {
            max = Some((radius, name.to_string(), *i));
        }
    }
    let (max_sq, worst) = match max {
        Some((m, name, i)) => (m, Some((name, i))),
        None => (BigInt::from(0), None),
    };
    let max_sq = BigRational::from_integer(max_sq);
    Ok(LocalityReport {
        holds: max_sq <= rho * rho,
        rho: ExactRational(rho.clone()),
        max_radius_sq: ExactRational(max_sq),
        worst_row: worst,
    })
}

fn row_supports(m: &BitMatrix) -> Vec<Vec<usize>> {
    (0..m.rows()).map(|r| m.row(r).ones().collect()).collect()
}

/// `Ψ(x)` for every vertex `x` of the layout equals the group element of its
/// qubit.
pub fn layout_is_consistent(code: &TwoBlockCode, psi: &PsiMap, layout: &QubitLayout) -> bool {
    let n = code.n();
    layout.vertex_of_qubit.len() == 2 * n
        && (0..n).all(|j| {
            psi.apply(&layout.vertex_of_qubit[j]) == j && layout.vertex_of_qubit[j] == layout.vertex_of_qubit[n + j]
        })
}

/// `[G : ⟨generators⟩]` by direct subgroup closure.
pub fn closure_index(group: &FiniteAbelianGroup, generators: &[usize]) -> usize {
    group.order() / group.subgroup_closure(generators).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_two_block;
    use crate::realnum::int;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn elem(g: &FiniteAbelianGroup, exps: &[&[i64]]) -> GroupAlgebraElement {
        GroupAlgebraElement::from_exponents(g, &exps.iter().map(|e| e.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn toric(l: i64) -> TwoBlockCode {
        let g = FiniteAbelianGroup::new(&[l, l]).unwrap();
        build_two_block(&elem(&g, &[&[0, 0], &[1, 0]]), &elem(&g, &[&[0, 0], &[0, 1]])).unwrap()
    }

    #[test]
    fn toric_psi_and_layout() {
        let code = toric(3);
        let psi = build_psi(code.a(), code.b()).unwrap();
        assert_eq!(psi.generators(), &[3, 1]);
        assert_eq!(psi.dim(), 2);
        assert!(psi.is_surjective());
        let l = psi.kernel_lattice().unwrap();
        assert_eq!(l.hnf(), IntegerLattice::diagonal(&[3, 3]).unwrap().hnf());
        let layout = qubit_layout(&code, &psi).unwrap();
        // g = x^i y^j ↦ (i, j).
        for g in code.group().elements() {
            let e = code.group().exponents(g);
            assert_eq!(layout.vertex_of_qubit[g], vec![i64::from(e[0]), i64::from(e[1])]);
        }
        assert_eq!(layout.vertex_of_qubit[0], vec![0, 0]);
        assert!(layout_is_consistent(&code, &psi, &layout));
        assert!(layout.qubits_per_vertex().unwrap().iter().all(|q| q.len() == 2));
        let rep = verify_locality(code.css(), &layout, &int(1), CenterMode::RowVertex).unwrap();
        assert!(rep.holds);
        assert_eq!(rep.max_radius_sq.0, int(1));
    }

    #[test]
    fn toric_x_check_reaches_minus_unit_vectors() {
        let code = toric(4);
        let psi = build_psi(code.a(), code.b()).unwrap();
        let layout = qubit_layout(&code, &psi).unwrap();
        let l = &layout.lattice;
        for i in 0..code.n() {
            let c = &layout.vertex_of_qubit[i];
            let mut expected: Vec<Vec<i64>> = vec![c.clone(), l.reduce(&[c[0] - 1, c[1]]).unwrap(), l.reduce(&[c[0], c[1] - 1]).unwrap()];
            expected.sort();
            let mut got: Vec<Vec<i64>> = code.css().hx().row(i).ones().map(|q| layout.vertex_of_qubit[q].clone()).collect();
            got.sort();
            got.dedup();
            assert_eq!(got, expected);
            let mut expected_z: Vec<Vec<i64>> = vec![c.clone(), l.reduce(&[c[0] + 1, c[1]]).unwrap(), l.reduce(&[c[0], c[1] + 1]).unwrap()];
            expected_z.sort();
            let mut got_z: Vec<Vec<i64>> = code.css().hz().row(i).ones().map(|q| layout.vertex_of_qubit[q].clone()).collect();
            got_z.sort();
            got_z.dedup();
            assert_eq!(got_z, expected_z);
        }
    }

    #[test]
    fn weight_five_code_has_dimension_three() {
        let g = FiniteAbelianGroup::new(&[5, 5]).unwrap();
        let code = build_two_block(&elem(&g, &[&[0, 0], &[1, 0], &[2, 0]]), &elem(&g, &[&[0, 0], &[0, 1]])).unwrap();
        let psi = build_psi(code.a(), code.b()).unwrap();
        assert_eq!((psi.dim(), code.weight()), (3, 5));
        assert_eq!(psi.kernel_lattice().unwrap().det(), &BigInt::from(25));
    }

    #[test]
    fn non_surjective_generator() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        let a = elem(&g, &[&[0], &[2]]);
        let e = elem(&g, &[&[0]]);
        let psi = build_psi(&a, &e).unwrap();
        assert!(!psi.is_surjective());
        assert_eq!(psi.image_index(), BigInt::from(2));
        assert!(matches!(psi.kernel_lattice(), Err(EmbeddingError::NotSurjective { .. })));
        let psi = build_psi(&elem(&g, &[&[0], &[1]]), &e).unwrap();
        assert_eq!(psi.kernel_lattice().unwrap().det(), &BigInt::from(4));
    }

    #[test]
    fn rejects_unnormalized_and_empty() {
        let g = FiniteAbelianGroup::new(&[4]).unwrap();
        assert!(matches!(build_psi(&elem(&g, &[&[1]]), &elem(&g, &[&[0]])), Err(EmbeddingError::NotNormalized)));
        let e = elem(&g, &[&[0]]);
        let psi = build_psi(&e, &e).unwrap();
        assert_eq!(psi.dim(), 0);
        assert!(matches!(psi.kernel_lattice(), Err(EmbeddingError::ZeroDimension)));
    }

    #[test]
    fn duplicate_generators_are_kept() {
        let g = FiniteAbelianGroup::new(&[6]).unwrap();
        let a = elem(&g, &[&[0], &[1]]);
        let code = build_two_block(&a, &a).unwrap();
        let psi = build_psi(code.a(), code.b()).unwrap();
        assert_eq!(psi.generators(), &[1, 1]);
        let l = psi.kernel_lattice().unwrap();
        assert_eq!(l.det(), &BigInt::from(6));
        assert!(l.contains(&[1, -1]).unwrap());
        let layout = qubit_layout(&code, &psi).unwrap();
        assert!(layout_is_consistent(&code, &psi, &layout));
        assert!(verify_locality(code.css(), &layout, &int(1), CenterMode::RowVertex).unwrap().holds);
    }

    #[test]
    fn surjectivity_matches_closure_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let orders: Vec<i64> = match rng.random_range(0..3) {
                0 => vec![rng.random_range(2..=100)],
                1 => vec![rng.random_range(2..=10), rng.random_range(2..=10)],
                _ => vec![rng.random_range(2..=4), rng.random_range(2..=4), rng.random_range(2..=6)],
            };
            let g = FiniteAbelianGroup::new(&orders).unwrap();
            let n = g.order();
            let pick = |rng: &mut ChaCha8Rng, k: usize| -> GroupAlgebraElement {
                GroupAlgebraElement::from_support(&g, std::iter::once(0).chain((0..k).map(|_| rng.random_range(1..n)))).unwrap()
            };
            let (ka, kb) = (rng.random_range(0..3), rng.random_range(1..3));
            let a = pick(&mut rng, ka);
            let b = pick(&mut rng, kb);
            if !a.contains(0) || !b.contains(0) {
                continue;
            }
            let psi = build_psi(&a, &b).unwrap();
            let idx = closure_index(&g, psi.generators());
            assert_eq!(psi.is_surjective(), idx == 1);
            assert_eq!(psi.image_index(), BigInt::from(idx));
            if psi.is_surjective() && psi.dim() > 0 {
                let l = psi.kernel_lattice().unwrap();
                assert_eq!(l.det(), &BigInt::from(n));
                for row in l.basis_i64().unwrap() {
                    assert_eq!(psi.apply(&row), 0);
                }
                let code = build_two_block(&a, &b).unwrap();
                let layout = qubit_layout(&code, &psi).unwrap();
                assert!(layout_is_consistent(&code, &psi, &layout));
                let rep = verify_locality(code.css(), &layout, &int(1), CenterMode::RowVertex).unwrap();
                assert!(rep.holds, "{:?}", rep);
            }
        }
    }

    #[test]
    fn scattered_supports_fail_locality() {
        // Repetition-style checks on 8 qubits laid out on ℤ/8ℤ, but one check
        // joins qubits 0 and 4, which are at quotient distance 4.
        let lattice = IntegerLattice::new(&[vec![8]]).unwrap();
        let vertices: Vec<Vec<i64>> = (0..8).map(|i| vec![i]).collect();
        let layout = QubitLayout::new(lattice, &vertices, 1).unwrap();
        let hx = BitMatrix::from_dense(&[vec![1, 0, 0, 0, 1, 0, 0, 0]]);
        let hz = BitMatrix::from_dense(&[vec![1, 1, 0, 0, 1, 1, 0, 0]]);
        let code = CssCode::new(hx, hz).unwrap();
        let rep = verify_locality(&code, &layout, &int(1), CenterMode::BestSupportVertex).unwrap();
        assert!(!rep.holds);
        assert_eq!(rep.max_radius_sq.0, int(16));
    }
}
