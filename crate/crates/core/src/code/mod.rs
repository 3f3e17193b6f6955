//! CSS codes and Abelian two-block group algebra (2BGA) codes.
//!
//! A 2BGA code over a finite abelian group `G` of order `n` is built from two
//! elements `a, b ∈ F₂[G]` with matrices `A = Σ_{g∈a} 𝔹(g)` and `B` likewise:
//! `H_X = [A | B]`, `H_Z = [Bᵀ | Aᵀ]`. Commutativity of `F₂[G]` makes the
//! two check matrices orthogonal. Qubit `j < n` sits on the first block at
//! group element `g_j`, qubit `n + j` on the second block at the same element.

mod distance;

use rayon::join;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use distance::{
    colex_cmp, DistanceMethod, SearchLimits, Sector, SectorDistance, Strategy, MAX_EXHAUSTIBLE_DIM,
};

use crate::f2::BitMatrix;
use crate::group::{FiniteAbelianGroup, GroupAlgebraElement, GroupError};
use crate::lattice::{homomorphism_lattices, smith_normal_form};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("H_X has {hx} columns but H_Z has {hz}")]
    ColumnMismatch { hx: usize, hz: usize },
    #[error("H_X · H_Zᵀ ≠ 0")]
    NotOrthogonal,
    #[error("a and b belong to different groups")]
    GroupMismatch,
    #[error("{0} is zero; normalization needs a nonzero element")]
    ZeroElement(&'static str),
    #[error("the identity must lie in the supports of both a and b; normalize first")]
    NotNormalized,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CssCode {
    hx: BitMatrix,
    hz: BitMatrix,
}

impl CssCode {
    pub fn new(hx: BitMatrix, hz: BitMatrix) -> Result<Self, CodeError> {
        if hx.cols() != hz.cols() {
            return Err(CodeError::ColumnMismatch { hx: hx.cols(), hz: hz.cols() });
        }
        if !hx.mul(&hz.transpose()).is_zero() {
            return Err(CodeError::NotOrthogonal);
        }
        Ok(CssCode { hx, hz })
    }

    pub fn hx(&self) -> &BitMatrix {
        &self.hx
    }

    pub fn hz(&self) -> &BitMatrix {
        &self.hz
    }

    /// Number of physical qubits `N`.
    pub fn len(&self) -> usize {
        self.hx.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.hx.cols() == 0
    }

    /// `k = N − rank H_X − rank H_Z`.
    pub fn dimension(&self) -> usize {
        dimension(self)
    }

    pub fn x_sector(&self) -> Sector<'_> {
        Sector::new(&self.hx, &self.hz)
    }

    pub fn z_sector(&self) -> Sector<'_> {
        Sector::new(&self.hz, &self.hx)
    }

    /// `N`, `k` and both sector distances, searched in parallel.
    pub fn parameters(&self, strategy: Strategy, limits: &SearchLimits) -> CodeParams {
        let (d_x, d_z) = join(
            || self.x_sector().distance(strategy, limits),
            || self.z_sector().distance(strategy, limits),
        );
        CodeParams::new(self.len(), self.dimension(), d_x, d_z)
    }
}

pub fn dimension(code: &CssCode) -> usize {
    code.len() - code.hx.rank() - code.hz.rank()
}

/// The overall distance `d = min(d_X, d_Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Distance {
    Exact { d: usize },
    Bounded { lower: usize, upper: Option<usize> },
    Undefined,
}

impl Distance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            Distance::Exact { d } => Some(*d),
            _ => None,
        }
    }

    pub fn lower(&self) -> Option<usize> {
        match self {
            Distance::Exact { d } => Some(*d),
            Distance::Bounded { lower, .. } => Some(*lower),
            Distance::Undefined => None,
        }
    }

    fn combine(x: &SectorDistance, z: &SectorDistance) -> Distance {
        match (x, z) {
            (SectorDistance::Undefined, _) | (_, SectorDistance::Undefined) => Distance::Undefined,
            _ => {
                let lx = x.lower().expect("defined");
                let lz = z.lower().expect("defined");
                match (x.exact(), z.exact()) {
                    (Some(a), Some(b)) => Distance::Exact { d: a.min(b) },
                    (Some(a), None) if a <= lz => Distance::Exact { d: a },
                    (None, Some(b)) if b <= lx => Distance::Exact { d: b },
                    _ => {
                        let upper = match (x.upper(), z.upper()) {
                            (Some(a), Some(b)) => Some(a.min(b)),
                            (a, b) => a.or(b),
                        };
                        Distance::Bounded { lower: lx.min(lz), upper }
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Physical qubits `N`.
    pub n_qubits: usize,
    pub k: usize,
    pub d_x: SectorDistance,
    pub d_z: SectorDistance,
    pub d: Distance,
}

impl CodeParams {
    pub fn new(n_qubits: usize, k: usize, d_x: SectorDistance, d_z: SectorDistance) -> Self {
        let d = Distance::combine(&d_x, &d_z);
        CodeParams { n_qubits, k, d_x, d_z, d }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBlockCode {
    group: FiniteAbelianGroup,
    a: GroupAlgebraElement,
    b: GroupAlgebraElement,
    css: CssCode,
}

pub fn build_two_block(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<TwoBlockCode, CodeError> {
    if a.group() != b.group() {
        return Err(CodeError::GroupMismatch);
    }
    let am = a.to_matrix();
    let bm = b.to_matrix();
    let hx = am.hstack(&bm);
    let hz = bm.transpose().hstack(&am.transpose());
    let css = CssCode::new(hx, hz)?;
    Ok(TwoBlockCode { group: a.group().clone(), a: a.clone(), b: b.clone(), css })
}

impl TwoBlockCode {
    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn a(&self) -> &GroupAlgebraElement {
        &self.a
    }

    pub fn b(&self) -> &GroupAlgebraElement {
        &self.b
    }

    pub fn css(&self) -> &CssCode {
        &self.css
    }

    /// `n = |G|`; the code has `N = 2n` qubits.
    pub fn n(&self) -> usize {
        self.group.order()
    }

    /// Row weight `w = |a| + |b|` of the checks.
    pub fn weight(&self) -> usize {
        self.a.weight() + self.b.weight()
    }

    /// Both `a` and `b` are zero, so there are no checks at all.
    pub fn is_trivial(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_normalized(&self) -> bool {
        let e = self.group.identity();
        self.a.contains(e) && self.b.contains(e)
    }

    pub fn parameters(&self, strategy: Strategy, limits: &SearchLimits) -> CodeParams {
        self.css.parameters(strategy, limits)
    }
}

/// `(g_a⁻¹·a, g_b⁻¹·b)` together with the chosen shifts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub a: GroupAlgebraElement,
    pub b: GroupAlgebraElement,
    pub g_a: usize,
    pub g_b: usize,
}

/// Translates `a` and `b` so that both contain the identity. The shift is the
/// support element with the smallest index, which is the identity itself
/// whenever it is already present.
pub fn normalize(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<Normalized, CodeError> {
    if a.group() != b.group() {
        return Err(CodeError::GroupMismatch);
    }
    let g = a.group();
    let g_a = *a.support().first().ok_or(CodeError::ZeroElement("a"))?;
    let g_b = *b.support().first().ok_or(CodeError::ZeroElement("b"))?;
    Ok(Normalized { a: a.shift(g.inverse(g_a)), b: b.shift(g.inverse(g_b)), g_a, g_b })
}

/// A 2BGA code written as `[G:H]` identical copies of a code over the
/// subgroup `H` generated by the supports.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// Elements of `H` as indices into `G`, ascending.
    pub subgroup: Vec<usize>,
    /// Coset representatives of `H` in `G`: the first element of each coset
    /// in the enumeration order of `G`.
    pub coset_representatives: Vec<usize>,
    /// The code over `H ≅ ⊕ ℤ_{sᵢ}`.
    pub component: TwoBlockCode,
    /// `component_to_group[j]` is the element of `H ⊆ G` with index `j` in
    /// the component group.
    pub component_to_group: Vec<usize>,
}

impl Decomposition {
    /// `[G:H]`.
    pub fn index(&self) -> usize {
        self.coset_representatives.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.index() == 1
    }

    /// The `[G:H]` components; they are all equal as codes.
    pub fn components(&self) -> Vec<TwoBlockCode> {
        vec![self.component.clone(); self.index()]
    }

    /// Original qubit indices of component `c`'s qubits, in the component's
    /// qubit order.
    pub fn qubit_map(&self, group: &FiniteAbelianGroup, c: usize) -> Vec<usize> {
        let rep = self.coset_representatives[c];
        let n = group.order();
        let first: Vec<usize> = self.component_to_group.iter().map(|&h| group.mul(rep, h)).collect();
        first.iter().copied().chain(first.iter().map(|g| g + n)).collect()
    }
}

/// Splits a normalized code along the cosets of `H = ⟨supp a ∪ supp b⟩`.
pub fn decompose(code: &TwoBlockCode) -> Result<Decomposition, CodeError> {
    if !code.is_normalized() {
        return Err(CodeError::NotNormalized);
    }
    let g = code.group();
    let e = g.identity();
    let generators: Vec<usize> = code
        .a
        .support()
        .iter()
        .chain(code.b.support())
        .copied()
        .filter(|&x| x != e)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let subgroup = g.subgroup_closure(&generators);

    let mut coset_of = vec![usize::MAX; g.order()];
    let mut coset_representatives = Vec::new();
    for x in g.elements() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = coset_representatives.len();
        coset_representatives.push(x);
        for &h in &subgroup {
            coset_of[g.mul(x, h)] = c;
        }
    }

    // H ≅ ℤ^s / ker φ with φ(eⱼ) = gⱼ; the Smith form of ker φ gives cyclic
    // factors and coordinates x ↦ x·V mod sᵢ.
    let s = generators.len();
    let exps: Vec<Vec<i64>> = generators
        .iter()
        .map(|&x| g.exponents(x).into_iter().map(i64::from).collect())
        .collect();
    let (orders, coords) = if s == 0 {
        (Vec::new(), Vec::new())
    } else {
        let hom = homomorphism_lattices(&exps, g.cyclic_orders());
        let (snf, _, v) = smith_normal_form(&hom.kernel);
        let factors: Vec<(usize, i64)> = (0..s)
            .filter_map(|i| {
                let d = i64::try_from(&snf[i][i]).expect("subgroup orders fit in 64 bits");
                (d > 1).then_some((i, d))
            })
            .collect();
        let coords: Vec<Vec<i64>> = (0..s)
            .map(|j| {
                factors
                    .iter()
                    .map(|&(i, d)| i64::try_from(&v[j][i]).expect("small entries").rem_euclid(d))
                    .collect()
            })
            .collect();
        (factors.iter().map(|&(_, d)| d).collect::<Vec<_>>(), coords)
    };
    let sub_group = FiniteAbelianGroup::new(&orders)?;
    debug_assert_eq!(sub_group.order(), subgroup.len());

    // Reach every element of H by words in the generators and read off its
    // coordinates.
    let mut coordinate_of: Vec<Option<Vec<i64>>> = vec![None; g.order()];
    coordinate_of[e] = Some(vec![0; orders.len()]);
    let mut queue = std::collections::VecDeque::from([e]);
    while let Some(x) = queue.pop_front() {
        let cx = coordinate_of[x].clone().expect("visited");
        for (j, &gen) in generators.iter().enumerate() {
            let y = g.mul(x, gen);
            if coordinate_of[y].is_none() {
                let cy: Vec<i64> = cx.iter().zip(&coords[j]).zip(&orders).map(|((a, b), d)| (a + b) % d).collect();
                coordinate_of[y] = Some(cy);
                queue.push_back(y);
            }
        }
    }
    let mut component_to_group = vec![usize::MAX; sub_group.order()];
    let to_sub = |x: usize| -> usize {
        let c = coordinate_of[x].as_ref().expect("element of H");
        sub_group.index_of(c).expect("coordinates reduced")
    };
    for &h in &subgroup {
        component_to_group[to_sub(h)] = h;
    }
    let a = GroupAlgebraElement::from_support(&sub_group, code.a.support().iter().map(|&x| to_sub(x)))?;
    let b = GroupAlgebraElement::from_support(&sub_group, code.b.support().iter().map(|&x| to_sub(x)))?;
    let component = build_two_block(&a, &b)?;
    Ok(Decomposition { subgroup, coset_representatives, component, component_to_group })
}
