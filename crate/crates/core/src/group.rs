//! Finite abelian groups presented as products of cyclic groups, their group
//! algebra over GF(2), and the regular representation.
//!
//! Elements are addressed by their position in a fixed mixed-radix
//! enumeration (last coordinate fastest): the exponent vector `(e₁, …, e_t)`
//! of `ℤ_{d₁} × … × ℤ_{d_t}` has index `Σ eᵢ · Π_{j>i} d_j`. Parity-check
//! column indices of every code built on the group follow this order.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2::BitMatrix;

/// Refuse groups whose regular representation would not fit comfortably.
pub const MAX_GROUP_ORDER: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("cyclic order at position {index} is {order}; orders must be at least 2")]
    InvalidOrder { index: usize, order: i64 },
    #[error("group order exceeds the supported maximum of {MAX_GROUP_ORDER}")]
    TooLarge,
    #[error("exponent vector has {found} entries, group has {expected} cyclic factors")]
    ExponentLength { expected: usize, found: usize },
    #[error("exponent {value} at position {index} is outside [0, {order})")]
    ExponentOutOfRange { index: usize, value: i64, order: u32 },
    #[error("element index {0} is not in the group")]
    NoSuchElement(usize),
    #[error("elements belong to different groups")]
    GroupMismatch,
}

/// `ℤ_{d₁} × … × ℤ_{d_t}`; the empty product is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<u32>")]
pub struct FiniteAbelianGroup {
    orders: Vec<u32>,
    order: usize,
}

impl TryFrom<Vec<i64>> for FiniteAbelianGroup {
    type Error = GroupError;

    fn try_from(orders: Vec<i64>) -> Result<Self, Self::Error> {
        Self::new(&orders)
    }
}

impl From<FiniteAbelianGroup> for Vec<u32> {
    fn from(g: FiniteAbelianGroup) -> Self {
        g.orders
    }
}

impl FiniteAbelianGroup {
    pub fn new(orders: &[i64]) -> Result<Self, GroupError> {
        let mut order: usize = 1;
        let mut out = Vec::with_capacity(orders.len());
        for (index, &d) in orders.iter().enumerate() {
            if d < 2 {
                return Err(GroupError::InvalidOrder { index, order: d });
            }
            let d = u32::try_from(d).map_err(|_| GroupError::TooLarge)?;
            order = order
                .checked_mul(d as usize)
                .filter(|&n| n <= MAX_GROUP_ORDER)
                .ok_or(GroupError::TooLarge)?;
            out.push(d);
        }
        Ok(Self { orders: out, order })
    }

    pub fn cyclic(n: u32) -> Result<Self, GroupError> {
        Self::new(&[i64::from(n)])
    }

    pub fn trivial() -> Self {
        Self { orders: Vec::new(), order: 1 }
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    /// `n = |G|`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn exponents(&self, index: usize) -> Vec<u32> {
        assert!(index < self.order, "element {index} out of range");
        let mut out = vec![0; self.orders.len()];
        let mut rest = index;
        for (slot, &d) in out.iter_mut().zip(&self.orders).rev() {
            *slot = (rest % d as usize) as u32;
            rest /= d as usize;
        }
        out
    }

    pub fn index_of(&self, exponents: &[i64]) -> Result<usize, GroupError> {
        if exponents.len() != self.orders.len() {
            return Err(GroupError::ExponentLength {
                expected: self.orders.len(),
                found: exponents.len(),
            });
        }
        let mut index = 0usize;
        for (i, (&e, &d)) in exponents.iter().zip(&self.orders).enumerate() {
            if e < 0 || e >= i64::from(d) {
                return Err(GroupError::ExponentOutOfRange { index: i, value: e, order: d });
            }
            index = index * d as usize + e as usize;
        }
        Ok(index)
    }

    /// Index of the element with the given exponents reduced modulo the orders.
    pub fn index_of_reduced(&self, exponents: &[i64]) -> usize {
        assert_eq!(exponents.len(), self.orders.len());
        exponents.iter().zip(&self.orders).fold(0usize, |acc, (&e, &d)| {
            acc * d as usize + e.rem_euclid(i64::from(d)) as usize
        })
    }

    /// Group operation, written multiplicatively.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        let (mut a, mut b) = (g, h);
        let (mut out, mut place) = (0usize, 1usize);
        for &d in self.orders.iter().rev() {
            let d = d as usize;
            out += ((a % d + b % d) % d) * place;
            place *= d;
            a /= d;
            b /= d;
        }
        out
    }

    pub fn inverse(&self, g: usize) -> usize {
        let mut a = g;
        let (mut out, mut place) = (0usize, 1usize);
        for &d in self.orders.iter().rev() {
            let d = d as usize;
            out += ((d - a % d) % d) * place;
            place *= d;
            a /= d;
        }
        out
    }

    /// Cayley table of left multiplication: `table[g][j] = g·g_j`.
    pub fn multiplication_table(&self) -> Vec<Vec<usize>> {
        self.elements()
            .map(|g| self.elements().map(|j| self.mul(g, j)).collect())
            .collect()
    }

    /// Regular representation `𝔹(g)`: entry `(i, j)` is set iff `g_i = g·g_j`.
    pub fn regular_representation(&self, g: usize) -> BitMatrix {
        assert!(g < self.order);
        let mut m = BitMatrix::zeros(self.order, self.order);
        for j in self.elements() {
            m.set(self.mul(g, j), j, true);
        }
        m
    }

    /// Subgroup generated by `generators`, as sorted element indices.
    pub fn subgroup_closure(&self, generators: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(h) = frontier.pop() {
            for &g in generators {
                let next = self.mul(g, h);
                if !seen[next] {
                    seen[next] = true;
                    frontier.push(next);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }
}

/// An element `Σ_{g ∈ S} g` of `F₂[G]`, stored by its support `S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupAlgebraElement {
    group: FiniteAbelianGroup,
    support: BTreeSet<usize>,
}

impl GroupAlgebraElement {
    pub fn zero(group: &FiniteAbelianGroup) -> Self {
        Self { group: group.clone(), support: BTreeSet::new() }
    }

    pub fn from_support(
        group: &FiniteAbelianGroup,
        support: impl IntoIterator<Item = usize>,
    ) -> Result<Self, GroupError> {
        let mut set = BTreeSet::new();
        for g in support {
            if g >= group.order() {
                return Err(GroupError::NoSuchElement(g));
            }
            // Coefficients live in F₂, so a repeated element cancels.
            if !set.insert(g) {
                set.remove(&g);
            }
        }
        Ok(Self { group: group.clone(), support: set })
    }

    pub fn from_exponents(group: &FiniteAbelianGroup, support: &[Vec<i64>]) -> Result<Self, GroupError> {
        let indices = support
            .iter()
            .map(|e| group.index_of(e))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_support(group, indices)
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn support(&self) -> &BTreeSet<usize> {
        &self.support
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.support.contains(&g)
    }

    pub fn exponent_support(&self) -> Vec<Vec<u32>> {
        self.support.iter().map(|&g| self.group.exponents(g)).collect()
    }

    /// `Σ_{g ∈ S} 𝔹(g)`.
    pub fn to_matrix(&self) -> BitMatrix {
        let n = self.group.order();
        let mut m = BitMatrix::zeros(n, n);
        for &g in &self.support {
            for j in self.group.elements() {
                m.toggle(self.group.mul(g, j), j);
            }
        }
        m
    }

    /// Left translate `h·x`.
    pub fn shift(&self, h: usize) -> Self {
        let support = self.support.iter().map(|&g| self.group.mul(h, g)).collect();
        Self { group: self.group.clone(), support }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GroupError> {
        if self.group != other.group {
            return Err(GroupError::GroupMismatch);
        }
        let support = self.support.symmetric_difference(&other.support).copied().collect();
        Ok(Self { group: self.group.clone(), support })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z3xz3() -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(&[3, 3]).unwrap()
    }

    #[test]
    fn enumeration_is_mixed_radix_last_fastest() {
        let g = FiniteAbelianGroup::new(&[2, 3]).unwrap();
        let order: Vec<Vec<u32>> = g.elements().map(|i| g.exponents(i)).collect();
        assert_eq!(
            order,
            vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]
        );
        for i in g.elements() {
            let e: Vec<i64> = g.exponents(i).iter().map(|&x| i64::from(x)).collect();
            assert_eq!(g.index_of(&e).unwrap(), i);
        }
    }

    #[test]
    fn rejects_bad_presentations() {
        assert_eq!(
            FiniteAbelianGroup::new(&[3, 1]),
            Err(GroupError::InvalidOrder { index: 1, order: 1 })
        );
        let g = z3xz3();
        assert!(matches!(g.index_of(&[1]), Err(GroupError::ExponentLength { .. })));
        assert!(matches!(g.index_of(&[0, 3]), Err(GroupError::ExponentOutOfRange { .. })));
    }

    #[test]
    fn regular_representation_examples() {
        let z2 = FiniteAbelianGroup::cyclic(2).unwrap();
        assert_eq!(z2.regular_representation(1), BitMatrix::from_dense(&[vec![0, 1], vec![1, 0]]));
        for g in [z2.clone(), z3xz3(), FiniteAbelianGroup::new(&[2, 2, 3]).unwrap()] {
            assert_eq!(g.regular_representation(g.identity()), BitMatrix::identity(g.order()));
        }
    }

    #[test]
    fn regular_representation_is_a_homomorphism_on_z4() {
        let g = FiniteAbelianGroup::cyclic(4).unwrap();
        for a in g.elements() {
            for b in g.elements() {
                let lhs = g.regular_representation(a).mul(&g.regular_representation(b));
                assert_eq!(lhs, g.regular_representation(g.mul(a, b)));
            }
        }
    }

    #[test]
    fn algebra_matrix_examples() {
        let g = z3xz3();
        let e = GroupAlgebraElement::from_support(&g, [0]).unwrap();
        assert_eq!(e.to_matrix(), BitMatrix::identity(9));
        assert!(GroupAlgebraElement::zero(&g).to_matrix().is_zero());

        // Definitional oracle on ℤ₃: row i holds ones at j with g_i = g_j or g_i = x·g_j.
        let z3 = FiniteAbelianGroup::cyclic(3).unwrap();
        let x = GroupAlgebraElement::from_support(&z3, [0, 1]).unwrap();
        let m = x.to_matrix();
        for i in 0..3 {
            for j in 0..3 {
                let expect = i == j || i == (j + 1) % 3;
                assert_eq!(m.get(i, j), expect, "entry ({i},{j})");
            }
            assert_eq!(m.row_weight(i), 2);
        }
    }

    #[test]
    fn shift_examples() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        let x = GroupAlgebraElement::from_support(&z4, [1, 3]).unwrap();
        assert_eq!(x.shift(0), x);
        let single = GroupAlgebraElement::from_support(&z4, [3]).unwrap();
        assert_eq!(single.shift(z4.inverse(3)).support().iter().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(x.shift(2).weight(), 2);
    }

    #[test]
    fn repeated_support_cancels() {
        let z4 = FiniteAbelianGroup::cyclic(4).unwrap();
        let x = GroupAlgebraElement::from_support(&z4, [1, 2, 1]).unwrap();
        assert_eq!(x.support().iter().copied().collect::<Vec<_>>(), vec![2]);
    }

    fn small_group() -> impl Strategy<Value = FiniteAbelianGroup> {
        prop::collection::vec(2i64..6, 1..=3)
            .prop_map(|orders| FiniteAbelianGroup::new(&orders).unwrap())
    }

    proptest! {
        #[test]
        fn regular_representations_commute(group in small_group(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
            let (g, h) = (a.index(group.order()), b.index(group.order()));
            let bg = group.regular_representation(g);
            let bh = group.regular_representation(h);
            prop_assert_eq!(bg.mul(&bh), bh.mul(&bg));
        }

        #[test]
        fn algebra_matrix_rows_and_columns_have_support_weight(
            group in small_group(),
            picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6),
        ) {
            let support: BTreeSet<usize> = picks.iter().map(|p| p.index(group.order())).collect();
            let x = GroupAlgebraElement::from_support(&group, support.iter().copied()).unwrap();
            let m = x.to_matrix();
            for i in 0..group.order() {
                prop_assert_eq!(m.row_weight(i), x.weight());
                prop_assert_eq!(m.col_weight(i), x.weight());
            }
        }

        #[test]
        fn algebra_matrix_is_additive_on_disjoint_supports(
            group in small_group(),
            picks in prop::collection::vec(any::<(prop::sample::Index, bool)>(), 0..8),
        ) {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for (p, side) in &picks {
                let g = p.index(group.order());
                if !left.contains(&g) && !right.contains(&g) {
                    if *side { left.insert(g); } else { right.insert(g); }
                }
            }
            let x = GroupAlgebraElement::from_support(&group, left).unwrap();
            let y = GroupAlgebraElement::from_support(&group, right).unwrap();
            prop_assert_eq!(x.add(&y).unwrap().to_matrix(), x.to_matrix().add(&y.to_matrix()));
        }

        #[test]
        fn shift_preserves_weight(group in small_group(), h in any::<prop::sample::Index>(),
                                  picks in prop::collection::vec(any::<prop::sample::Index>(), 0..6)) {
            let x = GroupAlgebraElement::from_support(&group, picks.iter().map(|p| p.index(group.order())).collect::<BTreeSet<_>>()).unwrap();
            prop_assert_eq!(x.shift(h.index(group.order())).weight(), x.weight());
        }
    }
}
