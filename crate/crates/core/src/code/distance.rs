//! Minimum weight of a nontrivial vector in one CSS sector: the smallest
//! `|v|` with `H·v = 0` and `v ∉ rowspace(S)`.
//!
//! Three exact strategies are provided. Kernel exhaustion walks every kernel
//! vector in Gray-code order. Ascending-weight search tries supports of
//! weight 1, 2, … in colexicographic order. Information-set search
//! (Brouwer–Zimmermann) enumerates low-weight combinations of systematic
//! generator matrices and stops once its lower bound meets the best
//! nontrivial vector found. Every strategy is deterministic and independent
//! of the thread schedule; among vectors of equal weight the colex-first one
//! is reported as the witness.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::f2::{BitMatrix, BitVec, Echelon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Largest kernel dimension that is exhausted outright.
    pub kernel_dim_cap: usize,
    /// Largest weight certified by the weight-bounded searches: the
    /// ascending-weight search stops after this weight and the
    /// information-set search stops once its lower bound exceeds it.
    pub max_weight: usize,
    /// Cap on the number of combinations visited by the information-set
    /// search.
    pub info_set_budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { kernel_dim_cap: 22, max_weight: 8, info_set_budget: 2_000_000_000 }
    }
}

/// Kernels above this dimension are never exhausted, whatever the strategy;
/// the information-set search takes over.
pub const MAX_EXHAUSTIBLE_DIM: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    KernelExhaustion,
    AscendingWeight,
    InformationSet,
}

/// Which search to run. `Auto` exhausts small kernels and otherwise uses the
/// information-set search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Auto,
    KernelExhaustion,
    AscendingWeight,
    InformationSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SectorDistance {
    Exact {
        d: usize,
        method: DistanceMethod,
        /// Support of a minimum-weight nontrivial vector.
        witness: Vec<usize>,
    },
    /// The search ended without a matching lower and upper bound.
    Bounded {
        lower: usize,
        upper: Option<usize>,
        method: DistanceMethod,
    },
    /// No nontrivial vectors exist (`k = 0`).
    Undefined,
}

impl SectorDistance {
    pub fn exact(&self) -> Option<usize> {
        match self {
            SectorDistance::Exact { d, .. } => Some(*d),
            _ => None,
        }
    }

    pub fn lower(&self) -> Option<usize> {
        match self {
            SectorDistance::Exact { d, .. } => Some(*d),
            SectorDistance::Bounded { lower, .. } => Some(*lower),
            SectorDistance::Undefined => None,
        }
    }

    pub fn upper(&self) -> Option<usize> {
        match self {
            SectorDistance::Exact { d, .. } => Some(*d),
            SectorDistance::Bounded { upper, .. } => *upper,
            SectorDistance::Undefined => None,
        }
    }
}

/// Numeric order of the vectors read as binary integers with bit `i` worth
/// `2^i`; on supports of equal size this is colexicographic order.
pub fn colex_cmp(a: &BitVec, b: &BitVec) -> Ordering {
    a.words().iter().rev().cmp(b.words().iter().rev())
}

fn better(cand: &(usize, BitVec), best: &Option<(usize, BitVec)>) -> bool {
    match best {
        None => true,
        Some((w, v)) => cand.0 < *w || (cand.0 == *w && colex_cmp(&cand.1, v) == Ordering::Less),
    }
}

fn pick(a: Option<(usize, BitVec)>, b: Option<(usize, BitVec)>) -> Option<(usize, BitVec)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if better(&y, &Some(x.clone())) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// The sector problem: `checks · v = 0`, `v ∉ rowspace(stabilizers)`.
pub struct Sector<'a> {
    checks: &'a BitMatrix,
    stabilizers: Echelon,
    kernel: Vec<BitVec>,
}

impl<'a> Sector<'a> {
    /// `stabilizers` must have rows inside `ker checks`.
    pub fn new(checks: &'a BitMatrix, stabilizers: &BitMatrix) -> Self {
        Sector {
            checks,
            stabilizers: Echelon::new(stabilizers),
            kernel: Echelon::new(checks).nullspace_basis(),
        }
    }

    pub fn kernel_dim(&self) -> usize {
        self.kernel.len()
    }

    /// Number of independent nontrivial classes.
    pub fn logical_dim(&self) -> usize {
        self.kernel.len() - self.stabilizers.rank()
    }

    fn is_nontrivial(&self, v: &BitVec) -> bool {
        !self.stabilizers.contains(v).expect("lengths agree")
    }

    pub fn distance(&self, strategy: Strategy, limits: &SearchLimits) -> SectorDistance {
        if self.logical_dim() == 0 {
            return SectorDistance::Undefined;
        }
        match strategy {
            Strategy::Auto if self.kernel_dim() <= limits.kernel_dim_cap => self.exhaust(),
            Strategy::Auto => self.information_set(limits),
            Strategy::KernelExhaustion if self.kernel_dim() <= MAX_EXHAUSTIBLE_DIM => self.exhaust(),
            Strategy::KernelExhaustion => self.information_set(limits),
            Strategy::AscendingWeight => self.ascending_weight(limits.max_weight),
            Strategy::InformationSet => self.information_set(limits),
        }
    }

    /// Kernel basis with the stabilizer part first, so a combination is
    /// nontrivial iff it uses one of the trailing vectors.
    fn ordered_kernel_basis(&self) -> (Vec<BitVec>, usize) {
        let mut basis: Vec<(usize, BitVec)> = Vec::new();
        let insert = |v: &BitVec, basis: &mut Vec<(usize, BitVec)>| -> bool {
            let mut r = v.clone();
            for (p, row) in basis.iter() {
                if r.get(*p) {
                    r.xor_assign(row);
                }
            }
            match r.first_one() {
                Some(p) => {
                    basis.push((p, r));
                    true
                }
                None => false,
            }
        };
        for row in self.stabilizers.rows() {
            insert(row, &mut basis);
        }
        let trivial = basis.len();
        // Keep the original vectors (not their reductions) for the logical
        // part; any complement works and these are sparser.
        let mut out: Vec<BitVec> = basis.iter().map(|(_, v)| v.clone()).collect();
        for v in &self.kernel {
            if insert(v, &mut basis) {
                out.push(v.clone());
            }
        }
        (out, trivial)
    }

    fn exhaust(&self) -> SectorDistance {
        let (basis, trivial) = self.ordered_kernel_basis();
        let dim = basis.len();
        let logical_mask: u64 = ((1u64 << dim) - 1) & !((1u64 << trivial) - 1);
        let high = dim.min(8);
        let low = dim - high;
        let n = self.checks.cols();
        let best = (0u64..1 << high)
            .into_par_iter()
            .map(|prefix| {
                let mut v = BitVec::zeros(n);
                let mut mask = prefix << low;
                for i in 0..high {
                    if prefix >> i & 1 == 1 {
                        v.xor_assign(&basis[low + i]);
                    }
                }
                let mut best: Option<(usize, BitVec)> = None;
                let consider = |v: &BitVec, mask: u64, best: &mut Option<(usize, BitVec)>| {
                    if mask & logical_mask == 0 {
                        return;
                    }
                    let w = v.weight();
                    if best.as_ref().is_none_or(|(bw, _)| w <= *bw) {
                        let cand = (w, v.clone());
                        if better(&cand, best) {
                            *best = Some(cand);
                        }
                    }
                };
                consider(&v, mask, &mut best);
                for step in 1u64..1 << low {
                    let bit = step.trailing_zeros() as usize;
                    v.xor_assign(&basis[bit]);
                    mask ^= 1 << bit;
                    consider(&v, mask, &mut best);
                }
                best
            })
            .reduce(|| None, pick);
        let (d, v) = best.expect("a nontrivial kernel vector exists");
        SectorDistance::Exact { d, method: DistanceMethod::KernelExhaustion, witness: v.ones().collect() }
    }

    fn ascending_weight(&self, max_weight: usize) -> SectorDistance {
        let n = self.checks.cols();
        let syndromes: Vec<BitVec> = (0..n).map(|c| self.checks.column(c)).collect();
        let mut by_syndrome: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (c, s) in syndromes.iter().enumerate() {
            by_syndrome.entry(s.words().to_vec()).or_default().push(c);
        }
        for w in 1..=max_weight.min(n) {
            let hit = (w - 1..n).into_par_iter().find_map_first(|top| {
                let mut chosen = vec![top];
                let acc = syndromes[top].clone();
                self.colex_search(&syndromes, &by_syndrome, w - 1, top, acc, &mut chosen)
            });
            if let Some(support) = hit {
                return SectorDistance::Exact { d: w, method: DistanceMethod::AscendingWeight, witness: support };
            }
        }
        SectorDistance::Bounded { lower: max_weight + 1, upper: None, method: DistanceMethod::AscendingWeight }
    }

    /// Chooses `remaining` more columns below `limit` (in colex order) such
    /// that the syndromes cancel and the vector is nontrivial. The last column
    /// is looked up by syndrome rather than enumerated.
    fn colex_search(
        &self,
        syndromes: &[BitVec],
        by_syndrome: &HashMap<Vec<u64>, Vec<usize>>,
        remaining: usize,
        limit: usize,
        acc: BitVec,
        chosen: &mut Vec<usize>,
    ) -> Option<Vec<usize>> {
        let n = syndromes.len();
        match remaining {
            0 => {
                if !acc.is_zero() {
                    return None;
                }
                let v = BitVec::from_indices(n, chosen.iter().copied());
                self.is_nontrivial(&v).then(|| {
                    let mut s = chosen.clone();
                    s.sort_unstable();
                    s
                })
            }
            1 => {
                let cols = by_syndrome.get(acc.words())?;
                for &c in cols.iter().take_while(|&&c| c < limit) {
                    chosen.push(c);
                    let v = BitVec::from_indices(n, chosen.iter().copied());
                    let ok = self.is_nontrivial(&v);
                    chosen.pop();
                    if ok {
                        let mut s = chosen.clone();
                        s.push(c);
                        s.sort_unstable();
                        return Some(s);
                    }
                }
                None
            }
            _ => {
                for c in remaining - 1..limit {
                    chosen.push(c);
                    let next = acc.xor(&syndromes[c]);
                    let found = self.colex_search(syndromes, by_syndrome, remaining - 1, c, next, chosen);
                    chosen.pop();
                    if found.is_some() {
                        return found;
                    }
                }
                None
            }
        }
    }

    /// Systematic generator matrices on pairwise disjoint independent column
    /// sets, with the size of each set. The sets come from a matroid
    /// partition, so together they cover as many columns as possible.
    fn information_sets(&self) -> Vec<(usize, Vec<BitVec>)> {
        let n = self.checks.cols();
        let dim = self.kernel.len();
        let g = BitMatrix::from_rows(n, &self.kernel);
        let columns: Vec<BitVec> = (0..n).map(|c| g.column(c)).collect();
        let mut parts = matroid_partition(&columns, n.div_ceil(dim));
        parts.retain(|p| !p.is_empty());
        parts.sort_by_key(|p| std::cmp::Reverse(p.len()));
        parts
            .into_iter()
            .map(|set| {
                let mut in_set = vec![false; n];
                for &c in &set {
                    in_set[c] = true;
                }
                let order: Vec<usize> = set.iter().copied().chain((0..n).filter(|&c| !in_set[c])).collect();
                let ech = Echelon::new(&g.select_columns(&order));
                debug_assert_eq!(ech.rank(), dim);
                debug_assert!(ech.pivots()[..set.len()].iter().enumerate().all(|(i, &p)| i == p));
                let rows = ech.rows().iter().map(|r| BitVec::from_indices(n, r.ones().map(|i| order[i]))).collect();
                (set.len(), rows)
            })
            .collect()
    }

    fn information_set(&self, limits: &SearchLimits) -> SectorDistance {
        let dim = self.kernel.len();
        let sets = self.information_sets();
        let mut best: Option<(usize, BitVec)> = None;
        let mut spent: u64 = 0;
        let mut lower = 1usize;
        for t in 1..=dim {
            let cost = binomial(dim as u64, t as u64).saturating_mul(sets.len() as u64);
            if spent.saturating_add(cost) > limits.info_set_budget {
                break;
            }
            spent += cost;
            for (_, rows) in &sets {
                let found = self.combinations(rows, t, best.as_ref().map(|b| b.0));
                best = pick(best, found);
            }
            let bound: usize = sets.iter().map(|(r, _)| (t + 1).saturating_sub(dim - r)).sum();
            lower = lower.max(bound);
            if t == dim {
                // Every kernel vector has been enumerated.
                lower = usize::MAX;
            }
            if let Some((w, v)) = &best {
                if *w <= lower {
                    return SectorDistance::Exact {
                        d: *w,
                        method: DistanceMethod::InformationSet,
                        witness: v.ones().collect(),
                    };
                }
            }
            if lower > limits.max_weight {
                break;
            }
        }
        SectorDistance::Bounded {
            lower: lower.min(best.as_ref().map_or(usize::MAX, |b| b.0)),
            upper: best.map(|b| b.0),
            method: DistanceMethod::InformationSet,
        }
    }

    /// Best nontrivial sum of exactly `t` of the rows, considering only
    /// weights up to `cap`.
    fn combinations(&self, rows: &[BitVec], t: usize, cap: Option<usize>) -> Option<(usize, BitVec)> {
        let k = rows.len();
        if t > k {
            return None;
        }
        (t - 1..k)
            .into_par_iter()
            .map(|top| {
                let mut best: Option<(usize, BitVec)> = None;
                let mut cap = cap;
                let mut acc = rows[top].clone();
                self.combine_below(rows, t - 1, top, &mut acc, &mut best, &mut cap);
                best
            })
            .reduce(|| None, pick)
    }

    fn combine_below(
        &self,
        rows: &[BitVec],
        remaining: usize,
        limit: usize,
        acc: &mut BitVec,
        best: &mut Option<(usize, BitVec)>,
        cap: &mut Option<usize>,
    ) {
        if remaining == 0 {
            let w = acc.weight();
            if cap.is_some_and(|c| w > c) {
                return;
            }
            let cand = (w, acc.clone());
            if better(&cand, best) && self.is_nontrivial(acc) {
                *cap = Some(w);
                *best = Some(cand);
            }
            return;
        }
        for c in remaining - 1..limit {
            acc.xor_assign(&rows[c]);
            self.combine_below(rows, remaining - 1, c, acc, best, cap);
            acc.xor_assign(&rows[c]);
        }
    }
}

/// Splits as many of `vectors` as possible into `k` disjoint linearly
/// independent sets, by shortest augmenting paths in the exchange graph
/// (Edmonds' matroid partition algorithm). Elements are inserted in index
/// order, so the result is deterministic.
fn matroid_partition(vectors: &[BitVec], k: usize) -> Vec<Vec<usize>> {
    let n = vectors.len();
    let width = vectors.first().map_or(0, BitVec::len);
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for s in 0..n {
        let echelons: Vec<Echelon> = sets
            .iter()
            .map(|set| {
                let rows: Vec<BitVec> = set.iter().map(|&c| vectors[c].clone()).collect();
                Echelon::with_combinations(&BitMatrix::from_rows(width, &rows))
            })
            .collect();
        // parent[y] = (x, i): x enters set i in place of y.
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut visited = vec![false; n];
        visited[s] = true;
        let mut queue = std::collections::VecDeque::from([s]);
        let mut sink = None;
        'bfs: while let Some(x) = queue.pop_front() {
            for (i, ech) in echelons.iter().enumerate() {
                if owner[x] == Some(i) {
                    continue;
                }
                match ech.solve(&vectors[x]).expect("equal widths") {
                    None => {
                        sink = Some((x, i));
                        break 'bfs;
                    }
                    Some(circuit) => {
                        for pos in circuit.ones() {
                            let y = sets[i][pos];
                            if !visited[y] {
                                visited[y] = true;
                                parent[y] = Some((x, i));
                                queue.push_back(y);
                            }
                        }
                    }
                }
            }
        }
        let Some((mut cur, mut into)) = sink else { continue };
        loop {
            if let Some(old) = owner[cur] {
                sets[old].retain(|&c| c != cur);
            }
            sets[into].push(cur);
            owner[cur] = Some(into);
            match parent[cur] {
                Some((p, j)) => {
                    cur = p;
                    into = j;
                }
                None => break,
            }
        }
    }
    for set in &mut sets {
        set.sort_unstable();
    }
    sets
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colex_order() {
        let a = BitVec::from_indices(70, [0, 65]);
        let b = BitVec::from_indices(70, [1, 2]);
        assert_eq!(colex_cmp(&b, &a), Ordering::Less);
        assert_eq!(colex_cmp(&BitVec::from_indices(4, [0, 3]), &BitVec::from_indices(4, [1, 3])), Ordering::Less);
    }

    #[test]
    fn matroid_partition_covers_and_stays_independent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let (rows, cols) = (rng.random_range(1..8), rng.random_range(1..20));
            let m = BitMatrix::from_dense(
                &(0..rows).map(|_| (0..cols).map(|_| rng.random_range(0..2u8)).collect()).collect::<Vec<_>>(),
            );
            let vectors: Vec<BitVec> = (0..cols).map(|c| m.column(c)).collect();
            let k = rng.random_range(1..4);
            let parts = matroid_partition(&vectors, k);
            let mut seen = vec![false; cols];
            for p in &parts {
                let sub = BitMatrix::from_rows(rows, &p.iter().map(|&c| vectors[c].clone()).collect::<Vec<_>>());
                assert_eq!(sub.rank(), p.len());
                for &c in p {
                    assert!(!seen[c]);
                    seen[c] = true;
                }
            }
            // Nonzero columns fit whenever k copies of the rank leave room.
            let nonzero = vectors.iter().filter(|v| !v.is_zero()).count();
            let covered = seen.iter().filter(|&&b| b).count();
            assert!(covered <= nonzero);
            if nonzero <= m.rank() {
                assert_eq!(covered, nonzero);
            }
        }
        // Two disjoint bases of the 2×4 matrix [I | I].
        let m = BitMatrix::from_dense(&[vec![1, 0, 1, 0], vec![0, 1, 0, 1]]);
        let v: Vec<BitVec> = (0..4).map(|c| m.column(c)).collect();
        let parts = matroid_partition(&v, 2);
        assert_eq!(parts.iter().map(Vec::len).sum::<usize>(), 4);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(60, 30), 118264581564861424);
        assert_eq!(binomial(200, 100), u64::MAX);
        assert_eq!(binomial(3, 4), 0);
    }

    /// Repetition code: checks `x_i + x_{i+1}`, no stabilizers. The only
    /// nontrivial kernel vector is all-ones.
    #[test]
    fn repetition_code_all_strategies() {
        let n = 7;
        let mut h = BitMatrix::zeros(n - 1, n);
        for i in 0..n - 1 {
            h.set(i, i, true);
            h.set(i, i + 1, true);
        }
        let s = BitMatrix::zeros(0, n);
        let sector = Sector::new(&h, &s);
        for strat in [Strategy::KernelExhaustion, Strategy::AscendingWeight, Strategy::InformationSet] {
            let limits = SearchLimits { max_weight: 7, ..SearchLimits::default() };
            let d = sector.distance(strat, &limits);
            assert_eq!(d.exact(), Some(7), "{strat:?}");
        }
        let d = sector.distance(Strategy::AscendingWeight, &SearchLimits { max_weight: 5, ..SearchLimits::default() });
        assert_eq!(d, SectorDistance::Bounded { lower: 6, upper: None, method: DistanceMethod::AscendingWeight });
    }
}
