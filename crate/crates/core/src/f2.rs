//! Dense linear algebra over GF(2) on bit-packed storage.
//!
//! Vectors and matrix rows are packed little-endian into `u64` words: bit `i`
//! lives in word `i / 64` at position `i % 64`. Bits beyond the logical length
//! are always zero, so word-level equality, XOR and popcount are exact.
//!
//! Row reduction pivots on the leftmost remaining column and takes the topmost
//! candidate row, producing a fully reduced row-echelon form. Everything
//! downstream (nullspace bases, particular solutions) is therefore a pure
//! function of the input bits.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[inline]
fn tail_mask(len: usize) -> u64 {
    match len % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector of length `len` with ones at `indices` (repeats toggle).
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in indices {
            v.flip(i);
        }
        v
    }

    /// Builds a vector from raw words; bits past `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(len);
        }
        Self { words, len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        xor_words(&mut self.words, &other.words);
    }

    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        dot_words(&self.words, &other.words)
    }

    /// Number of positions set in both vectors.
    pub fn overlap(&self, other: &Self) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// True if the two vectors share a set position.
    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Self { words, len: self.len }
    }

    pub fn or(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Self { words, len: self.len }
    }

    pub fn and_not(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        Self { words, len: self.len }
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Restriction to the listed coordinates, in the listed order.
    pub fn select(&self, positions: &[usize]) -> Self {
        let mut out = Self::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    /// Copy of `self[start..start + len]`.
    pub fn slice(&self, start: usize, len: usize) -> Self {
        assert!(start + len <= self.len);
        let mut out = Self::zeros(len);
        for i in self.ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Renders as a string of `0`/`1` characters.
    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({}: {})", self.len, self.to_bit_string())
    }
}

#[inline]
fn xor_words(dst: &mut [u64], src: &[u64]) {
    for (a, b) in dst.iter_mut().zip(src) {
        *a ^= b;
    }
}

#[inline]
fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}

/// A dense matrix over GF(2), rows packed into words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks row vectors; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has length {} != {cols}", r.len());
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    /// Builds from a dense 0/1 table (any nonzero entry counts as 1).
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged dense matrix");
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.words[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn toggle(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.words[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.words[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.words[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn col_weight(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c)).count()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            let stride = out.stride;
            let dst = &mut out.words[r * stride..(r + 1) * stride];
            for k in row.ones() {
                xor_words(dst, other.row_words(k));
            }
        }
        out
    }

    /// Sum of two matrices of equal shape.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        xor_words(&mut out.words, &other.words);
        out
    }

    /// `self · v` (syndrome of `v`).
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::LengthMismatch { expected: self.cols, found: v.len() });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if dot_words(self.row_words(r), v.words()) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// `xᵀ · self`, the sum of the rows selected by `x`.
    pub fn combine_rows(&self, x: &BitVec) -> Result<BitVec, F2Error> {
        if x.len() != self.rows {
            return Err(F2Error::LengthMismatch { expected: self.rows, found: x.len() });
        }
        let mut out = BitVec::zeros(self.cols);
        for r in x.ones() {
            xor_words(&mut out.words, self.row_words(r));
        }
        Ok(out)
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack needs equal row counts");
        let rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r).concat(&other.row(r))).collect();
        Self::from_rows(self.cols + other.cols, &rows)
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack needs equal column counts");
        let mut out = Self::zeros(self.rows + other.rows, self.cols);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        out.words[self.words.len()..].copy_from_slice(&other.words);
        out
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r).select(cols)).collect();
        Self::from_rows(cols.len(), &rows)
    }

    /// Keeps the listed rows, in the listed order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let picked: Vec<BitVec> = rows.iter().map(|&r| self.row(r)).collect();
        Self::from_rows(self.cols, &picked)
    }

    pub fn rank(&self) -> usize {
        Echelon::new(self).rank()
    }

    /// Basis of `{v : self · v = 0}`, one vector per free column in ascending
    /// order of that column.
    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        Echelon::new(self).nullspace_basis()
    }

    /// Whether `v` is a sum of rows of `self`.
    pub fn in_rowspace(&self, v: &BitVec) -> Result<bool, F2Error> {
        Echelon::new(self).contains(v)
    }

    /// Finds `x` with `xᵀ · self = target`, or `Ok(None)` when the system is
    /// inconsistent.
    pub fn solve(&self, target: &BitVec) -> Result<Option<BitVec>, F2Error> {
        Echelon::with_combinations(self).solve(target)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r).to_bit_string())?;
        }
        write!(f, "]")
    }
}

/// Reduced row-echelon form of a matrix, optionally remembering which original
/// rows were combined into each echelon row.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    source_rows: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    combos: Option<Vec<BitVec>>,
}

impl Echelon {
    pub fn new(m: &BitMatrix) -> Self {
        Self::build(m, false)
    }

    pub fn with_combinations(m: &BitMatrix) -> Self {
        Self::build(m, true)
    }

    fn build(m: &BitMatrix, track: bool) -> Self {
        let mut rows = m.row_vecs();
        let mut combos: Option<Vec<BitVec>> = track
            .then(|| (0..m.rows()).map(|i| BitVec::from_indices(m.rows(), [i])).collect());
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..m.cols() {
            if top == rows.len() {
                break;
            }
            let Some(found) = (top..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(top, found);
            let pivot_row = rows[top].clone();
            let pivot_combo = combos.as_mut().map(|c| {
                c.swap(top, found);
                c[top].clone()
            });
            for r in 0..rows.len() {
                if r != top && rows[r].get(col) {
                    xor_words(&mut rows[r].words, &pivot_row.words);
                    if let (Some(c), Some(pc)) = (combos.as_mut(), pivot_combo.as_ref()) {
                        c[r].xor_assign(pc);
                    }
                }
            }
            pivots.push(col);
            top += 1;
        }
        rows.truncate(top);
        if let Some(c) = combos.as_mut() {
            c.truncate(top);
        }
        Self {
            cols: m.cols(),
            source_rows: m.rows(),
            rows,
            pivots,
            combos,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVec::zeros(self.cols);
                v.set(free, true);
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if row.get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Reduces `v` in place against the echelon rows; the residual is zero
    /// exactly when `v` lies in the row space.
    pub fn reduce(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                xor_words(&mut v.words, &row.words);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool, F2Error> {
        if v.len() != self.cols {
            return Err(F2Error::LengthMismatch { expected: self.cols, found: v.len() });
        }
        let mut r = v.clone();
        self.reduce(&mut r);
        Ok(r.is_zero())
    }

    pub fn solve(&self, target: &BitVec) -> Result<Option<BitVec>, F2Error> {
        if target.len() != self.cols {
            return Err(F2Error::LengthMismatch { expected: self.cols, found: target.len() });
        }
        let combos = self
            .combos
            .as_ref()
            .expect("solve requires an echelon built with_combinations");
        let mut residual = target.clone();
        let mut x = BitVec::zeros(self.source_rows);
        for ((row, &p), combo) in self.rows.iter().zip(&self.pivots).zip(combos) {
            if residual.get(p) {
                residual.xor_assign(row);
                x.xor_assign(combo);
            }
        }
        Ok(residual.is_zero().then_some(x))
    }
}
