//! Dense linear algebra over GF(2) on `u64` bit rows.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_indices(len: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in idx {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            v.set(i, true);
        }
        for i in other.ones() {
            v.set(self.len + i, true);
        }
        v
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

/// Row-major GF(2) matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMat { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, j) in entries {
            m.flip(i, j);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.data[i].set(j, b)
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i].flip(j)
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn column(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.data.iter().enumerate().flat_map(|(i, r)| r.ones().map(move |j| (i, j))).collect()
    }

    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = BitMat::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            for k in r.ones() {
                out.data[i].xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn add(&self, other: &BitMat) -> BitMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch in sum");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        out
    }

    pub fn transpose(&self) -> BitMat {
        BitMat::from_entries(self.cols, self.rows, self.entries().into_iter().map(|(i, j)| (j, i)))
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[&BitMat]) -> BitMat {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = BitMat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for (i, j) in b.entries() {
                out.set(r0 + i, c0 + j, true);
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        out
    }

    /// Writes `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put(&mut self, r0: usize, c0: usize, block: &BitMat) {
        for (i, j) in block.entries() {
            self.set(r0 + i, c0 + j, true);
        }
    }

    /// Extracts rows `r` and columns `c`.
    pub fn select(&self, r: &[usize], c: &[usize]) -> BitMat {
        let mut out = BitMat::zeros(r.len(), c.len());
        for (a, &i) in r.iter().enumerate() {
            for (b, &j) in c.iter().enumerate() {
                if self.get(i, j) {
                    out.set(a, b, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut e = Echelon::new(self.cols, 0);
        self.data.iter().filter(|r| e.insert((*r).clone(), BitVec::zeros(0)).is_none()).count()
    }

    pub fn from_columns(rows: usize, cols: &[BitVec]) -> BitMat {
        let mut m = BitMat::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn inverse(&self) -> Option<BitMat> {
        if self.rows != self.cols {
            return None;
        }
        let solver = ColumnSolver::new(self);
        let cols: Option<Vec<BitVec>> = (0..self.rows).map(|k| solver.solve(&BitVec::unit(self.rows, k))).collect();
        Some(BitMat::from_columns(self.rows, &cols?))
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r:?}")?;
        }
        Ok(())
    }
}

/// Incremental row echelon form with combination tracking.
///
/// Each stored row carries a tag vector recording which inserted vectors it
/// is a combination of, so reductions report coefficients.
#[derive(Clone, Debug)]
pub struct Echelon {
    dim: usize,
    tags: usize,
    rows: Vec<(usize, BitVec, BitVec)>,
}

impl Echelon {
    pub fn new(dim: usize, tags: usize) -> Self {
        Echelon { dim, tags, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v`, returning the remainder and the tag combination that was
    /// subtracted.
    pub fn reduce(&self, mut v: BitVec) -> (BitVec, BitVec) {
        let mut comb = BitVec::zeros(self.tags);
        for (p, r, t) in &self.rows {
            if v.get(*p) {
                v.xor_assign(r);
                comb.xor_assign(t);
            }
        }
        (v, comb)
    }

    /// Inserts `v` with tag `tag`; returns `Some(comb)` when `v` is dependent,
    /// where `comb` is a tag combination summing to zero including `tag`.
    pub fn insert(&mut self, v: BitVec, tag: BitVec) -> Option<BitVec> {
        debug_assert_eq!(v.len(), self.dim);
        let (r, mut comb) = self.reduce(v);
        comb.xor_assign(&tag);
        match r.first_one() {
            None => Some(comb),
            Some(p) => {
                for (_, row, t) in self.rows.iter_mut() {
                    if row.get(p) {
                        row.xor_assign(&r);
                        t.xor_assign(&comb);
                    }
                }
                self.rows.push((p, r, comb));
                None
            }
        }
    }
}

/// Solves `A x = b` where `A` is given by its columns.
#[derive(Clone, Debug)]
pub struct ColumnSolver {
    ech: Echelon,
    kernel: Vec<BitVec>,
}

impl ColumnSolver {
    pub fn new(a: &BitMat) -> Self {
        let n = a.cols();
        let mut ech = Echelon::new(a.rows(), n);
        let mut kernel = Vec::new();
        for j in 0..n {
            if let Some(k) = ech.insert(a.column(j), BitVec::unit(n, j)) {
                kernel.push(k);
            }
        }
        ColumnSolver { ech, kernel }
    }

    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        let (r, comb) = self.ech.reduce(b.clone());
        r.is_zero().then_some(comb)
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    pub fn kernel(&self) -> &[BitVec] {
        &self.kernel
    }
}

/// Coordinates on a quotient `Z / B` of subspaces of `GF(2)^dim`.
#[derive(Clone, Debug)]
pub struct Quotient {
    ech: Echelon,
    reps: Vec<BitVec>,
}

impl Quotient {
    /// `boundaries` spans `B`; `cycles` spans `Z ⊇ B`.
    pub fn new(dim: usize, boundaries: &[BitVec], cycles: &[BitVec]) -> Self {
        let mut b = Echelon::new(dim, 0);
        for v in boundaries {
            b.insert(v.clone(), BitVec::zeros(0));
        }
        let mut c = Echelon::new(dim, cycles.len());
        let mut reps = Vec::new();
        for z in cycles {
            let (r, _) = b.reduce(z.clone());
            if c.insert(r, BitVec::zeros(cycles.len())).is_none() {
                reps.push(z.clone());
            }
        }
        let k = reps.len();
        let mut ech = b;
        ech.tags = k;
        for row in ech.rows.iter_mut() {
            row.2 = BitVec::zeros(k);
        }
        for (l, z) in reps.iter().enumerate() {
            let dep = ech.insert(z.clone(), BitVec::unit(k, l));
            debug_assert!(dep.is_none());
        }
        Quotient { ech, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Representatives of a basis of the quotient.
    pub fn reps(&self) -> &[BitVec] {
        &self.reps
    }

    /// Coordinates of a cycle `z`; `None` if `z` is not in `Z`.
    pub fn coords(&self, z: &BitVec) -> Option<BitVec> {
        let (r, comb) = self.ech.reduce(z.clone());
        r.is_zero().then_some(comb)
    }
}
