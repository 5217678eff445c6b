//! Sparse matrices over ℚ(i) and exact elimination.
//!
//! Elimination is done online: rows are reduced against the current set of
//! pivot rows (each normalized to a leading one) and inserted if a nonzero
//! remainder is left. Because a row only ever meets pivots whose leading
//! column it contains, block-diagonal structure in the input is preserved and
//! fill-in stays within each block.

use std::collections::BTreeMap;

use super::GaussRat;

/// A sparse row: `(column, value)` pairs sorted by column, no stored zeros.
pub type SparseRow = Vec<(usize, GaussRat)>;

/// Dense exact vector.
pub type Vector = Vec<GaussRat>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMat {
    rows: usize,
    cols: usize,
    data: Vec<SparseRow>,
}

impl SparseMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat {
            rows: n,
            cols: n,
            data: (0..n).map(|r| vec![(r, GaussRat::one())]).collect(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triples. Duplicate positions
    /// are summed and zeros dropped. Panics on out-of-range indices.
    pub fn from_triplets<I>(rows: usize, cols: usize, triplets: I) -> Self
    where
        I: IntoIterator<Item = (usize, usize, GaussRat)>,
    {
        let mut acc: Vec<BTreeMap<usize, GaussRat>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            assert!(
                r < rows && c < cols,
                "entry ({r}, {c}) outside {rows}x{cols}"
            );
            if v.is_zero() {
                continue;
            }
            *acc[r].entry(c).or_insert_with(GaussRat::zero) += &v;
        }
        let data = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMat { rows, cols, data }
    }

    /// Builds a matrix from already canonical rows.
    pub fn from_rows(cols: usize, rows: Vec<SparseRow>) -> Self {
        for row in &rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            debug_assert!(row.iter().all(|(c, v)| *c < cols && !v.is_zero()));
        }
        SparseMat {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_dense(rows: &[Vector]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().map(|r| sparsify(r)).collect();
        SparseMat {
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// The matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vector]) -> Self {
        let triplets = columns.iter().enumerate().flat_map(|(c, col)| {
            debug_assert_eq!(col.len(), rows);
            col.iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(move |(r, v)| (r, c, v.clone()))
        });
        Self::from_triplets(rows, columns.len(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseRow {
        &self.data[r]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &SparseRow> {
        self.data.iter()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    /// Canonical `(row, col, value)` listing, sorted by row then column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &GaussRat)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |(c, v)| (r, *c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> GaussRat {
        match self.data[r].binary_search_by_key(&c, |e| e.0) {
            Ok(p) => self.data[r][p].1.clone(),
            Err(_) => GaussRat::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vector> {
        self.data
            .iter()
            .map(|row| {
                let mut d = vec![GaussRat::zero(); self.cols];
                for (c, v) in row {
                    d[*c] = v.clone();
                }
                d
            })
            .collect()
    }

    pub fn transpose(&self) -> SparseMat {
        let mut data: Vec<SparseRow> = vec![Vec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row {
                data[*c].push((r, v.clone()));
            }
        }
        SparseMat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[GaussRat]) -> Vector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        self.data
            .iter()
            .map(|row| {
                let mut acc = GaussRat::zero();
                for (c, a) in row {
                    if !v[*c].is_zero() {
                        acc += &(a * &v[*c]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, GaussRat> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.data[*k] {
                        *acc.entry(*c).or_insert_with(GaussRat::zero) += &(a * b);
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMat {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    pub fn add(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| combine(a, b, &GaussRat::one()))
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &SparseMat) -> SparseMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| combine(a, b, &GaussRat::from(-1)))
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, s: &GaussRat) -> SparseMat {
        if s.is_zero() {
            return SparseMat::zero(self.rows, self.cols);
        }
        let data = self
            .data
            .iter()
            .map(|row| row.iter().map(|(c, v)| (*c, v * s)).collect())
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Stacks matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[&SparseMat]) -> SparseMat {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            data.extend(b.data.iter().cloned());
        }
        SparseMat {
            rows: data.len(),
            cols,
            data,
        }
    }
}

pub fn sparsify(v: &[GaussRat]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| (c, x.clone()))
        .collect()
}

pub fn densify(row: &SparseRow, len: usize) -> Vector {
    let mut d = vec![GaussRat::zero(); len];
    for (c, v) in row {
        d[*c] = v.clone();
    }
    d
}

pub fn is_zero_vec(v: &[GaussRat]) -> bool {
    v.iter().all(GaussRat::is_zero)
}

/// `a + s·b` for sparse rows.
fn combine(a: &SparseRow, b: &SparseRow, s: &GaussRat) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, &b[j].1 * s));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            v += &(&b[j].1 * s);
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built one row at a time.
#[derive(Clone, Debug)]
pub struct Echelon {
    cols: usize,
    /// Leading column -> row with a leading coefficient of one.
    pivots: BTreeMap<usize, SparseRow>,
}

impl Echelon {
    pub fn new(cols: usize) -> Self {
        Echelon {
            cols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    /// Reduces `row` against the current pivots and returns the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let mut start = 0;
        while start < row.len() {
            let (c, lead) = (row[start].0, row[start].1.clone());
            match self.pivots.get(&c) {
                Some(p) => {
                    let tail: SparseRow = row[start..].to_vec();
                    let reduced = combine(&tail, p, &-lead);
                    row.truncate(start);
                    row.extend(reduced);
                }
                None => start += 1,
            }
        }
        row
    }

    /// Inserts a row; returns `true` when the rank went up.
    pub fn push_row(&mut self, row: SparseRow) -> bool {
        debug_assert!(row.iter().all(|(c, _)| *c < self.cols));
        // Reduce only until the leading entry is a fresh pivot column.
        let mut row = row;
        loop {
            let Some((c, lead)) = row.first().cloned() else {
                return false;
            };
            match self.pivots.get(&c) {
                Some(p) => row = combine(&row, p, &-lead),
                None => {
                    let inv = lead.inv().expect("nonzero lead");
                    if !inv.is_one() {
                        for e in row.iter_mut() {
                            e.1 = &e.1 * &inv;
                        }
                    }
                    self.pivots.insert(c, row);
                    return true;
                }
            }
        }
    }

    pub fn push_matrix(&mut self, m: &SparseMat) {
        assert_eq!(m.cols(), self.cols);
        for row in m.row_iter() {
            self.push_row(row.clone());
        }
    }

    /// `true` when `v` lies in the row space.
    pub fn contains(&self, v: &[GaussRat]) -> bool {
        self.reduce(sparsify(v)).is_empty()
    }

    /// Brings the pivot rows into reduced row echelon form, clearing every
    /// pivot column below `limit` from all other rows.
    pub fn reduce_fully(&mut self, limit: usize) {
        let keys: Vec<usize> = self.pivots.keys().copied().filter(|&c| c < limit).collect();
        for &c in keys.iter().rev() {
            let p = self.pivots[&c].clone();
            for (_, row) in self.pivots.range_mut(..c) {
                if let Ok(pos) = row.binary_search_by_key(&c, |e| e.0) {
                    let f = -row[pos].1.clone();
                    *row = combine(row, &p, &f);
                }
            }
        }
    }

    /// Kernel basis of the row space's orthogonal complement, i.e. the null
    /// space of the matrix whose rows were pushed. One vector per free
    /// column, with a one at that column.
    pub fn kernel_basis(&self) -> Vec<Vector> {
        let mut rref = self.clone();
        rref.reduce_fully(self.cols);
        let mut free_rows: BTreeMap<usize, Vec<(usize, GaussRat)>> = BTreeMap::new();
        for (&pc, row) in &rref.pivots {
            for (c, v) in row.iter().skip(1) {
                free_rows.entry(*c).or_default().push((pc, v.clone()));
            }
        }
        (0..self.cols)
            .filter(|c| !rref.pivots.contains_key(c))
            .map(|f| {
                let mut v = vec![GaussRat::zero(); self.cols];
                v[f] = GaussRat::one();
                if let Some(entries) = free_rows.get(&f) {
                    for (pc, a) in entries {
                        v[*pc] = -a;
                    }
                }
                v
            })
            .collect()
    }
}

pub fn rank(m: &SparseMat) -> usize {
    let mut e = Echelon::new(m.cols());
    e.push_matrix(m);
    e.rank()
}

/// Basis of `{v : M v = 0}`; `cols − rank(M)` independent vectors.
pub fn kernel_basis(m: &SparseMat) -> Vec<Vector> {
    let mut e = Echelon::new(m.cols());
    e.push_matrix(m);
    e.kernel_basis()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// A particular solution (free variables set to zero).
    Particular(Vector),
    Inconsistent,
}

impl Solution {
    pub fn into_option(self) -> Option<Vector> {
        match self {
            Solution::Particular(v) => Some(v),
            Solution::Inconsistent => None,
        }
    }
}

/// Solves `M x = b` exactly.
pub fn solve(m: &SparseMat, b: &[GaussRat]) -> Solution {
    assert_eq!(b.len(), m.rows(), "rhs length must equal row count");
    let n = m.cols();
    let mut e = Echelon::new(n + 1);
    for (row, rhs) in m.row_iter().zip(b) {
        let mut r = row.clone();
        if !rhs.is_zero() {
            r.push((n, rhs.clone()));
        }
        e.push_row(r);
    }
    if e.pivots.contains_key(&n) {
        return Solution::Inconsistent;
    }
    e.reduce_fully(n);
    let mut x = vec![GaussRat::zero(); n];
    for (&pc, row) in &e.pivots {
        if let Some((c, v)) = row.last() {
            if *c == n {
                x[pc] = v.clone();
            }
        }
    }
    Solution::Particular(x)
}

/// Reusable solver for `M x = b` with many right-hand sides: the reduced
/// echelon form of `[M | I]`.
#[derive(Clone, Debug)]
pub struct Factorization {
    rows: usize,
    cols: usize,
    /// Pivot column of `M` -> transformation row (indexed by rhs position).
    solve_rows: Vec<(usize, SparseRow)>,
    /// Left null space of `M`: `t · b` must vanish for consistency.
    checks: Vec<SparseRow>,
}

impl Factorization {
    pub fn new(m: &SparseMat) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let mut e = Echelon::new(cols + rows);
        for (r, row) in m.row_iter().enumerate() {
            let mut aug = row.clone();
            aug.push((cols + r, GaussRat::one()));
            e.push_row(aug);
        }
        e.reduce_fully(cols);
        let mut solve_rows = Vec::new();
        let mut checks = Vec::new();
        for (&pc, row) in &e.pivots {
            let t: SparseRow = row
                .iter()
                .filter(|(c, _)| *c >= cols)
                .map(|(c, v)| (c - cols, v.clone()))
                .collect();
            if pc < cols {
                solve_rows.push((pc, t));
            } else {
                checks.push(t);
            }
        }
        Factorization {
            rows,
            cols,
            solve_rows,
            checks,
        }
    }

    pub fn rank(&self) -> usize {
        self.solve_rows.len()
    }

    pub fn solve(&self, b: &[GaussRat]) -> Solution {
        assert_eq!(b.len(), self.rows);
        let dot = |t: &SparseRow| -> GaussRat {
            let mut acc = GaussRat::zero();
            for (c, v) in t {
                if !b[*c].is_zero() {
                    acc += &(v * &b[*c]);
                }
            }
            acc
        };
        if self.checks.iter().any(|t| !dot(t).is_zero()) {
            return Solution::Inconsistent;
        }
        let mut x = vec![GaussRat::zero(); self.cols];
        for (pc, t) in &self.solve_rows {
            x[*pc] = dot(t);
        }
        Solution::Particular(x)
    }
}
