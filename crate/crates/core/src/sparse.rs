//! Exact sparse-matrix algebra on small explicit matrices.
//!
//! Entries are kept as triples sorted in column-major order (column, then
//! row). That ordering is the canonical enumeration used everywhere else in
//! the crate: generator partitioning, incidence edge ids and shard output.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::distribution::DegreeDistribution;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SparseError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    EmptyShape { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is outside a {rows}x{cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate entry at ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("dimension mismatch: {left_rows}x{left_cols} and {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("matrix has a diagonal entry at ({0}, {0})")]
    DiagonalEntry(usize),
    #[error("matrix has non-binary value {value} at ({row}, {col})")]
    NonBinary { row: usize, col: usize, value: u64 },
    #[error("closed wedge sum {0} is not divisible by 6")]
    NotDivisible(u64),
}

pub type Result<T> = std::result::Result<T, SparseError>;

/// One stored nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Triple {
    pub row: usize,
    pub col: usize,
    pub value: u64,
}

impl Triple {
    #[inline]
    fn key(&self) -> (usize, usize) {
        (self.col, self.row)
    }
}

/// Sparse matrix of non-negative integers in column-major triple form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Triple>,
}

impl SparseMatrix {
    /// Builds a matrix from unordered `(row, col, value)` triples. Zero values
    /// are dropped; duplicates and out-of-range indices are rejected.
    pub fn from_triples<I>(rows: usize, cols: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, u64)>,
    {
        if rows == 0 || cols == 0 {
            return Err(SparseError::EmptyShape { rows, cols });
        }
        let mut entries = Vec::new();
        for (row, col, value) in triples {
            if row >= rows || col >= cols {
                return Err(SparseError::OutOfRange {
                    row,
                    col,
                    rows,
                    cols,
                });
            }
            if value != 0 {
                entries.push(Triple { row, col, value });
            }
        }
        entries.sort_unstable_by_key(Triple::key);
        if let Some(w) = entries.windows(2).find(|w| w[0].key() == w[1].key()) {
            return Err(SparseError::Duplicate {
                row: w[0].row,
                col: w[0].col,
            });
        }
        Ok(SparseMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Caller guarantees the invariants (sorted, in range, unique, nonzero).
    fn from_sorted_unchecked(rows: usize, cols: usize, entries: Vec<Triple>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].key() < w[1].key()));
        debug_assert!(entries
            .iter()
            .all(|t| t.row < rows && t.col < cols && t.value != 0));
        SparseMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_triples(rows, cols, std::iter::empty())
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_triples(n, n, (0..n).map(|i| (i, i, 1)))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Stored entries in column-major order.
    pub fn triples(&self) -> &[Triple] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.position(row, col)
            .map(|p| self.entries[p].value)
            .unwrap_or(0)
    }

    /// Index of `(row, col)` in the column-major triple list.
    pub fn position(&self, row: usize, col: usize) -> Option<usize> {
        self.entries
            .binary_search_by_key(&(col, row), Triple::key)
            .ok()
    }

    pub fn is_binary(&self) -> bool {
        self.entries.iter().all(|t| t.value == 1)
    }

    pub fn value_sum(&self) -> Result<u64> {
        self.entries.iter().try_fold(0u64, |acc, t| {
            acc.checked_add(t.value)
                .ok_or(SparseError::Overflow("value sum"))
        })
    }

    pub fn diagonal_entries(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .filter(|t| t.row == t.col)
            .map(|t| t.row)
    }

    pub fn is_symmetric(&self) -> bool {
        self.first_asymmetry().is_none()
    }

    fn first_asymmetry(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        self.entries
            .iter()
            .find(|t| self.get(t.col, t.row) != t.value)
            .map(|t| (t.row, t.col))
    }

    /// Column pointer array: entries of column `j` are `col_ptr[j]..col_ptr[j + 1]`.
    pub fn col_ptr(&self) -> Vec<usize> {
        let mut ptr = vec![0usize; self.cols + 1];
        for t in &self.entries {
            ptr[t.col + 1] += 1;
        }
        for j in 0..self.cols {
            ptr[j + 1] += ptr[j];
        }
        ptr
    }

    /// Number of stored entries in each row.
    pub fn row_nnz(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.rows];
        for t in &self.entries {
            counts[t.row] += 1;
        }
        counts
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut entries: Vec<Triple> = self
            .entries
            .iter()
            .map(|t| Triple {
                row: t.col,
                col: t.row,
                value: t.value,
            })
            .collect();
        entries.sort_unstable_by_key(Triple::key);
        SparseMatrix::from_sorted_unchecked(self.cols, self.rows, entries)
    }

    /// Copy with the entry at `(row, col)` removed, if present.
    pub fn without_entry(&self, row: usize, col: usize) -> SparseMatrix {
        let mut out = self.clone();
        if let Some(p) = out.position(row, col) {
            out.entries.remove(p);
        }
        out
    }

    /// Dense row-major copy. Only meant for small test and oracle matrices.
    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut dense = vec![vec![0u64; self.cols]; self.rows];
        for t in &self.entries {
            dense[t.row][t.col] = t.value;
        }
        dense
    }
}

/// Kronecker product. Output entry `(ia * b.rows + ib, ja * b.cols + jb)`
/// holds `a(ia, ja) * b(ib, jb)`, produced directly in column-major order.
pub fn kron(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    let rows = a
        .rows
        .checked_mul(b.rows)
        .ok_or(SparseError::Overflow("kron row count"))?;
    let cols = a
        .cols
        .checked_mul(b.cols)
        .ok_or(SparseError::Overflow("kron column count"))?;
    let nnz = a
        .nnz()
        .checked_mul(b.nnz())
        .ok_or(SparseError::Overflow("kron nonzero count"))?;

    let a_ptr = a.col_ptr();
    let b_ptr = b.col_ptr();
    let mut entries = Vec::with_capacity(nnz);
    for ja in 0..a.cols {
        let a_col = &a.entries[a_ptr[ja]..a_ptr[ja + 1]];
        if a_col.is_empty() {
            continue;
        }
        for jb in 0..b.cols {
            let b_col = &b.entries[b_ptr[jb]..b_ptr[jb + 1]];
            let col = ja * b.cols + jb;
            for ta in a_col {
                for tb in b_col {
                    let value = ta
                        .value
                        .checked_mul(tb.value)
                        .ok_or(SparseError::Overflow("kron value"))?;
                    entries.push(Triple {
                        row: ta.row * b.rows + tb.row,
                        col,
                        value,
                    });
                }
            }
        }
    }
    Ok(SparseMatrix::from_sorted_unchecked(rows, cols, entries))
}

/// Kronecker product of a non-empty sequence, folded left to right.
pub fn kron_all<'a, I>(mats: I) -> Result<SparseMatrix>
where
    I: IntoIterator<Item = &'a SparseMatrix>,
{
    let mut acc = SparseMatrix::identity(1)?;
    for m in mats {
        acc = kron(&acc, m)?;
    }
    Ok(acc)
}

/// Plus-times matrix product.
pub fn matmul(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.cols != b.rows {
        return Err(SparseError::DimensionMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    // C(:, j) = sum_k A(:, k) * B(k, j)
    let a_ptr = a.col_ptr();
    let mut entries = Vec::new();
    let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
    let mut start = 0;
    while start < b.entries.len() {
        let col = b.entries[start].col;
        let mut end = start;
        while end < b.entries.len() && b.entries[end].col == col {
            let tb = b.entries[end];
            for ta in &a.entries[a_ptr[tb.row]..a_ptr[tb.row + 1]] {
                let prod = ta
                    .value
                    .checked_mul(tb.value)
                    .ok_or(SparseError::Overflow("matmul product"))?;
                let slot = acc.entry(ta.row).or_insert(0);
                *slot = slot
                    .checked_add(prod)
                    .ok_or(SparseError::Overflow("matmul sum"))?;
            }
            end += 1;
        }
        entries.extend(
            std::mem::take(&mut acc)
                .into_iter()
                .filter(|&(_, v)| v != 0)
                .map(|(row, value)| Triple { row, col, value }),
        );
        start = end;
    }
    Ok(SparseMatrix::from_sorted_unchecked(a.rows, b.cols, entries))
}

/// Element-wise product over the intersection of the two sparsity patterns.
pub fn ewise_mult(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.shape() != b.shape() {
        return Err(SparseError::DimensionMismatch {
            left_rows: a.rows,
            left_cols: a.cols,
            right_rows: b.rows,
            right_cols: b.cols,
        });
    }
    let mut entries = Vec::with_capacity(a.nnz().min(b.nnz()));
    let (mut i, mut j) = (0, 0);
    while i < a.entries.len() && j < b.entries.len() {
        let (ta, tb) = (a.entries[i], b.entries[j]);
        match ta.key().cmp(&tb.key()) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let value = ta
                    .value
                    .checked_mul(tb.value)
                    .ok_or(SparseError::Overflow("element-wise product"))?;
                entries.push(Triple { value, ..ta });
                i += 1;
                j += 1;
            }
        }
    }
    Ok(SparseMatrix::from_sorted_unchecked(a.rows, a.cols, entries))
}

/// `1ᵀ ((A A) .* A) 1`: six times the triangle count for a symmetric,
/// loop-free binary matrix.
///
/// `A A` is only evaluated on the pattern of `A`, so a star with many points
/// costs O(nnz log nnz) instead of materializing its dense leaf block.
pub fn closed_wedge_sum(a: &SparseMatrix) -> Result<u64> {
    if !a.is_square() {
        return Err(SparseError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    // rows of A are the columns of Aᵀ
    let at = a.transpose();
    let (col_ptr, row_ptr) = (a.col_ptr(), at.col_ptr());
    let overflow = || SparseError::Overflow("closed wedge sum");
    let mut total = 0u64;
    for t in &a.entries {
        // (A A)(i, j) = Σ_k A(i, k) A(k, j)
        let row_i = &at.entries[row_ptr[t.row]..row_ptr[t.row + 1]];
        let col_j = &a.entries[col_ptr[t.col]..col_ptr[t.col + 1]];
        let mut walks = 0u64;
        if row_i.len() <= col_j.len() {
            for r in row_i {
                // r.row is k, r.value is A(i, k)
                if let Ok(p) = col_j.binary_search_by_key(&r.row, |c| c.row) {
                    let w = r.value.checked_mul(col_j[p].value).ok_or_else(overflow)?;
                    walks = walks.checked_add(w).ok_or_else(overflow)?;
                }
            }
        } else {
            for c in col_j {
                if let Ok(p) = row_i.binary_search_by_key(&c.row, |r| r.row) {
                    let w = c.value.checked_mul(row_i[p].value).ok_or_else(overflow)?;
                    walks = walks.checked_add(w).ok_or_else(overflow)?;
                }
            }
        }
        let term = walks.checked_mul(t.value).ok_or_else(overflow)?;
        total = total.checked_add(term).ok_or_else(overflow)?;
    }
    Ok(total)
}

pub fn triangle_count(a: &SparseMatrix) -> Result<u64> {
    if !a.is_square() {
        return Err(SparseError::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    if let Some((row, col)) = a.first_asymmetry() {
        return Err(SparseError::Asymmetric { row, col });
    }
    if let Some(v) = a.diagonal_entries().next() {
        return Err(SparseError::DiagonalEntry(v));
    }
    let s = closed_wedge_sum(a)?;
    if s % 6 != 0 {
        return Err(SparseError::NotDivisible(s));
    }
    Ok(s / 6)
}

/// Degree distribution where the degree of a vertex is its row nnz; a self
/// loop counts once.
pub fn degrees(a: &SparseMatrix) -> DegreeDistribution {
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    for d in a.row_nnz() {
        *hist.entry(d).or_insert(0) += 1;
    }
    DegreeDistribution::from_counts(hist.into_iter().map(|(d, c)| (d as u64, c)))
}

/// Out- and in-incidence matrices, one row per edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidencePair {
    pub e_out: SparseMatrix,
    pub e_in: SparseMatrix,
}

impl IncidencePair {
    pub fn edges(&self) -> usize {
        self.e_out.rows()
    }

    pub fn vertices(&self) -> usize {
        self.e_out.cols()
    }

    /// `E_outᵀ E_in`.
    pub fn adjacency(&self) -> Result<SparseMatrix> {
        matmul(&self.e_out.transpose(), &self.e_in)
    }

    /// Source and destination vertex of every edge, in edge-id order.
    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(0, 0); self.edges()];
        for t in self.e_out.triples() {
            out[t.row].0 = t.col;
        }
        for t in self.e_in.triples() {
            out[t.row].1 = t.col;
        }
        out
    }

    pub fn kron(&self, other: &IncidencePair) -> Result<IncidencePair> {
        Ok(IncidencePair {
            e_out: kron(&self.e_out, &other.e_out)?,
            e_in: kron(&self.e_in, &other.e_in)?,
        })
    }
}

/// Edge `e` is the `e`-th stored entry of `a` in column-major order.
pub fn incidence_pair(a: &SparseMatrix) -> Result<IncidencePair> {
    if let Some(t) = a.entries.iter().find(|t| t.value != 1) {
        return Err(SparseError::NonBinary {
            row: t.row,
            col: t.col,
            value: t.value,
        });
    }
    let edges = a.nnz();
    let e_out = SparseMatrix::from_triples(
        edges,
        a.rows,
        a.entries.iter().enumerate().map(|(e, t)| (e, t.row, 1)),
    )?;
    let e_in = SparseMatrix::from_triples(
        edges,
        a.cols,
        a.entries.iter().enumerate().map(|(e, t)| (e, t.col, 1)),
    )?;
    Ok(IncidencePair { e_out, e_in })
}
