//! Sparse column-compressed and dense integer matrices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integer::Integer;

/// Sparse integer matrix stored by columns; each column is sorted by row
/// index and holds no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, Integer)>>,
}

/// Coordinate-list form used for JSON export.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, Integer)>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> SparseMatrix {
        SparseMatrix {
            rows: n,
            cols: n,
            columns: (0..n).map(|i| vec![(i, Integer::ONE)]).collect(),
        }
    }

    /// Sums duplicate coordinates and drops zeros.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Integer)>,
    ) -> SparseMatrix {
        let mut acc: Vec<BTreeMap<usize, Integer>> = vec![BTreeMap::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}×{cols}");
            *acc[c].entry(r).or_default() += &v;
        }
        SparseMatrix {
            rows,
            cols,
            columns: acc
                .into_iter()
                .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    /// Builds from columns given as maps.
    pub fn from_columns(rows: usize, columns: Vec<BTreeMap<usize, Integer>>) -> SparseMatrix {
        SparseMatrix {
            rows,
            cols: columns.len(),
            columns: columns
                .into_iter()
                .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
                .collect(),
        }
    }

    pub fn from_dense(dense: &DenseMatrix) -> SparseMatrix {
        let mut triplets = Vec::new();
        for r in 0..dense.rows() {
            for c in 0..dense.cols() {
                if !dense[(r, c)].is_zero() {
                    triplets.push((r, c, dense[(r, c)].clone()));
                }
            }
        }
        Self::from_triplets(dense.rows(), dense.cols(), triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &[(usize, Integer)] {
        &self.columns[c]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn get(&self, r: usize, c: usize) -> Integer {
        match self.columns[c].binary_search_by_key(&r, |(i, _)| *i) {
            Ok(pos) => self.columns[c][pos].1.clone(),
            Err(_) => Integer::ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Integer)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.triplets().map(|(r, c, v)| (c, r, v.clone())),
        )
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}×{} times {}×{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other
            .columns
            .iter()
            .map(|col| {
                let mut acc: BTreeMap<usize, Integer> = BTreeMap::new();
                for (k, b) in col {
                    for (i, a) in &self.columns[*k] {
                        *acc.entry(*i).or_default() += &(a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(Self::from_columns(self.rows, columns))
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        Ok(Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets()
                .map(|(r, c, v)| (r, c, v.clone()))
                .chain(other.triplets().map(|(r, c, v)| (r, c, -v))),
        ))
    }

    /// `self · v` for a sparse vector.
    pub fn apply(&self, v: &BTreeMap<usize, Integer>) -> BTreeMap<usize, Integer> {
        let mut out: BTreeMap<usize, Integer> = BTreeMap::new();
        for (c, x) in v {
            for (r, a) in &self.columns[*c] {
                *out.entry(*r).or_default() += &(a * x);
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.triplets() {
            d[(r, c)] = v.clone();
        }
        d
    }

    pub fn to_coo(&self) -> CooMatrix {
        CooMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.triplets().map(|(r, c, v)| (r, c, v.clone())).collect(),
        }
    }

    pub fn from_coo(coo: &CooMatrix) -> SparseMatrix {
        Self::from_triplets(coo.rows, coo.cols, coo.entries.iter().cloned())
    }
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Integer>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix {
            rows,
            cols,
            data: vec![Integer::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> DenseMatrix {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Integer::ONE;
        }
        m
    }

    pub fn from_rows<T: Into<Integer> + Clone>(rows: &[Vec<T>]) -> DenseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Integer] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Integer>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Integer> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Integer::is_zero)
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Integer]) -> Vec<Integer> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in product");
        (0..self.rows)
            .map(|i| {
                let mut acc = Integer::ZERO;
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += &(a * b);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Matrix made of the given rows.
    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> DenseMatrix {
        let rows: Vec<usize> = rows.into_iter().collect();
        let mut out = Self::zeros(rows.len(), self.cols);
        for (i, &r) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out[(i, j)] = self[(r, j)].clone();
            }
        }
        out
    }

    pub fn select_cols(&self, cols: impl IntoIterator<Item = usize>) -> DenseMatrix {
        self.transpose().select_rows(cols).transpose()
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, other.rows, "row mismatch in concatenation");
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c · row[src]
    pub(crate) fn add_row(&mut self, dst: usize, src: usize, c: &Integer) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let t = s * c;
                self.data[dst * self.cols + j] += &t;
            }
        }
    }

    /// col[dst] += c · col[src]
    pub(crate) fn add_col(&mut self, dst: usize, src: usize, c: &Integer) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let t = s * c;
                self.data[i * self.cols + dst] += &t;
            }
        }
    }

    pub(crate) fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self.data[r * self.cols + j];
            self.data[r * self.cols + j] = v;
        }
    }

    pub(crate) fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let v = -&self.data[i * self.cols + c];
            self.data[i * self.cols + c] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Integer;

    fn index(&self, (r, c): (usize, usize)) -> &Integer {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Integer {
        &mut self.data[r * self.cols + c]
    }
}
