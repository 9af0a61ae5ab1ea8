//! Row-compressed sparse storage.

use crate::error::{Error, Result};

/// Compressed sparse row matrix. Column indices within a row are strictly
/// increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr<T> {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<T>,
}

/// Borrowed view of one sparse row.
#[derive(Clone, Copy, Debug)]
pub struct RowView<'a, T> {
    pub indices: &'a [usize],
    pub values: &'a [T],
}

impl<'a, T: Copy> RowView<'a, T> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }
}

impl<'a> RowView<'a, f64> {
    pub fn to_dense(&self, n_cols: usize) -> Vec<f64> {
        let mut out = vec![0.0; n_cols];
        for (j, v) in self.iter() {
            out[j] = v;
        }
        out
    }
}

impl<T: Copy> Csr<T> {
    pub fn empty(n_cols: usize) -> Self {
        Csr {
            n_cols,
            indptr: vec![0],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Appends a row given as (column, value) pairs sorted by column.
    pub fn push_row<I: IntoIterator<Item = (usize, T)>>(&mut self, entries: I) -> Result<()> {
        let start = self.indices.len();
        for (j, v) in entries {
            let err = if j >= self.n_cols {
                Some(format!("column {j} out of range for {} columns", self.n_cols))
            } else if self.indices.len() > start && self.indices[self.indices.len() - 1] >= j {
                Some("row entries must have strictly increasing columns".to_string())
            } else {
                None
            };
            if let Some(msg) = err {
                self.indices.truncate(start);
                self.values.truncate(start);
                return Err(Error::InvalidCorpus(msg));
            }
            self.indices.push(j);
            self.values.push(v);
        }
        self.indptr.push(self.indices.len());
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> RowView<'_, T> {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        RowView {
            indices: &self.indices[a..b],
            values: &self.values[a..b],
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = RowView<'_, T>> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    /// Value at (i, j), if stored.
    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        let row = self.row(i);
        row.indices.binary_search(&j).ok().map(|pos| row.values[pos])
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(T) -> U) -> Csr<U> {
        Csr {
            n_cols: self.n_cols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Csr<T> {
        let mut out = Csr::empty(self.n_cols);
        for &i in rows {
            let r = self.row(i);
            out.indices.extend_from_slice(r.indices);
            out.values.extend_from_slice(r.values);
            out.indptr.push(out.indices.len());
        }
        out
    }

    /// Keeps only the listed columns (sorted, distinct), renumbering them
    /// 0..cols.len().
    pub fn select_columns(&self, cols: &[usize]) -> Csr<T> {
        let mut remap = vec![usize::MAX; self.n_cols];
        for (new, &old) in cols.iter().enumerate() {
            remap[old] = new;
        }
        let mut out = Csr::empty(cols.len());
        for r in self.rows() {
            for (j, v) in r.iter() {
                if remap[j] != usize::MAX {
                    out.indices.push(remap[j]);
                    out.values.push(v);
                }
            }
            out.indptr.push(out.indices.len());
        }
        out
    }
}

impl Csr<f64> {
    pub fn row_dense(&self, i: usize) -> Vec<f64> {
        self.row(i).to_dense(self.n_cols)
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut out = Csr::empty(n_cols);
        for r in rows {
            if r.len() != n_cols {
                return Err(Error::LengthMismatch {
                    left: n_cols,
                    right: r.len(),
                });
            }
            out.push_row(r.iter().copied().enumerate().filter(|&(_, v)| v != 0.0))?;
        }
        Ok(out)
    }
}
