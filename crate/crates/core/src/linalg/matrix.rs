use std::fmt;

use super::field::Field;

/// Dense row-major matrix over an exact field.
#[derive(Clone)]
pub struct ExactMatrix<K: Field> {
    field: K,
    rows: usize,
    cols: usize,
    data: Vec<K::Elem>,
}

impl<K: Field> PartialEq for ExactMatrix<K> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl<K: Field> fmt::Debug for ExactMatrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} over {}", self.rows, self.cols, self.field.spec())?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|e| format!("{e:?}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Row echelon data produced by Gauss-Jordan elimination.
pub(crate) struct Echelon<K: Field> {
    pub reduced: ExactMatrix<K>,
    pub pivots: Vec<usize>,
}

impl<K: Field> ExactMatrix<K> {
    pub fn zeros(field: &K, rows: usize, cols: usize) -> Self {
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &K, k: usize) -> Self {
        let mut m = Self::zeros(field, k, k);
        for i in 0..k {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &K, rows: usize, cols: usize, f: impl Fn(usize, usize) -> K::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ExactMatrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    /// Integer entries, one inner vector per row.
    pub fn from_i64_rows(field: &K, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(field, r, c, |i, j| field.from_i64(rows[i][j]))
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(field: &K, rows: usize, columns: &[Vec<K::Elem>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows));
        Self::from_fn(field, rows, columns.len(), |i, j| columns[j][i].clone())
    }

    pub fn field(&self) -> &K {
        &self.field
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

    pub fn get(&self, r: usize, c: usize) -> &K::Elem {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: K::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[K::Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    fn row_mut(&mut self, r: usize) -> &mut [K::Elem] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<K::Elem> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| self.field.is_zero(e))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scaled(&self, s: &K::Elem) -> Self {
        let k = &self.field;
        ExactMatrix {
            field: k.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| k.mul(e, s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in add");
        let k = &self.field;
        ExactMatrix {
            field: k.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| k.add(a, b)).collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let k = &self.field;
        let mut out = Self::zeros(k, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if k.is_zero(a) {
                    continue;
                }
                let neg_a = k.neg(a);
                let orow = other.row(l);
                let dst = out.row_mut(i);
                for (d, b) in dst.iter_mut().zip(orow) {
                    if !k.is_zero(b) {
                        k.sub_mul_assign(d, &neg_a, b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[K::Elem]) -> Vec<K::Elem> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        let k = &self.field;
        (0..self.rows)
            .map(|r| {
                let mut acc = k.zero();
                for (a, b) in self.row(r).iter().zip(v) {
                    if !k.is_zero(a) && !k.is_zero(b) {
                        acc = k.add(&acc, &k.mul(a, b));
                    }
                }
                acc
            })
            .collect()
    }

    /// Columns `cols` of `self`, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(&self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "row mismatch in hstack");
        Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// `row[dst] -= factor * row[src]`, touching columns `from..`.
    fn eliminate(&mut self, dst: usize, src: usize, factor: &K::Elem, from: usize) {
        let cols = self.cols;
        let (s, d) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * cols);
            (&lo[src * cols..(src + 1) * cols], &mut hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * cols);
            (&hi[..cols], &mut lo[dst * cols..(dst + 1) * cols])
        };
        let k = &self.field;
        for c in from..cols {
            if !k.is_zero(&s[c]) {
                k.sub_mul_assign(&mut d[c], factor, &s[c]);
            }
        }
    }

    /// Gauss-Jordan elimination. The pivot in each column is the first row
    /// (at or below the current pivot row) with a nonzero entry, so results
    /// are reproducible bit for bit.
    pub(crate) fn echelon(&self, full: bool) -> Echelon<K> {
        let mut m = self.clone();
        let k = self.field.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for col in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(r) = (prow..m.rows).find(|&r| !k.is_zero(m.get(r, col))) else {
                continue;
            };
            m.swap_rows(prow, r);
            let inv = k.inv(m.get(prow, col));
            if !k.is_one(&inv) {
                for c in col..m.cols {
                    let v = k.mul(m.get(prow, c), &inv);
                    m.set(prow, c, v);
                }
            }
            let start = if full { 0 } else { prow + 1 };
            for r in start..m.rows {
                if r == prow {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if !k.is_zero(&factor) {
                    m.eliminate(r, prow, &factor, col);
                }
            }
            pivots.push(col);
            prow += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon(false).pivots.len()
    }

    /// Columns spanning the kernel, one per free column of the reduced form.
    pub fn kernel_basis(&self) -> Self {
        let k = &self.field;
        let ech = self.echelon(true);
        let free: Vec<usize> = (0..self.cols).filter(|c| !ech.pivots.contains(c)).collect();
        let mut basis = Self::zeros(k, self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            basis.set(f, j, k.one());
            for (r, &p) in ech.pivots.iter().enumerate() {
                let v = ech.reduced.get(r, f);
                if !k.is_zero(v) {
                    basis.set(p, j, k.neg(v));
                }
            }
        }
        basis
    }

    /// Indices of a maximal independent set of columns (the pivot columns).
    pub fn independent_columns(&self) -> Vec<usize> {
        self.echelon(false).pivots
    }

    /// Inverse of a square matrix, or `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let aug = self.hstack(&Self::identity(&self.field, n));
        let ech = aug.echelon(true);
        if ech.pivots.iter().take(n).enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(ech.reduced.select_columns(&cols))
    }

    /// A left inverse `X` with `X * self = I`, for a matrix of full column
    /// rank. `X` is supported on a deterministic choice of independent rows.
    pub fn left_inverse(&self) -> Option<Self> {
        let k = &self.field;
        let rows = self.transpose().independent_columns();
        if rows.len() < self.cols {
            return None;
        }
        let square = self.select_rows(&rows);
        let inv = square.inverse()?;
        let mut x = Self::zeros(k, self.cols, self.rows);
        for (j, &r) in rows.iter().enumerate() {
            for i in 0..self.cols {
                x.set(i, r, inv.get(i, j).clone());
            }
        }
        Some(x)
    }
}
