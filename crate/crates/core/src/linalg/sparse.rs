use std::collections::HashMap;

use super::field::Field;
use super::matrix::ExactMatrix;

/// Column-sparse matrix used for rank computations on large, sparse
/// differentials. Each column is a list of `(row, value)` with increasing rows
/// and no explicit zeros.
#[derive(Clone, Debug)]
pub struct SparseMatrix<K: Field> {
    field: K,
    rows: usize,
    cols: Vec<Vec<(usize, K::Elem)>>,
}

impl<K: Field> SparseMatrix<K> {
    pub fn new(field: &K, rows: usize) -> Self {
        SparseMatrix {
            field: field.clone(),
            rows,
            cols: Vec::new(),
        }
    }

    /// Appends a column; entries may come in any order but rows must be distinct.
    pub fn push_column(&mut self, mut entries: Vec<(usize, K::Elem)>) {
        entries.retain(|(r, v)| {
            assert!(*r < self.rows, "row {r} out of range");
            !self.field.is_zero(v)
        });
        entries.sort_by_key(|&(r, _)| r);
        self.cols.push(entries);
    }

    pub fn from_dense(m: &ExactMatrix<K>) -> Self {
        let k = m.field();
        let mut s = SparseMatrix::new(k, m.rows());
        for c in 0..m.cols() {
            let col = (0..m.rows())
                .filter(|&r| !k.is_zero(m.get(r, c)))
                .map(|r| (r, m.get(r, c).clone()))
                .collect();
            s.push_column(col);
        }
        s
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    /// Rank by left-to-right column reduction on the lowest nonzero row.
    pub fn rank(&self) -> usize {
        let k = &self.field;
        let mut pivots: HashMap<usize, Vec<(usize, K::Elem)>> = HashMap::new();
        for col in &self.cols {
            let mut cur = col.clone();
            while let Some((low, lead)) = cur.last().cloned() {
                let Some(p) = pivots.get(&low) else {
                    // Normalize so the stored pivot entry is 1.
                    let inv = k.inv(&lead);
                    for (_, v) in cur.iter_mut() {
                        *v = k.mul(v, &inv);
                    }
                    pivots.insert(low, cur);
                    break;
                };
                cur = axpy(k, &cur, &lead, p);
            }
        }
        pivots.len()
    }
}

/// `a - s * b` for sorted sparse vectors.
fn axpy<K: Field>(k: &K, a: &[(usize, K::Elem)], s: &K::Elem, b: &[(usize, K::Elem)]) -> Vec<(usize, K::Elem)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, k.neg(&k.mul(s, &b[j].1))));
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            k.sub_mul_assign(&mut v, s, &b[j].1);
            if !k.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
