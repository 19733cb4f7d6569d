//! Exact linear algebra over ℚ: dense row reduction for small blocks and an
//! incremental sparse eliminator for the large relation systems.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-Rational::one()))
    }

    /// Stacks `blocks` vertically; all must share a column count.
    pub fn vstack(cols: usize, blocks: &[&Matrix]) -> Matrix {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols);
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &f * pv;
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }
}

/// Sparse row: column index to nonzero coefficient.
pub type SparseRow = BTreeMap<usize, Rational>;

/// Whether an added row enlarged the row space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowOutcome {
    Independent,
    Dependent,
}

/// Incrementally maintained reduced row echelon form of a sparse
/// homogeneous system. Lower column indices become pivots first, so column
/// order decides which unknowns end up expressed through which.
#[derive(Debug, Clone, Default)]
pub struct SparseEliminator {
    pivots: HashMap<usize, SparseRow>,
    // column -> pivot columns whose rows mention it
    occurrences: HashMap<usize, Vec<usize>>,
}

impl SparseEliminator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let hits: Vec<usize> = row.keys().copied().filter(|c| self.pivots.contains_key(c)).collect();
        for c in hits {
            let Some(f) = row.get(&c).cloned() else {
                continue;
            };
            for (col, v) in &self.pivots[&c] {
                let entry = row.entry(*col).or_insert_with(Rational::zero);
                *entry -= &f * v;
                if entry.is_zero() {
                    row.remove(col);
                }
            }
        }
        row
    }

    pub fn add_row(&mut self, row: SparseRow) -> RowOutcome {
        let row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut row = self.reduce(row);
        let Some((&pivot, lead)) = row.iter().next() else {
            return RowOutcome::Dependent;
        };
        let inv = lead.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        // clear the new pivot column from existing rows
        if let Some(users) = self.occurrences.remove(&pivot) {
            for p in users {
                let Some(prow) = self.pivots.get_mut(&p) else {
                    continue;
                };
                let Some(f) = prow.get(&pivot).cloned() else {
                    continue;
                };
                for (col, v) in &row {
                    let entry = prow.entry(*col).or_insert_with(Rational::zero);
                    *entry -= &f * v;
                    if entry.is_zero() {
                        prow.remove(col);
                    } else if *col != p {
                        self.occurrences.entry(*col).or_default().push(p);
                    }
                }
            }
        }
        for col in row.keys() {
            if *col != pivot {
                self.occurrences.entry(*col).or_default().push(pivot);
            }
        }
        self.pivots.insert(pivot, row);
        RowOutcome::Independent
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivots.contains_key(&col)
    }

    /// The pivot row for `col`, normalized so the pivot coefficient is 1.
    pub fn pivot_row(&self, col: usize) -> Option<&SparseRow> {
        self.pivots.get(&col)
    }

    /// True when every solution has `col = 0`.
    pub fn is_forced_zero(&self, col: usize) -> bool {
        self.pivots.get(&col).is_some_and(|r| r.len() == 1)
    }

    /// `col` as a combination of free columns: `col = Σ c_f · f`.
    /// Free columns map to themselves.
    pub fn express(&self, col: usize) -> SparseRow {
        match self.pivots.get(&col) {
            Some(row) => row
                .iter()
                .filter(|(c, _)| **c != col)
                .map(|(c, v)| (*c, -v.clone()))
                .collect(),
            None => BTreeMap::from([(col, Rational::one())]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    #[test]
    fn rank_and_nullspace() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let ns = a.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(Zero::is_zero));
        assert_eq!(Matrix::identity(4).rank(), 4);
        assert_eq!(Matrix::zeros(2, 3).nullspace().len(), 3);
    }

    #[test]
    fn rational_rref() {
        let a = Matrix::from_rows(vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 6)]]);
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn sparse_matches_dense() {
        let rows = [[2, -1, 0, 3], [0, 1, 1, -1], [2, 0, 1, 2], [1, 1, 1, 1]];
        let mut e = SparseEliminator::new();
        for r in rows {
            e.add_row(r.iter().enumerate().map(|(c, &v)| (c, int(v))).collect());
        }
        let dense = m(&rows.iter().map(|r| &r[..]).collect::<Vec<_>>());
        assert_eq!(e.rank(), dense.rank());
        // every pivot row avoids the other pivot columns
        for p in 0..4 {
            if let Some(row) = e.pivot_row(p) {
                for c in row.keys() {
                    assert!(*c == p || !e.is_pivot(*c));
                }
            }
        }
    }

    #[test]
    fn forced_zero_detection() {
        // x0 - x1 = 0, x1 = 0, x2 free
        let mut e = SparseEliminator::new();
        e.add_row(BTreeMap::from([(0, int(1)), (1, int(-1))]));
        assert!(!e.is_forced_zero(0));
        e.add_row(BTreeMap::from([(1, int(1))]));
        assert!(e.is_forced_zero(0));
        assert!(e.is_forced_zero(1));
        assert!(!e.is_forced_zero(2));
        assert_eq!(e.add_row(BTreeMap::from([(0, int(3))])), RowOutcome::Dependent);
    }
}
