//! Dense matrices over rationals and polynomials, with exact echelon forms.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::poly::MultiPoly;
use crate::rational::Rational;

/// The ring operations a matrix entry needs.
pub trait Entry: Clone + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

impl Entry for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Entry for MultiPoly {
    fn zero() -> Self {
        MultiPoly::zero()
    }
    fn one() -> Self {
        MultiPoly::one()
    }
    fn is_zero(&self) -> bool {
        MultiPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        MultiPoly::scale(self, c)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RatMatrix = Matrix<Rational>;
pub type PolyMatrix = Matrix<MultiPoly>;

impl<T: Entry> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds from row vectors. Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        let n = rows.len();
        Matrix { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Entry::is_zero)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let t = out[(i, j)].add(&a.mul(b));
                    out[(i, j)] = t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = T::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.scale(c)).collect() }
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Entry::neg).collect() }
    }

    /// `Σ_{k<terms} A^k / k!`, the truncated exponential of a nilpotent matrix.
    pub fn exp_nilpotent(&self, terms: usize) -> Self {
        assert_eq!(self.rows, self.cols);
        let mut acc = Self::identity(self.rows);
        let mut power = Self::identity(self.rows);
        for k in 1..terms {
            power = power.mul(self);
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power.scale(&Rational::inv_factorial(k as u32)));
        }
        acc
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows).map(|i| &self.data[i * self.cols..(i + 1) * self.cols]).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    pub rref: RatMatrix,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// The nonzero rows of the reduced form.
    pub fn basis_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rank()).map(|i| self.rref.row(i).to_vec()).collect()
    }
}

impl RatMatrix {
    pub fn rref(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if m[(r, j)].is_zero() {
                        continue;
                    }
                    let v = &m[(i, j)] - &(&f * &m[(r, j)]);
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { rref: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// Kernel basis: one vector per free column in increasing order, with a 1
    /// at that column and zeros at the other free columns.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let e = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &e.pivots {
            is_pivot[p] = true;
        }
        let mut out = Vec::new();
        for f in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (r, &p) in e.pivots.iter().enumerate() {
                v[p] = -&e.rref[(r, f)];
            }
            out.push(v);
        }
        out
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rational::one()
            } else {
                Rational::zero()
            }
        });
        let e = aug.rref();
        if e.pivots.len() < n || e.pivots[..n].iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(RatMatrix::from_fn(n, n, |i, j| e.rref[(i, n + j)].clone()))
    }

    /// Canonical row basis of the row space.
    pub fn row_space(&self) -> Vec<Vec<Rational>> {
        self.rref().basis_rows()
    }
}

/// Canonical echelon basis for the span of the given vectors.
pub fn span_basis(vectors: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = RatMatrix::from_fn(vectors.len(), dim, |i, j| vectors[i][j].clone());
    m.row_space()
}

/// Sparse row: `(column, value)` pairs sorted by column with nonzero values.
pub type SparseRow = Vec<(usize, Rational)>;

fn axpy_sparse(row: &SparseRow, factor: &Rational, pivot: &SparseRow) -> SparseRow {
    // row − factor·pivot
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        let take_row = j == pivot.len() || (i < row.len() && row[i].0 < pivot[j].0);
        let take_piv = i == row.len() || (j < pivot.len() && pivot[j].0 < row[i].0);
        if take_row {
            out.push(row[i].clone());
            i += 1;
        } else if take_piv {
            out.push((pivot[j].0, -(factor * &pivot[j].1)));
            j += 1;
        } else {
            let v = &row[i].1 - &(factor * &pivot[j].1);
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Kernel of a sparse matrix with `cols` columns, given by its rows.
///
/// Rows are reduced one at a time against the pivots found so far, which keeps
/// memory proportional to the rank rather than to the number of equations.
/// The returned basis is the free-column basis of the echelon form; callers
/// that need a canonical basis should pass it through [`span_basis`].
pub fn sparse_nullspace(cols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Vec<Vec<Rational>> {
    let mut pivots: alloc::collections::BTreeMap<usize, SparseRow> = alloc::collections::BTreeMap::new();
    for mut row in rows {
        row.retain(|(_, v)| !v.is_zero());
        row.sort_by_key(|(c, _)| *c);
        while let Some((c, v)) = row.first().cloned() {
            match pivots.get(&c) {
                Some(p) => row = axpy_sparse(&row, &v, p),
                None => {
                    let inv = v.recip();
                    let normalized = row.iter().map(|(k, x)| (*k, x * &inv)).collect();
                    pivots.insert(c, normalized);
                    break;
                }
            }
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains_key(c)).collect();
    let order: Vec<usize> = pivots.keys().rev().copied().collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for &p in &order {
                let row = &pivots[&p];
                let mut acc = Rational::zero();
                for (c, x) in &row[1..] {
                    if !v[*c].is_zero() {
                        acc += &(x * &v[*c]);
                    }
                }
                v[p] = -acc;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn mat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn nullspace_examples() {
        assert_eq!(mat(&[&[1, 2]]).nullspace(), vec![vec![q(-2), q(1)]]);
        assert!(RatMatrix::identity(3).nullspace().is_empty());
        assert_eq!(mat(&[&[1, 1, 0], &[0, 1, 1]]).nullspace(), vec![vec![q(1), q(-1), q(1)]]);
    }

    #[test]
    fn rref_is_canonical() {
        let a = mat(&[&[2, 4, 6], &[1, 2, 4]]);
        let e = a.rref();
        assert_eq!(e.pivots, vec![0, 2]);
        assert_eq!(e.basis_rows(), vec![vec![q(1), q(2), q(0)], vec![q(0), q(0), q(1)]]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        assert!(mat(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn sparse_matches_dense() {
        let a = mat(&[&[1, 1, 0, 2], &[0, 1, 1, 0], &[1, 2, 1, 2]]);
        let rows = a.to_rows().into_iter().map(|r| r.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect());
        let sparse = sparse_nullspace(4, rows);
        assert_eq!(span_basis(&sparse, 4), span_basis(&a.nullspace(), 4));
        for v in &sparse {
            assert!(a.mul_vec(v).iter().all(Rational::is_zero));
        }
    }

    #[test]
    fn nilpotent_exponential() {
        let n = mat(&[&[0, 0], &[1, 0]]);
        assert_eq!(n.exp_nilpotent(5), mat(&[&[1, 0], &[1, 1]]));
    }
}
