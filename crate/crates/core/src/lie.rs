//! Nilpotent Lie algebras given by structure constants.
//!
//! Brackets are supplied only for pairs `i > j`; the full table is filled in by
//! antisymmetry. A basis is Jordan–Hölder when every `[X_i, X_j]` is supported
//! strictly below `min(i, j)`, which makes every `ad X` strictly lower
//! triangular and forces `X_0` to be central.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::{span_basis, Entry, PolyMatrix, RatMatrix};
use crate::poly::MultiPoly;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LieError {
    #[error("dimension must be positive")]
    EmptyAlgebra,
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("bracket ({i}, {j}) must be given with i > j")]
    NotLowerPair { i: usize, j: usize },
    #[error("bracket ({i}, {j}) given twice")]
    DuplicateBracket { i: usize, j: usize },
    #[error("vector of length {got} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lower central series stabilizes at a nonzero subspace of dimension {0}")]
    NotNilpotent(usize),
    #[error("algebra failed validation:\n{0}")]
    Invalid(ValidationReport),
}

/// Sparse vector: `(basis index, coefficient)` with nonzero coefficients, sorted by index.
pub type SparseVec = Vec<(usize, Rational)>;

#[derive(Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    labels: Vec<String>,
    /// `table[i * n + j] = [X_i, X_j]`
    table: Vec<SparseVec>,
}

impl fmt::Debug for LieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, j, v) in self.stored_brackets() {
            m.entry(&(i, j), &v);
        }
        m.finish()
    }
}

fn sparsify(dense: Vec<Rational>) -> SparseVec {
    dense.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
}

impl LieAlgebra {
    /// Builds and validates. Fails unless Jacobi, the Jordan–Hölder support
    /// condition and nilpotency all hold.
    pub fn new(labels: Vec<String>, brackets: Vec<(usize, usize, SparseVec)>) -> Result<Self, LieError> {
        let alg = Self::new_unchecked(labels, brackets)?;
        let report = alg.validate();
        if report.passed() {
            Ok(alg)
        } else {
            Err(LieError::Invalid(report))
        }
    }

    /// Checks only the encoding (index ranges, `i > j`, no duplicates).
    pub fn new_unchecked(labels: Vec<String>, brackets: Vec<(usize, usize, SparseVec)>) -> Result<Self, LieError> {
        let n = labels.len();
        if n == 0 {
            return Err(LieError::EmptyAlgebra);
        }
        for (k, l) in labels.iter().enumerate() {
            if labels[..k].contains(l) {
                return Err(LieError::DuplicateLabel(l.clone()));
            }
        }
        let mut table = vec![SparseVec::new(); n * n];
        let mut seen = BTreeMap::new();
        for (i, j, v) in brackets {
            for idx in [i, j].into_iter().chain(v.iter().map(|(k, _)| *k)) {
                if idx >= n {
                    return Err(LieError::IndexOutOfRange { index: idx, dim: n });
                }
            }
            if i <= j {
                return Err(LieError::NotLowerPair { i, j });
            }
            if seen.insert((i, j), ()).is_some() {
                return Err(LieError::DuplicateBracket { i, j });
            }
            let mut dense = vec![Rational::zero(); n];
            for (k, c) in v {
                dense[k] += &c;
            }
            let neg: Vec<Rational> = dense.iter().map(|c| -c).collect();
            table[i * n + j] = sparsify(dense);
            table[j * n + i] = sparsify(neg);
        }
        Ok(LieAlgebra { labels, table })
    }

    /// Default labels `X0, X1, ...`.
    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("X{i}")).collect()
    }

    /// The zero algebra. Only arises as the predual of a one-dimensional algebra.
    pub fn zero() -> Self {
        LieAlgebra { labels: Vec::new(), table: Vec::new() }
    }

    pub fn abelian(n: usize) -> Self {
        Self::new_unchecked(Self::default_labels(n), Vec::new()).expect("abelian algebra is well formed")
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `[X_i, X_j]` as a sparse vector.
    pub fn structure(&self, i: usize, j: usize) -> &SparseVec {
        &self.table[i * self.dim() + j]
    }

    /// Structure constant `c_{ij}^k`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.structure(i, j).iter().find(|(idx, _)| *idx == k).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Nonzero brackets `(i, j, [X_i, X_j])` with `i > j`, in increasing `(i, j)` order.
    pub fn stored_brackets(&self) -> impl Iterator<Item = (usize, usize, &SparseVec)> {
        let n = self.dim();
        (0..n).flat_map(move |i| (0..i).map(move |j| (i, j))).filter_map(move |(i, j)| {
            let v = self.structure(i, j);
            (!v.is_empty()).then_some((i, j, v))
        })
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(Vec::is_empty)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.dim()];
        v[i] = Rational::one();
        v
    }

    fn check_len(&self, len: usize) -> Result<(), LieError> {
        if len != self.dim() {
            return Err(LieError::DimensionMismatch { expected: self.dim(), got: len });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, LieError> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok(self.bracket_with(x, y))
    }

    /// Bilinear extension of the structure constants to any coefficient ring.
    /// Panics on length mismatch.
    pub fn bracket_with<T: Entry>(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim();
        assert!(x.len() == n && y.len() == n, "bracket operand length mismatch");
        let mut out = vec![T::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let s = self.structure(i, j);
                if s.is_empty() {
                    continue;
                }
                let p = xi.mul(yj);
                for (k, c) in s {
                    out[*k] = out[*k].add(&p.scale(c));
                }
            }
        }
        out
    }

    /// Matrix of `ad X`: column `j` holds `[X, X_j]`.
    pub fn ad_matrix(&self, x: &[Rational]) -> Result<RatMatrix, LieError> {
        self.check_len(x.len())?;
        let n = self.dim();
        let mut m = RatMatrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for j in 0..n {
                for (k, c) in self.structure(i, j) {
                    let v = &m[(*k, j)] + &(xi * c);
                    m[(*k, j)] = v;
                }
            }
        }
        Ok(m)
    }

    /// `ad X` for the symbolic element `X = Σ_i x_{offset+i} X_i`:
    /// entry `(r, j)` is `Σ_i x_{offset+i} c_{ij}^r`.
    pub fn symbolic_ad(&self, offset: usize) -> PolyMatrix {
        let n = self.dim();
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                for (r, c) in self.structure(i, j) {
                    let mut p = m[(*r, j)].clone();
                    p.add_term(crate::poly::Monomial::var(offset + i), c.clone());
                    m[(*r, j)] = p;
                }
            }
        }
        m
    }

    /// Symbolic element `Σ_i x_{offset+i} X_i` as a coefficient vector.
    pub fn symbolic_element(&self, offset: usize) -> Vec<MultiPoly> {
        (0..self.dim()).map(|i| MultiPoly::var(offset + i)).collect()
    }

    /// Center: the common kernel of all `ad X_j`.
    pub fn center(&self) -> Subspace {
        let n = self.dim();
        // Row (j, k) of the system: Σ_i x_i c_{ij}^k = 0.
        let rows: Vec<Vec<Rational>> = (0..n)
            .flat_map(|j| (0..n).map(move |k| (j, k)))
            .map(|(j, k)| (0..n).map(|i| self.constant(i, j, k)).collect::<Vec<_>>())
            .filter(|r: &Vec<Rational>| r.iter().any(|c| !c.is_zero()))
            .collect();
        if rows.is_empty() {
            return Subspace::whole(n);
        }
        let m = RatMatrix::from_rows(rows);
        Subspace::from_vectors(n, &m.nullspace())
    }

    /// Lower central series `g = g^1 ⊋ g^2 ⊋ ... ⊋ g^{s+1} = 0`, returned
    /// without the trailing zero term, so its length is the step.
    pub fn lower_central_series(&self) -> Result<Vec<Subspace>, LieError> {
        let n = self.dim();
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut series = vec![Subspace::whole(n)];
        loop {
            let cur = series.last().unwrap();
            let mut gens = Vec::new();
            for i in 0..n {
                let xi = self.basis_vector(i);
                for v in cur.basis() {
                    let b = self.bracket_with(&xi, v);
                    if b.iter().any(|c| !c.is_zero()) {
                        gens.push(b);
                    }
                }
            }
            let next = Subspace::from_vectors(n, &gens);
            if next.dim() == 0 {
                return Ok(series);
            }
            if next.dim() == cur.dim() {
                return Err(LieError::NotNilpotent(next.dim()));
            }
            series.push(next);
        }
    }

    /// Nilpotency step. A nonzero abelian algebra has step 1.
    pub fn step(&self) -> Result<usize, LieError> {
        self.lower_central_series().map(|s| s.len())
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut antisymmetry_failures = Vec::new();
        for i in 0..n {
            if !self.structure(i, i).is_empty() {
                antisymmetry_failures.push((i, i));
            }
            for j in 0..i {
                let neg: SparseVec = self.structure(j, i).iter().map(|(k, c)| (*k, -c)).collect();
                if &neg != self.structure(i, j) {
                    antisymmetry_failures.push((i, j));
                }
            }
        }
        let mut jacobi_failures = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (self.basis_vector(i), self.basis_vector(j), self.basis_vector(k));
                    let t1 = self.bracket_with(&a, &self.bracket_with(&b, &c));
                    let t2 = self.bracket_with(&b, &self.bracket_with(&c, &a));
                    let t3 = self.bracket_with(&c, &self.bracket_with(&a, &b));
                    if (0..n).any(|r| !(&(&t1[r] + &t2[r]) + &t3[r]).is_zero()) {
                        jacobi_failures.push((i, j, k));
                    }
                }
            }
        }
        let mut jordan_holder_failures = Vec::new();
        for (i, j, v) in self.stored_brackets() {
            if v.iter().any(|(k, _)| *k >= j.min(i)) {
                jordan_holder_failures.push((i, j));
            }
        }
        let step = self.step().ok();
        ValidationReport {
            dim: n,
            antisymmetry_failures,
            jacobi_failures,
            jordan_holder_failures,
            step,
            center_dim: self.center().dim(),
        }
    }

    /// The algebra on `span{X_first, …}` whose bracket is `[·,·]` followed by
    /// the projection that drops components below `first`.
    pub fn truncate_below(&self, first: usize, labels: Vec<String>) -> Result<LieAlgebra, LieError> {
        let n = self.dim();
        if first >= n {
            return Ok(LieAlgebra::zero());
        }
        let mut brackets = Vec::new();
        for (i, j, v) in self.stored_brackets() {
            if j < first {
                continue;
            }
            let w: SparseVec = v.iter().filter(|(k, _)| *k >= first).map(|(k, c)| (k - first, c.clone())).collect();
            if !w.is_empty() {
                brackets.push((i - first, j - first, w));
            }
        }
        debug_assert!(labels.len() == n - first);
        LieAlgebra::new(labels, brackets)
    }
}

/// Outcome of [`LieAlgebra::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub dim: usize,
    pub antisymmetry_failures: Vec<(usize, usize)>,
    pub jacobi_failures: Vec<(usize, usize, usize)>,
    pub jordan_holder_failures: Vec<(usize, usize)>,
    /// `None` when the algebra is not nilpotent.
    pub step: Option<usize>,
    pub center_dim: usize,
}

impl ValidationReport {
    pub fn antisymmetry_ok(&self) -> bool {
        self.antisymmetry_failures.is_empty()
    }
    pub fn jacobi_ok(&self) -> bool {
        self.jacobi_failures.is_empty()
    }
    pub fn jordan_holder_ok(&self) -> bool {
        self.jordan_holder_failures.is_empty()
    }
    pub fn nilpotent(&self) -> bool {
        self.step.is_some()
    }
    pub fn passed(&self) -> bool {
        self.antisymmetry_ok() && self.jacobi_ok() && self.jordan_holder_ok() && self.nilpotent()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(f, "antisymmetry: {}", mark(self.antisymmetry_ok()))?;
        write!(f, "jacobi: {}", mark(self.jacobi_ok()))?;
        for (i, j, k) in &self.jacobi_failures {
            write!(f, " ({i},{j},{k})")?;
        }
        writeln!(f)?;
        write!(f, "jordan-holder: {}", mark(self.jordan_holder_ok()))?;
        for (i, j) in &self.jordan_holder_failures {
            write!(f, " [{i},{j}]")?;
        }
        writeln!(f)?;
        match self.step {
            Some(s) => writeln!(f, "nilpotent: pass (step {s})")?,
            None => writeln!(f, "nilpotent: FAIL")?,
        }
        write!(f, "center dimension: {}", self.center_dim)
    }
}

/// A subspace held as a canonical reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl Subspace {
    pub fn from_vectors(ambient: usize, vectors: &[Vec<Rational>]) -> Self {
        Subspace { ambient, basis: span_basis(vectors, ambient) }
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new() }
    }

    pub fn whole(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| (0..ambient).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Subspace { ambient, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut all = self.basis.clone();
        all.push(v.to_vec());
        span_basis(&all, self.ambient).len() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one() -> Rational {
        Rational::one()
    }

    /// Example algebra with `[X4,X3]=X1`, `[X4,X1]=[X3,X2]=X0`.
    fn five_dim() -> LieAlgebra {
        LieAlgebra::new(
            LieAlgebra::default_labels(5),
            vec![(4, 3, vec![(1, one())]), (4, 1, vec![(0, one())]), (3, 2, vec![(0, one())])],
        )
        .unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); n];
        v[i] = one();
        v
    }

    #[test]
    fn validate_examples() {
        let ab = LieAlgebra::abelian(3).validate();
        assert!(ab.passed());
        assert_eq!((ab.step, ab.center_dim), (Some(1), 3));

        let g = five_dim();
        let r = g.validate();
        assert!(r.passed());
        assert_eq!(r.step, Some(3));
        assert_eq!(g.center(), Subspace::from_vectors(5, &[e(5, 0)]));

        let bad = LieAlgebra::new_unchecked(LieAlgebra::default_labels(3), vec![(2, 1, vec![(2, one())])]).unwrap();
        let r = bad.validate();
        assert!(!r.jordan_holder_ok());
        assert!(LieAlgebra::new(LieAlgebra::default_labels(3), vec![(2, 1, vec![(2, one())])]).is_err());
    }

    #[test]
    fn encoding_is_enforced() {
        let labels = LieAlgebra::default_labels(3);
        assert_eq!(
            LieAlgebra::new_unchecked(labels.clone(), vec![(1, 2, vec![(0, one())])]),
            Err(LieError::NotLowerPair { i: 1, j: 2 })
        );
        assert_eq!(
            LieAlgebra::new_unchecked(labels.clone(), vec![(2, 1, vec![(0, one())]), (2, 1, vec![(0, one())])]),
            Err(LieError::DuplicateBracket { i: 2, j: 1 })
        );
        assert!(matches!(LieAlgebra::new_unchecked(labels, vec![(3, 1, vec![])]), Err(LieError::IndexOutOfRange { .. })));
    }

    #[test]
    fn brackets_and_ad() {
        let g = five_dim();
        assert_eq!(g.bracket(&e(5, 4), &e(5, 3)).unwrap(), e(5, 1));
        assert_eq!(g.bracket(&e(5, 3), &e(5, 4)).unwrap(), e(5, 1).iter().map(|c| -c).collect::<Vec<_>>());
        assert!(g.bracket(&e(5, 2), &e(5, 2)).unwrap().iter().all(Rational::is_zero));
        assert!(matches!(g.bracket(&e(4, 0), &e(5, 0)), Err(LieError::DimensionMismatch { .. })));

        let ad4 = g.ad_matrix(&e(5, 4)).unwrap();
        assert_eq!(ad4.column(3), e(5, 1));
        assert_eq!(ad4.column(1), e(5, 0));
        assert!(ad4.column(2).iter().all(Rational::is_zero));
        assert!(g.ad_matrix(&e(5, 0)).unwrap().is_zero());
    }

    #[test]
    fn nonjacobi_is_reported() {
        // [X2,[X3,X4]] + [X3,[X4,X2]] + [X4,[X2,X3]] = -[X4,X1] = -X0
        let g = LieAlgebra::new_unchecked(
            LieAlgebra::default_labels(5),
            vec![(4, 3, vec![(2, one())]), (3, 2, vec![(1, one())]), (4, 1, vec![(0, one())])],
        )
        .unwrap();
        let r = g.validate();
        assert_eq!(r.jacobi_failures, vec![(2, 3, 4)]);
        assert!(r.jordan_holder_ok() && !r.passed());
    }

    #[test]
    fn lower_central_series_steps() {
        assert_eq!(LieAlgebra::abelian(2).step().unwrap(), 1);
        let g = five_dim();
        let lcs = g.lower_central_series().unwrap();
        assert_eq!(lcs.iter().map(Subspace::dim).collect::<Vec<_>>(), vec![5, 2, 1]);
    }
}
