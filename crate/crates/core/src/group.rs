//! The group law of a nilpotent Lie algebra in exponential coordinates.
//!
//! The product `X · Y = log(exp X exp Y)` is the Dynkin form of the
//! Baker–Campbell–Hausdorff series, truncated at the nilpotency step where
//! every longer bracket vanishes. It is computed once as a polynomial map in
//! `2n` variables: `x_0..x_{n-1}` for `X` and `x_n..x_{2n-1}` for `Y`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffop::DiffOp;
use crate::lie::{LieAlgebra, LieError};
use crate::matrix::{PolyMatrix, RatMatrix};
use crate::poly::{MultiPoly, PolyMap};
use crate::rational::Rational;

/// A word in the letters `X` (`false`) and `Y` (`true`).
type Word = Vec<bool>;

/// Dynkin coefficients of every word of length `1..=max_len`.
///
/// The series is `Σ_k (−1)^{k−1}/k Σ [X^{r_1}Y^{s_1}⋯X^{r_k}Y^{s_k}] / (N Π r_i! s_i!)`
/// with `N = Σ (r_i + s_i)` and each block nonempty. A word can arise from
/// several block decompositions; their contributions are summed here.
pub fn dynkin_coefficients(max_len: usize) -> BTreeMap<Word, Rational> {
    fn rec(word: &[bool], p: usize, k: usize, weight: Rational, out: &mut Rational) {
        let n = word.len();
        if p == n {
            let sign = if k % 2 == 1 { Rational::one() } else { -Rational::one() };
            *out += &(sign * weight * Rational::new(1, (k * n) as i64));
            return;
        }
        let xrun = word[p..].iter().take_while(|&&b| !b).count();
        for r in 0..=xrun {
            let q = p + r;
            let yrun = if r == xrun { word[q..].iter().take_while(|&&b| b).count() } else { 0 };
            for s in 0..=yrun {
                if r + s == 0 {
                    continue;
                }
                let w = &weight * &Rational::inv_factorial(r as u32) * Rational::inv_factorial(s as u32);
                rec(word, q + s, k + 1, w, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    for len in 1..=max_len {
        for bits in 0..(1u64 << len) {
            let word: Word = (0..len).map(|i| bits >> (len - 1 - i) & 1 == 1).collect();
            let mut c = Rational::zero();
            rec(&word, 0, 0, Rational::one(), &mut c);
            if !c.is_zero() {
                out.insert(word, c);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct GroupLaw {
    algebra: LieAlgebra,
    step: usize,
    product: PolyMap,
}

impl GroupLaw {
    /// Truncates at the nilpotency step.
    pub fn new(algebra: &LieAlgebra) -> Result<Self, LieError> {
        let step = algebra.step()?;
        Ok(Self::with_depth(algebra, step, step))
    }

    /// Keeps Dynkin words up to `depth` letters. Used to confirm that words
    /// longer than the step contribute nothing.
    pub fn with_depth(algebra: &LieAlgebra, step: usize, depth: usize) -> Self {
        let n = algebra.dim();
        let x = algebra.symbolic_element(0);
        let y = algebra.symbolic_element(n);
        // nested brackets [w_1,[w_2,…,w_N]] memoized by suffix
        let mut nested: BTreeMap<Word, Vec<MultiPoly>> = BTreeMap::new();
        let mut total = vec![MultiPoly::zero(); n];
        for (word, c) in dynkin_coefficients(depth) {
            let v = nested_bracket(algebra, &word, &x, &y, &mut nested);
            for (t, vi) in total.iter_mut().zip(&v) {
                *t += &vi.scale(&c);
            }
        }
        let product = PolyMap::new(2 * n, total).expect("product uses only the 2n block variables");
        GroupLaw { algebra: algebra.clone(), step, product }
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// `X · Y` as a polynomial map of `(x, y)`.
    pub fn symbolic_product(&self) -> &PolyMap {
        &self.product
    }

    pub fn bch(&self, x: &[Rational], y: &[Rational]) -> Result<Vec<Rational>, LieError> {
        let n = self.dim();
        for v in [x, y] {
            if v.len() != n {
                return Err(LieError::DimensionMismatch { expected: n, got: v.len() });
            }
        }
        let point: Vec<Rational> = x.iter().chain(y).cloned().collect();
        Ok(self.product.eval(&point).expect("point covers all variables"))
    }

    /// `X · Y` for polynomial-valued coordinates.
    pub fn bch_symbolic(&self, x: &[MultiPoly], y: &[MultiPoly]) -> Vec<MultiPoly> {
        let subst: Vec<MultiPoly> = x.iter().chain(y).cloned().collect();
        self.product.components().iter().map(|p| p.compose(&subst).expect("substitution covers 2n variables")).collect()
    }

    /// In exponential coordinates the inverse is `−X`.
    pub fn inverse(&self, x: &[Rational]) -> Vec<Rational> {
        x.iter().map(|c| -c).collect()
    }

    /// `Ad(X) = e^{ad X}`.
    pub fn ad(&self, x: &[Rational]) -> Result<RatMatrix, LieError> {
        Ok(self.algebra.ad_matrix(x)?.exp_nilpotent(self.step.max(1)))
    }

    /// `Ad(X)` for `X = Σ x_{offset+i} X_i`.
    pub fn ad_symbolic(&self, offset: usize) -> PolyMatrix {
        self.algebra.symbolic_ad(offset).exp_nilpotent(self.step.max(1))
    }

    /// Matrix of `ξ ↦ ξ ∘ e^{−ad X}` on coordinate columns of `ξ`, i.e. `Ad(−X)ᵀ`.
    pub fn co_ad(&self, x: &[Rational]) -> Result<RatMatrix, LieError> {
        Ok(self.ad(&self.inverse(x))?.transpose())
    }

    pub fn co_ad_symbolic(&self, offset: usize) -> PolyMatrix {
        self.algebra.symbolic_ad(offset).neg().exp_nilpotent(self.step.max(1)).transpose()
    }

    /// `dρ(X_j)`: the field `Y ↦ d/dt|₀ Y · tX_j` on functions of `Y`.
    pub fn right_field(&self, j: usize) -> DiffOp {
        let n = self.dim();
        let zero_y: Vec<MultiPoly> = (0..n).map(MultiPoly::var).chain((0..n).map(|_| MultiPoly::zero())).collect();
        let coeffs: Vec<MultiPoly> =
            self.product.components().iter().map(|p| p.partial(n + j).compose(&zero_y).expect("full substitution")).collect();
        DiffOp::first_order(MultiPoly::zero(), &coeffs)
    }

    /// `dλ(X_j)`: the field `Y ↦ d/dt|₀ (−tX_j) · Y` on functions of `Y`.
    pub fn left_field(&self, j: usize) -> DiffOp {
        let n = self.dim();
        let zero_x: Vec<MultiPoly> = (0..n).map(|_| MultiPoly::zero()).chain((0..n).map(MultiPoly::var)).collect();
        let coeffs: Vec<MultiPoly> =
            self.product.components().iter().map(|p| -p.partial(j).compose(&zero_x).expect("full substitution")).collect();
        DiffOp::first_order(MultiPoly::zero(), &coeffs)
    }
}

fn nested_bracket(
    alg: &LieAlgebra,
    word: &[bool],
    x: &[MultiPoly],
    y: &[MultiPoly],
    memo: &mut BTreeMap<Word, Vec<MultiPoly>>,
) -> Vec<MultiPoly> {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let letter = |b: bool| if b { y.to_vec() } else { x.to_vec() };
    let v = if word.len() == 1 {
        letter(word[0])
    } else {
        let inner = nested_bracket(alg, &word[1..], x, y, memo);
        if inner.iter().all(MultiPoly::is_zero) {
            inner
        } else {
            alg.bracket_with(&letter(word[0]), &inner)
        }
    };
    memo.insert(word.to_vec(), v.clone());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn heisenberg() -> LieAlgebra {
        // Z, Y, X with [X, Y] = −Z, i.e. [Y, X] = Z
        let labels = ["Z", "Y", "X"].iter().map(|s| String::from(*s)).collect();
        LieAlgebra::new(labels, vec![(2, 1, vec![(0, q(-1, 1))])]).unwrap()
    }

    fn five_dim() -> LieAlgebra {
        LieAlgebra::new(
            LieAlgebra::default_labels(5),
            vec![(4, 3, vec![(1, q(1, 1))]), (4, 1, vec![(0, q(1, 1))]), (3, 2, vec![(0, q(1, 1))])],
        )
        .unwrap()
    }

    #[test]
    fn low_order_dynkin_coefficients() {
        let c = dynkin_coefficients(3);
        assert_eq!(c[&vec![false]], q(1, 1));
        // ½[X,Y] is split as ¼[X,Y] − ¼[Y,X] across the two words
        assert_eq!(c[&vec![false, true]], q(1, 4));
        assert_eq!(c[&vec![true, false]], q(-1, 4));
        assert!(!c.contains_key(&vec![false, false]));
    }

    #[test]
    fn heisenberg_closed_form() {
        let g = GroupLaw::new(&heisenberg()).unwrap();
        let y = [q(0, 1), q(1, 1), q(0, 1)];
        let x = [q(0, 1), q(0, 1), q(1, 1)];
        assert_eq!(g.bch(&y, &x).unwrap(), vec![q(1, 2), q(1, 1), q(1, 1)]);
        assert_eq!(g.bch(&x, &[q(0, 1), q(0, 1), q(0, 1)]).unwrap(), x.to_vec());
    }

    #[test]
    fn three_step_product() {
        // X4·X3 = X4 + X3 + ½[X4,X3] + 1/12[X4,[X4,X3]] − 1/12[X3,[X4,X3]]
        //       = X4 + X3 + ½X1 + 1/12 X0
        let g = GroupLaw::new(&five_dim()).unwrap();
        let e = |i: usize| five_dim().basis_vector(i);
        assert_eq!(g.bch(&e(4), &e(3)).unwrap(), vec![q(1, 12), q(1, 2), q(0, 1), q(1, 1), q(1, 1)]);
    }

    #[test]
    fn truncation_is_sound() {
        let alg = five_dim();
        let g = GroupLaw::new(&alg).unwrap();
        let deeper = GroupLaw::with_depth(&alg, 3, 5);
        assert_eq!(g.symbolic_product(), deeper.symbolic_product());
    }

    #[test]
    fn heisenberg_coadjoint() {
        // Ad*(bY + cX) Z* = Z* + cY* − bX*
        let g = GroupLaw::new(&heisenberg()).unwrap();
        let (b, c) = (q(2, 3), q(-5, 7));
        let m = g.co_ad(&[q(0, 1), b.clone(), c.clone()]).unwrap();
        let out = m.mul_vec(&[q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(out, vec![q(1, 1), c, -b]);
    }

    #[test]
    fn abelian_fields() {
        let g = GroupLaw::new(&LieAlgebra::abelian(3)).unwrap();
        for j in 0..3 {
            assert_eq!(g.right_field(j), DiffOp::partial(j));
            assert_eq!(g.left_field(j), -&DiffOp::partial(j));
        }
    }
}
