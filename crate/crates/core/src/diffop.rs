//! Differential operators `Σ_α a_α ∂^α` with polynomial coefficients.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::format::OpNames;
use crate::poly::{write_term, Monomial, MultiPoly};
use crate::rational::Rational;

/// Keys are `∂` multi-indices; the empty multi-index is the zeroth-order part.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffOp {
    terms: BTreeMap<Monomial, MultiPoly>,
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * Rational::new((n - i) as i64, (i + 1) as i64);
    }
    acc
}

/// All `γ ≤ α` componentwise, with the product of binomials `Π C(α_i, γ_i)`.
fn sub_indices(alpha: &Monomial) -> Vec<(Monomial, Rational)> {
    let mut out = alloc::vec![(Vec::new(), Rational::one())];
    for &a in alpha.exponents() {
        let mut next = Vec::with_capacity(out.len() * (a as usize + 1));
        for (g, c) in &out {
            for k in 0..=a {
                let mut g2: Vec<u32> = g.clone();
                g2.push(k);
                next.push((g2, c * &binomial(a, k)));
            }
        }
        out = next;
    }
    out.into_iter().map(|(g, c)| (Monomial::from_exponents(g), c)).collect()
}

impl DiffOp {
    pub fn zero() -> Self {
        DiffOp::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(MultiPoly::one())
    }

    /// Multiplication by `p`.
    pub fn multiplication(p: MultiPoly) -> Self {
        let mut d = DiffOp::zero();
        d.add_term(Monomial::one(), p);
        d
    }

    pub fn partial(i: usize) -> Self {
        let mut d = DiffOp::zero();
        d.add_term(Monomial::var(i), MultiPoly::one());
        d
    }

    /// `a0 + Σ_j coeffs[j] ∂_j`.
    pub fn first_order(a0: MultiPoly, coeffs: &[MultiPoly]) -> Self {
        let mut d = DiffOp::multiplication(a0);
        for (j, c) in coeffs.iter().enumerate() {
            d.add_term(Monomial::var(j), c.clone());
        }
        d
    }

    pub fn add_term(&mut self, alpha: Monomial, coeff: MultiPoly) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(c) => {
                *c += &coeff;
                if c.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &Monomial) -> MultiPoly {
        self.terms.get(alpha).cloned().unwrap_or_default()
    }

    /// Coefficient of `∂_j`.
    pub fn first_order_coefficient(&self, j: usize) -> MultiPoly {
        self.coefficient(&Monomial::var(j))
    }

    pub fn zeroth_order(&self) -> MultiPoly {
        self.coefficient(&Monomial::one())
    }

    /// Highest `|α|` present; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// One past the highest variable index used by a coefficient or a `∂`.
    pub fn width(&self) -> usize {
        self.terms.iter().map(|(a, c)| a.width().max(c.width())).max().unwrap_or(0)
    }

    /// Largest coefficient degree.
    pub fn coefficient_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(MultiPoly::degree).max()
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        if c.is_zero() {
            return DiffOp::zero();
        }
        DiffOp { terms: self.terms.iter().map(|(a, p)| (a.clone(), p.scale(c))).collect() }
    }

    /// Left multiplication by a polynomial.
    pub fn mul_poly(&self, p: &MultiPoly) -> DiffOp {
        let mut out = DiffOp::zero();
        for (a, c) in &self.terms {
            out.add_term(a.clone(), c * p);
        }
        out
    }

    pub fn apply(&self, p: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (alpha, a) in &self.terms {
            let d = p.partial_multi(alpha);
            if !d.is_zero() {
                out += &(a * &d);
            }
        }
        out
    }

    /// `self ∘ other`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero();
        for (alpha, a) in &self.terms {
            let subs = sub_indices(alpha);
            for (beta, b) in &other.terms {
                for (gamma, c) in &subs {
                    let db = b.partial_multi(gamma);
                    if db.is_zero() {
                        continue;
                    }
                    let rest = alpha.checked_div(gamma).expect("sub-index divides");
                    out.add_term(rest.mul(beta), (a * &db).scale(c));
                }
            }
        }
        out
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &DiffOp) -> DiffOp {
        &self.compose(other) - &other.compose(self)
    }

    /// Commutator of two first-order operators by the vector-field formula
    /// `[b_i∂_i, a_j∂_j] = b_i(∂_i a_j)∂_j − a_j(∂_j b_i)∂_i`, with the
    /// zeroth-order parts contributing `b(a_0) − a(b_0)`.
    /// Returns `None` if either operand has order above one.
    pub fn commutator_first_order(&self, other: &DiffOp) -> Option<DiffOp> {
        if self.order().unwrap_or(0) > 1 || other.order().unwrap_or(0) > 1 {
            return None;
        }
        let n = self.width().max(other.width());
        let field = |d: &DiffOp| (0..n).map(|j| d.first_order_coefficient(j)).collect::<Vec<_>>();
        let (b, a) = (field(self), field(other));
        let mut out = DiffOp::zero();
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in 0..n {
                if !b[i].is_zero() {
                    out.add_term(Monomial::var(j), &b[i] * &a[j].partial(i));
                }
                if !a[j].is_zero() {
                    out.add_term(Monomial::var(i), -(&a[j] * &b[i].partial(j)));
                }
            }
        }
        let (b0, a0) = (self.zeroth_order(), other.zeroth_order());
        let mut z = MultiPoly::zero();
        for i in 0..n {
            z += &(&b[i] * &a0.partial(i));
            z -= &(&a[i] * &b0.partial(i));
        }
        out.add_term(Monomial::one(), z);
        Some(out)
    }

    /// Renames variable `i` to `f(i)` in both coefficients and `∂` indices.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize + Copy) -> DiffOp {
        let mut out = DiffOp::zero();
        for (a, c) in &self.terms {
            let alpha = MultiPoly::term(a.clone(), Rational::one()).map_vars(f);
            let (m, _) = alpha.terms().next().expect("monomial survives renaming");
            out.add_term(m.clone(), c.map_vars(f));
        }
        out
    }

    /// Rebuilds the operator with each coefficient transformed.
    pub fn map_coefficients(&self, f: impl Fn(&MultiPoly) -> MultiPoly) -> DiffOp {
        let mut out = DiffOp::zero();
        for (a, c) in &self.terms {
            out.add_term(a.clone(), f(c));
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a OpNames) -> DiffOpDisplay<'a> {
        DiffOpDisplay { op: self, names }
    }
}

impl core::ops::Add<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), c.clone());
        }
        out
    }
}

impl core::ops::Sub<&DiffOp> for &DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(a.clone(), -c);
        }
        out
    }
}

impl core::ops::Neg for &DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        self.scale(&-Rational::one())
    }
}

pub struct DiffOpDisplay<'a> {
    op: &'a DiffOp,
    names: &'a OpNames,
}

struct PartialDisplay<'a> {
    alpha: &'a Monomial,
    names: &'a OpNames,
}

impl fmt::Display for PartialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.alpha.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "{}", self.names.partial_name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

struct Product<'a, A: fmt::Display, B: fmt::Display>(&'a A, &'a B);

impl<A: fmt::Display, B: fmt::Display> fmt::Display for Product<'_, A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·{}", self.0, self.1)
    }
}

impl fmt::Display for DiffOpDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.op.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (alpha, coeff) in &self.op.terms {
            let pd = PartialDisplay { alpha, names: self.names };
            if coeff.num_terms() == 1 {
                let (m, c) = coeff.terms().next().unwrap();
                let md = m.display(&self.names.vars);
                match (m.is_one(), alpha.is_one()) {
                    (true, true) => write_term(f, c, None, first)?,
                    (true, false) => write_term(f, c, Some(&pd), first)?,
                    (false, true) => write_term(f, c, Some(&md), first)?,
                    (false, false) => write_term(f, c, Some(&Product(&md, &pd)), first)?,
                }
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                write!(f, "({})", coeff.display(&self.names.vars))?;
                if !alpha.is_one() {
                    write!(f, "·{pd}")?;
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = OpNames::indexed(self.width());
        write!(f, "{}", self.display(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn eta(i: usize) -> MultiPoly {
        MultiPoly::var(i)
    }

    fn d(i: usize) -> DiffOp {
        DiffOp::partial(i)
    }

    #[test]
    fn apply_examples() {
        assert_eq!(d(0).apply(&eta(0).pow(2)), eta(0).scale(&Rational::from(2)));
        // (∂1 + η1∂3 − η2∂4) η3 = η1
        let g = &(&d(0) + &d(2).mul_poly(&eta(0))) - &d(3).mul_poly(&eta(1));
        assert_eq!(g.apply(&eta(2)), eta(0));
        assert_eq!(d(3).mul_poly(&eta(0)).apply(&(&eta(3) * &eta(1))), &eta(0) * &eta(1));
    }

    #[test]
    fn commutator_examples() {
        assert_eq!(d(0).commutator(&d(2).mul_poly(&eta(0))), d(2));
        let a = &(&d(0) + &d(2).mul_poly(&eta(0))) - &d(3).mul_poly(&eta(1));
        let g3 = &(-&d(1)) + &d(3).mul_poly(&eta(0));
        assert!(a.commutator(&g3).is_zero());
        assert_eq!(a.commutator_first_order(&g3), Some(DiffOp::zero()));
    }

    #[test]
    fn compose_second_order() {
        // ∂1 ∘ (η1 ∂1) = ∂1 + η1 ∂1²
        let lhs = d(0).compose(&d(0).mul_poly(&eta(0)));
        let mut want = d(0);
        want.add_term(Monomial::var_pow(0, 2), eta(0));
        assert_eq!(lhs, want);
    }

    #[test]
    fn printing() {
        let names = OpNames::indexed(4);
        let a = &(&d(0) + &d(2).mul_poly(&eta(0))) - &d(3).mul_poly(&eta(1));
        assert_eq!(format!("{}", a.display(&names)), "∂1 + η1·∂3 − η2·∂4");
        let p = &(-&eta(1)) + &eta(0).pow(2).scale(&Rational::new(1, 2));
        let b = &d(1) + &d(3).mul_poly(&p);
        assert_eq!(format!("{}", b.display(&names)), "∂2 + (−η2 + 1/2·η1^2)·∂4");
        assert_eq!(format!("{}", DiffOp::first_order(MultiPoly::one(), &[]).display(&names)), "1");
    }
}
