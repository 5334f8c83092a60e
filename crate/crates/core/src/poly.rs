//! Sparse multivariate polynomials over [`Rational`] and polynomial maps.
//!
//! Variables are identified by their index in a module-wide order; names are
//! only attached when printing. Terms are kept in a `BTreeMap` keyed by
//! [`Monomial`], whose ordering is graded first and then by exponent of the
//! lowest-indexed variable, so a polynomial prints as `η3 − η1·η2 + 1/3·η1^3`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("no substitution given for variable {var}")]
    MissingSubstitution { var: usize },
    #[error("component {component} uses variable {var} outside the domain of dimension {dim}")]
    VariableOutOfDomain { component: usize, var: usize, dim: usize },
}

/// Exponent vector with trailing zeros stripped.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::from_exponents(v)
    }

    pub fn from_exponents(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of variable slots in use (one past the highest variable present).
    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.exponent(i) + other.exponent(i)).collect();
        Monomial(v)
    }

    /// `self / other` if `other` divides `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        if other.0.len() > self.0.len() {
            return None;
        }
        let mut v = self.0.clone();
        for (i, &e) in other.0.iter().enumerate() {
            v[i] = v[i].checked_sub(e)?;
        }
        Some(Monomial::from_exponents(v))
    }

    /// Variables appearing with positive exponent.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }

    /// Lowers the exponent of `var` by one, returning the old exponent.
    pub fn lower(&self, var: usize) -> Option<(u32, Monomial)> {
        let e = self.exponent(var);
        if e == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[var] -= 1;
        Some((e, Monomial::from_exponents(v)))
    }

    /// Every monomial in `nvars` variables with total degree at most `max_degree`,
    /// in ascending monomial order.
    pub fn all_up_to(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        fn rec(i: usize, nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i == nvars {
                out.push(Monomial::from_exponents(cur.clone()));
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(i + 1, nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, nvars, max_degree, &mut Vec::new(), &mut out);
        out.sort();
        out
    }

    pub fn display<'a>(&'a self, names: &'a dyn VarNames) -> impl fmt::Display + 'a {
        MonomialDisplay { m: self, names }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in 0..n {
                let (a, b) = (self.exponent(i), other.exponent(i));
                if a != b {
                    return b.cmp(&a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&DefaultNames))
    }
}

/// Printing names for variable indices.
pub trait VarNames {
    fn name(&self, i: usize) -> String;
}

/// `x0, x1, ...`
pub struct DefaultNames;

impl VarNames for DefaultNames {
    fn name(&self, i: usize) -> String {
        format!("x{i}")
    }
}

impl VarNames for [String] {
    fn name(&self, i: usize) -> String {
        self.get(i).cloned().unwrap_or_else(|| format!("x{i}"))
    }
}

impl VarNames for Vec<String> {
    fn name(&self, i: usize) -> String {
        self.as_slice().name(i)
    }
}

struct MonomialDisplay<'a> {
    m: &'a Monomial,
    names: &'a dyn VarNames,
}

impl fmt::Display for MonomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            write!(f, "{}", self.names.name(i))?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        Self::term(Monomial::var(i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut p = MultiPoly::zero();
        p.add_term(m, c);
        p
    }

    /// Linear form `Σ coeffs[i]·x_{offset+i}`.
    pub fn linear(coeffs: &[Rational], offset: usize) -> Self {
        let mut p = MultiPoly::zero();
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::var(offset + i), c.clone());
        }
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = MultiPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// One past the highest variable index present.
    pub fn width(&self) -> usize {
        self.terms.keys().map(Monomial::width).max().unwrap_or(0)
    }

    pub fn uses_only(&self, allowed: impl Fn(usize) -> bool) -> bool {
        self.terms.keys().all(|m| m.support().all(&allowed))
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, v)| (m.mul(mono), v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, lowered)) = m.lower(var) {
                out.add_term(lowered, c * Rational::from(e as i64));
            }
        }
        out
    }

    /// Iterated partial derivative `∂^α`.
    pub fn partial_multi(&self, alpha: &Monomial) -> MultiPoly {
        let mut p = self.clone();
        for (i, &e) in alpha.exponents().iter().enumerate() {
            for _ in 0..e {
                if p.is_zero() {
                    return p;
                }
                p = p.partial(i);
            }
        }
        p
    }

    /// Terms of exactly degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().filter(|(m, _)| m.degree() == d).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Drops every term of degree above `max`.
    pub fn truncate(&self, max: u32) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().filter(|(m, _)| m.degree() <= max).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Substitutes `subst[i]` for variable `i`.
    pub fn compose(&self, subst: &[MultiPoly]) -> Result<MultiPoly, PolyError> {
        let width = self.width();
        if width > subst.len() {
            if let Some(var) = (subst.len()..width).find(|&v| self.terms.keys().any(|m| m.exponent(v) > 0)) {
                return Err(PolyError::MissingSubstitution { var });
            }
        }
        // powers of each substituted variable, computed lazily
        let mut powers: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::one()]; width];
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &subst[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out += &t;
        }
        Ok(out)
    }

    /// Product with every term of degree above `max` discarded.
    pub fn mul_truncated(&self, other: &MultiPoly, max: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max {
                break;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > max {
                    break;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// `compose` followed by `truncate(max)`, without forming the high-degree terms.
    pub fn compose_truncated(&self, subst: &[MultiPoly], max: u32) -> Result<MultiPoly, PolyError> {
        let width = self.width();
        if let Some(var) = (subst.len()..width).find(|&v| self.terms.keys().any(|m| m.exponent(v) > 0)) {
            return Err(PolyError::MissingSubstitution { var });
        }
        let subst: Vec<MultiPoly> = subst.iter().take(width).map(|p| p.truncate(max)).collect();
        let mut powers: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::one()]; width];
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 || t.is_zero() {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_truncated(&subst[i], max);
                    powers[i].push(next);
                }
                t = t.mul_truncated(&powers[i][e as usize], max);
            }
            out += &t;
        }
        Ok(out)
    }

    /// Evaluates at a rational point.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, PolyError> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = point.get(i).ok_or(PolyError::MissingSubstitution { var: i })?;
                t *= &x.pow(e);
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Renames variable `i` to `f(i)`.
    pub fn map_vars(&self, f: impl Fn(usize) -> usize) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut v: Vec<u32> = Vec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = f(i);
                if v.len() <= j {
                    v.resize(j + 1, 0);
                }
                v[j] += e;
            }
            out.add_term(Monomial::from_exponents(v), c.clone());
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a dyn VarNames) -> PolyDisplay<'a> {
        PolyDisplay { p: self, names }
    }
}

pub struct PolyDisplay<'a> {
    p: &'a MultiPoly,
    names: &'a dyn VarNames,
}

impl PolyDisplay<'_> {
    /// True when printing needs parentheses as a factor.
    pub fn is_compound(&self) -> bool {
        self.p.num_terms() > 1
    }
}

/// Writes `c·m` as a signed term. `first` controls whether a leading `+` is emitted.
pub(crate) fn write_term(f: &mut fmt::Formatter<'_>, c: &Rational, body: Option<&dyn fmt::Display>, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    match (first, neg) {
        (true, true) => write!(f, "\u{2212}")?,
        (true, false) => {}
        (false, true) => write!(f, " \u{2212} ")?,
        (false, false) => write!(f, " + ")?,
    }
    match body {
        None => write!(f, "{mag}"),
        Some(b) if mag.is_one() => write!(f, "{b}"),
        Some(b) => write!(f, "{mag}·{b}"),
    }
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.p.terms.iter().enumerate() {
            if m.is_one() {
                write_term(f, c, None, k == 0)?;
            } else {
                let md = m.display(self.names);
                write_term(f, c, Some(&md), k == 0)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(&DefaultNames))
    }
}

impl core::ops::AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl core::ops::SubAssign<&MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, rhs: &MultiPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Add<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(mut self, rhs: MultiPoly) -> MultiPoly {
        self += &rhs;
        self
    }
}

impl Sub<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(mut self, rhs: MultiPoly) -> MultiPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl Mul<&MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl From<Rational> for MultiPoly {
    fn from(c: Rational) -> Self {
        MultiPoly::constant(c)
    }
}

/// A polynomial map `ℚ^domain_dim → ℚ^components.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyMap {
    domain_dim: usize,
    components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(domain_dim: usize, components: Vec<MultiPoly>) -> Result<Self, PolyError> {
        for (k, p) in components.iter().enumerate() {
            if p.width() > domain_dim {
                let var = p.width() - 1;
                return Err(PolyError::VariableOutOfDomain { component: k, var, dim: domain_dim });
            }
        }
        Ok(PolyMap { domain_dim, components })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap { domain_dim: n, components: (0..n).map(MultiPoly::var).collect() }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap, PolyError> {
        let comps = self.components.iter().map(|p| p.compose(&inner.components)).collect::<Result<Vec<_>, _>>()?;
        Ok(PolyMap { domain_dim: inner.domain_dim, components: comps })
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Vec<Rational>, PolyError> {
        self.components.iter().map(|p| p.eval(point)).collect()
    }

    /// Degree-one coefficients as a matrix (row = component, column = variable).
    pub fn linear_part(&self) -> crate::matrix::RatMatrix {
        crate::matrix::Matrix::from_fn(self.codomain_dim(), self.domain_dim, |i, j| self.components[i].coeff(&Monomial::var(j)))
    }

    pub fn jacobian(&self) -> crate::matrix::PolyMatrix {
        crate::matrix::Matrix::from_fn(self.codomain_dim(), self.domain_dim, |i, j| self.components[i].partial(j))
    }

    pub fn truncate(&self, max: u32) -> PolyMap {
        PolyMap { domain_dim: self.domain_dim, components: self.components.iter().map(|p| p.truncate(max)).collect() }
    }

    pub fn degree(&self) -> Option<u32> {
        self.components.iter().filter_map(MultiPoly::degree).max()
    }

    pub fn is_identity(&self) -> bool {
        self.components.len() == self.domain_dim && self.components.iter().enumerate().all(|(i, p)| *p == MultiPoly::var(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(i)
    }

    fn c(n: i64, d: i64) -> MultiPoly {
        MultiPoly::constant(r(n, d))
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(&x(0) * &x(1), MultiPoly::term(Monomial::from_exponents(vec![1, 1]), Rational::one()));
        let p = &x(0) + &c(3, 1);
        assert_eq!(&p + &MultiPoly::zero(), p);
        // (η₁ + 1/2)(η₁ − 1/2) = η₁² − 1/4
        let prod = &(&x(0) + &c(1, 2)) * &(&x(0) - &c(1, 2));
        assert_eq!(prod, &x(0).pow(2) - &c(1, 4));
    }

    #[test]
    fn partial_examples() {
        assert_eq!(x(0).pow(3).scale(&r(1, 3)).partial(0), x(0).pow(2));
        assert!(x(1).partial(0).is_zero());
        // ∂₁(η₁η₂ − η₁²/2) = η₂ − η₁
        let p = &(&x(0) * &x(1)) - &x(0).pow(2).scale(&r(1, 2));
        assert_eq!(p.partial(0), &x(1) - &x(0));
    }

    #[test]
    fn compose_examples() {
        assert_eq!(x(0).compose(&[x(0)]).unwrap(), x(0));
        let cst = r(7, 3);
        let shifted = x(0).pow(2).compose(&[&x(0) + &MultiPoly::constant(cst.clone())]).unwrap();
        let want = &(&x(0).pow(2) + &x(0).scale(&(Rational::from(2) * &cst))) + &MultiPoly::constant(&cst * &cst);
        assert_eq!(shifted, want);
        assert_eq!(c(5, 1).compose(&[]).unwrap(), c(5, 1));
        assert_eq!(x(2).compose(&[x(0), x(1)]), Err(PolyError::MissingSubstitution { var: 2 }));
    }

    #[test]
    fn monomial_order_is_graded() {
        let one = Monomial::one();
        let e1 = Monomial::var(0);
        let e2 = Monomial::var(1);
        let e11 = Monomial::var_pow(0, 2);
        assert!(one < e1 && e1 < e2 && e2 < e11);
        assert_eq!(Monomial::all_up_to(2, 2).len(), 6);
    }

    #[test]
    fn printing() {
        let names: Vec<String> = ["η1", "η2", "η3"].iter().map(|s| String::from(*s)).collect();
        let p = &(&x(2) - &(&x(0) * &x(1))) + &x(0).pow(3).scale(&r(1, 3));
        assert_eq!(format!("{}", p.display(&names)), "η3 − η1·η2 + 1/3·η1^3");
        assert_eq!(format!("{}", (-&x(1)).display(&names)), "−η2");
        assert_eq!(format!("{}", MultiPoly::zero().display(&names)), "0");
    }

    #[test]
    fn polymap_checks_domain() {
        assert!(PolyMap::new(1, vec![x(1)]).is_err());
        let f = PolyMap::new(2, vec![&x(0) + &x(1), x(1)]).unwrap();
        assert_eq!(f.compose(&PolyMap::identity(2)).unwrap(), f);
        assert_eq!(f.eval(&[r(1, 2), r(1, 3)]).unwrap(), vec![r(5, 6), r(1, 3)]);
    }
}
