//! Invariant differential operators on a flat orbit, in the chart `𝔤₀*`.
//!
//! An operator is invariant exactly when it commutes with every fundamental
//! field `γ_ω(X_k)`. The first-order invariants are found by solving that
//! condition as a linear system over the monomial coefficients of an ansatz
//! `a_0 + Σ_j a_j ∂_j`, and independently by pushing the right-translation
//! fields of `G₀` forward through `χ`. Higher-order invariants are ordered
//! products of the first-order ones.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffop::DiffOp;
use crate::format::OpNames;
use crate::matrix::{sparse_nullspace, span_basis, SparseRow};
use crate::orbit::{OrbitData, OrbitError};
use crate::poly::{Monomial, MultiPoly};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error("commutant did not stabilize below degree bound {cap}")]
    DegreeEscalationLimit { cap: u32 },
    #[error("{count} products requested for order {order}; limit is {limit}")]
    OrderLimit { order: u32, count: usize, limit: usize },
    #[error("operator {0} does not commute with the affine action")]
    NotInvariant(String),
}

/// Coordinate of an operator: `(∂ multi-index, coefficient monomial)`.
pub type OpKey = (Monomial, Monomial);

fn op_coordinates(op: &DiffOp) -> Vec<(OpKey, Rational)> {
    let mut out = Vec::new();
    for (alpha, coeff) in op.terms() {
        for (m, c) in coeff.terms() {
            out.push(((alpha.clone(), m.clone()), c.clone()));
        }
    }
    out
}

/// A linearly independent family of operators in canonical reduced echelon
/// form over the ascending [`OpKey`] order. Two spans are equal exactly when
/// their canonical bases are identical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpBasis {
    ops: Vec<DiffOp>,
}

impl OpBasis {
    pub fn from_ops(ops: &[DiffOp]) -> Self {
        let mut keys: BTreeMap<OpKey, usize> = BTreeMap::new();
        let coords: Vec<Vec<(OpKey, Rational)>> = ops.iter().map(op_coordinates).collect();
        for c in &coords {
            for (k, _) in c {
                keys.entry(k.clone()).or_insert(0);
            }
        }
        let index: Vec<OpKey> = keys.keys().cloned().collect();
        for (i, k) in index.iter().enumerate() {
            keys.insert(k.clone(), i);
        }
        let vectors: Vec<Vec<Rational>> = coords
            .iter()
            .map(|c| {
                let mut v = vec![Rational::zero(); index.len()];
                for (k, x) in c {
                    v[keys[k]] += x;
                }
                v
            })
            .collect();
        let rows = span_basis(&vectors, index.len());
        let ops = rows
            .into_iter()
            .map(|r| {
                let mut op = DiffOp::zero();
                for (i, x) in r.into_iter().enumerate() {
                    if !x.is_zero() {
                        let (alpha, m) = index[i].clone();
                        op.add_term(alpha, MultiPoly::term(m, x));
                    }
                }
                op
            })
            .collect();
        OpBasis { ops }
    }

    pub fn ops(&self) -> &[DiffOp] {
        &self.ops
    }

    pub fn dim(&self) -> usize {
        self.ops.len()
    }

    pub fn contains(&self, op: &DiffOp) -> bool {
        let mut all = self.ops.clone();
        all.push(op.clone());
        OpBasis::from_ops(&all).dim() == self.dim()
    }

    /// Basis elements of positive order. Because the constant key sorts
    /// first, the constants, when present, form exactly one canonical row.
    pub fn without_constants(&self) -> OpBasis {
        let ops: Vec<DiffOp> = self.ops.iter().filter(|o| o.order().unwrap_or(0) > 0).cloned().collect();
        OpBasis::from_ops(&ops)
    }

    /// Elements of order zero.
    pub fn zeroth_order_part(&self) -> Vec<&DiffOp> {
        self.ops.iter().filter(|o| o.order() == Some(0)).collect()
    }

    /// True when the order-zero elements are exactly the constants.
    pub fn zeroth_order_is_constants(&self) -> bool {
        let z = self.zeroth_order_part();
        z.len() == 1 && *z[0] == DiffOp::identity()
    }

    pub fn with_constants(&self) -> OpBasis {
        let mut ops = self.ops.clone();
        ops.push(DiffOp::identity());
        OpBasis::from_ops(&ops)
    }

    pub fn print(&self, names: &OpNames) -> Vec<String> {
        self.ops.iter().map(|o| format!("{}", o.display(names))).collect()
    }
}

pub fn span_equal(a: &OpBasis, b: &OpBasis) -> bool {
    a == b
}

/// Coefficient-degree bound for the commutant ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeBound {
    /// Start at the step of `𝔤₀` and raise until stable.
    Auto,
    Fixed(u32),
}

#[derive(Clone, Debug)]
pub struct CommutantResult {
    pub basis: OpBasis,
    /// Degree bound the basis was computed at.
    pub bound: u32,
    /// Commutant dimension at every bound tried.
    pub history: Vec<(u32, usize)>,
}

/// Default escalation cap `2·step + 2`.
pub fn default_cap(orbit: &OrbitData) -> u32 {
    2 * orbit.group0().step() as u32 + 2
}

/// First-order operators `a_0 + Σ a_j ∂_j` with coefficient degree at most
/// `bound` that commute with every `γ_ω(X_k)`, as a canonical basis.
pub fn commutant_at(orbit: &OrbitData, bound: u32) -> OpBasis {
    let d = orbit.dim0();
    let monomials = Monomial::all_up_to(d, bound);
    // unknown u ↔ (slot, monomial); slot 0 is the zeroth-order part, slot j+1 is ∂_j
    let unknowns: Vec<DiffOp> = (0..=d)
        .flat_map(|slot| {
            monomials.iter().map(move |m| {
                let mut op = DiffOp::zero();
                let alpha = if slot == 0 { Monomial::one() } else { Monomial::var(slot - 1) };
                op.add_term(alpha, MultiPoly::term(m.clone(), Rational::one()));
                op
            })
        })
        .collect();
    let mut rows: BTreeMap<(usize, OpKey), SparseRow> = BTreeMap::new();
    for (k, g) in orbit.gamma_fields().iter().enumerate() {
        for (u, e) in unknowns.iter().enumerate() {
            let c = e.commutator_first_order(g).expect("first-order operands");
            for (key, x) in op_coordinates(&c) {
                rows.entry((k, key)).or_default().push((u, x));
            }
        }
    }
    let kernel = sparse_nullspace(unknowns.len(), rows.into_values());
    let ops: Vec<DiffOp> = kernel
        .iter()
        .map(|v| {
            let mut op = DiffOp::zero();
            for (x, e) in v.iter().zip(&unknowns) {
                if !x.is_zero() {
                    op = &op + &e.scale(x);
                }
            }
            op
        })
        .collect();
    OpBasis::from_ops(&ops)
}

/// The first-order commutant. With [`DegreeBound::Auto`] the bound starts at
/// the step of `𝔤₀` and rises until the dimension is unchanged between `b`
/// and `b + 1` and the non-constant part has dimension `dim 𝔤₀`.
pub fn commutant_first_order(orbit: &OrbitData, bound: DegreeBound, cap: Option<u32>) -> Result<CommutantResult, InvariantError> {
    let cap = cap.unwrap_or_else(|| default_cap(orbit));
    let d = orbit.dim0();
    match bound {
        DegreeBound::Fixed(b) => {
            let basis = commutant_at(orbit, b);
            let dim = basis.dim();
            Ok(CommutantResult { basis, bound: b, history: vec![(b, dim)] })
        }
        DegreeBound::Auto => {
            let mut b = (orbit.group0().step() as u32).max(1);
            let mut history = Vec::new();
            let mut current = commutant_at(orbit, b);
            history.push((b, current.dim()));
            loop {
                if b + 1 > cap {
                    return Err(InvariantError::DegreeEscalationLimit { cap });
                }
                let next = commutant_at(orbit, b + 1);
                history.push((b + 1, next.dim()));
                if next.dim() == current.dim() && current.without_constants().dim() == d {
                    return Ok(CommutantResult { basis: current, bound: b, history });
                }
                current = next;
                b += 1;
            }
        }
    }
}

/// Pushes a vector field on `𝔤₀` forward through `χ`: the coefficient on
/// `∂_{η_m}` is `Σ_k v_k ∂χ_m/∂x_k`, evaluated at `x = χ⁻¹(η)`.
pub fn pushforward(orbit: &OrbitData, field: &DiffOp) -> DiffOp {
    let d = orbit.dim0();
    let jac = orbit.chi().jacobian();
    let inv = orbit.chi_inverse().components();
    let v: Vec<MultiPoly> = (0..d).map(|k| field.first_order_coefficient(k)).collect();
    let coeffs: Vec<MultiPoly> = (0..d)
        .map(|m| {
            let mut c = MultiPoly::zero();
            for (k, vk) in v.iter().enumerate() {
                if !vk.is_zero() {
                    c += &(vk * &jac[(m, k)]);
                }
            }
            c.compose(inv).expect("χ⁻¹ has d components")
        })
        .collect();
    DiffOp::first_order(field.zeroth_order().compose(inv).expect("χ⁻¹ has d components"), &coeffs)
}

/// Images of the right-translation fields `dρ(X_j)` under `χ`, together with
/// the constants, as a canonical basis. Every element is checked to commute
/// with the affine action.
pub fn invariant_ops_via_pushforward(orbit: &OrbitData) -> Result<OpBasis, InvariantError> {
    let d = orbit.dim0();
    let mut ops: Vec<DiffOp> = (0..d).map(|j| pushforward(orbit, &orbit.group0().right_field(j))).collect();
    for op in &ops {
        check_invariant(orbit, op)?;
    }
    ops.push(DiffOp::identity());
    Ok(OpBasis::from_ops(&ops))
}

/// `Ok` when `op` commutes with every `γ_ω(X_k)`.
pub fn check_invariant(orbit: &OrbitData, op: &DiffOp) -> Result<(), InvariantError> {
    for g in orbit.gamma_fields() {
        if !op.commutator(g).is_zero() {
            return Err(InvariantError::NotInvariant(format!("{}", op.display(orbit.coords()))));
        }
    }
    Ok(())
}

/// Maximum number of products [`generate_algebra`] will form.
pub const PRODUCT_LIMIT: usize = 20_000;

fn binomial_usize(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Ordered products `D_1^{p_1} ∘ ⋯ ∘ D_d^{p_d}` with `Σ p_i ≤ max_total_order`,
/// including the identity. There are `C(d + m, m)` of them.
pub fn generate_algebra(generators: &[DiffOp], max_total_order: u32) -> Result<Vec<DiffOp>, InvariantError> {
    let d = generators.len();
    let m = max_total_order as usize;
    let count = binomial_usize(d + m, m);
    if count > PRODUCT_LIMIT {
        return Err(InvariantError::OrderLimit { order: max_total_order, count, limit: PRODUCT_LIMIT });
    }
    // powers[i][p] = D_i^p
    let powers: Vec<Vec<DiffOp>> = generators
        .iter()
        .map(|g| {
            let mut v = vec![DiffOp::identity()];
            for _ in 0..m {
                let next = v.last().unwrap().compose(g);
                v.push(next);
            }
            v
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    fn rec(i: usize, left: usize, acc: DiffOp, powers: &[Vec<DiffOp>], out: &mut Vec<DiffOp>) {
        if i == powers.len() {
            out.push(acc);
            return;
        }
        for p in 0..=left {
            let next = if p == 0 { acc.clone() } else { acc.compose(&powers[i][p]) };
            rec(i + 1, left - p, next, powers, out);
        }
    }
    rec(0, m, DiffOp::identity(), &powers, &mut out);
    Ok(out)
}

/// Result of restricting an operator to functions of a subset of variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Restriction {
    /// The operator preserves functions of the subset and acts as given.
    Restricted(DiffOp),
    /// Every term differentiates outside the subset, so the operator is zero
    /// on functions of the subset.
    Vanishes,
    /// A surviving coefficient depends on a variable outside the subset.
    NotClosed,
}

/// Drops every term whose `∂` involves a variable outside `vars`, then checks
/// that the remaining coefficients depend only on `vars`.
pub fn restrict_to_subvariables(op: &DiffOp, vars: &[usize]) -> Restriction {
    let inside = |i: usize| vars.contains(&i);
    let mut out = DiffOp::zero();
    for (alpha, c) in op.terms() {
        if alpha.support().all(inside) {
            out.add_term(alpha.clone(), c.clone());
        }
    }
    if out.is_zero() {
        return Restriction::Vanishes;
    }
    if out.terms().all(|(_, c)| c.uses_only(inside)) {
        Restriction::Restricted(out)
    } else {
        Restriction::NotClosed
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_op;
    use crate::lie::LieAlgebra;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn e0(n: usize) -> Vec<Rational> {
        let mut v = vec![q(0); n];
        v[0] = q(1);
        v
    }

    fn ex57() -> OrbitData {
        let g = LieAlgebra::new(LieAlgebra::default_labels(5), vec![(4, 3, vec![(1, q(1))]), (4, 1, vec![(0, q(1))]), (3, 2, vec![(0, q(1))])])
            .unwrap();
        OrbitData::build(&g, &e0(5)).unwrap()
    }

    fn parse_all(src: &[&str], names: &OpNames) -> OpBasis {
        OpBasis::from_ops(&src.iter().map(|s| parse_op(s, names).unwrap()).collect::<Vec<_>>())
    }

    #[test]
    fn span_equal_examples() {
        let names = OpNames::indexed(2);
        let a = parse_all(&["∂1"], &names);
        assert!(span_equal(&a, &a));
        assert!(span_equal(&a, &parse_all(&["2∂1"], &names)));
        assert!(!span_equal(&a, &parse_all(&["∂1 + η1∂2"], &names)));
    }

    #[test]
    fn small_commutant() {
        let o = ex57();
        let r = commutant_first_order(&o, DegreeBound::Auto, None).unwrap();
        let names = OpNames::indexed(4);
        let want = parse_all(&["∂2", "∂3", "∂4", "∂1 + η1∂3 − η2∂4"], &names).with_constants();
        assert_eq!(r.basis, want);
        assert!(r.basis.zeroth_order_is_constants());
        assert_eq!(invariant_ops_via_pushforward(&o).unwrap(), want);
    }

    #[test]
    fn product_counts() {
        let o = ex57();
        let gens = commutant_first_order(&o, DegreeBound::Auto, None).unwrap().basis.without_constants();
        assert_eq!(generate_algebra(gens.ops(), 1).unwrap().len(), 5);
        let prods = generate_algebra(gens.ops(), 2).unwrap();
        assert_eq!(prods.len(), 15);
        for p in &prods {
            assert!(p.commutator(o.gamma_field(1)).is_zero());
        }
        assert!(matches!(generate_algebra(gens.ops(), 40), Err(InvariantError::OrderLimit { .. })));
    }

    #[test]
    fn restriction_cases() {
        let names = OpNames::named(&["a", "b", "c"]);
        let op = parse_op("∂a", &names).unwrap();
        assert_eq!(restrict_to_subvariables(&op, &[0]), Restriction::Restricted(op.clone()));
        let op = parse_op("∂c − 1/2·b·∂a + 3∂b", &names).unwrap();
        assert_eq!(restrict_to_subvariables(&op, &[0, 1]), Restriction::Restricted(parse_op("−1/2·b·∂a + 3∂b", &names).unwrap()));
        assert_eq!(restrict_to_subvariables(&parse_op("∂c", &names).unwrap(), &[0, 1]), Restriction::Vanishes);
        assert_eq!(restrict_to_subvariables(&parse_op("c∂a", &names).unwrap(), &[0, 1]), Restriction::NotClosed);
    }
}
