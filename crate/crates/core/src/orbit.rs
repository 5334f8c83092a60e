//! Flat coadjoint orbits: the orbit form, the predual `𝔤₀`, the cocycle `χ`
//! and its inverse, and the affine coadjoint action with its fundamental
//! vector fields.
//!
//! The basis is `X_0, X_1, …, X_d` with `X_0` spanning the center. The
//! functional `ξ₀` is rescaled so that `⟨ξ₀, X_0⟩ = 1`; the flat orbit is then
//! the hyperplane `{ξ : ⟨ξ, X_0⟩ = 1}` and the chart `P(ξ) = ξ|_{𝔤₀}` is based
//! at `X_0*`, so that `χ(0) = 0`.

use alloc::format;
use alloc::vec::Vec;

use crate::diffop::DiffOp;
use crate::format::OpNames;
use crate::group::GroupLaw;
use crate::lie::{LieAlgebra, LieError, Subspace};
use crate::matrix::{PolyMatrix, RatMatrix};
use crate::poly::{Monomial, MultiPoly, PolyMap};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrbitError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("functional has length {got}, algebra has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("⟨ξ₀, X₀⟩ = 0: the functional does not pair with the central basis vector")]
    NonUnitCentralPairing,
    #[error("center has dimension {0}; exactly one is required")]
    CenterNotOneDimensional(usize),
    #[error("orbit is not flat: rank {rank}, expected {expected}")]
    NotFlat { rank: usize, expected: usize },
    #[error("χ could not be inverted within degree {degree}")]
    InversionFailure { degree: u32 },
}

/// `B[i][j] = ⟨ξ₀, [X_i, X_j]⟩` on the full algebra.
pub fn orbit_form(alg: &LieAlgebra, xi0: &[Rational]) -> Result<RatMatrix, OrbitError> {
    let n = alg.dim();
    if xi0.len() != n {
        return Err(OrbitError::DimensionMismatch { expected: n, got: xi0.len() });
    }
    Ok(RatMatrix::from_fn(n, n, |i, j| {
        alg.structure(i, j).iter().fold(Rational::zero(), |acc, (k, c)| acc + &xi0[*k] * c)
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessReport {
    pub rank: usize,
    /// `dim 𝔤 − dim 𝔷`
    pub expected_rank: usize,
    pub radical: Subspace,
    pub center: Subspace,
    /// `ξ₀ / ⟨ξ₀, X₀⟩`
    pub normalized_xi0: Vec<Rational>,
    pub flat: bool,
}

pub fn is_flat(alg: &LieAlgebra, xi0: &[Rational]) -> Result<FlatnessReport, OrbitError> {
    let n = alg.dim();
    if xi0.len() != n {
        return Err(OrbitError::DimensionMismatch { expected: n, got: xi0.len() });
    }
    if xi0[0].is_zero() {
        return Err(OrbitError::NonUnitCentralPairing);
    }
    let scale = xi0[0].recip();
    let xi: Vec<Rational> = xi0.iter().map(|c| c * &scale).collect();
    let b = orbit_form(alg, &xi)?;
    let e = b.rref();
    let radical = Subspace::from_vectors(n, &b.nullspace());
    let center = alg.center();
    let expected_rank = n - center.dim();
    let flat = e.rank() == expected_rank && center.is_subspace_of(&radical);
    Ok(FlatnessReport { rank: e.rank(), expected_rank, radical, center, normalized_xi0: xi, flat })
}

/// Everything attached to a flat orbit, in chart coordinates `η_1..η_d`
/// dual to `X_1..X_d` (stored at indices `0..d`).
#[derive(Clone, Debug)]
pub struct OrbitData {
    g: LieAlgebra,
    g0: LieAlgebra,
    group: GroupLaw,
    group0: GroupLaw,
    flatness: FlatnessReport,
    omega: RatMatrix,
    chi: PolyMap,
    chi_inv: PolyMap,
    gamma: Vec<DiffOp>,
    coords: OpNames,
}

impl OrbitData {
    pub fn build(alg: &LieAlgebra, xi0: &[Rational]) -> Result<Self, OrbitError> {
        let flatness = is_flat(alg, xi0)?;
        if flatness.center.dim() != 1 {
            return Err(OrbitError::CenterNotOneDimensional(flatness.center.dim()));
        }
        if !flatness.flat {
            return Err(OrbitError::NotFlat { rank: flatness.rank, expected: flatness.expected_rank });
        }
        let n = alg.dim();
        let d = n - 1;
        let g0 = alg.truncate_below(1, alg.labels()[1..].to_vec())?;
        let group = GroupLaw::new(alg)?;
        let group0 = GroupLaw::new(&g0)?;
        let omega = RatMatrix::from_fn(d, d, |i, j| alg.constant(i + 1, j + 1, 0));

        // χ_j(X) = ⟨X_0*, e^{−ad X} X_j⟩ for X = Σ_{i≥1} x_{i−1} X_i
        let ad = alg.symbolic_ad(0).map(|p| p.map_vars(|i| i.wrapping_sub(1)));
        let e = ad.neg().exp_nilpotent(group.step().max(1));
        let chi = PolyMap::new(d, (1..n).map(|j| e[(0, j)].clone()).collect()).expect("χ uses the d predual variables");
        let chi_inv = invert(&chi, group.step())?;

        let mut data = OrbitData {
            g: alg.clone(),
            g0,
            group,
            group0,
            flatness,
            omega,
            chi,
            chi_inv,
            gamma: Vec::new(),
            coords: OpNames::indexed(d),
        };
        data.gamma = (0..d).map(|k| data.gamma_field_vec(&data.g0.basis_vector(k))).collect();
        Ok(data)
    }

    /// Replaces the coordinate names used for printing and parsing.
    pub fn with_coords(mut self, coords: OpNames) -> Self {
        assert_eq!(coords.len(), self.dim0(), "one name per predual coordinate");
        self.coords = coords;
        self
    }

    pub fn coords(&self) -> &OpNames {
        &self.coords
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn predual(&self) -> &LieAlgebra {
        &self.g0
    }

    pub fn group(&self) -> &GroupLaw {
        &self.group
    }

    pub fn group0(&self) -> &GroupLaw {
        &self.group0
    }

    pub fn flatness(&self) -> &FlatnessReport {
        &self.flatness
    }

    /// `d = dim 𝔤₀`.
    pub fn dim0(&self) -> usize {
        self.g0.dim()
    }

    /// `ω(X_i, X_j) = ⟨X_0*, [X_i, X_j]⟩` on `𝔤₀`.
    pub fn omega(&self) -> &RatMatrix {
        &self.omega
    }

    /// `ω#(X) = ω(·, X)`; equal to the linear part of `χ`.
    pub fn omega_sharp(&self) -> &RatMatrix {
        &self.omega
    }

    pub fn chi(&self) -> &PolyMap {
        &self.chi
    }

    pub fn chi_inverse(&self) -> &PolyMap {
        &self.chi_inv
    }

    /// `P(ξ) = ξ|_{𝔤₀}`.
    pub fn chart(&self, xi: &[Rational]) -> Vec<Rational> {
        xi[1..].to_vec()
    }

    /// The orbit point with chart coordinates `η`.
    pub fn lift(&self, eta: &[Rational]) -> Vec<Rational> {
        core::iter::once(Rational::one()).chain(eta.iter().cloned()).collect()
    }

    /// `γ(X)η = Ad*_{G₀}(X)η + χ(X)`.
    pub fn gamma_affine(&self, x: &[Rational], eta: &[Rational]) -> Result<Vec<Rational>, OrbitError> {
        let d = self.dim0();
        for v in [x, eta] {
            if v.len() != d {
                return Err(OrbitError::DimensionMismatch { expected: d, got: v.len() });
            }
        }
        let lin = self.group0.co_ad(x)?.mul_vec(eta);
        let shift = self.chi.eval(x).expect("χ is defined on 𝔤₀");
        Ok(lin.iter().zip(&shift).map(|(a, b)| a + b).collect())
    }

    /// `γ(X)η` as polynomials in `X = x_0..x_{d−1}` and `η = x_d..x_{2d−1}`.
    pub fn gamma_affine_symbolic(&self) -> Vec<MultiPoly> {
        let d = self.dim0();
        let m = self.group0.co_ad_symbolic(0);
        let eta: Vec<MultiPoly> = (0..d).map(|i| MultiPoly::var(d + i)).collect();
        let lin = m.mul_vec(&eta);
        lin.iter().zip(self.chi.components()).map(|(a, b)| a + b).collect()
    }

    /// Fundamental vector field `γ_ω(X_k)` of the affine action.
    pub fn gamma_field(&self, k: usize) -> &DiffOp {
        &self.gamma[k]
    }

    pub fn gamma_fields(&self) -> &[DiffOp] {
        &self.gamma
    }

    /// `γ_ω(X) = Σ_j (ω(X_j, X) − Σ_m η_m ⟨X_m*, [X, X_j]_{𝔤₀}⟩) ∂_j`, the
    /// derivative at `t = 0` of `γ(tX)η`.
    pub fn gamma_field_vec(&self, x: &[Rational]) -> DiffOp {
        let d = self.dim0();
        let ad = self.g0.ad_matrix(x).expect("length checked by caller");
        let sharp = self.omega.mul_vec(x);
        let mut coeffs = Vec::with_capacity(d);
        for j in 0..d {
            let mut c = MultiPoly::constant(sharp[j].clone());
            for m in 0..d {
                c.add_term(Monomial::var(m), -&ad[(m, j)]);
            }
            coeffs.push(c);
        }
        DiffOp::first_order(MultiPoly::zero(), &coeffs)
    }

    /// `P(Ad*_G(X)ξ) − γ(X)P(ξ)` for symbolic `X ∈ 𝔤₀` and `ξ = X_0* + Σ η_j X_j*`,
    /// in the variables of [`Self::gamma_affine_symbolic`]. Zero exactly when
    /// the chart intertwines the two actions.
    pub fn equivariance_defect(&self) -> Vec<MultiPoly> {
        let d = self.dim0();
        let n = d + 1;
        let co = self.g.symbolic_ad(0).map(|p| p.map_vars(|i| i.wrapping_sub(1)));
        let co: PolyMatrix = co.neg().exp_nilpotent(self.group.step().max(1)).transpose();
        let xi: Vec<MultiPoly> = core::iter::once(MultiPoly::one()).chain((0..d).map(|i| MultiPoly::var(d + i))).collect();
        let moved = co.mul_vec(&xi);
        let rhs = self.gamma_affine_symbolic();
        (1..n).map(|j| &moved[j] - &rhs[j - 1]).collect()
    }

    /// Human-readable `χ` components.
    pub fn chi_strings(&self) -> Vec<alloc::string::String> {
        let names: Vec<alloc::string::String> = self.g0.labels().iter().map(|l| format!("x_{l}")).collect();
        self.chi.components().iter().map(|p| format!("{}", p.display(&names))).collect()
    }
}

/// Inverts a polynomial map with invertible linear part by the fixed point
/// `X = L⁻¹(η − H(X))`, where `H` is the part of degree ≥ 2. The degree-`k`
/// part of the iterate is final after `k` rounds, so truncating at degree `D`
/// and iterating `D` times gives the exact inverse whenever its degree is at
/// most `D`. `D` grows until `χ ∘ χ⁻¹ = id` holds exactly.
fn invert(chi: &PolyMap, step: usize) -> Result<PolyMap, OrbitError> {
    let d = chi.domain_dim();
    let lin = chi.linear_part();
    let Some(linv) = lin.inverse() else {
        return Err(OrbitError::InversionFailure { degree: 1 });
    };
    let linv: PolyMatrix = linv.map(|c| MultiPoly::constant(c.clone()));
    let higher: Vec<MultiPoly> = chi
        .components()
        .iter()
        .map(|p| MultiPoly::from_terms(p.terms().filter(|(m, _)| m.degree() >= 2).map(|(m, c)| (m.clone(), c.clone()))))
        .collect();
    let eta: Vec<MultiPoly> = (0..d).map(MultiPoly::var).collect();
    let cap = (2 * step as u32 + 2).max(4) * (step as u32).max(1);
    let mut degree = step.max(1) as u32;
    loop {
        let mut x: Vec<MultiPoly> = linv.mul_vec(&eta);
        for _ in 0..degree {
            let h: Vec<MultiPoly> = higher.iter().map(|p| p.compose_truncated(&x, degree).expect("d substitutions")).collect();
            let rhs: Vec<MultiPoly> = eta.iter().zip(&h).map(|(a, b)| a - b).collect();
            x = linv.mul_vec(&rhs).into_iter().map(|p| p.truncate(degree)).collect();
        }
        let candidate = PolyMap::new(d, x).expect("inverse uses η variables only");
        if chi.compose(&candidate).expect("d substitutions").is_identity() {
            return Ok(candidate);
        }
        if degree >= cap {
            return Err(OrbitError::InversionFailure { degree });
        }
        degree += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn heisenberg() -> LieAlgebra {
        let labels = ["Z", "Y", "X"].iter().map(|s| String::from(*s)).collect();
        LieAlgebra::new(labels, vec![(2, 1, vec![(0, q(-1))])]).unwrap()
    }

    fn ex57() -> LieAlgebra {
        LieAlgebra::new(LieAlgebra::default_labels(5), vec![(4, 3, vec![(1, q(1))]), (4, 1, vec![(0, q(1))]), (3, 2, vec![(0, q(1))])])
            .unwrap()
    }

    fn ex58() -> LieAlgebra {
        LieAlgebra::new(
            LieAlgebra::default_labels(5),
            vec![(4, 3, vec![(2, q(1))]), (4, 2, vec![(1, q(1))]), (4, 1, vec![(0, q(1))]), (3, 2, vec![(0, q(1))])],
        )
        .unwrap()
    }

    fn e0(n: usize) -> Vec<Rational> {
        let mut v = vec![q(0); n];
        v[0] = q(1);
        v
    }

    #[test]
    fn orbit_form_examples() {
        let b = orbit_form(&ex57(), &e0(5)).unwrap();
        // ⟨ξ₀,[X4,X1]⟩ = ⟨ξ₀,[X3,X2]⟩ = 1
        assert_eq!(b[(4, 1)], q(1));
        assert_eq!(b[(1, 4)], q(-1));
        assert_eq!(b[(3, 2)], q(1));
        assert_eq!(b[(4, 3)], q(0));
        assert!(orbit_form(&LieAlgebra::abelian(3), &e0(3)).unwrap().is_zero());
        let h = orbit_form(&heisenberg(), &e0(3)).unwrap();
        assert_eq!((h[(1, 2)].clone(), h[(2, 1)].clone()), (q(1), q(-1)));
    }

    #[test]
    fn flatness_examples() {
        let r = is_flat(&heisenberg(), &e0(3)).unwrap();
        assert!(r.flat && r.rank == 2);
        assert_eq!(is_flat(&heisenberg(), &[q(0), q(0), q(1)]), Err(OrbitError::NonUnitCentralPairing));
        let r = is_flat(&ex58(), &e0(5)).unwrap();
        assert!(r.flat && r.rank == 4);
        // scaling is normalized away
        let r = is_flat(&ex58(), &[q(3), q(0), q(0), q(0), q(0)]).unwrap();
        assert_eq!(r.normalized_xi0, e0(5));
    }

    #[test]
    fn predual_examples() {
        let o = OrbitData::build(&ex57(), &e0(5)).unwrap();
        let brackets: Vec<_> = o.predual().stored_brackets().map(|(i, j, v)| (i, j, v.clone())).collect();
        assert_eq!(brackets, vec![(3, 2, vec![(0, q(1))])]);
        let h = OrbitData::build(&heisenberg(), &e0(3)).unwrap();
        assert!(h.predual().is_abelian());
    }

    #[test]
    fn heisenberg_chi() {
        // χ(bY + cX) = cY* − bX*
        let o = OrbitData::build(&heisenberg(), &e0(3)).unwrap();
        let (b, c) = (Rational::new(2, 3), Rational::new(-1, 5));
        assert_eq!(o.chi().eval(&[b.clone(), c.clone()]).unwrap(), vec![c, -b]);
        assert_eq!(o.chi().eval(&[q(0), q(0)]).unwrap(), vec![q(0), q(0)]);
    }

    #[test]
    fn chi_inverse_is_certified() {
        for alg in [ex57(), ex58()] {
            let o = OrbitData::build(&alg, &e0(5)).unwrap();
            assert!(o.chi().compose(o.chi_inverse()).unwrap().is_identity());
            assert!(o.chi_inverse().compose(o.chi()).unwrap().is_identity());
            assert_eq!(o.chi().linear_part(), *o.omega_sharp());
        }
        let o = OrbitData::build(&ex58(), &e0(5)).unwrap();
        assert_eq!(o.chi().degree(), Some(3));
    }

    #[test]
    fn gamma_fields_match_examples() {
        let names = OpNames::indexed(4);
        let o = OrbitData::build(&ex57(), &e0(5)).unwrap();
        let printed: Vec<String> = o.gamma_fields().iter().map(|g| format!("{}", g.display(&names))).collect();
        assert_eq!(printed, ["∂4", "∂3", "−∂2 + η1·∂4", "−∂1 − η1·∂3"]);
        let o = OrbitData::build(&ex58(), &e0(5)).unwrap();
        let printed: Vec<String> = o.gamma_fields().iter().map(|g| format!("{}", g.display(&names))).collect();
        assert_eq!(printed, ["∂4", "∂3 + η1·∂4", "−∂2 + η2·∂4", "−∂1 − η1·∂2 − η2·∂3"]);
    }

    #[test]
    fn gamma_field_is_generator_of_affine_action() {
        for alg in [ex57(), ex58(), heisenberg()] {
            let n = alg.dim();
            let o = OrbitData::build(&alg, &e0(n)).unwrap();
            let d = o.dim0();
            let g = o.gamma_affine_symbolic();
            let at_zero: Vec<MultiPoly> = (0..d).map(|_| MultiPoly::zero()).chain((0..d).map(MultiPoly::var)).collect();
            for k in 0..d {
                let coeffs: Vec<MultiPoly> = g.iter().map(|p| p.partial(k).compose(&at_zero).unwrap()).collect();
                assert_eq!(DiffOp::first_order(MultiPoly::zero(), &coeffs), *o.gamma_field(k));
            }
        }
    }

    #[test]
    fn equivariance_is_exact() {
        for alg in [ex57(), ex58(), heisenberg()] {
            let n = alg.dim();
            let o = OrbitData::build(&alg, &e0(n)).unwrap();
            assert!(o.equivariance_defect().iter().all(MultiPoly::is_zero));
        }
    }
}
