//! The Heisenberg algebra `𝔥_{2m+1}` and the semidirect product
//! `𝔤 = ℱ ⋊ 𝔥` with `ℱ = 𝔥* + ℝ𝟏`, whose predual `𝔤₀ = 𝔥* ∔ 𝔥` carries a
//! flat orbit. Closed forms for the fundamental fields and the invariant
//! operators of this family are checked against the general machinery.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffop::DiffOp;
use crate::format::{parse_op, OpNames};
use crate::invariant::{commutant_first_order, restrict_to_subvariables, span_equal, DegreeBound, InvariantError, OpBasis, Restriction};
use crate::lie::{LieAlgebra, SparseVec};
use crate::matrix::RatMatrix;
use crate::orbit::{OrbitData, OrbitError};
use crate::rational::Rational;

/// `𝔥_{2m+1}` on `Z, Y_1..Y_m, X_1..X_m` with `[Y_j, X_j] = Z`.
pub fn build_heisenberg(m: usize) -> LieAlgebra {
    assert!(m >= 1, "m ≥ 1");
    let mut labels = vec![String::from("Z")];
    labels.extend((1..=m).map(|j| format!("Y{j}")));
    labels.extend((1..=m).map(|j| format!("X{j}")));
    // stored as [X_j, Y_j] = −Z
    let brackets = (0..m).map(|j| (1 + m + j, 1 + j, vec![(0, -Rational::one())])).collect();
    LieAlgebra::new(labels, brackets).expect("Heisenberg relations are valid")
}

/// The six blocks of `𝔤` besides the center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Block {
    ZStar,
    YStar,
    XStar,
    Z,
    Y,
    X,
}

impl Block {
    pub const ALL: [Block; 6] = [Block::ZStar, Block::YStar, Block::XStar, Block::Z, Block::Y, Block::X];

    fn len(self, m: usize) -> usize {
        match self {
            Block::ZStar | Block::Z => 1,
            _ => m,
        }
    }

    /// Index of the first element in the reference layout `(𝟏; Z*, Y*, X*; Z, Y, X)`.
    fn reference_offset(self, m: usize) -> usize {
        match self {
            Block::ZStar => 1,
            Block::YStar => 2,
            Block::XStar => 2 + m,
            Block::Z => 2 + 2 * m,
            Block::Y => 3 + 2 * m,
            Block::X => 3 + 3 * m,
        }
    }

    fn label(self, k: usize) -> String {
        match self {
            Block::ZStar => "Z*".into(),
            Block::YStar => format!("Y*{k}"),
            Block::XStar => format!("X*{k}"),
            Block::Z => "Z".into(),
            Block::Y => format!("Y{k}"),
            Block::X => format!("X{k}"),
        }
    }

    /// Name of the orbit coordinate dual to this block's element.
    fn coordinate(self, k: usize) -> String {
        match self {
            Block::ZStar => "ζ*".into(),
            Block::YStar => format!("η*{k}"),
            Block::XStar => format!("ξ*{k}"),
            Block::Z => "ζ".into(),
            Block::Y => format!("η{k}"),
            Block::X => format!("ξ{k}"),
        }
    }
}

/// Sign of the central term in `[ξ, X] = s⟨ξ, X⟩𝟏 + ½ ξ∘ad X`. The value −1
/// corresponds to the base functional `−𝟏*`, under which the fundamental
/// fields take the closed forms checked by [`field_closed_form_check`].
const CENTRAL_SIGN: i64 = -1;

/// Bracket table of `𝔤` in the reference layout, as `table[i][j] = [V_i, V_j]`.
fn reference_table(m: usize) -> Vec<Vec<SparseVec>> {
    let h = build_heisenberg(m);
    let hn = 2 * m + 1;
    let n = 2 * hn + 1;
    let star = |a: usize| 1 + a;
    let plain = |a: usize| 1 + hn + a;
    let mut table = vec![vec![SparseVec::new(); n]; n];
    let half = Rational::new(1, 2);
    for a in 0..hn {
        for x in 0..hn {
            // [φ_a, X_x] = s⟨φ_a, X_x⟩𝟏 + ½ Σ_b φ_a([X_x, X_b]) φ_b
            let mut v = SparseVec::new();
            if a == x {
                v.push((0, Rational::from(CENTRAL_SIGN)));
            }
            for b in 0..hn {
                let c = h.constant(x, b, a);
                if !c.is_zero() {
                    v.push((star(b), &half * &c));
                }
            }
            table[star(a)][plain(x)] = v.clone();
            table[plain(x)][star(a)] = v.into_iter().map(|(i, c)| (i, -c)).collect();
        }
        for b in 0..hn {
            table[plain(a)][plain(b)] = h.structure(a, b).iter().map(|(i, c)| (plain(*i), c.clone())).collect();
        }
    }
    table
}

/// `𝔤 = ℱ ⋊ 𝔥` with its basis ordered so that the Jordan–Hölder condition holds.
#[derive(Clone, Debug)]
pub struct SemidirectModel {
    m: usize,
    g: LieAlgebra,
    xi0: Vec<Rational>,
    order: [Block; 6],
    coords: OpNames,
}

fn next_permutation(p: &mut [Block]) -> bool {
    let n = p.len();
    let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).expect("successor exists");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

/// Builds `𝔤` with `𝟏` first and the six blocks in the first lexicographic
/// order (over [`Block::ALL`]) that passes validation.
pub fn build_semidirect(m: usize) -> SemidirectModel {
    assert!(m >= 1, "m ≥ 1");
    let table = reference_table(m);
    let n = table.len();
    let mut order = Block::ALL;
    loop {
        // position → reference index
        let mut perm = vec![0usize];
        let mut labels = vec![String::from("1")];
        let mut coords = Vec::new();
        for b in order {
            for k in 0..b.len(m) {
                perm.push(b.reference_offset(m) + k);
                labels.push(b.label(k + 1));
                coords.push(b.coordinate(k + 1));
            }
        }
        let mut inv = vec![0usize; n];
        for (pos, &r) in perm.iter().enumerate() {
            inv[r] = pos;
        }
        let mut brackets = Vec::new();
        for i in 0..n {
            for j in 0..i {
                let v: SparseVec = table[perm[i]][perm[j]].iter().map(|(r, c)| (inv[*r], c.clone())).collect();
                if !v.is_empty() {
                    brackets.push((i, j, v));
                }
            }
        }
        if let Ok(g) = LieAlgebra::new(labels, brackets) {
            let mut xi0 = vec![Rational::zero(); n];
            xi0[0] = Rational::one();
            return SemidirectModel { m, g, xi0, order, coords: OpNames::named(&coords) };
        }
        if !next_permutation(&mut order) {
            unreachable!("some block order satisfies the Jordan–Hölder condition");
        }
    }
}

impl SemidirectModel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.g
    }

    pub fn xi0(&self) -> &[Rational] {
        &self.xi0
    }

    /// The selected block order after `𝟏`.
    pub fn order(&self) -> [Block; 6] {
        self.order
    }

    /// Orbit coordinate names `ζ, η_k, ξ_k, ζ*, η*_k, ξ*_k` in predual order.
    pub fn coords(&self) -> &OpNames {
        &self.coords
    }

    pub fn orbit(&self) -> Result<OrbitData, OrbitError> {
        Ok(OrbitData::build(&self.g, &self.xi0)?.with_coords(self.coords.clone()))
    }

    /// Predual index of the `k`-th element (1-based) of a block.
    pub fn index(&self, block: Block, k: usize) -> usize {
        let mut pos = 0;
        for b in self.order {
            if b == block {
                return pos + k - 1;
            }
            pos += b.len(self.m);
        }
        unreachable!()
    }

    /// `ω(V*, V) = 1 = −ω(V, V*)` for `V ∈ {Z, Y_k, X_k}`, built directly
    /// from that rule in predual order.
    pub fn omega_closed_form(&self) -> RatMatrix {
        let d = self.g.dim() - 1;
        let mut w = RatMatrix::zeros(d, d);
        let pairs = [(Block::ZStar, Block::Z), (Block::YStar, Block::Y), (Block::XStar, Block::X)];
        for (s, p) in pairs {
            for k in 1..=s.len(self.m) {
                let (i, j) = (self.index(s, k), self.index(p, k));
                w[(i, j)] = Rational::one();
                w[(j, i)] = -Rational::one();
            }
        }
        w
    }

    fn parse(&self, src: &str) -> DiffOp {
        parse_op(src, &self.coords).expect("closed forms parse")
    }

    /// Closed forms of `γ_ω` for every predual basis element, keyed by label.
    pub fn gamma_closed_forms(&self) -> Vec<(String, DiffOp)> {
        let m = self.m;
        let sum = |f: &dyn Fn(usize) -> String| (1..=m).map(f).collect::<Vec<_>>().join(" + ");
        let mut out = Vec::new();
        for b in self.order {
            for k in 1..=b.len(m) {
                let src = match b {
                    Block::XStar => format!("∂ξ{k}"),
                    Block::YStar => format!("∂η{k}"),
                    Block::ZStar => {
                        format!("∂ζ − 1/2·(({}) − ({}))", sum(&|k| format!("ξ*{k}·∂η{k}")), sum(&|k| format!("η*{k}·∂ξ{k}")))
                    }
                    Block::X => format!("−∂ξ*{k} − (η*{k}/2·∂ζ* − ζ·∂η{k})"),
                    Block::Y => format!("−∂η*{k} − (−ξ*{k}/2·∂ζ* + ζ·∂ξ{k})"),
                    Block::Z => String::from("−∂ζ*"),
                };
                out.push((b.label(k), self.parse(&src)));
            }
        }
        out
    }

    /// The `4m + 2` first-order generators of the invariant operators.
    pub fn invariant_generators(&self) -> Vec<DiffOp> {
        let m = self.m;
        let mut srcs = vec![String::from("∂ζ*")];
        let a: Vec<String> = (1..=m).map(|j| format!("η*{j}·∂ξ{j}")).collect();
        let b: Vec<String> = (1..=m).map(|j| format!("ξ*{j}·∂η{j}")).collect();
        srcs.push(format!("∂ζ + {} − ({})", a.join(" + "), b.join(" + ")));
        for k in 1..=m {
            srcs.push(format!("∂ξ{k}"));
            srcs.push(format!("∂η{k}"));
            srcs.push(format!("∂ξ*{k} − 1/2·(ζ·∂η{k} + η*{k}·∂ζ*)"));
            srcs.push(format!("∂η*{k} + 1/2·(ζ·∂ξ{k} + ξ*{k}·∂ζ*)"));
        }
        srcs.iter().map(|s| self.parse(s)).collect()
    }

    /// The `2m + 1` generators on functions of the starred coordinates.
    pub fn starred_generators(&self) -> Vec<DiffOp> {
        let mut srcs = vec![String::from("∂ζ*")];
        for k in 1..=self.m {
            srcs.push(format!("∂ξ*{k} − 1/2·η*{k}·∂ζ*"));
            srcs.push(format!("∂η*{k} + 1/2·ξ*{k}·∂ζ*"));
        }
        srcs.iter().map(|s| self.parse(s)).collect()
    }

    /// Predual indices of `ζ*, η*_k, ξ*_k`.
    pub fn starred_coordinates(&self) -> Vec<usize> {
        let mut v: Vec<usize> = [Block::ZStar, Block::YStar, Block::XStar]
            .iter()
            .flat_map(|&b| (1..=b.len(self.m)).map(move |k| (b, k)))
            .map(|(b, k)| self.index(b, k))
            .collect();
        v.sort_unstable();
        v
    }
}

/// One operator compared against its closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCheck {
    pub label: String,
    pub computed: String,
    pub expected: String,
    /// `computed − expected`, printed; `"0"` on a match.
    pub difference: String,
}

impl FieldCheck {
    pub fn matched(&self) -> bool {
        self.difference == "0"
    }
}

#[derive(Clone, Debug)]
pub struct FieldReport {
    pub m: usize,
    pub fields: Vec<FieldCheck>,
}

impl FieldReport {
    pub fn passed(&self) -> bool {
        self.fields.iter().all(FieldCheck::matched)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &FieldCheck> {
        self.fields.iter().filter(|f| !f.matched())
    }
}

/// Compares every computed `γ_ω(V)` with its closed form.
pub fn field_closed_form_check(model: &SemidirectModel) -> Result<FieldReport, OrbitError> {
    let orbit = model.orbit()?;
    let names = model.coords();
    let fields = model
        .gamma_closed_forms()
        .into_iter()
        .enumerate()
        .map(|(i, (label, expected))| {
            let computed = orbit.gamma_field(i);
            FieldCheck {
                label,
                computed: format!("{}", computed.display(names)),
                expected: format!("{}", expected.display(names)),
                difference: format!("{}", (computed - &expected).display(names)),
            }
        })
        .collect();
    Ok(FieldReport { m: model.m, fields })
}

#[derive(Clone, Debug)]
pub struct GeneratorReport {
    pub m: usize,
    pub bound: u32,
    /// Dimension of the non-constant commutant.
    pub dim: usize,
    pub expected_dim: usize,
    pub span_equal: bool,
    pub zeroth_order_constants: bool,
    pub computed: Vec<String>,
    pub expected: Vec<String>,
}

impl GeneratorReport {
    pub fn passed(&self) -> bool {
        self.span_equal && self.dim == self.expected_dim && self.zeroth_order_constants
    }
}

/// Solves for the first-order commutant and compares it, modulo constants,
/// with the span of [`SemidirectModel::invariant_generators`].
pub fn generator_span_check(model: &SemidirectModel) -> Result<GeneratorReport, InvariantError> {
    let orbit = model.orbit()?;
    let res = commutant_first_order(&orbit, DegreeBound::Auto, None)?;
    let computed = res.basis.without_constants();
    let expected = OpBasis::from_ops(&model.invariant_generators());
    Ok(GeneratorReport {
        m: model.m,
        bound: res.bound,
        dim: computed.dim(),
        expected_dim: 4 * model.m + 2,
        span_equal: span_equal(&computed, &expected),
        zeroth_order_constants: res.basis.zeroth_order_is_constants(),
        computed: computed.print(model.coords()),
        expected: expected.print(model.coords()),
    })
}

/// How a generator fared under restriction to the starred coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionOutcome {
    pub generator: String,
    pub result: Restriction,
}

#[derive(Clone, Debug)]
pub struct StarredRestriction {
    /// Restricted generators, in generator order.
    pub generators: Vec<DiffOp>,
    pub outcomes: Vec<RestrictionOutcome>,
}

impl StarredRestriction {
    pub fn excluded(&self) -> impl Iterator<Item = &RestrictionOutcome> {
        self.outcomes.iter().filter(|o| !matches!(o.result, Restriction::Restricted(_)))
    }

    pub fn basis(&self) -> OpBasis {
        OpBasis::from_ops(&self.generators)
    }
}

/// Restricts the invariant generators to functions of the starred
/// coordinates, keeping those that close on them.
pub fn starred_restriction(model: &SemidirectModel) -> StarredRestriction {
    let vars = model.starred_coordinates();
    let mut generators = Vec::new();
    let mut outcomes = Vec::new();
    for g in model.invariant_generators() {
        let result = restrict_to_subvariables(&g, &vars);
        if let Restriction::Restricted(op) = &result {
            generators.push(op.clone());
        }
        outcomes.push(RestrictionOutcome { generator: format!("{}", g.display(model.coords())), result });
    }
    StarredRestriction { generators, outcomes }
}
