//! Command-line interface. Every command produces a [`RunReport`] whose
//! exit code follows the contract in [`ExitCode`]: 0 when all checks pass,
//! 1 when a check fails, 2 for unreadable or malformed input, 3 for a failed
//! precondition such as a non-flat orbit, 4 when a resource limit is hit.

use clap::{Parser, Subcommand, ValueEnum};
use flatorbit_core::format::OpNames;
use flatorbit_core::heisenberg::{build_semidirect, field_closed_form_check, generator_span_check, starred_restriction};
use flatorbit_core::invariant::{commutant_first_order, invariant_ops_via_pushforward, span_equal, DegreeBound, InvariantError, Restriction};
use flatorbit_core::lie::LieError;
use flatorbit_core::orbit::{is_flat, OrbitError};
use flatorbit_core::rational::parse_vector;
use flatorbit_core::{DiffOp, GroupLaw, OpBasis, OrbitData, RatMatrix};
use serde_json::{json, Map, Value};

use crate::io::{digest, orbit_from_spec, rationals_json, InputError, LoadedSpec, OrbitInputError};
use crate::numeric::{self, NumericCheck};
use crate::report::{Check, ExitCode, RunReport};
use crate::suite;

#[derive(Debug, Parser)]
#[command(name = "flatorbit", version, about = "Invariant differential operators on flat coadjoint orbits")]
pub struct Cli {
    /// Print the JSON run report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check antisymmetry, the Jacobi identity, the ideal flag and nilpotency.
    Validate {
        /// Spec file path, or `bundled:<name>`.
        file: String,
    },
    /// Flatness, the orbit form and the cocycle of the orbit through `xi0` (JSON).
    OrbitInfo { file: String },
    /// Basis of the first-order invariant operators on the orbit through `xi0`.
    InvariantOps {
        file: String,
        /// Coefficient degree bound: `auto` or a number.
        #[arg(long, default_value = "auto")]
        degree: String,
        /// Highest bound tried by `--degree auto` (default `2·step + 2`).
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, value_enum, default_value_t = Method::Commutant)]
        method: Method,
    },
    /// Group product `x · y` of two algebra elements.
    Bch {
        file: String,
        /// Comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Closed-form checks for the semidirect model (JSON).
    Heisenberg {
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum)]
        check: HeisenbergCheck,
    },
    /// Numerical checks of the grid Weyl calculus (JSON).
    WeylCheck {
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, value_enum)]
        suite: WeylSuite,
    },
    /// Run the acceptance criteria.
    Suite {
        /// Run every criterion (the default).
        #[arg(long)]
        all: bool,
        /// Skip the numerical criteria.
        #[arg(long)]
        no_numeric: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Commutant,
    Pushforward,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HeisenbergCheck {
    Lemma61,
    Prop62,
    Cor63,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeylSuite {
    Pairing,
    Covariance,
    Convolution,
    Seminorms,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::OrbitInfo { .. } => "orbit-info",
            Command::InvariantOps { .. } => "invariant-ops",
            Command::Bch { .. } => "bch",
            Command::Heisenberg { .. } => "heisenberg",
            Command::WeylCheck { .. } => "weyl-check",
            Command::Suite { .. } => "suite",
        }
    }

    /// Commands whose output is always JSON.
    pub fn json_only(&self) -> bool {
        matches!(self, Command::OrbitInfo { .. } | Command::Heisenberg { .. } | Command::WeylCheck { .. })
    }
}

/// A failure that ends a command early, with its exit code and any checks
/// already made.
#[derive(Debug)]
struct Abort {
    code: ExitCode,
    message: String,
    checks: Vec<Check>,
}

impl Abort {
    fn new(code: ExitCode, message: String) -> Self {
        Abort { code, message, checks: Vec::new() }
    }
}

impl From<InputError> for Abort {
    fn from(e: InputError) -> Self {
        Abort::new(ExitCode::Parse, e.to_string())
    }
}

impl From<OrbitError> for Abort {
    fn from(e: OrbitError) -> Self {
        let code = match &e {
            OrbitError::Lie(LieError::Invalid(_)) => ExitCode::CheckFailed,
            OrbitError::Lie(_) | OrbitError::DimensionMismatch { .. } => ExitCode::Parse,
            OrbitError::InversionFailure { .. } => ExitCode::Resource,
            OrbitError::NonUnitCentralPairing | OrbitError::CenterNotOneDimensional(_) | OrbitError::NotFlat { .. } => ExitCode::Precondition,
        };
        Abort::new(code, e.to_string())
    }
}

impl From<OrbitInputError> for Abort {
    fn from(e: OrbitInputError) -> Self {
        match e {
            OrbitInputError::Input(e) => e.into(),
            OrbitInputError::MissingXi0 => Abort::new(ExitCode::Precondition, e.to_string()),
            OrbitInputError::Orbit(e) => e.into(),
        }
    }
}

impl From<InvariantError> for Abort {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::Orbit(e) => e.into(),
            InvariantError::DegreeEscalationLimit { .. } | InvariantError::OrderLimit { .. } => Abort::new(ExitCode::Resource, e.to_string()),
            InvariantError::NotInvariant(_) => Abort::new(ExitCode::CheckFailed, e.to_string()),
        }
    }
}

type Outcome = Result<Vec<Check>, Abort>;

/// Runs a command. `seed` drives every random sample.
pub fn execute(cmd: &Command, seed: u64) -> RunReport {
    let name = cmd.name();
    let args = format!("{cmd:?} seed={seed}");
    let (input_digest, outcome) = match cmd {
        Command::Validate { file } => with_spec(file, validate),
        Command::OrbitInfo { file } => with_spec(file, orbit_info),
        Command::InvariantOps { file, degree, max_degree, method } => with_spec(file, |s| invariant_ops(s, degree, *max_degree, *method)),
        Command::Bch { file, x, y } => with_spec(file, |s| bch(s, x, y)),
        Command::Heisenberg { m, check } => (String::new(), heisenberg(*m, *check)),
        Command::WeylCheck { n, suite } => (String::new(), weyl_check(*n, *suite, seed)),
        Command::Suite { no_numeric, .. } => (String::new(), Ok(run_suite(!no_numeric, seed))),
    };
    let inputs = digest(&[args.as_bytes(), input_digest.as_bytes()]);
    match outcome {
        Ok(checks) => RunReport::from_checks(name, inputs, checks),
        Err(Abort { code, checks, .. }) if !checks.is_empty() => {
            let mut r = RunReport::from_checks(name, inputs, checks);
            r.exit_code = code;
            r
        }
        Err(Abort { code, message, .. }) => RunReport::error(name, inputs, code, message),
    }
}

fn with_spec(file: &str, f: impl FnOnce(&LoadedSpec) -> Outcome) -> (String, Outcome) {
    match LoadedSpec::load(file) {
        Ok(s) => (s.digest(), f(&s)),
        Err(e) => (String::new(), Err(e.into())),
    }
}

fn validate(s: &LoadedSpec) -> Outcome {
    let g = s.spec.algebra_unchecked()?;
    let r = g.validate();
    let label = |i: &usize| g.label(*i).to_string();
    Ok(vec![
        Check::new("antisymmetry", r.antisymmetry_ok(), format!("{} failures", r.antisymmetry_failures.len()), json!(r.antisymmetry_failures)),
        Check::new(
            "jacobi",
            r.jacobi_ok(),
            match r.jacobi_failures.first() {
                None => "holds on every basis triple".into(),
                Some((i, j, k)) => {
                    let more = r.jacobi_failures.len() - 1;
                    let tail = if more > 0 { format!(" and {more} more triples") } else { String::new() };
                    format!("fails on ({}, {}, {}){tail}", label(i), label(j), label(k))
                }
            },
            json!(r.jacobi_failures.iter().map(|(i, j, k)| [label(i), label(j), label(k)]).collect::<Vec<_>>()),
        ),
        Check::new(
            "jordan_holder",
            r.jordan_holder_ok(),
            format!("{} brackets leave the flag", r.jordan_holder_failures.len()),
            json!(r.jordan_holder_failures),
        ),
        Check::new(
            "nilpotent",
            r.nilpotent(),
            r.step.map_or("lower central series does not reach 0".into(), |s| format!("step {s}, center dimension {}", r.center_dim)),
            json!({ "step": r.step, "center_dim": r.center_dim }),
        ),
    ])
}

fn matrix_json(m: &RatMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| rationals_json(r)).collect::<Vec<_>>())
}

fn orbit_info(s: &LoadedSpec) -> Outcome {
    let g = s.spec.algebra_unchecked()?;
    let report = g.validate();
    if !report.passed() {
        return Err(OrbitError::Lie(LieError::Invalid(report)).into());
    }
    let xi0 = s.spec.xi0()?.ok_or(OrbitInputError::MissingXi0)?;
    let fl = is_flat(&g, &xi0)?;
    if !fl.flat {
        let details = json!({ "flat": false, "rank": fl.rank, "expected_rank": fl.expected_rank, "center_dim": fl.center.dim() });
        let summary = format!("rank {} but dim 𝔤 − dim 𝔷 = {}", fl.rank, fl.expected_rank);
        return Err(Abort { code: ExitCode::Precondition, message: summary.clone(), checks: vec![Check::new("flat", false, summary, details)] });
    }
    let o = orbit_from_spec(&s.spec)?;
    let names = o.coords();
    let polys = |m: &flatorbit_core::PolyMap| m.components().iter().map(|p| p.display(&names.vars).to_string()).collect::<Vec<_>>();
    let fields: Vec<String> = o.gamma_fields().iter().map(|f| f.display(names).to_string()).collect();
    let details = json!({
        "flat": true,
        "rank": fl.rank,
        "dim0": o.dim0(),
        "step": o.group().step(),
        "normalized_xi0": rationals_json(&fl.normalized_xi0),
        "omega": matrix_json(o.omega()),
        "omega_sharp": matrix_json(o.omega_sharp()),
        "chi": polys(o.chi()),
        "chi_inverse": polys(o.chi_inverse()),
        "gamma_fields": fields,
    });
    Ok(vec![Check::new("flat", true, format!("rank {}, dim 𝔤₀ = {}", fl.rank, o.dim0()), details)])
}

/// `{"0": a_0, "j": a_j}` for `a_0 + Σ a_j ∂_j`, with 1-based `j`.
fn op_json(op: &DiffOp, names: &OpNames) -> Value {
    let mut coeffs = Map::new();
    for (alpha, c) in op.terms() {
        let key = if alpha.is_one() {
            "0".to_string()
        } else {
            alpha.support().map(|i| (i + 1).to_string().repeat(alpha.exponent(i) as usize)).collect::<Vec<_>>().join(",")
        };
        coeffs.insert(key, Value::String(c.display(&names.vars).to_string()));
    }
    json!({ "text": op.display(names).to_string(), "coeffs": coeffs })
}

fn basis_json(b: &OpBasis, names: &OpNames) -> Value {
    json!(b.ops().iter().map(|op| op_json(op, names)).collect::<Vec<_>>())
}

fn basis_summary(b: &OpBasis, names: &OpNames) -> String {
    let lines = b.print(names);
    format!("dimension {}\n    {}", lines.len(), lines.join("\n    "))
}

fn invariant_ops(s: &LoadedSpec, degree: &str, cap: Option<u32>, method: Method) -> Outcome {
    let bound = match degree.trim() {
        "auto" => DegreeBound::Auto,
        k => DegreeBound::Fixed(k.parse().map_err(|_| Abort::new(ExitCode::Parse, format!("--degree must be auto or a number, got {k:?}")))?),
    };
    let o: OrbitData = orbit_from_spec(&s.spec)?;
    let names = o.coords().clone();
    let mut checks = Vec::new();
    let mut computed = None;
    if method != Method::Pushforward {
        let r = commutant_first_order(&o, bound, cap)?;
        let details = json!({
            "bound": r.bound,
            "history": r.history,
            "dim": r.basis.dim(),
            "zeroth_order_constants": r.basis.zeroth_order_is_constants(),
            "operators": basis_json(&r.basis, &names),
        });
        checks.push(Check::new("commutant", true, basis_summary(&r.basis, &names), details));
        computed = Some(r.basis);
    }
    if method != Method::Commutant {
        let b = invariant_ops_via_pushforward(&o)?;
        checks.push(Check::new("pushforward", true, basis_summary(&b, &names), json!({ "dim": b.dim(), "operators": basis_json(&b, &names) })));
        if let Some(c) = &computed {
            let eq = span_equal(c, &b);
            checks.push(Check::new("span_equal", eq, format!("commutant and pushforward spans {}", if eq { "agree" } else { "differ" }), json!(eq)));
        } else {
            computed = Some(b);
        }
    }
    if let (Some(want), Some(got)) = (s.spec.expected_ops()?, &computed) {
        let got = got.without_constants();
        let eq = span_equal(&got, &want);
        let details = json!({ "expected": want.print(&names), "computed": got.print(&names) });
        checks.push(Check::new("golden", eq, format!("span {} expected_invariant_ops", if eq { "equals" } else { "differs from" }), details));
    }
    Ok(checks)
}

fn bch(s: &LoadedSpec, x: &str, y: &str) -> Outcome {
    let g = s.spec.algebra_unchecked()?;
    let report = g.validate();
    if !report.passed() {
        return Err(OrbitError::Lie(LieError::Invalid(report)).into());
    }
    let parse = |v: &str| -> Result<Vec<flatorbit_core::Rational>, Abort> {
        let items: Vec<&str> = v.split(',').map(str::trim).collect();
        let r = parse_vector(&items).map_err(|e| Abort::new(ExitCode::Parse, e.to_string()))?;
        if r.len() != g.dim() {
            return Err(Abort::new(ExitCode::Parse, format!("vector has {} entries, algebra has dimension {}", r.len(), g.dim())));
        }
        Ok(r)
    };
    let (x, y) = (parse(x)?, parse(y)?);
    let grp = GroupLaw::new(&g).map_err(OrbitError::from)?;
    let xy = grp.bch(&x, &y).map_err(OrbitError::from)?;
    let yx = grp.bch(&y, &x).map_err(OrbitError::from)?;
    let inv_ok = grp.bch(&xy, &grp.inverse(&y)).map_err(OrbitError::from)? == x;
    let details = json!({ "x": rationals_json(&x), "y": rationals_json(&y), "product": rationals_json(&xy), "reverse": rationals_json(&yx) });
    let summary = format!("x·y = ({})", rationals_json(&xy).join(", "));
    Ok(vec![Check::new("bch", inv_ok, summary, details)])
}

fn heisenberg(m: usize, check: HeisenbergCheck) -> Outcome {
    if m == 0 {
        return Err(Abort::new(ExitCode::Parse, "--m must be at least 1".into()));
    }
    let model = build_semidirect(m);
    let names = model.coords();
    match check {
        HeisenbergCheck::Lemma61 => {
            let r = field_closed_form_check(&model)?;
            let fields: Vec<_> = r
                .fields
                .iter()
                .map(|f| json!({ "label": f.label, "computed": f.computed, "expected": f.expected, "difference": f.difference, "matched": f.matched() }))
                .collect();
            let bad = r.mismatches().count();
            Ok(vec![Check::new("fundamental_fields", r.passed(), format!("{} fields, {bad} mismatched", r.fields.len()), json!({ "m": m, "fields": fields }))])
        }
        HeisenbergCheck::Prop62 => {
            let r = generator_span_check(&model)?;
            let details = json!({
                "m": m, "bound": r.bound, "dim": r.dim, "expected_dim": r.expected_dim, "span_equal": r.span_equal,
                "zeroth_order_constants": r.zeroth_order_constants, "computed": r.computed, "expected": r.expected,
            });
            Ok(vec![Check::new("invariant_generators", r.passed(), format!("dimension {} (expected {}), span equal: {}", r.dim, r.expected_dim, r.span_equal), details)])
        }
        HeisenbergCheck::Cor63 => {
            let r = starred_restriction(&model);
            let want = OpBasis::from_ops(&model.starred_generators());
            let ok = r.basis() == want;
            let outcomes: Vec<_> = r
                .outcomes
                .iter()
                .map(|o| {
                    let result = match &o.result {
                        Restriction::Restricted(op) => op.display(names).to_string(),
                        Restriction::Vanishes => "vanishes".into(),
                        Restriction::NotClosed => "not closed".into(),
                    };
                    json!({ "generator": o.generator, "restricted": result })
                })
                .collect();
            let printed: Vec<String> = r.generators.iter().map(|g| g.display(names).to_string()).collect();
            let details = json!({ "m": m, "generators": printed, "expected": want.print(names), "outcomes": outcomes });
            Ok(vec![Check::new("starred_restriction", ok, printed.join(", "), details)])
        }
    }
}

fn numeric_check(c: NumericCheck) -> Check {
    let summary = format!("{:.3e} (tolerance {:e})", c.value, c.tolerance);
    Check::new(c.test.clone(), c.pass, summary, serde_json::to_value(&c).expect("numeric checks serialize"))
}

fn weyl_check(n: usize, which: WeylSuite, seed: u64) -> Outcome {
    let g = numeric::grid(n).map_err(|e| Abort::new(ExitCode::Parse, e.to_string()))?;
    let fail = |e: crate::weyl::WeylError| Abort::new(ExitCode::Precondition, e.to_string());
    let mut out = Vec::new();
    match which {
        WeylSuite::Pairing => {
            out.push(numeric_check(numeric::op_identity(&g)));
            out.push(numeric_check(numeric::self_adjoint(&g)));
            out.push(numeric_check(numeric::pairing(&g, seed, 20).map_err(fail)?));
            out.push(numeric_check(numeric::wigner_diagonal(&g).map_err(fail)?));
        }
        WeylSuite::Covariance => {
            out.push(numeric_check(numeric::covariance(&g).map_err(fail)?));
            let (c, m) = numeric::covariance_slope(n).map_err(fail)?;
            let mut check = numeric_check(c);
            check.summary = format!("slope {:.3} vs nominal {} ({:.3e} at N = {}, {:.3e} at N = {})", m.slope, numeric::NOMINAL_ORDER, m.coarse, m.n, m.fine, 2 * m.n);
            check.details["measurement"] = serde_json::to_value(&m).expect("measurements serialize");
            out.push(check);
        }
        WeylSuite::Convolution => {
            out.push(numeric_check(numeric::conv_intertwining(&g).map_err(fail)?));
            out.push(numeric_check(numeric::approximate_identity(&g).map_err(fail)?));
            out.push(numeric_check(numeric::conv_linearity(&g).map_err(fail)?));
            out.push(numeric_check(numeric::conv_positivity(&g).map_err(fail)?));
        }
        WeylSuite::Seminorms => {
            out.push(numeric_check(numeric::hs_constant(&g)));
            let study = numeric::seminorm_study(&g);
            let mut checks: Vec<Check> = study.checks.into_iter().map(numeric_check).collect();
            checks[0].details["table"] = serde_json::to_value(&study.rows).expect("rows serialize");
            out.extend(checks);
        }
    }
    Ok(out)
}

fn run_suite(numeric: bool, seed: u64) -> Vec<Check> {
    suite::run_all(numeric, seed).iter().map(suite::CriterionResult::to_check).collect()
}

/// Renders a report for the terminal or as JSON.
pub fn render(report: &RunReport, json: bool) -> String {
    if json {
        report.to_json()
    } else {
        report.to_text()
    }
}
