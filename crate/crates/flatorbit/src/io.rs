//! Algebra spec files: JSON structure constants plus an optional base
//! functional, coordinate names and golden invariant operators.
//!
//! ```json
//! { "dim": 5, "labels": ["X0", ...],
//!   "brackets": [ { "i": 4, "j": 3, "value": { "1": "1" } } ],
//!   "xi0": ["1", "0", "0", "0", "0"],
//!   "coords": ["η1", ...],
//!   "expected_invariant_ops": ["∂2", "∂1 + η1·∂3 − η2·∂4"] }
//! ```
//!
//! Rationals are strings `"p/q"` or `"p"`. A bracket entry sets `[X_i, X_j]`;
//! pairs with `i < j` are stored as `[X_j, X_i] = −value`.

use std::collections::BTreeMap;
use std::path::Path;

use flatorbit_core::format::{parse_op, OpNames, ParseError};
use flatorbit_core::lie::{LieError, SparseVec};
use flatorbit_core::orbit::OrbitError;
use flatorbit_core::rational::{parse_vector, ParseRationalError};
use flatorbit_core::{LieAlgebra, OpBasis, OrbitData, Rational};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad rational: {0}")]
    Rational(#[from] ParseRationalError),
    #[error("bracket ({i}, {j}): key {key:?} is not a basis index")]
    BadKey { i: usize, j: usize, key: String },
    #[error("bracket ({i}, {i}) is diagonal")]
    DiagonalBracket { i: usize },
    #[error("\"{field}\" has length {got}, expected {expected}")]
    Length { field: &'static str, expected: usize, got: usize },
    #[error("expected operator {op:?}: {source}")]
    Operator { op: String, source: ParseError },
    #[error("unknown bundled algebra {0:?}")]
    UnknownBundled(String),
    #[error(transparent)]
    Structure(#[from] LieError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub value: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpecFile {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    pub brackets: Vec<BracketEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi0: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_invariant_ops: Option<Vec<String>>,
}

impl AlgebraSpecFile {
    pub fn from_json(src: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec files serialize") + "\n"
    }

    /// Spec file for an algebra with its stored brackets in canonical order.
    pub fn from_algebra(g: &LieAlgebra) -> Self {
        let brackets = g
            .stored_brackets()
            .map(|(i, j, v)| BracketEntry { i, j, value: v.iter().map(|(k, c)| (k.to_string(), c.to_string())).collect() })
            .collect();
        AlgebraSpecFile {
            dim: g.dim(),
            labels: Some(g.labels().to_vec()),
            brackets,
            xi0: None,
            coords: None,
            expected_invariant_ops: None,
        }
    }

    /// Structure constants without running validation, so that a failing
    /// algebra can still be reported on.
    pub fn algebra_unchecked(&self) -> Result<LieAlgebra, InputError> {
        let labels = self.labels.clone().unwrap_or_else(|| LieAlgebra::default_labels(self.dim));
        let mut brackets: Vec<(usize, usize, SparseVec)> = Vec::new();
        for b in &self.brackets {
            let mut v: SparseVec = Vec::new();
            for (key, val) in &b.value {
                let k: usize = key.trim().parse().map_err(|_| InputError::BadKey { i: b.i, j: b.j, key: key.clone() })?;
                let c: Rational = val.parse()?;
                if !c.is_zero() {
                    v.push((k, c));
                }
            }
            v.sort_by_key(|t| t.0);
            if b.i == b.j {
                return Err(InputError::DiagonalBracket { i: b.i });
            }
            if b.i > b.j {
                brackets.push((b.i, b.j, v));
            } else {
                brackets.push((b.j, b.i, v.into_iter().map(|(k, c)| (k, -c)).collect()));
            }
        }
        Ok(LieAlgebra::new_unchecked(labels, brackets)?)
    }

    pub fn xi0(&self) -> Result<Option<Vec<Rational>>, InputError> {
        let Some(raw) = &self.xi0 else { return Ok(None) };
        if raw.len() != self.dim {
            return Err(InputError::Length { field: "xi0", expected: self.dim, got: raw.len() });
        }
        Ok(Some(parse_vector(raw)?))
    }

    /// Coordinate names for the `dim − 1` orbit coordinates.
    pub fn coord_names(&self) -> Result<OpNames, InputError> {
        let d = self.dim.saturating_sub(1);
        match &self.coords {
            None => Ok(OpNames::indexed(d)),
            Some(c) if c.len() == d => Ok(OpNames::named(c)),
            Some(c) => Err(InputError::Length { field: "coords", expected: d, got: c.len() }),
        }
    }

    /// Golden operators parsed in the file's coordinates.
    pub fn expected_ops(&self) -> Result<Option<OpBasis>, InputError> {
        let Some(src) = &self.expected_invariant_ops else { return Ok(None) };
        let names = self.coord_names()?;
        let ops = src
            .iter()
            .map(|s| parse_op(s, &names).map_err(|e| InputError::Operator { op: s.clone(), source: e }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Some(OpBasis::from_ops(&ops)))
    }
}

/// Algebra spec files shipped with the crate.
pub const BUNDLED: [(&str, &str); 5] = [
    ("ex57", include_str!("../data/ex57.json")),
    ("ex58", include_str!("../data/ex58.json")),
    ("heisenberg_m1", include_str!("../data/heisenberg_m1.json")),
    ("semidirect_m1", include_str!("../data/semidirect_m1.json")),
    ("abelian", include_str!("../data/abelian.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// A spec file as read from disk or from the bundled set, with the digest
/// of its bytes.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub source: String,
    pub text: String,
    pub spec: AlgebraSpecFile,
}

impl LoadedSpec {
    /// `bundled:<name>` selects a bundled file; anything else is a path.
    pub fn load(arg: &str) -> Result<Self, InputError> {
        let text = match arg.strip_prefix("bundled:") {
            Some(name) => bundled(name).ok_or_else(|| InputError::UnknownBundled(name.into()))?.to_string(),
            None => std::fs::read_to_string(Path::new(arg)).map_err(|e| InputError::Io { path: arg.into(), source: e })?,
        };
        Self::from_text(arg, text)
    }

    pub fn from_text(source: &str, text: String) -> Result<Self, InputError> {
        let spec = AlgebraSpecFile::from_json(&text)?;
        Ok(LoadedSpec { source: source.into(), text, spec })
    }

    pub fn digest(&self) -> String {
        digest(&[self.text.as_bytes()])
    }
}

/// Hex SHA-256 over the concatenation of length-prefixed parts.
pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    format!("{:x}", h.finalize())
}

/// Why an orbit could not be built from a spec file.
#[derive(Debug, thiserror::Error)]
pub enum OrbitInputError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("the file has no \"xi0\"")]
    MissingXi0,
    #[error(transparent)]
    Orbit(#[from] OrbitError),
}

/// Validated algebra and its orbit through `xi0`, with the file's coordinate names.
pub fn orbit_from_spec(spec: &AlgebraSpecFile) -> Result<OrbitData, OrbitInputError> {
    let g = spec.algebra_unchecked()?;
    let report = g.validate();
    if !report.passed() {
        return Err(OrbitError::Lie(LieError::Invalid(report)).into());
    }
    let xi0 = spec.xi0()?.ok_or(OrbitInputError::MissingXi0)?;
    let names = spec.coord_names()?;
    Ok(OrbitData::build(&g, &xi0)?.with_coords(names))
}

/// Rational vector as JSON strings.
pub fn rationals_json(v: &[Rational]) -> Vec<String> {
    v.iter().map(Rational::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use flatorbit_core::heisenberg::{build_heisenberg, build_semidirect};

    #[test]
    fn bundled_files_parse_and_build_orbits() {
        for (name, text) in BUNDLED {
            let spec = AlgebraSpecFile::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            let orbit = orbit_from_spec(&spec).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(orbit.dim0() + 1, spec.dim);
            spec.expected_ops().unwrap().expect("golden operators present");
        }
    }

    #[test]
    fn bundled_generated_algebras_match_builders() {
        let h = AlgebraSpecFile::from_json(bundled("heisenberg_m1").unwrap()).unwrap();
        assert_eq!(h.algebra_unchecked().unwrap(), build_heisenberg(1));
        let s = AlgebraSpecFile::from_json(bundled("semidirect_m1").unwrap()).unwrap();
        let model = build_semidirect(1);
        assert_eq!(&s.algebra_unchecked().unwrap(), model.algebra());
        assert_eq!(s.coord_names().unwrap(), *model.coords());
        assert_eq!(s.expected_ops().unwrap().unwrap(), OpBasis::from_ops(&model.invariant_generators()));
    }

    #[test]
    fn round_trip() {
        let spec = AlgebraSpecFile::from_json(bundled("ex58").unwrap()).unwrap();
        let g = spec.algebra_unchecked().unwrap();
        let again = AlgebraSpecFile::from_algebra(&g);
        assert_eq!(again.algebra_unchecked().unwrap(), g);
        assert_eq!(AlgebraSpecFile::from_json(&again.to_json()).unwrap(), again);
    }

    #[test]
    fn upper_pairs_are_negated() {
        let src = r#"{"dim": 3, "brackets": [{"i": 1, "j": 2, "value": {"0": "1"}}]}"#;
        let g = AlgebraSpecFile::from_json(src).unwrap().algebra_unchecked().unwrap();
        assert_eq!(g.constant(2, 1, 0), Rational::from_integer(-1));
        assert_eq!(g.constant(1, 2, 0), Rational::one());
    }

    #[test]
    fn input_errors() {
        assert!(matches!(AlgebraSpecFile::from_json("{"), Err(InputError::Json(_))));
        assert!(matches!(AlgebraSpecFile::from_json(r#"{"dim": 2, "brackets": [], "extra": 1}"#), Err(InputError::Json(_))));
        let bad_key = AlgebraSpecFile::from_json(r#"{"dim": 2, "brackets": [{"i": 1, "j": 0, "value": {"x": "1"}}]}"#).unwrap();
        assert!(matches!(bad_key.algebra_unchecked(), Err(InputError::BadKey { .. })));
        let bad_q = AlgebraSpecFile::from_json(r#"{"dim": 2, "brackets": [{"i": 1, "j": 0, "value": {"0": "1/0"}}]}"#).unwrap();
        assert!(matches!(bad_q.algebra_unchecked(), Err(InputError::Rational(_))));
        let short = AlgebraSpecFile::from_json(r#"{"dim": 2, "brackets": [], "xi0": ["1"]}"#).unwrap();
        assert!(matches!(short.xi0(), Err(InputError::Length { .. })));
        assert!(matches!(LoadedSpec::load("bundled:nope"), Err(InputError::UnknownBundled(_))));
    }
}
