//! JSON input files.
//!
//! * lattice: `{"dim": n, "r": number | "inf", "weights": [..]}`. Either
//!   `dim` or `weights` may be left out; missing weights are all one.
//! * sequence: `{"space": lattice, "vectors": [[..], ..]}`.
//! * operator: `{"matrix": [[..], ..], "domain": lattice, "codomain": lattice}`
//!   with one matrix row per codomain coordinate.
//! * tensor: `{"p": number | "inf", "space": lattice, "rows": [[..], ..]}`.
//!
//! Unknown keys are rejected.

use std::fmt;

use latsum_core::{Exponent, LatticeSpace, LinearOperator, TensorElement, VectorSequence};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// An exponent in `[1, inf]`, written as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExponent", into = "RawExponent")]
pub struct ExpValue(pub f64);

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawExponent {
    Number(f64),
    Text(String),
}

impl TryFrom<RawExponent> for ExpValue {
    type Error = String;

    fn try_from(raw: RawExponent) -> Result<Self, String> {
        match raw {
            RawExponent::Number(v) => Ok(ExpValue(v)),
            RawExponent::Text(s) => parse_exponent(&s).map(ExpValue),
        }
    }
}

impl From<ExpValue> for RawExponent {
    fn from(e: ExpValue) -> Self {
        if e.0.is_infinite() {
            RawExponent::Text("inf".into())
        } else {
            RawExponent::Number(e.0)
        }
    }
}

impl fmt::Display for ExpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl From<Exponent> for ExpValue {
    fn from(e: Exponent) -> Self {
        ExpValue(e.value())
    }
}

/// Parses `"inf"` (or `"infinity"`) and plain numbers.
pub fn parse_exponent(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("expected a number or \"inf\", got {s:?}")),
    }
}

pub fn exponent(v: ExpValue, field: &str) -> Result<Exponent, CliError> {
    Exponent::new(v.0).map_err(|e| CliError::core(field, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub r: ExpValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl SpaceFile {
    pub fn build(&self, field: &str) -> Result<LatticeSpace, CliError> {
        let r = exponent(self.r, &format!("{field}.r"))?;
        let weights = match (&self.weights, self.dim) {
            (Some(w), Some(d)) if w.len() != d => {
                return Err(CliError::input(
                    format!("{field}.dim"),
                    format!("dim {d} does not match {} weights", w.len()),
                ))
            }
            (Some(w), _) => w.clone(),
            (None, Some(d)) => vec![1.0; d],
            (None, None) => return Err(CliError::input(format!("{field}.dim"), "give dim or weights")),
        };
        LatticeSpace::new(r, weights).map_err(|e| CliError::core(format!("{field}.weights"), e))
    }

    pub fn of(space: &LatticeSpace) -> Self {
        SpaceFile {
            dim: Some(space.dim()),
            r: space.exponent().into(),
            weights: Some(space.weights().to_vec()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceFile {
    pub space: SpaceFile,
    pub vectors: Vec<Vec<f64>>,
}

impl SequenceFile {
    pub fn build(&self) -> Result<VectorSequence, CliError> {
        let space = self.space.build("space")?;
        rows(&space, &self.vectors, "vectors")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub matrix: Vec<Vec<f64>>,
    pub domain: SpaceFile,
    pub codomain: SpaceFile,
}

impl OperatorFile {
    pub fn build(&self) -> Result<LinearOperator, CliError> {
        let e = self.domain.build("domain")?;
        let f = self.codomain.build("codomain")?;
        if self.matrix.len() != f.dim() {
            return Err(CliError::input(
                "matrix",
                format!("expected {} rows (codomain dim), got {}", f.dim(), self.matrix.len()),
            ));
        }
        check_rows(e.dim(), &self.matrix, "matrix")?;
        LinearOperator::new(&self.matrix, e, f).map_err(|err| CliError::core("matrix", err))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub p: ExpValue,
    pub space: SpaceFile,
    pub rows: Vec<Vec<f64>>,
}

impl TensorFile {
    pub fn build(&self) -> Result<TensorElement, CliError> {
        let p = exponent(self.p, "p")?;
        let space = self.space.build("space")?;
        let s = rows(&space, &self.rows, "rows")?;
        TensorElement::new(p, s).map_err(|e| CliError::core("rows", e))
    }
}

fn check_rows(dim: usize, data: &[Vec<f64>], field: &str) -> Result<(), CliError> {
    for (i, row) in data.iter().enumerate() {
        if row.len() != dim {
            return Err(CliError::input(
                format!("{field}[{i}]"),
                format!("expected {dim} coordinates, got {}", row.len()),
            ));
        }
    }
    Ok(())
}

fn rows(space: &LatticeSpace, data: &[Vec<f64>], field: &str) -> Result<VectorSequence, CliError> {
    check_rows(space.dim(), data, field)?;
    VectorSequence::new(space.clone(), data).map_err(|e| CliError::core(field, e))
}

/// Parses `text` as `T`, naming the offending path on failure.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let field = if path == "." { "input".to_string() } else { path };
        CliError::input(field, e.into_inner().to_string())
    })
}

/// Reads a file, or standard input for `-`.
pub fn read(path: &str) -> Result<String, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    };
    if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents_accept_numbers_and_inf() {
        let s: SpaceFile = parse(r#"{"r": "inf", "dim": 2}"#).unwrap();
        assert!(s.r.0.is_infinite());
        let s: SpaceFile = parse(r#"{"r": 1.5, "weights": [1, 2]}"#).unwrap();
        assert_eq!(s.build("space").unwrap().weights(), &[1.0, 2.0]);
        assert_eq!(serde_json::to_string(&ExpValue(f64::INFINITY)).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&ExpValue(2.0)).unwrap(), "2.0");
    }

    #[test]
    fn errors_name_the_field() {
        let err = parse::<SequenceFile>(r#"{"space": {"r": 2, "dim": 2}, "vectors": [[1, "x"]]}"#).unwrap_err();
        assert!(err.to_string().starts_with("vectors[0][1]"), "{err}");
        let err = parse::<SequenceFile>(r#"{"space": {"r": 2, "dim": 2}}"#).unwrap_err();
        assert!(err.to_string().contains("vectors"), "{err}");
        let f: SequenceFile = parse(r#"{"space": {"r": 2, "dim": 2}, "vectors": [[1, 2], [3]]}"#).unwrap();
        assert!(f.build().unwrap_err().to_string().starts_with("vectors[1]"));
        let f: SequenceFile = parse(r#"{"space": {"r": 0.5, "dim": 1}, "vectors": []}"#).unwrap();
        assert!(f.build().unwrap_err().to_string().starts_with("space.r"));
        let f: SpaceFile = parse(r#"{"r": 2, "dim": 3, "weights": [1]}"#).unwrap();
        assert!(f.build("space").unwrap_err().to_string().starts_with("space.dim"));
        let err = parse::<SpaceFile>(r#"{"r": 2, "dim": 1, "colour": 3}"#).unwrap_err();
        assert!(err.to_string().contains("colour"), "{err}");
    }

    #[test]
    fn operator_rows_follow_the_codomain() {
        let f: OperatorFile = parse(
            r#"{"matrix": [[1, 2, 3]], "domain": {"r": 1, "dim": 3}, "codomain": {"r": "inf", "dim": 1}}"#,
        )
        .unwrap();
        let t = f.build().unwrap();
        assert_eq!(t.apply(&[1.0, 1.0, 1.0]), vec![6.0]);
        let f: OperatorFile =
            parse(r#"{"matrix": [[1], [2]], "domain": {"r": 1, "dim": 1}, "codomain": {"r": 1, "dim": 1}}"#).unwrap();
        assert!(f.build().unwrap_err().to_string().starts_with("matrix"));
    }

    #[test]
    fn space_round_trips() {
        let x = LatticeSpace::new(Exponent::INFINITY, vec![1.0, 0.5]).unwrap();
        let back = SpaceFile::of(&x).build("space").unwrap();
        assert_eq!(back, x);
    }
}
