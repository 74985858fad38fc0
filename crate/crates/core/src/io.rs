//! State files, analysis reports and CSV grid output.
//!
//! A state file is a JSON document of one of two kinds:
//!
//! ```json
//! {"kind": "pure", "n": 3, "couplings": {"1,2": 0.66666666666666663}}
//! {"kind": "covariance", "n": 1, "matrix": [[0.5, 0.0], [0.0, 0.5]]}
//! ```
//!
//! Numbers may also be written as decimal strings. Covariance rows are in
//! `(q₁…qₙ, p₁…pₙ)` order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::gaussian::{CovarianceMatrix, PureStateSpec};
use crate::scan::ScanGrid;
use crate::witness::{MinimizeOptions, Verdict, WitnessResult};
use crate::PHYSICALITY_TOL;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed state document: {0}")]
    Malformed(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid state: {0}")]
    Validation(#[from] crate::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Covariance,
}

/// A real number written either as a JSON number or as a decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Number(f64),
    Text(String),
}

impl Real {
    fn value(&self) -> Result<f64, ParseError> {
        match self {
            Real::Number(v) => Ok(*v),
            Real::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| ParseError::Malformed(format!("{s:?} is not a number"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpecFile {
    pub kind: StateKind,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<BTreeMap<String, Real>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Real>>>,
}

impl StateSpecFile {
    pub fn from_pure(spec: &PureStateSpec) -> Self {
        let couplings = spec
            .couplings()
            .map(|((i, j), c)| (format!("{i},{j}"), Real::Number(c)))
            .collect();
        Self {
            kind: StateKind::Pure,
            n: spec.modes(),
            description: None,
            couplings: Some(couplings),
            matrix: None,
        }
    }

    pub fn from_covariance(sigma: &CovarianceMatrix) -> Self {
        let m = sigma.entries();
        let rows = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| Real::Number(m[(r, c)])).collect())
            .collect();
        Self {
            kind: StateKind::Covariance,
            n: sigma.modes(),
            description: None,
            couplings: None,
            matrix: Some(rows),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedState {
    Pure(PureStateSpec),
    Covariance(CovarianceMatrix),
}

impl ParsedState {
    pub fn modes(&self) -> usize {
        match self {
            ParsedState::Pure(s) => s.modes(),
            ParsedState::Covariance(c) => c.modes(),
        }
    }

    /// Covariance of the state; pure specs must be admissible.
    pub fn covariance(&self) -> crate::Result<CovarianceMatrix> {
        match self {
            ParsedState::Pure(s) => s.covariance(),
            ParsedState::Covariance(c) => Ok(c.clone()),
        }
    }
}

fn parse_key(key: &str) -> Result<(usize, usize), ParseError> {
    let bad = || {
        ParseError::Malformed(format!(
            "coupling key {key:?} is not of the form \"i,j\" with i < j"
        ))
    };
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i >= j {
        return Err(bad());
    }
    Ok((i, j))
}

/// Parses a state document, checking structure only: keys, dimensions and
/// symmetry. Admissibility and physicality are left to the caller.
pub fn parse_state_structure(text: &str) -> Result<ParsedState, ParseError> {
    let doc: StateSpecFile =
        serde_json::from_str(text).map_err(|e| ParseError::Malformed(e.to_string()))?;
    if doc.n == 0 || doc.n > crate::MAX_MODES {
        return Err(ParseError::Malformed(format!(
            "n = {} is outside 1..={}",
            doc.n,
            crate::MAX_MODES
        )));
    }
    match doc.kind {
        StateKind::Pure => {
            if doc.matrix.is_some() {
                return Err(ParseError::Malformed(
                    "a pure state takes couplings, not a matrix".into(),
                ));
            }
            let mut spec = PureStateSpec::new(doc.n)?;
            for (key, value) in doc.couplings.iter().flatten() {
                let (i, j) = parse_key(key)?;
                if j > doc.n {
                    return Err(ParseError::Malformed(format!(
                        "coupling key {key:?} refers to a mode beyond n = {}",
                        doc.n
                    )));
                }
                spec.set_coupling(i, j, value.value()?)?;
            }
            Ok(ParsedState::Pure(spec))
        }
        StateKind::Covariance => {
            if doc.couplings.is_some() {
                return Err(ParseError::Malformed(
                    "a covariance state takes a matrix, not couplings".into(),
                ));
            }
            let rows = doc.matrix.ok_or_else(|| {
                ParseError::Malformed("covariance state is missing \"matrix\"".into())
            })?;
            let dim = 2 * doc.n;
            if rows.len() != dim {
                return Err(ParseError::Dimension(format!(
                    "n = {} needs {dim} rows, found {}",
                    doc.n,
                    rows.len()
                )));
            }
            let mut values = Vec::with_capacity(dim * dim);
            for (r, row) in rows.iter().enumerate() {
                if row.len() != dim {
                    return Err(ParseError::Dimension(format!(
                        "row {} has {} entries, expected {dim}",
                        r + 1,
                        row.len()
                    )));
                }
                for v in row {
                    values.push(v.value()?);
                }
            }
            Ok(ParsedState::Covariance(CovarianceMatrix::from_row_slice(
                doc.n, &values,
            )?))
        }
    }
}

/// Parses a state document and validates it: pure specs must be admissible
/// and covariance matrices physical.
pub fn parse_state(text: &str) -> Result<ParsedState, ParseError> {
    let state = parse_state_structure(text)?;
    match &state {
        ParsedState::Pure(spec) => spec.validate().map_err(crate::Error::from)?,
        ParsedState::Covariance(sigma) => sigma.require_physical(PHYSICALITY_TOL)?,
    }
    Ok(state)
}

/// Hex SHA-256 of the input document.
pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParameters {
    pub grid: usize,
    pub effective_grid: usize,
    pub starts: usize,
    pub seed: u64,
    pub witness_tol: f64,
    pub physicality_tol: f64,
    pub xtol: f64,
}

/// Serialized outcome of `gsep analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub input_digest: String,
    pub modes: usize,
    pub verdict: Verdict,
    pub depth: f64,
    pub best_value: f64,
    pub best_lambda: Vec<f64>,
    /// Raw shifted minors of orders n+1..2n; null when some λ is zero.
    pub minors: Option<Vec<f64>>,
    pub regularized_minors: Vec<f64>,
    pub parameters: ReportParameters,
}

impl ReportDocument {
    pub fn new(input_digest: String, result: &WitnessResult, opts: &MinimizeOptions) -> Self {
        let modes = result.best_lambda.len();
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest,
            modes,
            verdict: result.verdict,
            depth: result.depth,
            best_value: result.best_value,
            best_lambda: result.best_lambda.as_slice().to_vec(),
            minors: result.minors.as_ref().map(|m| m.minors.clone()),
            regularized_minors: result.regularized_minors.clone(),
            parameters: ReportParameters {
                grid: opts.grid,
                effective_grid: result.coarse_grid,
                starts: opts.starts,
                seed: opts.seed,
                witness_tol: opts.witness_tol,
                physicality_tol: opts.physicality_tol,
                xtol: opts.xtol,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, ParseError> {
        serde_json::from_str(text).map_err(|e| ParseError::Malformed(e.to_string()))
    }
}

/// Float with 17 significant digits; parses back to the same bits.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV with header `lambda_<a>,lambda_<b>,sigma_raw,sigma_reg`, one row per
/// grid node in row-major order (first axis outer). Undefined raw values are
/// written as `nan`.
pub fn emit_grid(grid: &ScanGrid) -> String {
    let (a, b) = grid.plan.axes();
    let res = grid.resolution();
    let mut out = String::with_capacity(res * res * 96);
    writeln!(out, "lambda_{a},lambda_{b},sigma_raw,sigma_reg").unwrap();
    for i in 0..res {
        for j in 0..res {
            let l = grid.plan.lambda_at(i, j);
            writeln!(
                out,
                "{},{},{},{}",
                format_real(l[a - 1]),
                format_real(l[b - 1]),
                format_real(grid.raw_at(i, j).unwrap_or(f64::NAN)),
                format_real(grid.regularized_at(i, j)),
            )
            .unwrap();
        }
    }
    out
}

/// One data row of an emitted grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRow {
    pub lambda_a: f64,
    pub lambda_b: f64,
    pub sigma_raw: Option<f64>,
    pub sigma_reg: f64,
}

/// Reads back the output of [`emit_grid`].
pub fn parse_grid_csv(text: &str) -> Result<Vec<GridRow>, ParseError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| ParseError::Malformed("empty grid".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() != 4
        || !cols[0].starts_with("lambda_")
        || cols[2] != "sigma_raw"
        || cols[3] != "sigma_reg"
    {
        return Err(ParseError::Malformed(format!(
            "unexpected header {header:?}"
        )));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(ParseError::Malformed(format!(
                    "row {} has {} fields",
                    k + 1,
                    fields.len()
                )));
            }
            let num = |s: &str| -> Result<f64, ParseError> {
                s.parse().map_err(|_| {
                    ParseError::Malformed(format!("row {}: {s:?} is not a number", k + 1))
                })
            };
            let raw = num(fields[2])?;
            Ok(GridRow {
                lambda_a: num(fields[0])?,
                lambda_b: num(fields[1])?,
                sigma_raw: (!raw.is_nan()).then_some(raw),
                sigma_reg: num(fields[3])?,
            })
        })
        .collect()
}
