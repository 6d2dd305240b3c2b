//! JSON serialization: the matrix schema shared by the CLI and the
//! machine-readable verification reports.
//!
//! Matrix schema: `{"n": int, "rows": int, "cols": int, "mode": "c64"|"exact",
//! "entries": [[re, im], ...]}` row-major; exact entries are `"p/q"` strings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CmrError, Result};
use crate::matrix::SquareMatrix;
use crate::scalar::{
    rational_from_str, rational_to_string, GaussRat, Scalar, ScalarMode, C64,
};
use crate::tensor::{Tensor2, Tensor3};

/// One scalar part in the JSON encoding: a float or a `"p/q"` string.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryPart {
    Num(f64),
    Exact(String),
}

/// The serialized matrix object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub mode: String,
    pub entries: Vec<[EntryPart; 2]>,
}

fn entry_of<S: Scalar>(v: &S) -> [EntryPart; 2] {
    match (S::MODE, v.exact_parts()) {
        (ScalarMode::ExactGaussian, Some((re, im))) => [
            EntryPart::Exact(rational_to_string(&re)),
            EntryPart::Exact(rational_to_string(&im)),
        ],
        _ => {
            let z = v.to_c64();
            [EntryPart::Num(z.re), EntryPart::Num(z.im)]
        }
    }
}

fn matrix_json<S: Scalar>(base_n: usize, m: &SquareMatrix<S>) -> MatrixJson {
    let d = m.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            entries.push(entry_of(m.at(i, j)));
        }
    }
    MatrixJson {
        n: base_n,
        rows: d,
        cols: d,
        mode: S::MODE.tag().to_string(),
        entries,
    }
}

pub fn square_to_json<S: Scalar>(m: &SquareMatrix<S>) -> MatrixJson {
    matrix_json(m.dim(), m)
}

pub fn tensor2_to_json<S: Scalar>(t: &Tensor2<S>) -> MatrixJson {
    matrix_json(t.base_dim(), t.matrix())
}

pub fn tensor3_to_json<S: Scalar>(t: &Tensor3<S>) -> MatrixJson {
    matrix_json(t.base_dim(), t.matrix())
}

impl MatrixJson {
    pub fn to_square_c64(&self) -> Result<SquareMatrix<C64>> {
        if self.rows != self.cols {
            return Err(CmrError::Argument("non-square matrix JSON".into()));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(CmrError::Argument("entry count mismatch".into()));
        }
        let d = self.rows;
        let mut m = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let [re, im] = &self.entries[i * d + j];
                m.set(i, j, Complex64::new(part_to_f64(re)?, part_to_f64(im)?));
            }
        }
        Ok(m)
    }

    pub fn to_square_exact(&self) -> Result<SquareMatrix<GaussRat>> {
        if self.rows != self.cols || self.entries.len() != self.rows * self.cols {
            return Err(CmrError::Argument("malformed matrix JSON".into()));
        }
        let d = self.rows;
        let mut m = SquareMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let [re, im] = &self.entries[i * d + j];
                m.set(i, j, GaussRat::new(part_to_rational(re)?, part_to_rational(im)?));
            }
        }
        Ok(m)
    }
}

fn part_to_f64(p: &EntryPart) -> Result<f64> {
    match p {
        EntryPart::Num(x) => Ok(*x),
        EntryPart::Exact(s) => {
            use num_traits::ToPrimitive;
            Ok(rational_from_str(s)?
                .to_f64()
                .ok_or_else(|| CmrError::Argument("unrepresentable rational".into()))?)
        }
    }
}

fn part_to_rational(p: &EntryPart) -> Result<num_rational::BigRational> {
    match p {
        EntryPart::Exact(s) => rational_from_str(s),
        EntryPart::Num(_) => Err(CmrError::Argument(
            "float entry in an exact-mode matrix".into(),
        )),
    }
}

/// Status of one verification check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

/// One line of a verification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub status: CheckStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    /// Pass/fail from a float residual against a tolerance.
    pub fn from_residual(suite: &str, name: &str, residual: f64, tol: f64) -> Self {
        Check {
            suite: suite.into(),
            name: name.into(),
            residual: Some(format_residual(residual)),
            tolerance: Some(tol),
            status: if residual <= tol {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    /// Exact check: residual string is `"0"` on success.
    pub fn from_exact(suite: &str, name: &str, is_zero: bool) -> Self {
        Check {
            suite: suite.into(),
            name: name.into(),
            residual: Some(if is_zero { "0".into() } else { "nonzero".into() }),
            tolerance: None,
            status: if is_zero {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            note: None,
        }
    }

    pub fn skipped(suite: &str, name: &str, reason: &str) -> Self {
        Check {
            suite: suite.into(),
            name: name.into(),
            residual: None,
            tolerance: None,
            status: CheckStatus::Skipped,
            note: Some(reason.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

/// Exact-zero residuals serialize as the literal `"0"`.
pub fn format_residual(r: f64) -> String {
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r:e}")
    }
}

/// Top-level verification report, schema `cmr-report/1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: String,
    pub command: String,
    pub case: String,
    pub n: usize,
    pub mode: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<Vec<crate::dynr::AppendixBReport>>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn new(command: &str, case: &str, n: usize, mode: &str, seed: u64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.passed());
        VerifyReport {
            schema: "cmr-report/1".into(),
            command: command.into(),
            case: case.into(),
            n,
            mode: mode.into(),
            seed,
            checks,
            classification: None,
            pass,
        }
    }
}
