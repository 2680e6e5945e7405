//! JSON formats. Complex numbers are `[re, im]` pairs and matrices are lists
//! of rows.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub genus: usize,
    pub branch_points: Vec<f64>,
}

impl CurveFile {
    pub fn to_curve(&self) -> Result<crate::HyperellipticCurve> {
        crate::HyperellipticCurve::new(self.genus, self.branch_points.clone())
    }
}

/// Output of the `periods` command; also accepted as a tau file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodFile {
    pub genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_points: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_matrix: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_matrix: Option<JsonMatrix>,
    pub tau: JsonMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_condition: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_defect: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_nodes: Option<usize>,
}

impl PeriodFile {
    pub fn from_periods(curve: &crate::HyperellipticCurve, p: &crate::PeriodData) -> Self {
        Self {
            genus: curve.genus(),
            branch_points: Some(curve.branch_points().to_vec()),
            a_matrix: Some(matrix_to_json(&p.a_matrix)),
            b_matrix: Some(matrix_to_json(&p.b_matrix)),
            tau: matrix_to_json(p.tau.tau()),
            a_condition: Some(p.a_condition),
            symmetry_defect: Some(p.siegel.symmetry_defect),
            min_eigenvalue: Some(p.siegel.min_eigenvalue),
            max_nodes: Some(p.max_nodes),
        }
    }

    pub fn tau_matrix(&self) -> Result<CMatrix<f64>> {
        let t = matrix_from_json(&self.tau)?;
        if t.rows() != self.genus {
            return Err(Error::GenusMismatch {
                expected: self.genus,
                found: t.rows(),
            });
        }
        Ok(t)
    }

    pub fn a_matrix(&self) -> Result<Option<CMatrix<f64>>> {
        self.a_matrix.as_ref().map(matrix_from_json).transpose()
    }
}

/// A curve file or a tau file, told apart by the presence of `"tau"`.
#[derive(Clone, Debug, PartialEq)]
pub enum InputFile {
    Curve(CurveFile),
    Tau(PeriodFile),
}

pub fn parse_input(text: &str) -> Result<InputFile> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed JSON: {e}")))?;
    let is_tau = value.get("tau").is_some();
    let bad = |e: serde_json::Error| Error::InvalidArgument(format!("unexpected JSON layout: {e}"));
    Ok(if is_tau {
        InputFile::Tau(serde_json::from_value(value).map_err(bad)?)
    } else {
        InputFile::Curve(serde_json::from_value(value).map_err(bad)?)
    })
}

pub fn complex_to_json(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &CMatrix<f64>) -> JsonMatrix {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(complex_to_json).collect())
        .collect()
}

/// Square matrix from rows of `[re, im]` pairs.
pub fn matrix_from_json(rows: &JsonMatrix) -> Result<CMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("matrix is not {n}x{n}")));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    Ok(CMatrix::from_rows(
        &rows
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex::new(re, im)).collect())
            .collect::<Vec<_>>(),
    ))
}
