//! Wire formats. Spaces, point sets, and distance matrices travel as JSON;
//! all matrices are row-major nested arrays, all numbers binary64.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance_geometry::{DistanceGeometryError, DistanceMatrix};
use crate::spaces::{NormKind, NormedSpace, PointConfig, QuadraticNorm, ScalarField, SpaceError};

#[derive(Debug, Clone, Error)]
pub enum JsonError {
    /// serde's message, which carries line and column.
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Structure(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    DistanceGeometry(#[from] DistanceGeometryError),
}

impl JsonError {
    pub fn name(&self) -> &'static str {
        match self {
            JsonError::Parse(_) => "ParseError",
            JsonError::Structure(_) => "InvalidInput",
            JsonError::Space(e) => e.name(),
            JsonError::DistanceGeometry(e) => e.name(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldJson {
    Real,
    Complex,
}

/// `{"kind":"p","p":1.5}`, `{"kind":"sup"}`,
/// `{"kind":"weighted_p","p":2,"weights":[...]}`,
/// `{"kind":"quadratic","Q":[[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormJson {
    P { p: f64 },
    Sup,
    WeightedP { p: f64, weights: Vec<f64> },
    Quadratic { #[serde(rename = "Q")] q: Vec<Vec<f64>> },
}

/// `{"field":"real"|"complex","dim":k,"norm":{...}}`. For complex quadratic
/// spaces `Q` acts on the interleaved real coordinates, so it is `2k x 2k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceJson {
    pub field: FieldJson,
    pub dim: usize,
    pub norm: NormJson,
}

impl SpaceJson {
    pub fn to_space(&self) -> Result<NormedSpace<f64>, JsonError> {
        let kind = match &self.norm {
            NormJson::P { p } => NormKind::P(*p),
            NormJson::Sup => NormKind::Sup,
            NormJson::WeightedP { p, weights } => {
                NormKind::WeightedP { p: *p, weights: weights.clone() }
            }
            NormJson::Quadratic { q } => {
                NormKind::Quadratic(QuadraticNorm::new(matrix_from_rows(q)?)?)
            }
        };
        let space = match self.field {
            FieldJson::Real => NormedSpace::new_real(self.dim, kind)?,
            FieldJson::Complex => NormedSpace::new_complex(self.dim, kind)?,
        };
        Ok(space)
    }

    pub fn from_space(space: &NormedSpace<f64>) -> Self {
        let norm = match space.kind() {
            NormKind::P(p) => NormJson::P { p: *p },
            NormKind::Sup => NormJson::Sup,
            NormKind::WeightedP { p, weights } => {
                NormJson::WeightedP { p: *p, weights: weights.clone() }
            }
            NormKind::Quadratic(q) => NormJson::Quadratic { q: matrix_to_rows(q.matrix()) },
        };
        let field = match space.field() {
            ScalarField::Real => FieldJson::Real,
            ScalarField::Complex => FieldJson::Complex,
        };
        SpaceJson { field, dim: space.dim(), norm }
    }
}

/// Point sets carry their space; `pairing` appears on configs that describe a
/// correspondence or a flip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSetJson {
    pub space: SpaceJson,
    pub points: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<usize>>,
}

impl PointSetJson {
    pub fn to_config(&self) -> Result<PointConfig<f64>, JsonError> {
        let space = self.space.to_space()?;
        let points: Vec<DVector<f64>> =
            self.points.iter().map(|p| DVector::from_vec(p.clone())).collect();
        let mut config = PointConfig::new(space, points)?;
        if let Some(labels) = &self.labels {
            config = config.with_labels(labels.clone())?;
        }
        Ok(config)
    }

    pub fn from_config(config: &PointConfig<f64>, pairing: Option<Vec<usize>>) -> Self {
        PointSetJson {
            space: SpaceJson::from_space(&config.space),
            points: config.points.iter().map(|p| p.iter().copied().collect()).collect(),
            labels: config.labels.clone(),
            pairing,
        }
    }
}

/// `{"n": point count, "d": full square matrix}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceMatrixJson {
    pub n: usize,
    pub d: Vec<Vec<f64>>,
}

impl DistanceMatrixJson {
    pub fn to_distance_matrix(&self) -> Result<DistanceMatrix<f64>, JsonError> {
        let m = matrix_from_rows(&self.d)?;
        if m.nrows() != self.n {
            return Err(JsonError::Structure(format!(
                "declared n = {} but d has {} rows",
                self.n,
                m.nrows()
            )));
        }
        Ok(DistanceMatrix::new(m)?)
    }

    pub fn from_distance_matrix(dm: &DistanceMatrix<f64>) -> Self {
        DistanceMatrixJson { n: dm.len(), d: matrix_to_rows(dm.entries()) }
    }
}

pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, JsonError> {
    if rows.is_empty() {
        return Err(JsonError::Structure("matrix has no rows".into()));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(JsonError::Structure("matrix rows have unequal lengths".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

pub fn parse_space(text: &str) -> Result<NormedSpace<f64>, JsonError> {
    let spec: SpaceJson = serde_json::from_str(text).map_err(|e| JsonError::Parse(e.to_string()))?;
    spec.to_space()
}

pub fn parse_point_set(text: &str) -> Result<PointSetJson, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Parse(e.to_string()))
}

pub fn parse_distance_matrix(text: &str) -> Result<DistanceMatrix<f64>, JsonError> {
    let dm: DistanceMatrixJson =
        serde_json::from_str(text).map_err(|e| JsonError::Parse(e.to_string()))?;
    dm.to_distance_matrix()
}
