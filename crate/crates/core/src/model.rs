//! JSON model files: one fan, an optional equivariant bundle block and an
//! optional block of transition matrices.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equivariant::EquivariantData;
use crate::fan::{validate_fan, ConeId, Fan, ValidationReport};
use crate::laurent::{LaurentPoly, TermRepr};
use crate::lattice::{CharacterVector, LatticeVector};
use crate::matrix::LaurentMatrix;
use crate::transitions::TransitionData;

/// Matrix wire form: rows of entries, each entry a list of terms.
pub type MatrixRepr = Vec<Vec<Vec<TermRepr>>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleBlock {
    pub rank: usize,
    /// Keyed by cone index (as a string), one character per summand.
    pub weights: BTreeMap<String, Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rank_n: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    pub declared_complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<BundleBlock>,
    /// Keyed by `"sigma,tau"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transitions: Option<BTreeMap<String, MatrixRepr>>,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid model: {0}")]
    Invalid(String),
}

impl ModelError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ModelError::Io { .. } | ModelError::Parse(_) | ModelError::Schema(_) => 2,
            ModelError::Invalid(_) => 3,
        }
    }
}

impl From<crate::Error> for ModelError {
    fn from(e: crate::Error) -> Self {
        ModelError::Invalid(e.to_string())
    }
}

/// A loaded and validated model.
#[derive(Clone, Debug)]
pub struct Model {
    pub name: Option<String>,
    pub fan: Arc<Fan>,
    pub validation: ValidationReport,
    pub equivariant: Option<EquivariantData>,
    pub transitions: Option<TransitionData>,
}

impl Model {
    pub fn warnings(&self) -> &[String] {
        self.fan.warnings()
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model, ModelError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

pub fn parse_model(text: &str) -> Result<Model, ModelError> {
    let file: ModelFile = serde_json::from_str(text)?;
    build_model(&file)
}

fn parse_cone_id(key: &str) -> Result<ConeId, ModelError> {
    key.trim()
        .parse()
        .map_err(|_| ModelError::Schema(format!("cone id {key:?} is not an index")))
}

fn parse_matrix(key: &str, rows: &MatrixRepr) -> Result<LaurentMatrix, ModelError> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut entries = Vec::with_capacity(row.len());
        for terms in row {
            let p = LaurentPoly::from_term_reprs(terms)
                .map_err(|e| ModelError::Schema(format!("transition {key}: {e}")))?;
            entries.push(p);
        }
        out.push(entries);
    }
    LaurentMatrix::from_rows(out).map_err(|e| ModelError::Schema(format!("transition {key}: {e}")))
}

pub fn build_model(file: &ModelFile) -> Result<Model, ModelError> {
    let rays = file.rays.iter().cloned().map(LatticeVector::new).collect();
    let fan = Fan::new(file.rank_n, rays, file.cones.clone(), file.declared_complete)?;
    let validation = validate_fan(&fan);
    if !validation.is_valid() {
        let problems: Vec<String> = validation
            .to_check_report()
            .failures()
            .map(|v| format!("{}: {}", v.check, v.detail))
            .collect();
        return Err(ModelError::Invalid(problems.join("; ")));
    }
    let fan = Arc::new(fan);

    let equivariant = match &file.bundle {
        None => None,
        Some(block) => {
            let mut weights = BTreeMap::new();
            for (key, ws) in &block.weights {
                let id = parse_cone_id(key)?;
                if let Some(bad) = ws.iter().find(|w| w.len() != file.rank_n) {
                    return Err(ModelError::Invalid(format!(
                        "weight {bad:?} on cone {id} has length {}, lattice rank is {}",
                        bad.len(),
                        file.rank_n
                    )));
                }
                weights.insert(id, ws.iter().cloned().map(CharacterVector::new).collect());
            }
            Some(EquivariantData::new(fan.clone(), block.rank, weights)?)
        }
    };

    let transitions = match &file.transitions {
        None => None,
        Some(block) => {
            let mut maps = BTreeMap::new();
            for (key, rows) in block {
                let (s, t) = key
                    .split_once(',')
                    .ok_or_else(|| ModelError::Schema(format!("transition key {key:?} is not \"sigma,tau\"")))?;
                let pair = (parse_cone_id(s)?, parse_cone_id(t)?);
                maps.insert(pair, parse_matrix(key, rows)?);
            }
            let rank = match (&file.bundle, maps.values().next()) {
                (Some(b), _) => b.rank,
                (None, Some(m)) => m.size(),
                (None, None) => return Err(ModelError::Invalid("empty transitions block".into())),
            };
            Some(TransitionData::new(fan.clone(), rank, maps)?)
        }
    };

    Ok(Model {
        name: file.name.clone(),
        fan,
        validation,
        equivariant,
        transitions,
    })
}

fn matrix_repr(m: &LaurentMatrix) -> Result<MatrixRepr, String> {
    m.rows()
        .iter()
        .map(|row| row.iter().map(LaurentPoly::to_terms).collect())
        .collect()
}

impl ModelFile {
    /// Wire form of in-memory data.
    pub fn from_parts(
        name: Option<String>,
        fan: &Fan,
        equivariant: Option<&EquivariantData>,
        transitions: Option<&TransitionData>,
    ) -> Result<Self, ModelError> {
        let bundle = equivariant.map(|eq| BundleBlock {
            rank: eq.rank(),
            weights: eq
                .multisets()
                .iter()
                .map(|(id, ms)| (id.to_string(), ms.weights.iter().map(|w| w.0.clone()).collect()))
                .collect(),
        });
        let transitions = match transitions {
            None => None,
            Some(t) => {
                let mut block = BTreeMap::new();
                for (&(s, u), m) in t.maps() {
                    block.insert(format!("{s},{u}"), matrix_repr(m).map_err(ModelError::Schema)?);
                }
                Some(block)
            }
        };
        Ok(Self {
            name,
            rank_n: fan.rank(),
            rays: fan.rays().iter().map(|r| r.0.clone()).collect(),
            cones: fan.cones().iter().map(|c| c.rays().to_vec()).collect(),
            declared_complete: fan.declared_complete(),
            bundle,
            transitions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P1_O3: &str = r#"{
        "name": "P1 O(3)",
        "rank_n": 1,
        "rays": [[1], [-1]],
        "cones": [[], [0], [1]],
        "declared_complete": true,
        "bundle": {"rank": 1, "weights": {"1": [[-3]], "2": [[0]]}},
        "transitions": {"1,2": [[[{"exponent": [-3], "num": 1, "den": 1}]]]}
    }"#;

    #[test]
    fn loads_p1() {
        let model = parse_model(P1_O3).unwrap();
        assert_eq!(model.fan.maximal_cones(), &[1, 2]);
        assert!(model.equivariant.is_some());
        let t = model.transitions.unwrap();
        assert_eq!(t.maps().len(), 2);
    }

    #[test]
    fn roundtrip_through_wire_form() {
        let model = parse_model(P1_O3).unwrap();
        let file = ModelFile::from_parts(
            model.name.clone(),
            &model.fan,
            model.equivariant.as_ref(),
            model.transitions.as_ref(),
        )
        .unwrap();
        let again = build_model(&file).unwrap();
        assert_eq!(again.transitions, model.transitions);
        assert_eq!(again.equivariant, model.equivariant);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(parse_model("{").unwrap_err().exit_code(), 2);
        assert_eq!(parse_model(r#"{"rank_n": 1}"#).unwrap_err().exit_code(), 2);
        let dup = r#"{"rank_n": 1, "rays": [[1], [-1]], "cones": [[], [0], [0]], "declared_complete": false}"#;
        assert_eq!(parse_model(dup).unwrap_err().exit_code(), 3);
        let bad_key = P1_O3.replace("\"1,2\"", "\"one,two\"");
        assert_eq!(parse_model(&bad_key).unwrap_err().exit_code(), 2);
        let bad_len = P1_O3.replace("[[-3]], \"2\"", "[[-3, 1]], \"2\"");
        assert_eq!(parse_model(&bad_len).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn non_primitive_ray_warns() {
        let text = r#"{"rank_n": 2, "rays": [[2,4],[1,0]], "cones": [[], [0], [1], [0,1]], "declared_complete": false}"#;
        let model = parse_model(text).unwrap();
        assert_eq!(model.fan.ray(0).coords(), &[1, 2]);
        assert_eq!(model.warnings().len(), 1);
    }
}
