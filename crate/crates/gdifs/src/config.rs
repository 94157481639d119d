//! JSON system definitions: parsing, validation with named diagnostics,
//! and assembly into a [`GdifsSystem`] plus an optional open-set tuple.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point, SquareMat};
use crate::graph::{Edge, Vertex};
use crate::maps::ContractionMap;
use crate::separation::OpenSetTuple;
use crate::system::GdifsSystem;

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum MapConfig {
    Similarity {
        ratio: f64,
        /// Rotation angle in radians; planar systems only.
        #[serde(default, skip_serializing_if = "is_zero")]
        rotation: f64,
        #[serde(default, skip_serializing_if = "is_false")]
        reflection: bool,
        translation: Vec<f64>,
    },
    Affine {
        matrix: Vec<Vec<f64>>,
        translation: Vec<f64>,
    },
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeConfig {
    pub id: u64,
    pub source: usize,
    pub target: usize,
    pub map: MapConfig,
    /// Optional certified-bound overrides for map plugins.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoxConfig {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub dimension: usize,
    pub vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
    pub edges: Vec<EdgeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub open_sets: Option<Vec<Vec<BoxConfig>>>,
}

impl SystemConfig {
    pub fn from_json(text: &str) -> Result<SystemConfig> {
        serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("parse error: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Assemble and validate the system; every map invariant is enforced
    /// here with the offending edge named in the diagnostic.
    pub fn build(&self) -> Result<(GdifsSystem, Option<OpenSetTuple>)> {
        let d = self.dimension;
        if d == 0 || d > crate::geom::MAX_DIM {
            return Err(Error::Config(format!(
                "dimension {d} unsupported; expected 1..=3"
            )));
        }
        let mut parts = Vec::with_capacity(self.edges.len());
        for ec in &self.edges {
            let map = build_map(ec, d)
                .map_err(|e| Error::Config(format!("edge {}: {e}", ec.id)))?;
            parts.push((
                Edge {
                    id: ec.id,
                    source: Vertex(ec.source),
                    target: Vertex(ec.target),
                },
                map,
            ));
        }
        let system = GdifsSystem::assemble(d, self.vertices, parts)?;
        let report = system.graph.validate();
        if !report.valid {
            return Err(Error::Config(format!(
                "vertices without outgoing edges: {:?}",
                report.vertices_without_outgoing
            )));
        }
        let open_sets = match &self.open_sets {
            None => None,
            Some(lists) => {
                let mut boxes = Vec::with_capacity(lists.len());
                for (vi, list) in lists.iter().enumerate() {
                    let mut vb = Vec::with_capacity(list.len());
                    for (bi, b) in list.iter().enumerate() {
                        if b.lo.len() != d || b.hi.len() != d {
                            return Err(Error::Config(format!(
                                "open_sets[{vi}][{bi}]: bounds must have {d} coordinates"
                            )));
                        }
                        vb.push(AxisBox::from_bounds(&b.lo, &b.hi)?);
                    }
                    boxes.push(vb);
                }
                Some(OpenSetTuple::new(boxes, d)?)
            }
        };
        Ok((system, open_sets))
    }
}

fn build_map(ec: &EdgeConfig, dim: usize) -> Result<ContractionMap> {
    let map = match &ec.map {
        MapConfig::Similarity {
            ratio,
            rotation,
            reflection,
            translation,
        } => {
            if translation.len() != dim {
                return Err(Error::Config(format!(
                    "translation has {} coordinates, system dimension is {dim}",
                    translation.len()
                )));
            }
            if *rotation != 0.0 && dim != 2 {
                return Err(Error::Config(
                    "rotation is only supported for planar similarities".into(),
                ));
            }
            ContractionMap::similarity(
                dim,
                *ratio,
                *rotation,
                *reflection,
                Point::from_slice(translation)?,
            )?
        }
        MapConfig::Affine {
            matrix,
            translation,
        } => {
            if matrix.len() != dim {
                return Err(Error::Config(format!(
                    "matrix has {} rows, system dimension is {dim}",
                    matrix.len()
                )));
            }
            if translation.len() != dim {
                return Err(Error::Config(format!(
                    "translation has {} coordinates, system dimension is {dim}",
                    translation.len()
                )));
            }
            ContractionMap::affine(
                SquareMat::from_rows(matrix)?,
                Point::from_slice(translation)?,
            )?
        }
    };
    match (ec.lower, ec.upper) {
        (None, None) => Ok(map),
        (Some(lo), Some(hi)) => map.with_bounds(lo, hi),
        _ => Err(Error::Config(
            "bound overrides need both lower and upper".into(),
        )),
    }
}

/// Load and validate a system definition from a JSON file.
pub fn load_system(path: &FsPath) -> Result<(GdifsSystem, Option<OpenSetTuple>, SystemConfig)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let cfg = SystemConfig::from_json(&text)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let (system, open_sets) = cfg
        .build()
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok((system, open_sets, cfg))
}
