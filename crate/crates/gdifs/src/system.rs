//! The pairing of a directed multigraph with one contraction per edge.

use crate::error::{Error, Result};
use crate::graph::{DirectedMultigraph, Edge, EdgeId};
use crate::maps::{ContractionMap, MapKind};

/// A graph-directed system: every edge `i -> k` carries a contraction that
/// maps the k-th attractor piece into the i-th.
#[derive(Clone, Debug)]
pub struct GdifsSystem {
    pub dim: usize,
    pub graph: DirectedMultigraph,
    maps: Vec<ContractionMap>, // parallel to graph.edges()
}

impl GdifsSystem {
    /// Assemble from (edge, map) pairs; the edge list is sorted by id and
    /// maps stay aligned with it.
    pub fn assemble(dim: usize, n: usize, parts: Vec<(Edge, ContractionMap)>) -> Result<Self> {
        if dim == 0 || dim > crate::geom::MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut parts = parts;
        parts.sort_by_key(|(e, _)| e.id);
        let edges: Vec<Edge> = parts.iter().map(|(e, _)| *e).collect();
        let maps: Vec<ContractionMap> = parts.into_iter().map(|(_, m)| m).collect();
        for m in &maps {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        let graph = DirectedMultigraph::new(n, edges)?;
        Ok(GdifsSystem { dim, graph, maps })
    }

    /// Map attached to the edge at `edge_index` (graph edge order).
    pub fn map(&self, edge_index: usize) -> &ContractionMap {
        &self.maps[edge_index]
    }

    pub fn maps(&self) -> &[ContractionMap] {
        &self.maps
    }

    pub fn edge_count(&self) -> usize {
        self.maps.len()
    }

    /// `max_e Lip^+(S_e)`, the global contraction ratio driving every
    /// depth-N error bound.
    pub fn max_contraction_ratio(&self) -> f64 {
        self.maps
            .iter()
            .map(|m| m.lipschitz_bounds().1)
            .fold(0.0, f64::max)
    }

    pub fn is_similarity_system(&self) -> bool {
        self.maps.iter().all(|m| m.kind == MapKind::Similarity)
    }

    /// Edge index for a given edge id, if present.
    pub fn edge_index_by_id(&self, id: EdgeId) -> Option<usize> {
        self.graph.edges().iter().position(|e| e.id == id)
    }

    /// Structural equality of the underlying graphs: same vertex count and
    /// the same (id, source, target) triples.
    pub fn same_graph(&self, other: &GdifsSystem) -> bool {
        self.graph.vertex_count() == other.graph.vertex_count()
            && self.graph.edges() == other.graph.edges()
    }
}
