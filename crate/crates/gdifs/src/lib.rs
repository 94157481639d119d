//! Graph-directed iterated function systems.
//!
//! A directed multigraph with an injective affine contraction on each edge
//! determines a unique tuple of compact attractor pieces, one per vertex,
//! each piece the union of the edge-map images of its neighbours' pieces.
//! This crate computes certified finite approximations of that tuple and
//! builds the analysis tooling around it:
//!
//! - admissible-path enumeration and strong-connectivity checks;
//! - certified Lipschitz bounds for edge maps and path compositions, with a
//!   bounded-distortion audit across depths;
//! - deterministic cylinder expansion and a seeded random-iteration walk,
//!   both with explicit one-sided Hausdorff error bounds;
//! - strong-separation brackets, open-set-condition raster checks and
//!   interior-overlap measurements;
//! - the address coding of attractor points and the induced conjugacy map
//!   between two systems over the same graph, with empirical Lipschitz
//!   audits against the theoretical bounds;
//! - box-counting dimension estimation plus a spectral-radius similarity
//!   dimension for similarity systems;
//! - raster topology of planar attractors: holes, boundary connectivity,
//!   interior detection and component triviality at a resolution.
//!
//! All certified bounds carry an explicit `1e-9` slack; all stochastic
//! operations are reproducible from an explicit seed.

pub mod attractor;
pub mod coding;
pub mod config;
pub mod dimension;
pub mod error;
pub mod geom;
pub mod graph;
pub mod grid;
pub mod maps;
pub mod report;
pub mod samples;
pub mod separation;
pub mod system;
pub mod topology;

pub use error::{Error, Result};
pub use geom::{AxisBox, Point};
pub use graph::{DirectedMultigraph, Edge, EdgeId, Path, Vertex};
pub use maps::{ComposedMap, ContractionMap};
pub use system::GdifsSystem;
