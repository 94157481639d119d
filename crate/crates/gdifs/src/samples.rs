//! Ready-made example systems: the classical one-vertex constructions and a
//! small strongly connected two-vertex system. Used heavily by the test
//! suite and convenient as starting points.

use crate::geom::{Point, SquareMat};
use crate::graph::{Edge, Vertex};
use crate::maps::ContractionMap;
use crate::system::GdifsSystem;

fn sim1(ratio: f64, t: f64) -> ContractionMap {
    ContractionMap::similarity(1, ratio, 0.0, false, Point([t, 0.0, 0.0])).unwrap()
}

fn sim2(ratio: f64, tx: f64, ty: f64) -> ContractionMap {
    ContractionMap::similarity(2, ratio, 0.0, false, Point([tx, ty, 0.0])).unwrap()
}

fn edge(id: u64, s: usize, t: usize) -> Edge {
    Edge {
        id,
        source: Vertex(s),
        target: Vertex(t),
    }
}

/// Middle-`(1-2r)` Cantor system on one vertex: `x -> rx` and
/// `x -> rx + (1-r)`; the attractor spans [0, 1].
pub fn cantor_system(ratio: f64) -> GdifsSystem {
    GdifsSystem::assemble(
        1,
        1,
        vec![
            (edge(1, 1, 1), sim1(ratio, 0.0)),
            (edge(2, 1, 1), sim1(ratio, 1.0 - ratio)),
        ],
    )
    .unwrap()
}

/// Four half-scale maps tiling the unit square; the attractor is [0,1]^2.
pub fn square_tiling() -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(0.5, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(0.5, 0.5, 0.0)),
            (edge(3, 1, 1), sim2(0.5, 0.0, 0.5)),
            (edge(4, 1, 1), sim2(0.5, 0.5, 0.5)),
        ],
    )
    .unwrap()
}

/// Right-angle Sierpinski gasket: three half-scale maps.
pub fn sierpinski_triangle() -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(0.5, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(0.5, 0.5, 0.0)),
            (edge(3, 1, 1), sim2(0.5, 0.0, 0.5)),
        ],
    )
    .unwrap()
}

/// Sierpinski carpet: eight third-scale maps, center cell omitted.
pub fn sierpinski_carpet() -> GdifsSystem {
    let mut parts = Vec::new();
    let mut id = 1;
    for j in 0..3 {
        for i in 0..3 {
            if i == 1 && j == 1 {
                continue;
            }
            parts.push((
                edge(id, 1, 1),
                sim2(1.0 / 3.0, i as f64 / 3.0, j as f64 / 3.0),
            ));
            id += 1;
        }
    }
    GdifsSystem::assemble(2, 1, parts).unwrap()
}

/// Strongly connected two-vertex system with adjacency counts
/// [[1,1],[1,0]]: a self-loop of ratio 1/2 at vertex 1, a ratio-1/4 edge
/// 1 -> 2 and a ratio-1/3 edge 2 -> 1. Strongly separated.
pub fn fibonacci_system() -> GdifsSystem {
    GdifsSystem::assemble(
        1,
        2,
        vec![
            (edge(1, 1, 1), sim1(0.5, 0.0)),
            (edge(2, 1, 2), sim1(0.25, 0.75)),
            (edge(3, 2, 1), sim1(1.0 / 3.0, 0.0)),
        ],
    )
    .unwrap()
}

/// Single planar self-loop `(x, y) -> (x/2, y/3)`: bi-Lipschitz but with
/// distortion growing like (3/2)^n under iteration.
pub fn bdp_remark_system() -> GdifsSystem {
    let linear = SquareMat::from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]).unwrap();
    let map = ContractionMap::affine(linear, Point::zero()).unwrap();
    GdifsSystem::assemble(2, 1, vec![(edge(1, 1, 1), map)]).unwrap()
}

/// Product-type system whose attractor is (middle-third Cantor set) x [0,1]:
/// four affine maps contracting by 1/3 horizontally and 1/2 vertically.
pub fn product_cantor_interval() -> GdifsSystem {
    let linear = SquareMat::from_rows(&[vec![1.0 / 3.0, 0.0], vec![0.0, 0.5]]).unwrap();
    let mk = |tx: f64, ty: f64| {
        ContractionMap::affine(linear, Point([tx, ty, 0.0])).unwrap()
    };
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), mk(0.0, 0.0)),
            (edge(2, 1, 1), mk(2.0 / 3.0, 0.0)),
            (edge(3, 1, 1), mk(0.0, 0.5)),
            (edge(4, 1, 1), mk(2.0 / 3.0, 0.5)),
        ],
    )
    .unwrap()
}

/// Planar Cantor dust: four quarter-scale maps into separated corners of
/// the unit square; totally disconnected.
pub fn cantor_dust() -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(0.25, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(0.25, 0.75, 0.0)),
            (edge(3, 1, 1), sim2(0.25, 0.0, 0.75)),
            (edge(4, 1, 1), sim2(0.25, 0.75, 0.75)),
        ],
    )
    .unwrap()
}

/// Horizontal planar Cantor system: two 1/3-scale maps along the x-axis.
/// Paired with [`planar_pair_target`], the linear parts match exactly and
/// only translations differ.
pub fn planar_pair_source() -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(1.0 / 3.0, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(1.0 / 3.0, 2.0 / 3.0, 0.0)),
        ],
    )
    .unwrap()
}

/// Vertical counterpart of [`planar_pair_source`].
pub fn planar_pair_target() -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(1.0 / 3.0, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(1.0 / 3.0, 0.0, 2.0 / 3.0)),
        ],
    )
    .unwrap()
}

/// Two planar similarity self-loops with the given ratios and zero
/// translations; handy for composition and distortion tests.
pub fn two_similarities_one_vertex(r1: f64, r2: f64) -> GdifsSystem {
    GdifsSystem::assemble(
        2,
        1,
        vec![
            (edge(1, 1, 1), sim2(r1, 0.0, 0.0)),
            (edge(2, 1, 1), sim2(r2, 0.0, 0.0)),
        ],
    )
    .unwrap()
}

/// Overlapping pair `x -> x/2` and `x -> x/2 + 1/4` on one vertex; violates
/// every separation condition.
pub fn overlapping_pair() -> GdifsSystem {
    GdifsSystem::assemble(
        1,
        1,
        vec![
            (edge(1, 1, 1), sim1(0.5, 0.0)),
            (edge(2, 1, 1), sim1(0.5, 0.25)),
        ],
    )
    .unwrap()
}

/// Touching pair `x -> x/2` and `x -> x/2 + 1/2`: the attractor is [0,1]
/// and the two halves meet at 1/2.
pub fn touching_pair() -> GdifsSystem {
    GdifsSystem::assemble(
        1,
        1,
        vec![
            (edge(1, 1, 1), sim1(0.5, 0.0)),
            (edge(2, 1, 1), sim1(0.5, 0.5)),
        ],
    )
    .unwrap()
}
