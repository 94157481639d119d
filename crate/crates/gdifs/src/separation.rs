//! Separation analysis: gaps between depth-1 cylinders with certified
//! brackets, a three-valued strong-separation verdict, raster consistency
//! checks for open-set tuples, and interior-overlap measurement.

use std::collections::HashSet;

use serde::Serialize;

use crate::attractor::{attractor_witnesses, cloud_gap, AttractorApprox};
use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point, SquareMat, GRID_SNAP};
use crate::graph::EdgeId;
use crate::system::GdifsSystem;
use crate::topology::RasterGrid;

/// Per-vertex finite unions of open axis-aligned boxes.
#[derive(Clone, Debug)]
pub struct OpenSetTuple {
    boxes: Vec<Vec<AxisBox>>,
}

impl OpenSetTuple {
    pub fn new(boxes: Vec<Vec<AxisBox>>, dim: usize) -> Result<Self> {
        if boxes.is_empty() {
            return Err(Error::InvalidOpenSets("tuple is empty".into()));
        }
        for (vi, list) in boxes.iter().enumerate() {
            if list.is_empty() {
                return Err(Error::InvalidOpenSets(format!(
                    "vertex {} has an empty open set",
                    vi + 1
                )));
            }
            for b in list {
                for axis in 0..dim {
                    if !(b.hi.0[axis] - b.lo.0[axis] > 0.0) || !b.hi.0[axis].is_finite() {
                        return Err(Error::InvalidOpenSets(format!(
                            "vertex {}: box must be nonempty and bounded on axis {axis}",
                            vi + 1
                        )));
                    }
                }
            }
        }
        Ok(OpenSetTuple { boxes })
    }

    pub fn vertex_boxes(&self, v: crate::graph::Vertex) -> &[AxisBox] {
        &self.boxes[v.0 - 1]
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    /// Strict membership in the union of open boxes.
    pub fn contains_strict(&self, v: crate::graph::Vertex, p: &Point, dim: usize) -> bool {
        self.boxes[v.0 - 1].iter().any(|b| {
            (0..dim).all(|axis| p.0[axis] > b.lo.0[axis] && p.0[axis] < b.hi.0[axis])
        })
    }
}

/// Certified bracket around a cylinder gap: the cylinder clouds consist of
/// exact attractor members, so the measured gap upper-bounds the true gap,
/// and coverage of the cylinders by the clouds gives the lower end.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GapBracket {
    pub gap: f64,
    pub lower: f64,
    pub upper: f64,
}

impl GapBracket {
    fn around(gap: f64, error_bound: f64) -> GapBracket {
        GapBracket {
            gap,
            lower: gap - 2.0 * error_bound,
            upper: gap,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    /// Minimum gap among distinct same-source cylinder pairs, per vertex;
    /// None when the vertex has fewer than two outgoing edges.
    pub per_vertex_gaps: Vec<Option<GapBracket>>,
    /// Minimum over all distinct edge pairs regardless of source vertex;
    /// the constant entering the coding-map Lipschitz bound.
    pub global_gap: Option<GapBracket>,
    pub depth: Option<usize>,
    pub error_bound: f64,
}

/// Depth-1 cylinder clouds: the edge map applied to the target vertex's
/// cloud, augmented with images of exact short-cycle witnesses so that
/// touching cylinders are measured at gap zero.
pub(crate) fn cylinder_clouds(
    system: &GdifsSystem,
    approx: &AttractorApprox,
) -> Result<Vec<Vec<Point>>> {
    let witnesses = attractor_witnesses(system, 16)?;
    let mut clouds = Vec::with_capacity(system.edge_count());
    for (ei, e) in system.graph.edges().iter().enumerate() {
        let m = system.map(ei);
        let src = approx.cloud(e.target);
        let mut cloud = Vec::with_capacity(src.len() + witnesses[e.target.0 - 1].len());
        for p in src {
            cloud.push(m.apply(p));
        }
        for w in &witnesses[e.target.0 - 1] {
            cloud.push(m.apply(w));
        }
        clouds.push(cloud);
    }
    Ok(clouds)
}

/// Gaps between distinct depth-1 cylinders, bracketed by the approximation
/// error: the true gap lies in `[gap - 2*error_bound, gap]`.
pub fn cylinder_gap(system: &GdifsSystem, approx: &AttractorApprox) -> Result<SeparationReport> {
    let clouds = cylinder_clouds(system, approx)?;
    let err = approx.error_bound;
    let edges = system.graph.edges();
    let mut per_vertex: Vec<Option<f64>> = vec![None; system.graph.vertex_count()];
    let mut global: Option<f64> = None;
    for a in 0..edges.len() {
        for b in (a + 1)..edges.len() {
            let gap = cloud_gap(&clouds[a], &clouds[b], system.dim)?;
            global = Some(global.map_or(gap, |g: f64| g.min(gap)));
            if edges[a].source == edges[b].source {
                let slot = &mut per_vertex[edges[a].source.0 - 1];
                *slot = Some(slot.map_or(gap, |g: f64| g.min(gap)));
            }
        }
    }
    Ok(SeparationReport {
        per_vertex_gaps: per_vertex
            .into_iter()
            .map(|g| g.map(|gap| GapBracket::around(gap, err)))
            .collect(),
        global_gap: global.map(|gap| GapBracket::around(gap, err)),
        depth: approx.depth(),
        error_bound: err,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SscVerdict {
    Certified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SscReport {
    pub verdict: SscVerdict,
    pub tolerance: f64,
    #[serde(flatten)]
    pub separation: SeparationReport,
}

/// Three-valued strong-separation check. Certified when every per-vertex
/// lower bracket clears the tolerance; refuted when some upper bracket
/// falls below it; otherwise inconclusive (a deeper approximation may
/// decide). Vertices with fewer than two outgoing edges are vacuously
/// separated.
pub fn check_ssc(
    system: &GdifsSystem,
    approx: &AttractorApprox,
    tolerance: f64,
) -> Result<SscReport> {
    let separation = cylinder_gap(system, approx)?;
    let mut all_certified = true;
    let mut any_refuted = false;
    for bracket in separation.per_vertex_gaps.iter().flatten() {
        if !(bracket.lower > tolerance) {
            all_certified = false;
        }
        if bracket.upper < tolerance {
            any_refuted = true;
        }
    }
    let verdict = if any_refuted {
        SscVerdict::Refuted
    } else if all_certified {
        SscVerdict::Certified
    } else {
        SscVerdict::Inconclusive
    };
    Ok(SscReport {
        verdict,
        tolerance,
        separation,
    })
}

// ---------------------------------------------------------------------------
// open-set condition at raster resolution

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OscVerdict {
    ConsistentAtResolution,
    Violated,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscWitness {
    pub vertex: usize,
    pub kind: &'static str, // "containment" or "overlap"
    pub edges: (EdgeId, EdgeId),
    pub cell_center: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscReport {
    pub verdict: OscVerdict,
    pub resolution: f64,
    /// A raster check cannot certify the open-set condition; consistency is
    /// evidence at this resolution only.
    pub certified: bool,
    pub witness: Option<OscWitness>,
}

fn box_corners(b: &AxisBox, dim: usize) -> Vec<Point> {
    let mut out = Vec::with_capacity(1 << dim);
    for mask in 0..(1usize << dim) {
        let mut c = [0.0f64; 3];
        for axis in 0..dim {
            c[axis] = if mask & (1 << axis) != 0 {
                b.hi.0[axis]
            } else {
                b.lo.0[axis]
            };
        }
        out.push(Point(c));
    }
    out
}

fn cross(a: &Point, b: &Point) -> Point {
    Point([
        a.0[1] * b.0[2] - a.0[2] * b.0[1],
        a.0[2] * b.0[0] - a.0[0] * b.0[2],
        a.0[0] * b.0[1] - a.0[1] * b.0[0],
    ])
}

/// Separating axes for an affine image of a box against an axis-aligned box.
fn sat_axes(linear: &SquareMat, dim: usize) -> Vec<Point> {
    let mut axes = Vec::new();
    for axis in 0..dim {
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        axes.push(Point(e));
    }
    let cols: Vec<Point> = (0..dim)
        .map(|j| {
            let mut c = [0.0; 3];
            for i in 0..dim {
                c[i] = linear.m[i][j];
            }
            Point(c)
        })
        .collect();
    match dim {
        1 => {}
        2 => {
            for c in &cols {
                axes.push(Point([-c.0[1], c.0[0], 0.0]));
            }
        }
        3 => {
            for i in 0..3 {
                for j in (i + 1)..3 {
                    axes.push(cross(&cols[i], &cols[j]));
                }
            }
            for axis in 0..3 {
                let mut e = [0.0; 3];
                e[axis] = 1.0;
                for c in &cols {
                    axes.push(cross(&Point(e), c));
                }
            }
        }
        _ => unreachable!(),
    }
    axes.retain(|a| a.norm() > 1e-12);
    for a in axes.iter_mut() {
        *a = a.scale(1.0 / a.norm());
    }
    axes
}

fn project(points: &[Point], axis: &Point) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let t = p.0[0] * axis.0[0] + p.0[1] * axis.0[1] + p.0[2] * axis.0[2];
        lo = lo.min(t);
        hi = hi.max(t);
    }
    (lo, hi)
}

/// Open intersection of two convex polytopes given by corner sets, with a
/// snap margin: overlaps thinner than `margin` count as empty.
fn open_overlap(corners_a: &[Point], corners_b: &[Point], axes: &[Point], margin: f64) -> bool {
    for axis in axes {
        let (alo, ahi) = project(corners_a, axis);
        let (blo, bhi) = project(corners_b, axis);
        if ahi.min(bhi) - alo.max(blo) <= margin {
            return false;
        }
    }
    true
}

type Cell = [i64; 3];

/// Visit every cell in the inclusive `lo..=hi` block.
fn for_each_cell(lo: Cell, hi: Cell, dim: usize, mut f: impl FnMut(&Cell)) {
    let mut c = lo;
    loop {
        f(&c);
        let mut axis = 0;
        while axis < dim {
            c[axis] += 1;
            if c[axis] <= hi[axis] {
                break;
            }
            c[axis] = lo[axis];
            axis += 1;
        }
        if axis == dim {
            return;
        }
    }
}

fn block_size(lo: &Cell, hi: &Cell, dim: usize) -> u128 {
    (0..dim).map(|a| (hi[a] - lo[a] + 1) as u128).product()
}

fn cells_of_open_boxes(
    boxes: &[AxisBox],
    origin: &Point,
    delta: f64,
    dim: usize,
) -> Result<HashSet<Cell>> {
    let snap = GRID_SNAP;
    let mut out = HashSet::new();
    for b in boxes {
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        let mut empty = false;
        for axis in 0..dim {
            let a = (b.lo.0[axis] - origin.0[axis]) / delta;
            let z = (b.hi.0[axis] - origin.0[axis]) / delta;
            lo[axis] = (a + snap).floor() as i64;
            hi[axis] = (z - snap).ceil() as i64 - 1;
            if hi[axis] < lo[axis] {
                empty = true;
                break;
            }
        }
        if empty {
            continue;
        }
        if block_size(&lo, &hi, dim) > (1 << 22) {
            return Err(Error::GridTooLarge(block_size(&lo, &hi, dim) as usize, 1));
        }
        for_each_cell(lo, hi, dim, |c| {
            out.insert(*c);
        });
    }
    Ok(out)
}

fn cells_of_image(
    src_boxes: &[AxisBox],
    linear: &SquareMat,
    translation: &Point,
    origin: &Point,
    delta: f64,
    dim: usize,
) -> Result<HashSet<Cell>> {
    let axes = sat_axes(linear, dim);
    let margin = GRID_SNAP * delta;
    let mut out = HashSet::new();
    for b in src_boxes {
        let corners: Vec<Point> = box_corners(b, dim)
            .iter()
            .map(|p| linear.apply(p).add(translation))
            .collect();
        let bbox = AxisBox::bounding(&corners)?;
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for axis in 0..dim {
            lo[axis] = ((bbox.lo.0[axis] - origin.0[axis]) / delta + GRID_SNAP).floor() as i64;
            hi[axis] = ((bbox.hi.0[axis] - origin.0[axis]) / delta - GRID_SNAP).ceil() as i64 - 1;
            hi[axis] = hi[axis].max(lo[axis]);
        }
        if block_size(&lo, &hi, dim) > (1 << 22) {
            return Err(Error::GridTooLarge(block_size(&lo, &hi, dim) as usize, 1));
        }
        for_each_cell(lo, hi, dim, |c| {
            let mut cell_box = AxisBox::point(Point::zero());
            for axis in 0..dim {
                cell_box.lo.0[axis] = origin.0[axis] + c[axis] as f64 * delta;
                cell_box.hi.0[axis] = origin.0[axis] + (c[axis] + 1) as f64 * delta;
            }
            let cell_corners = box_corners(&cell_box, dim);
            if open_overlap(&corners, &cell_corners, &axes, margin) {
                out.insert(*c);
            }
        });
    }
    Ok(out)
}

/// Raster consistency check for an open-set tuple: each edge image must
/// stay inside its source vertex's raster, and distinct images at a common
/// source must not share a cell. `Consistent` is evidence at resolution
/// `delta`, never a certificate.
pub fn check_osc(
    system: &GdifsSystem,
    open_sets: &OpenSetTuple,
    delta: f64,
) -> Result<OscReport> {
    if open_sets.len() != system.graph.vertex_count() {
        return Err(Error::InvalidOpenSets(format!(
            "tuple has {} vertices, system has {}",
            open_sets.len(),
            system.graph.vertex_count()
        )));
    }
    // common lattice over everything in sight
    let mut extent: Option<AxisBox> = None;
    for v in system.graph.vertices() {
        for b in open_sets.vertex_boxes(v) {
            extent = Some(match extent {
                Some(e) => e.union(b),
                None => *b,
            });
        }
    }
    let extent = extent.expect("tuple validated nonempty");
    let span = (0..system.dim)
        .map(|a| extent.side(a))
        .fold(0.0f64, f64::max);
    if delta < span / f64::powi(2.0, 20) {
        return Err(Error::GridTooLarge((span / delta) as usize, 1));
    }
    let bounds = crate::attractor::invariant_bounding_boxes(system)?;
    let padded = bounds
        .iter()
        .fold(extent, |acc, b| acc.union(b))
        .expand_dims(system.dim, span.max(1.0));
    for v in system.graph.vertices() {
        for b in open_sets.vertex_boxes(v) {
            if !padded.contains_box(b, 0.0) {
                return Err(Error::InvalidOpenSets(format!(
                    "vertex {v}: open set escapes the padded system bounds"
                )));
            }
        }
    }
    let origin = extent.lo;

    let mut base_cells: Vec<HashSet<Cell>> = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        base_cells.push(cells_of_open_boxes(
            open_sets.vertex_boxes(v),
            &origin,
            delta,
            system.dim,
        )?);
    }
    let witness_center = |c: &Cell, dim: usize| -> Vec<f64> {
        (0..dim)
            .map(|a| origin.0[a] + (c[a] as f64 + 0.5) * delta)
            .collect()
    };

    for v in system.graph.vertices() {
        let outgoing = system.graph.outgoing(v);
        let mut images: Vec<(EdgeId, HashSet<Cell>)> = Vec::with_capacity(outgoing.len());
        for &ei in outgoing {
            let e = system.graph.edge(ei);
            let m = system.map(ei);
            let cells = cells_of_image(
                open_sets.vertex_boxes(e.target),
                &m.linear,
                &m.translation,
                &origin,
                delta,
                system.dim,
            )?;
            if let Some(c) = cells.iter().find(|c| !base_cells[v.0 - 1].contains(*c)) {
                return Ok(OscReport {
                    verdict: OscVerdict::Violated,
                    resolution: delta,
                    certified: false,
                    witness: Some(OscWitness {
                        vertex: v.0,
                        kind: "containment",
                        edges: (e.id, e.id),
                        cell_center: witness_center(c, system.dim),
                    }),
                });
            }
            images.push((e.id, cells));
        }
        for a in 0..images.len() {
            for b in (a + 1)..images.len() {
                if let Some(c) = images[a].1.intersection(&images[b].1).next() {
                    return Ok(OscReport {
                        verdict: OscVerdict::Violated,
                        resolution: delta,
                        certified: false,
                        witness: Some(OscWitness {
                            vertex: v.0,
                            kind: "overlap",
                            edges: (images[a].0, images[b].0),
                            cell_center: witness_center(c, system.dim),
                        }),
                    });
                }
            }
        }
    }
    Ok(OscReport {
        verdict: OscVerdict::ConsistentAtResolution,
        resolution: delta,
        certified: false,
        witness: None,
    })
}

// ---------------------------------------------------------------------------
// interior overlap of two same-source cylinders

#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub edges: (EdgeId, EdgeId),
    pub resolution: f64,
    pub common_interior_pixels: usize,
    /// `delta^2` times the common-interior pixel count.
    pub area: f64,
    /// Set when either cylinder collapses into a single pixel at this
    /// resolution; the measurement is then meaningless.
    pub degenerate: bool,
}

/// Rasterize two same-source cylinder clouds on a shared lattice, take
/// morphological interiors and measure the common area. For systems
/// consistent with an open-set tuple this decreases toward zero with delta.
pub fn interior_overlap(
    system: &GdifsSystem,
    approx: &AttractorApprox,
    edge_a: EdgeId,
    edge_b: EdgeId,
    delta: f64,
) -> Result<OverlapReport> {
    if system.dim != 2 {
        return Err(Error::NonPlanar(system.dim));
    }
    if edge_a == edge_b {
        return Err(Error::Config("cylinder pair must be distinct".into()));
    }
    if delta < 2.0 * approx.error_bound {
        return Err(Error::ScaleBelowFloor(delta, 2.0 * approx.error_bound));
    }
    let ia = system
        .edge_index_by_id(edge_a)
        .ok_or_else(|| Error::Config(format!("unknown edge id {edge_a}")))?;
    let ib = system
        .edge_index_by_id(edge_b)
        .ok_or_else(|| Error::Config(format!("unknown edge id {edge_b}")))?;
    let (ea, eb) = (system.graph.edge(ia), system.graph.edge(ib));
    if ea.source != eb.source {
        return Err(Error::Config(
            "cylinder pair must share its source vertex".into(),
        ));
    }
    let map_cloud = |ei: usize, tgt: crate::graph::Vertex| -> Vec<Point> {
        let m = system.map(ei);
        approx.cloud(tgt).iter().map(|p| m.apply(p)).collect()
    };
    let cloud_a = map_cloud(ia, ea.target);
    let cloud_b = map_cloud(ib, eb.target);
    let extent = approx
        .bounding_box(ea.source)
        .expand_dims(2, approx.error_bound + delta);
    let ra = RasterGrid::from_cloud(&cloud_a, 2, delta, 0.0, Some(extent))?;
    let rb = RasterGrid::from_cloud(&cloud_b, 2, delta, 0.0, Some(extent))?;
    let degenerate = ra.set_pixel_count() <= 1 || rb.set_pixel_count() <= 1;
    let common = ra.interior().intersection_count(&rb.interior());
    Ok(OverlapReport {
        edges: (edge_a, edge_b),
        resolution: delta,
        common_interior_pixels: common,
        area: delta * delta * common as f64,
        degenerate,
    })
}
