//! Certified attractor approximation: invariant bounding boxes, cylinder
//! expansion, the random-iteration walk, invariance verification and
//! Hausdorff distances between finite clouds.

use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point, SquareMat, CERTIFIED_SLACK};
use crate::graph::{Path, Vertex};
use crate::grid::GridIndex;
use crate::maps::{compose, ComposedMap};
use crate::system::GdifsSystem;

pub const DEFAULT_CYLINDER_BUDGET: u128 = 1_000_000;
pub const CHAOS_BURN_IN: usize = 100;

const BOX_ITER_TOL: f64 = 1e-12;
const BOX_ITER_MAX: usize = 10_000;

/// How the point clouds of an [`AttractorApprox`] were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxKind {
    /// Deterministic depth-N cylinder expansion.
    Cylinder { depth: usize },
    /// Random-iteration walk.
    ChaosGame { n_points: usize, seed: u64 },
}

/// Finite approximation of the attractor tuple. Every cloud point lies
/// within `error_bound` of the true attractor piece; for cylinder
/// expansions the bound also holds in the reverse direction.
#[derive(Clone, Debug)]
pub struct AttractorApprox {
    pub kind: ApproxKind,
    clouds: Vec<Vec<Point>>,
    boxes: Vec<AxisBox>,
    seeds: Vec<Point>,
    pub error_bound: f64,
}

impl AttractorApprox {
    pub fn cloud(&self, v: Vertex) -> &[Point] {
        &self.clouds[v.0 - 1]
    }

    pub fn clouds(&self) -> &[Vec<Point>] {
        &self.clouds
    }

    pub fn bounding_box(&self, v: Vertex) -> &AxisBox {
        &self.boxes[v.0 - 1]
    }

    pub fn boxes(&self) -> &[AxisBox] {
        &self.boxes
    }

    pub fn seed(&self, v: Vertex) -> Point {
        self.seeds[v.0 - 1]
    }

    pub fn seeds(&self) -> &[Point] {
        &self.seeds
    }

    pub fn depth(&self) -> Option<usize> {
        match self.kind {
            ApproxKind::Cylinder { depth } => Some(depth),
            ApproxKind::ChaosGame { .. } => None,
        }
    }

    /// All points across vertices.
    pub fn union_cloud(&self) -> Vec<Point> {
        let mut all = Vec::with_capacity(self.clouds.iter().map(Vec::len).sum());
        for c in &self.clouds {
            all.extend_from_slice(c);
        }
        all
    }

    /// Bounding box of the whole tuple.
    pub fn union_box(&self) -> AxisBox {
        let mut b = self.boxes[0];
        for bb in &self.boxes[1..] {
            b = b.union(bb);
        }
        b
    }

    pub fn total_points(&self) -> usize {
        self.clouds.iter().map(Vec::len).sum()
    }
}

/// Per-vertex boxes invariant under the system: `S_e(Box_k)` is contained in
/// `Box_i` for every edge `i -> k`, within the stopping tolerance.
///
/// Iterates the interval box-image operator from a cube that provably
/// contains every attractor piece (radius `max |t| / (1 - max r)`), until
/// the tuple is stable to 1e-12.
pub fn invariant_bounding_boxes(system: &GdifsSystem) -> Result<Vec<AxisBox>> {
    let report = system.graph.validate();
    if !report.valid {
        return Err(Error::InvalidGraph(format!(
            "vertices without outgoing edges: {:?}",
            report.vertices_without_outgoing
        )));
    }
    let r = system.max_contraction_ratio();
    let max_t = system
        .maps()
        .iter()
        .map(|m| m.translation.norm())
        .fold(0.0, f64::max);
    let radius = if r < 1.0 { max_t / (1.0 - r) } else { max_t * 10.0 };
    let n = system.graph.vertex_count();
    let mut boxes = vec![AxisBox::centered_cube(system.dim, radius.max(1e-300)); n];
    for iter in 0..BOX_ITER_MAX {
        let mut next: Vec<Option<AxisBox>> = vec![None; n];
        for (ei, e) in system.graph.edges().iter().enumerate() {
            let m = system.map(ei);
            let img = boxes[e.target.0 - 1].affine_image(&m.linear, &m.translation);
            next[e.source.0 - 1] = Some(match next[e.source.0 - 1] {
                Some(b) => b.union(&img),
                None => img,
            });
        }
        let next: Vec<AxisBox> = next
            .into_iter()
            .map(|b| b.expect("every vertex has an outgoing edge"))
            .collect();
        let mut change = 0.0f64;
        for (a, b) in boxes.iter().zip(next.iter()) {
            for i in 0..3 {
                change = change
                    .max((a.lo.0[i] - b.lo.0[i]).abs())
                    .max((a.hi.0[i] - b.hi.0[i]).abs());
            }
        }
        boxes = next;
        if change <= BOX_ITER_TOL {
            return Ok(boxes);
        }
        let _ = iter;
    }
    Err(Error::BoxIterationDiverged(BOX_ITER_MAX))
}

/// One exact attractor point per vertex: the fixed point of the composed
/// map along the shortest closed path through the vertex. Using true
/// attractor members as expansion seeds keeps every emitted cloud inside
/// the attractor (up to roundoff), which makes cylinder-gap brackets and
/// coding round trips exact.
pub fn attractor_seeds(system: &GdifsSystem) -> Result<Vec<Point>> {
    let mut seeds = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        let cycle = system
            .graph
            .shortest_cycle_through(v)
            .ok_or(Error::NotStronglyConnected)?;
        let cm = compose(system, &cycle);
        seeds.push(cm.fixed_point()?);
    }
    Ok(seeds)
}

/// Exact attractor members per vertex beyond the seed: fixed points of all
/// closed paths of length <= 2 through the vertex (capped), seed included.
/// These witness extremal positions that single-seed clouds only approach
/// in the limit.
pub fn attractor_witnesses(system: &GdifsSystem, cap_per_vertex: usize) -> Result<Vec<Vec<Point>>> {
    let seeds = attractor_seeds(system)?;
    let mut out = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        let mut pts = vec![seeds[v.0 - 1]];
        let push = |p: Point, pts: &mut Vec<Point>| {
            if pts.len() < cap_per_vertex && pts.iter().all(|q| q.dist(&p) > 0.0) {
                pts.push(p);
            }
        };
        for &ei in system.graph.outgoing(v) {
            let e = system.graph.edge(ei);
            if e.target == v {
                push(system.map(ei).fixed_point()?, &mut pts);
            } else {
                for &ej in system.graph.outgoing(e.target) {
                    if system.graph.edge(ej).target == v {
                        let path = system.graph.path_from_indices(&[ei, ej])?;
                        push(compose(system, &path).fixed_point()?, &mut pts);
                    }
                }
            }
        }
        out.push(pts);
    }
    Ok(out)
}

fn check_budget(system: &GdifsSystem, depth: usize, budget: u128) -> Result<u128> {
    let total: u128 = system
        .graph
        .vertices()
        .map(|v| system.graph.path_count_from(v, depth))
        .sum();
    if total > budget {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    Ok(total)
}

/// Deterministic depth-N cylinder expansion: one point per depth-N path,
/// the composed image of the terminal vertex's seed. The emitted order is
/// depth-first by edge id, so repeated runs are identical.
pub fn compute_attractor(
    system: &GdifsSystem,
    depth: usize,
    budget: u128,
) -> Result<AttractorApprox> {
    if depth == 0 {
        return Err(Error::InvalidGraph("expansion depth must be >= 1".into()));
    }
    check_budget(system, depth, budget)?;
    let boxes = invariant_bounding_boxes(system)?;
    let seeds = attractor_seeds(system)?;
    let mut clouds = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        let count = system.graph.path_count_from(v, depth) as usize;
        let mut cloud = Vec::with_capacity(count);
        let identity = SquareMat::identity(system.dim)?;
        expand(system, v, depth, identity, Point::zero(), &seeds, &mut cloud);
        if cloud.is_empty() {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} emits no depth-{depth} paths"
            )));
        }
        clouds.push(cloud);
    }
    let max_diam = boxes.iter().map(AxisBox::diameter).fold(0.0, f64::max);
    let error_bound = system.max_contraction_ratio().powi(depth as i32) * max_diam;
    Ok(AttractorApprox {
        kind: ApproxKind::Cylinder { depth },
        clouds,
        boxes,
        seeds,
        error_bound,
    })
}

fn expand(
    system: &GdifsSystem,
    v: Vertex,
    remaining: usize,
    linear: SquareMat,
    translation: Point,
    seeds: &[Point],
    out: &mut Vec<Point>,
) {
    if remaining == 0 {
        out.push(linear.apply(&seeds[v.0 - 1]).add(&translation));
        return;
    }
    for &ei in system.graph.outgoing(v) {
        let m = system.map(ei);
        let t2 = linear.apply(&m.translation).add(&translation);
        let l2 = linear.mul(&m.linear);
        expand(
            system,
            system.graph.edge(ei).target,
            remaining - 1,
            l2,
            t2,
            seeds,
            out,
        );
    }
}

/// Random-iteration approximation. The walk runs backwards along edges
/// (maps send the target piece into the source piece): at vertex j it
/// draws an edge with target j uniformly, applies the map, and records the
/// point in the source vertex's bucket. The first `CHAOS_BURN_IN` steps are
/// discarded. Reproducible for a fixed seed.
pub fn chaos_game(system: &GdifsSystem, n_points: usize, seed: u64) -> Result<AttractorApprox> {
    if !system.graph.is_strongly_connected()? {
        return Err(Error::NotStronglyConnected);
    }
    for v in system.graph.vertices() {
        if system.graph.incoming(v).is_empty() {
            return Err(Error::NoIncomingEdge(v));
        }
    }
    let boxes = invariant_bounding_boxes(system)?;
    let seeds = attractor_seeds(system)?;
    let mut clouds: Vec<Vec<Point>> = seeds.iter().map(|s| vec![*s]).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut v = Vertex(1);
    let mut x = seeds[0];
    for step in 0..(CHAOS_BURN_IN + n_points) {
        let inc = system.graph.incoming(v);
        let ei = inc[rng.random_range(0..inc.len())];
        x = system.map(ei).apply(&x);
        v = system.graph.edge(ei).source;
        if step >= CHAOS_BURN_IN {
            clouds[v.0 - 1].push(x);
        }
    }
    let max_diam = boxes.iter().map(AxisBox::diameter).fold(0.0, f64::max);
    let error_bound =
        system.max_contraction_ratio().powi(CHAOS_BURN_IN as i32) * max_diam + CERTIFIED_SLACK;
    Ok(AttractorApprox {
        kind: ApproxKind::ChaosGame { n_points, seed },
        clouds,
        boxes,
        seeds,
        error_bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    /// Per-vertex Hausdorff distance between the cloud and the union of its
    /// one-step images.
    pub distances: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Hausdorff distance, per vertex, between `P_i` and the union over edges
/// `i -> k` of `S_e(P_k)`. For cylinder expansions this is at most twice
/// the approximation error bound.
pub fn verify_invariance(
    system: &GdifsSystem,
    approx: &AttractorApprox,
    tolerance: f64,
) -> Result<InvarianceReport> {
    let mut distances = Vec::with_capacity(system.graph.vertex_count());
    let mut image_buf: Vec<Point> = Vec::new();
    for v in system.graph.vertices() {
        let cloud = approx.cloud(v);
        if cloud.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let grid_self = GridIndex::build(cloud, system.dim);
        // running min over edges: distance from each cloud point to the image union
        let mut to_image = vec![f64::INFINITY; cloud.len()];
        let mut from_image = 0.0f64;
        for &ei in system.graph.outgoing(v) {
            let e = system.graph.edge(ei);
            let m = system.map(ei);
            let source_cloud = approx.cloud(e.target);
            image_buf.clear();
            image_buf.reserve(source_cloud.len());
            for p in source_cloud {
                image_buf.push(m.apply(p));
            }
            let grid_image = GridIndex::build(&image_buf, system.dim);
            for (slot, p) in to_image.iter_mut().zip(cloud.iter()) {
                let d = grid_image.nearest_dist(p);
                if d < *slot {
                    *slot = d;
                }
            }
            for q in &image_buf {
                let d = grid_self.nearest_dist(q);
                if d > from_image {
                    from_image = d;
                }
            }
        }
        let to_image_max = to_image.iter().fold(0.0f64, |a, &b| a.max(b));
        distances.push(to_image_max.max(from_image));
    }
    let pass = distances.iter().all(|&d| d <= tolerance);
    Ok(InvarianceReport {
        distances,
        tolerance,
        pass,
    })
}

/// Exact Hausdorff distance between finite clouds; brute force for small
/// inputs, grid-accelerated beyond 10^4 points.
pub fn hausdorff_distance(p: &[Point], q: &[Point], dim: usize) -> Result<f64> {
    Ok(one_sided_hausdorff(p, q, dim)?.max(one_sided_hausdorff(q, p, dim)?))
}

/// `sup_{x in p} min_{y in q} |x - y|`.
pub fn one_sided_hausdorff(p: &[Point], q: &[Point], dim: usize) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if p.len().max(q.len()) <= 10_000 {
        let mut worst = 0.0f64;
        for x in p {
            let mut best = f64::INFINITY;
            for y in q {
                best = best.min(x.dist_sq(y));
            }
            worst = worst.max(best);
        }
        Ok(worst.sqrt())
    } else {
        let grid = GridIndex::build(q, dim);
        let mut worst = 0.0f64;
        for x in p {
            worst = worst.max(grid.nearest_dist(x));
        }
        Ok(worst)
    }
}

/// Minimum pairwise distance between two nonempty clouds (the set gap).
pub fn cloud_gap(p: &[Point], q: &[Point], dim: usize) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if p.len().max(q.len()) <= 10_000 {
        let mut best = f64::INFINITY;
        for x in p {
            for y in q {
                best = best.min(x.dist_sq(y));
            }
        }
        Ok(best.sqrt())
    } else {
        let (small, large) = if p.len() <= q.len() { (p, q) } else { (q, p) };
        let grid = GridIndex::build(large, dim);
        let mut best = f64::INFINITY;
        for x in small {
            best = best.min(grid.nearest_dist(x));
        }
        Ok(best)
    }
}

/// A depth-p cylinder: path, composed map and a certified bounding box of
/// the image of the terminal piece.
#[derive(Clone, Debug)]
pub struct CylinderSet {
    pub address: Path,
    pub composed: ComposedMap,
    pub bbox: AxisBox,
}

/// All depth-`p` cylinders rooted at `i`. Boxes come from stepwise interval
/// propagation, so extending a path always shrinks the box into its prefix's.
pub fn cylinder_sets(
    system: &GdifsSystem,
    i: Vertex,
    depth: usize,
    cap: usize,
) -> Result<Vec<CylinderSet>> {
    let boxes = invariant_bounding_boxes(system)?;
    let paths = system.graph.enumerate_terminal_paths(i, depth, cap)?;
    let mut out = Vec::with_capacity(paths.len());
    for path in paths {
        let composed = compose(system, &path);
        let mut bbox = boxes[path.terminal().0 - 1];
        for &ei in path.edge_indices().iter().rev() {
            let m = system.map(ei);
            bbox = bbox.affine_image(&m.linear, &m.translation);
        }
        out.push(CylinderSet {
            address: path,
            composed,
            bbox,
        });
    }
    Ok(out)
}

/// Visit the bounding box of every depth-`p` cylinder without materialising
/// paths. Boxes match the stepwise interval propagation of `cylinder_sets`.
pub fn for_each_cylinder_box<F: FnMut(Vertex, &AxisBox)>(
    system: &GdifsSystem,
    depth: usize,
    budget: u128,
    mut visit: F,
) -> Result<()> {
    check_budget(system, depth, budget)?;
    let boxes = invariant_bounding_boxes(system)?;
    // carry the exact affine composition plus the absolute-value matrix
    // product, which are what stepwise interval images compose to
    struct Walk<'a, F2> {
        system: &'a GdifsSystem,
        boxes: &'a [AxisBox],
        visit: F2,
    }
    impl<F2: FnMut(Vertex, &AxisBox)> Walk<'_, F2> {
        fn go(
            &mut self,
            root: Vertex,
            v: Vertex,
            remaining: usize,
            linear: SquareMat,
            translation: Point,
            abs_linear: SquareMat,
        ) {
            if remaining == 0 {
                let b = &self.boxes[v.0 - 1];
                let center = linear.apply(&b.center()).add(&translation);
                let half = b.hi.sub(&b.lo).scale(0.5);
                let habs = abs_linear.apply(&half);
                let bbox = AxisBox::new(center.sub(&habs), center.add(&habs));
                (self.visit)(root, &bbox);
                return;
            }
            for &ei in self.system.graph.outgoing(v) {
                let m = self.system.map(ei);
                let t2 = linear.apply(&m.translation).add(&translation);
                let l2 = linear.mul(&m.linear);
                let mut ma = m.linear;
                for row in ma.m.iter_mut() {
                    for x in row.iter_mut() {
                        *x = x.abs();
                    }
                }
                let a2 = abs_linear.mul(&ma);
                self.go(
                    root,
                    self.system.graph.edge(ei).target,
                    remaining - 1,
                    l2,
                    t2,
                    a2,
                );
            }
        }
    }
    let mut walk = Walk {
        system,
        boxes: &boxes,
        visit: &mut visit,
    };
    for v in system.graph.vertices() {
        let identity = SquareMat::identity(system.dim)?;
        walk.go(v, v, depth, identity, Point::zero(), identity);
    }
    Ok(())
}

/// Largest cylinder bounding-box diameter at the given depth.
pub fn max_cylinder_diameter(system: &GdifsSystem, depth: usize, budget: u128) -> Result<f64> {
    let mut max = 0.0f64;
    for_each_cylinder_box(system, depth, budget, |_, b| {
        max = max.max(b.diameter());
    })?;
    Ok(max)
}

/// Per-vertex lists of depth-`p` cylinder boxes, for cover-mode rasters.
pub fn cylinder_boxes(
    system: &GdifsSystem,
    depth: usize,
    budget: u128,
) -> Result<Vec<Vec<AxisBox>>> {
    let mut out = vec![Vec::new(); system.graph.vertex_count()];
    for_each_cylinder_box(system, depth, budget, |v, b| {
        out[v.0 - 1].push(*b);
    })?;
    Ok(out)
}
