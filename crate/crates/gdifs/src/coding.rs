//! Address coding of attractor points and the induced conjugacy between
//! two systems over the same graph.
//!
//! Under certified strong separation, distinct depth-1 cylinders at a
//! vertex sit at least the vertex gap apart, so a point of the attractor
//! lies within the approximation error of exactly one cylinder. Addresses
//! are therefore recovered greedily: pick the nearest cylinder, pull the
//! point back through the edge map, repeat. The conjugacy evaluates the
//! recovered address in the target system; its convergence is geometric in
//! the working depth, so the infinite intersection is never materialised.

use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;

use crate::attractor::AttractorApprox;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::graph::{Path, Vertex};
use crate::maps::{bdp_profile, BdpVerdict, BDP_DEFAULT_BUDGET};
use crate::separation::{check_ssc, cylinder_clouds, SscReport, SscVerdict};
use crate::system::GdifsSystem;

const BOUND_MATCH_TOL: f64 = 1e-12;

/// Finite truncation of an admissible infinite address.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Address {
    pub path: Path,
}

impl Address {
    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

/// Nearest-cylinder decoder for one system, valid only under certified
/// strong separation (addresses are not unique otherwise).
pub struct Codebook<'a> {
    system: &'a GdifsSystem,
    pub ssc: SscReport,
    cylinder_clouds: Vec<Vec<Point>>,
    per_vertex_gap: Vec<Option<f64>>,
}

fn min_dist_sq(cloud: &[Point], q: &Point) -> f64 {
    let mut best = f64::INFINITY;
    for p in cloud {
        let d = p.dist_sq(q);
        if d < best {
            best = d;
        }
    }
    best
}

impl<'a> Codebook<'a> {
    pub fn new(
        system: &'a GdifsSystem,
        approx: &AttractorApprox,
        tolerance: f64,
    ) -> Result<Codebook<'a>> {
        let ssc = check_ssc(system, approx, tolerance)?;
        if ssc.verdict != SscVerdict::Certified {
            return Err(Error::SeparationNotCertified("source"));
        }
        let clouds = cylinder_clouds(system, approx)?;
        let per_vertex_gap = ssc
            .separation
            .per_vertex_gaps
            .iter()
            .map(|b| b.map(|b| b.gap))
            .collect();
        Ok(Codebook {
            system,
            ssc,
            cylinder_clouds: clouds,
            per_vertex_gap,
        })
    }

    /// Depth-`m` address of `x` as a point of the piece at `start`: at each
    /// level the nearest depth-1 cylinder cloud is selected and the point
    /// pulled back through that edge. Two cylinders within a quarter of the
    /// vertex gap of the point is an ambiguity: the point is too close to a
    /// gap boundary for the margin to decide.
    pub fn address_of(&self, x: &Point, start: Vertex, depth: usize) -> Result<Address> {
        let mut v = start;
        let mut y = *x;
        let mut edges = Vec::with_capacity(depth);
        for level in 1..=depth {
            let outgoing = self.system.graph.outgoing(v);
            let mut best: Option<(usize, f64)> = None;
            let mut second = f64::INFINITY;
            for &ei in outgoing {
                let d = min_dist_sq(&self.cylinder_clouds[ei], &y).sqrt();
                match best {
                    None => best = Some((ei, d)),
                    Some((_, bd)) if d < bd => {
                        second = bd;
                        best = Some((ei, d));
                    }
                    _ => second = second.min(d),
                }
            }
            let (chosen, bd) = best.expect("vertex has outgoing edges");
            if let Some(gap) = self.per_vertex_gap[v.0 - 1] {
                let margin = gap / 4.0;
                if bd <= margin && second <= margin {
                    return Err(Error::AmbiguousAddress {
                        level,
                        margin,
                    });
                }
            }
            y = self.system.map(chosen).apply_inverse(&y)?;
            edges.push(chosen);
            v = self.system.graph.edge(chosen).target;
        }
        Ok(Address {
            path: self.system.graph.path_from_indices(&edges)?,
        })
    }
}

/// Evaluate an address: the composed map along the path applied to the
/// terminal vertex's seed. Within `r^m * diam` of the infinite-intersection
/// limit; constant self-loop addresses converge to the loop's fixed point.
pub fn point_of(system: &GdifsSystem, seeds: &[Point], address: &Address) -> Point {
    let mut x = seeds[address.path.terminal().0 - 1];
    for &ei in address.path.edge_indices().iter().rev() {
        x = system.map(ei).apply(&x);
    }
    x
}

/// Residual of decoding and re-evaluating a point.
pub fn round_trip(
    codebook: &Codebook<'_>,
    approx: &AttractorApprox,
    x: &Point,
    start: Vertex,
    depth: usize,
) -> Result<f64> {
    let addr = codebook.address_of(x, start, depth)?;
    let y = point_of(codebook.system, approx.seeds(), &addr);
    Ok(y.dist(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiRegime {
    /// Target upper constants dominated by source lower constants per edge:
    /// the conjugacy is Lipschitz with constant `D1^{-1} max diam(B)`.
    Dominated,
    /// Lipschitz bounds matched per edge (and per audited composition) with
    /// the source distortion bounded: the conjugacy is bi-Lipschitz.
    Matched,
}

/// The coding conjugacy between two systems over the same graph, with its
/// measured separation constants and theoretical Lipschitz bounds.
pub struct ConjugacyMap<'a> {
    pub source: &'a GdifsSystem,
    pub source_approx: &'a AttractorApprox,
    pub target: &'a GdifsSystem,
    pub target_approx: &'a AttractorApprox,
    pub regime: PhiRegime,
    /// Working depth for address recovery and target evaluation.
    pub depth: usize,
    /// Global minimum gap between distinct source cylinders.
    pub source_gap: f64,
    /// Same for the target system.
    pub target_gap: f64,
    pub source_diameter: f64,
    pub target_diameter: f64,
    /// Matched regime: the source distortion constant; 1 for similarity
    /// systems.
    pub distortion_constant: f64,
    /// `Lip^+` bound: `D1^{-1} max diam(B)`, times the distortion constant
    /// in the matched regime.
    pub lip_upper_bound: f64,
    /// Matched regime only: `K^{-1} D2 / max diam(A)`.
    pub lip_lower_bound: Option<f64>,
    /// First composition depth at which matched constants diverge, if any.
    pub matched_violation_depth: Option<usize>,
    codebook: Codebook<'a>,
}

fn cloud_diameter(approx: &AttractorApprox) -> f64 {
    let mut max = 0.0f64;
    for cloud in approx.clouds() {
        if cloud.len() <= 4096 {
            for (i, a) in cloud.iter().enumerate() {
                for b in &cloud[i + 1..] {
                    max = max.max(a.dist_sq(b));
                }
            }
        } else {
            let b = crate::geom::AxisBox::bounding(cloud).expect("cloud nonempty");
            max = max.max(b.diameter() * b.diameter());
        }
    }
    max.sqrt()
}

const MATCHED_AUDIT_DEPTH: usize = 4;

/// Build the conjugacy from `source` to `target`. Both systems must share
/// the graph and be strongly-separation certified; the Lipschitz regime is
/// decided from the edge constants (matched takes precedence) and the
/// corresponding theoretical bounds are recorded.
pub fn build_phi<'a>(
    source: &'a GdifsSystem,
    source_approx: &'a AttractorApprox,
    target: &'a GdifsSystem,
    target_approx: &'a AttractorApprox,
    tolerance: f64,
    depth: usize,
) -> Result<ConjugacyMap<'a>> {
    if !source.same_graph(target) {
        return Err(Error::GraphMismatch);
    }
    let codebook = Codebook::new(source, source_approx, tolerance)?;
    let target_ssc = check_ssc(target, target_approx, tolerance)?;
    if target_ssc.verdict != SscVerdict::Certified {
        return Err(Error::SeparationNotCertified("target"));
    }

    let mut matched = true;
    let mut dominated = true;
    let mut first_failure = String::new();
    for (ei, e) in source.graph.edges().iter().enumerate() {
        let (sl, su) = source.map(ei).lipschitz_bounds();
        let (tl, tu) = target.map(ei).lipschitz_bounds();
        if (sl - tl).abs() > BOUND_MATCH_TOL || (su - tu).abs() > BOUND_MATCH_TOL {
            matched = false;
        }
        if tu > sl + BOUND_MATCH_TOL {
            dominated = false;
            if first_failure.is_empty() {
                first_failure = format!(
                    "edge {}: target upper bound {tu} exceeds source lower bound {sl}",
                    e.id
                );
            }
        }
    }

    let mut matched_violation_depth = None;
    let mut distortion_constant = 1.0;
    let regime = if matched {
        // composed bounds must match as well, up to the audit depth
        'outer: for p in 2..=MATCHED_AUDIT_DEPTH {
            for v in source.graph.vertices() {
                let paths = source.graph.enumerate_terminal_paths(v, p, p)?;
                for path in &paths {
                    let cs = crate::maps::compose(source, path);
                    let ct = crate::maps::compose(target, path);
                    if (cs.lower - ct.lower).abs() > 1e-9 || (cs.upper - ct.upper).abs() > 1e-9 {
                        matched_violation_depth = Some(p);
                        break 'outer;
                    }
                }
            }
        }
        if matched_violation_depth.is_some() {
            return Err(Error::HypothesisFailed(format!(
                "matched constants diverge at composition depth {}",
                matched_violation_depth.unwrap()
            )));
        }
        let bdp = bdp_profile(source, 8, BDP_DEFAULT_BUDGET, true, 0)?;
        if bdp.verdict != BdpVerdict::Bounded {
            return Err(Error::HypothesisFailed(
                "matched constants require bounded source distortion".into(),
            ));
        }
        distortion_constant = bdp.distortion_constant.expect("bounded verdict");
        PhiRegime::Matched
    } else if dominated {
        PhiRegime::Dominated
    } else {
        return Err(Error::HypothesisFailed(first_failure));
    };

    let source_gap = codebook
        .ssc
        .separation
        .global_gap
        .expect("certified system has at least two edges")
        .gap;
    let target_gap = target_ssc
        .separation
        .global_gap
        .expect("certified system has at least two edges")
        .gap;
    let source_diameter = cloud_diameter(source_approx);
    let target_diameter = cloud_diameter(target_approx);
    let lip_upper_bound = match regime {
        PhiRegime::Dominated => target_diameter / source_gap,
        PhiRegime::Matched => distortion_constant * target_diameter / source_gap,
    };
    let lip_lower_bound = match regime {
        PhiRegime::Dominated => None,
        PhiRegime::Matched => Some(target_gap / (distortion_constant * source_diameter)),
    };
    Ok(ConjugacyMap {
        source,
        source_approx,
        target,
        target_approx,
        regime,
        depth,
        source_gap,
        target_gap,
        source_diameter,
        target_diameter,
        distortion_constant,
        lip_upper_bound,
        lip_lower_bound,
        matched_violation_depth,
        codebook,
    })
}

impl ConjugacyMap<'_> {
    /// Decode `x` in the source and evaluate the address in the target.
    /// Within `(max target ratio)^depth * diam(B)` of the true image.
    pub fn apply(&self, x: &Point, start: Vertex) -> Result<Point> {
        let addr = self.codebook.address_of(x, start, self.depth)?;
        Ok(point_of(self.target, self.target_approx.seeds(), &addr))
    }

    pub fn address_of(&self, x: &Point, start: Vertex, depth: usize) -> Result<Address> {
        self.codebook.address_of(x, start, depth)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LipschitzAudit {
    pub regime: PhiRegime,
    pub n_pairs: usize,
    pub pairs_filtered: usize,
    pub seed: u64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub histogram: Vec<u64>,
    pub histogram_min: f64,
    pub histogram_max: f64,
    pub lip_upper_bound: f64,
    pub lip_lower_bound: Option<f64>,
    pub pass: bool,
}

/// Sample point pairs from the source clouds and audit the ratio
/// `|phi(x) - phi(x')| / |x - x'|` against the theoretical bounds (with 1%
/// headroom). Pairs closer than ten error bounds are filtered to keep the
/// ratio noise bounded.
pub fn empirical_lipschitz(
    conj: &ConjugacyMap<'_>,
    n_pairs: usize,
    seed: u64,
) -> Result<LipschitzAudit> {
    if n_pairs == 0 {
        return Err(Error::Config("need at least one sample pair".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n_vertices = conj.source.graph.vertex_count();
    let min_sep = 10.0 * conj.source_approx.error_bound;
    let mut ratios = Vec::with_capacity(n_pairs);
    let mut filtered = 0usize;
    let max_attempts = n_pairs.saturating_mul(100);
    let mut attempts = 0usize;
    while ratios.len() < n_pairs && attempts < max_attempts {
        attempts += 1;
        let v = Vertex(rng.random_range(1..=n_vertices));
        let cloud = conj.source_approx.cloud(v);
        if cloud.len() < 2 {
            filtered += 1;
            continue;
        }
        let i = rng.random_range(0..cloud.len());
        let j = rng.random_range(0..cloud.len());
        if i == j {
            filtered += 1;
            continue;
        }
        let (x, y) = (cloud[i], cloud[j]);
        let base = x.dist(&y);
        if base <= min_sep {
            filtered += 1;
            continue;
        }
        let fx = conj.apply(&x, v)?;
        let fy = conj.apply(&y, v)?;
        ratios.push(fx.dist(&fy) / base);
    }
    if ratios.is_empty() {
        return Err(Error::DegenerateSampling);
    }
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(0.0f64, f64::max);
    let mut histogram = vec![0u64; 16];
    let span = (max_ratio - min_ratio).max(f64::MIN_POSITIVE);
    for r in &ratios {
        let b = (((r - min_ratio) / span) * 16.0).floor() as usize;
        histogram[b.min(15)] += 1;
    }
    let mut pass = max_ratio <= conj.lip_upper_bound * (1.0 + 1e-2);
    if let Some(lb) = conj.lip_lower_bound {
        pass = pass && min_ratio >= lb * (1.0 - 1e-2);
    }
    Ok(LipschitzAudit {
        regime: conj.regime,
        n_pairs: ratios.len(),
        pairs_filtered: filtered,
        seed,
        min_ratio,
        max_ratio,
        histogram,
        histogram_min: min_ratio,
        histogram_max: max_ratio,
        lip_upper_bound: conj.lip_upper_bound,
        lip_lower_bound: conj.lip_lower_bound,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::compute_attractor;
    use crate::samples;

    const BUDGET: u128 = 1_000_000;
    const TOL: f64 = 1e-6;

    fn cantor_setup(ratio: f64, depth: usize) -> (GdifsSystem, AttractorApprox) {
        let sys = samples::cantor_system(ratio);
        let approx = compute_attractor(&sys, depth, BUDGET).unwrap();
        (sys, approx)
    }

    #[test]
    fn fixed_point_addresses() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        let a = cb
            .address_of(&Point([0.0, 0.0, 0.0]), Vertex(1), 6)
            .unwrap();
        assert_eq!(a.path.edge_ids(&sys.graph), vec![1, 1, 1, 1, 1, 1]);
        let b = cb
            .address_of(&Point([1.0, 0.0, 0.0]), Vertex(1), 6)
            .unwrap();
        assert_eq!(b.path.edge_ids(&sys.graph), vec![2, 2, 2, 2, 2, 2]);
    }

    #[test]
    fn two_thirds_address() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        let a = cb
            .address_of(&Point([2.0 / 3.0, 0.0, 0.0]), Vertex(1), 4)
            .unwrap();
        assert_eq!(a.path.edge_ids(&sys.graph), vec![2, 1, 1, 1]);
        // round trip through the evaluator
        let y = point_of(&sys, approx.seeds(), &a);
        assert!((y.0[0] - 2.0 / 3.0).abs() <= 3.0f64.powi(-4) + 2.0 * approx.error_bound);
    }

    #[test]
    fn point_of_constant_addresses() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let left = sys.graph.enumerate_paths(Vertex(1), Vertex(1), 20, 20).unwrap();
        let all_left = left
            .iter()
            .find(|p| p.edge_ids(&sys.graph).iter().all(|&id| id == 1))
            .unwrap();
        let x = point_of(&sys, approx.seeds(), &Address { path: all_left.clone() });
        assert!(x.0[0].abs() <= 3.0f64.powi(-20));
        let all_right = left
            .iter()
            .find(|p| p.edge_ids(&sys.graph).iter().all(|&id| id == 2))
            .unwrap();
        let y = point_of(&sys, approx.seeds(), &Address { path: all_right.clone() });
        assert!((y.0[0] - 1.0).abs() <= 3.0f64.powi(-20) + 1e-15);
    }

    #[test]
    fn round_trip_on_cloud_points() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        for p in approx.cloud(Vertex(1)) {
            let r = round_trip(&cb, &approx, p, Vertex(1), 8).unwrap();
            assert!(r <= 2.0 * approx.error_bound, "residual {r}");
        }
    }

    #[test]
    fn round_trip_of_one_third() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        let r = round_trip(&cb, &approx, &Point([1.0 / 3.0, 0.0, 0.0]), Vertex(1), 10)
            .unwrap();
        assert!(r <= 3.0f64.powi(-10) + 2.0 * approx.error_bound);
    }

    #[test]
    fn far_point_reports_large_residual_not_silent_success() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        let off = Point([0.5 + 10.0 * approx.error_bound, 0.0, 0.0]);
        match round_trip(&cb, &approx, &off, Vertex(1), 8) {
            Ok(r) => assert!(r > 2.0 * approx.error_bound),
            Err(Error::AmbiguousAddress { .. }) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn address_refused_without_separation() {
        let sys = samples::touching_pair();
        let approx = compute_attractor(&sys, 8, BUDGET).unwrap();
        assert!(matches!(
            Codebook::new(&sys, &approx, TOL),
            Err(Error::SeparationNotCertified(_))
        ));
    }

    #[test]
    fn monotone_address_refinement() {
        let (sys, approx) = cantor_setup(1.0 / 3.0, 8);
        let cb = Codebook::new(&sys, &approx, TOL).unwrap();
        let x = Point([0.7401, 0.0, 0.0]);
        let mut prev: Option<Address> = None;
        for m in 1..=8 {
            let a = cb.address_of(&x, Vertex(1), m).unwrap();
            if let Some(p) = &prev {
                assert_eq!(
                    &a.path.edge_indices()[..m - 1],
                    p.path.edge_indices(),
                    "depth {m} revised the prefix"
                );
            }
            prev = Some(a);
        }
    }

    #[test]
    fn phi_regimes_and_bounds() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let (tgt, tgt_approx) = cantor_setup(0.25, 8);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 8).unwrap();
        assert_eq!(conj.regime, PhiRegime::Dominated);
        assert!((conj.lip_upper_bound - 3.0).abs() < 0.01);

        // same system on both sides: matched regime, identity map
        let conj = build_phi(&src, &src_approx, &src, &src_approx, TOL, 8).unwrap();
        assert_eq!(conj.regime, PhiRegime::Matched);
        assert!((conj.distortion_constant - 1.0).abs() < 1e-9);
        for p in src_approx.cloud(Vertex(1)).iter().step_by(17) {
            let q = conj.apply(p, Vertex(1)).unwrap();
            assert!(q.dist(p) <= 1e-12);
        }

        // reversed direction fails both hypotheses
        match build_phi(&tgt, &tgt_approx, &src, &src_approx, TOL, 8) {
            Err(Error::HypothesisFailed(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
            Ok(_) => panic!("reversed direction must be rejected"),
        }
    }

    #[test]
    fn phi_fixed_points_correspond() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let (tgt, tgt_approx) = cantor_setup(0.25, 8);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 12).unwrap();
        let img0 = conj.apply(&Point([0.0, 0.0, 0.0]), Vertex(1)).unwrap();
        assert!(img0.0[0].abs() < 1e-6);
        let img1 = conj.apply(&Point([1.0, 0.0, 0.0]), Vertex(1)).unwrap();
        assert!((img1.0[0] - 1.0).abs() < 1e-6);
        let img13 = conj.apply(&Point([1.0 / 3.0, 0.0, 0.0]), Vertex(1)).unwrap();
        assert!((img13.0[0] - 0.25).abs() < 1e-5, "got {}", img13.0[0]);
    }

    #[test]
    fn phi_distinct_cloud_points_stay_distinct() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 6);
        let (tgt, tgt_approx) = cantor_setup(0.25, 6);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 6).unwrap();
        let mut images = Vec::new();
        for p in src_approx.cloud(Vertex(1)) {
            images.push(conj.apply(p, Vertex(1)).unwrap().0[0]);
        }
        images.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in images.windows(2) {
            assert!(w[1] - w[0] > 0.0, "collision in target images");
        }
    }

    #[test]
    fn functoriality_on_cylinder_points() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let (tgt, tgt_approx) = cantor_setup(0.25, 8);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 10).unwrap();
        let tol = 0.25f64.powi(10) + 4.0 * tgt_approx.error_bound;
        for p in src_approx.cloud(Vertex(1)).iter().step_by(13) {
            for ei in 0..2 {
                let sx = src.map(ei).apply(p);
                let lhs = conj.apply(&sx, Vertex(1)).unwrap();
                let rhs = tgt.map(ei).apply(&conj.apply(p, Vertex(1)).unwrap());
                assert!(lhs.dist(&rhs) <= tol, "lhs {lhs:?} rhs {rhs:?}");
            }
        }
    }

    #[test]
    fn identity_audit_ratio_one() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let conj = build_phi(&src, &src_approx, &src, &src_approx, TOL, 8).unwrap();
        let audit = empirical_lipschitz(&conj, 500, 11).unwrap();
        assert!((audit.min_ratio - 1.0).abs() <= 1e-9);
        assert!((audit.max_ratio - 1.0).abs() <= 1e-9);
        assert!(audit.pass);
    }

    #[test]
    fn cantor_pair_audit_respects_bound() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let (tgt, tgt_approx) = cantor_setup(0.25, 8);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 8).unwrap();
        let audit = empirical_lipschitz(&conj, 2_000, 7).unwrap();
        assert!(audit.pass);
        assert!(audit.max_ratio <= 3.0 * 1.01);
    }

    #[test]
    fn audit_is_deterministic() {
        let (src, src_approx) = cantor_setup(1.0 / 3.0, 8);
        let (tgt, tgt_approx) = cantor_setup(0.25, 8);
        let conj = build_phi(&src, &src_approx, &tgt, &tgt_approx, TOL, 8).unwrap();
        let a = empirical_lipschitz(&conj, 300, 42).unwrap();
        let b = empirical_lipschitz(&conj, 300, 42).unwrap();
        assert_eq!(a.min_ratio, b.min_ratio);
        assert_eq!(a.max_ratio, b.max_ratio);
        assert_eq!(a.histogram, b.histogram);
    }
}
