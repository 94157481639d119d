//! Box-counting dimension estimation and the spectral-radius similarity
//! dimension for similarity systems.
//!
//! Grid-occupancy counting stands in for covers by sets of small diameter;
//! the constant offset cancels in the log-log slope. Scales must stay above
//! four times the approximation error so the estimate reflects the
//! attractor rather than the sampling.

use std::collections::HashSet;

use serde::Serialize;

use crate::attractor::AttractorApprox;
use crate::error::{Error, Result};
use crate::geom::{AxisBox, Point, GRID_SNAP};
use crate::maps::least_squares_slope;
use crate::separation::OpenSetTuple;
use crate::system::GdifsSystem;

/// Occupied-cell counts of the axis-aligned grid anchored at the cloud's
/// bounding-box corner, one count per scale. Scales below
/// `resolution_floor` are refused.
pub fn box_counts(
    points: &[Point],
    dim: usize,
    scales: &[f64],
    resolution_floor: f64,
) -> Result<Vec<u64>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let bounds = AxisBox::bounding(points)?;
    let anchor = bounds.lo;
    let mut counts = Vec::with_capacity(scales.len());
    for &delta in scales {
        if delta < resolution_floor {
            return Err(Error::ScaleBelowFloor(delta, resolution_floor));
        }
        if delta <= 0.0 {
            return Err(Error::Config("scale must be positive".into()));
        }
        // grid covers the bounding box; the outermost cells are closed, so
        // points on the far boundary land in the last cell
        let mut last = [0i64; 3];
        for axis in 0..dim {
            let span = bounds.hi.0[axis] - anchor.0[axis];
            last[axis] = ((span / delta - GRID_SNAP).ceil() as i64 - 1).max(0);
        }
        let mut cells: HashSet<[i64; 3]> = HashSet::new();
        for p in points {
            let mut c = [0i64; 3];
            for axis in 0..dim {
                let q = ((p.0[axis] - anchor.0[axis]) / delta + GRID_SNAP).floor() as i64;
                c[axis] = q.min(last[axis]);
            }
            cells.insert(c);
        }
        counts.push(cells.len() as u64);
    }
    Ok(counts)
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log N against -log delta.
    pub slope: f64,
    /// Extremes of the consecutive two-point slopes.
    pub lower: f64,
    pub upper: f64,
    /// RMS residual of the fit in log space.
    pub residual: f64,
}

/// Regression estimate of the box dimension from counts at four or more
/// strictly decreasing scales.
pub fn box_dimension(scales: &[f64], counts: &[u64]) -> Result<DimensionEstimate> {
    if scales.len() < 4 {
        return Err(Error::TooFewScales(4, scales.len()));
    }
    if scales.len() != counts.len() {
        return Err(Error::Config("scales and counts differ in length".into()));
    }
    for w in scales.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config("scales must be strictly decreasing".into()));
        }
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(Error::EmptyPointSet);
    }
    let pts: Vec<(f64, f64)> = scales
        .iter()
        .zip(counts.iter())
        .map(|(&d, &n)| (-d.ln(), (n as f64).ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    let mut lower = f64::INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for w in pts.windows(2) {
        let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        lower = lower.min(s);
        upper = upper.max(s);
    }
    // the regression slope is a weighted mean of the pairwise slopes; keep
    // the bracket valid against roundoff when all slopes coincide
    lower = lower.min(slope);
    upper = upper.max(slope);
    let n = pts.len() as f64;
    let mean_x: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let intercept = mean_y - slope * mean_x;
    let residual = (pts
        .iter()
        .map(|p| {
            let e = p.1 - (slope * p.0 + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DimensionEstimate {
        scales: scales.to_vec(),
        counts: counts.to_vec(),
        slope,
        lower,
        upper,
        residual,
    })
}

/// Spectral radius of a nonnegative matrix, by power iteration on `M + I`
/// (the shift makes periodic irreducible matrices converge too).
fn spectral_radius(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut lambda = 0.0f64;
    for _ in 0..100_000 {
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = x[i]; // + I
            for k in 0..n {
                acc += m[i][k] * x[k];
            }
            y[i] = acc;
        }
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for v in y.iter_mut() {
            *v /= norm;
        }
        let new_lambda = norm;
        let done = (new_lambda - lambda).abs() <= 1e-14 * new_lambda.max(1.0);
        lambda = new_lambda;
        x = y;
        if done {
            break;
        }
    }
    lambda - 1.0
}

/// The exponent at which the spectral radius of the similarity-ratio
/// matrix `M(s)[i][k] = sum over edges i -> k of ratio^s` equals one,
/// located by bisection on `[0, d]`. Strictly decreasing in `s` for
/// strongly connected systems, so the root is unique.
pub fn similarity_dimension(system: &GdifsSystem) -> Result<f64> {
    for (ei, e) in system.graph.edges().iter().enumerate() {
        let m = system.map(ei);
        if m.kind != crate::maps::MapKind::Similarity {
            return Err(Error::NonSimilarity(e.id));
        }
    }
    if !system.graph.is_strongly_connected()? {
        return Err(Error::NotStronglyConnected);
    }
    let n = system.graph.vertex_count();
    let rho_at = |s: f64| -> f64 {
        let mut m = vec![vec![0.0f64; n]; n];
        for (ei, e) in system.graph.edges().iter().enumerate() {
            let ratio = system.map(ei).lipschitz_bounds().1;
            m[e.source.0 - 1][e.target.0 - 1] += ratio.powf(s);
        }
        spectral_radius(&m)
    };
    let (mut lo, mut hi) = (0.0f64, system.dim as f64);
    let rho_lo = rho_at(lo);
    if (rho_lo - 1.0).abs() <= 1e-12 {
        return Ok(0.0);
    }
    if rho_lo < 1.0 {
        return Err(Error::BracketFailure { s: lo, rho: rho_lo });
    }
    let rho_hi = rho_at(hi);
    if rho_hi > 1.0 {
        return Err(Error::BracketFailure { s: hi, rho: rho_hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if rho_at(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEqualityReport {
    pub slopes: Vec<f64>,
    pub max_pairwise_difference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const SLOPE_TOLERANCE: f64 = 0.05;

/// Per-vertex box-dimension slopes; strongly connected systems must agree
/// across vertices within the slope tolerance.
pub fn check_vertex_dimension_equality(
    system: &GdifsSystem,
    approx: &AttractorApprox,
    scales: &[f64],
) -> Result<DimensionEqualityReport> {
    if !system.graph.is_strongly_connected()? {
        return Err(Error::NotStronglyConnected);
    }
    let floor = 4.0 * approx.error_bound;
    let mut slopes = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        let counts = box_counts(approx.cloud(v), system.dim, scales, floor)?;
        slopes.push(box_dimension(scales, &counts)?.slope);
    }
    let mut max_diff = 0.0f64;
    for i in 0..slopes.len() {
        for j in (i + 1)..slopes.len() {
            max_diff = max_diff.max((slopes[i] - slopes[j]).abs());
        }
    }
    Ok(DimensionEqualityReport {
        slopes,
        max_pairwise_difference: max_diff,
        tolerance: SLOPE_TOLERANCE,
        pass: max_diff <= SLOPE_TOLERANCE,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictedDimension {
    pub vertex: usize,
    pub full_slope: f64,
    pub restricted_slope: Option<f64>,
    pub restricted_points: usize,
    pub nonempty: bool,
    /// Nonempty restrictions must match the full slope within tolerance;
    /// empty restrictions pass vacuously.
    pub pass: bool,
}

/// Box-dimension slopes of each cloud restricted to the strict interior of
/// its open set, against the unrestricted slopes.
pub fn dim_restricted(
    system: &GdifsSystem,
    approx: &AttractorApprox,
    open_sets: &OpenSetTuple,
    scales: &[f64],
) -> Result<Vec<RestrictedDimension>> {
    if open_sets.len() != system.graph.vertex_count() {
        return Err(Error::InvalidOpenSets(format!(
            "tuple has {} vertices, system has {}",
            open_sets.len(),
            system.graph.vertex_count()
        )));
    }
    let floor = 4.0 * approx.error_bound;
    let mut out = Vec::with_capacity(system.graph.vertex_count());
    for v in system.graph.vertices() {
        let cloud = approx.cloud(v);
        let counts = box_counts(cloud, system.dim, scales, floor)?;
        let full_slope = box_dimension(scales, &counts)?.slope;
        let restricted: Vec<Point> = cloud
            .iter()
            .filter(|p| open_sets.contains_strict(v, p, system.dim))
            .copied()
            .collect();
        let nonempty = !restricted.is_empty();
        let restricted_slope = if nonempty {
            let counts = box_counts(&restricted, system.dim, scales, floor)?;
            Some(box_dimension(scales, &counts)?.slope)
        } else {
            None
        };
        let pass = match restricted_slope {
            Some(s) => (s - full_slope).abs() <= SLOPE_TOLERANCE,
            None => true,
        };
        out.push(RestrictedDimension {
            vertex: v.0,
            full_slope,
            restricted_slope,
            restricted_points: restricted.len(),
            nonempty,
            pass,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::compute_attractor;
    use crate::samples;

    const BUDGET: u128 = 1_000_000;

    #[test]
    fn unit_square_counts() {
        // dense grid over the unit square
        let mut pts = Vec::new();
        for i in 0..=64 {
            for j in 0..=64 {
                pts.push(Point([i as f64 / 64.0, j as f64 / 64.0, 0.0]));
            }
        }
        let counts = box_counts(&pts, 2, &[1.0 / 8.0], 0.0).unwrap();
        assert_eq!(counts[0], 64);
    }

    #[test]
    fn single_point_counts_one() {
        let pts = vec![Point([0.4, 0.0, 0.0])];
        let counts = box_counts(&pts, 1, &[0.5, 0.1, 0.01], 0.0).unwrap();
        assert_eq!(counts, vec![1, 1, 1]);
    }

    #[test]
    fn cantor_counts_are_powers_of_two() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let scales: Vec<f64> = (3..=7).map(|k| 3.0f64.powi(-k)).collect();
        let counts = box_counts(
            approx.cloud(crate::graph::Vertex(1)),
            1,
            &scales,
            4.0 * approx.error_bound,
        )
        .unwrap();
        // oracle: brute-force occupancy over level-k construction intervals
        for (k, &c) in (3..=7).zip(counts.iter()) {
            assert_eq!(c, 1 << k, "count at scale 3^-{k}");
        }
    }

    #[test]
    fn scale_floor_enforced() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let approx = compute_attractor(&sys, 8, BUDGET).unwrap();
        let err = box_counts(
            approx.cloud(crate::graph::Vertex(1)),
            1,
            &[3.0f64.powi(-7)],
            4.0 * approx.error_bound,
        );
        assert!(matches!(err, Err(Error::ScaleBelowFloor(..))));
    }

    #[test]
    fn cantor_slope_matches_log_ratio() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let scales: Vec<f64> = (3..=7).map(|k| 3.0f64.powi(-k)).collect();
        let counts = box_counts(
            approx.cloud(crate::graph::Vertex(1)),
            1,
            &scales,
            4.0 * approx.error_bound,
        )
        .unwrap();
        let est = box_dimension(&scales, &counts).unwrap();
        let expect = 2.0f64.ln() / 3.0f64.ln();
        assert!((est.slope - expect).abs() < 0.02);
        assert!(est.lower <= est.slope && est.slope <= est.upper);
    }

    #[test]
    fn filled_square_slope_two() {
        let sys = samples::square_tiling();
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let scales: Vec<f64> = (3..=6).map(|k| 2.0f64.powi(-k)).collect();
        let counts = box_counts(
            approx.cloud(crate::graph::Vertex(1)),
            2,
            &scales,
            4.0 * approx.error_bound,
        )
        .unwrap();
        let est = box_dimension(&scales, &counts).unwrap();
        assert!((est.slope - 2.0).abs() < 0.02);
    }

    #[test]
    fn single_point_slope_zero() {
        let counts = vec![1u64, 1, 1, 1];
        let scales = vec![0.5, 0.25, 0.125, 0.0625];
        let est = box_dimension(&scales, &counts).unwrap();
        assert_eq!(est.slope, 0.0);
    }

    #[test]
    fn too_few_scales_rejected() {
        assert!(matches!(
            box_dimension(&[0.5, 0.25, 0.125], &[1, 1, 1]),
            Err(Error::TooFewScales(4, 3))
        ));
    }

    #[test]
    fn similarity_dimension_cantor() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let s = similarity_dimension(&sys).unwrap();
        assert!((s - 2.0f64.ln() / 3.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn similarity_dimension_single_loop_zero() {
        let sys = GdifsSystem::assemble(
            1,
            1,
            vec![(
                crate::graph::Edge {
                    id: 1,
                    source: crate::graph::Vertex(1),
                    target: crate::graph::Vertex(1),
                },
                crate::maps::ContractionMap::similarity(1, 0.5, 0.0, false, Point::zero())
                    .unwrap(),
            )],
        )
        .unwrap();
        assert_eq!(similarity_dimension(&sys).unwrap(), 0.0);
    }

    #[test]
    fn similarity_dimension_two_vertex_root() {
        // frozen root of rho([[2^-s, 4^-s], [3^-s, 0]]) = 1, computed by an
        // independent characteristic-polynomial bisection
        let sys = samples::fibonacci_system();
        let s = similarity_dimension(&sys).unwrap();
        let frozen = 0.4965173325451844;
        assert!((s - frozen).abs() < 1e-9, "s = {s}");
        // spot-check via the closed-form 2x2 spectral radius
        let rho = |s: f64| {
            let a = 2.0f64.powf(-s);
            let b = 4.0f64.powf(-s);
            let c = 3.0f64.powf(-s);
            (a + (a * a + 4.0 * b * c).sqrt()) / 2.0
        };
        assert!((rho(s) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn similarity_dimension_rejects_affine() {
        let sys = samples::bdp_remark_system();
        assert!(matches!(
            similarity_dimension(&sys),
            Err(Error::NonSimilarity(1))
        ));
    }

    #[test]
    fn similarity_dimension_bracket_failure_when_overfull() {
        // four maps of ratio 1/2 on the line: the ratio matrix at s = 1
        // still has spectral radius 2
        let mk = |t: f64| {
            crate::maps::ContractionMap::similarity(1, 0.5, 0.0, false, Point([t, 0.0, 0.0]))
                .unwrap()
        };
        let parts = (0..4)
            .map(|i| {
                (
                    crate::graph::Edge {
                        id: i as u64 + 1,
                        source: crate::graph::Vertex(1),
                        target: crate::graph::Vertex(1),
                    },
                    mk(i as f64),
                )
            })
            .collect();
        let sys = GdifsSystem::assemble(1, 1, parts).unwrap();
        assert!(matches!(
            similarity_dimension(&sys),
            Err(Error::BracketFailure { .. })
        ));
    }

    #[test]
    fn vertex_dimension_equality_cantor_trivial() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let scales: Vec<f64> = (3..=7).map(|k| 3.0f64.powi(-k)).collect();
        let rep = check_vertex_dimension_equality(&sys, &approx, &scales).unwrap();
        assert_eq!(rep.max_pairwise_difference, 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn non_strongly_connected_refused() {
        let mk = |t: f64| {
            crate::maps::ContractionMap::similarity(1, 0.4, 0.0, false, Point([t, 0.0, 0.0]))
                .unwrap()
        };
        let sys = GdifsSystem::assemble(
            1,
            2,
            vec![
                (
                    crate::graph::Edge {
                        id: 1,
                        source: crate::graph::Vertex(1),
                        target: crate::graph::Vertex(2),
                    },
                    mk(0.0),
                ),
                (
                    crate::graph::Edge {
                        id: 2,
                        source: crate::graph::Vertex(2),
                        target: crate::graph::Vertex(2),
                    },
                    mk(0.5),
                ),
            ],
        )
        .unwrap();
        let approx = compute_attractor(&sys, 6, BUDGET).unwrap();
        assert!(matches!(
            check_vertex_dimension_equality(&sys, &approx, &[0.1, 0.05, 0.025, 0.0125]),
            Err(Error::NotStronglyConnected)
        ));
    }

    #[test]
    fn restricted_dimension_branches() {
        let sys = samples::square_tiling();
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let scales: Vec<f64> = (3..=6).map(|k| 2.0f64.powi(-k)).collect();
        let inside = OpenSetTuple::new(
            vec![vec![AxisBox::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap()]],
            2,
        )
        .unwrap();
        let rep = dim_restricted(&sys, &approx, &inside, &scales).unwrap();
        assert!(rep[0].nonempty);
        assert!(rep[0].pass);
        assert!((rep[0].restricted_slope.unwrap() - rep[0].full_slope).abs() <= 0.05);

        let disjoint = OpenSetTuple::new(
            vec![vec![AxisBox::from_bounds(&[2.0, 2.0], &[3.0, 3.0]).unwrap()]],
            2,
        )
        .unwrap();
        let rep = dim_restricted(&sys, &approx, &disjoint, &scales).unwrap();
        assert!(!rep[0].nonempty);
        assert!(rep[0].restricted_slope.is_none());
        assert!(rep[0].pass); // vacuous branch
    }

    #[test]
    fn monotone_counts_for_nested_clouds() {
        let sys = samples::cantor_system(1.0 / 3.0);
        let approx = compute_attractor(&sys, 9, BUDGET).unwrap();
        let cloud = approx.cloud(crate::graph::Vertex(1));
        // subset keeps cloud[0] = 0, the bounding-box corner, so both
        // counts run on the same lattice
        let subset: Vec<Point> = cloud.iter().step_by(3).copied().collect();
        assert_eq!(subset[0].0[0], 0.0);
        let scales: Vec<f64> = (3..=7).map(|k| 3.0f64.powi(-k)).collect();
        let full = box_counts(cloud, 1, &scales, 0.0).unwrap();
        let sub = box_counts(&subset, 1, &scales, 0.0).unwrap();
        for (f, s) in full.iter().zip(sub.iter()) {
            assert!(s <= f);
        }
    }
}
