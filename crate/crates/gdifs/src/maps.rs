//! Per-edge contractions, certified Lipschitz bounds, path compositions and
//! bounded-distortion profiling.
//!
//! Bounds of composed maps are recomputed from singular values of the
//! product matrix, never by multiplying per-edge bounds: per-edge products
//! are loose exactly where bounded distortion fails.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Point, SquareMat};
use crate::graph::Path;
use crate::system::GdifsSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Similarity,
    Affine,
}

/// An injective affine contraction `x -> M x + t` with certified lower and
/// upper Lipschitz constants (the extreme singular values of `M`).
#[derive(Clone, Debug)]
pub struct ContractionMap {
    pub kind: MapKind,
    pub linear: SquareMat,
    pub translation: Point,
    lower: f64,
    upper: f64,
}

impl ContractionMap {
    pub fn similarity(
        dim: usize,
        ratio: f64,
        rotation: f64,
        reflect: bool,
        translation: Point,
    ) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidBounds(ratio, ratio));
        }
        let linear = match dim {
            1 => {
                let mut m = SquareMat::scalar(1, if reflect { -ratio } else { ratio })?;
                m.dim = 1;
                m
            }
            2 => SquareMat::planar_similarity(ratio, rotation, reflect),
            3 => {
                if rotation != 0.0 {
                    return Err(Error::Config(
                        "3-d similarities support only ratio and reflection; use an affine map for rotations".into(),
                    ));
                }
                let mut m = SquareMat::scalar(3, ratio)?;
                if reflect {
                    m.m[2][2] = -ratio;
                }
                m
            }
            other => return Err(Error::UnsupportedDimension(other)),
        };
        Ok(ContractionMap {
            kind: MapKind::Similarity,
            linear,
            translation,
            lower: ratio,
            upper: ratio,
        })
    }

    pub fn affine(linear: SquareMat, translation: Point) -> Result<Self> {
        let sv = linear.singular_values();
        let lower = sv[0];
        let upper = sv[sv.len() - 1];
        if lower <= 0.0 {
            return Err(Error::NonInjective(lower));
        }
        if upper >= 1.0 {
            return Err(Error::NonContractive(upper));
        }
        Ok(ContractionMap {
            kind: MapKind::Affine,
            linear,
            translation,
            lower,
            upper,
        })
    }

    /// Replace the certified bounds with user-supplied values, for map
    /// plugins whose constants are known externally.
    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper && upper < 1.0) {
            return Err(Error::InvalidBounds(lower, upper));
        }
        self.lower = lower;
        self.upper = upper;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.linear.dim
    }

    /// `(Lip^-, Lip^+)` of the map.
    pub fn lipschitz_bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn apply(&self, p: &Point) -> Point {
        self.linear.apply(p).add(&self.translation)
    }

    /// Inverse image; defined since maps are injective.
    pub fn apply_inverse(&self, p: &Point) -> Result<Point> {
        self.linear.solve(&p.sub(&self.translation))
    }

    /// Fixed point `(I - M)^{-1} t`; lies in the attractor piece of the
    /// map's source vertex whenever the map closes a cycle.
    pub fn fixed_point(&self) -> Result<Point> {
        let d = self.linear.dim;
        let mut a = SquareMat::identity(d)?;
        for i in 0..d {
            for j in 0..d {
                a.m[i][j] -= self.linear.m[i][j];
            }
        }
        a.solve(&self.translation)
    }
}

/// Composition of the maps along a path, with bounds recertified from the
/// product matrix. Note that `lower` may exceed the product of per-edge
/// lower bounds; only `lower <= upper <= prod(upper_e)` is guaranteed.
#[derive(Clone, Debug)]
pub struct ComposedMap {
    pub path: Path,
    pub linear: SquareMat,
    pub translation: Point,
    pub lower: f64,
    pub upper: f64,
}

impl ComposedMap {
    pub fn apply(&self, p: &Point) -> Point {
        self.linear.apply(p).add(&self.translation)
    }

    pub fn fixed_point(&self) -> Result<Point> {
        let d = self.linear.dim;
        let mut a = SquareMat::identity(d)?;
        for i in 0..d {
            for j in 0..d {
                a.m[i][j] -= self.linear.m[i][j];
            }
        }
        a.solve(&self.translation)
    }
}

/// Compose the edge maps along `path` in application order: the last edge's
/// map acts first, matching the chaining of attractor pieces.
pub fn compose(system: &GdifsSystem, path: &Path) -> ComposedMap {
    let (linear, translation) = compose_affine(system, path.edge_indices());
    let sv = linear.singular_values();
    ComposedMap {
        path: path.clone(),
        linear,
        translation,
        lower: sv[0],
        upper: sv[sv.len() - 1],
    }
}

/// Affine part only, without the singular-value pass.
pub(crate) fn compose_affine(system: &GdifsSystem, edge_indices: &[usize]) -> (SquareMat, Point) {
    let mut linear = SquareMat::identity(system.dim).expect("dim validated");
    let mut translation = Point::zero();
    for &ei in edge_indices {
        let map = system.map(ei);
        // acc := acc o map
        translation = linear.apply(&map.translation).add(&translation);
        linear = linear.mul(&map.linear);
    }
    (linear, translation)
}

#[derive(Clone, Debug, Serialize)]
pub struct BdpDepthSample {
    pub depth: usize,
    /// Max over audited depth-`depth` paths of Lip^+ / Lip^-.
    pub max_distortion: f64,
    pub paths_audited: u64,
    pub sampled: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BdpVerdict {
    Bounded,
    Unbounded,
}

/// Distortion audit across depths: bounded iff the log-distortion slope over
/// the deep half of the audited window is flat.
#[derive(Clone, Debug, Serialize)]
pub struct BdpReport {
    pub per_depth: Vec<BdpDepthSample>,
    pub slope: f64,
    pub verdict: BdpVerdict,
    /// Bounded case: distortion constant, the max audited ratio.
    pub distortion_constant: Option<f64>,
    /// Unbounded case: per-level growth factor exp(slope).
    pub growth_rate: Option<f64>,
    pub slope_threshold: f64,
    pub seed: u64,
}

pub const BDP_DEFAULT_BUDGET: u128 = 100_000;
pub const BDP_SLOPE_THRESHOLD: f64 = 1e-3;

/// Audit distortion ratios at depths `1..=max_depth`. Depths whose path
/// count exceeds `budget` are sampled uniformly (path unranking under a
/// seeded generator) when `allow_sampling` is set, and refused otherwise.
pub fn bdp_profile(
    system: &GdifsSystem,
    max_depth: usize,
    budget: u128,
    allow_sampling: bool,
    seed: u64,
) -> Result<BdpReport> {
    use rand::Rng;
    use rand::SeedableRng;

    if max_depth > crate::graph::DEFAULT_PATH_CAP {
        return Err(Error::DepthCap {
            depth: max_depth,
            cap: crate::graph::DEFAULT_PATH_CAP,
        });
    }
    let mut per_depth = Vec::with_capacity(max_depth);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for p in 1..=max_depth {
        let total: u128 = system
            .graph
            .vertices()
            .map(|v| system.graph.path_count_from(v, p))
            .sum();
        let mut max_rho = 1.0f64;
        let mut audited = 0u64;
        let sampled = total > budget;
        if sampled && !allow_sampling {
            return Err(Error::PathBudgetExceeded {
                needed: total,
                budget,
            });
        }
        if sampled {
            // sample per initial vertex proportionally, at least one draw each
            let per_vertex: Vec<u128> = system
                .graph
                .vertices()
                .map(|v| system.graph.path_count_from(v, p))
                .collect();
            let want = budget.min(total) as u64;
            for (vi, &count) in per_vertex.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let share = ((want as u128 * count) / total).max(1);
                for _ in 0..share {
                    let rank = rng.random_range(0..count);
                    let path = system.graph.unrank_path(crate::graph::Vertex(vi + 1), p, rank);
                    let cm = compose(system, &path);
                    max_rho = max_rho.max(cm.upper / cm.lower);
                    audited += 1;
                }
            }
        } else {
            for v in system.graph.vertices() {
                let paths = system.graph.enumerate_terminal_paths(v, p, max_depth)?;
                for path in &paths {
                    let cm = compose(system, path);
                    max_rho = max_rho.max(cm.upper / cm.lower);
                    audited += 1;
                }
            }
        }
        per_depth.push(BdpDepthSample {
            depth: p,
            max_distortion: max_rho,
            paths_audited: audited,
            sampled,
        });
    }

    // least-squares slope of log(rho_p) against p over the deep window
    let window_start = max_depth.div_ceil(2);
    let pts: Vec<(f64, f64)> = per_depth
        .iter()
        .filter(|s| s.depth >= window_start)
        .map(|s| (s.depth as f64, s.max_distortion.ln()))
        .collect();
    let slope = least_squares_slope(&pts);
    let bounded = slope <= BDP_SLOPE_THRESHOLD;
    let max_overall = per_depth
        .iter()
        .map(|s| s.max_distortion)
        .fold(1.0f64, f64::max);
    Ok(BdpReport {
        per_depth,
        slope,
        verdict: if bounded {
            BdpVerdict::Bounded
        } else {
            BdpVerdict::Unbounded
        },
        distortion_constant: bounded.then_some(max_overall),
        growth_rate: (!bounded).then(|| slope.exp()),
        slope_threshold: BDP_SLOPE_THRESHOLD,
        seed,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples as test_systems;

    #[test]
    fn similarity_bounds_are_the_ratio() {
        let m = ContractionMap::similarity(1, 1.0 / 3.0, 0.0, false, Point::zero()).unwrap();
        let (lo, hi) = m.lipschitz_bounds();
        assert_eq!(lo, 1.0 / 3.0);
        assert_eq!(hi, 1.0 / 3.0);
    }

    #[test]
    fn diagonal_affine_bounds() {
        // S(x, y) = (x/2, y/3): bounds (1/3, 1/2)
        let linear =
            SquareMat::from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]).unwrap();
        let m = ContractionMap::affine(linear, Point::zero()).unwrap();
        let (lo, hi) = m.lipschitz_bounds();
        assert!((lo - 1.0 / 3.0).abs() < 1e-12);
        assert!((hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_similarity_bounds() {
        let m = ContractionMap::similarity(
            2,
            0.5,
            std::f64::consts::FRAC_PI_4,
            false,
            Point::zero(),
        )
        .unwrap();
        let (lo, hi) = m.lipschitz_bounds();
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((hi - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_injective_and_non_contractive_rejected() {
        let singular = SquareMat::from_rows(&[vec![0.5, 0.0], vec![0.5, 0.0]]).unwrap();
        assert!(matches!(
            ContractionMap::affine(singular, Point::zero()),
            Err(Error::NonInjective(_))
        ));
        let expanding = SquareMat::scalar(2, 1.2).unwrap();
        assert!(matches!(
            ContractionMap::affine(expanding, Point::zero()),
            Err(Error::NonContractive(_))
        ));
    }

    #[test]
    fn composed_similarity_ratios_multiply() {
        let sys = test_systems::two_similarities_one_vertex(1.0 / 3.0, 0.5);
        let path = sys
            .graph
            .enumerate_paths(crate::graph::Vertex(1), crate::graph::Vertex(1), 2, 20)
            .unwrap()
            .into_iter()
            .find(|p| p.edge_ids(&sys.graph) == vec![1, 2])
            .unwrap();
        let cm = compose(&sys, &path);
        assert!((cm.lower - 1.0 / 6.0).abs() < 1e-12);
        assert!((cm.upper - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn remark_map_fourth_iterate() {
        let sys = test_systems::bdp_remark_system();
        let path = sys
            .graph
            .enumerate_terminal_paths(crate::graph::Vertex(1), 4, 20)
            .unwrap()
            .pop()
            .unwrap();
        let cm = compose(&sys, &path);
        assert!((cm.lower - 3.0f64.powi(-4)).abs() < 1e-15);
        assert!((cm.upper - 2.0f64.powi(-4)).abs() < 1e-15);
    }

    #[test]
    fn bdp_remark_profile_unbounded() {
        let sys = test_systems::bdp_remark_system();
        let report = bdp_profile(&sys, 10, BDP_DEFAULT_BUDGET, false, 0).unwrap();
        for s in &report.per_depth {
            let expect = 1.5f64.powi(s.depth as i32);
            assert!((s.max_distortion / expect - 1.0).abs() < 1e-9);
        }
        assert_eq!(report.verdict, BdpVerdict::Unbounded);
        assert!((report.growth_rate.unwrap() - 1.5).abs() < 1e-6);
    }

    #[test]
    fn similarity_system_bounded_with_unit_constant() {
        let sys = test_systems::cantor_system(1.0 / 3.0);
        let report = bdp_profile(&sys, 8, BDP_DEFAULT_BUDGET, false, 0).unwrap();
        assert_eq!(report.verdict, BdpVerdict::Bounded);
        assert!((report.distortion_constant.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_diagonal_similarities_bounded() {
        let sys = test_systems::two_similarities_one_vertex(0.5, 0.25);
        let report = bdp_profile(&sys, 8, BDP_DEFAULT_BUDGET, false, 0).unwrap();
        assert_eq!(report.verdict, BdpVerdict::Bounded);
        assert!((report.distortion_constant.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composed_bounds_hold_on_random_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let sys = test_systems::bdp_remark_system();
        let path = sys
            .graph
            .enumerate_terminal_paths(crate::graph::Vertex(1), 5, 20)
            .unwrap()
            .pop()
            .unwrap();
        let cm = compose(&sys, &path);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let x = Point([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0]);
            let y = Point([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0]);
            let lhs = cm.apply(&x).dist(&cm.apply(&y));
            let base = x.dist(&y);
            assert!(lhs <= cm.upper * base + 1e-9);
            assert!(lhs >= cm.lower * base - 1e-9);
        }
    }
}
