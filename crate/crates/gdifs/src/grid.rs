//! Uniform-grid nearest-neighbour index over a finite point cloud.
//!
//! Bucketed CSR layout, expanding ring search. Exact: the search widens the
//! scanned shell until no unscanned cell can beat the current best.

use crate::geom::Point;

pub struct GridIndex<'a> {
    origin: [f64; 3],
    cell: f64,
    dims: [usize; 3],
    d: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
    points: &'a [Point],
}

impl<'a> GridIndex<'a> {
    /// Build over a non-empty cloud. `dim` is the ambient dimension; unused
    /// coordinates must be zero (as produced everywhere in this crate).
    pub fn build(points: &'a [Point], dim: usize) -> GridIndex<'a> {
        assert!(!points.is_empty(), "grid index needs a non-empty cloud");
        let mut lo = points[0].0;
        let mut hi = points[0].0;
        for p in points {
            for i in 0..dim {
                lo[i] = lo[i].min(p.0[i]);
                hi[i] = hi[i].max(p.0[i]);
            }
        }
        // target roughly one point per cell, capped to keep the bucket
        // table linear in the cloud size
        let n = points.len();
        let mut extent = 0.0f64;
        for i in 0..dim {
            extent = extent.max(hi[i] - lo[i]);
        }
        let per_axis = ((n as f64).powf(1.0 / dim as f64).ceil() as usize).clamp(1, 2048);
        let cell = if extent > 0.0 {
            extent / per_axis as f64
        } else {
            1.0
        };
        let mut dims = [1usize; 3];
        for i in 0..dim {
            let span = hi[i] - lo[i];
            dims[i] = ((span / cell).floor() as usize + 1).max(1);
        }
        let total: usize = dims.iter().product();
        let mut counts = vec![0u32; total + 1];
        let idx_of = |p: &Point| -> usize {
            let mut idx = 0usize;
            for i in (0..dim).rev() {
                let c = (((p.0[i] - lo[i]) / cell) as usize).min(dims[i] - 1);
                idx = idx * dims[i] + c;
            }
            idx
        };
        for p in points {
            counts[idx_of(p) + 1] += 1;
        }
        for i in 1..=total {
            counts[i] += counts[i - 1];
        }
        let mut items = vec![0u32; n];
        let mut cursor = counts.clone();
        for (pi, p) in points.iter().enumerate() {
            let c = idx_of(p);
            items[cursor[c] as usize] = pi as u32;
            cursor[c] += 1;
        }
        GridIndex {
            origin: lo,
            cell,
            dims,
            d: dim,
            starts: counts,
            items,
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn cell_coord(&self, q: &Point) -> [i64; 3] {
        let mut c = [0i64; 3];
        for i in 0..self.d {
            c[i] = ((q.0[i] - self.origin[i]) / self.cell).floor() as i64;
        }
        c
    }

    fn flat(&self, c: &[i64; 3]) -> Option<usize> {
        let mut idx = 0usize;
        for i in (0..self.d).rev() {
            if c[i] < 0 || c[i] >= self.dims[i] as i64 {
                return None;
            }
            idx = idx * self.dims[i] + c[i] as usize;
        }
        Some(idx)
    }

    fn scan_cell(&self, c: &[i64; 3], q: &Point, best: &mut f64) {
        if let Some(flat) = self.flat(c) {
            let (a, b) = (self.starts[flat] as usize, self.starts[flat + 1] as usize);
            for &pi in &self.items[a..b] {
                let d2 = q.dist_sq(&self.points[pi as usize]);
                if d2 < *best {
                    *best = d2;
                }
            }
        }
    }

    /// Distance from `q` to the nearest indexed point.
    pub fn nearest_dist(&self, q: &Point) -> f64 {
        let qc = self.cell_coord(q);
        let mut best = f64::INFINITY; // squared
        // max ring needed to cover the whole grid from qc
        let mut max_ring = 0i64;
        for i in 0..self.d {
            max_ring = max_ring
                .max(qc[i])
                .max(self.dims[i] as i64 - 1 - qc[i]);
        }
        for ring in 0..=max_ring {
            if best.is_finite() {
                // tightest distance any cell outside the scanned shell can achieve
                let mut lb = f64::INFINITY;
                for i in 0..self.d {
                    let lo_wall = self.origin[i] + (qc[i] - ring + 1) as f64 * self.cell;
                    let hi_wall = self.origin[i] + (qc[i] + ring) as f64 * self.cell;
                    lb = lb.min(q.0[i] - lo_wall).min(hi_wall - q.0[i]);
                }
                if lb > 0.0 && lb * lb >= best {
                    break;
                }
            }
            self.for_each_shell_cell(&qc, ring, |c| self.scan_cell(c, q, &mut best));
        }
        best.sqrt()
    }

    fn for_each_shell_cell(&self, center: &[i64; 3], ring: i64, mut f: impl FnMut(&[i64; 3])) {
        match self.d {
            1 => {
                if ring == 0 {
                    f(&[center[0], 0, 0]);
                } else {
                    f(&[center[0] - ring, 0, 0]);
                    f(&[center[0] + ring, 0, 0]);
                }
            }
            2 => {
                if ring == 0 {
                    f(&[center[0], center[1], 0]);
                    return;
                }
                for dx in -ring..=ring {
                    f(&[center[0] + dx, center[1] - ring, 0]);
                    f(&[center[0] + dx, center[1] + ring, 0]);
                }
                for dy in (-ring + 1)..ring {
                    f(&[center[0] - ring, center[1] + dy, 0]);
                    f(&[center[0] + ring, center[1] + dy, 0]);
                }
            }
            3 => {
                for dx in -ring..=ring {
                    for dy in -ring..=ring {
                        for dz in -ring..=ring {
                            if dx.abs().max(dy.abs()).max(dz.abs()) == ring {
                                f(&[center[0] + dx, center[1] + dy, center[2] + dz]);
                            }
                        }
                    }
                }
            }
            _ => unreachable!("dimension checked at build"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    fn brute(points: &[Point], q: &Point) -> f64 {
        points
            .iter()
            .map(|p| p.dist(q))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn matches_brute_force_2d() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point> = (0..500)
            .map(|_| Point([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0]))
            .collect();
        let grid = GridIndex::build(&pts, 2);
        for _ in 0..500 {
            let q = Point([rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5), 0.0]);
            let a = grid.nearest_dist(&q);
            let b = brute(&pts, &q);
            assert!((a - b).abs() < 1e-12, "grid {a} vs brute {b}");
        }
    }

    #[test]
    fn matches_brute_force_1d_and_3d() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for d in [1usize, 3] {
            let pts: Vec<Point> = (0..300)
                .map(|_| {
                    let mut c = [0.0; 3];
                    for ci in c.iter_mut().take(d) {
                        *ci = rng.random_range(-2.0..2.0);
                    }
                    Point(c)
                })
                .collect();
            let grid = GridIndex::build(&pts, d);
            for _ in 0..300 {
                let mut c = [0.0; 3];
                for ci in c.iter_mut().take(d) {
                    *ci = rng.random_range(-2.5..2.5);
                }
                let q = Point(c);
                assert!((grid.nearest_dist(&q) - brute(&pts, &q)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_single_point() {
        let pts = vec![Point([0.5, 0.5, 0.0])];
        let grid = GridIndex::build(&pts, 2);
        assert!((grid.nearest_dist(&Point([1.5, 0.5, 0.0])) - 1.0).abs() < 1e-15);
    }
}
