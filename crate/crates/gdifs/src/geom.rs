//! Small fixed-dimension geometry: points, axis-aligned boxes and dense
//! matrices for d in 1..=3, with a one-sided Jacobi SVD for certified
//! singular values.
//!
//! Points are stored as `[f64; 3]` with unused coordinates pinned to zero,
//! so Euclidean operations are dimension-agnostic.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Absolute slack folded into every certified geometric bound.
pub const CERTIFIED_SLACK: f64 = 1e-9;

/// Relative snap tolerance for grid-index computations, in cell units.
pub const GRID_SNAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point(pub [f64; MAX_DIM]);

impl Point {
    pub fn zero() -> Self {
        Point([0.0; MAX_DIM])
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point(c))
    }

    pub fn coord(&self, axis: usize) -> f64 {
        self.0[axis]
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point([
            self.0[0] - other.0[0],
            self.0[1] - other.0[1],
            self.0[2] - other.0[2],
        ])
    }

    pub fn add(&self, other: &Point) -> Point {
        Point([
            self.0[0] + other.0[0],
            self.0[1] + other.0[1],
            self.0[2] + other.0[2],
        ])
    }

    pub fn scale(&self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn norm(&self) -> f64 {
        (self.0[0] * self.0[0] + self.0[1] * self.0[1] + self.0[2] * self.0[2]).sqrt()
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.sub(other).norm()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let d = self.sub(other);
        d.0[0] * d.0[0] + d.0[1] * d.0[1] + d.0[2] * d.0[2]
    }
}

/// Row-major d x d matrix embedded in a 3 x 3 array; entries outside the
/// leading d x d block are zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareMat {
    pub dim: usize,
    pub m: [[f64; MAX_DIM]; MAX_DIM],
}

impl SquareMat {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(SquareMat {
            dim,
            m: [[0.0; MAX_DIM]; MAX_DIM],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut out = Self::zero(dim)?;
        for i in 0..dim {
            out.m[i][i] = 1.0;
        }
        Ok(out)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut out = Self::zero(dim)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            out.m[i][..dim].copy_from_slice(row);
        }
        Ok(out)
    }

    /// Scaled rotation in the plane: `ratio * R(angle)`, optionally composed
    /// with a reflection across the x-axis (applied before the rotation).
    pub fn planar_similarity(ratio: f64, angle: f64, reflect: bool) -> Self {
        let (s, c) = angle.sin_cos();
        let ry = if reflect { -1.0 } else { 1.0 };
        let mut m = [[0.0; MAX_DIM]; MAX_DIM];
        m[0][0] = ratio * c;
        m[0][1] = ratio * -s * ry;
        m[1][0] = ratio * s;
        m[1][1] = ratio * c * ry;
        SquareMat { dim: 2, m }
    }

    pub fn scalar(dim: usize, value: f64) -> Result<Self> {
        let mut out = Self::identity(dim)?;
        for i in 0..dim {
            out.m[i][i] = value;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &SquareMat) -> SquareMat {
        debug_assert_eq!(self.dim, other.dim);
        let d = self.dim;
        let mut out = SquareMat {
            dim: d,
            m: [[0.0; MAX_DIM]; MAX_DIM],
        };
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += self.m[i][k] * other.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }

    pub fn apply(&self, p: &Point) -> Point {
        let d = self.dim;
        let mut out = [0.0; MAX_DIM];
        for (i, row) in self.m.iter().enumerate().take(d) {
            let mut acc = 0.0;
            for k in 0..d {
                acc += row[k] * p.0[k];
            }
            out[i] = acc;
        }
        Point(out)
    }

    /// Singular values of the leading d x d block, ascending.
    ///
    /// One-sided Jacobi on the columns: rotate pairs of columns until they
    /// are mutually orthogonal; the singular values are the column norms.
    /// Quadratic convergence gives full double accuracy for d <= 3.
    pub fn singular_values(&self) -> Vec<f64> {
        let d = self.dim;
        // cols[j] = j-th column
        let mut cols = [[0.0f64; MAX_DIM]; MAX_DIM];
        for i in 0..d {
            for j in 0..d {
                cols[j][i] = self.m[i][j];
            }
        }
        let dot = |a: &[f64; MAX_DIM], b: &[f64; MAX_DIM]| {
            a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>()
        };
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..d {
                for q in (p + 1)..d {
                    let app = dot(&cols[p], &cols[p]);
                    let aqq = dot(&cols[q], &cols[q]);
                    let apq = dot(&cols[p], &cols[q]);
                    if app * aqq > 0.0 {
                        let rel = apq.abs() / (app * aqq).sqrt();
                        off = off.max(rel);
                    }
                    if apq == 0.0 {
                        continue;
                    }
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..d {
                        let vp = cols[p][i];
                        let vq = cols[q][i];
                        cols[p][i] = c * vp - s * vq;
                        cols[q][i] = s * vp + c * vq;
                    }
                }
            }
            if off < 1e-15 {
                break;
            }
        }
        let mut sv: Vec<f64> = (0..d)
            .map(|j| dot(&cols[j], &cols[j]).sqrt())
            .collect();
        sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sv
    }

    /// Solve `self * x = rhs` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, rhs: &Point) -> Result<Point> {
        let d = self.dim;
        let mut a = self.m;
        let mut b = rhs.0;
        for col in 0..d {
            let mut piv = col;
            for r in (col + 1)..d {
                if a[r][col].abs() > a[piv][col].abs() {
                    piv = r;
                }
            }
            if a[piv][col].abs() < f64::MIN_POSITIVE {
                return Err(Error::NonInjective(0.0));
            }
            a.swap(col, piv);
            b.swap(col, piv);
            for r in (col + 1)..d {
                let f = a[r][col] / a[col][col];
                for c in col..d {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; MAX_DIM];
        for col in (0..d).rev() {
            let mut acc = b[col];
            for c in (col + 1)..d {
                acc -= a[col][c] * x[c];
            }
            x[col] = acc / a[col][col];
        }
        Ok(Point(x))
    }
}

/// Closed axis-aligned box; `lo == hi` degenerates to a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisBox {
    pub lo: Point,
    pub hi: Point,
}

impl AxisBox {
    pub fn new(lo: Point, hi: Point) -> Self {
        AxisBox { lo, hi }
    }

    pub fn from_bounds(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        let lo = Point::from_slice(lo)?;
        let hi = Point::from_slice(hi)?;
        for i in 0..MAX_DIM {
            if lo.0[i] > hi.0[i] {
                return Err(Error::Config(format!(
                    "box lower bound {} exceeds upper bound {} on axis {i}",
                    lo.0[i], hi.0[i]
                )));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    pub fn point(p: Point) -> Self {
        AxisBox { lo: p, hi: p }
    }

    pub fn centered_cube(dim: usize, radius: f64) -> Self {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for i in 0..dim {
            lo[i] = -radius;
            hi[i] = radius;
        }
        AxisBox {
            lo: Point(lo),
            hi: Point(hi),
        }
    }

    pub fn center(&self) -> Point {
        self.lo.add(&self.hi).scale(0.5)
    }

    pub fn diameter(&self) -> f64 {
        self.hi.dist(&self.lo)
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi.0[axis] - self.lo.0[axis]
    }

    pub fn union(&self, other: &AxisBox) -> AxisBox {
        let mut lo = [0.0; MAX_DIM];
        let mut hi = [0.0; MAX_DIM];
        for i in 0..MAX_DIM {
            lo[i] = self.lo.0[i].min(other.lo.0[i]);
            hi[i] = self.hi.0[i].max(other.hi.0[i]);
        }
        AxisBox {
            lo: Point(lo),
            hi: Point(hi),
        }
    }

    pub fn expand(&self, pad: f64) -> AxisBox {
        let mut out = *self;
        for i in 0..MAX_DIM {
            if self.hi.0[i] != self.lo.0[i] || pad == 0.0 {
                out.lo.0[i] -= pad;
                out.hi.0[i] += pad;
            } else {
                out.lo.0[i] -= pad;
                out.hi.0[i] += pad;
            }
        }
        out
    }

    /// Expand only the first `dim` axes, keeping padded zeros exact elsewhere.
    pub fn expand_dims(&self, dim: usize, pad: f64) -> AxisBox {
        let mut out = *self;
        for i in 0..dim {
            out.lo.0[i] -= pad;
            out.hi.0[i] += pad;
        }
        out
    }

    pub fn contains(&self, p: &Point, slack: f64) -> bool {
        (0..MAX_DIM).all(|i| p.0[i] >= self.lo.0[i] - slack && p.0[i] <= self.hi.0[i] + slack)
    }

    pub fn contains_box(&self, inner: &AxisBox, slack: f64) -> bool {
        (0..MAX_DIM).all(|i| {
            inner.lo.0[i] >= self.lo.0[i] - slack && inner.hi.0[i] <= self.hi.0[i] + slack
        })
    }

    pub fn bounding(points: &[Point]) -> Result<AxisBox> {
        let first = points.first().ok_or(Error::EmptyPointSet)?;
        let mut b = AxisBox::point(*first);
        for p in &points[1..] {
            for i in 0..MAX_DIM {
                b.lo.0[i] = b.lo.0[i].min(p.0[i]);
                b.hi.0[i] = b.hi.0[i].max(p.0[i]);
            }
        }
        Ok(b)
    }

    /// Bounding box of the affine image `M x + t` of this box, by interval
    /// arithmetic on the center/half-width representation.
    pub fn affine_image(&self, linear: &SquareMat, translation: &Point) -> AxisBox {
        let d = linear.dim;
        let c = self.center();
        let ic = linear.apply(&c).add(translation);
        let mut lo = ic.0;
        let mut hi = ic.0;
        for i in 0..d {
            let mut h = 0.0;
            for j in 0..d {
                h += linear.m[i][j].abs() * 0.5 * (self.hi.0[j] - self.lo.0[j]);
            }
            lo[i] -= h;
            hi[i] += h;
        }
        AxisBox {
            lo: Point(lo),
            hi: Point(hi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_values_of_diagonal() {
        let m = SquareMat::from_rows(&[vec![0.5, 0.0], vec![0.0, 1.0 / 3.0]]).unwrap();
        let sv = m.singular_values();
        assert!((sv[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((sv[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn singular_values_of_scaled_rotation() {
        let m = SquareMat::planar_similarity(0.5, std::f64::consts::FRAC_PI_4, false);
        let sv = m.singular_values();
        assert!((sv[0] - 0.5).abs() < 1e-12);
        assert!((sv[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn singular_values_3d() {
        // column-permuted diagonal exercises the sweep loop
        let m = SquareMat::from_rows(&[
            vec![0.0, 0.2, 0.0],
            vec![0.0, 0.0, 0.7],
            vec![0.4, 0.0, 0.0],
        ])
        .unwrap();
        let sv = m.singular_values();
        assert!((sv[0] - 0.2).abs() < 1e-14);
        assert!((sv[1] - 0.4).abs() < 1e-14);
        assert!((sv[2] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn solve_roundtrip() {
        let m = SquareMat::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![0.5, 3.0, 0.1],
            vec![0.0, -1.0, 1.5],
        ])
        .unwrap();
        let x = Point([0.3, -0.7, 1.1]);
        let b = m.apply(&x);
        let got = m.solve(&b).unwrap();
        assert!(got.dist(&x) < 1e-12);
    }

    #[test]
    fn affine_image_of_box() {
        let b = AxisBox::from_bounds(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let m = SquareMat::scalar(2, 0.5).unwrap();
        let img = b.affine_image(&m, &Point([0.25, 0.0, 0.0]));
        assert!((img.lo.0[0] - 0.25).abs() < 1e-15);
        assert!((img.hi.0[0] - 0.75).abs() < 1e-15);
        assert!((img.hi.0[1] - 0.5).abs() < 1e-15);
    }
}
