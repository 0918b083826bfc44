//! Small planar geometry kernel: points, segment predicates, and a uniform
//! grid for pruning segment-pair queries between polylines.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }

    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Sign of the signed area of triangle (a, b, c): >0 counterclockwise.
pub fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Closed-segment intersection test, touching counts.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Distance from point p to the closed segment (a, b).
pub fn point_segment_dist(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab.scale(t))
}

/// Distance between two closed segments; zero if they intersect.
pub fn segment_segment_dist(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b))
}

/// Signed angle swept at the origin going from p to q, in (-pi, pi].
/// Exact winding bookkeeping for polylines avoiding the origin.
pub fn turn_at_origin(p: Point2, q: Point2) -> f64 {
    p.cross(q).atan2(p.dot(q))
}

/// Uniform grid over segment bounding boxes. Build once from one polyline's
/// segments, then query candidate segment indices near a probe segment.
pub struct SegmentGrid {
    cell: f64,
    x0: f64,
    y0: f64,
    nx: i64,
    ny: i64,
    buckets: Vec<Vec<u32>>,
}

impl SegmentGrid {
    /// `segments` as consecutive point pairs from a polyline buffer.
    pub fn build(pts: &[Point2], cell: f64) -> Self {
        let cell = cell.max(1e-300);
        let mut x_min = f64::INFINITY;
        let mut y_min = f64::INFINITY;
        let mut x_max = f64::NEG_INFINITY;
        let mut y_max = f64::NEG_INFINITY;
        for p in pts {
            x_min = x_min.min(p.x);
            y_min = y_min.min(p.y);
            x_max = x_max.max(p.x);
            y_max = y_max.max(p.y);
        }
        let nx = (((x_max - x_min) / cell).floor() as i64 + 2).max(1);
        let ny = (((y_max - y_min) / cell).floor() as i64 + 2).max(1);
        let mut grid = SegmentGrid {
            cell,
            x0: x_min,
            y0: y_min,
            nx,
            ny,
            buckets: vec![Vec::new(); (nx * ny) as usize],
        };
        for i in 0..pts.len().saturating_sub(1) {
            let (a, b) = (pts[i], pts[i + 1]);
            grid.for_cells(a, b, 0.0, |bucket, idx| bucket.buckets[idx].push(i as u32));
        }
        grid
    }

    fn cell_range(&self, lo: f64, hi: f64, origin: f64, n: i64) -> (i64, i64) {
        let a = (((lo - origin) / self.cell).floor()).clamp(0.0, (n - 1) as f64) as i64;
        let b = (((hi - origin) / self.cell).floor()).clamp(0.0, (n - 1) as f64) as i64;
        (a, b)
    }

    fn for_cells(
        &mut self,
        a: Point2,
        b: Point2,
        pad: f64,
        mut f: impl FnMut(&mut Self, usize),
    ) {
        let (ix0, ix1) = self.cell_range(a.x.min(b.x) - pad, a.x.max(b.x) + pad, self.x0, self.nx);
        let (iy0, iy1) = self.cell_range(a.y.min(b.y) - pad, a.y.max(b.y) + pad, self.y0, self.ny);
        for ix in ix0..=ix1 {
            for iy in iy0..=iy1 {
                let idx = (ix * self.ny + iy) as usize;
                f(self, idx);
            }
        }
    }

    /// Visit indices of stored segments whose cells overlap the padded bbox
    /// of the probe segment. May repeat indices across cells.
    pub fn candidates(&self, a: Point2, b: Point2, pad: f64, mut f: impl FnMut(u32) -> bool) -> bool {
        let (ix0, ix1) = self.cell_range(a.x.min(b.x) - pad, a.x.max(b.x) + pad, self.x0, self.nx);
        let (iy0, iy1) = self.cell_range(a.y.min(b.y) - pad, a.y.max(b.y) + pad, self.y0, self.ny);
        for ix in ix0..=ix1 {
            for iy in iy0..=iy1 {
                for &i in &self.buckets[(ix * self.ny + iy) as usize] {
                    if f(i) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    #[test]
    fn intersection_basics() {
        assert!(segments_intersect(p(0., 0.), p(1., 1.), p(0., 1.), p(1., 0.)));
        assert!(!segments_intersect(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.)));
        // touching endpoint counts
        assert!(segments_intersect(p(0., 0.), p(1., 0.), p(1., 0.), p(2., 5.)));
        // collinear overlap counts
        assert!(segments_intersect(p(0., 0.), p(2., 0.), p(1., 0.), p(3., 0.)));
        // collinear disjoint does not
        assert!(!segments_intersect(p(0., 0.), p(1., 0.), p(2., 0.), p(3., 0.)));
    }

    #[test]
    fn distances() {
        assert_eq!(point_segment_dist(p(0., 1.), p(-1., 0.), p(1., 0.)), 1.0);
        assert_eq!(point_segment_dist(p(3., 0.), p(-1., 0.), p(1., 0.)), 2.0);
        let d = segment_segment_dist(p(0., 0.), p(1., 0.), p(0., 1.), p(1., 1.));
        assert!((d - 1.0).abs() < 1e-15);
        assert_eq!(
            segment_segment_dist(p(0., 0.), p(1., 1.), p(0., 1.), p(1., 0.)),
            0.0
        );
    }

    #[test]
    fn grid_finds_near_pairs() {
        let poly: Vec<Point2> = (0..100)
            .map(|i| p(i as f64 * 0.01, (i as f64 * 0.01).sin()))
            .collect();
        let grid = SegmentGrid::build(&poly, 0.05);
        // probe crossing the polyline must see at least one candidate that intersects
        let a = p(0.5, -1.0);
        let b = p(0.5, 1.0);
        let mut hit = false;
        grid.candidates(a, b, 0.0, |i| {
            let i = i as usize;
            if segments_intersect(a, b, poly[i], poly[i + 1]) {
                hit = true;
                true
            } else {
                false
            }
        });
        assert!(hit);
    }
}
