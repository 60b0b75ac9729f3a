//! Planar homographies for perspective rectification.
//!
//! Two rectified views are built from image annotations:
//!
//! - a **top view** of the ground plane, from two lane markings that are
//!   parallel on the ground ([`top_view_homography`]);
//! - a per-person **side view** of the vertical walking plane, from the
//!   head/feet quadrilateral at the first and last frame of a walk
//!   ([`side_view_homography`]). Its vertical axis spans exactly
//!   [`SIDE_VIEW_HEIGHT`] units between head and feet, so rectified vertical
//!   coordinates read as percent of body height.
//!
//! Estimation uses the normalized direct linear transform (isotropic
//! normalization of both point sets, null vector of the stacked constraint
//! matrix via SVD, denormalization).

use nalgebra::{DMatrix, Matrix3, Vector3};
use thiserror::Error;

/// Height of the side-view target rectangle; head edge at 0, feet edge here.
pub const SIDE_VIEW_HEIGHT: f64 = 100.0;

/// Relative tolerance on the second-smallest singular value of the DLT
/// design matrix below which a configuration is degenerate.
const DEGENERACY_RTOL: f64 = 1e-10;
/// `sigma_min / sigma_max` below which a homography is treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;
/// Smallest homogeneous scale accepted by [`Homography::apply`].
const INFINITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("too few correspondences: need at least 4, got {got}")]
    TooFewCorrespondences { got: usize },
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("point ({x}, {y}) maps to infinity")]
    PointAtInfinity { x: f64, y: f64 },
    #[error("homography matrix is singular")]
    SingularMatrix,
    #[error("non-finite coordinate in input")]
    NonFinite,
}

/// Image-plane point; `y` grows downward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn midpoint(&self, other: &Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub src: Point2,
    pub dst: Point2,
}

impl Correspondence {
    pub const fn new(src: Point2, dst: Point2) -> Self {
        Self { src, dst }
    }
}

/// Endpoints of two lane markings that are parallel on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanePair {
    pub line_a: [Point2; 2],
    pub line_b: [Point2; 2],
}

/// Head and mean-foot positions at the first and last frame of a walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideViewQuad {
    pub head_start: Point2,
    pub head_end: Point2,
    pub feet_start: Point2,
    pub feet_end: Point2,
}

/// A 3×3 projective map in canonical form.
///
/// The stored matrix is scaled so the bottom-right entry is 1 when it is
/// nonzero; otherwise it has unit Frobenius norm and its first significant
/// entry is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: Matrix3<f64>,
}

impl Homography {
    pub fn identity() -> Self {
        Self {
            m: Matrix3::identity(),
        }
    }

    /// Builds a homography from a raw matrix, normalizing it to canonical form.
    pub fn new(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let m = canonical(&m).ok_or(GeometryError::SingularMatrix)?;
        let sv = m.singular_values();
        let max = sv.max();
        if !(max > 0.0) || sv.min() / max < SINGULAR_RTOL {
            return Err(GeometryError::SingularMatrix);
        }
        Ok(Self { m })
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Result<Self, GeometryError> {
        Self::new(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    pub fn to_rows(&self) -> [[f64; 3]; 3] {
        let mut rows = [[0.0; 3]; 3];
        for (r, row) in rows.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = self.m[(r, c)];
            }
        }
        rows
    }

    pub fn apply(&self, p: Point2) -> Result<Point2, GeometryError> {
        let v = self.m * Vector3::new(p.x, p.y, 1.0);
        if !(v.z.abs() > INFINITY_TOL) {
            return Err(GeometryError::PointAtInfinity { x: p.x, y: p.y });
        }
        Ok(Point2::new(v.x / v.z, v.y / v.z))
    }

    pub fn invert(&self) -> Result<Self, GeometryError> {
        let inv = self.m.try_inverse().ok_or(GeometryError::SingularMatrix)?;
        Self::new(inv)
    }

    /// `self ∘ first`: applies `first`, then `self`.
    pub fn compose(&self, first: &Homography) -> Result<Self, GeometryError> {
        Self::new(self.m * first.m)
    }
}

fn canonical(m: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let fro = m.norm();
    if !(fro > 0.0) || !fro.is_finite() {
        return None;
    }
    let corner = m[(2, 2)];
    if corner.abs() > 1e-12 * fro {
        return Some(m / corner);
    }
    let unit = m / fro;
    let lead = unit
        .iter()
        .copied()
        .find(|v| v.abs() > 1e-12)
        .unwrap_or(1.0);
    Some(if lead < 0.0 { -unit } else { unit })
}

/// Similarity that moves the centroid to the origin and scales the mean
/// distance from it to sqrt(2).
fn normalizing_transform(points: &[Point2]) -> Option<Matrix3<f64>> {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = points
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n;
    if !(mean_dist > 0.0) {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    Some(Matrix3::new(
        s,
        0.0,
        -s * cx,
        0.0,
        s,
        -s * cy,
        0.0,
        0.0,
        1.0,
    ))
}

fn transform_raw(t: &Matrix3<f64>, p: &Point2) -> (f64, f64) {
    let v = t * Vector3::new(p.x, p.y, 1.0);
    (v.x / v.z, v.y / v.z)
}

/// Twice the signed area of triangle (a, b, c).
fn cross3(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn has_collinear_triple(points: &[Point2]) -> bool {
    let scale = points
        .iter()
        .flat_map(|p| points.iter().map(move |q| p.distance(q)))
        .fold(0.0_f64, f64::max);
    let tol = 1e-10 * scale * scale;
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if cross3(&points[i], &points[j], &points[k]).abs() <= tol {
                    return true;
                }
            }
        }
    }
    false
}

/// Least-squares homography (algebraic error) mapping each `src` onto `dst`.
pub fn estimate_homography(pairs: &[Correspondence]) -> Result<Homography, GeometryError> {
    let n = pairs.len();
    if n < 4 {
        return Err(GeometryError::TooFewCorrespondences { got: n });
    }
    if pairs
        .iter()
        .any(|c| !c.src.is_finite() || !c.dst.is_finite())
    {
        return Err(GeometryError::NonFinite);
    }
    let src: Vec<Point2> = pairs.iter().map(|c| c.src).collect();
    let dst: Vec<Point2> = pairs.iter().map(|c| c.dst).collect();
    if n == 4 && (has_collinear_triple(&src) || has_collinear_triple(&dst)) {
        return Err(GeometryError::DegenerateConfiguration(
            "three of the four points are collinear".into(),
        ));
    }

    let degenerate = || GeometryError::DegenerateConfiguration("coincident points".into());
    let t_src = normalizing_transform(&src).ok_or_else(degenerate)?;
    let t_dst = normalizing_transform(&dst).ok_or_else(degenerate)?;

    // Zero rows pad the 4-point case to a square system so that the full
    // right singular basis is available.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (s, d)) in src.iter().zip(&dst).enumerate() {
        let (sx, sy) = transform_raw(&t_src, s);
        let (dx, dy) = transform_raw(&t_dst, d);
        let r = 2 * i;
        a[(r, 3)] = -sx;
        a[(r, 4)] = -sy;
        a[(r, 5)] = -1.0;
        a[(r, 6)] = dy * sx;
        a[(r, 7)] = dy * sy;
        a[(r, 8)] = dy;
        a[(r + 1, 0)] = sx;
        a[(r + 1, 1)] = sy;
        a[(r + 1, 2)] = 1.0;
        a[(r + 1, 6)] = -dx * sx;
        a[(r + 1, 7)] = -dx * sy;
        a[(r + 1, 8)] = -dx;
    }

    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| GeometryError::DegenerateConfiguration("SVD failed".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let largest = svd.singular_values[order[0]];
    let second_smallest = svd.singular_values[order[7]];
    if !(second_smallest > DEGENERACY_RTOL * largest) {
        return Err(GeometryError::DegenerateConfiguration(
            "correspondences do not determine a unique homography".into(),
        ));
    }
    let h = v_t.row(order[8]);
    let h_norm = Matrix3::new(h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8]);
    let t_dst_inv = t_dst.try_inverse().ok_or(GeometryError::SingularMatrix)?;
    Homography::new(t_dst_inv * h_norm * t_src).map_err(|e| match e {
        GeometryError::SingularMatrix => {
            GeometryError::DegenerateConfiguration("best-fit homography is singular".into())
        }
        other => other,
    })
}

/// Ground-plane rectification from two lane markings.
///
/// The quadrilateral spanned by the two segments is mapped to an
/// axis-aligned rectangle whose height is the mean pixel length of the
/// segments (line A along +y) and whose width is the pixel distance between
/// the segment midpoints, so rectified units stay close to source pixels.
/// Segment B is re-oriented to run the same way as A, and the side on which
/// B lies is kept, so the rectified view is not mirrored.
///
/// Endpoints should sit at corresponding positions along the two lanes
/// (e.g. on a common cross line); then the result differs from a metric
/// top view only by an axis-aligned scaling.
pub fn top_view_homography(lanes: &LanePair) -> Result<Homography, GeometryError> {
    let [a0, a1] = lanes.line_a;
    let [mut b0, mut b1] = lanes.line_b;
    if [a0, a1, b0, b1].iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let len_a = a0.distance(&a1);
    let len_b = b0.distance(&b1);
    if len_a == 0.0 || len_b == 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "lane line endpoints coincide".into(),
        ));
    }
    let dir_a = (a1.x - a0.x, a1.y - a0.y);
    let dir_b = (b1.x - b0.x, b1.y - b0.y);
    if dir_a.0 * dir_b.0 + dir_a.1 * dir_b.1 < 0.0 {
        std::mem::swap(&mut b0, &mut b1);
    }
    let mid_a = a0.midpoint(&a1);
    let mid_b = b0.midpoint(&b1);
    let height = 0.5 * (len_a + len_b);
    let width = mid_a.distance(&mid_b);
    if width == 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "lane lines share a midpoint".into(),
        ));
    }
    // Target frame: A runs along +y; B sits at -x or +x depending on which
    // side keeps the image handedness.
    let side = dir_a.0 * (mid_b.y - mid_a.y) - dir_a.1 * (mid_b.x - mid_a.x);
    let bx = if side > 0.0 { -width } else { width };
    estimate_homography(&[
        Correspondence::new(a0, Point2::new(0.0, 0.0)),
        Correspondence::new(a1, Point2::new(0.0, height)),
        Correspondence::new(b0, Point2::new(bx, 0.0)),
        Correspondence::new(b1, Point2::new(bx, height)),
    ])
}

/// Per-person side-view rectification.
///
/// Maps (head_start, head_end, feet_end, feet_start) onto the rectangle
/// (0,0), (W,0), (W,100), (0,100) with `W = |feet_end - feet_start|`.
/// Only vertical coordinates are meaningful in this view.
pub fn side_view_homography(quad: &SideViewQuad) -> Result<Homography, GeometryError> {
    let corners = [
        quad.head_start,
        quad.head_end,
        quad.feet_end,
        quad.feet_start,
    ];
    if corners.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::NonFinite);
    }
    let area2 = (0..4)
        .map(|i| {
            let p = corners[i];
            let q = corners[(i + 1) % 4];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>();
    if area2.abs() <= f64::EPSILON {
        return Err(GeometryError::DegenerateConfiguration(
            "side-view quadrilateral has zero area".into(),
        ));
    }
    let width = quad.feet_start.distance(&quad.feet_end);
    if width == 0.0 {
        return Err(GeometryError::DegenerateConfiguration(
            "feet do not move between first and last frame".into(),
        ));
    }
    estimate_homography(&[
        Correspondence::new(quad.head_start, Point2::new(0.0, 0.0)),
        Correspondence::new(quad.head_end, Point2::new(width, 0.0)),
        Correspondence::new(quad.feet_end, Point2::new(width, SIDE_VIEW_HEIGHT)),
        Correspondence::new(quad.feet_start, Point2::new(0.0, SIDE_VIEW_HEIGHT)),
    ])
}
