//! The hyperbolic plane in the upper half-plane model.
//!
//! Points carry upper half-plane coordinates `u + i v`. Internally, metric
//! quantities and geodesic predicates go through the hyperboloid model
//! (Minkowski form `x0 y0 + x1 y1 - x2 y2`), where geodesics are unit
//! spacelike normals and ideal points are null vectors. This keeps lines with
//! an endpoint near infinity as well conditioned as any other line.
//!
//! Rotation convention: [`rotation_about`] rotates *clockwise* as seen in the
//! upper half-plane with the usual orientation. Flipping it produces the
//! mirror image of every construction downstream and nothing else.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance for matrix identity tests.
pub const EPS_MAT: f64 = 1e-9;
/// Tolerance for the trace trichotomy.
pub const EPS_TR: f64 = 1e-9;
/// Tolerance for point and endpoint coincidence.
pub const EPS_PT: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("point ({u}, {v}) is not in the upper half-plane")]
    InvalidPoint { u: f64, v: f64 },
    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,
    #[error("matrix determinant {det} is not 1")]
    BadDeterminant { det: f64 },
    #[error("rotation angle {theta} outside (0, 2pi)")]
    AngleOutOfRange { theta: f64 },
    #[error("isometry is not hyperbolic (trace {trace})")]
    NonHyperbolicElement { trace: f64 },
    #[error("geodesics are identical")]
    IdenticalGeodesics,
    #[error("point does not lie on both geodesics")]
    PointNotOnBoth,
}

type Vec3 = [f64; 3];

#[inline]
pub(crate) fn mink(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// `J (a x b)`: orthogonal to `a` and `b` in the Minkowski form.
#[inline]
pub(crate) fn mink_cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        -(a[0] * b[1] - a[1] * b[0]),
    ]
}

/// A point `u + i v` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub u: f64,
    pub v: f64,
}

impl Point {
    /// The model basepoint `i`.
    pub const BASE: Point = Point { u: 0.0, v: 1.0 };

    pub fn new(u: f64, v: f64) -> Result<Self, GeomError> {
        if v > 0.0 && u.is_finite() && v.is_finite() {
            Ok(Point { u, v })
        } else {
            Err(GeomError::InvalidPoint { u, v })
        }
    }

    pub fn hyperboloid(&self) -> Vec3 {
        let Point { u, v } = *self;
        let s = u * u + v * v;
        [(s - 1.0) / (2.0 * v), -u / v, (s + 1.0) / (2.0 * v)]
    }

    /// Inverse of [`Point::hyperboloid`]; the input is renormalized onto the
    /// upper sheet first.
    pub fn from_hyperboloid(x: Vec3) -> Point {
        let n = (-mink(&x, &x)).sqrt();
        let x = [x[0] / n, x[1] / n, x[2] / n];
        // x2 - x0 = (1 + x1^2) / (x2 + x0), free of cancellation.
        let inv_v = (1.0 + x[1] * x[1]) / (x[2] + x[0]);
        let v = 1.0 / inv_v;
        Point { u: -x[1] * v, v }
    }

    /// Poincaré disk coordinates, with the basepoint at the origin.
    pub fn disk(&self) -> [f64; 2] {
        let x = self.hyperboloid();
        [x[0] / (1.0 + x[2]), x[1] / (1.0 + x[2])]
    }

    /// Beltrami–Klein coordinates, where geodesics are straight chords.
    pub fn klein(&self) -> [f64; 2] {
        let x = self.hyperboloid();
        [x[0] / x[2], x[1] / x[2]]
    }

    pub fn from_klein(k: [f64; 2]) -> Point {
        Point::from_hyperboloid([k[0], k[1], 1.0])
    }
}

/// An ideal point: a real number or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

impl BoundaryPoint {
    /// The point `[x : y]` of the projective real line.
    pub fn from_projective(x: f64, y: f64) -> BoundaryPoint {
        if y == 0.0 || (x / y).is_infinite() {
            BoundaryPoint::Infinity
        } else {
            BoundaryPoint::Finite(x / y)
        }
    }

    fn projective(&self) -> (f64, f64) {
        match *self {
            BoundaryPoint::Finite(t) => (t, 1.0),
            BoundaryPoint::Infinity => (1.0, 0.0),
        }
    }

    /// Position on the unit circle bounding the disk model.
    pub fn circle(&self) -> [f64; 2] {
        let (x, y) = self.projective();
        circle_of_projective(x, y)
    }

    fn null_vector(&self) -> Vec3 {
        let c = self.circle();
        [c[0], c[1], 1.0]
    }

    /// Chordal distance between the images on the unit circle.
    pub fn chordal(&self, other: &BoundaryPoint) -> f64 {
        let a = self.circle();
        let b = other.circle();
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    fn sort_key(&self) -> f64 {
        match *self {
            BoundaryPoint::Finite(t) => t,
            BoundaryPoint::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(t) => write!(f, "{t}"),
            BoundaryPoint::Infinity => f.write_str("inf"),
        }
    }
}

fn circle_of_projective(x: f64, y: f64) -> [f64; 2] {
    let n = x * x + y * y;
    [(x * x - y * y) / n, -2.0 * x * y / n]
}

/// A complete geodesic, stored by its two ideal endpoints in sorted order
/// (infinity last).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    e1: BoundaryPoint,
    e2: BoundaryPoint,
}

impl Geodesic {
    pub fn new(a: BoundaryPoint, b: BoundaryPoint) -> Result<Self, GeomError> {
        if a.chordal(&b) <= EPS_PT {
            return Err(GeomError::DegenerateGeodesic);
        }
        let (e1, e2) = match a.sort_key().total_cmp(&b.sort_key()) {
            Ordering::Greater => (b, a),
            _ => (a, b),
        };
        Ok(Geodesic { e1, e2 })
    }

    pub fn from_reals(a: f64, b: f64) -> Result<Self, GeomError> {
        Geodesic::new(BoundaryPoint::Finite(a), BoundaryPoint::Finite(b))
    }

    /// The vertical line `Re z = a`.
    pub fn vertical(a: f64) -> Result<Self, GeomError> {
        Geodesic::new(BoundaryPoint::Finite(a), BoundaryPoint::Infinity)
    }

    pub fn endpoints(&self) -> (BoundaryPoint, BoundaryPoint) {
        (self.e1, self.e2)
    }

    /// Endpoints on the unit circle of the disk model.
    pub fn circle_endpoints(&self) -> ([f64; 2], [f64; 2]) {
        (self.e1.circle(), self.e2.circle())
    }

    /// Unit spacelike normal in the hyperboloid model; its sign follows the
    /// canonical endpoint order.
    pub fn normal(&self) -> Vec3 {
        // The chord sits at Euclidean distance cos(θ/2) from the centre along
        // the bisector m, so (m, cos(θ/2)) / sin(θ/2) is the unit normal.
        // The cross product of the null vectors only fixes the sign: its
        // Minkowski norm cancels badly for nearby endpoints.
        let (a, b) = self.circle_endpoints();
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let chord = dx.hypot(dy);
        let half_chord = 0.5 * chord;
        let mut m = [-dy / chord, dx / chord];
        if m[0] * (a[0] + b[0]) + m[1] * (a[1] + b[1]) < 0.0 {
            m = [-m[0], -m[1]];
        }
        let cos_half = if half_chord < 0.7 {
            (1.0 - half_chord * half_chord).sqrt()
        } else {
            0.5 * (m[0] * (a[0] + b[0]) + m[1] * (a[1] + b[1]))
        };
        let n = [m[0] / half_chord, m[1] / half_chord, cos_half / half_chord];
        let cross = mink_cross(&self.e1.null_vector(), &self.e2.null_vector());
        let sign = n[0] * cross[0] + n[1] * cross[1] + n[2] * cross[2];
        if sign < 0.0 {
            [-n[0], -n[1], -n[2]]
        } else {
            n
        }
    }

    /// Same line up to `EPS_PT` in the chordal metric.
    pub fn approx_eq(&self, other: &Geodesic) -> bool {
        let direct = self.e1.chordal(&other.e1).max(self.e2.chordal(&other.e2));
        let swapped = self.e1.chordal(&other.e2).max(self.e2.chordal(&other.e1));
        direct.min(swapped) <= EPS_PT
    }

    /// Total order on canonical endpoint pairs.
    pub fn key_cmp(&self, other: &Geodesic) -> Ordering {
        self.e1
            .sort_key()
            .total_cmp(&other.e1.sort_key())
            .then(self.e2.sort_key().total_cmp(&other.e2.sort_key()))
    }

    /// Smallest chordal gap between an endpoint of `self` and one of `other`.
    pub fn endpoint_gap(&self, other: &Geodesic) -> f64 {
        [
            self.e1.chordal(&other.e1),
            self.e1.chordal(&other.e2),
            self.e2.chordal(&other.e1),
            self.e2.chordal(&other.e2),
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
    }

    /// Whether the endpoint pairs separate each other on the circle.
    pub fn interleaves(&self, other: &Geodesic) -> bool {
        let (a1, a2) = self.circle_endpoints();
        let (b1, b2) = other.circle_endpoints();
        let side =
            |p: [f64; 2]| (a2[0] - a1[0]) * (p[1] - a1[1]) - (a2[1] - a1[1]) * (p[0] - a1[0]);
        side(b1) * side(b2) < 0.0
    }

    /// The point at parameter `s` (arclength from the foot of the
    /// perpendicular dropped from the basepoint), oriented from `e1` to `e2`.
    pub fn point_at(&self, s: f64) -> Point {
        let n = self.normal();
        let base = Point::BASE.hyperboloid();
        // foot of the perpendicular from the basepoint
        let h = mink(&base, &n);
        let foot = [base[0] - h * n[0], base[1] - h * n[1], base[2] - h * n[2]];
        let fnorm = (-mink(&foot, &foot)).sqrt();
        let foot = [foot[0] / fnorm, foot[1] / fnorm, foot[2] / fnorm];
        // unit tangent at the foot pointing toward e2
        let e2 = self.e2.null_vector();
        let k = mink(&foot, &e2);
        let t = [
            e2[0] + k * foot[0],
            e2[1] + k * foot[1],
            e2[2] + k * foot[2],
        ];
        let tn = mink(&t, &t).sqrt();
        let (c, sh) = (s.cosh(), s.sinh());
        Point::from_hyperboloid([
            c * foot[0] + sh * t[0] / tn,
            c * foot[1] + sh * t[1] / tn,
            c * foot[2] + sh * t[2] / tn,
        ])
    }
}

impl fmt::Display for Geodesic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.e1, self.e2)
    }
}

/// An orientation-preserving isometry `z -> (a z + b) / (c z + d)`, stored as
/// a unit-determinant matrix with the sign fixed so the first entry that is
/// not numerically zero is positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    m: [[f64; 2]; 2],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[1.0, 0.0], [0.0, 1.0]],
    };

    /// Builds an isometry from a matrix whose determinant is 1 within 1e-12.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, GeomError> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-12 {
            return Err(GeomError::BadDeterminant { det });
        }
        Ok(Isometry::normalized([[a, b], [c, d]]))
    }

    /// Rescales by `1/sqrt(det)` and fixes the sign.
    fn normalized(m: [[f64; 2]; 2]) -> Isometry {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let s = det.sqrt().recip();
        let mut m = [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]];
        let scale = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let lead = m
            .iter()
            .flatten()
            .copied()
            .find(|x| x.abs() > 1e-12 * scale)
            .unwrap_or(1.0);
        if lead < 0.0 {
            for row in m.iter_mut() {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }
        Isometry { m }
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        self.m
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn inverse(&self) -> Isometry {
        let [[a, b], [c, d]] = self.m;
        Isometry::normalized([[d, -b], [-c, a]])
    }

    pub fn pow(&self, n: i64) -> Isometry {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Isometry::IDENTITY;
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    /// Max-entry distance to `other`, minimized over the sign ambiguity.
    pub fn distance(&self, other: &Isometry) -> f64 {
        let mut plus = 0.0f64;
        let mut minus = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                plus = plus.max((self.m[i][j] - other.m[i][j]).abs());
                minus = minus.max((self.m[i][j] + other.m[i][j]).abs());
            }
        }
        plus.min(minus)
    }

    pub fn approx_eq(&self, other: &Isometry) -> bool {
        self.distance(other) <= EPS_MAT
    }

    pub fn is_identity(&self) -> bool {
        self.approx_eq(&Isometry::IDENTITY)
    }

    pub fn apply(&self, p: &Point) -> Point {
        let [[a, b], [c, d]] = self.m;
        // (a z + b)(c conj(z) + d) / |c z + d|^2
        let (u, v) = (p.u, p.v);
        let den_re = c * u + d;
        let den_im = c * v;
        let n2 = den_re * den_re + den_im * den_im;
        let num_re = a * u + b;
        let num_im = a * v;
        Point {
            u: (num_re * den_re + num_im * den_im) / n2,
            v: v / n2,
        }
    }

    pub fn apply_boundary(&self, t: &BoundaryPoint) -> BoundaryPoint {
        let [[a, b], [c, d]] = self.m;
        let (x, y) = t.projective();
        BoundaryPoint::from_projective(a * x + b * y, c * x + d * y)
    }

    pub fn apply_geodesic(&self, g: &Geodesic) -> Geodesic {
        let (e1, e2) = g.endpoints();
        let (a, b) = (self.apply_boundary(&e1), self.apply_boundary(&e2));
        let (e1, e2) = match a.sort_key().total_cmp(&b.sort_key()) {
            Ordering::Greater => (b, a),
            _ => (a, b),
        };
        Geodesic { e1, e2 }
    }

    /// The isometry `z -> v z + u` taking the basepoint to `p`.
    pub fn basepoint_to(p: &Point) -> Isometry {
        let s = p.v.sqrt();
        Isometry::normalized([[s, p.u / s], [0.0, 1.0 / s]])
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        let (l, r) = (self.m, rhs.m);
        Isometry::normalized([
            [
                l[0][0] * r[0][0] + l[0][1] * r[1][0],
                l[0][0] * r[0][1] + l[0][1] * r[1][1],
            ],
            [
                l[1][0] * r[0][0] + l[1][1] * r[1][0],
                l[1][0] * r[0][1] + l[1][1] * r[1][1],
            ],
        ])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IsometryKind {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for IsometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IsometryKind::Identity => "IDENTITY",
            IsometryKind::Elliptic => "ELLIPTIC",
            IsometryKind::Parabolic => "PARABOLIC",
            IsometryKind::Hyperbolic => "HYPERBOLIC",
        };
        f.write_str(s)
    }
}

/// Conjugacy-invariant summary of an isometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryClass {
    pub kind: IsometryKind,
    /// Clockwise rotation angle in `(0, 2pi)`; elliptic only.
    pub angle: Option<f64>,
    /// Hyperbolic only.
    pub translation_length: Option<f64>,
}

pub fn hyperbolic_distance(a: &Point, b: &Point) -> f64 {
    let du = a.u - b.u;
    let dv = a.v - b.v;
    2.0 * (du.hypot(dv) / (2.0 * (a.v * b.v).sqrt())).asinh()
}

/// Clockwise rotation by `theta` about `center`.
pub fn rotation_about(center: &Point, theta: f64) -> Result<Isometry, GeomError> {
    if !(theta > 0.0 && theta < TAU) {
        return Err(GeomError::AngleOutOfRange { theta });
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let at_base = Isometry::normalized([[c, -s], [s, c]]);
    let t = Isometry::basepoint_to(center);
    Ok(t * at_base * t.inverse())
}

pub fn classify_isometry(g: &Isometry) -> IsometryClass {
    if g.is_identity() {
        return IsometryClass {
            kind: IsometryKind::Identity,
            angle: None,
            translation_length: None,
        };
    }
    let tr = g.trace();
    let half = tr.abs() / 2.0;
    if tr.abs() < 2.0 - EPS_TR {
        // fixed point z0 has c z0 + d = exp(i sign(c) alpha) with cos(alpha) = tr/2,
        // so the derivative there is exp(-2 i sign(c) alpha).
        let c = g.m[1][0];
        let alpha = (tr / 2.0).clamp(-1.0, 1.0).acos();
        let theta = if c > 0.0 {
            2.0 * alpha
        } else {
            TAU - 2.0 * alpha
        };
        IsometryClass {
            kind: IsometryKind::Elliptic,
            angle: Some(theta),
            translation_length: None,
        }
    } else if tr.abs() > 2.0 + EPS_TR {
        IsometryClass {
            kind: IsometryKind::Hyperbolic,
            angle: None,
            translation_length: Some(2.0 * half.acosh()),
        }
    } else {
        IsometryClass {
            kind: IsometryKind::Parabolic,
            angle: None,
            translation_length: None,
        }
    }
}

/// Interior fixed point of an elliptic isometry.
pub fn fixed_point(g: &Isometry) -> Option<Point> {
    let [[a, _], [c, d]] = g.m;
    let tr = a + d;
    if tr.abs() >= 2.0 || c == 0.0 {
        return None;
    }
    let im = c.signum() * (4.0 - tr * tr).sqrt();
    // z = ((a - d) + i im) / (2c)
    Point::new((a - d) / (2.0 * c), im / (2.0 * c)).ok()
}

pub fn axis_of(g: &Isometry) -> Result<Geodesic, GeomError> {
    let class = classify_isometry(g);
    if class.kind != IsometryKind::Hyperbolic {
        return Err(GeomError::NonHyperbolicElement { trace: g.trace() });
    }
    let [[a, b], [c, d]] = g.m;
    // fixed points solve c t^2 + (d - a) t - b = 0; disc = tr^2 - 4.
    let disc = (a + d) * (a + d) - 4.0;
    let s = if a - d >= 0.0 { 1.0 } else { -1.0 };
    let q = (a - d) + s * disc.sqrt();
    let r1 = BoundaryPoint::from_projective(q, 2.0 * c);
    let r2 = BoundaryPoint::from_projective(-2.0 * b, q);
    Geodesic::new(r1, r2)
}

pub fn geodesics_intersect(a: &Geodesic, b: &Geodesic) -> Result<Option<Point>, GeomError> {
    if a.approx_eq(b) {
        return Err(GeomError::IdenticalGeodesics);
    }
    if !a.interleaves(b) {
        return Ok(None);
    }
    let x = mink_cross(&a.normal(), &b.normal());
    if mink(&x, &x) >= 0.0 {
        return Ok(None);
    }
    let x = if x[2] < 0.0 { [-x[0], -x[1], -x[2]] } else { x };
    Ok(Some(Point::from_hyperboloid(x)))
}

pub fn distance_point_to_geodesic(p: &Point, g: &Geodesic) -> f64 {
    mink(&p.hyperboloid(), &g.normal()).abs().asinh()
}

/// Acute crossing angle of `a` and `b` at `p`, in `(0, pi/2]`. The other
/// corner angle at the crossing is its supplement.
pub fn angle_between_at(a: &Geodesic, b: &Geodesic, p: &Point) -> Result<f64, GeomError> {
    let tol = EPS_PT * 10.0;
    if distance_point_to_geodesic(p, a) > tol || distance_point_to_geodesic(p, b) > tol {
        return Err(GeomError::PointNotOnBoth);
    }
    let c = mink(&a.normal(), &b.normal()).abs().min(1.0);
    Ok(c.acos())
}

/// Hyperbolic angle at `vertex` between the geodesic rays toward `a` and
/// toward `b`, in `[0, pi]`.
pub fn corner_angle(vertex: &Point, a: &Point, b: &Point) -> f64 {
    let x = vertex.hyperboloid();
    let tangent = |y: Vec3| {
        let k = mink(&x, &y);
        let t = [y[0] + k * x[0], y[1] + k * x[1], y[2] + k * x[2]];
        let n = mink(&t, &t).sqrt();
        [t[0] / n, t[1] / n, t[2] / n]
    };
    let ta = tangent(a.hyperboloid());
    let tb = tangent(b.hyperboloid());
    mink(&ta, &tb).clamp(-1.0, 1.0).acos()
}

/// Angle of an elliptic rotation reduced to `(0, pi]` as an unsigned turn.
pub fn unsigned_turn(angle: f64) -> f64 {
    if angle > PI {
        TAU - angle
    } else {
        angle
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(u: f64, v: f64) -> Point {
        Point::new(u, v).unwrap()
    }

    #[test]
    fn distance_examples() {
        assert_eq!(hyperbolic_distance(&Point::BASE, &Point::BASE), 0.0);
        let d = hyperbolic_distance(&pt(0.0, 1.0), &pt(0.0, 2.0));
        assert!((d - 2f64.ln()).abs() < 1e-15);
        // cosh d = 1 + |dz|^2 / (2 v1 v2) = 3/2
        let d = hyperbolic_distance(&pt(0.0, 1.0), &pt(1.0, 1.0));
        assert!((d - 1.5f64.acosh()).abs() < 1e-14);
    }

    #[test]
    fn invalid_point() {
        assert!(Point::new(0.0, 0.0).is_err());
        assert!(Point::new(0.0, -1.0).is_err());
    }

    #[test]
    fn hyperboloid_roundtrip() {
        for &(u, v) in &[(0.0, 1.0), (3.0, 0.01), (-2.0, 40.0), (0.5, 0.5)] {
            let p = Point::from_hyperboloid(pt(u, v).hyperboloid());
            assert!((p.u - u).abs() < 1e-12 * (1.0 + u.abs()) && (p.v - v).abs() < 1e-12 * v);
            let k = Point::from_klein(pt(u, v).klein());
            assert!(hyperbolic_distance(&k, &pt(u, v)) < 1e-9);
        }
    }

    #[test]
    fn rotation_by_pi_at_base_has_zero_trace() {
        let r = rotation_about(&Point::BASE, PI).unwrap();
        assert!(r.trace().abs() < 1e-15);
    }

    #[test]
    fn rotation_order_three() {
        let r = rotation_about(&Point::BASE, TAU / 3.0).unwrap();
        assert!((r * r * r).is_identity());
        assert!(!(r * r).is_identity());
    }

    #[test]
    fn rotation_fixes_its_center() {
        let c = pt(0.0, 2.0);
        let r = rotation_about(&c, PI / 2.0).unwrap();
        assert!(hyperbolic_distance(&r.apply(&c), &c) < 1e-12);
        assert!(hyperbolic_distance(&r.apply(&Point::BASE), &Point::BASE) > 0.1);
        // it moves i along the circle of radius ln 2 about 2i
        let moved = r.apply(&Point::BASE);
        assert!((hyperbolic_distance(&moved, &c) - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rotation_rejects_bad_angles() {
        assert!(rotation_about(&Point::BASE, 0.0).is_err());
        assert!(rotation_about(&Point::BASE, TAU).is_err());
        assert!(rotation_about(&Point::BASE, -1.0).is_err());
    }

    #[test]
    fn rotation_is_clockwise() {
        // a small clockwise turn about i moves the point above i to the right
        let r = rotation_about(&Point::BASE, 0.1).unwrap();
        assert!(r.apply(&pt(0.0, 2.0)).u > 0.0);
    }

    #[test]
    fn classify_examples() {
        let s = 2f64.sqrt();
        let g = Isometry::new(s, 0.0, 0.0, 1.0 / s).unwrap();
        let c = classify_isometry(&g);
        assert_eq!(c.kind, IsometryKind::Hyperbolic);
        assert!((c.translation_length.unwrap() - 2f64.ln()).abs() < 1e-12);

        let r = rotation_about(&Point::BASE, PI / 2.0).unwrap();
        let c = classify_isometry(&r);
        assert_eq!(c.kind, IsometryKind::Elliptic);
        assert!((c.angle.unwrap() - PI / 2.0).abs() < 1e-12);

        let r = rotation_about(&pt(0.3, 0.7), 5.0).unwrap();
        assert!((classify_isometry(&r).angle.unwrap() - 5.0).abs() < 1e-9);

        let p = Isometry::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(classify_isometry(&p).kind, IsometryKind::Parabolic);
        assert_eq!(
            classify_isometry(&Isometry::IDENTITY).kind,
            IsometryKind::Identity
        );
    }

    #[test]
    fn bad_determinant() {
        assert!(matches!(
            Isometry::new(2.0, 0.0, 0.0, 1.0),
            Err(GeomError::BadDeterminant { .. })
        ));
    }

    #[test]
    fn sign_canonical() {
        let g = Isometry::new(-1.0, -2.0, 0.0, -1.0).unwrap();
        assert!(g.matrix()[0][0] > 0.0);
        let h = Isometry::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert!(h.matrix()[0][1] > 0.0);
    }

    #[test]
    fn axis_of_diagonal() {
        let s = 2f64.sqrt();
        let g = Isometry::new(s, 0.0, 0.0, 1.0 / s).unwrap();
        let axis = axis_of(&g).unwrap();
        assert!(axis.approx_eq(&Geodesic::vertical(0.0).unwrap()));
        assert_eq!(axis.endpoints().1, BoundaryPoint::Infinity);
    }

    #[test]
    fn axis_of_elliptic_fails() {
        let r = rotation_about(&Point::BASE, 1.0).unwrap();
        assert!(matches!(
            axis_of(&r),
            Err(GeomError::NonHyperbolicElement { .. })
        ));
    }

    #[test]
    fn intersect_examples() {
        let v = Geodesic::vertical(0.0).unwrap();
        let unit = Geodesic::from_reals(-1.0, 1.0).unwrap();
        let p = geodesics_intersect(&v, &unit).unwrap().unwrap();
        assert!(hyperbolic_distance(&p, &Point::BASE) < 1e-12);

        let far = Geodesic::from_reals(2.0, 4.0).unwrap();
        assert_eq!(geodesics_intersect(&unit, &far).unwrap(), None);

        // circles |z - 1/2| = 3/2 and |z - 3/2| = 3/2 meet at u = 1,
        // v = sqrt(9/4 - 1/4) = sqrt 2
        let a = Geodesic::from_reals(-1.0, 2.0).unwrap();
        let b = Geodesic::from_reals(0.0, 3.0).unwrap();
        let p = geodesics_intersect(&a, &b).unwrap().unwrap();
        assert!((p.u - 1.0).abs() < 1e-12 && (p.v - 2f64.sqrt()).abs() < 1e-12);

        assert_eq!(
            geodesics_intersect(&unit, &unit),
            Err(GeomError::IdenticalGeodesics)
        );
    }

    #[test]
    fn point_to_geodesic_examples() {
        let v = Geodesic::vertical(0.0).unwrap();
        assert!(distance_point_to_geodesic(&Point::BASE, &v) < 1e-15);
        // sinh d = |u| / v
        let d = distance_point_to_geodesic(&pt(1.0, 1.0), &v);
        assert!((d - 1f64.asinh()).abs() < 1e-14);
        let unit = Geodesic::from_reals(-1.0, 1.0).unwrap();
        let mut prev = 0.0;
        for k in 1..20 {
            let d = distance_point_to_geodesic(&pt(0.0, 1.0 + k as f64 * 0.5), &unit);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn orthogonal_crossing() {
        let v = Geodesic::vertical(0.0).unwrap();
        let unit = Geodesic::from_reals(-1.0, 1.0).unwrap();
        let a = angle_between_at(&v, &unit, &Point::BASE).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-12);
        assert_eq!(
            angle_between_at(&v, &unit, &pt(0.0, 2.0)),
            Err(GeomError::PointNotOnBoth)
        );
    }

    #[test]
    fn point_at_walks_along_line() {
        let g = Geodesic::from_reals(-3.0, 0.5).unwrap();
        let p0 = g.point_at(0.0);
        let p1 = g.point_at(1.3);
        assert!(distance_point_to_geodesic(&p1, &g) < 1e-12);
        assert!((hyperbolic_distance(&p0, &p1) - 1.3).abs() < 1e-12);
        assert!(
            (hyperbolic_distance(&Point::BASE, &p0) - distance_point_to_geodesic(&Point::BASE, &g))
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn corner_angle_right_angle() {
        let a = corner_angle(&Point::BASE, &pt(0.0, 3.0), &pt(0.6, 0.8));
        assert!((a - PI / 2.0).abs() < 1e-12);
    }
}
