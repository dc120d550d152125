//! Hyperbolic triangle groups `Δ(p,q,r)`: construction, words, element
//! orders, the Scott element and its axis.

mod ball;
mod word;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ball::{
    group_ball, group_ball_with_cap, BallElement, BallExplorer, GroupBall, DEFAULT_ELEMENT_CAP,
};
pub use word::{Gen, Letter, Word, WordParseError};

use crate::geom::{
    axis_of, classify_isometry, distance_point_to_geodesic, fixed_point, hyperbolic_distance,
    rotation_about, Geodesic, GeomError, Isometry, IsometryKind, Point, EPS_PT,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("index {index} is below 2")]
    InvalidIndex { index: u32 },
    #[error("signature ({p},{q},{r}) is {geometry}, not hyperbolic")]
    NonHyperbolicSignature {
        p: u32,
        q: u32,
        r: u32,
        geometry: Geometry,
    },
    #[error("signature ({p},{q},{r}) is not covered by the Scott word lemma")]
    UncoveredSignature { p: u32, q: u32, r: u32 },
    #[error(
        "group signature ({p},{q},{r}) is not in lemma role order; build the group from {expected}"
    )]
    RoleOrderMismatch {
        p: u32,
        q: u32,
        r: u32,
        expected: String,
    },
    #[error("order cap {cap} is below 2pqr = {min}")]
    CapTooSmall { cap: u64, min: u64 },
    #[error("elliptic element has no order up to {cap}")]
    OrderExceedsCap { cap: u64 },
    #[error("ball enumeration exceeded {cap} elements")]
    BallTooLarge { cap: usize },
    #[error("word `{word}` has infinite order or order above {cap}; the witness search needs finite-order inputs")]
    InfiniteOrderInput { word: String, cap: u64 },
    #[error("no element of infinite order among the candidates")]
    NoWitnessFound,
    #[error("consistency failure: {0}")]
    Consistency(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Geometry {
    Hyperbolic,
    Euclidean,
    Spherical,
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Geometry::Hyperbolic => "HYPERBOLIC",
            Geometry::Euclidean => "EUCLIDEAN",
            Geometry::Spherical => "SPHERICAL",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub geometry: Geometry,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Δ({},{},{})", self.p, self.q, self.r)
    }
}

/// Which tiling the axis family produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TilingCase {
    /// All indices at least 3 or `(p,q,2)` with `p,q >= 5`; no index 3 in a
    /// polygon role, so no triangle tiles.
    #[serde(rename = "case1.1")]
    Case1NoTriangles,
    /// `(3,q,r)` with `q,r >= 3`: triangle tiles appear.
    #[serde(rename = "case1.2")]
    Case1Triangles,
    /// `(4,q,2)` with `q >= 5`.
    #[serde(rename = "case2")]
    Case2,
    /// `(3,q,2)` with `q >= 7`.
    #[serde(rename = "case3")]
    Case3,
}

impl TilingCase {
    pub fn label(self) -> &'static str {
        match self {
            TilingCase::Case1NoTriangles => "case1.1",
            TilingCase::Case1Triangles => "case1.2",
            TilingCase::Case2 => "case2",
            TilingCase::Case3 => "case3",
        }
    }

    pub fn has_triangles(self) -> bool {
        matches!(self, TilingCase::Case1Triangles | TilingCase::Case3)
    }

    /// Color bound the growth argument guarantees.
    pub fn color_bound(self) -> usize {
        if self.has_triangles() {
            7
        } else {
            5
        }
    }

    /// Bound on already-colored crossing lines when a line is colored.
    pub fn conflict_bound(self) -> usize {
        self.color_bound() - 1
    }

    pub fn is_case1(self) -> bool {
        matches!(
            self,
            TilingCase::Case1NoTriangles | TilingCase::Case1Triangles
        )
    }
}

impl fmt::Display for TilingCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn classify_signature(p: u32, q: u32, r: u32) -> Result<Signature, GroupError> {
    for index in [p, q, r] {
        if index < 2 {
            return Err(GroupError::InvalidIndex { index });
        }
    }
    let (p64, q64, r64) = (p as u64, q as u64, r as u64);
    // 1/p + 1/q + 1/r vs 1, cleared of denominators
    let lhs = q64 * r64 + p64 * r64 + p64 * q64;
    let rhs = p64 * q64 * r64;
    let geometry = match lhs.cmp(&rhs) {
        std::cmp::Ordering::Less => Geometry::Hyperbolic,
        std::cmp::Ordering::Equal => Geometry::Euclidean,
        std::cmp::Ordering::Greater => Geometry::Spherical,
    };
    Ok(Signature { p, q, r, geometry })
}

/// The Scott word together with the index arrangement it refers to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScottWord {
    pub word: Word,
    /// Indices in the roles `(x, y, z)` the word assumes.
    pub roles: Signature,
    /// `roles.{p,q,r}[i] = input[permutation[i]]`.
    pub permutation: [usize; 3],
    pub case: TilingCase,
}

fn arrange(indices: [u32; 3]) -> [usize; 3] {
    let [p, _, r] = indices;
    if indices.contains(&2) {
        // rotate the 2 into the z role
        let perm = if r == 2 {
            [0, 1, 2]
        } else if p == 2 {
            [1, 2, 0]
        } else {
            [2, 0, 1]
        };
        let (a, b) = (indices[perm[0]], indices[perm[1]]);
        let special = |n: u32| a.min(b) == n && (a == n || b == n);
        if (special(3) || special(4)) && b < a {
            [perm[1], perm[0], perm[2]]
        } else {
            perm
        }
    } else if let Some(i) = indices.iter().position(|&n| n == 3) {
        // with x of order 3, x y^-1 is conjugate to x^-1 z, so the word
        // cannot tell y from z; the larger index must sit in z for the
        // 2r-gons to be the big tiles
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        if indices[k] < indices[j] {
            [i, k, j]
        } else {
            [i, j, k]
        }
    } else {
        [0, 1, 2]
    }
}

/// Picks the Scott word for a hyperbolic signature.
///
/// Indices are arranged into the roles the word needs: an index 2 goes to
/// `z`; with a 2 present, a 3 (else a 4) goes to `x`. With no 2, a 3 goes to
/// `x` and the other two are sorted ascending. Otherwise the given order is
/// kept, since for three indices at least 4 the order decides which tiles are
/// `2r`-gons.
pub fn scott_word(sig: &Signature) -> Result<ScottWord, GroupError> {
    if sig.geometry != Geometry::Hyperbolic {
        return Err(GroupError::NonHyperbolicSignature {
            p: sig.p,
            q: sig.q,
            r: sig.r,
            geometry: sig.geometry,
        });
    }
    let input = [sig.p, sig.q, sig.r];
    let permutation = arrange(input);
    let [p, q, r] = permutation.map(|i| input[i]);
    let roles = classify_signature(p, q, r)?;
    let xy_inv = Word::new([Letter::new(Gen::X, false), Letter::new(Gen::Y, true)]);
    let (word, case) = if p >= 3 && q >= 3 && r >= 3 {
        let case = if p == 3 || q == 3 {
            TilingCase::Case1Triangles
        } else {
            TilingCase::Case1NoTriangles
        };
        (xy_inv, case)
    } else if r == 2 && p >= 4 && q >= 4 {
        let case = if p == 4 {
            TilingCase::Case2
        } else {
            TilingCase::Case1NoTriangles
        };
        (xy_inv, case)
    } else if r == 2 && p == 3 && q >= 7 {
        (
            Word::gen(Gen::X).concat(&Word::power(Gen::Y, -2)),
            TilingCase::Case3,
        )
    } else {
        return Err(GroupError::UncoveredSignature {
            p: sig.p,
            q: sig.q,
            r: sig.r,
        });
    };
    Ok(ScottWord {
        word,
        roles,
        permutation,
        case,
    })
}

/// Generators and base triangle of a hyperbolic triangle group.
#[derive(Debug, Clone)]
pub struct TriangleGroup {
    pub sig: Signature,
    /// Cone point of `x`; placed at the model basepoint.
    pub vx: Point,
    pub vy: Point,
    pub vz: Point,
    pub x: Isometry,
    pub y: Isometry,
    pub z: Isometry,
    inverses: [Isometry; 3],
    probe: Point,
    diameter: f64,
}

/// `d(X, Y)` for the triangle with angles `pi/p, pi/q, pi/r` at `X, Y, Z`.
pub fn base_side_length(p: u32, q: u32, r: u32) -> f64 {
    let (a, b, c) = (PI / p as f64, PI / q as f64, PI / r as f64);
    ((a.cos() * b.cos() + c.cos()) / (a.sin() * b.sin())).acosh()
}

/// Places `X = i`, `Y = i e^d` and takes `x, y` clockwise through `2pi/p`
/// and `2pi/q`; `z = (xy)^-1` and `Z` is its fixed point.
pub fn build_generators(sig: &Signature) -> Result<TriangleGroup, GroupError> {
    if sig.geometry != Geometry::Hyperbolic {
        return Err(GroupError::NonHyperbolicSignature {
            p: sig.p,
            q: sig.q,
            r: sig.r,
            geometry: sig.geometry,
        });
    }
    let d = base_side_length(sig.p, sig.q, sig.r);
    let vx = Point::BASE;
    let vy = Point::new(0.0, d.exp())?;
    let x = rotation_about(&vx, 2.0 * PI / sig.p as f64)?;
    let y = rotation_about(&vy, 2.0 * PI / sig.q as f64)?;
    let z = (x * y).inverse();
    let vz = fixed_point(&z)
        .ok_or_else(|| GroupError::Consistency(format!("(xy)^-1 is not elliptic in {sig}")))?;
    let class = classify_isometry(&z);
    let expected = 2.0 * PI / sig.r as f64;
    match class.angle {
        Some(a) if (a - expected).abs() < 1e-9 => {}
        _ => {
            return Err(GroupError::Consistency(format!(
                "z is not a clockwise rotation by 2pi/{} (class {:?})",
                sig.r, class
            )))
        }
    }
    let hx = vx.hyperboloid();
    let hy = vy.hyperboloid();
    let hz = vz.hyperboloid();
    let probe = Point::from_hyperboloid([
        hx[0] + hy[0] + hz[0],
        hx[1] + hy[1] + hz[1],
        hx[2] + hy[2] + hz[2],
    ]);
    let diameter = hyperbolic_distance(&vx, &vy)
        .max(hyperbolic_distance(&vy, &vz))
        .max(hyperbolic_distance(&vx, &vz));
    Ok(TriangleGroup {
        sig: *sig,
        vx,
        vy,
        vz,
        x,
        y,
        z,
        inverses: [x.inverse(), y.inverse(), z.inverse()],
        probe,
        diameter,
    })
}

impl TriangleGroup {
    pub fn generator(&self, g: Gen) -> Isometry {
        match g {
            Gen::X => self.x,
            Gen::Y => self.y,
            Gen::Z => self.z,
        }
    }

    pub fn letter(&self, l: Letter) -> Isometry {
        if l.inverse {
            self.inverses[l.gen as usize]
        } else {
            self.generator(l.gen)
        }
    }

    pub fn cone_point(&self, g: Gen) -> Point {
        match g {
            Gen::X => self.vx,
            Gen::Y => self.vy,
            Gen::Z => self.vz,
        }
    }

    /// An interior point of the base triangle; its stabilizer is trivial.
    pub fn probe_point(&self) -> Point {
        self.probe
    }

    /// Longest side of the base triangle.
    pub fn triangle_diameter(&self) -> f64 {
        self.diameter
    }

    /// Extra radius that makes a pruned breadth-first search complete.
    ///
    /// The base triangle and its mirror in side `XY` form a fundamental
    /// domain `F` whose sides are paired by `x` and `y`. The translates of
    /// `F` meeting a disk are connected through shared sides, and each lies
    /// within the circumradius of `F` about the probe of its probe image. So
    /// every element whose probe image lies within `rho` of the basepoint is
    /// reached through prefixes whose images lie within `rho + slack`.
    pub fn prune_slack(&self) -> f64 {
        // the mirror of Z is one of x.Z, x^-1.Z; take both
        let corners = [
            self.vx,
            self.vy,
            self.vz,
            self.x.apply(&self.vz),
            self.inverses[Gen::X as usize].apply(&self.vz),
        ];
        corners
            .iter()
            .map(|c| hyperbolic_distance(&self.probe, c))
            .fold(0.0, f64::max)
            + 1e-6
    }

    /// Every element `g` with `d(i, g.probe) <= radius`, found by a pruned
    /// search run to exhaustion.
    pub fn elements_within(&self, radius: f64, cap: usize) -> Result<GroupBall, GroupError> {
        let bound = radius.max(self.diameter) + self.prune_slack();
        let mut ex = BallExplorer::new(self, Some((Point::BASE, bound)), cap);
        while !ex.exhausted() {
            ex.step()?;
        }
        Ok(ex.into_ball())
    }
}

/// Left-to-right product of generator matrices.
pub fn evaluate_word(group: &TriangleGroup, w: &Word) -> Isometry {
    w.letters()
        .iter()
        .fold(Isometry::IDENTITY, |acc, &l| acc * group.letter(l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("INFINITE"),
        }
    }
}

/// Default order cap `4pqr`.
pub fn default_order_cap(sig: &Signature) -> u64 {
    4 * sig.p as u64 * sig.q as u64 * sig.r as u64
}

pub fn element_order(group: &TriangleGroup, g: &Isometry, cap: u64) -> Result<Order, GroupError> {
    let s = &group.sig;
    let min = 2 * s.p as u64 * s.q as u64 * s.r as u64;
    if cap < min {
        return Err(GroupError::CapTooSmall { cap, min });
    }
    match classify_isometry(g).kind {
        IsometryKind::Identity => Ok(Order::Finite(1)),
        IsometryKind::Hyperbolic | IsometryKind::Parabolic => Ok(Order::Infinite),
        IsometryKind::Elliptic => {
            let mut acc = *g;
            for n in 2..=cap {
                acc = acc * *g;
                if acc.is_identity() {
                    return Ok(Order::Finite(n));
                }
            }
            Err(GroupError::OrderExceedsCap { cap })
        }
    }
}

/// Axis of the Scott element. The group must be built from the role-ordered
/// signature returned by [`scott_word`].
pub fn scott_axis(group: &TriangleGroup) -> Result<Geodesic, GroupError> {
    let sw = scott_word(&group.sig)?;
    if sw.roles != group.sig {
        return Err(GroupError::RoleOrderMismatch {
            p: group.sig.p,
            q: group.sig.q,
            r: group.sig.r,
            expected: sw.roles.to_string(),
        });
    }
    let g = evaluate_word(group, &sw.word);
    match axis_of(&g) {
        Ok(axis) => Ok(axis),
        Err(GeomError::NonHyperbolicElement { trace }) => Err(GroupError::Consistency(format!(
            "Scott element {} of {} has trace {trace}, not hyperbolic",
            sw.word, group.sig
        ))),
        Err(e) => Err(e.into()),
    }
}

/// Searches `u, u v^{±1}, u v^{±2}` for `u, v` among `a, b, ab` (in that
/// order) and returns the first candidate of infinite order.
pub fn lemma25_search(
    group: &TriangleGroup,
    a: &Word,
    b: &Word,
    cap: u64,
) -> Result<Word, GroupError> {
    let ab = a.concat(b);
    let base = [a.clone(), b.clone(), ab];
    for w in &base {
        match element_order(group, &evaluate_word(group, w), cap) {
            Ok(Order::Finite(_)) => {}
            Ok(Order::Infinite) | Err(GroupError::OrderExceedsCap { .. }) => {
                return Err(GroupError::InfiniteOrderInput {
                    word: w.to_string(),
                    cap,
                })
            }
            Err(e) => return Err(e),
        }
    }
    for u in &base {
        let mut candidates = vec![u.clone()];
        for v in &base {
            for e in [1, -1, 2, -2] {
                candidates.push(u.concat(&v.pow(e)));
            }
        }
        for c in candidates {
            let g = evaluate_word(group, &c);
            if classify_isometry(&g).kind == IsometryKind::Hyperbolic {
                return Ok(c);
            }
        }
    }
    Err(GroupError::NoWitnessFound)
}

/// Default separation threshold for cone-point incidence.
pub const DEFAULT_SEPARATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IncidenceStatus {
    Incident,
    Separated,
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitIncidence {
    pub status: IncidenceStatus,
    /// Minimum distance from an orbit point in the disk to a line.
    pub min_distance: f64,
    pub orbit_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncidenceReport {
    #[serde(rename = "X")]
    pub x: OrbitIncidence,
    #[serde(rename = "Y")]
    pub y: OrbitIncidence,
    #[serde(rename = "Z")]
    pub z: OrbitIncidence,
}

impl IncidenceReport {
    pub fn get(&self, g: Gen) -> &OrbitIncidence {
        match g {
            Gen::X => &self.x,
            Gen::Y => &self.y,
            Gen::Z => &self.z,
        }
    }

    pub fn any_ambiguous(&self) -> bool {
        [&self.x, &self.y, &self.z]
            .iter()
            .any(|o| o.status == IncidenceStatus::Ambiguous)
    }
}

/// Orbit points of the cone point of `gen` within `radius` of the basepoint.
pub fn orbit_points(
    group: &TriangleGroup,
    gen: Gen,
    radius: f64,
    cap: usize,
) -> Result<Vec<Point>, GroupError> {
    let ball = group.elements_within(radius + group.triangle_diameter(), cap)?;
    let v = group.cone_point(gen);
    let mut pts: Vec<Point> = Vec::new();
    for e in ball.elements() {
        let p = e.isometry.apply(&v);
        if hyperbolic_distance(&Point::BASE, &p) <= radius
            && !pts.iter().any(|q| hyperbolic_distance(q, &p) < EPS_PT)
        {
            pts.push(p);
        }
    }
    Ok(pts)
}

pub fn cone_point_incidence(
    group: &TriangleGroup,
    lines: &[Geodesic],
    radius: f64,
    separation: f64,
) -> Result<IncidenceReport, GroupError> {
    if lines.is_empty() {
        return Err(GroupError::Consistency("empty line set".into()));
    }
    let per_orbit = |gen: Gen| -> Result<OrbitIncidence, GroupError> {
        let pts = orbit_points(group, gen, radius, DEFAULT_ELEMENT_CAP)?;
        let min_distance = pts
            .iter()
            .flat_map(|p| lines.iter().map(move |l| distance_point_to_geodesic(p, l)))
            .fold(f64::INFINITY, f64::min);
        let status = if min_distance < EPS_PT {
            IncidenceStatus::Incident
        } else if min_distance > separation {
            IncidenceStatus::Separated
        } else {
            IncidenceStatus::Ambiguous
        };
        Ok(OrbitIncidence {
            status,
            min_distance,
            orbit_points: pts.len(),
        })
    };
    Ok(IncidenceReport {
        x: per_orbit(Gen::X)?,
        y: per_orbit(Gen::Y)?,
        z: per_orbit(Gen::Z)?,
    })
}
