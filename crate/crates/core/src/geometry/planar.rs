//! Table-plane geometry: convex polygons, discs, and their signed separation.

use serde::{Deserialize, Serialize};

pub type Vec2 = nalgebra::Vector2<f64>;

fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Convex hull in counter-clockwise order without collinear vertices.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if cross(&(b - a), &(p - a)) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(*p);
        }
        hull.pop();
    }
    hull
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn is_valid(&self) -> bool {
        self.x_max > self.x_min && self.y_max > self.y_min
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Vec2::new(self.x_min, self.y_min),
            Vec2::new(self.x_max, self.y_min),
            Vec2::new(self.x_max, self.y_max),
            Vec2::new(self.x_min, self.y_max),
        ])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    /// Counter-clockwise vertices.
    pub vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Takes the hull of the given points.
    pub fn new(points: Vec<Vec2>) -> Self {
        Self {
            vertices: convex_hull(&points),
        }
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.signed_distance(p) <= 1e-12
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| cross(&self.vertices[i], &self.vertices[(i + 1) % n]))
            .sum::<f64>()
            * 0.5
    }

    fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Negative inside (depth to the nearest edge), positive outside.
    pub fn signed_distance(&self, p: &Vec2) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (p - self.vertices[0]).norm(),
            _ => {
                let mut inside = self.vertices.len() >= 3;
                let mut dist = f64::INFINITY;
                for (a, b) in self.edges() {
                    dist = dist.min(segment_distance(p, &a, &b));
                    if cross(&(b - a), &(p - a)) < 0.0 {
                        inside = false;
                    }
                }
                if inside {
                    -dist
                } else {
                    dist
                }
            }
        }
    }

    pub fn translated(&self, d: &Vec2) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v + d).collect(),
        }
    }

    /// Most negative projection overlap across edge normals of both polygons
    /// (penetration depth), or the positive gap when separated along an axis.
    fn sat_gap(&self, other: &ConvexPolygon) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for poly in [self, other] {
            for (a, b) in poly.edges() {
                let e = b - a;
                let axis = Vec2::new(e.y, -e.x).normalize();
                let (mut a0, mut a1) = (f64::INFINITY, f64::NEG_INFINITY);
                for v in &self.vertices {
                    let s = v.dot(&axis);
                    a0 = a0.min(s);
                    a1 = a1.max(s);
                }
                let (mut b0, mut b1) = (f64::INFINITY, f64::NEG_INFINITY);
                for v in &other.vertices {
                    let s = v.dot(&axis);
                    b0 = b0.min(s);
                    b1 = b1.max(s);
                }
                best = best.max((b0 - a1).max(a0 - b1));
            }
        }
        best
    }

    pub fn separation(&self, other: &ConvexPolygon) -> f64 {
        let gap = self.sat_gap(other);
        if gap <= 0.0 {
            return gap;
        }
        let mut d = f64::INFINITY;
        for v in &self.vertices {
            for (a, b) in other.edges() {
                d = d.min(segment_distance(v, &a, &b));
            }
        }
        for v in &other.vertices {
            for (a, b) in self.edges() {
                d = d.min(segment_distance(v, &a, &b));
            }
        }
        d
    }
}

pub fn segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    let t = if len2 > 0.0 {
        ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

/// Table-plane shadow of an upright object.
#[derive(Clone, Debug, PartialEq)]
pub enum Footprint {
    Disc { center: Vec2, radius: f64 },
    Polygon(ConvexPolygon),
}

impl Footprint {
    /// Signed distance between the two regions: positive gap when disjoint,
    /// negative penetration depth when overlapping. Exact for discs and
    /// convex polygons, and convex under translation of either argument.
    pub fn separation(&self, other: &Footprint) -> f64 {
        match (self, other) {
            (Footprint::Disc { center: a, radius: ra }, Footprint::Disc { center: b, radius: rb }) => {
                (a - b).norm() - ra - rb
            }
            (Footprint::Disc { center, radius }, Footprint::Polygon(p))
            | (Footprint::Polygon(p), Footprint::Disc { center, radius }) => p.signed_distance(center) - radius,
            (Footprint::Polygon(a), Footprint::Polygon(b)) => a.separation(b),
        }
    }

    pub fn translated(&self, d: &Vec2) -> Footprint {
        match self {
            Footprint::Disc { center, radius } => Footprint::Disc {
                center: center + d,
                radius: *radius,
            },
            Footprint::Polygon(p) => Footprint::Polygon(p.translated(d)),
        }
    }

    pub fn signed_distance(&self, p: &Vec2) -> f64 {
        match self {
            Footprint::Disc { center, radius } => (p - center).norm() - radius,
            Footprint::Polygon(poly) => poly.signed_distance(p),
        }
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        self.signed_distance(p) <= 0.0
    }

    pub fn area(&self) -> f64 {
        match self {
            Footprint::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
            Footprint::Polygon(p) => p.area(),
        }
    }

    /// Boundary samples; `n` points for a disc, the vertices for a polygon.
    pub fn outline(&self, n: usize) -> Vec<Vec2> {
        match self {
            Footprint::Disc { center, radius } => (0..n)
                .map(|k| {
                    let a = std::f64::consts::TAU * k as f64 / n as f64;
                    center + Vec2::new(a.cos(), a.sin()) * *radius
                })
                .collect(),
            Footprint::Polygon(p) => p.vertices.clone(),
        }
    }

    /// Is the region inside `rect`?
    pub fn inside(&self, rect: &Rect) -> bool {
        match self {
            Footprint::Disc { center, radius } => {
                center.x - radius >= rect.x_min
                    && center.x + radius <= rect.x_max
                    && center.y - radius >= rect.y_min
                    && center.y + radius <= rect.y_max
            }
            Footprint::Polygon(p) => p.vertices.iter().all(|v| rect.contains(v)),
        }
    }

    /// Distance along a ray to the first boundary crossing into the region.
    /// Zero when the origin is already inside.
    pub fn ray_entry(&self, origin: &Vec2, dir: &Vec2) -> Option<f64> {
        if self.contains(origin) {
            return Some(0.0);
        }
        match self {
            Footprint::Disc { center, radius } => {
                let oc = origin - center;
                let b = oc.dot(dir);
                let c = oc.norm_squared() - radius * radius;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let t = -b - disc.sqrt();
                (t >= 0.0).then_some(t)
            }
            Footprint::Polygon(p) => {
                let mut t_enter = 0.0f64;
                let mut t_exit = f64::INFINITY;
                for (a, b) in p.edges() {
                    let e = b - a;
                    let outward = Vec2::new(e.y, -e.x);
                    let denom = outward.dot(dir);
                    let num = outward.dot(&(a - origin));
                    if denom.abs() < 1e-300 {
                        if num < 0.0 {
                            return None;
                        }
                        continue;
                    }
                    let t = num / denom;
                    if denom < 0.0 {
                        t_enter = t_enter.max(t);
                    } else {
                        t_exit = t_exit.min(t);
                    }
                }
                (t_enter <= t_exit).then_some(t_enter)
            }
        }
    }
}
