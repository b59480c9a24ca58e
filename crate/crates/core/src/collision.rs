//! Capsule proxies for end-effector bodies tested against scene objects.

use crate::geometry::Point3;
use crate::scene::{ObjectInstance, SceneModel};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum of a unimodal function on `[lo, hi]` by golden-section search.
pub fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: u32) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc < fd { (c, fc) } else { (d, fd) };
    for t in [lo, hi] {
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

/// Set of points within `radius` of the segment `a`–`b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capsule {
    pub a: Point3,
    pub b: Point3,
    pub radius: f64,
}

impl Capsule {
    pub fn new(a: Point3, b: Point3, radius: f64) -> Self {
        Self { a, b, radius }
    }

    fn at(&self, t: f64) -> Point3 {
        self.a + (self.b - self.a) * t
    }

    fn axis_distance(&self, p: &Point3) -> f64 {
        let ab = self.b - self.a;
        let len2 = ab.norm_squared();
        let t = if len2 > 0.0 {
            ((p - self.a).dot(&ab) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (p - self.at(t)).norm()
    }

    /// Signed clearance to the object: negative when they overlap. Exact up
    /// to the line-search tolerance, since object distance fields are convex.
    pub fn clearance(&self, obj: &ObjectInstance) -> f64 {
        golden_min(|t| obj.sdf(&self.at(t)), 0.0, 1.0, 60).1 - self.radius
    }

    pub fn hits_object(&self, obj: &ObjectInstance) -> bool {
        let far = self.axis_distance(&obj.center()) - obj.shape.bounding_radius() - self.radius;
        far <= 0.0 && self.clearance(obj) < 0.0
    }

    /// Penetrates the table plane `z = 0`.
    pub fn hits_table(&self) -> bool {
        self.a.z.min(self.b.z) < self.radius
    }

    /// First object (in scene order) the capsule overlaps, skipping `skip`.
    pub fn first_hit(&self, scene: &SceneModel, skip: Option<u32>) -> Option<u32> {
        scene
            .objects
            .iter()
            .filter(|o| Some(o.object_id) != skip)
            .find(|o| self.hits_object(o))
            .map(|o| o.object_id)
    }
}
