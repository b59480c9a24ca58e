use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::ray::RAY_EPS;
use crate::geometry::{Point3, TriMesh, UnitVec3, Vec3};
use crate::{Error, Result};

/// Upright primitive, centered on its own origin with the z axis vertical.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PrimitiveShape {
    /// Extents along local x, y, z.
    Box { w: f64, d: f64, h: f64 },
    Cylinder { r: f64, h: f64 },
    Sphere { r: f64 },
}

impl PrimitiveShape {
    pub fn validate(&self) -> Result<()> {
        let dims: &[f64] = match self {
            PrimitiveShape::Box { w, d, h } => &[*w, *d, *h],
            PrimitiveShape::Cylinder { r, h } => &[*r, *h],
            PrimitiveShape::Sphere { r } => &[*r],
        };
        if dims.iter().all(|v| v.is_finite() && *v > 0.0) {
            Ok(())
        } else {
            Err(Error::Validation(format!("shape dimensions must be positive: {self:?}")))
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PrimitiveShape::Box { .. } => "box",
            PrimitiveShape::Cylinder { .. } => "cylinder",
            PrimitiveShape::Sphere { .. } => "sphere",
        }
    }

    pub fn height(&self) -> f64 {
        match *self {
            PrimitiveShape::Box { h, .. } | PrimitiveShape::Cylinder { h, .. } => h,
            PrimitiveShape::Sphere { r } => 2.0 * r,
        }
    }

    pub fn half_height(&self) -> f64 {
        0.5 * self.height()
    }

    /// Radius of the smallest origin-centered sphere containing the shape.
    pub fn bounding_radius(&self) -> f64 {
        match *self {
            PrimitiveShape::Box { w, d, h } => 0.5 * (w * w + d * d + h * h).sqrt(),
            PrimitiveShape::Cylinder { r, h } => (r * r + 0.25 * h * h).sqrt(),
            PrimitiveShape::Sphere { r } => r,
        }
    }

    /// Radius of the footprint's circumscribed circle.
    pub fn planar_radius(&self) -> f64 {
        match *self {
            PrimitiveShape::Box { w, d, .. } => 0.5 * (w * w + d * d).sqrt(),
            PrimitiveShape::Cylinder { r, .. } | PrimitiveShape::Sphere { r } => r,
        }
    }

    /// Exact signed distance in the local frame.
    pub fn sdf(&self, p: &Point3) -> f64 {
        match *self {
            PrimitiveShape::Box { w, d, h } => {
                let q = Vec3::new(p.x.abs() - 0.5 * w, p.y.abs() - 0.5 * d, p.z.abs() - 0.5 * h);
                let outside = Vec3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
                outside + q.x.max(q.y).max(q.z).min(0.0)
            }
            PrimitiveShape::Cylinder { r, h } => {
                let dx = p.x.hypot(p.y) - r;
                let dz = p.z.abs() - 0.5 * h;
                dx.max(dz).min(0.0) + dx.max(0.0).hypot(dz.max(0.0))
            }
            PrimitiveShape::Sphere { r } => p.coords.norm() - r,
        }
    }

    /// Nearest intersection with `t > RAY_EPS` in the local frame; the exit
    /// point when the origin is inside. `dir` need not be normalized.
    pub fn raycast(&self, o: &Point3, dir: &Vec3) -> Option<(f64, UnitVec3)> {
        match *self {
            PrimitiveShape::Box { w, d, h } => {
                let half = [0.5 * w, 0.5 * d, 0.5 * h];
                let mut enter = (f64::NEG_INFINITY, Vec3::zeros());
                let mut exit = (f64::INFINITY, Vec3::zeros());
                for k in 0..3 {
                    slab(o[k], dir[k], half[k], axis(k), &mut enter, &mut exit)?;
                }
                pick(enter, exit)
            }
            PrimitiveShape::Cylinder { r, h } => {
                let mut enter = (f64::NEG_INFINITY, Vec3::zeros());
                let mut exit = (f64::INFINITY, Vec3::zeros());
                slab(o.z, dir.z, 0.5 * h, Vec3::z(), &mut enter, &mut exit)?;
                let a = dir.x * dir.x + dir.y * dir.y;
                let c = o.x * o.x + o.y * o.y - r * r;
                if a < 1e-300 {
                    if c > 0.0 {
                        return None;
                    }
                } else {
                    let b = o.x * dir.x + o.y * dir.y;
                    let disc = b * b - a * c;
                    if disc < 0.0 {
                        return None;
                    }
                    let sq = disc.sqrt();
                    let (t0, t1) = ((-b - sq) / a, (-b + sq) / a);
                    let radial = |t: f64| Vec3::new(o.x + t * dir.x, o.y + t * dir.y, 0.0);
                    if t0 > enter.0 {
                        enter = (t0, radial(t0));
                    }
                    if t1 < exit.0 {
                        exit = (t1, radial(t1));
                    }
                    if enter.0 > exit.0 {
                        return None;
                    }
                }
                pick(enter, exit)
            }
            PrimitiveShape::Sphere { r } => {
                let a = dir.norm_squared();
                let b = o.coords.dot(dir);
                let c = o.coords.norm_squared() - r * r;
                let disc = b * b - a * c;
                if disc < 0.0 || a == 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let (t0, t1) = ((-b - sq) / a, (-b + sq) / a);
                let at = |t: f64| (o + dir * t).coords;
                pick((t0, at(t0)), (t1, at(t1)))
            }
        }
    }

    /// Watertight mesh of the shape in its local frame.
    pub fn mesh(&self) -> TriMesh {
        match *self {
            PrimitiveShape::Box { w, d, h } => TriMesh::cuboid(0.5 * w, 0.5 * d, 0.5 * h),
            PrimitiveShape::Cylinder { r, h } => TriMesh::cylinder(r, 0.5 * h, 48),
            PrimitiveShape::Sphere { r } => TriMesh::sphere(r, 24, 48),
        }
    }

    /// Area of the surface seen from straight above.
    pub fn top_area(&self) -> f64 {
        match *self {
            PrimitiveShape::Box { w, d, .. } => w * d,
            PrimitiveShape::Cylinder { r, .. } => PI * r * r,
            PrimitiveShape::Sphere { r } => TAU * r * r,
        }
    }

    /// Uniform sample of the surface seen from straight above, with its
    /// outward normal, in the local frame.
    pub fn sample_top<R: Rng + ?Sized>(&self, rng: &mut R) -> (Point3, UnitVec3) {
        match *self {
            PrimitiveShape::Box { w, d, h } => (
                Point3::new(
                    (rng.random::<f64>() - 0.5) * w,
                    (rng.random::<f64>() - 0.5) * d,
                    0.5 * h,
                ),
                UnitVec3::new_unchecked(Vec3::z()),
            ),
            PrimitiveShape::Cylinder { r, h } => {
                let rho = r * rng.random::<f64>().sqrt();
                let phi = TAU * rng.random::<f64>();
                (
                    Point3::new(rho * phi.cos(), rho * phi.sin(), 0.5 * h),
                    UnitVec3::new_unchecked(Vec3::z()),
                )
            }
            PrimitiveShape::Sphere { r } => {
                let z: f64 = rng.random();
                let phi = TAU * rng.random::<f64>();
                let s = (1.0 - z * z).max(0.0).sqrt();
                let n = Vec3::new(s * phi.cos(), s * phi.sin(), z);
                (Point3::from(n * r), UnitVec3::new_normalize(n))
            }
        }
    }
}

fn axis(k: usize) -> Vec3 {
    let mut v = Vec3::zeros();
    v[k] = 1.0;
    v
}

/// Clips the running `[enter, exit]` interval against `|o + t·d| ≤ half` on
/// one axis, tracking the outward normal of the limiting face.
fn slab(o: f64, d: f64, half: f64, e: Vec3, enter: &mut (f64, Vec3), exit: &mut (f64, Vec3)) -> Option<()> {
    if d.abs() < 1e-300 {
        return (o.abs() <= half).then_some(());
    }
    let (mut ta, mut tb) = ((-half - o) / d, (half - o) / d);
    let (mut na, mut nb) = (-e, e);
    if ta > tb {
        std::mem::swap(&mut ta, &mut tb);
        std::mem::swap(&mut na, &mut nb);
    }
    if ta > enter.0 {
        *enter = (ta, na);
    }
    if tb < exit.0 {
        *exit = (tb, nb);
    }
    (enter.0 <= exit.0).then_some(())
}

fn pick(enter: (f64, Vec3), exit: (f64, Vec3)) -> Option<(f64, UnitVec3)> {
    let (t, n) = if enter.0 > RAY_EPS {
        enter
    } else if exit.0 > RAY_EPS {
        exit
    } else {
        return None;
    };
    let norm = n.norm();
    (norm > 0.0).then(|| (t, UnitVec3::new_unchecked(n / norm)))
}
