use super::{Point3, UnitVec3};

#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: Point3,
    pub dir: UnitVec3,
}

impl Ray {
    pub fn new(origin: Point3, dir: UnitVec3) -> Self {
        Self { origin, dir }
    }

    pub fn at(&self, t: f64) -> Point3 {
        self.origin + self.dir.into_inner() * t
    }
}

/// Nearest intersection along a ray. `normal` is the outward surface normal,
/// independent of which side the ray arrived from.
#[derive(Clone, Copy, Debug)]
pub struct Hit {
    pub t: f64,
    pub point: Point3,
    pub normal: UnitVec3,
}

/// Anything a ray can be cast against.
pub trait Surface {
    fn raycast(&self, ray: &Ray) -> Option<Hit>;
}

impl<S: Surface + ?Sized> Surface for &S {
    fn raycast(&self, ray: &Ray) -> Option<Hit> {
        (**self).raycast(ray)
    }
}

/// Rays starting closer than this to a surface do not report it.
pub const RAY_EPS: f64 = 1e-10;
