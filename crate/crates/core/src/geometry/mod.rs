//! Point-cloud, mesh, camera and rotation primitives.

pub mod bvh;
pub mod camera;
pub mod kdtree;
pub mod mesh;
pub mod normals;
pub mod planar;
pub mod plane;
pub mod ply;
pub mod ray;
pub mod rotation;

pub use bvh::MeshBvh;
pub use camera::{backproject, project, CameraIntrinsics, DepthImage, OrganizedCloud};
pub use mesh::TriMesh;
pub use normals::estimate_normals;
pub use plane::{fit_plane_lsq, Plane};
pub use ray::{Hit, Ray, Surface};
pub use rotation::{angles_to_frame, approach_angles, frame_to_angles, RotationAngles};

use crate::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type UnitVec3 = nalgebra::Unit<Vec3>;

/// Unordered points with optional per-point normals.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point3>,
    pub normals: Option<Vec<UnitVec3>>,
}

impl PointCloud {
    pub fn new(points: Vec<Point3>) -> Self {
        Self {
            points,
            normals: None,
        }
    }

    pub fn with_normals(points: Vec<Point3>, normals: Vec<UnitVec3>) -> Result<Self> {
        if normals.len() != points.len() {
            return Err(Error::Config(format!(
                "{} normals for {} points",
                normals.len(),
                points.len()
            )));
        }
        Ok(Self {
            points,
            normals: Some(normals),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Right-handed orthonormal pair spanning the plane perpendicular to `dir`.
pub fn orthonormal_basis(dir: &UnitVec3) -> (UnitVec3, UnitVec3) {
    let d = dir.into_inner();
    let helper = if d.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let u = UnitVec3::new_normalize(helper - d * d.dot(&helper));
    let v = UnitVec3::new_normalize(d.cross(&u));
    (u, v)
}
