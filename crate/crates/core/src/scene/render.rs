use serde::{Deserialize, Serialize};

use super::model::SceneModel;
use crate::geometry::planar::Rect;
use crate::geometry::{CameraIntrinsics, DepthImage, Point3, Ray, UnitVec3, Vec3};
use crate::par::{self, Execution};
use crate::segmentation::InstanceMap;
use crate::Result;

/// Pinhole camera at `eye` looking straight down. Camera axes: x along world
/// x, y along world −y, z along world −z.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopDownCamera {
    pub eye: [f64; 3],
    pub intrinsics: CameraIntrinsics,
}

impl TopDownCamera {
    /// 1024 × 512 camera 1.3 m above the table center whose image spans the
    /// table width.
    pub fn over_table(table: &Rect) -> Self {
        let (width, height) = (1024u32, 512u32);
        let eye_z = 1.3;
        let half_w = 0.5 * (table.x_max - table.x_min);
        let f = 0.5 * width as f64 * eye_z / half_w;
        Self {
            eye: [
                0.5 * (table.x_min + table.x_max),
                0.5 * (table.y_min + table.y_max),
                eye_z,
            ],
            intrinsics: CameraIntrinsics {
                fx: f,
                fy: f,
                cx: 0.5 * width as f64,
                cy: 0.5 * height as f64,
                width,
                height,
            },
        }
    }

    pub fn world_to_camera(&self, p: &Point3) -> Point3 {
        let [ex, ey, ez] = self.eye;
        Point3::new(p.x - ex, ey - p.y, ez - p.z)
    }

    pub fn camera_to_world(&self, p: &Point3) -> Point3 {
        let [ex, ey, ez] = self.eye;
        Point3::new(p.x + ex, ey - p.y, ez - p.z)
    }

    /// World-frame ray through the integer pixel coordinate `(u, v)`.
    pub fn pixel_ray(&self, u: u32, v: u32) -> Ray {
        let k = &self.intrinsics;
        let dx = (u as f64 - k.cx) / k.fx;
        let dy = (v as f64 - k.cy) / k.fy;
        let [ex, ey, ez] = self.eye;
        Ray::new(Point3::new(ex, ey, ez), UnitVec3::new_normalize(Vec3::new(dx, -dy, -1.0)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Rendering {
    /// Camera-frame depth in meters; 0 where nothing was hit.
    pub depth: DepthImage,
    pub instances: InstanceMap,
    /// Object id of each instance, indexed by `instance id − 1`.
    pub instance_objects: Vec<u32>,
    /// Object centroid of each instance in the camera frame.
    pub centers: Vec<Point3>,
}

pub fn render_depth(scene: &SceneModel, camera: &TopDownCamera) -> Result<Rendering> {
    camera.intrinsics.validate()?;
    let (w, h) = (camera.intrinsics.width, camera.intrinsics.height);
    let rows = par::map_range(Execution::default(), h as usize, |v| {
        let mut depth = Vec::with_capacity(w as usize);
        let mut owner = Vec::with_capacity(w as usize);
        for u in 0..w {
            match scene.raycast(&camera.pixel_ray(u, v as u32)) {
                Some(hit) => {
                    depth.push(camera.eye[2] - hit.hit.point.z);
                    owner.push(hit.object_id.unwrap_or(0));
                }
                None => {
                    depth.push(0.0);
                    owner.push(0);
                }
            }
        }
        (depth, owner)
    });
    let mut depth = Vec::with_capacity((w * h) as usize);
    let mut raw = Vec::with_capacity((w * h) as usize);
    for (d, o) in rows {
        depth.extend(d);
        raw.extend(o);
    }
    let (instances, instance_objects) = InstanceMap::canonical(w, h, &raw)?;
    let centers = instance_objects
        .iter()
        .map(|id| {
            let obj = scene.object(*id).expect("rendered object exists");
            camera.world_to_camera(&obj.center())
        })
        .collect();
    Ok(Rendering {
        depth: DepthImage::new(w, h, depth)?,
        instances,
        instance_objects,
        centers,
    })
}
