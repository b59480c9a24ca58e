//! Parallel-jaw grasp evaluation: contact finding, Ferrari-Canny quality,
//! and dense grasp labeling.

pub mod hull;
pub mod quality;

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::collision::Capsule;
use crate::geometry::{angles_to_frame, Point3, PointCloud, Ray, RotationAngles, UnitVec3};
use crate::par::{self, Execution};
use crate::pose_codec::{GraspConfig, GRIPPER_MAX_WIDTH};
use crate::scene::{sample_cloud, SceneModel};
use crate::suction::OWNER_TOLERANCE;
use crate::{Error, Result};

pub use quality::{contact_wrenches, epsilon_quality, ferrari_canny, normalizer, ContactPair, FrictionModel, Wrench};

/// Finger and palm proxies of the parallel-jaw gripper.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GripperModel {
    pub max_width: f64,
    pub finger_radius: f64,
    pub finger_length: f64,
    pub palm_radius: f64,
}

impl Default for GripperModel {
    fn default() -> Self {
        Self {
            max_width: GRIPPER_MAX_WIDTH,
            finger_radius: 0.002,
            finger_length: 0.05,
            palm_radius: 0.01,
        }
    }
}

impl GripperModel {
    pub fn validate(&self) -> Result<()> {
        let ok = self.max_width > 0.0 && self.finger_radius > 0.0 && self.finger_length > 0.0 && self.palm_radius > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid gripper {self:?}")))
        }
    }

    /// Two fingers at the open jaw positions and the palm bar joining them.
    pub fn body(&self, g: &GraspConfig, n: &UnitVec3, r: &UnitVec3) -> [Capsule; 3] {
        let (n, r) = (n.into_inner(), r.into_inner());
        let half = 0.5 * g.width + self.finger_radius;
        let tip1 = g.center - r * half;
        let tip2 = g.center + r * half;
        let back = n * self.finger_length;
        [
            Capsule::new(tip1, tip1 - back, self.finger_radius),
            Capsule::new(tip2, tip2 - back, self.finger_radius),
            Capsule::new(tip1 - back, tip2 - back, self.palm_radius),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspParams {
    pub gripper: GripperModel,
    pub friction: FrictionModel,
    /// Top-down grasp centers sit this far below the sampled surface point.
    pub depth: f64,
    /// Jaw opening added to the contact separation.
    pub clearance: f64,
    /// Number of evenly spaced jaw axes tried per surface point.
    pub axis_samples: u32,
}

impl Default for GraspParams {
    fn default() -> Self {
        Self {
            gripper: GripperModel::default(),
            friction: FrictionModel::default(),
            depth: 0.015,
            clearance: 0.005,
            axis_samples: 6,
        }
    }
}

impl GraspParams {
    pub fn validate(&self) -> Result<()> {
        self.gripper.validate()?;
        self.friction.validate()?;
        if !(self.depth >= 0.0) || !(self.clearance >= 0.0) || self.axis_samples == 0 {
            return Err(Error::Config("grasp depth, clearance and axis samples must be non-negative".into()));
        }
        Ok(())
    }
}

/// Closes the jaws of `g` along its grasp axis. Returns the first-hit
/// contacts when both land on the same object no wider than the opening and
/// the gripper body clears the scene and table.
pub fn find_contacts(scene: &SceneModel, g: &GraspConfig, gripper: &GripperModel) -> Option<ContactPair> {
    if !(g.width > 0.0 && g.width <= gripper.max_width) {
        return None;
    }
    let (n, r) = angles_to_frame(&g.angles).ok()?;
    let half = 0.5 * g.width;
    let jaw1 = g.center - r.into_inner() * half;
    let jaw2 = g.center + r.into_inner() * half;
    if scene.objects.iter().any(|o| o.sdf(&jaw1) <= 0.0 || o.sdf(&jaw2) <= 0.0) {
        return None;
    }
    let h1 = scene.raycast_objects(&Ray::new(jaw1, r), None)?;
    let h2 = scene.raycast_objects(&Ray::new(jaw2, -r), None)?;
    if h1.object_id != h2.object_id || h1.hit.t + h2.hit.t >= g.width {
        return None;
    }
    let id = h1.object_id?;
    if gripper
        .body(g, &n, &r)
        .iter()
        .any(|c| c.hits_table() || c.first_hit(scene, None).is_some())
    {
        return None;
    }
    let obj = scene.object(id)?;
    Some(ContactPair {
        p1: h1.hit.point,
        p2: h2.hit.point,
        n1: -h1.hit.normal,
        n2: -h2.hit.normal,
        object_id: id,
        center: obj.center(),
        torque_radius: obj.shape.bounding_radius(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspAnnotation {
    pub object_id: u32,
    /// Surface point that proposed the grasp; the encoding reference.
    pub reference: Point3,
    pub config: GraspConfig,
}

/// Top-down grasp candidates proposed by one surface point of `object_id`,
/// re-centered on the contact midpoint and scored. Only force-closure grasps
/// are returned.
pub fn grasps_at_point(scene: &SceneModel, object_id: u32, p: &Point3, params: &GraspParams) -> Vec<GraspAnnotation> {
    let Some(obj) = scene.object(object_id) else {
        return Vec::new();
    };
    let z = (p.z - params.depth).max(obj.center().z.min(p.z));
    let center = Point3::new(p.x, p.y, z);
    let mut out = Vec::new();
    for k in 0..params.axis_samples {
        let theta3 = PI * k as f64 / params.axis_samples as f64;
        let angles = RotationAngles {
            theta1: 0.0,
            theta2: FRAC_PI_2,
            theta3,
        };
        let probe = GraspConfig {
            center,
            angles,
            width: params.gripper.max_width,
            score: 0.0,
        };
        let Some(c0) = find_contacts(scene, &probe, &params.gripper) else {
            continue;
        };
        if c0.object_id != object_id {
            continue;
        }
        let width = (c0.separation() + params.clearance).min(params.gripper.max_width);
        let mut g = GraspConfig {
            center: nalgebra::center(&c0.p1, &c0.p2),
            angles,
            width,
            score: 0.0,
        };
        let Some(c) = find_contacts(scene, &g, &params.gripper) else {
            continue;
        };
        if c.object_id != object_id {
            continue;
        }
        let q = ferrari_canny(&c, &params.friction);
        if q > 0.0 {
            g.score = q;
            out.push(GraspAnnotation {
                object_id,
                reference: *p,
                config: g,
            });
        }
    }
    out
}

/// Grasp labels for every object point of `cloud`, ordered by object id,
/// score descending, then position and axis.
pub fn annotate_grasp_cloud(
    scene: &SceneModel,
    cloud: &PointCloud,
    params: &GraspParams,
    exec: Execution,
) -> Result<Vec<GraspAnnotation>> {
    params.validate()?;
    let owned: Vec<(u32, Point3)> = cloud
        .points
        .iter()
        .filter_map(|p| scene.owner_of(p, OWNER_TOLERANCE).map(|id| (id, *p)))
        .collect();
    let mut out: Vec<GraspAnnotation> = par::map(exec, &owned, |(id, p)| grasps_at_point(scene, *id, p, params))
        .into_iter()
        .flatten()
        .collect();
    sort_grasps(&mut out);
    Ok(out)
}

/// Samples `sample_count` surface points with `seed` and labels grasps.
pub fn annotate_scene_grasps(
    scene: &SceneModel,
    params: &GraspParams,
    sample_count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<GraspAnnotation>> {
    if scene.objects.is_empty() {
        return Err(Error::Config("scene has no objects".into()));
    }
    let sampled = sample_cloud(scene, sample_count, seed)?;
    annotate_grasp_cloud(scene, &sampled.cloud, params, exec)
}

pub(crate) fn sort_grasps(v: &mut [GraspAnnotation]) {
    v.sort_by(|a, b| {
        a.object_id
            .cmp(&b.object_id)
            .then(b.config.score.total_cmp(&a.config.score))
            .then(a.reference.x.total_cmp(&b.reference.x))
            .then(a.reference.y.total_cmp(&b.reference.y))
            .then(a.reference.z.total_cmp(&b.reference.z))
            .then(a.config.angles.theta3.total_cmp(&b.config.angles.theta3))
    });
}
