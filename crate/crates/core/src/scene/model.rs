use std::path::Path;

use nalgebra::{Isometry3, Translation3, UnitQuaternion, Quaternion};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::shape::PrimitiveShape;
use crate::geometry::planar::{ConvexPolygon, Footprint, Rect, Vec2};
use crate::geometry::{Hit, Point3, Ray, Surface, TriMesh, UnitVec3, Vec3};
use crate::{Error, Result};

pub const SCENE_FORMAT: &str = "pgs-scene";
pub const SCENE_VERSION: u32 = 1;

/// Rigid placement: translation plus a unit quaternion `[w, x, y, z]`.
/// Scene objects only ever rotate about the vertical axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub translation: [f64; 3],
    pub rotation: [f64; 4],
}

impl Pose {
    /// Upright pose with yaw `yaw` and its origin at `(x, y, z)`.
    pub fn upright(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        let (s, c) = (0.5 * yaw).sin_cos();
        Self {
            translation: [x, y, z],
            rotation: [c, 0.0, 0.0, s],
        }
    }

    pub fn isometry(&self) -> Isometry3<f64> {
        let [w, x, y, z] = self.rotation;
        let [tx, ty, tz] = self.translation;
        Isometry3::from_parts(
            Translation3::new(tx, ty, tz),
            UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z)),
        )
    }

    /// `(cos, sin)` of the yaw angle.
    pub fn yaw_cos_sin(&self) -> (f64, f64) {
        let [w, _, _, z] = self.rotation;
        let n = w * w + z * z;
        ((w * w - z * z) / n, 2.0 * w * z / n)
    }

    pub fn is_upright(&self) -> bool {
        let [w, x, y, z] = self.rotation;
        let n = (w * w + x * x + y * y + z * z).sqrt();
        x.abs() <= 1e-12 && y.abs() <= 1e-12 && (n - 1.0).abs() <= 1e-9
    }

    pub fn xy(&self) -> Vec2 {
        Vec2::new(self.translation[0], self.translation[1])
    }

    pub fn translated(&self, d: &Vec2) -> Self {
        let [x, y, z] = self.translation;
        Self {
            translation: [x + d.x, y + d.y, z],
            rotation: self.rotation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub object_id: u32,
    pub shape: PrimitiveShape,
    pub pose: Pose,
}

impl ObjectInstance {
    /// Object resting on the table at `(x, y)` with the given yaw.
    pub fn resting(object_id: u32, shape: PrimitiveShape, x: f64, y: f64, yaw: f64) -> Self {
        Self {
            object_id,
            shape,
            pose: Pose::upright(x, y, shape.half_height(), yaw),
        }
    }

    pub fn center(&self) -> Point3 {
        let [x, y, z] = self.pose.translation;
        Point3::new(x, y, z)
    }

    pub fn top_z(&self) -> f64 {
        self.pose.translation[2] + self.shape.half_height()
    }

    pub fn to_local(&self, p: &Point3) -> Point3 {
        let (c, s) = self.pose.yaw_cos_sin();
        let d = p - self.center();
        Point3::new(c * d.x + s * d.y, -s * d.x + c * d.y, d.z)
    }

    pub fn vec_to_local(&self, v: &Vec3) -> Vec3 {
        let (c, s) = self.pose.yaw_cos_sin();
        Vec3::new(c * v.x + s * v.y, -s * v.x + c * v.y, v.z)
    }

    pub fn to_world(&self, p: &Point3) -> Point3 {
        self.center() + self.vec_to_world(&p.coords)
    }

    pub fn vec_to_world(&self, v: &Vec3) -> Vec3 {
        let (c, s) = self.pose.yaw_cos_sin();
        Vec3::new(c * v.x - s * v.y, s * v.x + c * v.y, v.z)
    }

    pub fn sdf(&self, p: &Point3) -> f64 {
        self.shape.sdf(&self.to_local(p))
    }

    pub fn footprint(&self) -> Footprint {
        let center = self.pose.xy();
        match self.shape {
            PrimitiveShape::Box { w, d, .. } => {
                let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]
                    .iter()
                    .map(|&(sx, sy)| {
                        let v = self.vec_to_world(&Vec3::new(0.5 * w * sx, 0.5 * d * sy, 0.0));
                        center + Vec2::new(v.x, v.y)
                    })
                    .collect();
                Footprint::Polygon(ConvexPolygon::new(corners))
            }
            PrimitiveShape::Cylinder { r, .. } | PrimitiveShape::Sphere { r } => Footprint::Disc { center, radius: r },
        }
    }

    pub fn mesh(&self) -> TriMesh {
        self.shape.mesh().transformed(&self.pose.isometry())
    }

    pub fn translated(&self, d: &Vec2) -> Self {
        Self {
            pose: self.pose.translated(d),
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.shape.validate()?;
        if !self.pose.is_upright() {
            return Err(Error::Validation(format!(
                "object {} is not upright",
                self.object_id
            )));
        }
        if (self.pose.translation[2] - self.shape.half_height()).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "object {} does not rest on the table",
                self.object_id
            )));
        }
        Ok(())
    }
}

impl Surface for ObjectInstance {
    fn raycast(&self, ray: &Ray) -> Option<Hit> {
        let o = self.to_local(&ray.origin);
        let d = self.vec_to_local(&ray.dir);
        let (t, n) = self.shape.raycast(&o, &d)?;
        Some(Hit {
            t,
            point: ray.at(t),
            normal: UnitVec3::new_unchecked(self.vec_to_world(&n)),
        })
    }
}

/// Per-arm reach regions on the table plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkspaceModel {
    pub grasp_region: ConvexPolygon,
    pub suction_region: ConvexPolygon,
    pub scene_center: Vec2,
    pub table_bounds: Rect,
}

impl WorkspaceModel {
    /// Suction arm covers the left 12.5–62.5 % of the table width, the
    /// gripper arm 37.5–87.5 %; the two far ends are out of both.
    pub fn for_table(table: Rect) -> Self {
        let w = table.x_max - table.x_min;
        let band = |lo: f64, hi: f64| {
            Rect {
                x_min: table.x_min + lo * w,
                x_max: table.x_min + hi * w,
                y_min: table.y_min,
                y_max: table.y_max,
            }
            .polygon()
        };
        Self {
            suction_region: band(0.125, 0.625),
            grasp_region: band(0.375, 0.875),
            scene_center: Vec2::new(0.5 * (table.x_min + table.x_max), 0.5 * (table.y_min + table.y_max)),
            table_bounds: table,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.table_bounds.is_valid() {
            return Err(Error::Validation("table bounds are empty".into()));
        }
        if !self.table_bounds.contains(&self.scene_center) {
            return Err(Error::Validation("scene center lies outside the table".into()));
        }
        for (name, r) in [("grasp", &self.grasp_region), ("suction", &self.suction_region)] {
            if r.vertices.len() < 3 || r.area() <= 0.0 {
                return Err(Error::Validation(format!("{name} region is degenerate")));
            }
        }
        Ok(())
    }

    pub fn grasp_reachable(&self, p: &Vec2) -> bool {
        self.grasp_region.contains(p)
    }

    pub fn suction_reachable(&self, p: &Vec2) -> bool {
        self.suction_region.contains(p)
    }
}

impl Default for WorkspaceModel {
    fn default() -> Self {
        Self::for_table(default_table())
    }
}

/// 1.2 m × 0.6 m table centered on the origin.
pub fn default_table() -> Rect {
    Rect {
        x_min: -0.6,
        x_max: 0.6,
        y_min: -0.3,
        y_max: 0.3,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SceneHit {
    pub hit: Hit,
    /// `None` for the table.
    pub object_id: Option<u32>,
}

/// Objects resting on the table plane `z = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneModel {
    pub seed: u64,
    pub workspace: WorkspaceModel,
    pub objects: Vec<ObjectInstance>,
}

impl SceneModel {
    pub fn table(&self) -> &Rect {
        &self.workspace.table_bounds
    }

    pub fn scene_center(&self) -> Vec2 {
        self.workspace.scene_center
    }

    pub fn object(&self, id: u32) -> Option<&ObjectInstance> {
        self.objects.iter().find(|o| o.object_id == id)
    }

    pub fn index_of(&self, id: u32) -> Option<usize> {
        self.objects.iter().position(|o| o.object_id == id)
    }

    /// Nearest hit on any object or the table plane.
    pub fn raycast(&self, ray: &Ray) -> Option<SceneHit> {
        let mut best = self.raycast_objects(ray, None);
        if let Some(t) = table_hit(ray) {
            if best.as_ref().is_none_or(|b| t < b.hit.t) {
                best = Some(SceneHit {
                    hit: Hit {
                        t,
                        point: ray.at(t),
                        normal: UnitVec3::new_unchecked(Vec3::z()),
                    },
                    object_id: None,
                });
            }
        }
        best
    }

    /// Nearest object hit, optionally ignoring one object.
    pub fn raycast_objects(&self, ray: &Ray, skip: Option<u32>) -> Option<SceneHit> {
        let mut best: Option<SceneHit> = None;
        for obj in &self.objects {
            if Some(obj.object_id) == skip {
                continue;
            }
            if let Some(h) = obj.raycast(ray) {
                if best.as_ref().is_none_or(|b| h.t < b.hit.t) {
                    best = Some(SceneHit {
                        hit: h,
                        object_id: Some(obj.object_id),
                    });
                }
            }
        }
        best
    }

    /// Distance from `p` to the closest surface (objects or table plane).
    pub fn surface_distance(&self, p: &Point3) -> f64 {
        self.objects
            .iter()
            .map(|o| o.sdf(p).abs())
            .fold(p.z.abs(), f64::min)
    }

    /// Object whose surface passes within `tol` of `p`, nearest first.
    pub fn owner_of(&self, p: &Point3, tol: f64) -> Option<u32> {
        self.objects
            .iter()
            .map(|o| (o.sdf(p).abs(), o.object_id))
            .filter(|(d, _)| *d <= tol)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, id)| id)
    }

    pub fn without(&self, id: u32) -> Self {
        Self {
            objects: self.objects.iter().filter(|o| o.object_id != id).copied().collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.workspace.validate()?;
        for (i, o) in self.objects.iter().enumerate() {
            o.validate()?;
            if self.objects[..i].iter().any(|p| p.object_id == o.object_id) {
                return Err(Error::Validation(format!("duplicate object id {}", o.object_id)));
            }
            if !o.footprint().inside(self.table()) {
                return Err(Error::Validation(format!(
                    "object {} extends past the table",
                    o.object_id
                )));
            }
        }
        for (i, a) in self.objects.iter().enumerate() {
            for b in &self.objects[i + 1..] {
                if a.footprint().separation(&b.footprint()) < -1e-9 {
                    return Err(Error::Validation(format!(
                        "objects {} and {} interpenetrate",
                        a.object_id, b.object_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.file_json(None)
    }

    /// Scene file that also records the hash of the configuration that
    /// produced it.
    pub fn to_json_tagged(&self, config_hash: &str) -> Result<String> {
        self.file_json(Some(config_hash.to_string()))
    }

    fn file_json(&self, config_hash: Option<String>) -> Result<String> {
        let file = SceneFile {
            format: SCENE_FORMAT.into(),
            version: SCENE_VERSION,
            config_hash,
            scene: self.clone(),
        };
        let mut s = serde_json::to_string_pretty(&file)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SceneFile = serde_json::from_str(text)?;
        if file.format != SCENE_FORMAT {
            return Err(Error::Format(format!("not a scene file: format `{}`", file.format)));
        }
        if file.version != SCENE_VERSION {
            return Err(Error::Format(format!("unsupported scene version {}", file.version)));
        }
        file.scene.validate()?;
        Ok(file.scene)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(self).unwrap_or_default();
        hex(&Sha256::digest(bytes))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct SceneFile {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    config_hash: Option<String>,
    scene: SceneModel,
}

fn table_hit(ray: &Ray) -> Option<f64> {
    if ray.dir.z >= 0.0 || ray.origin.z <= 0.0 {
        return None;
    }
    let t = -ray.origin.z / ray.dir.z;
    (t > crate::geometry::ray::RAY_EPS).then_some(t)
}
