//! Seal-formation scoring of suction candidates and dense suction labeling.

use serde::{Deserialize, Serialize};

use crate::collision::Capsule;
use crate::geometry::{
    approach_angles, fit_plane_lsq, orthonormal_basis, Plane, Point3, PointCloud, Ray, RotationAngles, Surface,
    UnitVec3,
};
use crate::par::{self, Execution};
use crate::pose_codec::SuctionConfig;
use crate::scene::{sample_cloud, SceneModel};
use crate::{Error, Result};

/// Ring rays start this far behind the cup rim, beyond any primitive.
pub const RING_STANDOFF: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionCupModel {
    pub radius: f64,
    pub ring_samples: u32,
    /// Compliance normalization `b`, per meter.
    pub compliance_b: f64,
}

impl Default for SuctionCupModel {
    fn default() -> Self {
        Self {
            radius: 0.01,
            ring_samples: 16,
            compliance_b: 200.0,
        }
    }
}

impl SuctionCupModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || self.ring_samples < 3 || !(self.compliance_b > 0.0) {
            return Err(Error::Config(format!("invalid suction cup {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionParams {
    pub cup: SuctionCupModel,
    /// Positive label threshold `u` on the seal score.
    pub threshold: f64,
    /// Length of the swept collision cylinder behind the cup.
    pub sweep_length: f64,
}

impl Default for SuctionParams {
    fn default() -> Self {
        Self {
            cup: SuctionCupModel::default(),
            threshold: 0.5,
            sweep_length: 0.02,
        }
    }
}

impl SuctionParams {
    pub fn validate(&self) -> Result<()> {
        self.cup.validate()?;
        if !(0.0..=1.0).contains(&self.threshold) || !(self.sweep_length > 0.0) {
            return Err(Error::Config("suction threshold must lie in [0, 1] and sweep length be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SealEvaluation {
    pub ring_points: Vec<Point3>,
    pub plane: Plane,
    /// Unit vector opposite the fitted plane normal `M`.
    pub plane_normal_m: UnitVec3,
    pub sigma: f64,
    pub score: f64,
}

/// Casts the cup rim along `direction` onto `surface`. `None` if any rim ray
/// misses, meaning no seal is possible at this pose.
pub fn project_ring<S: Surface + ?Sized>(
    surface: &S,
    contact: &Point3,
    direction: &UnitVec3,
    cup: &SuctionCupModel,
) -> Option<Vec<Point3>> {
    let (u, v) = orthonormal_basis(direction);
    let n = cup.ring_samples;
    (0..n)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / n as f64;
            let rim = contact + (u.into_inner() * phi.cos() + v.into_inner() * phi.sin()) * cup.radius;
            let origin = rim - direction.into_inner() * RING_STANDOFF;
            surface.raycast(&Ray::new(origin, *direction)).map(|h| h.point)
        })
        .collect()
}

/// Population standard deviation of signed point-to-plane distances.
pub fn seal_sigma(ring: &[Point3], plane: &Plane) -> f64 {
    if ring.is_empty() {
        return 0.0;
    }
    let d: Vec<f64> = ring.iter().map(|p| plane.signed_distance(p)).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// `exp(−bσ)·cos(M, M₁)`, zero for a negative cosine.
pub fn suction_score(sigma: f64, m: &UnitVec3, m1: &UnitVec3, b: f64) -> f64 {
    (-b * sigma).exp() * m.dot(m1).max(0.0)
}

/// Full seal pipeline: project, fit, spread, score. `None` on a rim miss or
/// a degenerate fit.
pub fn evaluate_seal<S: Surface + ?Sized>(
    surface: &S,
    contact: &Point3,
    direction: &UnitVec3,
    cup: &SuctionCupModel,
) -> Option<SealEvaluation> {
    let ring = project_ring(surface, contact, direction, cup)?;
    let plane = fit_plane_lsq(&ring).ok()?.oriented_toward(&-direction.into_inner());
    let m = -plane.normal;
    let sigma = seal_sigma(&ring, &plane);
    let score = suction_score(sigma, &m, direction, cup.compliance_b).clamp(0.0, 1.0);
    Some(SealEvaluation {
        ring_points: ring,
        plane,
        plane_normal_m: m,
        sigma,
        score,
    })
}

/// Cylinder of cup radius swept `length` behind the cup, as a capsule whose
/// front cap touches the contact.
pub fn suction_capsule(contact: &Point3, direction: &UnitVec3, radius: f64, length: f64) -> Capsule {
    let back = direction.into_inner();
    Capsule::new(contact - back * radius, contact - back * (radius + length), radius)
}

/// Suction evaluation against one target object inside a scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SuctionOutcome {
    pub seal: Option<SealEvaluation>,
    pub collision_free: bool,
    pub score: f64,
    pub positive: bool,
}

/// Parts of the check that depend on the target alone (and the table): the
/// seal score and table clearance. Returns the score when a seal forms.
pub fn intrinsic_suction(
    scene: &SceneModel,
    object_id: u32,
    contact: &Point3,
    direction: &UnitVec3,
    params: &SuctionParams,
) -> Option<(SealEvaluation, bool)> {
    let obj = scene.object(object_id)?;
    let seal = evaluate_seal(obj, contact, direction, &params.cup)?;
    let clear = !suction_capsule(contact, direction, params.cup.radius, params.sweep_length).hits_table();
    Some((seal, clear))
}

/// Approach clearance against every object except the target.
pub fn suction_clear_of_neighbors(
    scene: &SceneModel,
    object_id: u32,
    contact: &Point3,
    direction: &UnitVec3,
    params: &SuctionParams,
) -> bool {
    suction_capsule(contact, direction, params.cup.radius, params.sweep_length)
        .first_hit(scene, Some(object_id))
        .is_none()
}

pub fn evaluate_suction(
    scene: &SceneModel,
    object_id: u32,
    contact: &Point3,
    direction: &UnitVec3,
    params: &SuctionParams,
) -> SuctionOutcome {
    match intrinsic_suction(scene, object_id, contact, direction, params) {
        None => SuctionOutcome {
            seal: None,
            collision_free: false,
            score: 0.0,
            positive: false,
        },
        Some((seal, table_clear)) => {
            let collision_free = table_clear && suction_clear_of_neighbors(scene, object_id, contact, direction, params);
            let score = seal.score;
            SuctionOutcome {
                positive: collision_free && score > params.threshold,
                seal: Some(seal),
                collision_free,
                score,
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuctionLabel {
    /// Object the candidate lies on; `None` for the table or free space.
    pub object_id: Option<u32>,
    pub score: f64,
    pub collision_free: bool,
    pub positive: bool,
}

/// Surface points farther than this from every object belong to none.
pub const OWNER_TOLERANCE: f64 = 1e-6;

/// Scores every candidate with suction direction `−normal`. Candidates on
/// the table or lacking a normal are negatives.
pub fn label_contact_points(
    scene: &SceneModel,
    candidates: &PointCloud,
    params: &SuctionParams,
    exec: Execution,
) -> Result<Vec<SuctionLabel>> {
    params.validate()?;
    let normals = candidates
        .normals
        .as_ref()
        .ok_or_else(|| Error::Data("suction candidates need normals".into()))?;
    let idx: Vec<usize> = (0..candidates.len()).collect();
    Ok(par::map(exec, &idx, |&i| {
        let p = candidates.points[i];
        let dir = -normals[i];
        match scene.owner_of(&p, OWNER_TOLERANCE) {
            Some(id) => {
                let out = evaluate_suction(scene, id, &p, &dir, params);
                SuctionLabel {
                    object_id: Some(id),
                    score: out.score,
                    collision_free: out.collision_free,
                    positive: out.positive,
                }
            }
            None => SuctionLabel {
                object_id: None,
                score: 0.0,
                collision_free: false,
                positive: false,
            },
        }
    }))
}

/// Suction configuration for a contact approached along `dir`, `θ3 = 0`.
pub fn suction_config(contact: Point3, dir: &UnitVec3, score: f64) -> Result<SuctionConfig> {
    let (theta1, theta2) = approach_angles(dir)?;
    Ok(SuctionConfig {
        contact,
        angles: RotationAngles {
            theta1,
            theta2,
            theta3: 0.0,
        },
        score,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionAnnotation {
    pub object_id: u32,
    pub config: SuctionConfig,
}

/// Samples `sample_count` surface points and keeps the positive suction
/// labels, ordered by object id, then score descending, then position.
pub fn annotate_scene_suction(
    scene: &SceneModel,
    params: &SuctionParams,
    sample_count: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<SuctionAnnotation>> {
    if scene.objects.is_empty() {
        return Err(Error::Config("scene has no objects".into()));
    }
    let sampled = sample_cloud(scene, sample_count, seed)?;
    annotate_suction_cloud(scene, &sampled.cloud, params, exec)
}

/// Positive suction annotations for an already sampled cloud.
pub fn annotate_suction_cloud(
    scene: &SceneModel,
    cloud: &PointCloud,
    params: &SuctionParams,
    exec: Execution,
) -> Result<Vec<SuctionAnnotation>> {
    let labels = label_contact_points(scene, cloud, params, exec)?;
    let normals = cloud.normals.as_ref().expect("checked by labeling");
    let mut out = Vec::new();
    for (i, l) in labels.iter().enumerate() {
        if let (true, Some(id)) = (l.positive, l.object_id) {
            out.push(SuctionAnnotation {
                object_id: id,
                config: suction_config(cloud.points[i], &-normals[i], l.score)?,
            });
        }
    }
    sort_suctions(&mut out);
    Ok(out)
}

pub(crate) fn sort_suctions(v: &mut [SuctionAnnotation]) {
    v.sort_by(|a, b| {
        a.object_id
            .cmp(&b.object_id)
            .then(b.config.score.total_cmp(&a.config.score))
            .then(a.config.contact.x.total_cmp(&b.config.contact.x))
            .then(a.config.contact.y.total_cmp(&b.config.contact.y))
            .then(a.config.contact.z.total_cmp(&b.config.contact.z))
    });
}
