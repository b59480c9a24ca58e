use std::collections::{BTreeMap, BTreeSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Modes;
use crate::geometry::planar::Vec2;
use crate::geometry::{Point3, UnitVec3, Vec3};
use crate::grasp::{find_contacts, grasps_at_point, GraspAnnotation, GraspParams};
use crate::par::{self, Execution};
use crate::scene::{ObjectInstance, SceneModel, WorkspaceModel};
use crate::suction::{intrinsic_suction, suction_clear_of_neighbors, suction_config, SuctionAnnotation, SuctionParams};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateParams {
    pub grasp: GraspParams,
    pub suction: SuctionParams,
    /// Top-surface samples per object.
    pub points_per_object: usize,
}

impl Default for CandidateParams {
    fn default() -> Self {
        Self {
            grasp: GraspParams::default(),
            suction: SuctionParams::default(),
            points_per_object: 24,
        }
    }
}

impl CandidateParams {
    pub fn validate(&self) -> Result<()> {
        self.grasp.validate()?;
        self.suction.validate()?;
        if self.points_per_object == 0 {
            return Err(crate::Error::Config("points_per_object must be positive".into()));
        }
        Ok(())
    }
}

pub type CachedGrasp = GraspAnnotation;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CachedSuction {
    pub annotation: SuctionAnnotation,
    pub direction: UnitVec3,
}

/// Candidates scored against their object alone (plus the table), sorted by
/// score, at the position the object had when the cache was built.
#[derive(Clone, Debug, PartialEq)]
struct ObjectCandidates {
    origin: Vec2,
    grasps: Vec<CachedGrasp>,
    suctions: Vec<CachedSuction>,
}

/// Per-object prehensile candidates. Seal scores and grasp qualities depend
/// only on the object, so they are computed once per scene; clutter
/// collisions and reachability are re-checked every step.
#[derive(Clone, Debug, PartialEq)]
pub struct CandidateCache {
    objects: BTreeMap<u32, ObjectCandidates>,
}

/// Valid candidates for one step: for each object and mode, the best
/// reachable and the best unreachable candidate.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepCandidates {
    pub grasps: Vec<GraspAnnotation>,
    pub suctions: Vec<SuctionAnnotation>,
}

fn object_seed(scene_seed: u64, object_id: u32) -> u64 {
    scene_seed ^ (object_id as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn object_candidates(scene: &SceneModel, obj: &ObjectInstance, params: &CandidateParams) -> Result<ObjectCandidates> {
    let alone = SceneModel {
        seed: scene.seed,
        workspace: scene.workspace.clone(),
        objects: vec![*obj],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(object_seed(scene.seed, obj.object_id));
    let mut grasps = Vec::new();
    let mut suctions = Vec::new();
    for _ in 0..params.points_per_object {
        let (p, n) = obj.shape.sample_top(&mut rng);
        let p = obj.to_world(&p);
        let dir = UnitVec3::new_normalize(-obj.vec_to_world(&n));
        grasps.extend(grasps_at_point(&alone, obj.object_id, &p, &params.grasp));
        if let Some((seal, clear)) = intrinsic_suction(&alone, obj.object_id, &p, &dir, &params.suction) {
            if clear && seal.score > params.suction.threshold {
                suctions.push(CachedSuction {
                    annotation: SuctionAnnotation {
                        object_id: obj.object_id,
                        config: suction_config(p, &dir, seal.score)?,
                    },
                    direction: dir,
                });
            }
        }
    }
    grasps.sort_by(|a, b| b.config.score.total_cmp(&a.config.score));
    suctions.sort_by(|a, b| b.annotation.config.score.total_cmp(&a.annotation.config.score));
    Ok(ObjectCandidates {
        origin: obj.pose.xy(),
        grasps,
        suctions,
    })
}

fn shift(p: &Point3, d: &Vec2) -> Point3 {
    p + Vec3::new(d.x, d.y, 0.0)
}

impl CandidateCache {
    pub fn build(scene: &SceneModel, params: &CandidateParams, exec: Execution) -> Result<Self> {
        params.validate()?;
        let built = par::map(exec, &scene.objects, |o| object_candidates(scene, o, params));
        let mut objects = BTreeMap::new();
        for (o, c) in scene.objects.iter().zip(built) {
            objects.insert(o.object_id, c?);
        }
        Ok(Self { objects })
    }

    pub fn grasp_count(&self, object_id: u32) -> usize {
        self.objects.get(&object_id).map_or(0, |c| c.grasps.len())
    }

    pub fn suction_count(&self, object_id: u32) -> usize {
        self.objects.get(&object_id).map_or(0, |c| c.suctions.len())
    }

    /// Candidates of the objects still in `scene` (minus `excluded`), moved
    /// with their objects and filtered for collisions in the current clutter.
    pub fn step_candidates(
        &self,
        scene: &SceneModel,
        modes: Modes,
        excluded: &BTreeSet<u32>,
        params: &CandidateParams,
    ) -> StepCandidates {
        let ws: &WorkspaceModel = &scene.workspace;
        let mut out = StepCandidates::default();
        for obj in &scene.objects {
            if excluded.contains(&obj.object_id) {
                continue;
            }
            let Some(cands) = self.objects.get(&obj.object_id) else {
                continue;
            };
            let delta = obj.pose.xy() - cands.origin;
            if modes.grasp {
                let mut found = [false; 2];
                for g in &cands.grasps {
                    let mut a = *g;
                    a.reference = shift(&a.reference, &delta);
                    a.config.center = shift(&a.config.center, &delta);
                    let reach = ws.grasp_reachable(&Vec2::new(a.config.center.x, a.config.center.y)) as usize;
                    if found[reach] {
                        continue;
                    }
                    let valid = find_contacts(scene, &a.config, &params.grasp.gripper)
                        .is_some_and(|c| c.object_id == obj.object_id);
                    if valid {
                        found[reach] = true;
                        out.grasps.push(a);
                    }
                    if found == [true; 2] {
                        break;
                    }
                }
            }
            if modes.suction {
                let mut found = [false; 2];
                for s in &cands.suctions {
                    let mut a = s.annotation;
                    a.config.contact = shift(&a.config.contact, &delta);
                    let reach = ws.suction_reachable(&Vec2::new(a.config.contact.x, a.config.contact.y)) as usize;
                    if found[reach] {
                        continue;
                    }
                    if suction_clear_of_neighbors(scene, obj.object_id, &a.config.contact, &s.direction, &params.suction) {
                        found[reach] = true;
                        out.suctions.push(a);
                    }
                    if found == [true; 2] {
                        break;
                    }
                }
            }
        }
        out
    }
}
