use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{select_action, Action, CandidateCache, CandidateParams, Policy, Selection};
use crate::geometry::{UnitVec3, Vec3};
use crate::grasp::{ferrari_canny, find_contacts};
use crate::pose_codec::GRIPPER_MAX_WIDTH;
use crate::push::{footprint_points, plan_push, simulate_push, to_segment, PushConfig, PushParams, PushPlan};
use crate::scene::SceneModel;
use crate::suction::{evaluate_suction, suction_config};
use crate::{Error, Result};

/// Standard deviations of the executed pose around the commanded one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionNoise {
    /// Meters, per axis.
    pub translation: f64,
    /// Radians.
    pub rotation: f64,
}

impl Default for ExecutionNoise {
    fn default() -> Self {
        Self {
            translation: 0.001,
            rotation: 1f64.to_radians(),
        }
    }
}

impl ExecutionNoise {
    pub const NONE: ExecutionNoise = ExecutionNoise {
        translation: 0.0,
        rotation: 0.0,
    };
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub candidates: CandidateParams,
    pub push: PushParams,
    pub noise: ExecutionNoise,
}

impl PolicyParams {
    pub fn validate(&self) -> Result<()> {
        self.candidates.validate()?;
        self.push.validate()?;
        if !(self.noise.translation >= 0.0) || !(self.noise.rotation >= 0.0) {
            return Err(Error::Config("execution noise must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub n_objects: usize,
    /// Prehensile attempts allowed; pushes are not counted.
    pub attempt_budget: u32,
    pub push_limit: u32,
}

impl EpisodeConfig {
    /// Budgets paired with the standard clutter sizes 14, 17 and 20.
    pub fn paired(n_objects: usize) -> Result<Self> {
        let attempt_budget = match n_objects {
            14 => 19,
            17 => 22,
            20 => 25,
            _ => {
                return Err(Error::Config(format!(
                    "no paired budget for {n_objects} objects (expected 14, 17 or 20)"
                )))
            }
        };
        Ok(Self {
            n_objects,
            attempt_budget,
            push_limit: 2,
        })
    }

    /// Paired budget for the standard sizes, otherwise five attempts more
    /// than there are objects.
    pub fn for_objects(n_objects: usize) -> Self {
        Self::paired(n_objects).unwrap_or(Self {
            n_objects,
            attempt_budget: n_objects as u32 + 5,
            push_limit: 2,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_objects == 0 {
            return Err(Error::Validation("an episode needs at least one object".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushRecord {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub d: f64,
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
    pub object_id: u32,
}

impl PushRecord {
    pub fn new(p: &PushConfig, object_id: u32) -> Self {
        let s = to_segment(p);
        Self {
            x: p.x,
            y: p.y,
            theta: p.theta,
            d: p.d,
            x1: s.x1,
            y1: s.y1,
            x2: s.x2,
            y2: s.y2,
            object_id,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRecord {
    pub step: u32,
    pub kind: String,
    pub object_id: u32,
    pub score: Option<f64>,
    pub success: bool,
    /// Hash of the scene the action was applied to.
    pub scene_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub push: Option<PushRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeStats {
    pub policy: Policy,
    pub seed: u64,
    pub n_objects: usize,
    pub attempts: u32,
    pub successes: u32,
    pub removed: u32,
    pub pushes: u32,
    /// Successes over prehensile attempts; 0 without attempts.
    pub sr: f64,
    pub cr: f64,
    /// Objects given up after running out of pushes.
    pub failed: Vec<u32>,
    pub log: Vec<LogRecord>,
}

fn gaussian(rng: &mut ChaCha8Rng, sd: f64) -> f64 {
    if sd == 0.0 {
        0.0
    } else {
        sd * rng.sample::<f64, _>(StandardNormal)
    }
}

fn wrap_pi(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(2.0 * PI) - PI;
    w.clamp(-PI, PI)
}

/// Executed version of a commanded prehensile action. `None` when the noisy
/// approach direction points upward.
fn perturb(action: &Action, noise: &ExecutionNoise, rng: &mut ChaCha8Rng) -> Option<Action> {
    let mut jitter = |sd: f64| Vec3::new(gaussian(rng, sd), gaussian(rng, sd), gaussian(rng, sd));
    match *action {
        Action::Grasp { object_id, mut config } => {
            config.center += jitter(noise.translation);
            config.angles.theta3 = wrap_pi(config.angles.theta3 + jitter(noise.rotation).x);
            Some(Action::Grasp { object_id, config })
        }
        Action::Suction { object_id, config } => {
            let contact = config.contact + jitter(noise.translation);
            let (n, _) = crate::geometry::angles_to_frame(&config.angles).ok()?;
            let dir = UnitVec3::new_normalize(n.into_inner() + jitter(noise.rotation));
            let config = suction_config(contact, &dir, config.score).ok()?;
            Some(Action::Suction { object_id, config })
        }
        Action::Push { .. } => Some(*action),
    }
}

/// Physical outcome of executing `action` exactly as given. Grasps need
/// collision-free force closure on the target within the jaw opening;
/// suctions a collision-free seal above the threshold; pushes must move the
/// object more than a centimeter.
pub fn success_oracle(action: &Action, scene: &SceneModel, params: &CandidateParams) -> bool {
    match action {
        Action::Grasp { object_id, config } => {
            config.width <= GRIPPER_MAX_WIDTH
                && find_contacts(scene, config, &params.grasp.gripper)
                    .is_some_and(|c| c.object_id == *object_id && ferrari_canny(&c, &params.grasp.friction) > 0.0)
        }
        Action::Suction { object_id, config } => {
            let Ok((n, _)) = crate::geometry::angles_to_frame(&config.angles) else {
                return false;
            };
            evaluate_suction(scene, *object_id, &config.contact, &n, &params.suction).positive
        }
        Action::Push { object_id, config } => {
            simulate_push(scene, &to_segment(config), *object_id).is_ok_and(|o| o.succeeded())
        }
    }
}

const NOISE_STREAM: u64 = 0x6e6f_6973_6500;

/// Runs one clutter-clearing episode. Prehensile attempts stop at the
/// budget; pushes are free but limited per object.
pub fn run_episode(
    scene: &SceneModel,
    cache: &CandidateCache,
    policy: Policy,
    cfg: &EpisodeConfig,
    params: &PolicyParams,
) -> Result<EpisodeStats> {
    cfg.validate()?;
    params.validate()?;
    let n = scene.objects.len();
    if n == 0 {
        return Err(Error::Validation("an episode needs at least one object".into()));
    }
    if n > cfg.n_objects {
        return Err(Error::Validation(format!(
            "scene holds {n} objects but the episode is configured for {}",
            cfg.n_objects
        )));
    }
    let modes = policy.modes();
    let push_limit = if modes.push { cfg.push_limit } else { 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed ^ NOISE_STREAM);
    let mut scene = scene.clone();
    let mut failed: BTreeSet<u32> = BTreeSet::new();
    let mut push_counts: BTreeMap<u32, u32> = BTreeMap::new();
    let mut log = Vec::new();
    let (mut attempts, mut successes, mut pushes) = (0u32, 0u32, 0u32);
    let mut step = 0u32;

    while !scene.objects.is_empty() && attempts < cfg.attempt_budget {
        let cands = cache.step_candidates(&scene, modes, &failed, &params.candidates);
        let selection = select_action(&cands.grasps, &cands.suctions, &scene.workspace, &push_counts, push_limit);
        let scene_hash = scene.content_hash();
        match selection {
            Selection::Execute(action) => {
                attempts += 1;
                let executed = perturb(&action, &params.noise, &mut rng);
                let success = executed.is_some_and(|a| success_oracle(&a, &scene, &params.candidates));
                if success {
                    successes += 1;
                    scene = scene.without(action.object_id());
                }
                log.push(LogRecord {
                    step,
                    kind: action.kind().into(),
                    object_id: action.object_id(),
                    score: action.score(),
                    success,
                    scene_hash,
                    push: None,
                    note: None,
                });
            }
            Selection::Push { object_id, exhausted } => {
                failed.extend(exhausted);
                let obj = scene.object(object_id).expect("candidate objects are in the scene");
                *push_counts.entry(object_id).or_insert(0) += 1;
                pushes += 1;
                let points = footprint_points(&obj.footprint());
                let (success, push, note) = match plan_push(&points, &scene.workspace, &params.push) {
                    Ok(PushPlan::Push(config)) => {
                        let out = simulate_push(&scene, &to_segment(&config), object_id)?;
                        let ok = out.succeeded();
                        let note = out.warning.clone();
                        scene = out.scene;
                        (ok, Some(PushRecord::new(&config, object_id)), note)
                    }
                    Ok(PushPlan::NoPushNeeded) => {
                        failed.insert(object_id);
                        (false, None, Some("object already at the scene center".into()))
                    }
                    Err(e @ Error::Infeasible(_)) => (false, None, Some(e.to_string())),
                    Err(e) => return Err(e),
                };
                log.push(LogRecord {
                    step,
                    kind: "push".into(),
                    object_id,
                    score: None,
                    success,
                    scene_hash,
                    push,
                    note,
                });
            }
            Selection::Terminate { exhausted } => {
                failed.extend(exhausted);
                break;
            }
        }
        step += 1;
    }

    let removed = successes;
    Ok(EpisodeStats {
        policy,
        seed: scene.seed,
        n_objects: n,
        attempts,
        successes,
        removed,
        pushes,
        sr: if attempts == 0 {
            0.0
        } else {
            successes as f64 / attempts as f64
        },
        cr: removed as f64 / n as f64,
        failed: failed.into_iter().collect(),
        log,
    })
}
