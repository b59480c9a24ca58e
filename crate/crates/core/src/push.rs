//! Rule-based top-down pushes toward the scene center and their
//! quasi-static effect on a scene.

use serde::{Deserialize, Serialize};

use crate::collision::golden_min;
use crate::geometry::planar::{convex_hull, Footprint, Vec2};
use crate::scene::{SceneModel, WorkspaceModel};
use crate::{Error, Result};

/// Centroids this close to the scene center need no push.
pub const CENTER_TOLERANCE: f64 = 1e-6;
/// A push that moves its object less than this counts as failed.
pub const PUSH_SUCCESS_DISTANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushParams {
    /// Gap between the pusher start and the object.
    pub protect: f64,
    pub distance: f64,
}

impl Default for PushParams {
    fn default() -> Self {
        Self {
            protect: 0.02,
            distance: 0.10,
        }
    }
}

impl PushParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.protect >= 0.0) || !(self.distance > 0.0) {
            return Err(Error::Config(format!("invalid push parameters {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushConfig {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PushSegment {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl PushSegment {
    pub fn start(&self) -> Vec2 {
        Vec2::new(self.x1, self.y1)
    }

    pub fn end(&self) -> Vec2 {
        Vec2::new(self.x2, self.y2)
    }

    pub fn length(&self) -> f64 {
        (self.end() - self.start()).norm()
    }
}

pub fn to_segment(p: &PushConfig) -> PushSegment {
    let (s, c) = p.theta.sin_cos();
    PushSegment {
        x1: p.x,
        y1: p.y,
        x2: p.x + p.d * c,
        y2: p.y + p.d * s,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PushPlan {
    Push(PushConfig),
    /// The object already sits on the scene center.
    NoPushNeeded,
}

/// Push from behind the object toward the scene center. The pusher starts
/// `protect` beyond the object point lying farthest against the push
/// direction.
pub fn plan_push(object_points: &[Vec2], ws: &WorkspaceModel, params: &PushParams) -> Result<PushPlan> {
    params.validate()?;
    if object_points.is_empty() {
        return Err(Error::Data("push planning needs object points".into()));
    }
    let centroid = object_points.iter().sum::<Vec2>() / object_points.len() as f64;
    let to_center = ws.scene_center - centroid;
    let dist = to_center.norm();
    if dist <= CENTER_TOLERANCE {
        return Ok(PushPlan::NoPushNeeded);
    }
    let dir = to_center / dist;
    let back = object_points
        .iter()
        .map(|p| p.dot(&dir))
        .fold(f64::INFINITY, f64::min);
    // Project the centroid onto the rear supporting line.
    let start = centroid + dir * (back - centroid.dot(&dir) - params.protect);
    if !ws.table_bounds.contains(&start) {
        return Err(Error::Infeasible(format!(
            "push start ({:.4}, {:.4}) lies off the table",
            start.x, start.y
        )));
    }
    Ok(PushPlan::Push(PushConfig {
        x: start.x,
        y: start.y,
        theta: dir.y.atan2(dir.x),
        d: params.distance,
    }))
}

/// Footprint outline of an object as push-planning input.
pub fn footprint_points(fp: &Footprint) -> Vec<Vec2> {
    convex_hull(&fp.outline(64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PushOutcome {
    pub scene: SceneModel,
    /// Distance the target moved.
    pub moved: f64,
    /// The target stopped against another object.
    pub blocked: bool,
    pub warning: Option<String>,
}

impl PushOutcome {
    pub fn succeeded(&self) -> bool {
        self.moved > PUSH_SUCCESS_DISTANCE
    }
}

const BISECT_ITERS: u32 = 60;

/// Largest `s ∈ [0, hi]` with `ok(s)`, given `ok(0)` and that the feasible
/// set is an interval starting at 0.
pub fn last_feasible(ok: impl Fn(f64) -> bool, hi: f64) -> f64 {
    if ok(hi) {
        return hi;
    }
    let (mut lo, mut up) = (0.0, hi);
    for _ in 0..BISECT_ITERS {
        let mid = 0.5 * (lo + up);
        if ok(mid) {
            lo = mid;
        } else {
            up = mid;
        }
    }
    lo
}

/// Quasi-static single-body push. The target slides along the segment by the
/// part of the segment past its first contact with the footprint, stops no
/// later than the point where its centroid passes closest to the scene
/// center, and halts at first contact with another object or the table edge.
/// Returns a new scene; the input is left untouched.
pub fn simulate_push(scene: &SceneModel, seg: &PushSegment, object_id: u32) -> Result<PushOutcome> {
    let obj = scene
        .object(object_id)
        .ok_or_else(|| Error::Data(format!("no object {object_id} in scene")))?;
    let unchanged = |msg: String| PushOutcome {
        scene: scene.clone(),
        moved: 0.0,
        blocked: false,
        warning: Some(msg),
    };
    let len = seg.length();
    if !(len > 0.0) {
        return Ok(unchanged("zero-length push".into()));
    }
    let dir = (seg.end() - seg.start()) / len;
    let fp = obj.footprint();
    let entry = match fp.ray_entry(&seg.start(), &dir) {
        Some(t) if t < len => t,
        _ => return Ok(unchanged(format!("push misses object {object_id}"))),
    };
    let center_cap = (scene.scene_center() - obj.pose.xy()).dot(&dir).max(0.0);
    let travel = (len - entry).min(center_cap);
    if travel <= 0.0 {
        return Ok(unchanged(format!("push would move object {object_id} away from the center")));
    }

    let table = *scene.table();
    let mut reach = last_feasible(|s| fp.translated(&(dir * s)).inside(&table), travel);
    let mut blocked = false;
    for other in scene.objects.iter().filter(|o| o.object_id != object_id) {
        let ofp = other.footprint();
        let gap = |s: f64| fp.translated(&(dir * s)).separation(&ofp);
        let (s_min, g_min) = golden_min(gap, 0.0, reach, 80);
        if g_min >= 0.0 {
            continue;
        }
        // The gap is convex in `s`, so it is non-negative on an interval
        // starting at 0 that ends before its minimum.
        let stop = last_feasible(|s| gap(s) >= 0.0, s_min);
        if stop < reach {
            reach = stop;
            blocked = true;
        }
    }

    let mut next = scene.clone();
    let idx = scene.index_of(object_id).expect("object looked up above");
    next.objects[idx] = obj.translated(&(dir * reach));
    Ok(PushOutcome {
        scene: next,
        moved: reach,
        blocked,
        warning: None,
    })
}
