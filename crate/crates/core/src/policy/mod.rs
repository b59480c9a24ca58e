//! Action selection and the clutter-clearing episode simulator.

mod cache;
mod compare;
mod episode;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::planar::Vec2;
use crate::grasp::GraspAnnotation;
use crate::pose_codec::{GraspConfig, SuctionConfig};
use crate::push::PushConfig;
use crate::scene::WorkspaceModel;
use crate::suction::SuctionAnnotation;
use crate::{Error, Result};

pub use cache::{CachedGrasp, CachedSuction, CandidateCache, CandidateParams, StepCandidates};
pub use compare::{compare_policies, comparison_table, Comparison, PolicySummary};
pub use episode::{
    run_episode, success_oracle, EpisodeConfig, EpisodeStats, ExecutionNoise, LogRecord, PolicyParams, PushRecord,
};

/// Enabled action modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Modes {
    pub grasp: bool,
    pub suction: bool,
    pub push: bool,
}

impl Modes {
    pub fn is_superset_of(&self, other: &Modes) -> bool {
        (self.grasp || !other.grasp) && (self.suction || !other.suction) && (self.push || !other.push)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Grasp,
    Suction,
    Gs,
    Pgs,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Grasp, Policy::Suction, Policy::Gs, Policy::Pgs];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Grasp => "grasp",
            Policy::Suction => "suction",
            Policy::Gs => "gs",
            Policy::Pgs => "pgs",
        }
    }

    pub fn modes(self) -> Modes {
        match self {
            Policy::Grasp => Modes {
                grasp: true,
                suction: false,
                push: false,
            },
            Policy::Suction => Modes {
                grasp: false,
                suction: true,
                push: false,
            },
            Policy::Gs => Modes {
                grasp: true,
                suction: true,
                push: false,
            },
            Policy::Pgs => Modes {
                grasp: true,
                suction: true,
                push: true,
            },
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}` (expected grasp, suction, gs or pgs)")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Action {
    Grasp { object_id: u32, config: GraspConfig },
    Suction { object_id: u32, config: SuctionConfig },
    Push { object_id: u32, config: PushConfig },
}

impl Action {
    pub fn object_id(&self) -> u32 {
        match *self {
            Action::Grasp { object_id, .. } | Action::Suction { object_id, .. } | Action::Push { object_id, .. } => {
                object_id
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Action::Grasp { .. } => "grasp",
            Action::Suction { .. } => "suction",
            Action::Push { .. } => "push",
        }
    }

    pub fn score(&self) -> Option<f64> {
        match self {
            Action::Grasp { config, .. } => Some(config.score),
            Action::Suction { config, .. } => Some(config.score),
            Action::Push { .. } => None,
        }
    }

    pub fn is_prehensile(&self) -> bool {
        !matches!(self, Action::Push { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Selection {
    Execute(Action),
    /// No prehensile candidate is reachable; push this object toward the
    /// scene center. `exhausted` lists higher-ranked objects already at the
    /// push limit.
    Push { object_id: u32, exhausted: Vec<u32> },
    /// Nothing left to try. `exhausted` lists objects with only unreachable
    /// candidates and no pushes left.
    Terminate { exhausted: Vec<u32> },
}

struct Ranked {
    score: f64,
    /// 0 for grasps, 1 for suctions.
    kind: u8,
    object_id: u32,
    index: usize,
    reachable: bool,
}

fn ranked(grasps: &[GraspAnnotation], suctions: &[SuctionAnnotation], ws: &WorkspaceModel) -> Vec<Ranked> {
    let g = grasps.iter().enumerate().map(|(index, a)| Ranked {
        score: a.config.score,
        kind: 0,
        object_id: a.object_id,
        index,
        reachable: ws.grasp_reachable(&Vec2::new(a.config.center.x, a.config.center.y)),
    });
    let s = suctions.iter().enumerate().map(|(index, a)| Ranked {
        score: a.config.score,
        kind: 1,
        object_id: a.object_id,
        index,
        reachable: ws.suction_reachable(&Vec2::new(a.config.contact.x, a.config.contact.y)),
    });
    let mut all: Vec<Ranked> = g.chain(s).collect();
    all.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.kind.cmp(&b.kind))
            .then(a.object_id.cmp(&b.object_id))
            .then(a.index.cmp(&b.index))
    });
    all
}

/// Highest-scoring reachable prehensile candidate; otherwise a push of the
/// object owning the best unreachable candidate that still has pushes left.
/// Ties go to higher score, then grasp before suction, then lower object
/// id, then input order.
pub fn select_action(
    grasps: &[GraspAnnotation],
    suctions: &[SuctionAnnotation],
    ws: &WorkspaceModel,
    push_counts: &BTreeMap<u32, u32>,
    push_limit: u32,
) -> Selection {
    let all = ranked(grasps, suctions, ws);
    if let Some(best) = all.iter().find(|r| r.reachable) {
        let action = if best.kind == 0 {
            let a = &grasps[best.index];
            Action::Grasp {
                object_id: a.object_id,
                config: a.config,
            }
        } else {
            let a = &suctions[best.index];
            Action::Suction {
                object_id: a.object_id,
                config: a.config,
            }
        };
        return Selection::Execute(action);
    }
    let mut exhausted: Vec<u32> = Vec::new();
    for r in &all {
        if exhausted.contains(&r.object_id) {
            continue;
        }
        if push_counts.get(&r.object_id).copied().unwrap_or(0) < push_limit {
            return Selection::Push {
                object_id: r.object_id,
                exhausted,
            };
        }
        exhausted.push(r.object_id);
    }
    Selection::Terminate { exhausted }
}
