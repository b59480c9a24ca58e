//! Versioned per-scene annotation file holding dense grasp and suction
//! labels together with the bin table used to encode them.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{Point3, RotationAngles};
use crate::grasp::GraspAnnotation;
use crate::pose_codec::{encode_grasp, encode_suction, BinSpecSet, GraspConfig, SuctionConfig};
use crate::suction::SuctionAnnotation;
use crate::{Error, Result};

pub const ANNOTATION_FORMAT: &str = "pgs-annotations";
pub const ANNOTATION_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraspRecord {
    pub object_id: u32,
    /// Surface point the grasp was proposed from; center bins are offsets
    /// from it.
    pub reference: [f64; 3],
    pub center: [f64; 3],
    pub theta: [f64; 3],
    pub width: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuctionRecord {
    pub object_id: u32,
    pub contact: [f64; 3],
    pub theta: [f64; 3],
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotationFile {
    pub format: String,
    pub version: u32,
    pub scene_hash: String,
    pub config_hash: String,
    pub bins: BinSpecSet,
    pub grasps: Vec<GraspRecord>,
    pub suctions: Vec<SuctionRecord>,
}

fn arr(p: &Point3) -> [f64; 3] {
    [p.x, p.y, p.z]
}

fn angles(a: &RotationAngles) -> [f64; 3] {
    [a.theta1, a.theta2, a.theta3]
}

fn from_theta(t: &[f64; 3]) -> RotationAngles {
    RotationAngles {
        theta1: t[0],
        theta2: t[1],
        theta3: t[2],
    }
}

impl GraspRecord {
    pub fn config(&self) -> GraspConfig {
        GraspConfig {
            center: Point3::from(self.center),
            angles: from_theta(&self.theta),
            width: self.width,
            score: self.score,
        }
    }
}

impl SuctionRecord {
    pub fn config(&self) -> SuctionConfig {
        SuctionConfig {
            contact: Point3::from(self.contact),
            angles: from_theta(&self.theta),
            score: self.score,
        }
    }
}

impl AnnotationFile {
    pub fn new(
        scene_hash: String,
        config_hash: String,
        bins: BinSpecSet,
        grasps: &[GraspAnnotation],
        suctions: &[SuctionAnnotation],
    ) -> Self {
        Self {
            format: ANNOTATION_FORMAT.into(),
            version: ANNOTATION_VERSION,
            scene_hash,
            config_hash,
            bins,
            grasps: grasps
                .iter()
                .map(|g| GraspRecord {
                    object_id: g.object_id,
                    reference: arr(&g.reference),
                    center: arr(&g.config.center),
                    theta: angles(&g.config.angles),
                    width: g.config.width,
                    score: g.config.score,
                })
                .collect(),
            suctions: suctions
                .iter()
                .map(|s| SuctionRecord {
                    object_id: s.object_id,
                    contact: arr(&s.config.contact),
                    theta: angles(&s.config.angles),
                    score: s.config.score,
                })
                .collect(),
        }
    }

    /// Header, bin table, per-record ranges and encodability, positive
    /// scores, and canonical order (object id, then score descending).
    pub fn validate(&self) -> Result<()> {
        if self.format != ANNOTATION_FORMAT {
            return Err(Error::Format(format!("expected format `{ANNOTATION_FORMAT}`, found `{}`", self.format)));
        }
        if self.version != ANNOTATION_VERSION {
            return Err(Error::Format(format!("unsupported annotation version {}", self.version)));
        }
        self.bins.validate()?;
        for (i, g) in self.grasps.iter().enumerate() {
            let cfg = g.config();
            cfg.validate().map_err(|e| Error::Validation(format!("grasp {i}: {e}")))?;
            if !(g.score > 0.0) || !(g.width > 0.0) {
                return Err(Error::Validation(format!("grasp {i}: width and score must be positive")));
            }
            encode_grasp(&cfg, &Point3::from(g.reference), &self.bins)
                .map_err(|e| Error::Validation(format!("grasp {i}: {e}")))?;
        }
        for (i, s) in self.suctions.iter().enumerate() {
            let cfg = s.config();
            cfg.validate().map_err(|e| Error::Validation(format!("suction {i}: {e}")))?;
            if !(s.score > 0.0) || !s.contact.iter().all(|c| c.is_finite()) {
                return Err(Error::Validation(format!("suction {i}: contact must be finite and score positive")));
            }
            encode_suction(&cfg, &self.bins).map_err(|e| Error::Validation(format!("suction {i}: {e}")))?;
        }
        let ordered = |a: (u32, f64), b: (u32, f64)| a.0 < b.0 || (a.0 == b.0 && a.1 >= b.1);
        if !self
            .grasps
            .windows(2)
            .all(|w| ordered((w[0].object_id, w[0].score), (w[1].object_id, w[1].score)))
            || !self
                .suctions
                .windows(2)
                .all(|w| ordered((w[0].object_id, w[0].score), (w[1].object_id, w[1].score)))
        {
            return Err(Error::Validation("records are not in canonical order".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text)?;
        f.validate()?;
        Ok(f)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
