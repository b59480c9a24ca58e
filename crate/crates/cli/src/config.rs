use std::path::Path;

use pgs_core::grasp::GraspParams;
use pgs_core::policy::{CandidateParams, EpisodeConfig, ExecutionNoise, PolicyParams};
use pgs_core::pose_codec::BinSpecSet;
use pgs_core::push::PushParams;
use pgs_core::scene::{PlacementParams, ShapeCatalog};
use pgs_core::segmentation::MeanShiftParams;
use pgs_core::suction::SuctionParams;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotateSection {
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentSection {
    pub mean_shift: MeanShiftParams,
    /// Standard deviation of the oracle vote noise, meters.
    pub vote_noise: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSection {
    pub points_per_object: usize,
    pub push_limit: u32,
    /// Overrides the budget paired with the object count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempt_budget: Option<u32>,
    pub noise: ExecutionNoise,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub bins: BinSpecSet,
    pub suction: SuctionParams,
    pub grasp: GraspParams,
    pub push: PushParams,
    pub annotate: AnnotateSection,
    pub segment: SegmentSection,
    pub episode: EpisodeSection,
    pub placement: PlacementParams,
    pub catalog: ShapeCatalog,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            bins: BinSpecSet::default(),
            suction: SuctionParams::default(),
            grasp: GraspParams::default(),
            push: PushParams::default(),
            annotate: AnnotateSection { points: 16384 },
            segment: SegmentSection {
                mean_shift: MeanShiftParams::default(),
                vote_noise: 0.0,
            },
            episode: EpisodeSection {
                points_per_object: CandidateParams::default().points_per_object,
                push_limit: 2,
                attempt_budget: None,
                noise: ExecutionNoise::default(),
            },
            placement: PlacementParams::default(),
            catalog: ShapeCatalog::default(),
        }
    }
}

/// Overlays `user` on `base`; every user key must already exist in `base`.
fn merge(base: &mut toml::Value, user: toml::Value, path: &str) -> Result<(), CliError> {
    match (base, user) {
        (toml::Value::Table(b), toml::Value::Table(u)) => {
            for (k, v) in u {
                let sub = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v, &sub)?,
                    None if sub == "episode.attempt_budget" => {
                        b.insert(k, v);
                    }
                    None => return Err(CliError::Validation(format!("unknown config key `{sub}`"))),
                }
            }
            Ok(())
        }
        (slot, v) => {
            *slot = v;
            Ok(())
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            let cfg = Self::default();
            cfg.validate()?;
            return Ok(cfg);
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let user: toml::Value = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        let mut base = toml::Value::try_from(Self::default()).map_err(|e| CliError::Runtime(e.to_string()))?;
        merge(&mut base, user, "")?;
        let cfg: Self = base
            .try_into()
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.bins.validate()?;
        self.suction.validate()?;
        self.grasp.validate()?;
        self.push.validate()?;
        self.segment.mean_shift.validate()?;
        self.catalog.validate()?;
        self.policy_params().validate()?;
        if self.annotate.points == 0 {
            return Err(CliError::Validation("annotate.points must be positive".into()));
        }
        if !(self.segment.vote_noise >= 0.0) {
            return Err(CliError::Validation("segment.vote_noise must be non-negative".into()));
        }
        Ok(())
    }

    pub fn policy_params(&self) -> PolicyParams {
        PolicyParams {
            candidates: CandidateParams {
                grasp: self.grasp,
                suction: self.suction,
                points_per_object: self.episode.points_per_object,
            },
            push: self.push,
            noise: self.episode.noise,
        }
    }

    pub fn episode_config(&self, n_objects: usize) -> EpisodeConfig {
        let mut cfg = EpisodeConfig::for_objects(n_objects);
        cfg.push_limit = self.episode.push_limit;
        if let Some(b) = self.episode.attempt_budget {
            cfg.attempt_budget = b;
        }
        cfg
    }

    /// SHA-256 of the canonical JSON form, hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}
