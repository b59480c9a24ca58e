use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{run_episode, CandidateCache, EpisodeConfig, EpisodeStats, Policy, PolicyParams};
use crate::par::{self, Execution};
use crate::scene::{generate_scene, PlacementParams, ShapeCatalog};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicySummary {
    pub policy: Policy,
    pub mean_sr: f64,
    pub mean_cr: f64,
    /// `(seed, sr, cr)` per scene.
    pub per_seed: Vec<(u64, f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub config: EpisodeConfig,
    pub seeds: Vec<u64>,
    pub summaries: Vec<PolicySummary>,
    /// Every episode, seed-major in policy order.
    pub episodes: Vec<EpisodeStats>,
}

impl Comparison {
    pub fn summary(&self, policy: Policy) -> Option<&PolicySummary> {
        self.summaries.iter().find(|s| s.policy == policy)
    }
}

/// Runs every policy on the same seeded scenes. Scenes are generated on the
/// default table; each seed's candidate cache is shared by all policies.
pub fn compare_policies(
    seeds: &[u64],
    cfg: &EpisodeConfig,
    policies: &[Policy],
    catalog: &ShapeCatalog,
    placement: &PlacementParams,
    params: &PolicyParams,
    exec: Execution,
) -> Result<Comparison> {
    if policies.len() < 2 {
        return Err(Error::Config("comparison needs at least two policies".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Config("comparison needs at least one seed".into()));
    }
    cfg.validate()?;
    params.validate()?;
    let table = crate::scene::default_table();
    let per_seed = par::map(exec, seeds, |&seed| -> Result<Vec<EpisodeStats>> {
        let scene = generate_scene(seed, cfg.n_objects, &table, catalog, placement)?.scene;
        let cache = CandidateCache::build(&scene, &params.candidates, Execution::Sequential)?;
        policies
            .iter()
            .map(|&p| run_episode(&scene, &cache, p, cfg, params))
            .collect()
    });
    let mut episodes = Vec::with_capacity(seeds.len() * policies.len());
    for r in per_seed {
        episodes.extend(r?);
    }
    let summaries = policies
        .iter()
        .map(|&policy| {
            let per_seed: Vec<(u64, f64, f64)> = episodes
                .iter()
                .filter(|e| e.policy == policy)
                .map(|e| (e.seed, e.sr, e.cr))
                .collect();
            let k = per_seed.len() as f64;
            PolicySummary {
                policy,
                mean_sr: per_seed.iter().map(|s| s.1).sum::<f64>() / k,
                mean_cr: per_seed.iter().map(|s| s.2).sum::<f64>() / k,
                per_seed,
            }
        })
        .collect();
    Ok(Comparison {
        config: *cfg,
        seeds: seeds.to_vec(),
        summaries,
        episodes,
    })
}

/// Comma-separated report: one row per policy, per-seed values as
/// `seed:sr:cr` joined by spaces.
pub fn comparison_table(c: &Comparison) -> String {
    let mut out = String::from("policy,n_objects,mean_sr,mean_cr,per_seed\n");
    for s in &c.summaries {
        let seeds: Vec<String> = s
            .per_seed
            .iter()
            .map(|(seed, sr, cr)| format!("{seed}:{sr:.4}:{cr:.4}"))
            .collect();
        let _ = writeln!(
            out,
            "{},{},{:.4},{:.4},{}",
            s.policy,
            c.config.n_objects,
            s.mean_sr,
            s.mean_cr,
            seeds.join(" ")
        );
    }
    out
}
