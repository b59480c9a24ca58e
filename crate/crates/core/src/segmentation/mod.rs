//! Nonprehensile-branch math: foreground and center-offset reference losses,
//! mean-shift grouping of center votes, and ground-truth vote rendering.

pub mod io;
pub mod loss;
pub mod meanshift;
pub mod votes;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec3;
use crate::{Error, Result};

pub use io::{read_instance_map, write_instance_map, InstanceRecord, InstanceSidecar};
pub use loss::{center_offset_loss, foreground_loss, huber, nonpre_loss, LossWeights, HUBER_DELTA};
pub use meanshift::{cluster_votes, MeanShiftParams};
pub use votes::{f_measure, oracle_votes, OracleVotes};

/// Per-pixel 3-D offsets from surface points to their object centers.
#[derive(Clone, Debug, PartialEq)]
pub struct VoteField {
    pub width: u32,
    pub height: u32,
    pub offsets: Vec<Vec3>,
}

impl VoteField {
    pub fn new(width: u32, height: u32, offsets: Vec<Vec3>) -> Result<Self> {
        if offsets.len() != width as usize * height as usize {
            return Err(Error::Config(format!(
                "vote field of {} offsets for {width}x{height}",
                offsets.len()
            )));
        }
        Ok(Self {
            width,
            height,
            offsets,
        })
    }
}

/// Row-major labels: 0 is background, instances are numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMap {
    pub width: u32,
    pub height: u32,
    pub labels: Vec<u32>,
}

impl InstanceMap {
    pub fn background(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width as usize * height as usize],
        }
    }

    pub fn instance_count(&self) -> u32 {
        self.labels.iter().copied().max().unwrap_or(0)
    }

    pub fn pixel_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.instance_count() as usize];
        for &l in &self.labels {
            if l > 0 {
                counts[l as usize - 1] += 1;
            }
        }
        counts
    }

    pub fn foreground(&self) -> Vec<bool> {
        self.labels.iter().map(|&l| l > 0).collect()
    }

    /// Relabels arbitrary nonzero ids into the canonical numbering:
    /// descending pixel count, ties by the scanline index of the first
    /// pixel. Also returns the source id of each canonical instance.
    pub fn canonical(width: u32, height: u32, raw: &[u32]) -> Result<(Self, Vec<u32>)> {
        if raw.len() != width as usize * height as usize {
            return Err(Error::Config(format!(
                "label buffer of {} values for {width}x{height}",
                raw.len()
            )));
        }
        let mut stats: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
        for (i, &l) in raw.iter().enumerate() {
            if l > 0 {
                stats.entry(l).or_insert((0, i)).0 += 1;
            }
        }
        let mut order: Vec<(u32, usize, usize)> = stats.into_iter().map(|(l, (c, f))| (l, c, f)).collect();
        order.sort_by(|a, b| b.1.cmp(&a.1).then(a.2.cmp(&b.2)));
        let remap: BTreeMap<u32, u32> = order
            .iter()
            .enumerate()
            .map(|(k, (l, _, _))| (*l, k as u32 + 1))
            .collect();
        let labels = raw.iter().map(|l| if *l == 0 { 0 } else { remap[l] }).collect();
        Ok((
            Self {
                width,
                height,
                labels,
            },
            order.into_iter().map(|(l, _, _)| l).collect(),
        ))
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.width as usize * self.height as usize {
            return Err(Error::Validation("label buffer does not match dimensions".into()));
        }
        if self.pixel_counts().contains(&0) {
            return Err(Error::Validation("instance ids are not contiguous".into()));
        }
        Ok(())
    }
}
