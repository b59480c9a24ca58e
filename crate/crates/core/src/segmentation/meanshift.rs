use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{InstanceMap, VoteField};
use crate::geometry::kdtree::KdTree;
use crate::geometry::{OrganizedCloud, Point3};
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanShiftParams {
    pub bandwidth: f64,
    pub max_iterations: u32,
    pub tolerance: f64,
    /// Clusters with fewer pixels become background.
    pub min_cluster_size: usize,
}

impl Default for MeanShiftParams {
    fn default() -> Self {
        Self {
            bandwidth: 0.03,
            max_iterations: 100,
            tolerance: 1e-5,
            min_cluster_size: 50,
        }
    }
}

impl MeanShiftParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::Config(format!("bandwidth {} must be positive", self.bandwidth)));
        }
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::Config("mean-shift tolerance and iterations must be positive".into()));
        }
        Ok(())
    }
}

/// Flat-kernel mean shift seeded from the means of occupied bandwidth-sized
/// bins.
fn find_modes(points: &[Point3], params: &MeanShiftParams, exec: Execution) -> Vec<Point3> {
    let bw = params.bandwidth;
    let mut bins: BTreeMap<(i64, i64, i64), (nalgebra::Vector3<f64>, usize)> = BTreeMap::new();
    for p in points {
        let key = (
            (p.x / bw).floor() as i64,
            (p.y / bw).floor() as i64,
            (p.z / bw).floor() as i64,
        );
        let e = bins.entry(key).or_insert((nalgebra::Vector3::zeros(), 0));
        e.0 += p.coords;
        e.1 += 1;
    }
    let seeds: Vec<Point3> = bins.values().map(|(s, c)| Point3::from(s / *c as f64)).collect();
    let tree = KdTree::new(points);
    let converged = par::map(exec, &seeds, |seed| {
        let mut x = *seed;
        let mut support = 0;
        for _ in 0..params.max_iterations {
            let (sum, count) = tree.sum_within(&x, bw);
            if count == 0 {
                break;
            }
            support = count;
            let next = Point3::from(sum / count as f64);
            let step = (next - x).norm();
            x = next;
            if step < params.tolerance {
                break;
            }
        }
        (x, support)
    });
    let mut ranked: Vec<(Point3, usize)> = converged.into_iter().filter(|(_, s)| *s > 0).collect();
    ranked.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.0.x.total_cmp(&b.0.x))
            .then(a.0.y.total_cmp(&b.0.y))
            .then(a.0.z.total_cmp(&b.0.z))
    });
    let mut modes: Vec<Point3> = Vec::new();
    for (m, _) in ranked {
        if modes.iter().all(|k| (k - m).norm() > 0.5 * bw) {
            modes.push(m);
        }
    }
    modes
}

/// Groups the foreground votes `D_i + V′_i` into instances. Each pixel takes
/// its nearest mode; small clusters fall back to background; ids follow the
/// canonical ordering of [`InstanceMap::canonical`].
pub fn cluster_votes(
    cloud: &OrganizedCloud,
    votes: &VoteField,
    fg_mask: &[bool],
    params: &MeanShiftParams,
    exec: Execution,
) -> Result<InstanceMap> {
    params.validate()?;
    let n = cloud.grid.len();
    if votes.offsets.len() != n || fg_mask.len() != n || votes.width != cloud.width || votes.height != cloud.height {
        return Err(Error::Config("cloud, votes and mask differ in size".into()));
    }
    let mut pixels = Vec::new();
    let mut points = Vec::new();
    for i in 0..n {
        if let (true, Some(d)) = (fg_mask[i], cloud.grid[i]) {
            pixels.push(i);
            points.push(d + votes.offsets[i]);
        }
    }
    if points.is_empty() {
        return Ok(InstanceMap::background(cloud.width, cloud.height));
    }
    let modes = find_modes(&points, params, exec);
    let mode_tree = KdTree::new(&modes);
    let mut raw = vec![0u32; n];
    let mut sizes = vec![0usize; modes.len()];
    let assignment: Vec<usize> = points.iter().map(|p| mode_tree.nearest(p, 1)[0]).collect();
    for &m in &assignment {
        sizes[m] += 1;
    }
    for (&pix, &m) in pixels.iter().zip(&assignment) {
        if sizes[m] >= params.min_cluster_size {
            raw[pix] = m as u32 + 1;
        }
    }
    Ok(InstanceMap::canonical(cloud.width, cloud.height, &raw)?.0)
}
