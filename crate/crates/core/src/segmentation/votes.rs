use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{InstanceMap, VoteField};
use crate::geometry::{backproject, OrganizedCloud, Point3, Vec3};
use crate::scene::{render_depth, SceneModel, TopDownCamera};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleVotes {
    pub cloud: OrganizedCloud,
    pub votes: VoteField,
    pub gt: InstanceMap,
    /// Camera-frame centroid of each ground-truth instance.
    pub centers: Vec<Point3>,
    pub instance_objects: Vec<u32>,
}

/// Ground-truth votes `V′_i = c_i − D_i` from a rendered view, with optional
/// isotropic Gaussian noise of standard deviation `noise` on each axis.
pub fn oracle_votes(scene: &SceneModel, camera: &TopDownCamera, noise: f64, seed: u64) -> Result<OracleVotes> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::Config(format!("noise {noise} must be non-negative")));
    }
    let r = render_depth(scene, camera)?;
    let cloud = backproject(&r.depth, &camera.intrinsics)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).map_err(|e| Error::Config(e.to_string()))?;
    let offsets = cloud
        .grid
        .iter()
        .zip(&r.instances.labels)
        .map(|(d, &l)| match (d, l) {
            (Some(d), l) if l > 0 => {
                let v = r.centers[l as usize - 1] - d;
                if noise > 0.0 {
                    v + Vec3::new(normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng))
                } else {
                    v
                }
            }
            _ => Vec3::zeros(),
        })
        .collect();
    Ok(OracleVotes {
        votes: VoteField::new(cloud.width, cloud.height, offsets)?,
        cloud,
        gt: r.instances,
        centers: r.centers,
        instance_objects: r.instance_objects,
    })
}

/// Pixel F-measure between two instance labelings. Instances are matched
/// one-to-one greedily by overlap; precision and recall count matched
/// overlap pixels against all predicted and all ground-truth foreground.
pub fn f_measure(pred: &InstanceMap, gt: &InstanceMap) -> Result<f64> {
    if pred.labels.len() != gt.labels.len() {
        return Err(Error::Data("label maps differ in size".into()));
    }
    let mut overlap: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let (mut n_pred, mut n_gt) = (0usize, 0usize);
    for (&p, &g) in pred.labels.iter().zip(&gt.labels) {
        n_pred += (p > 0) as usize;
        n_gt += (g > 0) as usize;
        if p > 0 && g > 0 {
            *overlap.entry((p, g)).or_default() += 1;
        }
    }
    if n_pred == 0 && n_gt == 0 {
        return Ok(1.0);
    }
    if n_pred == 0 || n_gt == 0 {
        return Ok(0.0);
    }
    let mut pairs: Vec<((u32, u32), usize)> = overlap.into_iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut used_p = std::collections::BTreeSet::new();
    let mut used_g = std::collections::BTreeSet::new();
    let mut matched = 0usize;
    for ((p, g), c) in pairs {
        if !used_p.contains(&p) && !used_g.contains(&g) {
            used_p.insert(p);
            used_g.insert(g);
            matched += c;
        }
    }
    let precision = matched as f64 / n_pred as f64;
    let recall = matched as f64 / n_gt as f64;
    Ok(if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    })
}
