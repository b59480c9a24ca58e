//! Per-point normals from k-nearest-neighbor plane fits.

use super::kdtree::KdTree;
use super::plane::principal_axes;
use super::{PointCloud, Point3, UnitVec3};
use crate::{Error, Result};

/// Estimates a normal for each point from its `k` nearest neighbors (the point
/// itself included), oriented toward `viewpoint`. Points whose neighborhood is
/// collinear or coincident get `None`.
pub fn estimate_normals(cloud: &PointCloud, k: usize, viewpoint: &Point3) -> Result<Vec<Option<UnitVec3>>> {
    if k < 3 {
        return Err(Error::Config(format!("k must be at least 3, got {k}")));
    }
    if cloud.len() < k {
        return Err(Error::Config(format!(
            "cloud has {} points, fewer than k = {k}",
            cloud.len()
        )));
    }
    let tree = KdTree::new(&cloud.points);
    let mut neigh = Vec::with_capacity(k);
    Ok(cloud
        .points
        .iter()
        .map(|p| {
            neigh.clear();
            neigh.extend(tree.nearest(p, k).into_iter().map(|i| cloud.points[i]));
            let (_, values, vectors) = principal_axes(&neigh);
            if values[2] == 0.0 || values[1] <= 1e-10 * values[2] {
                return None;
            }
            let n = UnitVec3::new_normalize(vectors[0]);
            Some(if n.dot(&(viewpoint - p)) < 0.0 { -n } else { n })
        })
        .collect())
}

/// Cloud carrying the estimated normals; invalid points are dropped.
pub fn with_estimated_normals(cloud: &PointCloud, k: usize, viewpoint: &Point3) -> Result<PointCloud> {
    let normals = estimate_normals(cloud, k, viewpoint)?;
    let (points, normals): (Vec<_>, Vec<_>) = cloud
        .points
        .iter()
        .zip(normals)
        .filter_map(|(p, n)| n.map(|n| (*p, n)))
        .unzip();
    PointCloud::with_normals(points, normals)
}
