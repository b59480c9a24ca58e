//! Least-squares plane fitting by principal components.

use nalgebra::{Matrix3, SymmetricEigen};

use super::{Point3, UnitVec3, Vec3};
use crate::{Error, Result};

/// Relative eigenvalue floor below which a direction counts as collapsed.
const RANK_EPS: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Plane {
    pub point: Point3,
    pub normal: UnitVec3,
}

impl Plane {
    pub fn signed_distance(&self, p: &Point3) -> f64 {
        (p - self.point).dot(&self.normal)
    }

    /// Same plane with the normal flipped so that `normal · toward >= 0`.
    pub fn oriented_toward(self, toward: &Vec3) -> Self {
        if self.normal.dot(toward) < 0.0 {
            Self {
                point: self.point,
                normal: -self.normal,
            }
        } else {
            self
        }
    }
}

impl super::Surface for Plane {
    fn raycast(&self, ray: &super::Ray) -> Option<super::Hit> {
        let denom = ray.dir.dot(&self.normal);
        if denom.abs() < 1e-300 {
            return None;
        }
        let t = (self.point - ray.origin).dot(&self.normal) / denom;
        (t > super::ray::RAY_EPS).then(|| super::Hit {
            t,
            point: ray.at(t),
            normal: self.normal,
        })
    }
}

/// Centroid and eigen-decomposition of the scatter matrix, eigenvalues ascending.
pub fn principal_axes(points: &[Point3]) -> (Point3, [f64; 3], [Vec3; 3]) {
    let n = points.len() as f64;
    let centroid = Point3::from(points.iter().map(|p| p.coords).sum::<Vec3>() / n);
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.map(|i| eig.eigenvalues[i].max(0.0));
    let vectors = order.map(|i| eig.eigenvectors.column(i).into_owned());
    (centroid, values, vectors)
}

/// Plane minimizing the summed squared orthogonal distances: through the
/// centroid, normal along the smallest principal axis.
pub fn fit_plane_lsq(points: &[Point3]) -> Result<Plane> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "plane fit needs 3 points, got {}",
            points.len()
        )));
    }
    let (centroid, values, vectors) = principal_axes(points);
    if values[1] <= RANK_EPS * values[2] || values[2] == 0.0 {
        return Err(Error::Degenerate("points are collinear or coincident".into()));
    }
    Ok(Plane {
        point: centroid,
        normal: UnitVec3::new_normalize(vectors[0]),
    })
}
