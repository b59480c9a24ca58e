use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::SceneModel;
use crate::geometry::planar::Vec2;
use crate::geometry::{Point3, PointCloud, UnitVec3, Vec3};
use crate::{Error, Result};

/// Points seen from above, each tagged with the object it lies on.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneCloud {
    pub cloud: PointCloud,
    /// `None` for table points.
    pub owners: Vec<Option<u32>>,
}

/// Visible-from-above area per surface: table (minus footprints) first, then
/// each object in scene order.
pub fn visible_areas(scene: &SceneModel) -> (f64, Vec<f64>) {
    let covered: f64 = scene.objects.iter().map(|o| o.footprint().area()).sum();
    let table = (scene.table().area() - covered).max(0.0);
    (table, scene.objects.iter().map(|o| o.shape.top_area()).collect())
}

/// Area-weighted uniform sample of exactly `count` points over the surfaces
/// visible from above, with outward normals.
pub fn sample_cloud(scene: &SceneModel, count: usize, seed: u64) -> Result<SceneCloud> {
    if count == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let (table_area, areas) = visible_areas(scene);
    let total = table_area + areas.iter().sum::<f64>();
    if total <= 0.0 {
        return Err(Error::Config("scene has no visible surface".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let footprints: Vec<_> = scene.objects.iter().map(|o| o.footprint()).collect();
    let rect = *scene.table();
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(count);
    let mut owners = Vec::with_capacity(count);
    for _ in 0..count {
        let mut pick = rng.random::<f64>() * total;
        let mut surface = None;
        for (i, a) in areas.iter().enumerate() {
            if pick < *a {
                surface = Some(i);
                break;
            }
            pick -= a;
        }
        match surface {
            Some(i) => {
                let obj = &scene.objects[i];
                let (p, n) = obj.shape.sample_top(&mut rng);
                points.push(obj.to_world(&p));
                normals.push(UnitVec3::new_unchecked(obj.vec_to_world(&n)));
                owners.push(Some(obj.object_id));
            }
            None => loop {
                let x = rect.x_min + (rect.x_max - rect.x_min) * rng.random::<f64>();
                let y = rect.y_min + (rect.y_max - rect.y_min) * rng.random::<f64>();
                let xy = Vec2::new(x, y);
                if footprints.iter().all(|f| !f.contains(&xy)) {
                    points.push(Point3::new(x, y, 0.0));
                    normals.push(UnitVec3::new_unchecked(Vec3::z()));
                    owners.push(None);
                    break;
                }
            },
        }
    }
    Ok(SceneCloud {
        cloud: PointCloud::with_normals(points, normals)?,
        owners,
    })
}
