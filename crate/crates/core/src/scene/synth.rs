use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{ObjectInstance, SceneModel, WorkspaceModel};
use super::shape::PrimitiveShape;
use crate::geometry::planar::{Rect, Vec2};
use crate::{Error, Result};

/// Closed sampling interval.
pub type Range = (f64, f64);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ShapeTemplate {
    Box { w: Range, d: Range, h: Range },
    Cylinder { r: Range, h: Range },
    Sphere { r: Range },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub weight: f64,
    pub template: ShapeTemplate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl Default for ShapeCatalog {
    /// Thin boxes and small spheres only fit the gripper, wide flat boxes
    /// only the cup; cylinders and larger spheres suit either.
    fn default() -> Self {
        let entry = |name: &str, weight: f64, template| CatalogEntry {
            name: name.into(),
            weight,
            template,
        };
        Self {
            entries: vec![
                entry(
                    "thin-box",
                    1.0,
                    ShapeTemplate::Box {
                        w: (0.015, 0.018),
                        d: (0.06, 0.10),
                        h: (0.04, 0.08),
                    },
                ),
                entry(
                    "flat-box",
                    1.0,
                    ShapeTemplate::Box {
                        w: (0.06, 0.12),
                        d: (0.06, 0.12),
                        h: (0.02, 0.05),
                    },
                ),
                entry("small-sphere", 0.6, ShapeTemplate::Sphere { r: (0.007, 0.009) }),
                entry("sphere", 0.7, ShapeTemplate::Sphere { r: (0.015, 0.03) }),
                entry(
                    "cylinder",
                    1.0,
                    ShapeTemplate::Cylinder {
                        r: (0.015, 0.022),
                        h: (0.04, 0.10),
                    },
                ),
            ],
        }
    }
}

impl ShapeCatalog {
    pub fn validate(&self) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Config("shape catalog is empty".into()));
        }
        for e in &self.entries {
            if !(e.weight.is_finite() && e.weight > 0.0) {
                return Err(Error::Config(format!("catalog entry `{}` has weight {}", e.name, e.weight)));
            }
            let ranges: Vec<Range> = match e.template {
                ShapeTemplate::Box { w, d, h } => vec![w, d, h],
                ShapeTemplate::Cylinder { r, h } => vec![r, h],
                ShapeTemplate::Sphere { r } => vec![r],
            };
            if ranges.iter().any(|&(lo, hi)| !(lo > 0.0 && hi >= lo && hi.is_finite())) {
                return Err(Error::Config(format!("catalog entry `{}` has an invalid range", e.name)));
            }
        }
        Ok(())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PrimitiveShape {
        let total: f64 = self.entries.iter().map(|e| e.weight).sum();
        let mut pick = rng.random::<f64>() * total;
        let mut chosen = &self.entries[self.entries.len() - 1];
        for e in &self.entries {
            if pick < e.weight {
                chosen = e;
                break;
            }
            pick -= e.weight;
        }
        let mut u = |(lo, hi): Range| lo + (hi - lo) * rng.random::<f64>();
        match chosen.template {
            ShapeTemplate::Box { w, d, h } => PrimitiveShape::Box {
                w: u(w),
                d: u(d),
                h: u(h),
            },
            ShapeTemplate::Cylinder { r, h } => PrimitiveShape::Cylinder { r: u(r), h: u(h) },
            ShapeTemplate::Sphere { r } => PrimitiveShape::Sphere { r: u(r) },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementParams {
    /// Minimum footprint gap between neighbors.
    pub min_gap: f64,
    /// Minimum distance between object centers in the table plane.
    pub min_center_separation: f64,
    /// Keep-out band along the table edges.
    pub edge_margin: f64,
    pub attempts_per_object: u32,
}

impl Default for PlacementParams {
    fn default() -> Self {
        Self {
            min_gap: 0.005,
            min_center_separation: 0.04,
            edge_margin: 0.03,
            attempts_per_object: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthResult {
    pub scene: SceneModel,
    pub requested: usize,
}

impl SynthResult {
    pub fn placed(&self) -> usize {
        self.scene.objects.len()
    }

    pub fn is_partial(&self) -> bool {
        self.placed() < self.requested
    }
}

/// Rejection-sampled cluttered scene; object ids run from 1 in placement
/// order.
pub fn generate_scene(
    seed: u64,
    n_objects: usize,
    bounds: &Rect,
    catalog: &ShapeCatalog,
    params: &PlacementParams,
) -> Result<SynthResult> {
    if n_objects == 0 {
        return Err(Error::Config("n_objects must be at least 1".into()));
    }
    if !bounds.is_valid() {
        return Err(Error::Config("table bounds are empty".into()));
    }
    catalog.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut objects: Vec<ObjectInstance> = Vec::with_capacity(n_objects);
    for k in 0..n_objects {
        let shape = catalog.sample(&mut rng);
        let reach = shape.planar_radius() + params.edge_margin;
        let (x_lo, x_hi) = (bounds.x_min + reach, bounds.x_max - reach);
        let (y_lo, y_hi) = (bounds.y_min + reach, bounds.y_max - reach);
        if x_lo > x_hi || y_lo > y_hi {
            continue;
        }
        for _ in 0..params.attempts_per_object {
            let x = x_lo + (x_hi - x_lo) * rng.random::<f64>();
            let y = y_lo + (y_hi - y_lo) * rng.random::<f64>();
            let yaw = match shape {
                PrimitiveShape::Box { .. } => PI * rng.random::<f64>(),
                _ => 0.0,
            };
            let candidate = ObjectInstance::resting(k as u32 + 1, shape, x, y, yaw);
            let fp = candidate.footprint();
            let xy = Vec2::new(x, y);
            let clear = objects.iter().all(|o| {
                (o.pose.xy() - xy).norm() >= params.min_center_separation
                    && o.footprint().separation(&fp) >= params.min_gap
            });
            if clear {
                objects.push(candidate);
                break;
            }
        }
    }
    Ok(SynthResult {
        scene: SceneModel {
            seed,
            workspace: WorkspaceModel::for_table(*bounds),
            objects,
        },
        requested: n_objects,
    })
}
