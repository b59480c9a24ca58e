//! Primitive-shape tabletop scenes: synthesis, persistence, depth rendering,
//! and surface sampling.

pub mod model;
pub mod render;
pub mod sample;
pub mod shape;
pub mod synth;

pub use model::{default_table, ObjectInstance, Pose, SceneHit, SceneModel, WorkspaceModel};
pub use render::{render_depth, Rendering, TopDownCamera};
pub use sample::{sample_cloud, visible_areas, SceneCloud};
pub use shape::PrimitiveShape;
pub use synth::{generate_scene, CatalogEntry, PlacementParams, ShapeCatalog, ShapeTemplate, SynthResult};
