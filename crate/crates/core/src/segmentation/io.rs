//! Instance maps as 16-bit label PNGs with a JSON sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::InstanceMap;
use crate::geometry::camera::{read_png16, write_png16};
use crate::geometry::Point3;
use crate::{Error, Result};

pub const LABELS_FORMAT: &str = "pgs-instances";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: u32,
    pub pixels: usize,
    pub centroid: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceSidecar {
    pub format: String,
    pub version: u32,
    pub width: u32,
    pub height: u32,
    pub instances: Vec<InstanceRecord>,
}

pub fn write_instance_map(png: &Path, sidecar: &Path, map: &InstanceMap, centroids: &[Point3]) -> Result<()> {
    map.validate()?;
    let counts = map.pixel_counts();
    if centroids.len() != counts.len() {
        return Err(Error::Data(format!(
            "{} centroids for {} instances",
            centroids.len(),
            counts.len()
        )));
    }
    if counts.len() > u16::MAX as usize {
        return Err(Error::Data("too many instances for a 16-bit label image".into()));
    }
    let values: Vec<u16> = map.labels.iter().map(|&l| l as u16).collect();
    write_png16(png, map.width, map.height, &values)?;
    let record = InstanceSidecar {
        format: LABELS_FORMAT.into(),
        version: 1,
        width: map.width,
        height: map.height,
        instances: counts
            .iter()
            .zip(centroids)
            .enumerate()
            .map(|(k, (&pixels, c))| InstanceRecord {
                id: k as u32 + 1,
                pixels,
                centroid: [c.x, c.y, c.z],
            })
            .collect(),
    };
    std::fs::write(sidecar, serde_json::to_string_pretty(&record)? + "\n")?;
    Ok(())
}

pub fn read_instance_map(png: &Path, sidecar: &Path) -> Result<(InstanceMap, InstanceSidecar)> {
    let (width, height, values) = read_png16(png)?;
    let side: InstanceSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
    if side.format != LABELS_FORMAT || side.width != width || side.height != height {
        return Err(Error::Format("label sidecar does not describe this image".into()));
    }
    let map = InstanceMap {
        width,
        height,
        labels: values.into_iter().map(u32::from).collect(),
    };
    map.validate()?;
    if map.pixel_counts() != side.instances.iter().map(|r| r.pixels).collect::<Vec<_>>() {
        return Err(Error::Format("label sidecar pixel counts disagree with the image".into()));
    }
    Ok((map, side))
}
