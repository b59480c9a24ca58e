//! Pinhole camera model, depth backprojection and depth-image persistence.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Point3;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        let ok = self.fx > 0.0
            && self.fy > 0.0
            && self.cx >= 0.0
            && self.cx < self.width as f64
            && self.cy >= 0.0
            && self.cy < self.height as f64;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid camera intrinsics {self:?}")))
        }
    }
}

/// Depth in meters, row-major; 0 marks an invalid pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthImage {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f64>,
}

impl DepthImage {
    pub fn new(width: u32, height: u32, data: Vec<f64>) -> Result<Self> {
        if data.len() != (width as usize) * (height as usize) {
            return Err(Error::Config(format!(
                "depth buffer of {} values for {width}x{height}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn get(&self, u: u32, v: u32) -> f64 {
        self.data[(v * self.width + u) as usize]
    }
}

/// H×W grid of camera-frame points; `None` where depth was invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct OrganizedCloud {
    pub width: u32,
    pub height: u32,
    pub grid: Vec<Option<Point3>>,
}

impl OrganizedCloud {
    pub fn get(&self, u: u32, v: u32) -> Option<Point3> {
        self.grid[(v * self.width + u) as usize]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }
}

pub fn backproject(depth: &DepthImage, intr: &CameraIntrinsics) -> Result<OrganizedCloud> {
    intr.validate()?;
    if depth.width != intr.width || depth.height != intr.height {
        return Err(Error::Config(format!(
            "depth image {}x{} does not match intrinsics {}x{}",
            depth.width, depth.height, intr.width, intr.height
        )));
    }
    let mut grid = Vec::with_capacity(depth.data.len());
    for v in 0..depth.height {
        for u in 0..depth.width {
            let z = depth.get(u, v);
            grid.push(if z > 0.0 && z.is_finite() {
                Some(Point3::new(
                    (u as f64 - intr.cx) * z / intr.fx,
                    (v as f64 - intr.cy) * z / intr.fy,
                    z,
                ))
            } else {
                None
            });
        }
    }
    Ok(OrganizedCloud {
        width: depth.width,
        height: depth.height,
        grid,
    })
}

/// Forward pinhole projection to continuous pixel coordinates `(u, v, depth)`.
/// Points at or behind the image plane return `None`.
pub fn project(p: &Point3, intr: &CameraIntrinsics) -> Option<(f64, f64, f64)> {
    if p.z <= 0.0 {
        return None;
    }
    Some((
        intr.fx * p.x / p.z + intr.cx,
        intr.fy * p.y / p.z + intr.cy,
        p.z,
    ))
}

/// Sidecar record stored next to a 16-bit depth PNG.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthSidecar {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// Meters per PNG unit.
    pub depth_scale: f64,
}

impl DepthSidecar {
    pub fn intrinsics(&self) -> CameraIntrinsics {
        CameraIntrinsics {
            fx: self.fx,
            fy: self.fy,
            cx: self.cx,
            cy: self.cy,
            width: self.width,
            height: self.height,
        }
    }
}

/// Writes a 16-bit grayscale PNG.
pub fn write_png16(path: &Path, width: u32, height: u32, values: &[u16]) -> Result<()> {
    let file = File::create(path)?;
    let mut enc = png::Encoder::new(BufWriter::new(file), width, height);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Sixteen);
    let mut writer = enc
        .write_header()
        .map_err(|e| Error::Format(format!("png header: {e}")))?;
    let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_be_bytes()).collect();
    writer
        .write_image_data(&bytes)
        .map_err(|e| Error::Format(format!("png data: {e}")))?;
    Ok(())
}

/// Reads a 16-bit grayscale PNG as `(width, height, values)`.
pub fn read_png16(path: &Path) -> Result<(u32, u32, Vec<u16>)> {
    let decoder = png::Decoder::new(BufReader::new(File::open(path)?));
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(format!("png: {e}")))?;
    let (color, depth) = reader.output_color_type();
    if color != png::ColorType::Grayscale || depth != png::BitDepth::Sixteen {
        return Err(Error::Format(format!(
            "expected 16-bit grayscale png, found {color:?}/{depth:?}"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("png too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(format!("png: {e}")))?;
    let values = buf[..info.buffer_size()]
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    Ok((info.width, info.height, values))
}

/// Quantizes depth into a 16-bit PNG and writes the JSON intrinsics sidecar.
pub fn write_depth(
    png_path: &Path,
    sidecar_path: &Path,
    depth: &DepthImage,
    intr: &CameraIntrinsics,
    depth_scale: f64,
) -> Result<()> {
    if depth_scale <= 0.0 {
        return Err(Error::Config("depth_scale must be positive".into()));
    }
    let values: Vec<u16> = depth
        .data
        .iter()
        .map(|&z| (z / depth_scale).round().clamp(0.0, u16::MAX as f64) as u16)
        .collect();
    write_png16(png_path, depth.width, depth.height, &values)?;
    let sidecar = DepthSidecar {
        fx: intr.fx,
        fy: intr.fy,
        cx: intr.cx,
        cy: intr.cy,
        width: intr.width,
        height: intr.height,
        depth_scale,
    };
    std::fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(())
}

pub fn read_depth(png_path: &Path, sidecar_path: &Path) -> Result<(DepthImage, CameraIntrinsics)> {
    let sidecar: DepthSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
    let intr = sidecar.intrinsics();
    intr.validate()?;
    let (w, h, values) = read_png16(png_path)?;
    if w != intr.width || h != intr.height {
        return Err(Error::Config(format!(
            "depth png {w}x{h} does not match sidecar {}x{}",
            intr.width, intr.height
        )));
    }
    let data = values
        .into_iter()
        .map(|v| v as f64 * sidecar.depth_scale)
        .collect();
    Ok((DepthImage::new(w, h, data)?, intr))
}
