//! ASCII PLY persistence for point clouds (`x y z [nx ny nz]`).

use std::fmt::Write as _;
use std::path::Path;

use super::{PointCloud, Point3, UnitVec3, Vec3};
use crate::{Error, Result};

pub fn to_ply_string(cloud: &PointCloud) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "ply\nformat ascii 1.0\nelement vertex {}", cloud.len());
    for axis in ["x", "y", "z"] {
        let _ = writeln!(s, "property double {axis}");
    }
    if cloud.normals.is_some() {
        for axis in ["nx", "ny", "nz"] {
            let _ = writeln!(s, "property double {axis}");
        }
    }
    s.push_str("end_header\n");
    for (i, p) in cloud.points.iter().enumerate() {
        let _ = write!(s, "{} {} {}", p.x, p.y, p.z);
        if let Some(normals) = &cloud.normals {
            let n = normals[i];
            let _ = write!(s, " {} {} {}", n.x, n.y, n.z);
        }
        s.push('\n');
    }
    s
}

pub fn parse_ply(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("ply") {
        return Err(Error::Format("missing `ply` magic".into()));
    }
    let mut count = None;
    let mut props: Vec<String> = Vec::new();
    let mut in_vertex = false;
    loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format("unterminated header".into()))?
            .trim();
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["format", fmt, _] if *fmt != "ascii" => {
                return Err(Error::Format(format!("unsupported PLY format {fmt}")));
            }
            ["element", "vertex", n] => {
                count = Some(
                    n.parse::<usize>()
                        .map_err(|e| Error::Format(format!("vertex count: {e}")))?,
                );
                in_vertex = true;
            }
            ["element", ..] => in_vertex = false,
            ["property", _, name] if in_vertex => props.push(name.to_string()),
            _ => {}
        }
    }
    let count = count.ok_or_else(|| Error::Format("no vertex element".into()))?;
    let col = |name: &str| props.iter().position(|p| p == name);
    let (x, y, z) = match (col("x"), col("y"), col("z")) {
        (Some(x), Some(y), Some(z)) => (x, y, z),
        _ => return Err(Error::Format("vertex element lacks x/y/z".into())),
    };
    let normal_cols = match (col("nx"), col("ny"), col("nz")) {
        (Some(a), Some(b), Some(c)) => Some((a, b, c)),
        _ => None,
    };
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(if normal_cols.is_some() { count } else { 0 });
    for i in 0..count {
        let line = lines
            .next()
            .ok_or_else(|| Error::Format(format!("expected {count} vertices, found {i}")))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Format(format!("vertex {i}: {e}")))?;
        if vals.len() < props.len() {
            return Err(Error::Format(format!("vertex {i} has {} values", vals.len())));
        }
        points.push(Point3::new(vals[x], vals[y], vals[z]));
        if let Some((a, b, c)) = normal_cols {
            normals.push(UnitVec3::new_normalize(Vec3::new(vals[a], vals[b], vals[c])));
        }
    }
    if normal_cols.is_some() {
        PointCloud::with_normals(points, normals)
    } else {
        Ok(PointCloud::new(points))
    }
}

pub fn write_ply(path: &Path, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, to_ply_string(cloud))?;
    Ok(())
}

pub fn read_ply(path: &Path) -> Result<PointCloud> {
    parse_ply(&std::fs::read_to_string(path)?)
}
