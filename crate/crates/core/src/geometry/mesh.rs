use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::Isometry3;

use super::{Point3, UnitVec3};
use crate::{Error, Result};

/// Indexed triangle mesh. Faces wind counter-clockwise seen from outside.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[u32; 3]>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3>, faces: Vec<[u32; 3]>) -> Result<Self> {
        let mesh = Self { vertices, faces };
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertices.len() as u32;
        if let Some(f) = self.faces.iter().find(|f| f.iter().any(|&i| i >= n)) {
            return Err(Error::Validation(format!(
                "face {f:?} references a vertex outside 0..{n}"
            )));
        }
        Ok(())
    }

    /// Every undirected edge is shared by exactly two faces.
    pub fn is_watertight(&self) -> bool {
        let mut edges: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        !edges.is_empty() && edges.values().all(|&c| c == 2)
    }

    pub fn triangle(&self, i: usize) -> [Point3; 3] {
        let f = self.faces[i];
        [
            self.vertices[f[0] as usize],
            self.vertices[f[1] as usize],
            self.vertices[f[2] as usize],
        ]
    }

    pub fn face_normal(&self, i: usize) -> UnitVec3 {
        let [a, b, c] = self.triangle(i);
        UnitVec3::new_normalize((b - a).cross(&(c - a)))
    }

    pub fn transformed(&self, iso: &Isometry3<f64>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| iso * p).collect(),
            faces: self.faces.clone(),
        }
    }

    /// Axis-aligned box centered on the origin.
    pub fn cuboid(hx: f64, hy: f64, hz: f64) -> Self {
        let vertices = (0..8)
            .map(|i| {
                Point3::new(
                    if i & 1 == 0 { -hx } else { hx },
                    if i & 2 == 0 { -hy } else { hy },
                    if i & 4 == 0 { -hz } else { hz },
                )
            })
            .collect();
        let faces = vec![
            [0, 2, 1],
            [1, 2, 3],
            [4, 5, 6],
            [5, 7, 6],
            [0, 1, 4],
            [1, 5, 4],
            [2, 6, 3],
            [3, 6, 7],
            [0, 4, 2],
            [2, 4, 6],
            [1, 3, 5],
            [3, 7, 5],
        ];
        Self { vertices, faces }
    }

    /// Vertical cylinder centered on the origin, vertices on the true surface.
    pub fn cylinder(radius: f64, half_height: f64, segments: u32) -> Self {
        let s = segments.max(3);
        let mut vertices = Vec::with_capacity(2 * s as usize + 2);
        for k in 0..s {
            let a = TAU * k as f64 / s as f64;
            vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), -half_height));
            vertices.push(Point3::new(radius * a.cos(), radius * a.sin(), half_height));
        }
        let bottom = vertices.len() as u32;
        vertices.push(Point3::new(0.0, 0.0, -half_height));
        let top = bottom + 1;
        vertices.push(Point3::new(0.0, 0.0, half_height));
        let mut faces = Vec::with_capacity(4 * s as usize);
        for k in 0..s {
            let (b0, t0) = (2 * k, 2 * k + 1);
            let (b1, t1) = (2 * ((k + 1) % s), 2 * ((k + 1) % s) + 1);
            faces.push([b0, b1, t1]);
            faces.push([b0, t1, t0]);
            faces.push([bottom, b1, b0]);
            faces.push([top, t0, t1]);
        }
        Self { vertices, faces }
    }

    /// Latitude-longitude sphere centered on the origin.
    pub fn sphere(radius: f64, stacks: u32, slices: u32) -> Self {
        let stacks = stacks.max(2);
        let slices = slices.max(3);
        let mut vertices = vec![Point3::new(0.0, 0.0, radius)];
        for i in 1..stacks {
            let phi = PI * i as f64 / stacks as f64;
            for j in 0..slices {
                let th = TAU * j as f64 / slices as f64;
                vertices.push(Point3::new(
                    radius * phi.sin() * th.cos(),
                    radius * phi.sin() * th.sin(),
                    radius * phi.cos(),
                ));
            }
        }
        let south = vertices.len() as u32;
        vertices.push(Point3::new(0.0, 0.0, -radius));
        let ring = |i: u32, j: u32| 1 + (i - 1) * slices + (j % slices);
        let mut faces = Vec::new();
        for j in 0..slices {
            faces.push([0, ring(1, j), ring(1, j + 1)]);
            faces.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
        }
        for i in 1..stacks - 1 {
            for j in 0..slices {
                let (a, b) = (ring(i, j), ring(i, j + 1));
                let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
                faces.push([a, c, d]);
                faces.push([a, d, b]);
            }
        }
        Self { vertices, faces }
    }

    /// Concatenates meshes, re-indexing faces.
    pub fn merge(meshes: &[TriMesh]) -> Self {
        let mut out = TriMesh::default();
        for m in meshes {
            let base = out.vertices.len() as u32;
            out.vertices.extend_from_slice(&m.vertices);
            out.faces
                .extend(m.faces.iter().map(|f| [f[0] + base, f[1] + base, f[2] + base]));
        }
        out
    }
}
