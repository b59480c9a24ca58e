//! Bounding-volume hierarchy over a triangle mesh for nearest-hit ray queries.

use super::ray::RAY_EPS;
use super::{Hit, Point3, Ray, Surface, TriMesh, Vec3};

const LEAF_SIZE: usize = 4;

#[derive(Clone, Copy, Debug)]
struct Aabb {
    min: Vec3,
    max: Vec3,
}

impl Aabb {
    fn empty() -> Self {
        Self {
            min: Vec3::repeat(f64::INFINITY),
            max: Vec3::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Vec3) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    fn union(&self, o: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&o.min),
            max: self.max.sup(&o.max),
        }
    }

    /// Entry distance of the slab test, if the box is hit before `t_max`.
    fn hit(&self, origin: &Vec3, inv_dir: &Vec3, t_max: f64) -> Option<f64> {
        let mut t0 = 0.0f64;
        let mut t1 = t_max;
        for k in 0..3 {
            let a = (self.min[k] - origin[k]) * inv_dir[k];
            let b = (self.max[k] - origin[k]) * inv_dir[k];
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            // NaN from 0 * inf keeps the previous bound.
            if lo > t0 {
                t0 = lo;
            }
            if hi < t1 {
                t1 = hi;
            }
            if t0 > t1 {
                return None;
            }
        }
        Some(t0)
    }
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        bounds: Aabb,
        start: usize,
        count: usize,
    },
    Inner {
        bounds: Aabb,
        left: usize,
        right: usize,
    },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

/// A mesh with an acceleration structure; owns the mesh.
#[derive(Clone, Debug)]
pub struct MeshBvh {
    mesh: TriMesh,
    nodes: Vec<Node>,
    order: Vec<usize>,
}

impl MeshBvh {
    pub fn new(mesh: TriMesh) -> Self {
        let mut order: Vec<usize> = (0..mesh.faces.len()).collect();
        let centroids: Vec<Vec3> = (0..mesh.faces.len())
            .map(|i| {
                let [a, b, c] = mesh.triangle(i);
                (a.coords + b.coords + c.coords) / 3.0
            })
            .collect();
        let mut nodes = Vec::new();
        if !order.is_empty() {
            let n = order.len();
            build(&mesh, &centroids, &mut order, 0, n, &mut nodes);
        }
        Self { mesh, nodes, order }
    }

    pub fn mesh(&self) -> &TriMesh {
        &self.mesh
    }

    /// Nearest hit with its face index.
    pub fn raycast_face(&self, ray: &Ray) -> Option<(usize, Hit)> {
        if self.nodes.is_empty() {
            return None;
        }
        let origin = ray.origin.coords;
        let dir = ray.dir.into_inner();
        let inv = Vec3::new(1.0 / dir.x, 1.0 / dir.y, 1.0 / dir.z);
        let mut best: Option<(usize, f64)> = None;
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let limit = best.map_or(f64::INFINITY, |b| b.1);
            if self.nodes[idx].bounds().hit(&origin, &inv, limit).is_none() {
                continue;
            }
            match &self.nodes[idx] {
                Node::Leaf { start, count, .. } => {
                    for &face in &self.order[*start..start + count] {
                        let [a, b, c] = self.mesh.triangle(face);
                        if let Some(t) = intersect_triangle(&ray.origin, &dir, &a, &b, &c) {
                            if best.is_none_or(|(bf, bt)| t < bt || (t == bt && face < bf)) {
                                best = Some((face, t));
                            }
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    stack.push(*right);
                    stack.push(*left);
                }
            }
        }
        best.map(|(face, t)| {
            (
                face,
                Hit {
                    t,
                    point: ray.at(t),
                    normal: self.mesh.face_normal(face),
                },
            )
        })
    }
}

impl Surface for MeshBvh {
    fn raycast(&self, ray: &Ray) -> Option<Hit> {
        self.raycast_face(ray).map(|(_, h)| h)
    }
}

/// Nearest hit of a ray against a mesh.
pub fn raycast(bvh: &MeshBvh, origin: Point3, dir: super::UnitVec3) -> Option<(Point3, super::UnitVec3)> {
    bvh.raycast(&Ray::new(origin, dir)).map(|h| (h.point, h.normal))
}

fn build(
    mesh: &TriMesh,
    centroids: &[Vec3],
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let mut bounds = Aabb::empty();
    let mut cbounds = Aabb::empty();
    for &f in &order[start..end] {
        for p in mesh.triangle(f) {
            bounds.grow(&p.coords);
        }
        cbounds.grow(&centroids[f]);
    }
    let idx = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf {
            bounds,
            start,
            count: end - start,
        });
        return idx;
    }
    let extent = cbounds.max - cbounds.min;
    let axis = extent.imax();
    let mid = (start + end) / 2;
    order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
        centroids[a][axis]
            .total_cmp(&centroids[b][axis])
            .then(a.cmp(&b))
    });
    nodes.push(Node::Leaf {
        bounds,
        start: 0,
        count: 0,
    });
    let left = build(mesh, centroids, order, start, mid, nodes);
    let right = build(mesh, centroids, order, mid, end, nodes);
    let bounds = nodes[left].bounds().union(nodes[right].bounds());
    nodes[idx] = Node::Inner {
        bounds,
        left,
        right,
    };
    idx
}

/// Möller-Trumbore; double-sided, returns the ray parameter.
fn intersect_triangle(o: &Point3, d: &Vec3, a: &Point3, b: &Point3, c: &Point3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-300 {
        return None;
    }
    let inv = 1.0 / det;
    let s = o - a;
    let u = s.dot(&p) * inv;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = d.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv;
    (t > RAY_EPS).then_some(t)
}
