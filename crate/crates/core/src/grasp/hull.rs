//! Incremental (beneath-beyond) convex hull in `D` dimensions, used for the
//! six-dimensional wrench space.

use nalgebra::SVector;
use rustc_hash::FxHashMap;

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Facet<const D: usize> {
    pub vertices: [usize; D],
    /// Outward unit normal.
    pub normal: SVector<f64, D>,
    /// `normal · x` for points on the facet; the signed distance of the
    /// origin to the facet hyperplane is `offset` (positive when inside).
    pub offset: f64,
    neighbors: [usize; D],
    alive: bool,
}

#[derive(Clone, Debug)]
pub struct Hull<const D: usize> {
    pub facets: Vec<Facet<D>>,
}

impl<const D: usize> Hull<D> {
    pub fn live_facets(&self) -> impl Iterator<Item = &Facet<D>> {
        self.facets.iter().filter(|f| f.alive)
    }

    /// Smallest signed distance from the origin to a facet hyperplane.
    /// Positive exactly when the origin is strictly inside.
    pub fn min_offset(&self) -> f64 {
        self.live_facets().map(|f| f.offset).fold(f64::INFINITY, f64::min)
    }
}

/// Unit vector orthogonal to the `D − 1` edge vectors, `None` if they are
/// rank deficient.
fn normal_of<const D: usize>(edges: &[SVector<f64, D>]) -> Option<SVector<f64, D>> {
    let mut store = [SVector::<f64, D>::zeros(); D];
    for (i, e) in edges.iter().enumerate() {
        let mut v = *e;
        for _ in 0..2 {
            for b in &store[..i] {
                v -= b * b.dot(&v);
            }
        }
        let n = v.norm();
        if n < 1e-14 * e.norm().max(1e-300) {
            return None;
        }
        store[i] = v / n;
    }
    let basis = &store[..edges.len()];
    let mut best: Option<(f64, SVector<f64, D>)> = None;
    for j in 0..D {
        let mut v = SVector::<f64, D>::zeros();
        v[j] = 1.0;
        for b in basis {
            v -= b * b.dot(&v);
        }
        let n = v.norm();
        if best.as_ref().is_none_or(|(m, _)| n > *m) {
            best = Some((n, v));
        }
    }
    let (_, mut v) = best?;
    for b in basis {
        v -= b * b.dot(&v);
    }
    let n = v.norm();
    (n > 0.0).then(|| v / n)
}

fn make_facet<const D: usize>(
    points: &[SVector<f64, D>],
    vertices: [usize; D],
    interior: &SVector<f64, D>,
) -> Option<Facet<D>> {
    let base = points[vertices[0]];
    let mut edges = [SVector::<f64, D>::zeros(); D];
    for (e, &v) in edges.iter_mut().zip(&vertices[1..]) {
        *e = points[v] - base;
    }
    let mut normal = normal_of(&edges[..D - 1])?;
    if normal.dot(&(interior - base)) > 0.0 {
        normal = -normal;
    }
    Some(Facet {
        vertices,
        offset: normal.dot(&base),
        normal,
        neighbors: [usize::MAX; D],
        alive: true,
    })
}

/// Greedy choice of `D + 1` affinely independent points.
fn initial_simplex<const D: usize>(points: &[SVector<f64, D>], tol: f64) -> Option<Vec<usize>> {
    let mut chosen = vec![0usize];
    let far = (1..points.len()).max_by(|&a, &b| {
        (points[a] - points[0])
            .norm_squared()
            .total_cmp(&(points[b] - points[0]).norm_squared())
    })?;
    chosen.push(far);
    let mut basis: Vec<SVector<f64, D>> = vec![(points[far] - points[0]).normalize()];
    while chosen.len() < D + 1 {
        let mut best: Option<(f64, usize, SVector<f64, D>)> = None;
        for (i, p) in points.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            let mut v = p - points[0];
            for b in &basis {
                v -= b * b.dot(&v);
            }
            let n = v.norm();
            if best.as_ref().is_none_or(|(m, _, _)| n > *m) {
                best = Some((n, i, v));
            }
        }
        let (n, i, v) = best?;
        if n <= tol {
            return None;
        }
        chosen.push(i);
        basis.push(v / n);
    }
    Some(chosen)
}

/// Convex hull of `points`, which must span all `D` dimensions. Inputs should
/// be in general position; callers joggle degenerate sets first.
pub fn convex_hull<const D: usize>(points: &[SVector<f64, D>]) -> Result<Hull<D>> {
    if points.len() < D + 1 {
        return Err(Error::Degenerate(format!("{} points cannot span {D} dimensions", points.len())));
    }
    let scale = points.iter().map(|p| p.amax()).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-12 * scale;
    let simplex = initial_simplex(points, 1e-10 * scale)
        .ok_or_else(|| Error::Degenerate("points do not span the full space".into()))?;
    let interior = simplex.iter().map(|&i| points[i]).sum::<SVector<f64, D>>() / (D + 1) as f64;

    let mut facets: Vec<Facet<D>> = Vec::new();
    for skip in 0..=D {
        let mut verts = [0usize; D];
        let mut k = 0;
        for (j, &v) in simplex.iter().enumerate() {
            if j != skip {
                verts[k] = v;
                k += 1;
            }
        }
        let f = make_facet(points, verts, &interior)
            .ok_or_else(|| Error::Degenerate("flat initial simplex".into()))?;
        facets.push(f);
    }
    // Facet `i` omits simplex vertex `i`; its neighbor across the ridge
    // missing vertex `verts[k]` is the facet omitting that vertex.
    for i in 0..=D {
        for k in 0..D {
            let v = facets[i].vertices[k];
            let j = simplex.iter().position(|&s| s == v).expect("simplex vertex");
            facets[i].neighbors[k] = j;
        }
    }

    let mut visible = Vec::new();
    let mut ridges: FxHashMap<[usize; D], (usize, usize)> = FxHashMap::default();
    for (pi, p) in points.iter().enumerate() {
        if simplex.contains(&pi) {
            continue;
        }
        visible.clear();
        for (fi, f) in facets.iter().enumerate() {
            if f.alive && f.normal.dot(p) - f.offset > eps {
                visible.push(fi);
            }
        }
        if visible.is_empty() {
            continue;
        }
        let is_visible = |fi: usize, facets: &[Facet<D>]| facets[fi].alive && facets[fi].normal.dot(p) - facets[fi].offset > eps;
        let mut created: Vec<usize> = Vec::new();
        for &fi in &visible {
            for k in 0..D {
                let g = facets[fi].neighbors[k];
                if is_visible(g, &facets) {
                    continue;
                }
                let mut verts = facets[fi].vertices;
                verts[k] = pi;
                let Some(mut nf) = make_facet(points, verts, &interior) else {
                    continue;
                };
                nf.neighbors[k] = g;
                let id = facets.len();
                if let Some(slot) = facets[g].neighbors.iter().position(|&x| x == fi) {
                    facets[g].neighbors[slot] = id;
                }
                facets.push(nf);
                created.push(id);
            }
        }
        for &fi in &visible {
            facets[fi].alive = false;
        }
        ridges.clear();
        for &id in &created {
            let verts = facets[id].vertices;
            for k in 0..D {
                if verts[k] == pi {
                    continue;
                }
                // The ridge shared with a sibling omits slot `k`.
                let mut key = verts;
                key[k] = usize::MAX;
                key.sort_unstable();
                if let Some((other, ok)) = ridges.remove(&key) {
                    facets[id].neighbors[k] = other;
                    facets[other].neighbors[ok] = id;
                } else {
                    ridges.insert(key, (id, k));
                }
            }
        }
    }
    Ok(Hull { facets })
}
