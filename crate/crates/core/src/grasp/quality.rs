use nalgebra::{Matrix6, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::hull::convex_hull;
use crate::geometry::{orthonormal_basis, Point3, UnitVec3, Vec3};
use crate::{Error, Result};

pub type Wrench = SVector<f64, 6>;

/// Coulomb friction with a polyhedral cone, plus a small soft-finger patch
/// resisting torsion about the contact normal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrictionModel {
    pub mu: f64,
    pub cone_facets: u32,
    /// Radius of the finger contact patch in meters; 0 gives point contacts.
    pub patch_radius: f64,
}

impl Default for FrictionModel {
    fn default() -> Self {
        Self {
            mu: 0.5,
            cone_facets: 8,
            patch_radius: 0.005,
        }
    }
}

impl FrictionModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) || self.cone_facets < 3 || !(self.patch_radius >= 0.0) {
            return Err(Error::Config(format!("invalid friction model {self:?}")));
        }
        Ok(())
    }
}

/// Two jaw contacts on one object. Normals point into the object.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub p1: Point3,
    pub p2: Point3,
    pub n1: UnitVec3,
    pub n2: UnitVec3,
    pub object_id: u32,
    /// Torque reference point (object centroid).
    pub center: Point3,
    /// Torque normalization length (object bounding radius).
    pub torque_radius: f64,
}

impl ContactPair {
    pub fn separation(&self) -> f64 {
        (self.p2 - self.p1).norm()
    }
}

fn wrench(p: &Point3, f: &Vec3, c: &ContactPair) -> Wrench {
    let t = (p - c.center).cross(f) / c.torque_radius;
    Wrench::new(f.x, f.y, f.z, t.x, t.y, t.z)
}

/// Primitive contact wrenches: friction-cone edges `n + μ·t_k` and, with a
/// patch, the pure normal force combined with `±μ·a/ρ` torsion.
pub fn contact_wrenches(c: &ContactPair, f: &FrictionModel) -> Vec<Wrench> {
    let mut out = Vec::with_capacity(2 * (f.cone_facets as usize + 2));
    for (p, n) in [(c.p1, c.n1), (c.p2, c.n2)] {
        let (u, v) = orthonormal_basis(&n);
        for k in 0..f.cone_facets {
            let phi = std::f64::consts::TAU * k as f64 / f.cone_facets as f64;
            let force = n.into_inner() + (u.into_inner() * phi.cos() + v.into_inner() * phi.sin()) * f.mu;
            out.push(wrench(&p, &force, c));
        }
        if f.patch_radius > 0.0 {
            let kappa = f.mu * f.patch_radius / c.torque_radius;
            let base = wrench(&p, &n.into_inner(), c);
            for s in [1.0, -1.0] {
                let mut w = base;
                for i in 0..3 {
                    w[3 + i] += s * kappa * n[i];
                }
                out.push(w);
            }
        }
    }
    out
}

/// Largest norm of a unit normal-force wrench over the two contacts.
pub fn normalizer(c: &ContactPair) -> f64 {
    [(c.p1, c.n1), (c.p2, c.n2)]
        .iter()
        .map(|(p, n)| wrench(p, &n.into_inner(), c).norm())
        .fold(0.0, f64::max)
}

/// Relative singular-value floor for a full-rank wrench set. Bounded below
/// by the precision of the Gram-matrix eigenvalues.
const RANK_EPS: f64 = 1e-6;
const JOGGLE: f64 = 1e-9;
/// Normalized qualities at or below this count as no force closure.
pub const CLOSURE_EPS: f64 = 1e-6;

/// Radius of the largest origin-centered ball inside the hull of `wrenches`,
/// or 0 when the origin is not strictly inside or the set is flat.
pub fn epsilon_quality(wrenches: &[Wrench]) -> f64 {
    if wrenches.len() < 7 {
        return 0.0;
    }
    let scale = wrenches.iter().map(|w| w.amax()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mean = wrenches.iter().sum::<Wrench>() / wrenches.len() as f64;
    let gram = wrenches.iter().fold(Matrix6::zeros(), |acc, w| {
        let d = w - mean;
        acc + d * d.transpose()
    });
    let ev = gram.symmetric_eigenvalues();
    if ev.min() <= RANK_EPS * RANK_EPS * ev.max() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let jittered: Vec<Wrench> = wrenches
        .iter()
        .map(|w| w + Wrench::from_fn(|_, _| (rng.random::<f64>() - 0.5) * 2.0 * JOGGLE * scale))
        .collect();
    match convex_hull(&jittered) {
        Ok(h) => h.min_offset().max(0.0),
        Err(_) => 0.0,
    }
}

/// Ferrari-Canny quality normalized to `[0, 1]` by [`normalizer`].
pub fn ferrari_canny(c: &ContactPair, f: &FrictionModel) -> f64 {
    let norm = normalizer(c);
    if norm <= 0.0 {
        return 0.0;
    }
    let q = epsilon_quality(&contact_wrenches(c, f)) / norm;
    if q <= CLOSURE_EPS {
        0.0
    } else {
        q.min(1.0)
    }
}
