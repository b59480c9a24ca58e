use pgs_core::geometry::{Point3, UnitVec3, Vec3};
use pgs_core::grasp::{ContactPair, Wrench};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Point and inward normal on face `k` of a centered box.
pub fn box_face_point(rng: &mut ChaCha8Rng, half: &Vec3, k: usize) -> (Point3, UnitVec3) {
    let axis = k % 3;
    let sign = if k < 3 { 1.0 } else { -1.0 };
    let mut p = Vec3::new(
        rng.random_range(-half.x..half.x),
        rng.random_range(-half.y..half.y),
        rng.random_range(-half.z..half.z),
    );
    p[axis] = sign * half[axis];
    let mut n = Vec3::zeros();
    n[axis] = -sign;
    (Point3::from(p), UnitVec3::new_normalize(n))
}

pub fn random_pair(rng: &mut ChaCha8Rng) -> ContactPair {
    let half = Vec3::new(
        rng.random_range(0.01..0.025),
        rng.random_range(0.01..0.025),
        rng.random_range(0.01..0.04),
    );
    let k1 = rng.random_range(0..6);
    let k2 = if rng.random_bool(0.6) {
        (k1 + 3) % 6
    } else {
        rng.random_range(0..6)
    };
    let (p1, n1) = box_face_point(rng, &half, k1);
    let (p2, n2) = box_face_point(rng, &half, k2);
    ContactPair {
        p1,
        p2,
        n1,
        n2,
        object_id: 1,
        center: Point3::origin(),
        torque_radius: half.norm(),
    }
}

// Brute-force facet enumeration: every hyperplane through six wrenches that
// has all wrenches on one side. The ball radius is the smallest signed
// distance from the origin to such a hyperplane.
pub fn facet_oracle(ws: &[Wrench]) -> f64 {
    let n = ws.len();
    let spread = nalgebra::DMatrix::from_fn(6, n - 1, |r, c| ws[c + 1][r] - ws[0][r]);
    let sv = spread.singular_values();
    if sv.min() <= 1e-9 * sv.max() {
        return 0.0;
    }
    let scale = ws.iter().map(|w| w.amax()).fold(0.0, f64::max);
    let mut best = f64::INFINITY;
    let mut idx = [0usize, 1, 2, 3, 4, 5];
    loop {
        let mut edges = nalgebra::Matrix6::zeros();
        for r in 0..5 {
            edges.set_row(r, &(ws[idx[r + 1]] - ws[idx[0]]).transpose());
        }
        let svd = edges.svd(false, true);
        let sv = svd.singular_values;
        if sv[4] > 1e-8 * sv[0] {
            let normal = svd.v_t.unwrap().row(5).transpose();
            let off = normal.dot(&ws[idx[0]]);
            let side: Vec<f64> = ws.iter().map(|w| normal.dot(w) - off).collect();
            let tol = 1e-11 * scale;
            if side.iter().all(|&s| s <= tol) {
                best = best.min(off);
            } else if side.iter().all(|&s| s >= -tol) {
                best = best.min(-off);
            }
        }
        // Next 6-combination.
        let mut i = 6;
        loop {
            if i == 0 {
                return best.max(0.0);
            }
            i -= 1;
            if idx[i] < n - 6 + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..6 {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn random_dir(rng: &mut ChaCha8Rng) -> Wrench {
    Wrench::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)).normalize()
}

fn support(ws: &[Wrench], d: &Wrench) -> f64 {
    ws.iter().map(|w| w.dot(d)).fold(f64::NEG_INFINITY, f64::max)
}

// Support value along the normal of the hyperplane through the wrenches most
// active at `d`. Exact at a facet normal, an upper bound elsewhere.
fn polish(ws: &[Wrench], d: &Wrench) -> f64 {
    let mut order: Vec<usize> = (0..ws.len()).collect();
    order.sort_by(|&a, &b| ws[b].dot(d).total_cmp(&ws[a].dot(d)));
    let base = ws[order[0]];
    let mut basis: Vec<Wrench> = Vec::new();
    for &i in &order[1..] {
        let mut v = ws[i] - base;
        let len = v.norm();
        for b in &basis {
            v -= b * b.dot(&v);
        }
        if v.norm() > 1e-6 * len.max(1e-12) {
            basis.push(v.normalize());
        }
        if basis.len() == 5 {
            break;
        }
    }
    if basis.len() < 5 {
        return f64::INFINITY;
    }
    let mut n = *d;
    for _ in 0..2 {
        for b in &basis {
            n -= b * b.dot(&n);
        }
    }
    if n.norm() < 1e-9 {
        return f64::INFINITY;
    }
    support(ws, &n.normalize())
}

/// Minimum of the support function over random unit directions. The 200
/// lowest of 10^5 samples are refined by a shrinking random walk and a
/// final polish. Clamped at 0 when the origin is outside the hull.
pub fn support_oracle(ws: &[Wrench], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Vec<(f64, Wrench)> = (0..100_000)
        .map(|_| {
            let d = random_dir(&mut rng);
            (support(ws, &d), d)
        })
        .collect();
    best.sort_by(|a, b| a.0.total_cmp(&b.0));
    best.truncate(200);
    let mut overall = f64::INFINITY;
    for (mut h, mut d) in best {
        let mut step = 0.05;
        let mut fails = 0;
        while step > 1e-6 {
            let cand = (d + random_dir(&mut rng) * step).normalize();
            let hc = support(ws, &cand);
            if hc < h {
                h = hc;
                d = cand;
                fails = 0;
            } else {
                fails += 1;
                if fails > 100 {
                    step *= 0.5;
                    fails = 0;
                }
            }
        }
        overall = overall.min(h).min(polish(ws, &d));
    }
    overall.max(0.0)
}
