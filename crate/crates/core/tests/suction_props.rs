use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{Matrix3, SymmetricEigen};
use pgs_core::geometry::{Plane, Point3, PointCloud, Surface, UnitVec3, Vec3};
use pgs_core::par::Execution;
use pgs_core::scene::{ObjectInstance, PrimitiveShape, SceneModel, WorkspaceModel};
use pgs_core::suction::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(v: Vec3) -> UnitVec3 {
    UnitVec3::new_normalize(v)
}

fn down() -> UnitVec3 {
    unit(-Vec3::z())
}

fn scene(objects: Vec<ObjectInstance>) -> SceneModel {
    SceneModel {
        seed: 0,
        workspace: WorkspaceModel::default(),
        objects,
    }
}

/// Tilted away from straight down by `alpha` about the y axis.
fn tilted(alpha: f64) -> UnitVec3 {
    unit(Vec3::new(alpha.sin(), 0.0, -alpha.cos()))
}

// Least-squares plane by eigen-decomposition, then population SD of signed
// distances.
fn sigma_oracle(pts: &[Point3]) -> f64 {
    let n = pts.len() as f64;
    let c = pts.iter().fold(Vec3::zeros(), |a, p| a + p.coords) / n;
    let mut cov = Matrix3::zeros();
    for p in pts {
        let d = p.coords - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let (k, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let normal = eig.eigenvectors.column(k).into_owned();
    let d: Vec<f64> = pts.iter().map(|p| (p.coords - c).dot(&normal)).collect();
    let mean = d.iter().sum::<f64>() / n;
    (d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

// Closed-form ray/sphere intersection, nearest root.
fn ray_sphere(o: &Point3, d: &Vec3, c: &Point3, r: f64) -> Option<Point3> {
    let oc = o - c;
    let b = oc.dot(d);
    let disc = b * b - (oc.norm_squared() - r * r);
    (disc >= 0.0).then(|| o + d * (-b - disc.sqrt()))
}

fn dense_sphere_ring(center: &Point3, r: f64, contact: &Point3, dir: &UnitVec3, cup: f64, samples: usize) -> Vec<Point3> {
    let (u, v) = pgs_core::geometry::orthonormal_basis(dir);
    (0..samples)
        .map(|k| {
            let phi = TAU * k as f64 / samples as f64;
            let rim = contact + (u.into_inner() * phi.cos() + v.into_inner() * phi.sin()) * cup;
            ray_sphere(&(rim - dir.into_inner() * 0.05), dir, center, r).unwrap()
        })
        .collect()
}

#[test]
fn tilted_plane_scores_cosine_for_any_b() {
    let box_ = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.2, d: 0.2, h: 0.05 }, 0.0, 0.0, 0.0);
    let top = Point3::new(0.0, 0.0, 0.05);
    for deg in [15.0f64, 30.0, 60.0] {
        let alpha = deg.to_radians();
        for b in [1.0, 200.0, 5000.0] {
            let cup = SuctionCupModel {
                compliance_b: b,
                ..SuctionCupModel::default()
            };
            let seal = evaluate_seal(&box_, &top, &tilted(alpha), &cup).unwrap();
            assert!(seal.sigma < 1e-12);
            assert!((seal.score - alpha.cos()).abs() < 1e-6, "{deg}° b={b}: {}", seal.score);
        }
    }
}

#[test]
fn sphere_ring_height_closed_form() {
    let r = 0.05;
    let sphere = ObjectInstance::resting(1, PrimitiveShape::Sphere { r }, 0.0, 0.0, 0.0);
    let apex = Point3::new(0.0, 0.0, 2.0 * r);
    let ring = project_ring(&sphere, &apex, &down(), &SuctionCupModel::default()).unwrap();
    let drop = r - (r * r - 0.01f64.powi(2)).sqrt();
    for p in ring {
        assert!((apex.z - p.z - drop).abs() < 1e-6);
        assert!(((p.x * p.x + p.y * p.y).sqrt() - 0.01).abs() < 1e-9);
    }
}

#[test]
fn sphere_sigma_matches_dense_enumeration() {
    let r = 0.05;
    let center = Point3::new(0.0, 0.0, r);
    let sphere = ObjectInstance::resting(1, PrimitiveShape::Sphere { r }, 0.0, 0.0, 0.0);
    let cup = SuctionCupModel::default();
    for polar in [20.0f64, 35.0, 50.0] {
        let t = polar.to_radians();
        let contact = center + Vec3::new(t.sin(), 0.0, t.cos()) * r;
        for dir in [down(), tilted(-0.3)] {
            let seal = evaluate_seal(&sphere, &contact, &dir, &cup).unwrap();
            let want = sigma_oracle(&dense_sphere_ring(&center, r, &contact, &dir, cup.radius, 3600));
            assert!(want > 1e-7);
            assert!((seal.sigma - want).abs() <= 0.01 * want, "{polar}°: {} vs {want}", seal.sigma);
            assert!((seal.sigma - sigma_oracle(&seal.ring_points)).abs() < 1e-12);
        }
    }
}

#[test]
fn ring_off_an_edge_fails() {
    let box_ = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.1, d: 0.1, h: 0.05 }, 0.0, 0.0, 0.0);
    let edge = Point3::new(0.05, 0.0, 0.05);
    assert!(project_ring(&box_, &edge, &down(), &SuctionCupModel::default()).is_none());
    assert!(!evaluate_suction(&scene(vec![box_]), 1, &edge, &down(), &SuctionParams::default()).positive);
}

fn top_candidates(obj: &ObjectInstance, half: f64, step: f64) -> PointCloud {
    let h = obj.top_z();
    let c = obj.center();
    let mut pts = Vec::new();
    let mut x = -half;
    while x <= half + 1e-12 {
        let mut y = -half;
        while y <= half + 1e-12 {
            pts.push(Point3::new(c.x + x, c.y + y, h));
            y += step;
        }
        x += step;
    }
    let normals = vec![unit(Vec3::z()); pts.len()];
    PointCloud::with_normals(pts, normals).unwrap()
}

#[test]
fn isolated_box_top_is_all_positive() {
    let box_ = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.12, d: 0.12, h: 0.06 }, 0.0, 0.0, 0.3);
    let cands = top_candidates(&box_, 0.03, 0.005);
    let labels = label_contact_points(&scene(vec![box_]), &cands, &SuctionParams::default(), Execution::Sequential).unwrap();
    assert!(labels.iter().all(|l| l.positive && l.object_id == Some(1)));
}

#[test]
fn blocked_approach_is_negative() {
    let low = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.1, d: 0.1, h: 0.03 }, 0.0, 0.0, 0.0);
    let tall = ObjectInstance::resting(2, PrimitiveShape::Box { w: 0.04, d: 0.1, h: 0.2 }, 0.072, 0.0, 0.0);
    let s = scene(vec![low, tall]);
    let contact = Point3::new(0.035, 0.0, 0.03);
    // Leaning toward the tall neighbor puts it in the sweep.
    let dir = unit(Vec3::new(-0.7, 0.0, -1.0));
    let out = evaluate_suction(&s, 1, &contact, &dir, &SuctionParams::default());
    assert!(out.score > 0.5);
    assert!(!out.collision_free && !out.positive);
    let alone = evaluate_suction(&s.without(2), 1, &contact, &dir, &SuctionParams::default());
    assert!(alone.positive);
}

#[test]
fn tiny_sphere_has_no_seal() {
    let s = scene(vec![ObjectInstance::resting(1, PrimitiveShape::Sphere { r: 0.0025 }, 0.0, 0.0, 0.0)]);
    let got = annotate_scene_suction(&s, &SuctionParams::default(), 4000, 1, Execution::Sequential).unwrap();
    assert!(got.is_empty());
}

#[test]
fn one_box_annotation_is_nonempty_and_deterministic() {
    let s = scene(vec![ObjectInstance::resting(7, PrimitiveShape::Box { w: 0.1, d: 0.08, h: 0.05 }, 0.1, 0.0, 0.4)]);
    let a = annotate_scene_suction(&s, &SuctionParams::default(), 3000, 9, Execution::Sequential).unwrap();
    let b = annotate_scene_suction(&s, &SuctionParams::default(), 3000, 9, Execution::Parallel).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    assert!(a.iter().all(|x| x.object_id == 7 && x.config.score > 0.5));
}

// Brute-force labeling: independent plane fit and score formula, and the
// approach sweep checked by sampling its axis against every neighbor's
// signed distance.
fn brute_label(s: &SceneModel, p: &Point3, normal: &UnitVec3, params: &SuctionParams) -> Option<(bool, f64, f64)> {
    let owner = s.objects.iter().find(|o| o.sdf(p).abs() <= 1e-6)?;
    let dir = -*normal;
    let ring = project_ring(owner, p, &dir, &params.cup)?;
    let sigma = sigma_oracle(&ring);
    // M is the fitted normal pointing along the approach.
    let n = ring.len() as f64;
    let c = ring.iter().fold(Vec3::zeros(), |a, q| a + q.coords) / n;
    let mut cov = Matrix3::zeros();
    for q in &ring {
        let d = q.coords - c;
        cov += d * d.transpose();
    }
    let eig = SymmetricEigen::new(cov);
    let (k, _) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let mut m = eig.eigenvectors.column(k).into_owned();
    if m.dot(&dir) < 0.0 {
        m = -m;
    }
    let score = ((-params.cup.compliance_b * sigma).exp() * m.dot(&dir).max(0.0)).clamp(0.0, 1.0);
    let (a, b) = (
        p - dir.into_inner() * params.cup.radius,
        p - dir.into_inner() * (params.cup.radius + params.sweep_length),
    );
    let mut margin = f64::INFINITY;
    for i in 0..=400 {
        let q = a + (b - a) * (i as f64 / 400.0);
        margin = margin.min(q.z - params.cup.radius);
        for o in s.objects.iter().filter(|o| o.object_id != owner.object_id) {
            margin = margin.min(o.sdf(&q) - params.cup.radius);
        }
    }
    Some((score > params.threshold && margin > 0.0, score, margin))
}

#[test]
fn two_box_labels_match_brute_force() {
    let s = scene(vec![
        ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.08, d: 0.06, h: 0.04 }, 0.0, 0.0, 0.2),
        ObjectInstance::resting(2, PrimitiveShape::Box { w: 0.05, d: 0.05, h: 0.09 }, 0.075, 0.01, -0.3),
    ]);
    let params = SuctionParams::default();
    let sampled = pgs_core::scene::sample_cloud(&s, 100_000, 4).unwrap().cloud;
    let (points, normals): (Vec<_>, Vec<_>) = sampled
        .points
        .iter()
        .zip(sampled.normals.as_ref().unwrap())
        .filter(|(p, _)| p.x.abs() < 0.15 && p.y.abs() < 0.15)
        .map(|(p, n)| (*p, *n))
        .unzip();
    let cloud = PointCloud::with_normals(points, normals).unwrap();
    let labels = label_contact_points(&s, &cloud, &params, Execution::Sequential).unwrap();
    let normals = cloud.normals.as_ref().unwrap();
    let (mut ours, mut theirs, mut decided) = (0, 0, 0);
    for (i, l) in labels.iter().enumerate() {
        let brute = brute_label(&s, &cloud.points[i], &normals[i], &params);
        let (pos, score, margin) = brute.unwrap_or((false, 0.0, 1.0));
        // Labels within float noise of either boundary are not compared.
        if (score - params.threshold).abs() < 1e-6 || margin.abs() < 1e-4 {
            continue;
        }
        decided += 1;
        ours += l.positive as usize;
        theirs += pos as usize;
        assert_eq!(l.positive, pos, "point {:?}", cloud.points[i]);
    }
    assert!(decided > 2000 && ours > 100, "{decided} {ours}");
    assert_eq!(ours, theirs);
}

proptest! {
    #[test]
    fn exact_plane_gives_zero_sigma_and_cosine(
        nx in -0.5..0.5f64, ny in -0.5..0.5f64,
        alpha in 0.0..1.3f64, az in 0.0..TAU,
        radius in 0.002..0.03f64, n in 3u32..40, b in 1.0..1000.0f64,
    ) {
        let plane = Plane { point: Point3::new(0.1, -0.2, 0.3), normal: unit(Vec3::new(nx, ny, 1.0)) };
        let (u, _) = pgs_core::geometry::orthonormal_basis(&plane.normal);
        let axis = u.into_inner() * az.cos() + plane.normal.cross(&u) * az.sin();
        let dir = unit(-plane.normal.into_inner() * alpha.cos() + axis * alpha.sin());
        let cup = SuctionCupModel { radius, ring_samples: n, compliance_b: b };
        let seal = evaluate_seal(&plane, &plane.point, &dir, &cup).unwrap();
        prop_assert!(seal.sigma < 1e-9);
        prop_assert!((seal.score - alpha.cos()).abs() < 1e-6);
    }

    #[test]
    fn score_bounded_and_monotone(s1 in 0.0..0.02f64, ds in 0.0..0.02f64, a1 in 0.0..FRAC_PI_2, da in 0.0..1.0f64, b in 0.1..500.0f64) {
        let m = unit(Vec3::z());
        let at = |a: f64| unit(Vec3::new(a.sin(), 0.0, a.cos()));
        let a2 = (a1 + da).min(std::f64::consts::PI);
        let base = suction_score(s1, &m, &at(a1), b);
        prop_assert!((0.0..=1.0).contains(&base));
        prop_assert!(suction_score(s1 + ds, &m, &at(a1), b) <= base + 1e-15);
        prop_assert!(suction_score(s1, &m, &at(a2), b) <= base + 1e-15);
    }

    #[test]
    fn sigma_rigid_invariant(seed: u64, rot in prop::array::uniform3(-3.0..3.0f64), shift in prop::array::uniform3(-1.0..1.0f64)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ring: Vec<Point3> = (0..16)
            .map(|_| Point3::new(rng.random_range(-0.01..0.01), rng.random_range(-0.01..0.01), rng.random_range(-0.002..0.002)))
            .collect();
        let plane = Plane { point: Point3::origin(), normal: unit(Vec3::z()) };
        let iso = nalgebra::Isometry3::new(Vec3::from(shift), Vec3::from(rot));
        let moved: Vec<Point3> = ring.iter().map(|p| iso * p).collect();
        let moved_plane = Plane { point: iso * plane.point, normal: iso * plane.normal };
        prop_assert!((seal_sigma(&ring, &plane) - seal_sigma(&moved, &moved_plane)).abs() < 1e-12);
    }

    #[test]
    fn positive_means_score_and_clearance(seed in 0u64..1000) {
        let s = scene(vec![
            ObjectInstance::resting(1, PrimitiveShape::Cylinder { r: 0.03, h: 0.07 }, -0.02, 0.0, 0.0),
            ObjectInstance::resting(2, PrimitiveShape::Box { w: 0.05, d: 0.04, h: 0.05 }, 0.05, 0.01, 0.5),
        ]);
        let params = SuctionParams::default();
        let cloud = pgs_core::scene::sample_cloud(&s, 200, seed).unwrap().cloud;
        let labels = label_contact_points(&s, &cloud, &params, Execution::Sequential).unwrap();
        for l in labels {
            prop_assert_eq!(l.positive, l.collision_free && l.score > params.threshold && l.object_id.is_some());
        }
    }
}

#[test]
fn surface_trait_sees_scene_objects() {
    let s = scene(vec![ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.1, d: 0.1, h: 0.05 }, 0.0, 0.0, 0.0)]);
    let hit = s.objects[0]
        .raycast(&pgs_core::geometry::Ray::new(Point3::new(0.0, 0.0, 1.0), down()))
        .unwrap();
    assert!((hit.point.z - 0.05).abs() < 1e-12);
}
