use std::f64::consts::{PI, TAU};

use pgs_core::geometry::planar::{convex_hull, ConvexPolygon, Vec2};
use pgs_core::push::*;
use pgs_core::scene::{default_table, generate_scene, ObjectInstance, PlacementParams, PrimitiveShape, SceneModel, ShapeCatalog, WorkspaceModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ws() -> WorkspaceModel {
    WorkspaceModel::default()
}

fn lone(obj: ObjectInstance) -> SceneModel {
    SceneModel {
        seed: 0,
        workspace: ws(),
        objects: vec![obj],
    }
}

fn planned(points: &[Vec2], params: &PushParams) -> PushConfig {
    match plan_push(points, &ws(), params).unwrap() {
        PushPlan::Push(p) => p,
        PushPlan::NoPushNeeded => panic!("object sits on the center"),
    }
}

fn blob(rng: &mut ChaCha8Rng, center: Vec2) -> Vec<Vec2> {
    let n = rng.random_range(3..30);
    let r = rng.random_range(0.01..0.06);
    (0..n)
        .map(|_| {
            let a: f64 = rng.random_range(0.0..TAU);
            let s: f64 = rng.random_range(0.2..1.0);
            center + Vec2::new(a.cos(), a.sin()) * r * s
        })
        .collect()
}

fn center_distance(s: &SceneModel, id: u32) -> f64 {
    (s.object(id).unwrap().pose.xy() - s.scene_center()).norm()
}

#[test]
fn axis_aligned_example() {
    let pts = [Vec2::new(0.38, -0.02), Vec2::new(0.42, -0.02), Vec2::new(0.42, 0.02), Vec2::new(0.38, 0.02)];
    let p = planned(&pts, &PushParams { protect: 0.02, distance: 0.1 });
    assert!((p.theta.abs() - PI).abs() < 1e-12);
    assert!((p.x - 0.44).abs() < 1e-12 && p.y.abs() < 1e-12);
    assert_eq!(p.d, 0.1);
}

#[test]
fn symmetric_object_on_y_axis_pushes_straight_down() {
    let pts: Vec<Vec2> = (0..16)
        .map(|k| {
            let a = TAU * k as f64 / 16.0;
            Vec2::new(0.03 * a.cos(), 0.2 + 0.03 * a.sin())
        })
        .collect();
    let p = planned(&pts, &PushParams::default());
    assert!((p.theta + PI / 2.0).abs() < 1e-12);
    assert!(p.x.abs() < 1e-12 && (p.y - 0.25).abs() < 1e-12);
}

#[test]
fn random_blobs_start_outside_and_segment_enters() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params = PushParams::default();
    for _ in 0..500 {
        let c = Vec2::new(rng.random_range(-0.45..0.45), rng.random_range(-0.2..0.2));
        let pts = blob(&mut rng, c);
        let Ok(PushPlan::Push(p)) = plan_push(&pts, &ws(), &params) else {
            continue;
        };
        let hull = ConvexPolygon::new(convex_hull(&pts));
        let seg = to_segment(&p);
        assert!(!hull.contains(&seg.start()));
        assert!(hull.signed_distance(&seg.start()) >= params.protect - 1e-12);
        // Dense sampling along the segment finds a point inside the hull.
        let enters = (0..=1000).any(|k| hull.contains(&(seg.start() + (seg.end() - seg.start()) * (k as f64 / 1000.0))));
        assert!(enters);
    }
}

#[test]
fn centered_object_needs_no_push() {
    let pts = [Vec2::new(-0.01, -0.01), Vec2::new(0.01, -0.01), Vec2::new(0.01, 0.01), Vec2::new(-0.01, 0.01)];
    assert_eq!(plan_push(&pts, &ws(), &PushParams::default()).unwrap(), PushPlan::NoPushNeeded);
}

#[test]
fn off_table_start_is_infeasible() {
    let pts = [Vec2::new(0.585, 0.0), Vec2::new(0.595, 0.0), Vec2::new(0.59, 0.005)];
    assert!(plan_push(&pts, &ws(), &PushParams::default()).is_err());
}

#[test]
fn lone_box_moves_the_full_contact_travel() {
    let obj = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.04, d: 0.06, h: 0.05 }, 0.4, 0.0, 0.0);
    let scene = lone(obj);
    let d = 0.1;
    // Pusher starting at the rear face moves the box by d.
    let seg = PushSegment { x1: 0.42, y1: 0.0, x2: 0.42 - d, y2: 0.0 };
    let out = simulate_push(&scene, &seg, 1).unwrap();
    assert!((center_distance(&scene, 1) - center_distance(&out.scene, 1) - d).abs() < 1e-6);
    assert!(!out.blocked && out.warning.is_none());
    // With a protecting gap the first `protect` of travel is free.
    let p = planned(&footprint_points(&obj.footprint()), &PushParams { protect: 0.02, distance: d });
    let out = simulate_push(&scene, &to_segment(&p), 1).unwrap();
    assert!((center_distance(&scene, 1) - center_distance(&out.scene, 1) - (d - 0.02)).abs() < 1e-6);
}

#[test]
fn push_never_overshoots_the_center() {
    let obj = ObjectInstance::resting(1, PrimitiveShape::Cylinder { r: 0.02, h: 0.05 }, 0.05, 0.0, 0.0);
    let scene = lone(obj);
    let p = planned(&footprint_points(&obj.footprint()), &PushParams::default());
    let out = simulate_push(&scene, &to_segment(&p), 1).unwrap();
    assert!(center_distance(&out.scene, 1) < 1e-9);
}

#[test]
fn blocked_push_stops_in_contact() {
    let target = ObjectInstance::resting(1, PrimitiveShape::Box { w: 0.04, d: 0.04, h: 0.05 }, 0.4, 0.0, 0.0);
    let wall = ObjectInstance::resting(2, PrimitiveShape::Box { w: 0.02, d: 0.1, h: 0.05 }, 0.34, 0.0, 0.0);
    let scene = SceneModel {
        seed: 0,
        workspace: ws(),
        objects: vec![target, wall],
    };
    let p = planned(&footprint_points(&target.footprint()), &PushParams::default());
    let out = simulate_push(&scene, &to_segment(&p), 1).unwrap();
    assert!(out.blocked);
    let gap = out.scene.objects[0].footprint().separation(&wall.footprint());
    assert!((0.0..1e-9).contains(&gap), "{gap}");
    assert!((out.moved - 0.03).abs() < 1e-9);
    assert_eq!(out.scene.objects[1], wall);
}

#[test]
fn push_on_empty_space_changes_nothing() {
    let obj = ObjectInstance::resting(1, PrimitiveShape::Sphere { r: 0.02 }, 0.4, 0.1, 0.0);
    let scene = lone(obj);
    let seg = PushSegment { x1: 0.2, y1: -0.1, x2: 0.1, y2: -0.1 };
    let out = simulate_push(&scene, &seg, 1).unwrap();
    assert_eq!(out.scene, scene);
    assert!(out.warning.is_some() && out.moved == 0.0);
}

#[test]
fn simulated_pushes_keep_scenes_valid() {
    let params = PushParams::default();
    for seed in 0..30 {
        let scene = generate_scene(seed, 14, &default_table(), &ShapeCatalog::default(), &PlacementParams::default())
            .unwrap()
            .scene;
        for obj in &scene.objects {
            let Ok(PushPlan::Push(p)) = plan_push(&footprint_points(&obj.footprint()), &scene.workspace, &params) else {
                continue;
            };
            let out = simulate_push(&scene, &to_segment(&p), obj.object_id).unwrap();
            out.scene.validate().unwrap();
            let before = center_distance(&scene, obj.object_id);
            let after = center_distance(&out.scene, obj.object_id);
            assert!(after <= before + 1e-12);
            assert!(out.moved <= params.distance + 1e-12);
            for (a, b) in scene.objects.iter().zip(&out.scene.objects) {
                if a.object_id != obj.object_id {
                    assert_eq!(a, b);
                }
            }
            let moved = out.scene.object(obj.object_id).unwrap().footprint();
            assert!(moved.inside(scene.table()));
            for other in out.scene.objects.iter().filter(|o| o.object_id != obj.object_id) {
                assert!(moved.separation(&other.footprint()) >= -1e-9);
            }
        }
    }
}

proptest! {
    #[test]
    fn segment_length_is_d(x in -1.0..1.0f64, y in -1.0..1.0f64, theta in -PI..PI, d in 1e-3..1.0f64) {
        let s = to_segment(&PushConfig { x, y, theta, d });
        prop_assert!((s.length() - d).abs() < 1e-12);
        prop_assert_eq!((s.x1, s.y1), (x, y));
    }

    #[test]
    fn plan_is_equivariant_under_rotation_about_center(seed: u64, angle in -PI..PI) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Vec2::new(rng.random_range(0.1..0.2), rng.random_range(-0.1..0.1));
        let pts = blob(&mut rng, c);
        let rot = nalgebra::Rotation2::new(angle);
        let turned: Vec<Vec2> = pts.iter().map(|p| rot * p).collect();
        let a = planned(&pts, &PushParams::default());
        let b = planned(&turned, &PushParams::default());
        let start = rot * Vec2::new(a.x, a.y);
        prop_assert!((start - Vec2::new(b.x, b.y)).norm() < 1e-9);
        let dtheta = (b.theta - a.theta - angle).rem_euclid(TAU);
        prop_assert!(dtheta < 1e-9 || TAU - dtheta < 1e-9);
    }

    #[test]
    fn unobstructed_pushes_approach_the_center(x in -0.5..0.5f64, y in -0.22..0.22f64, yaw in 0.0..PI, kind in 0usize..3) {
        let shape = [
            PrimitiveShape::Box { w: 0.03, d: 0.07, h: 0.05 },
            PrimitiveShape::Cylinder { r: 0.025, h: 0.06 },
            PrimitiveShape::Sphere { r: 0.02 },
        ][kind];
        let obj = ObjectInstance::resting(1, shape, x, y, yaw);
        let scene = lone(obj);
        prop_assume!((obj.pose.xy() - scene.scene_center()).norm() > 0.01);
        let Ok(PushPlan::Push(p)) = plan_push(&footprint_points(&obj.footprint()), &scene.workspace, &PushParams::default()) else {
            return Ok(());
        };
        prop_assert!(!obj.footprint().contains(&Vec2::new(p.x, p.y)));
        let out = simulate_push(&scene, &to_segment(&p), 1).unwrap();
        prop_assert!(center_distance(&out.scene, 1) < center_distance(&scene, 1));
    }
}
