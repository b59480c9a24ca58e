use pgs_core::geometry::Vec3;
use pgs_core::geometry::{Plane, Point3, UnitVec3};
use pgs_core::suction::*;

#[test]
fn flat_plane_ring() {
    let plane = Plane {
        point: Point3::origin(),
        normal: UnitVec3::new_normalize(Vec3::z()),
    };
    let down = UnitVec3::new_normalize(-Vec3::z());
    let ring = project_ring(&plane, &Point3::origin(), &down, &SuctionCupModel::default()).unwrap();
    assert_eq!(ring.len(), 16);
    for p in &ring {
        assert!(p.z.abs() < 1e-15);
        assert!((p.coords.norm() - 0.01).abs() < 1e-12);
    }
    let seal = evaluate_seal(&plane, &Point3::origin(), &down, &SuctionCupModel::default()).unwrap();
    assert!((seal.score - 1.0).abs() < 1e-12);
}

#[test]
fn score_cases() {
    let z = UnitVec3::new_normalize(Vec3::z());
    let tilted = UnitVec3::new_normalize(Vec3::new(3f64.sqrt() / 2.0, 0.0, 0.5));
    assert_eq!(suction_score(0.0, &z, &z, 200.0), 1.0);
    assert!((suction_score(0.0, &z, &tilted, 200.0) - 0.5).abs() < 1e-12);
    assert_eq!(suction_score(0.0, &z, &-z, 200.0), 0.0);
}

#[test]
fn two_level_sigma() {
    let plane = Plane {
        point: Point3::origin(),
        normal: UnitVec3::new_normalize(Vec3::z()),
    };
    let pts: Vec<Point3> = (0..8)
        .map(|i| Point3::new(i as f64, 0.0, if i % 2 == 0 { 0.3 } else { -0.3 }))
        .collect();
    assert!((seal_sigma(&pts, &plane) - 0.3).abs() < 1e-15);
}
