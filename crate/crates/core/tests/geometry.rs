mod bvh {
    use pgs_core::geometry::bvh::*;
    use pgs_core::geometry::UnitVec3;
    use pgs_core::geometry::{Point3, Ray, Surface, TriMesh, Vec3};

    #[test]
    fn unit_cube_top_hit() {
        let bvh = MeshBvh::new(TriMesh::cuboid(0.5, 0.5, 0.5));
        let (p, n) = raycast(&bvh, Point3::new(0.0, 0.0, 2.0), -UnitVec3::new_normalize(Vec3::z())).unwrap();
        assert!((p - Point3::new(0.0, 0.0, 0.5)).norm() < 1e-12);
        assert!((n.into_inner() - Vec3::z()).norm() < 1e-12);
    }

    #[test]
    fn parallel_ray_misses() {
        let bvh = MeshBvh::new(TriMesh::cuboid(0.5, 0.5, 0.5));
        let miss = raycast(&bvh, Point3::new(0.0, 0.0, 2.0), UnitVec3::new_normalize(Vec3::x()));
        assert!(miss.is_none());
        assert!(MeshBvh::new(TriMesh::default())
            .raycast(&Ray::new(Point3::origin(), UnitVec3::new_normalize(Vec3::x())))
            .is_none());
    }
}

mod camera {
    use pgs_core::geometry::camera::*;
    use pgs_core::geometry::Point3;
    use pgs_core::Error;

    fn intr() -> CameraIntrinsics {
        CameraIntrinsics {
            fx: 500.0,
            fy: 520.0,
            cx: 32.0,
            cy: 24.0,
            width: 64,
            height: 48,
        }
    }

    #[test]
    fn principal_point_and_unit_offset() {
        let mut data = vec![0.0; 64 * 48];
        data[24 * 64 + 32] = 2.0;
        let depth = DepthImage::new(64, 48, data.clone()).unwrap();
        let cloud = backproject(&depth, &intr()).unwrap();
        assert_eq!(cloud.get(32, 24), Some(Point3::new(0.0, 0.0, 2.0)));
        assert_eq!(cloud.get(0, 0), None);

        // A pixel one focal length right of the principal point at depth 1.
        let wide = CameraIntrinsics {
            fx: 10.0,
            fy: 10.0,
            cx: 5.0,
            cy: 5.0,
            width: 20,
            height: 10,
        };
        let mut d = vec![0.0; 200];
        d[5 * 20 + 15] = 1.0;
        let c = backproject(&DepthImage::new(20, 10, d).unwrap(), &wide).unwrap();
        assert_eq!(c.get(15, 5), Some(Point3::new(1.0, 0.0, 1.0)));
    }

    #[test]
    fn dimension_mismatch_is_config_error() {
        let depth = DepthImage::new(2, 2, vec![1.0; 4]).unwrap();
        assert!(matches!(backproject(&depth, &intr()), Err(Error::Config(_))));
        assert!(DepthImage::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn png_roundtrip_quantizes() {
        let dir = tempfile::tempdir().unwrap();
        let data: Vec<f64> = (0..64 * 48).map(|i| 0.5 + (i % 97) as f64 * 1e-3).collect();
        let depth = DepthImage::new(64, 48, data).unwrap();
        let png = dir.path().join("d.png");
        let side = dir.path().join("d.json");
        write_depth(&png, &side, &depth, &intr(), 1e-4).unwrap();
        let (back, i2) = read_depth(&png, &side).unwrap();
        assert_eq!(i2, intr());
        for (a, b) in back.data.iter().zip(&depth.data) {
            assert!((a - b).abs() <= 0.5e-4 + 1e-12);
        }
    }
}

mod kdtree {
    use pgs_core::geometry::kdtree::*;
    use pgs_core::geometry::Point3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Point3> = (0..500)
            .map(|_| Point3::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let tree = KdTree::new(&pts);
        for _ in 0..50 {
            let q = Point3::new(rng.random(), rng.random(), rng.random());
            let mut brute: Vec<usize> = (0..pts.len()).collect();
            brute.sort_by(|&a, &b| {
                (pts[a] - q)
                    .norm_squared()
                    .total_cmp(&(pts[b] - q).norm_squared())
                    .then(a.cmp(&b))
            });
            assert_eq!(tree.nearest(&q, 7), brute[..7].to_vec());
            let mut within: Vec<usize> = (0..pts.len()).filter(|&i| (pts[i] - q).norm() <= 0.2).collect();
            within.sort_unstable();
            assert_eq!(tree.within(&q, 0.2), within);
            let (s, c) = tree.sum_within(&q, 0.2);
            assert_eq!(c, within.len());
            let expect: nalgebra::Vector3<f64> = within.iter().map(|&i| pts[i].coords).sum();
            assert!((s - expect).norm() < 1e-12);
        }
    }
}

mod mesh {
    use pgs_core::geometry::Point3;

    use pgs_core::geometry::mesh::*;

    #[test]
    fn primitives_are_watertight_and_outward() {
        for mesh in [
            TriMesh::cuboid(0.5, 0.3, 0.2),
            TriMesh::cylinder(0.1, 0.2, 24),
            TriMesh::sphere(0.3, 12, 24),
        ] {
            mesh.validate().unwrap();
            assert!(mesh.is_watertight());
            for i in 0..mesh.faces.len() {
                let [a, b, c] = mesh.triangle(i);
                let centroid = (a.coords + b.coords + c.coords) / 3.0;
                assert!(mesh.face_normal(i).dot(&centroid) > 0.0, "face {i} winds inward");
            }
        }
    }

    #[test]
    fn bad_index_rejected() {
        assert!(TriMesh::new(vec![Point3::origin(); 2], vec![[0, 1, 2]]).is_err());
        let open = TriMesh::new(vec![Point3::origin(); 3], vec![[0, 1, 2]]).unwrap();
        assert!(!open.is_watertight());
    }
}

mod normals {
    use pgs_core::geometry::{Point3, PointCloud};

    use pgs_core::geometry::normals::*;
    use pgs_core::geometry::Vec3;

    #[test]
    fn plane_normals_face_camera() {
        let pts: Vec<Point3> = (0..400)
            .map(|i| Point3::new((i % 20) as f64 * 0.01, (i / 20) as f64 * 0.013, 0.0))
            .collect();
        let normals = estimate_normals(&PointCloud::new(pts), 8, &Point3::new(0.1, 0.1, 1.0)).unwrap();
        for n in normals {
            assert!((n.unwrap().into_inner() - Vec3::z()).norm() < 1e-6);
        }
    }

    #[test]
    fn collinear_neighborhood_flagged() {
        let pts: Vec<Point3> = (0..3).map(|i| Point3::new(i as f64, 0.0, 0.0)).collect();
        let normals = estimate_normals(&PointCloud::new(pts), 3, &Point3::origin()).unwrap();
        assert!(normals.iter().all(Option::is_none));
    }

    #[test]
    fn rejects_small_k() {
        let cloud = PointCloud::new(vec![Point3::origin(); 5]);
        assert!(estimate_normals(&cloud, 2, &Point3::origin()).is_err());
        assert!(estimate_normals(&cloud, 6, &Point3::origin()).is_err());
    }
}

mod planar {
    use pgs_core::geometry::planar::*;

    fn square(cx: f64, cy: f64, h: f64) -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Vec2::new(cx - h, cy - h),
            Vec2::new(cx + h, cy - h),
            Vec2::new(cx + h, cy + h),
            Vec2::new(cx - h, cy + h),
        ])
    }

    #[test]
    fn hull_drops_interior_points() {
        let mut pts = square(0.0, 0.0, 1.0).vertices;
        pts.push(Vec2::new(0.2, 0.1));
        pts.push(Vec2::new(1.0, 0.0));
        let hull = convex_hull(&pts);
        assert_eq!(hull.len(), 4);
        assert!((ConvexPolygon { vertices: hull }.area() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn separations() {
        let a = Footprint::Polygon(square(0.0, 0.0, 1.0));
        let b = Footprint::Polygon(square(3.0, 0.0, 1.0));
        assert!((a.separation(&b) - 1.0).abs() < 1e-12);
        let c = Footprint::Polygon(square(1.5, 0.0, 1.0));
        assert!((a.separation(&c) + 0.5).abs() < 1e-12);
        let d = Footprint::Disc {
            center: Vec2::new(0.0, 3.0),
            radius: 1.0,
        };
        assert!((a.separation(&d) - 1.0).abs() < 1e-12);
        // Corner-to-corner gap is Euclidean, not per-axis.
        let e = Footprint::Polygon(square(3.0, 3.0, 1.0));
        assert!((a.separation(&e) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ray_entry_distances() {
        let a = Footprint::Polygon(square(0.0, 0.0, 1.0));
        let t = a.ray_entry(&Vec2::new(-3.0, 0.5), &Vec2::new(1.0, 0.0)).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
        assert!(a.ray_entry(&Vec2::new(-3.0, 2.5), &Vec2::new(1.0, 0.0)).is_none());
        let d = Footprint::Disc {
            center: Vec2::zeros(),
            radius: 1.0,
        };
        assert!((d.ray_entry(&Vec2::new(0.0, -4.0), &Vec2::new(0.0, 1.0)).unwrap() - 3.0).abs() < 1e-12);
    }
}

mod plane {
    use pgs_core::geometry::plane::*;
    use pgs_core::geometry::{Point3, UnitVec3, Vec3};
    use pgs_core::Error;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coplanar_points_fit_exactly() {
        let n = UnitVec3::new_normalize(Vec3::new(0.3, -0.2, 0.9));
        let (u, v) = pgs_core::geometry::orthonormal_basis(&n);
        let origin = Point3::new(0.1, 0.2, 0.3);
        let pts: Vec<Point3> = (0..20)
            .map(|i| {
                let a = i as f64 * 0.7;
                origin + u.into_inner() * a.cos() * (1.0 + i as f64) + v.into_inner() * a.sin()
            })
            .collect();
        let plane = fit_plane_lsq(&pts).unwrap();
        for p in &pts {
            assert!(plane.signed_distance(p).abs() < 1e-9);
        }
    }

    #[test]
    fn symmetric_perturbation_keeps_normal() {
        let eps = 1e-3;
        let mut pts = Vec::new();
        for i in 0..8 {
            let a = i as f64 * std::f64::consts::TAU / 8.0;
            pts.push(Point3::new(a.cos(), a.sin(), eps));
            pts.push(Point3::new(a.cos(), a.sin(), -eps));
        }
        let plane = fit_plane_lsq(&pts).unwrap();
        assert!((plane.normal.z.abs() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn collinear_is_rank_error() {
        let pts: Vec<Point3> = (0..5).map(|i| Point3::new(i as f64, 2.0 * i as f64, 0.0)).collect();
        assert!(matches!(fit_plane_lsq(&pts), Err(Error::Degenerate(_))));
        assert!(fit_plane_lsq(&pts[..2]).is_err());
    }

    #[test]
    fn beats_random_planes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Point3> = (0..30)
            .map(|_| Point3::new(rng.random(), rng.random(), 0.2 * rng.random::<f64>()))
            .collect();
        let fit = fit_plane_lsq(&pts).unwrap();
        let cost = |pl: &Plane| pts.iter().map(|p| pl.signed_distance(p).powi(2)).sum::<f64>();
        let best = cost(&fit);
        for _ in 0..10_000 {
            let n = UnitVec3::new_normalize(Vec3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            ));
            let p = Point3::new(rng.random(), rng.random(), 0.2 * rng.random::<f64>());
            assert!(best <= cost(&Plane { point: p, normal: n }) + 1e-12);
        }
    }
}

mod ply {
    use pgs_core::geometry::{Point3, PointCloud, UnitVec3, Vec3};

    use pgs_core::geometry::ply::*;

    #[test]
    fn roundtrip_with_and_without_normals() {
        let pts = vec![Point3::new(0.1, -2.5, 3.0), Point3::new(1e-9, 0.0, 7.25)];
        let plain = PointCloud::new(pts.clone());
        assert_eq!(parse_ply(&to_ply_string(&plain)).unwrap(), plain);
        let n = vec![UnitVec3::new_normalize(Vec3::z()), UnitVec3::new_normalize(Vec3::x())];
        let with = PointCloud::with_normals(pts, n).unwrap();
        assert_eq!(parse_ply(&to_ply_string(&with)).unwrap(), with);
    }

    #[test]
    fn rejects_truncated_body() {
        let text = "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\nproperty float z\nend_header\n1 2 3\n";
        assert!(parse_ply(text).is_err());
        assert!(parse_ply("nope").is_err());
    }
}

mod rotation {
    use std::f64::consts::{FRAC_PI_2, PI, TAU};

    use pgs_core::geometry::rotation::*;
    use pgs_core::geometry::{UnitVec3, Vec3};
    use pgs_core::Error;
    use proptest::prelude::*;

    fn unit(x: f64, y: f64, z: f64) -> UnitVec3 {
        UnitVec3::new_normalize(Vec3::new(x, y, z))
    }

    #[test]
    fn straight_down() {
        let (n, r) = angles_to_frame(&RotationAngles::new(0.0, FRAC_PI_2, 0.0).unwrap()).unwrap();
        assert!((n.into_inner() - Vec3::new(0.0, 0.0, -1.0)).norm() < 1e-15);
        assert!((r.into_inner() - Vec3::x()).norm() < 1e-15);
    }

    #[test]
    fn canonical_frames_invert() {
        let a = frame_to_angles(&unit(0.0, 0.0, -1.0), &unit(1.0, 0.0, 0.0)).unwrap();
        assert_eq!((a.theta1, a.theta2, a.theta3), (0.0, FRAC_PI_2, 0.0));
        let b = frame_to_angles(&unit(1.0, 0.0, 0.0), &unit(0.0, 1.0, 0.0)).unwrap();
        assert!(b.theta1.abs() < 1e-15 && b.theta2.abs() < 1e-15);
        assert!((b.theta3 - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(frame_to_angles(&unit(0.0, 0.0, -1.0), &unit(1.0, 0.0, 1.0)).is_err());
        assert!(matches!(
            frame_to_angles(&unit(1.0, 0.0, 0.5), &unit(0.0, 1.0, 0.0)),
            Err(Error::Range { .. })
        ));
        assert!(RotationAngles::new(TAU, 0.1, 0.0).is_err());
        assert!(RotationAngles::new(0.0, 1.6, 0.0).is_err());
    }

    #[test]
    fn horizontal_approach_limit() {
        let (n, r) = angles_to_frame(&RotationAngles::new(0.0, 0.0, 0.3).unwrap()).unwrap();
        assert!(n.dot(&r).abs() < 1e-15);
        assert_eq!(r.z, 1.0);
    }

    proptest! {
        #[test]
        fn frame_is_orthonormal(t1 in 0.0..TAU, t2 in 0.0..=FRAC_PI_2, t3 in -PI..=PI) {
            let (n, r) = angles_to_frame(&RotationAngles { theta1: t1, theta2: t2, theta3: t3 }).unwrap();
            prop_assert!(n.dot(&r).abs() <= 1e-9);
        }
    }
}
