use std::f64::consts::PI;

use proptest::prelude::*;

use monostatic::catalog::builtin_catalog;
use monostatic::geometry::{convex_hull, mass_properties};
use monostatic::io::{decode_stl, encode_stl};
use monostatic::metrics::compute_metrics;
use monostatic::optimizer::{differential_evolution, Bounds, OptimizationProblem};
use monostatic::oracle::{
    analytic_com, analytic_height_field, ecs, fibonacci_sphere, height_field, label_basins, merge_basins, HeightField,
    MergeRule,
};
use monostatic::surfaces::{generate_mesh, radius};
use monostatic::vec3::Rotation;
use monostatic::{SurfaceFamily, SurfaceSpec, TriMesh, Vec3};

fn family() -> impl Strategy<Value = SurfaceFamily> {
    prop_oneof![
        Just(SurfaceFamily::SloanLinearPhase),
        Just(SurfaceFamily::SloanEtaPhase),
        Just(SurfaceFamily::ExtendedPhase),
        Just(SurfaceFamily::RadialF3),
        Just(SurfaceFamily::RadialF4),
    ]
}

fn spec() -> impl Strategy<Value = SurfaceSpec> {
    (family(), 0.0..0.06f64, -0.2..0.2f64, 1u32..=3).prop_map(|(f, b, c, k)| SurfaceSpec::new(f, b, c, k))
}

fn unit() -> impl Strategy<Value = Vec3> {
    (0.0..PI, -PI..PI).prop_map(|(t, p)| Vec3::from_spherical(t, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn merged_count_non_increasing(coef in prop::collection::vec(-1.0..1.0f64, 9), a in 0.001..0.5f64, b in 0.001..0.5f64) {
        let dirs = fibonacci_sphere(600, 12).unwrap();
        let h: Vec<f64> = dirs.directions.iter().map(|d| {
            let basis = [d.x, d.y, d.z, d.x * d.y, d.y * d.z, d.z * d.x, d.x * d.x - d.y * d.y, d.x * d.y * d.z, d.z * d.z * d.z];
            basis.iter().zip(&coef).map(|(u, c)| u * c).sum()
        }).collect();
        let field = HeightField::from_values(&dirs, h).unwrap();
        prop_assume!(!field.is_flat());
        let labels = label_basins(&field).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        for rule in [MergeRule::Fixpoint, MergeRule::SinglePass] {
            let n_lo = merge_basins(&labels, field.h_range(), lo, rule).unwrap().count();
            let n_hi = merge_basins(&labels, field.h_range(), hi, rule).unwrap().count();
            prop_assert!(n_hi <= n_lo);
            prop_assert!(n_lo <= labels.basin_count());
            prop_assert!(n_hi >= 1);
        }
    }

    #[test]
    fn radius_is_periodic_in_phi(s in spec(), theta in 0.0..PI, phi in -PI..PI) {
        prop_assume!(s.validate().is_ok());
        if let Ok(r) = radius(&s, theta, phi) {
            let r2 = radius(&s, theta, phi + 2.0 * PI).unwrap();
            prop_assert!((r - r2).abs() < 1e-12);
        }
    }

    #[test]
    fn generated_meshes_are_spheres_topologically(s in spec(), n in 6usize..24) {
        prop_assume!(s.validate().is_ok());
        if let Ok(m) = generate_mesh(&s, n, 2 * n) {
            let t = m.topology();
            prop_assert_eq!(t.vertices as i64 - t.edges as i64 + t.faces as i64, 2);
            prop_assert!(m.check_closed().is_ok());
        }
    }

    #[test]
    fn mass_properties_translate(s in spec(), dx in -5.0..5.0f64, dy in -5.0..5.0f64, dz in -5.0..5.0f64) {
        prop_assume!(s.validate().is_ok());
        let Ok(m) = generate_mesh(&s, 16, 32) else { return Ok(()) };
        let shift = Vec3::new(dx, dy, dz);
        let a = mass_properties(&m).unwrap();
        let b = mass_properties(&m.translated(shift)).unwrap();
        prop_assert!((a.volume - b.volume).abs() < 1e-10 * a.volume);
        prop_assert!((b.com - (a.com + shift)).norm() < 1e-9);
    }

    #[test]
    fn hull_is_idempotent(points in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64), 8..80)) {
        let pts: Vec<Vec3> = points.into_iter().map(|(x, y, z)| Vec3::new(x, y, z)).collect();
        let Ok(h1) = convex_hull(&pts) else { return Ok(()) };
        let h2 = convex_hull(&h1.vertices).unwrap();
        let (v1, v2) = (mass_properties(&h1).unwrap().volume, mass_properties(&h2).unwrap().volume);
        prop_assert!((v1 - v2).abs() <= 1e-12 * v1.max(1e-12));
        prop_assert_eq!(h1.vertices.len(), h2.vertices.len());
    }

    #[test]
    fn stl_rewrite_is_bit_exact(s in spec(), n in 4usize..16) {
        prop_assume!(s.validate().is_ok());
        let Ok(m) = generate_mesh(&s, n, 2 * n) else { return Ok(()) };
        let bytes = encode_stl(&m, "prop");
        let back = decode_stl(&bytes).unwrap();
        prop_assert_eq!(encode_stl(&back, "prop"), bytes);
        for t in 0..m.triangles.len() {
            for (a, b) in m.triangle(t).iter().zip(back.triangle(t)) {
                prop_assert_eq!((a.x as f32).to_bits(), (b.x as f32).to_bits());
                prop_assert_eq!((a.y as f32).to_bits(), (b.y as f32).to_bits());
                prop_assert_eq!((a.z as f32).to_bits(), (b.z as f32).to_bits());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn counts_invariant_when_body_and_directions_turn_together(axis in unit(), angle in 0.0..(2.0 * PI)) {
        let dirs = fibonacci_sphere(2000, 12).unwrap();
        let rot = Rotation::from_axis_angle(axis, angle);
        let mut turned_dirs = dirs.clone();
        turned_dirs.directions = dirs.directions.iter().map(|&d| rot.apply(d)).collect();
        let mesh = generate_mesh(&SurfaceSpec::sloan_eta(0.05), 40, 80).unwrap();
        let a = ecs(&mesh, &dirs, &[0.01, 0.05]).unwrap();
        let b = ecs(&mesh.rotated(&rot), &turned_dirs, &[0.01, 0.05]).unwrap();
        prop_assert_eq!(a.raw_basin_count, b.raw_basin_count);
        prop_assert_eq!(&a.merged_count_by_threshold, &b.merged_count_by_threshold);
        prop_assert!((a.h_range - b.h_range).abs() < 1e-9);
    }

    #[test]
    fn de_is_reproducible(seed in any::<u64>()) {
        let mut p = OptimizationProblem::new(SurfaceFamily::RadialF4, 1, Bounds::new(0.01, 0.03), Bounds::new(0.0, 0.2), seed);
        p.population = 6;
        p.generations = 2;
        p.inner_directions = 600;
        p.inner_n_theta = 24;
        p.inner_n_phi = 48;
        let a = differential_evolution(&p).unwrap();
        let b = differential_evolution(&p).unwrap();
        prop_assert_eq!(&a.best_spec, &b.best_spec);
        prop_assert_eq!(a.best_objective.to_bits(), b.best_objective.to_bits());
        prop_assert_eq!(a.trace.len(), b.trace.len());
    }
}

fn volume_error(m: &TriMesh, exact: f64) -> f64 {
    (mass_properties(m).unwrap().volume - exact).abs()
}

#[test]
fn mesh_volume_converges_at_second_order() {
    let s = SurfaceSpec::sloan_eta(0.05);
    let exact = analytic_com(&s, 96, 192).unwrap().volume;
    let errs: Vec<f64> =
        [20, 40, 80].iter().map(|&n| volume_error(&generate_mesh(&s, n, 2 * n).unwrap(), exact)).collect();
    let ratios = [errs[0] / errs[1], errs[1] / errs[2]];
    for r in ratios {
        assert!((3.0..5.0).contains(&r), "refinement ratios {ratios:?}");
    }
    // Richardson extrapolation beats the finest mesh
    let rich = (4.0 * mass_properties(&generate_mesh(&s, 80, 160).unwrap()).unwrap().volume
        - mass_properties(&generate_mesh(&s, 40, 80).unwrap()).unwrap().volume)
        / 3.0;
    assert!((rich - exact).abs() < errs[2] / 10.0);
}

#[test]
fn catalog_counts_monotone_and_heights_non_negative() {
    let dirs = fibonacci_sphere(5000, 12).unwrap();
    let grid: Vec<f64> = (1..=20).map(|i| 0.005 * i as f64).collect();
    for entry in builtin_catalog() {
        let mesh = generate_mesh(&entry.spec, 100, 200).unwrap();
        let field = height_field(&mesh, &dirs).unwrap();
        assert!(field.h.iter().all(|&h| h >= 0.0), "#{}", entry.index);
        let r = ecs(&mesh, &dirs, &grid).unwrap();
        let counts: Vec<usize> = grid.iter().map(|&t| r.merged_count(t).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "#{}: {counts:?}", entry.index);
    }
}

#[test]
fn mesh_and_analytic_raw_counts_agree() {
    let dirs = fibonacci_sphere(2000, 12).unwrap();
    for beta in [0.02, 0.05] {
        let spec = SurfaceSpec::sloan_eta(beta);
        let mesh = generate_mesh(&spec, 100, 200).unwrap();
        let from_mesh = label_basins(&height_field(&mesh, &dirs).unwrap()).unwrap().basin_count();
        let from_surface = label_basins(&analytic_height_field(&spec, &dirs, 16).unwrap()).unwrap().basin_count();
        assert!(from_mesh.abs_diff(from_surface) <= 1, "beta {beta}: mesh {from_mesh}, analytic {from_surface}");
    }
}

/// Turning the sampling directions with the body leaves every metric unchanged.
#[test]
fn metrics_invariant_under_rigid_rotation() {
    let dirs = fibonacci_sphere(5000, 12).unwrap();
    let mesh = generate_mesh(&SurfaceSpec::radial_f4(0.023, 0.129), 100, 200).unwrap();
    let base = compute_metrics(&mesh, &dirs).unwrap();
    for i in 0..3 {
        let rot = Rotation::from_axis_angle(Vec3::new(0.2, 1.0, -0.4 * i as f64), 0.9 + i as f64);
        let mut turned = dirs.clone();
        turned.directions = dirs.directions.iter().map(|&d| rot.apply(d)).collect();
        let m = compute_metrics(&mesh.rotated(&rot), &turned).unwrap();
        for (a, b) in [
            (base.h_range, m.h_range),
            (base.sre, m.sre),
            (base.steepness, m.steepness),
            (base.asymmetry, m.asymmetry),
            (base.su_angle_deg, m.su_angle_deg),
        ] {
            assert!((a - b).abs() <= 1e-3 * a.abs(), "{a} vs {b}");
        }
    }
}
