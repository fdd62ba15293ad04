use std::sync::Arc;

use proptest::prelude::*;
use rieszcap::equilibrium::{assemble_kernel, solve_equilibrium, SolverOptions};
use rieszcap::geometry::{minkowski_interpolate, ConvexBody, Direction, PointCloud, SampleMode};

fn body_strategy() -> impl Strategy<Value = ConvexBody> {
    prop_oneof![
        (-2.0..2.0f64, -2.0..2.0f64, 0.1..3.0f64).prop_map(|(x, y, r)| ConvexBody::ball(vec![x, y], r).unwrap()),
        (0.1..3.0f64, 0.1..3.0f64).prop_map(|(a, b)| ConvexBody::ellipsoid(vec![0.5, -0.5], vec![a, b]).unwrap()),
        (3usize..9, 0.2..2.0f64, 0.0..1.0f64).prop_map(|(n, r, t)| ConvexBody::regular_polygon(n, r, t).unwrap()),
    ]
}

fn cloud_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec((0..20i32, 0..20i32), 2..10).prop_map(|cells| {
        let mut cells = cells;
        cells.sort();
        cells.dedup();
        cells.into_iter().map(|(i, j)| vec![i as f64 * 0.1 + 0.013 * j as f64, j as f64 * 0.1]).collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn support_of_interpolation_is_linear(k0 in body_strategy(), k1 in body_strategy(), lambda in 0.0..=1.0f64, theta in 0.0..6.3f64) {
        let nu = Direction::from_angle(theta);
        let kl = minkowski_interpolate(&k0, &k1, lambda).unwrap();
        let expected = (1.0 - lambda) * k0.support(nu.as_slice()) + lambda * k1.support(nu.as_slice());
        prop_assert!((kl.support(nu.as_slice()) - expected).abs() < 1e-12 * (1.0 + expected.abs()));
    }

    #[test]
    fn support_is_translation_and_scale_covariant(k in body_strategy(), r in 0.1..5.0f64, tx in -3.0..3.0f64, theta in 0.0..6.3f64) {
        let nu = Direction::from_angle(theta);
        let u = nu.as_slice();
        let h = k.support(u);
        prop_assert!((k.scaled(r).support(u) - r * h).abs() < 1e-12 * (1.0 + (r * h).abs()));
        let moved = k.translated(&[tx, 0.0]).support(u);
        prop_assert!((moved - h - tx * u[0]).abs() < 1e-12 * (1.0 + h.abs() + tx.abs()));
    }

    #[test]
    fn body_json_round_trips(k in body_strategy()) {
        prop_assert_eq!(ConvexBody::from_json(&k.to_json()).unwrap(), k);
    }

    #[test]
    fn kernel_is_symmetric_and_homogeneous(pts in cloud_strategy(), alpha in 0.2..1.8f64, r in 0.2..5.0f64) {
        let n = pts.len();
        let cloud = PointCloud::new(2, pts.clone(), vec![0.01; n], SampleMode::Interior).unwrap();
        let scaled_pts: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|c| c * r).collect()).collect();
        let scaled = PointCloud::new(2, scaled_pts, vec![0.01 * r * r; n], SampleMode::Interior).unwrap();
        let a = assemble_kernel(&cloud, alpha).unwrap();
        let b = assemble_kernel(&scaled, alpha).unwrap();
        let factor = r.powf(alpha - 2.0);
        for i in 0..n {
            prop_assert!(a.entries()[(i, i)] > 0.0);
            for j in 0..n {
                let (x, y) = (a.entries()[(i, j)], b.entries()[(i, j)]);
                prop_assert!((x - a.entries()[(j, i)]).abs() <= 1e-14 * x.abs());
                prop_assert!((y - factor * x).abs() <= 1e-12 * y.abs());
            }
        }
    }

    #[test]
    fn solver_returns_a_probability_measure_no_worse_than_uniform(pts in cloud_strategy(), alpha in 0.3..1.7f64) {
        let n = pts.len();
        let cloud = Arc::new(PointCloud::new(2, pts, vec![0.01; n], SampleMode::Interior).unwrap());
        let k = assemble_kernel(&cloud, alpha).unwrap();
        let (measure, result) = solve_equilibrium(&k, cloud, &SolverOptions::default()).unwrap();
        let masses = measure.masses();
        prop_assert!(masses.iter().all(|m| *m >= 0.0));
        prop_assert!((masses.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        let uniform: f64 = k.entries().iter().sum::<f64>() / (n * n) as f64;
        prop_assert!(result.energy <= uniform * (1.0 + 1e-12));
        prop_assert!(result.kkt_residual <= 1e-7);
        prop_assert!((result.energy * result.capacity - 1.0).abs() <= 1e-14);
    }
}
