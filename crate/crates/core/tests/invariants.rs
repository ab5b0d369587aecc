use std::f64::consts::PI;

use polylab::geom::{
    chord_squared_mean, closure_defect, gyradius_squared, total_curvature, total_length,
    total_torsion, turning_angle, ClosedPolygon, Dim, EdgeChain, Polygon, Vec3,
};
use polylab::hopf::{hopf_map, rotate, Quaternion};
use polylab::io::{read_polygons_csv, PolygonCsvWriter};
use polylab::montecarlo::{estimate, EstimateConfig, Execution, Functional};
use polylab::samplers::{Measure, Sampler, SamplerConfig};
use proptest::prelude::*;

fn quaternion() -> impl Strategy<Value = Quaternion> {
    (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)
        .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
}

fn unit_quaternion() -> impl Strategy<Value = Quaternion> {
    quaternion().prop_filter("nonzero", |q| q.norm_sq() > 1e-6).prop_map(|q| q.normalized())
}

fn dim() -> impl Strategy<Value = Dim> {
    prop_oneof![Just(Dim::Two), Just(Dim::Three)]
}

fn closed(measure: Measure, n: usize, d: Dim, seed: u64) -> ClosedPolygon {
    match measure.build(SamplerConfig::new(n, d, seed)).unwrap().sample() {
        Polygon::Closed(p) => p,
        Polygon::Arm(_) => panic!("expected a closed polygon"),
    }
}

fn closed_measure() -> impl Strategy<Value = Measure> {
    prop_oneof![Just(Measure::SymmetricClosed), Just(Measure::HopfGaussianClosed)]
}

proptest! {
    #[test]
    fn hopf_squares_the_norm(q in quaternion()) {
        let v = hopf_map(q);
        prop_assert!((v.norm() - q.norm_sq()).abs() <= 1e-12 * (1.0 + q.norm_sq()));
    }

    #[test]
    fn hopf_is_equivariant(q in quaternion(), w in unit_quaternion()) {
        let lhs = hopf_map(q * w);
        let rhs = rotate(w, hopf_map(q));
        prop_assert!((lhs - rhs).norm() <= 1e-11 * (1.0 + q.norm_sq()));
    }

    #[test]
    fn closed_samples_close(m in closed_measure(), n in 3usize..40, d in dim(), seed in any::<u64>()) {
        let p = closed(m, n, d, seed);
        prop_assert_eq!(p.len(), n);
        let scale: f64 = p.edges().iter().map(|e| e.norm()).sum();
        prop_assert!(closure_defect(&p).norm() <= 1e-12 * scale);
        if m == Measure::SymmetricClosed {
            prop_assert!((total_length(&p) - 2.0).abs() <= 1e-12);
        }
        if d == Dim::Two {
            prop_assert!(p.edges().iter().all(|e| e.z == 0.0));
        }
    }

    #[test]
    fn closed_curvature_bounds(m in closed_measure(), n in 3usize..40, d in dim(), seed in any::<u64>()) {
        let p = closed(m, n, d, seed);
        let k = total_curvature(&p).unwrap();
        prop_assert!(k >= 2.0 * PI - 1e-9, "Fenchel violated: {}", k);
        prop_assert!(k <= n as f64 * PI + 1e-12);
    }

    #[test]
    fn arm_curvature_bounds(n in 2usize..40, d in dim(), seed in any::<u64>()) {
        let p = Measure::HopfGaussianArm.build(SamplerConfig::new(n, d, seed)).unwrap().sample();
        let k = total_curvature(&p).unwrap();
        prop_assert!((0.0..=(n as f64 - 1.0) * PI + 1e-12).contains(&k));
    }

    #[test]
    fn curvature_ignores_rotation_scale_and_shift(
        n in 3usize..30,
        seed in any::<u64>(),
        w in unit_quaternion(),
        s in 1e-3..1e3f64,
        shift in 0usize..30,
    ) {
        let p = closed(Measure::SymmetricClosed, n, Dim::Three, seed);
        let k = total_curvature(&p).unwrap();
        let mut edges: Vec<Vec3> = p.edges().iter().map(|&e| rotate(w, e) * s).collect();
        edges.rotate_left(shift % n);
        let q = ClosedPolygon::new(Dim::Three, edges).unwrap();
        prop_assert!((total_curvature(&q).unwrap() - k).abs() <= 1e-10 * k);
    }

    #[test]
    fn turning_angle_in_range(a in quaternion(), b in quaternion()) {
        let (e1, e2) = (hopf_map(a), hopf_map(b));
        prop_assume!(e1.norm() > 1e-6 && e2.norm() > 1e-6);
        let t = turning_angle(e1, e2).unwrap();
        prop_assert!((0.0..=PI).contains(&t));
        prop_assert!((turning_angle(e2, e1).unwrap() - t).abs() <= 1e-15);
    }

    #[test]
    fn torsion_in_range(n in 4usize..40, seed in any::<u64>()) {
        let p = closed(Measure::HopfGaussianClosed, n, Dim::Three, seed);
        let t = total_torsion(&p).unwrap();
        prop_assert!((0.0..=n as f64 * PI).contains(&t));
    }

    #[test]
    fn chords_are_symmetric(n in 4usize..30, seed in any::<u64>(), k in 1usize..30) {
        let k = 1 + k % (n - 1);
        let p = closed(Measure::HopfGaussianClosed, n, Dim::Three, seed);
        let a = chord_squared_mean(&p, k).unwrap();
        let b = chord_squared_mean(&p, n - k).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a));
        prop_assert!(gyradius_squared(&p) >= 0.0);
    }

    #[test]
    fn csv_round_trip_is_bit_exact(
        d in dim(),
        polys in prop::collection::vec(
            prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>()), 1..8),
            1..5,
        ),
    ) {
        let polys: Vec<Vec<Vec3>> = polys
            .into_iter()
            .map(|es| {
                es.into_iter()
                    .map(|(x, y, z)| {
                        let f = |v: f64| if v.is_finite() { v } else { 0.5 };
                        let z = if d == Dim::Two { 0.0 } else { f(z) };
                        Vec3::new(f(x), f(y), z)
                    })
                    .collect()
            })
            .collect();
        let mut w = PolygonCsvWriter::new(Vec::new(), d).unwrap();
        for (i, es) in polys.iter().enumerate() {
            w.write(i as u64 * 3, &polylab::geom::PolygonArm::new(d, es.clone()).unwrap()).unwrap();
        }
        let bytes = w.finish().unwrap();
        let table = read_polygons_csv(bytes.as_slice()).unwrap();
        prop_assert_eq!(table.dim, d);
        prop_assert_eq!(table.polygons.len(), polys.len());
        for ((id, got), (i, want)) in table.polygons.iter().zip(polys.iter().enumerate()) {
            prop_assert_eq!(*id, i as u64 * 3);
            prop_assert_eq!(got.len(), want.len());
            for (a, b) in got.iter().zip(want) {
                prop_assert_eq!(a.x.to_bits(), b.x.to_bits());
                prop_assert_eq!(a.y.to_bits(), b.y.to_bits());
                prop_assert_eq!(a.z.to_bits(), b.z.to_bits());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn estimates_do_not_depend_on_workers(seed in any::<u64>(), n in 4usize..12, workers in 2usize..5) {
        let base = EstimateConfig::new(Measure::SymmetricClosed, n, Dim::Three, seed, 3000)
            .with_batch_size(256);
        let seq = estimate(&Functional::TotalCurvature, &base.with_execution(Execution::Sequential)).unwrap();
        let par = estimate(
            &Functional::TotalCurvature,
            &base.with_execution(Execution::Parallel { workers }),
        )
        .unwrap();
        prop_assert_eq!(seq.mean.to_bits(), par.mean.to_bits());
        prop_assert_eq!(seq.std_error.to_bits(), par.std_error.to_bits());
    }
}
