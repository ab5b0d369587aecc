use super::*;
use crate::geom::{total_length, EdgeChain};

fn closed_cases() -> Vec<(Measure, Dim)> {
    vec![
        (Measure::SymmetricClosed, Dim::Three),
        (Measure::SymmetricClosed, Dim::Two),
        (Measure::HopfGaussianClosed, Dim::Three),
        (Measure::HopfGaussianClosed, Dim::Two),
        (Measure::EquilateralMcmc { thinning: None, burn_in: None }, Dim::Three),
    ]
}

#[test]
fn same_seed_same_polygons() {
    for (m, d) in closed_cases() {
        let cfg = SamplerConfig::new(9, d, 42).with_stream(3);
        let mut a = m.build(cfg).unwrap();
        let mut b = m.build(cfg).unwrap();
        for _ in 0..5 {
            assert_eq!(a.sample(), b.sample(), "{}", m.label());
        }
    }
}

#[test]
fn streams_differ() {
    let cfg = SamplerConfig::new(6, Dim::Three, 1);
    let mut a = HopfGaussianArm::new(cfg).unwrap();
    let mut b = HopfGaussianArm::new(cfg.with_stream(1)).unwrap();
    assert_ne!(a.sample_arm(), b.sample_arm());
}

#[test]
fn closed_samples_close() {
    for (m, d) in closed_cases() {
        let mut s = m.build(SamplerConfig::new(17, d, 7)).unwrap();
        for _ in 0..200 {
            let p = s.sample();
            let edges = p.edges();
            let scale = total_length(&p);
            let defect = edges.iter().fold(Vec3::ZERO, |acc, &e| acc + e).norm();
            assert!(defect <= 1e-12 * scale.max(1.0), "{} defect {defect}", m.label());
            if d == Dim::Two {
                assert!(edges.iter().all(|e| e.z == 0.0));
            }
        }
    }
}

#[test]
fn symmetric_closed_has_length_two() {
    for d in [Dim::Two, Dim::Three] {
        let mut s = SymmetricClosed::new(SamplerConfig::new(12, d, 5)).unwrap();
        for _ in 0..100 {
            let p = s.sample_closed();
            assert!((total_length(&p) - 2.0).abs() < 1e-13);
        }
        assert_eq!(s.resamples(), 0);
    }
}

#[test]
fn equilateral_chain_keeps_unit_edges() {
    let mut s = EquilateralMcmc::new(SamplerConfig::new(30, Dim::Three, 2), 30, 300).unwrap();
    for _ in 0..50 {
        let p = s.sample_closed();
        assert!(p.edges().iter().all(|e| (e.norm() - 1.0).abs() < 1e-13));
        let direct = crate::geom::total_curvature(&p).unwrap();
        assert!((direct - s.curvature()).abs() < 1e-9);
    }
    assert_eq!(s.stats().moves, 300 + 50 * 30);
}

#[test]
fn chain_rejects_small_or_planar() {
    assert!(EquilateralMcmc::new(SamplerConfig::new(3, Dim::Three, 0), 1, 0).is_err());
    assert!(Measure::EquilateralMcmc { thinning: None, burn_in: None }
        .build(SamplerConfig::new(8, Dim::Two, 0))
        .is_err());
}

#[test]
fn closed_needs_three_edges() {
    assert!(SymmetricClosed::new(SamplerConfig::new(2, Dim::Three, 0)).is_err());
    assert!(HopfGaussianArm::new(SamplerConfig::new(0, Dim::Three, 0)).is_err());
    assert!(HopfGaussianArm::new(SamplerConfig::new(1, Dim::Two, 0)).is_ok());
}

#[test]
fn planar_arm_edges_lie_in_plane() {
    let mut s = GeneratedArm::new(SamplerConfig::new(20, Dim::Two, 9), RadialDensity::PointMass(1.5))
        .unwrap();
    let p = s.sample_arm();
    assert_eq!(p.len(), 20);
    for e in p.edges() {
        assert_eq!(e.z, 0.0);
        assert!((e.norm() - 1.5).abs() < 1e-14);
    }
}

#[test]
fn measure_names_round_trip() {
    for s in [
        "hopf-gaussian-arm",
        "hopf-gaussian-closed",
        "symmetric-closed",
        "equilateral-mcmc",
        "radial:maxwell",
        "radial:chi2-4",
    ] {
        assert_eq!(Measure::parse(s).unwrap().label(), s);
    }
    assert!(Measure::parse("gaussian").is_err());
}

#[test]
fn length_dof() {
    assert_eq!(closed_length_dof(Dim::Three, 10).unwrap(), 34.0);
    assert_eq!(closed_length_dof(Dim::Two, 10).unwrap(), 16.0);
}
