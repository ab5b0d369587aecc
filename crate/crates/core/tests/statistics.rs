//! Moderate-size Monte Carlo checks. Tolerances are 4.5 standard errors.

use std::f64::consts::PI;

use polylab::analytic::{closed_polygon_expectations, exact_expected_turning_angle};
use polylab::geom::{turning_angle, Dim, EdgeChain, Polygon};
use polylab::montecarlo::{estimate, estimate_with, EstimateConfig, EstimateReport, Functional};
use polylab::samplers::Measure;

const Z: f64 = 4.5;

fn run(f: &Functional, m: Measure, n: usize, d: Dim, seed: u64, count: u64) -> EstimateReport {
    estimate(f, &EstimateConfig::new(m, n, d, seed, count)).unwrap()
}

fn agree(a: &EstimateReport, b: &EstimateReport) {
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    assert!(
        (a.mean - b.mean).abs() <= Z * se,
        "{} = {} vs {} = {} (se {se})",
        a.sampler,
        a.mean,
        b.sampler,
        b.mean
    );
}

#[test]
fn scale_invariant_means_agree_across_closed_measures() {
    for n in [5, 9] {
        let a = run(&Functional::TotalCurvature, Measure::SymmetricClosed, n, Dim::Three, 1, 60_000);
        let b = run(&Functional::TotalCurvature, Measure::HopfGaussianClosed, n, Dim::Three, 2, 60_000);
        agree(&a, &b);
    }
}

#[test]
fn vertices_are_exchangeable() {
    let n = 7;
    let expected = exact_expected_turning_angle(n as u32).unwrap();
    for vertex in [0usize, 3, 6] {
        let label = format!("turning-angle@{vertex}");
        let r = estimate_with(
            &label,
            move |p: &Polygon| {
                let e = p.edges();
                turning_angle(e[vertex], e[(vertex + 1) % e.len()])
            },
            &EstimateConfig::new(Measure::SymmetricClosed, n, Dim::Three, 10 + vertex as u64, 60_000),
        )
        .unwrap();
        assert!(r.z_score(expected) <= Z, "{label}: {} vs {expected}", r.mean);
    }
}

#[test]
fn gaussian_closed_moments() {
    let n = 8;
    let e = closed_polygon_expectations(n as u32).unwrap();
    let m = Measure::HopfGaussianClosed;
    let r = run(&Functional::EdgeMoment(2.0), m, n, Dim::Three, 20, 80_000);
    assert!(r.z_score(e.edge_moment(2.0).unwrap()) <= Z, "edge^2 {}", r.mean);
    let r = run(&Functional::Chord(3), m, n, Dim::Three, 21, 80_000);
    assert!(r.z_score(e.chord(3).unwrap()) <= Z, "chord {}", r.mean);
    let r = run(&Functional::Gyradius, m, n, Dim::Three, 22, 80_000);
    assert!(r.z_score(e.gyradius()) <= Z, "gyradius {}", r.mean);
}

#[test]
fn open_arms_have_isotropic_turning() {
    for d in [Dim::Two, Dim::Three] {
        let r = run(&Functional::TurningAngle, Measure::HopfGaussianArm, 6, d, 30, 80_000);
        assert!(r.z_score(PI / 2.0) <= Z, "{d:?}: {}", r.mean);
    }
}

#[test]
fn equilateral_chain_stays_equilateral() {
    let cfg = EstimateConfig::new(
        Measure::EquilateralMcmc { thinning: Some(3), burn_in: Some(100) },
        12,
        Dim::Three,
        40,
        4000,
    )
    .with_batch_size(500);
    let r = estimate(&Functional::EdgeMoment(2.0), &cfg).unwrap();
    assert!((r.mean - 1.0).abs() < 1e-12);
    let k = estimate(&Functional::TotalCurvature, &cfg).unwrap();
    assert!(k.mean > 2.0 * PI && k.mean < 12.0 * PI);
}
