mod common;

use lowner_john::experiments::{random_subspace, volume_ratios};
use lowner_john::frames::project_standard_basis;
use lowner_john::linalg::{dot, factorial};
use lowner_john::polytopes::{
    cross_projection, equality_subspace, estimate_volume, polar, polytope_from_frame,
    support_function, volume, Polytope,
};
use lowner_john::seed;
use lowner_john::Error;
use rand::Rng;
use rand_distr::StandardNormal;

fn random_direction<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
    common::unit_vector(k, &raw)
}

#[test]
fn support_of_section_is_gauge_of_projection() {
    let mut rng = seed::rng(1);
    let mut worst = 0.0f64;
    for t in 0..50 {
        let n = rng.random_range(2..=8);
        let k = rng.random_range(1..=n.min(4));
        let frame =
            project_standard_basis(&random_subspace(n, k, seed::trial_seed(10, t)).unwrap());
        let section = polytope_from_frame(&frame).unwrap();
        let projection = cross_projection(&frame).unwrap();
        let section_v = Polytope::from_vertices(k, section.vertices().unwrap()).unwrap();
        for _ in 0..200 {
            let u = random_direction(&mut rng, k);
            let h_lp = support_function(&section, &u).unwrap();
            let h_vertices = support_function(&section_v, &u).unwrap();
            let g = projection.gauge(&u).unwrap();
            worst = worst.max((h_lp - g).abs()).max((h_lp - h_vertices).abs());
        }
    }
    assert!(worst <= 1e-8, "worst discrepancy {worst}");
}

#[test]
fn polarity_pairs_vertices_and_facets() {
    for t in 0..20 {
        let frame = common::random_frame(6, 3, 500 + t);
        let section = polytope_from_frame(&frame).unwrap();
        let projection = cross_projection(&frame).unwrap();
        let xs = section.vertices().unwrap();
        let ys = projection.vertices().unwrap();
        for x in &xs {
            let best = ys.iter().map(|y| dot(x, y).abs()).fold(0.0, f64::max);
            assert!((best - 1.0).abs() <= 1e-9, "every vertex touches a facet");
        }
        let back = polar(&polar(&projection).unwrap()).unwrap();
        assert_eq!(back.vrep().unwrap().len(), ys.len());
        assert!((volume(&back).unwrap() / volume(&projection).unwrap() - 1.0).abs() <= 1e-9);
        // section facets are exactly the projection vertices
        assert_eq!(section.facets().unwrap().len(), ys.len());
    }
}

#[test]
fn ball_and_barthe_inequalities() {
    let mut rng = seed::rng(2);
    for t in 0..300 {
        let n = rng.random_range(1..=9);
        let k = rng.random_range(1..=n.min(4));
        let h = random_subspace(n, k, seed::trial_seed(20, t)).unwrap();
        let (cube, cross) = volume_ratios(&h).unwrap();
        let (nf, kf) = (n as f64, k as f64);
        assert!(
            cube <= (nf / kf).powf(kf / 2.0) + 1e-9,
            "({n},{k}) cube {cube}"
        );
        assert!(
            cross >= (kf / nf).powf(kf / 2.0) - 1e-9,
            "({n},{k}) cross {cross}"
        );
        assert!(
            cube >= 1.0 - 1e-9,
            "central sections of the cube have volume at least 2^k"
        );
    }
}

#[test]
fn equality_cases() {
    for (n, k) in [(2, 1), (4, 2), (6, 2), (6, 3), (8, 4), (10, 5), (12, 4)] {
        let (cube, cross) = volume_ratios(&equality_subspace(n, k).unwrap()).unwrap();
        let (nf, kf) = (n as f64, k as f64);
        assert!((cube - (nf / kf).powf(kf / 2.0)).abs() <= 1e-9, "({n},{k})");
        assert!(
            (cross - (kf / nf).powf(kf / 2.0)).abs() <= 1e-9,
            "({n},{k})"
        );
    }
}

#[test]
fn margin_in_three_dimensions_over_planes() {
    let (mut min_gap_cube, mut min_gap_cross) = (f64::INFINITY, f64::INFINITY);
    for t in 0..10_000 {
        let h = random_subspace(3, 2, seed::trial_seed(30, t)).unwrap();
        let (cube, cross) = volume_ratios(&h).unwrap();
        min_gap_cube = min_gap_cube.min(1.5 - cube);
        min_gap_cross = min_gap_cross.min(cross - 2.0 / 3.0);
    }
    println!(
        "n=3 k=2: min(1.5 - cube) = {min_gap_cube:.3e}, min(cross - 2/3) = {min_gap_cross:.3e}"
    );
    assert!(min_gap_cube >= -1e-9 && min_gap_cross >= -1e-9);
}

#[test]
fn exact_volume_agrees_with_estimate() {
    let mut rng = seed::rng(3);
    for t in 0..20 {
        let n = rng.random_range(2..=7);
        let k = rng.random_range(1..=n.min(3));
        let frame = common::random_frame(n, k, 40 + t);
        let body = if t % 2 == 0 {
            polytope_from_frame(&frame).unwrap()
        } else {
            cross_projection(&frame).unwrap()
        };
        let exact = volume(&body).unwrap();
        let est = estimate_volume(&body, 40_000, t).unwrap();
        assert!(
            (est.estimate - exact).abs() <= 4.0 * est.std_error.max(1e-12),
            "body {t} ({n},{k}): exact {exact} estimate {} ± {}",
            est.estimate,
            est.std_error
        );
    }
}

#[test]
fn estimate_examples() {
    let cube = estimate_volume(&Polytope::cube(3), 1_000_000, 1).unwrap();
    assert!((cube.estimate - 8.0).abs() <= 3.0 * cube.std_error);
    let frame = project_standard_basis(&equality_subspace(4, 2).unwrap());
    let cross = estimate_volume(&cross_projection(&frame).unwrap(), 200_000, 2).unwrap();
    assert!((cross.estimate - 1.0).abs() <= 3.0 * cross.std_error);
    // the same seed gives the same answer
    let again = estimate_volume(&Polytope::cube(3), 1_000_000, 1).unwrap();
    assert_eq!(cube.hits, again.hits);
}

#[test]
fn volume_scales_with_dimension_power() {
    for t in 0..10 {
        let frame = common::random_frame(5, 1 + t as usize % 4, 60 + t);
        let k = frame.k() as i32;
        for body in [
            polytope_from_frame(&frame).unwrap(),
            cross_projection(&frame).unwrap(),
        ] {
            let v = volume(&body).unwrap();
            let v2 = volume(&body.scaled(2.0)).unwrap();
            assert!((v2 / v - 2f64.powi(k)).abs() <= 1e-9 * 2f64.powi(k));
        }
    }
}

#[test]
fn standard_bodies() {
    for k in 1..=5 {
        assert!((volume(&Polytope::cube(k)).unwrap() - 2f64.powi(k as i32)).abs() <= 1e-9);
        let want = 2f64.powi(k as i32) / factorial(k);
        assert!((volume(&Polytope::cross_polytope(k)).unwrap() - want).abs() <= 1e-9);
    }
}

#[test]
fn invalid_bodies() {
    assert!(matches!(
        Polytope::from_vertices(2, vec![vec![1.0, 0.0], vec![2.0, 0.0]]).and_then(|p| volume(&p)),
        Err(Error::Degenerate(_)) | Err(Error::OriginNotInterior)
    ));
    let unbounded = Polytope::from_functionals(2, vec![vec![1.0, 0.0]]).unwrap();
    assert!(matches!(
        polar(&unbounded),
        Err(Error::Unbounded { rank: 1, dim: 2 })
    ));
    let big = Polytope::cube(6);
    assert!(matches!(
        volume(&big),
        Err(Error::UnsupportedDimension { .. })
    ));
    assert!(volume(&Polytope::cube(3).scaled(0.5)).is_ok());
}
