use std::f64::consts::FRAC_1_SQRT_2;

use lowner_john::experiments::{
    conjecture_scan, random_subspace, run_suite, to_csv, verify_ellipsoid_bounds,
    verify_volume_bounds, volume_ratios, ExperimentKind, ExperimentReport, Quantity,
    SubspaceSource, SuiteConfig, SuiteJob, CSV_COLUMNS, EXPERIMENT_EPS,
};
use lowner_john::frames::project_standard_basis;
use lowner_john::polytopes::equality_subspace;
use lowner_john::Subspace;

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn job(n: usize, k: usize, trials: usize, seed: u64, source: SubspaceSource) -> SuiteJob {
    SuiteJob {
        n,
        k,
        trials,
        seed,
        source,
    }
}

#[test]
fn random_subspace_examples() {
    let h = random_subspace(4, 4, 9).unwrap();
    let (cube, cross) = volume_ratios(&h).unwrap();
    assert!((cube - 1.0).abs() <= 1e-9 && (cross - 1.0).abs() <= 1e-9);
    assert_eq!(
        random_subspace(6, 3, 77).unwrap(),
        random_subspace(6, 3, 77).unwrap()
    );

    let mut mean = [0.0; 4];
    for s in 0..1000 {
        let norms = project_standard_basis(&random_subspace(4, 2, s).unwrap()).squared_norms();
        mean.iter_mut()
            .zip(&norms)
            .for_each(|(m, c)| *m += c / 1000.0);
    }
    assert!(mean.iter().all(|m| (m - 0.5).abs() <= 0.02), "{mean:?}");
}

#[test]
fn ellipsoid_report_examples() {
    let r = verify_ellipsoid_bounds(&equality_subspace(4, 2).unwrap(), EXPERIMENT_EPS).unwrap();
    assert!(rel(r.ratio(Quantity::LownerRatio).unwrap(), 0.5) <= 1e-6);
    assert!(rel(r.ratio(Quantity::JohnRatio).unwrap(), 2.0) <= 1e-6);
    assert!(r.is_equality(Quantity::LownerRatio) && r.is_equality(Quantity::JohnRatio));

    let r = verify_ellipsoid_bounds(&Subspace::coordinate(3, 3).unwrap(), EXPERIMENT_EPS).unwrap();
    for q in [Quantity::LownerRatio, Quantity::JohnRatio] {
        assert!(rel(r.ratio(q).unwrap(), 1.0) <= 1e-6);
        assert_eq!(r.bounds[&q], 1.0);
        assert!(r.is_equality(q));
    }

    for s in 0..20 {
        let r =
            verify_ellipsoid_bounds(&random_subspace(5, 2, s).unwrap(), EXPERIMENT_EPS).unwrap();
        assert!(r.all_pass());
    }
}

#[test]
fn volume_report_examples() {
    let r = verify_volume_bounds(&equality_subspace(6, 3).unwrap()).unwrap();
    assert!(rel(r.ratio(Quantity::CubeSectionRatio).unwrap(), 2f64.powf(1.5)) <= 1e-9);
    assert!(
        rel(
            r.ratio(Quantity::CrossProjectionRatio).unwrap(),
            2f64.powf(-1.5)
        ) <= 1e-9
    );
    assert!(
        r.is_equality(Quantity::CubeSectionRatio) && r.is_equality(Quantity::CrossProjectionRatio)
    );

    let r = verify_volume_bounds(&Subspace::coordinate(5, 3).unwrap()).unwrap();
    assert!((r.ratio(Quantity::CubeSectionRatio).unwrap() - 1.0).abs() <= 1e-12);
    assert!((r.ratio(Quantity::CrossProjectionRatio).unwrap() - 1.0).abs() <= 1e-12);

    for s in 0..20 {
        let r = verify_volume_bounds(&random_subspace(5, 2, s).unwrap()).unwrap();
        assert!(r.all_pass());
        assert_eq!(r.passes.len(), 4);
        assert!(Quantity::ALL.iter().all(|q| !r.is_equality(*q)));
    }
}

#[test]
fn report_invariants() {
    for (n, k) in [(3, 2), (4, 2), (5, 3), (6, 3), (7, 4), (4, 1)] {
        for s in 0..40 {
            let h = random_subspace(n, k, 1000 * n as u64 + s).unwrap();
            check_invariants(&verify_volume_bounds(&h).unwrap());
        }
        if n % k == 0 {
            let r = verify_volume_bounds(&equality_subspace(n, k).unwrap()).unwrap();
            assert!(r.profile_uniform && r.is_equality(Quantity::LownerRatio));
            check_invariants(&r);
        }
    }
}

fn check_invariants(r: &ExperimentReport) {
    let get = |q| r.ratio(q).unwrap();
    let (lowner, john) = (get(Quantity::LownerRatio), get(Quantity::JohnRatio));
    let (cube, cross) = (
        get(Quantity::CubeSectionRatio),
        get(Quantity::CrossProjectionRatio),
    );
    assert_eq!(
        r.is_equality(Quantity::CubeSectionRatio),
        r.is_equality(Quantity::CrossProjectionRatio)
    );
    assert_eq!(r.is_equality(Quantity::LownerRatio), r.profile_uniform);
    assert!(cross >= lowner - 1e-6 && lowner >= r.bounds[&Quantity::LownerRatio] - 1e-6);
    assert!(cube <= john + 1e-6 && john <= r.bounds[&Quantity::JohnRatio] + 1e-6);
    assert!(r.volume_product.unwrap() > 0.0);
}

#[test]
fn conjecture_scan_examples() {
    let s = conjecture_scan(2, 1, 2000, 5).unwrap();
    assert!(s.min_cross_ratio >= FRAC_1_SQRT_2 - 1e-9);
    assert!(
        s.min_cross_ratio <= FRAC_1_SQRT_2 + 5e-3,
        "{}",
        s.min_cross_ratio
    );
    assert!(s.counterexample.is_none() && s.ball2_violations.is_empty());

    // the diagonal line attains the bound exactly
    let diagonal = Subspace::new(2, vec![vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]).unwrap();
    let (_, cross) = volume_ratios(&diagonal).unwrap();
    assert!((cross - FRAC_1_SQRT_2).abs() <= 1e-12);

    let s = conjecture_scan(3, 3, 10, 1).unwrap();
    assert_eq!((s.bound_2pow, s.bound_ball2), (1.0, 1.0));
    assert!((s.min_cross_ratio - 1.0).abs() <= 1e-9 && (s.max_cube_ratio - 1.0).abs() <= 1e-9);

    let s = conjecture_scan(4, 3, 1000, 8).unwrap();
    assert!(s.ball2_violations.is_empty());
    assert!(s.max_cube_ratio <= s.bound_ball2);
}

#[test]
fn suite_examples() {
    let config = SuiteConfig {
        jobs: [(4, 2), (6, 2), (6, 3), (8, 4)]
            .into_iter()
            .map(|(n, k)| job(n, k, 1, 0, SubspaceSource::Equality))
            .collect(),
        experiments: vec![ExperimentKind::Ellipsoid, ExperimentKind::Volume],
        eps: EXPERIMENT_EPS,
    };
    let out = run_suite(&config).unwrap();
    assert_eq!(out.exit_code(), 0);
    for r in &out.reports {
        assert!(
            Quantity::ALL.iter().all(|q| r.is_equality(*q)),
            "({},{})",
            r.n,
            r.k
        );
    }
    for line in out.csv.lines().skip(2) {
        assert!(line.contains("lowner|john|cube|cross"), "{line}");
    }

    let empty = run_suite(&SuiteConfig {
        experiments: vec![],
        ..config.clone()
    })
    .unwrap();
    assert!(empty.reports.is_empty());
    assert_eq!(empty.exit_code(), 0);
    assert_eq!(empty.csv.lines().count(), 2);
    assert_eq!(empty.csv.lines().nth(1), Some(CSV_COLUMNS));

    let plane = SuiteConfig {
        jobs: vec![job(3, 2, 100, 42, SubspaceSource::Haar)],
        experiments: vec![ExperimentKind::Volume],
        eps: EXPERIMENT_EPS,
    };
    let out = run_suite(&plane).unwrap();
    assert_eq!(out.reports.len(), 100);
    assert_eq!(out.csv.lines().count(), 102);
    assert_eq!(out.exit_code(), 0);
}

#[test]
fn suite_is_deterministic_and_sorted() {
    let config = SuiteConfig {
        jobs: vec![
            job(5, 3, 12, 7, SubspaceSource::Haar),
            job(4, 2, 12, 7, SubspaceSource::Haar),
        ],
        experiments: vec![ExperimentKind::Volume],
        eps: EXPERIMENT_EPS,
    };
    let a = run_suite(&config).unwrap();
    let b = run_suite(&config).unwrap();
    assert_eq!(a.csv, b.csv);
    let keys: Vec<_> = a.reports.iter().map(|r| (r.n, r.k, r.trial_id)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(to_csv(&a.reports, EXPERIMENT_EPS), a.csv);
}

#[test]
fn invalid_configs() {
    let bad = |j: SuiteJob, kinds: Vec<ExperimentKind>| {
        run_suite(&SuiteConfig {
            jobs: vec![j],
            experiments: kinds,
            eps: EXPERIMENT_EPS,
        })
        .is_err()
    };
    assert!(bad(
        job(3, 4, 1, 0, SubspaceSource::Haar),
        vec![ExperimentKind::Ellipsoid]
    ));
    assert!(bad(
        job(5, 2, 1, 0, SubspaceSource::Equality),
        vec![ExperimentKind::Ellipsoid]
    ));
    assert!(bad(
        job(12, 6, 1, 0, SubspaceSource::Haar),
        vec![ExperimentKind::Volume]
    ));
    let config: Result<SuiteConfig, _> =
        serde_json::from_str(r#"{"jobs": [], "experiments": ["bogus"]}"#);
    assert!(config.is_err());
}
