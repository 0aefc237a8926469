//! End-to-end checks of the ellipsoid and volume bounds on Haar-random and
//! equality-case subspaces, the conjectured projection bound scan, and the CSV
//! suite runner behind the CLI.
//!
//! Bounds checked per trial, with `ρ = (k/n)^{k/2}`:
//!
//! | quantity                 | bound          | kind                 |
//! |--------------------------|----------------|----------------------|
//! | Löwner ratio of `◊^n|H`  | `>= ρ`         | proved               |
//! | John ratio of `Q^n ∩ H`  | `<= 1/ρ`       | proved               |
//! | `vol(Q^n ∩ H) / 2^k`     | `<= 1/ρ`, `<= John ratio`       | proved |
//! | `vol(◊^n|H) / vol ◊^k`   | `>= ρ`, `>= Löwner ratio`       | proved |
//! | `vol(Q^n ∩ H) / 2^k`     | `<= 2^{(n-k)/2}` | proved             |
//! | `vol(◊^n|H) / vol ◊^k`   | `>= 2^{(k-n)/2}` | conjectured, reported only |

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ellipsoids::lowner_symmetric;
use crate::error::{Error, Result};
use crate::frames::{project_standard_basis, Subspace};
use crate::linalg::{factorial, norm, orthogonalize_against};
use crate::polytopes::{cross_projection, equality_subspace, polytope_from_frame, volume};
use crate::seed;
use crate::tolerances::{BOUND_TOL, K_EXACT, N_EXACT, TAU_CERT, TAU_ORTH, VOLUME_TOL};

/// Solver tolerance used by the experiments; tight enough that the solver error
/// (`k · eps / 2` relative) is far below [`BOUND_TOL`].
pub const EXPERIMENT_EPS: f64 = 1e-9;

/// Relative tolerance for flagging a ratio as equal to its bound.
pub const EQUALITY_TOL: f64 = 1e-6;

/// Tolerance for `|v_i|² = k/n` in the uniform-profile flag.
pub const PROFILE_TOL: f64 = 1e-6;

/// Haar-distributed `k`-dimensional subspace of `R^n`, deterministic in `seed`:
/// Gram–Schmidt on `k` standard Gaussian vectors, resampling near-dependent draws.
pub fn random_subspace(n: usize, k: usize, seed: u64) -> Result<Subspace> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "random subspace needs 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let mut rng = seed::rng(seed);
    'draw: loop {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let before = norm(&g);
            orthogonalize_against(&mut g, &rows);
            let after = norm(&g);
            if after <= 1e-6 * before || after.is_nan() {
                continue 'draw;
            }
            g.iter_mut().for_each(|x| *x /= after);
            rows.push(g);
        }
        return Subspace::new(n, rows);
    }
}

/// Quantities compared against their bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `vol(Löwner ellipsoid of ◊^n | H) / vol(unit ball)`.
    LownerRatio,
    /// `vol(John ellipsoid of Q^n ∩ H) / vol(unit ball)`.
    JohnRatio,
    /// `vol(Q^n ∩ H) / vol(Q^k)`.
    CubeSectionRatio,
    /// `vol(◊^n | H) / vol(◊^k)`.
    CrossProjectionRatio,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::LownerRatio,
        Quantity::JohnRatio,
        Quantity::CubeSectionRatio,
        Quantity::CrossProjectionRatio,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Quantity::LownerRatio => "lowner",
            Quantity::JohnRatio => "john",
            Quantity::CubeSectionRatio => "cube",
            Quantity::CrossProjectionRatio => "cross",
        }
    }

    /// `true` for quantities bounded from above.
    fn is_upper_bounded(self) -> bool {
        matches!(self, Quantity::JohnRatio | Quantity::CubeSectionRatio)
    }

    /// `(n/k)^{k/2}` for upper-bounded quantities, `(k/n)^{k/2}` otherwise.
    pub fn bound(self, n: usize, k: usize) -> f64 {
        let (n, k) = (n as f64, k as f64);
        if self.is_upper_bounded() {
            (n / k).powf(k / 2.0)
        } else {
            (k / n).powf(k / 2.0)
        }
    }

    fn tolerance(self) -> f64 {
        match self {
            Quantity::LownerRatio | Quantity::JohnRatio => BOUND_TOL,
            Quantity::CubeSectionRatio | Quantity::CrossProjectionRatio => VOLUME_TOL,
        }
    }
}

/// Which families of quantities a trial computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Löwner and John ellipsoid ratios.
    Ellipsoid,
    /// Exact volume ratios of the cube section and cross projection; includes
    /// the ellipsoid ratios, which they are compared against.
    Volume,
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "ellipsoid" => Ok(Self::Ellipsoid),
            "volume" => Ok(Self::Volume),
            other => Err(Error::InvalidInput(format!("unknown experiment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub trial_id: u64,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub ratios: BTreeMap<Quantity, f64>,
    pub bounds: BTreeMap<Quantity, f64>,
    /// Proved bound holds. For the volume ratios this also includes the
    /// comparison with the matching ellipsoid ratio (`cube <= john`,
    /// `cross >= lowner`, within [`BOUND_TOL`]).
    pub passes: BTreeMap<Quantity, bool>,
    /// Ratio equals its bound within [`EQUALITY_TOL`] (relative).
    pub equalities: BTreeMap<Quantity, bool>,
    /// Every `|v_i|²` equals `k/n` within [`PROFILE_TOL`].
    pub profile_uniform: bool,
    /// `vol(Q^n ∩ H) · vol(◊^n | H)`; informational.
    pub volume_product: Option<f64>,
}

impl ExperimentReport {
    fn new(subspace: &Subspace) -> Self {
        let frame = project_standard_basis(subspace);
        let target = subspace.k() as f64 / subspace.n() as f64;
        let profile_uniform = frame
            .squared_norms()
            .iter()
            .all(|c| (c - target).abs() <= PROFILE_TOL);
        Self {
            trial_id: 0,
            n: subspace.n(),
            k: subspace.k(),
            seed: 0,
            ratios: BTreeMap::new(),
            bounds: BTreeMap::new(),
            passes: BTreeMap::new(),
            equalities: BTreeMap::new(),
            profile_uniform,
            volume_product: None,
        }
    }

    fn record(&mut self, q: Quantity, ratio: f64) {
        let bound = q.bound(self.n, self.k);
        let pass = if q.is_upper_bounded() {
            ratio <= bound + q.tolerance()
        } else {
            ratio >= bound - q.tolerance()
        };
        self.ratios.insert(q, ratio);
        self.bounds.insert(q, bound);
        self.passes.insert(q, pass);
        self.equalities
            .insert(q, (ratio / bound - 1.0).abs() <= EQUALITY_TOL);
    }

    pub fn all_pass(&self) -> bool {
        self.passes.values().all(|p| *p)
    }

    pub fn ratio(&self, q: Quantity) -> Option<f64> {
        self.ratios.get(&q).copied()
    }

    pub fn is_equality(&self, q: Quantity) -> bool {
        self.equalities.get(&q).copied().unwrap_or(false)
    }
}

fn record_ellipsoids(report: &mut ExperimentReport, subspace: &Subspace, eps: f64) -> Result<()> {
    let frame = project_standard_basis(subspace);
    let lowner = lowner_symmetric(frame.vectors(), eps)?;
    let lowner_ratio = lowner.ellipsoid.volume_ratio();
    report.record(Quantity::LownerRatio, lowner_ratio);
    // the John ellipsoid of the section is the polar of this one: det A⁻¹ = 1 / det A
    report.record(Quantity::JohnRatio, 1.0 / lowner_ratio);
    Ok(())
}

/// Cube-section and cross-projection volume ratios.
pub fn volume_ratios(subspace: &Subspace) -> Result<(f64, f64)> {
    let (n, k) = (subspace.n(), subspace.k());
    if k > K_EXACT || n > N_EXACT {
        return Err(Error::UnsupportedDimension {
            k,
            m: n,
            max_k: K_EXACT,
            max_m: N_EXACT,
        });
    }
    let frame = project_standard_basis(subspace);
    let section = volume(&polytope_from_frame(&frame)?)?;
    let projection = volume(&cross_projection(&frame)?)?;
    let cube = 2f64.powi(k as i32);
    let cross = cube / factorial(k);
    Ok((section / cube, projection / cross))
}

/// Löwner and John volume ratios against `(k/n)^{k/2}` and `(n/k)^{k/2}`.
pub fn verify_ellipsoid_bounds(subspace: &Subspace, eps: f64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(subspace);
    record_ellipsoids(&mut report, subspace, eps)?;
    Ok(report)
}

/// Exact volume ratios against the Ball and Barthe bounds, together with the
/// ellipsoid ratios they are sandwiched against.
pub fn verify_volume_bounds(subspace: &Subspace) -> Result<ExperimentReport> {
    verify_volume_bounds_with(subspace, EXPERIMENT_EPS)
}

fn verify_volume_bounds_with(subspace: &Subspace, eps: f64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(subspace);
    record_ellipsoids(&mut report, subspace, eps)?;
    let (cube_ratio, cross_ratio) = volume_ratios(subspace)?;
    report.record(Quantity::CubeSectionRatio, cube_ratio);
    report.record(Quantity::CrossProjectionRatio, cross_ratio);

    let john = report.ratios[&Quantity::JohnRatio];
    let lowner = report.ratios[&Quantity::LownerRatio];
    if cube_ratio > john + BOUND_TOL {
        report.passes.insert(Quantity::CubeSectionRatio, false);
    }
    if cross_ratio < lowner - BOUND_TOL {
        report.passes.insert(Quantity::CrossProjectionRatio, false);
    }
    let k = subspace.k() as i32;
    report.volume_product = Some(cube_ratio * cross_ratio * 4f64.powi(k) / factorial(k as usize));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjectureSummary {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Smallest cross-projection ratio seen.
    pub min_cross_ratio: f64,
    /// Conjectured lower bound `2^{(k-n)/2}`.
    pub bound_2pow: f64,
    /// Largest cube-section ratio seen.
    pub max_cube_ratio: f64,
    /// Proved upper bound `2^{(n-k)/2}`.
    pub bound_ball2: f64,
    /// Trials violating the proved bound; any entry indicates a bug.
    pub ball2_violations: Vec<u64>,
    /// First trial falling below the conjectured bound, if any.
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub trial_id: u64,
    pub seed: u64,
    pub cross_ratio: f64,
    pub subspace: Subspace,
}

/// Scans Haar-random subspaces for the extremes of both volume ratios against
/// the `2^{±(n-k)/2}` bounds.
pub fn conjecture_scan(n: usize, k: usize, trials: usize, seed: u64) -> Result<ConjectureSummary> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    let bound_2pow = 2f64.powf((k as f64 - n as f64) / 2.0);
    let bound_ball2 = 2f64.powf((n as f64 - k as f64) / 2.0);
    let results = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let s = seed::trial_seed(seed, t);
            let h = random_subspace(n, k, s)?;
            let (cube, cross) = volume_ratios(&h)?;
            Ok((t, s, h, cube, cross))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut summary = ConjectureSummary {
        n,
        k,
        trials,
        seed,
        min_cross_ratio: f64::INFINITY,
        bound_2pow,
        max_cube_ratio: f64::NEG_INFINITY,
        bound_ball2,
        ball2_violations: Vec::new(),
        counterexample: None,
    };
    for (t, s, h, cube, cross) in results {
        summary.min_cross_ratio = summary.min_cross_ratio.min(cross);
        summary.max_cube_ratio = summary.max_cube_ratio.max(cube);
        if cube > bound_ball2 + VOLUME_TOL {
            summary.ball2_violations.push(t);
        }
        if cross < bound_2pow - VOLUME_TOL && summary.counterexample.is_none() {
            summary.counterexample = Some(Counterexample {
                trial_id: t,
                seed: s,
                cross_ratio: cross,
                subspace: h,
            });
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceSource {
    /// Haar-random subspaces seeded per trial.
    #[default]
    Haar,
    /// The equality-case subspace for `k | n` (same for every trial).
    Equality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteJob {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub source: SubspaceSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub jobs: Vec<SuiteJob>,
    pub experiments: Vec<ExperimentKind>,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    EXPERIMENT_EPS
}

#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub reports: Vec<ExperimentReport>,
    pub csv: String,
}

impl SuiteOutput {
    /// 0 when every proved bound holds, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.reports.iter().all(ExperimentReport::all_pass) {
            0
        } else {
            1
        }
    }
}

fn validate(config: &SuiteConfig) -> Result<()> {
    if config.eps.is_nan() || config.eps <= 0.0 {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }
    let volume = config.experiments.contains(&ExperimentKind::Volume);
    for job in &config.jobs {
        if job.k == 0 || job.k > job.n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= k <= n, got n = {}, k = {}",
                job.n, job.k
            )));
        }
        if job.source == SubspaceSource::Equality && !job.n.is_multiple_of(job.k) {
            return Err(Error::InvalidInput(format!(
                "equality subspace needs k | n, got n = {}, k = {}",
                job.n, job.k
            )));
        }
        if volume && (job.k > K_EXACT || job.n > N_EXACT) {
            return Err(Error::InvalidInput(format!(
                "volume experiments support k <= {K_EXACT} and n <= {N_EXACT}, got n = {}, k = {}",
                job.n, job.k
            )));
        }
    }
    Ok(())
}

/// Runs every trial of every job; trials are independent and run in parallel.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutput> {
    validate(config)?;
    let kinds: BTreeSet<ExperimentKind> = config.experiments.iter().copied().collect();
    let mut reports = Vec::new();
    if !kinds.is_empty() {
        for job in &config.jobs {
            let mut batch = (0..job.trials as u64)
                .into_par_iter()
                .map(|t| {
                    let s = seed::trial_seed(job.seed, t);
                    let h = match job.source {
                        SubspaceSource::Haar => random_subspace(job.n, job.k, s)?,
                        SubspaceSource::Equality => equality_subspace(job.n, job.k)?,
                    };
                    let mut r = if kinds.contains(&ExperimentKind::Volume) {
                        verify_volume_bounds_with(&h, config.eps)?
                    } else {
                        verify_ellipsoid_bounds(&h, config.eps)?
                    };
                    r.trial_id = t;
                    r.seed = s;
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            reports.append(&mut batch);
        }
    }
    reports.sort_by_key(|r| (r.n, r.k, r.trial_id));
    let csv = to_csv(&reports, config.eps);
    Ok(SuiteOutput { reports, csv })
}

pub const CSV_COLUMNS: &str = "n,k,trial_id,seed,lowner_ratio,john_ratio,cube_section_ratio,\
cross_projection_ratio,bound_kn,bound_nk,pass_lowner,pass_john,pass_cube,pass_cross,\
equality_flags,profile_uniform";

/// CSV with a tolerance header, one row per report. Missing quantities are
/// empty cells; `equality_flags` lists the flagged quantities joined by `|`.
pub fn to_csv(reports: &[ExperimentReport], eps: f64) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# tau_orth={TAU_ORTH:e},tau_cert={TAU_CERT:e},eps={eps:e},bound_tol={BOUND_TOL:e},\
volume_tol={VOLUME_TOL:e},equality_rel_tol={EQUALITY_TOL:e},profile_tol={PROFILE_TOL:e}"
    );
    let _ = writeln!(out, "{CSV_COLUMNS}");
    for r in reports {
        let ratio = |q: Quantity| r.ratio(q).map(|x| x.to_string()).unwrap_or_default();
        let pass = |q: Quantity| r.passes.get(&q).map(|p| p.to_string()).unwrap_or_default();
        let flags: Vec<&str> = Quantity::ALL
            .iter()
            .filter(|q| r.is_equality(**q))
            .map(|q| q.short_name())
            .collect();
        let (n, k) = (r.n as f64, r.k as f64);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.k,
            r.trial_id,
            r.seed,
            ratio(Quantity::LownerRatio),
            ratio(Quantity::JohnRatio),
            ratio(Quantity::CubeSectionRatio),
            ratio(Quantity::CrossProjectionRatio),
            (k / n).powf(k / 2.0),
            (n / k).powf(k / 2.0),
            pass(Quantity::LownerRatio),
            pass(Quantity::JohnRatio),
            pass(Quantity::CubeSectionRatio),
            pass(Quantity::CrossProjectionRatio),
            flags.join("|"),
            r.profile_uniform,
        );
    }
    out
}
