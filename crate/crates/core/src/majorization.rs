//! The majorization order, realizability of squared-norm profiles and a finite
//! construction of unit decompositions with prescribed squared norms.
//!
//! A profile `c ∈ R^n` is realizable in `R^k` when some unit decomposition
//! `v_1, …, v_n` has `|v_i|² = c_i`; that happens exactly when
//! `(1, …, 1, 0, …, 0) ≻ c` with `k` ones. Zero entries are admitted and
//! correspond to zero vectors.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameSet;
use crate::linalg::dot;
use crate::seed;
use crate::tolerances::TAU_MAJ;

/// Candidate squared norms `c_i = |v_i|²` for a unit decomposition of `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct NormProfile {
    k: usize,
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    n: usize,
    k: usize,
    c: Vec<f64>,
}

impl TryFrom<RawProfile> for NormProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        if raw.c.len() != raw.n {
            return Err(Error::Dimension {
                what: "profile".into(),
                expected: raw.n,
                found: raw.c.len(),
            });
        }
        NormProfile::new(raw.k, raw.c)
    }
}

impl From<NormProfile> for RawProfile {
    fn from(p: NormProfile) -> Self {
        RawProfile {
            n: p.entries.len(),
            k: p.k,
            c: p.entries,
        }
    }
}

impl NormProfile {
    pub fn new(k: usize, entries: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidInput(
                "profile dimension k must be positive".into(),
            ));
        }
        if let Some(i) = entries.iter().position(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidInput(format!(
                "profile entry {i} = {} is not a nonnegative real",
                entries[i]
            )));
        }
        Ok(Self { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// The squared norms of a frame.
    pub fn of_frame(frame: &FrameSet) -> Self {
        Self {
            k: frame.k(),
            entries: frame.squared_norms(),
        }
    }
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `a ≻ b`: every top-`m` sum of `a` is at least that of `b` (within `tol`) and
/// the totals agree within `tol`.
pub fn majorizes(a: &[f64], b: &[f64], tol: f64) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Dimension {
            what: "majorization operand".into(),
            expected: a.len(),
            found: b.len(),
        });
    }
    let (a, b) = (sorted_desc(a), sorted_desc(b));
    let (mut sa, mut sb) = (0.0, 0.0);
    for (x, y) in a.iter().zip(&b) {
        sa += x;
        sb += y;
        if sa < sb - tol {
            return Ok(false);
        }
    }
    Ok((sa - sb).abs() <= tol)
}

/// The comparison vector `(1, …, 1, 0, …, 0)` with `k` ones.
pub fn extremal_profile(n: usize, k: usize) -> Vec<f64> {
    (0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect()
}

fn check_shape(profile: &NormProfile, n: usize) -> Result<()> {
    if profile.n() != n {
        return Err(Error::Dimension {
            what: "profile".into(),
            expected: n,
            found: profile.n(),
        });
    }
    if profile.k > n {
        return Err(Error::InvalidInput(format!(
            "target dimension k = {} exceeds n = {n}",
            profile.k
        )));
    }
    Ok(())
}

/// Whether `profile` is the squared-norm vector of some unit decomposition of
/// `R^k` with `n` vectors.
pub fn is_realizable(profile: &NormProfile, n: usize, tol: f64) -> Result<bool> {
    check_shape(profile, n)?;
    majorizes(&extremal_profile(n, profile.k), &profile.entries, tol)
}

/// The first prefix at which realizability fails, as `(m, top-m sum, bound)`.
fn first_violation(profile: &NormProfile, tol: f64) -> Option<(usize, f64, f64)> {
    let sorted = sorted_desc(&profile.entries);
    let mut sum = 0.0;
    for (m, c) in sorted.iter().enumerate() {
        sum += c;
        let bound = (m + 1).min(profile.k) as f64;
        if sum > bound + tol {
            return Some((m + 1, sum, bound));
        }
    }
    let k = profile.k as f64;
    ((sum - k).abs() > tol).then_some((sorted.len(), sum, k))
}

/// Gaps this small are left alone; rotating for them only perturbs the frame.
const ROUNDING_GAP: f64 = 1e-14;

/// Builds a unit decomposition whose squared norms are `profile` (in input order).
///
/// Starts from `v_i = e_i` for the `k` largest targets and zero vectors for the
/// rest, then walks the targets in decreasing order. At each step the first
/// index whose squared norm is off target is paired with the next index on the
/// other side of its target, and a plane rotation of the two columns of
/// `[v_1 … v_n]` moves the pair so that the one with the smaller gap lands
/// exactly on its target. Every rotation fixes at least one index, so at most
/// `n - 1` rotations are used, and the rows of `[v_1 … v_n]` stay orthonormal.
pub fn construct_realization(profile: &NormProfile, n: usize) -> Result<FrameSet> {
    check_shape(profile, n)?;
    if let Some((prefix, profile_sum, bound)) = first_violation(profile, TAU_MAJ) {
        return Err(Error::NotRealizable {
            prefix,
            profile_sum,
            bound,
            tol: TAU_MAJ,
        });
    }
    let k = profile.k;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| profile.entries[b].total_cmp(&profile.entries[a]));
    let target: Vec<f64> = order.iter().map(|&i| profile.entries[i]).collect();

    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|s| (0..k).map(|r| if r == s { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut current: Vec<f64> = (0..n).map(|s| if s < k { 1.0 } else { 0.0 }).collect();
    let mut fixed = vec![false; n];

    while let Some(i) = fixed.iter().position(|f| !f) {
        let gap_i = current[i] - target[i];
        if gap_i.abs() <= ROUNDING_GAP {
            fixed[i] = true;
            continue;
        }
        // partner: first later index whose gap has the opposite sign
        let Some(j) = (i + 1..n).find(|&j| {
            let gap_j = current[j] - target[j];
            !fixed[j] && gap_j.abs() > ROUNDING_GAP && gap_j * gap_i < 0.0
        }) else {
            // only rounding-level residue is left
            fixed[i] = true;
            continue;
        };
        let gap_j = current[j] - target[j];
        let (set, t) = if gap_i.abs() <= gap_j.abs() {
            (i, target[i])
        } else {
            (j, target[j])
        };
        rotate_to_target(&mut cols, i, j, set, t);
        current[i] = dot(&cols[i], &cols[i]);
        current[j] = dot(&cols[j], &cols[j]);
        fixed[set] = true;
    }

    let mut vectors = vec![Vec::new(); n];
    for (s, &orig) in order.iter().enumerate() {
        vectors[orig] = std::mem::take(&mut cols[s]);
    }
    FrameSet::new(k, vectors)
}

/// Rotates columns `i` and `j` in their plane so that `|v_set|² = t`.
///
/// With `a = |v_i|²`, `b = |v_j|²`, `x = <v_i, v_j>` the rotation
/// `v_i ← cos θ v_i − sin θ v_j`, `v_j ← sin θ v_i + cos θ v_j` gives
/// `|v_i|² = (a+b)/2 + R cos(2θ + φ)` with `R = hypot((a−b)/2, x)` and
/// `tan φ = x / ((a−b)/2)`; `|v_j|²` is the complement to `a + b`.
fn rotate_to_target(cols: &mut [Vec<f64>], i: usize, j: usize, set: usize, t: f64) {
    let a = dot(&cols[i], &cols[i]);
    let b = dot(&cols[j], &cols[j]);
    let x = dot(&cols[i], &cols[j]);
    let half = (a - b) / 2.0;
    let r = half.hypot(x);
    if r == 0.0 {
        return;
    }
    let t_i = if set == i { t } else { a + b - t };
    let phi = x.atan2(half);
    let arg = ((t_i - (a + b) / 2.0) / r).clamp(-1.0, 1.0);
    let theta = (arg.acos() - phi) / 2.0;
    let (s, c) = theta.sin_cos();
    for r in 0..cols[i].len() {
        let (vi, vj) = (cols[i][r], cols[j][r]);
        cols[i][r] = c * vi - s * vj;
        cols[j][r] = s * vi + c * vj;
    }
}

const MAX_REDISTRIBUTIONS: usize = 100;

/// A pseudo-random realizable profile, deterministic in `seed`.
///
/// Exponential variates are normalized to sum `k`; entries above 1 are clipped
/// and the excess is spread over the entries below 1 in proportion to their
/// values, repeating until every entry is at most 1.
pub fn random_realizable_profile(n: usize, k: usize, seed: u64) -> Result<NormProfile> {
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "random profile needs 1 <= k <= n, got n = {n}, k = {k}"
        )));
    }
    if n == k {
        return NormProfile::new(k, vec![1.0; n]);
    }
    let mut rng = seed::rng(seed);
    loop {
        let mut c: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = c.iter().sum();
        if total <= 0.0 {
            continue;
        }
        c.iter_mut().for_each(|x| *x *= k as f64 / total);
        if redistribute_excess(&mut c) {
            return NormProfile::new(k, c);
        }
    }
}

fn redistribute_excess(c: &mut [f64]) -> bool {
    for _ in 0..MAX_REDISTRIBUTIONS {
        let excess: f64 = c.iter().filter(|&&x| x > 1.0).map(|x| x - 1.0).sum();
        if excess == 0.0 {
            return true;
        }
        c.iter_mut().filter(|x| **x > 1.0).for_each(|x| *x = 1.0);
        let room: f64 = c.iter().filter(|&&x| x < 1.0).sum();
        if room <= 0.0 {
            return false;
        }
        c.iter_mut()
            .filter(|x| **x < 1.0)
            .for_each(|x| *x += excess * *x / room);
    }
    false
}
