//! Origin-centered ellipsoids `{x : <Ax, x> <= 1}`, the minimum-volume ellipsoid
//! enclosing a symmetric point set, polar ellipsoids, and the John ellipsoid of a
//! cube section obtained from the Löwner ellipsoid of the dual projection.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{project_standard_basis, FrameSet, Subspace};
use crate::linalg::{norm, rank, unit_ball_volume};
use crate::tolerances::{SOLVER_MAX_ITER, SOLVER_REFACTOR_EVERY};

/// `{x ∈ R^k : <Ax, x> <= 1}` for a symmetric positive-definite `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEllipsoid", into = "RawEllipsoid")]
pub struct Ellipsoid {
    matrix: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawEllipsoid {
    k: usize,
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawEllipsoid> for Ellipsoid {
    type Error = Error;

    fn try_from(raw: RawEllipsoid) -> Result<Self> {
        if raw.matrix.len() != raw.k {
            return Err(Error::Dimension {
                what: "ellipsoid matrix rows".into(),
                expected: raw.k,
                found: raw.matrix.len(),
            });
        }
        for (i, row) in raw.matrix.iter().enumerate() {
            if row.len() != raw.k {
                return Err(Error::Dimension {
                    what: format!("ellipsoid matrix row {i}"),
                    expected: raw.k,
                    found: row.len(),
                });
            }
        }
        Ellipsoid::new(DMatrix::from_fn(raw.k, raw.k, |i, j| raw.matrix[i][j]))
    }
}

impl From<Ellipsoid> for RawEllipsoid {
    fn from(e: Ellipsoid) -> Self {
        let k = e.k();
        RawEllipsoid {
            k,
            matrix: (0..k)
                .map(|i| (0..k).map(|j| e.matrix[(i, j)]).collect())
                .collect(),
        }
    }
}

impl Ellipsoid {
    /// Accepts `A` if it is symmetric up to rounding (the stored matrix is made
    /// exactly symmetric from its upper triangle) and has a Cholesky factor.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let k = matrix.nrows();
        if k == 0 || matrix.ncols() != k {
            return Err(Error::Dimension {
                what: "ellipsoid matrix columns".into(),
                expected: k,
                found: matrix.ncols(),
            });
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("ellipsoid matrix is not finite".into()));
        }
        let scale = matrix.amax();
        let mut m = matrix;
        for i in 0..k {
            for j in 0..i {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidInput(format!(
                        "ellipsoid matrix is not symmetric at ({i}, {j})"
                    )));
                }
                m[(i, j)] = m[(j, i)];
            }
        }
        if Cholesky::new(m.clone()).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(Self { matrix: m })
    }

    pub fn unit_ball(k: usize) -> Self {
        Self {
            matrix: DMatrix::identity(k, k),
        }
    }

    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    fn cholesky(&self) -> Cholesky<f64, Dyn> {
        Cholesky::new(self.matrix.clone()).expect("validated at construction")
    }

    pub fn determinant(&self) -> f64 {
        let l = self.cholesky();
        l.l_dirty().diagonal().iter().map(|d| d * d).product()
    }

    /// `<Ax, x>`; at most 1 exactly on the ellipsoid.
    pub fn gauge_squared(&self, x: &[f64]) -> f64 {
        let v = DVector::from_column_slice(x);
        (self.matrix.clone() * &v).dot(&v)
    }

    /// `vol(E) / vol(unit ball) = 1 / √det A`.
    pub fn volume_ratio(&self) -> f64 {
        1.0 / self.determinant().sqrt()
    }
}

/// `vol 𝔼_k / √det A`.
pub fn ellipsoid_volume(e: &Ellipsoid) -> f64 {
    unit_ball_volume(e.k()) * e.volume_ratio()
}

/// The polar ellipsoid, with matrix `A⁻¹`.
pub fn polar_ellipsoid(e: &Ellipsoid) -> Result<Ellipsoid> {
    let inv = e.cholesky().inverse();
    Ellipsoid::new(symmetrize(inv))
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// Output of [`lowner_symmetric`].
#[derive(Debug, Clone)]
pub struct LownerSolution {
    pub ellipsoid: Ellipsoid,
    /// Design weights `u` (one per input point, zero for dropped zero vectors).
    pub weights: Vec<f64>,
    /// `<A p_i, p_i>` for every input point.
    pub levels: Vec<f64>,
    pub iterations: usize,
}

impl LownerSolution {
    pub fn max_level(&self) -> f64 {
        self.levels
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Minimum-volume origin-centered ellipsoid containing `±p` for every point.
///
/// Solves the D-optimal design problem `max log det M(u)`, `M(u) = Σ u_i p_i p_iᵀ`
/// over the simplex with Frank–Wolfe toward and away steps and exact line
/// search, starting from uniform weights. `A = (k M(u))⁻¹` and the loop stops
/// once every point has `<A p, p> <= 1 + eps` and every point carrying weight
/// has `<A p, p> >= 1 - eps`. Since `Σ u_i <A p_i, p_i> = 1`, the largest level
/// is never below 1.
pub fn lowner_symmetric(points: &[Vec<f64>], eps: f64) -> Result<LownerSolution> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidInput("no points".into()));
    };
    let k = first.len();
    if k == 0 {
        return Err(Error::InvalidInput("points have dimension 0".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != k {
            return Err(Error::Dimension {
                what: format!("point {i}"),
                expected: k,
                found: p.len(),
            });
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!("point {i} is not finite")));
        }
    }
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidInput("eps must be positive".into()));
    }

    let active: Vec<usize> = (0..points.len())
        .filter(|&i| norm(&points[i]) > 0.0)
        .collect();
    let pts: Vec<DVector<f64>> = active
        .iter()
        .map(|&i| DVector::from_column_slice(&points[i]))
        .collect();
    let r = rank(
        &active
            .iter()
            .map(|&i| points[i].clone())
            .collect::<Vec<_>>(),
        1e-10,
    );
    if r < k {
        return Err(Error::RankDeficient { rank: r, dim: k });
    }

    let m = pts.len();
    let kf = k as f64;
    let mut u = vec![1.0 / m as f64; m];
    let mut minv = moment_inverse(&pts, &u)?;
    let mut omega = vec![0.0; m];
    let mut since_refactor = 0usize;

    for iter in 0..SOLVER_MAX_ITER {
        for (w, p) in omega.iter_mut().zip(&pts) {
            *w = (&minv * p).dot(p);
        }
        let (j, w_max) = argmax(&omega);
        let (i, w_min) = omega
            .iter()
            .enumerate()
            .filter(|(i, _)| u[*i] > 0.0)
            .map(|(i, w)| (i, *w))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("weights sum to one");
        let toward_gap = w_max / kf - 1.0;
        let away_gap = 1.0 - w_min / kf;
        if toward_gap <= eps && away_gap <= eps {
            return Ok(finish(points, &active, &pts, &u, &minv, k, iter));
        }

        // (alpha, beta, index): M ← alpha M + beta p pᵀ
        let step = if toward_gap >= away_gap || u[i] >= 1.0 {
            let lambda = (w_max - kf) / (kf * (w_max - 1.0));
            u.iter_mut().for_each(|x| *x *= 1.0 - lambda);
            u[j] += lambda;
            (1.0 - lambda, lambda, j)
        } else {
            let mu_max = u[i] / (1.0 - u[i]);
            let mu = if w_min > 1.0 {
                ((kf - w_min) / (kf * (w_min - 1.0))).min(mu_max)
            } else {
                mu_max
            };
            u.iter_mut().for_each(|x| *x *= 1.0 + mu);
            if mu == mu_max {
                u[i] = 0.0;
            } else {
                u[i] -= mu;
            }
            (1.0 + mu, -mu, i)
        };

        since_refactor += 1;
        let (alpha, beta, idx) = step;
        if since_refactor >= SOLVER_REFACTOR_EVERY || alpha < 1e-6 {
            since_refactor = 0;
            minv = moment_inverse(&pts, &u)?;
        } else {
            // Sherman–Morrison for (alpha M + beta p pᵀ)⁻¹
            let y = &minv * &pts[idx];
            let ratio = beta / alpha;
            let denom = 1.0 + ratio * omega[idx];
            minv = (&minv - (&y * y.transpose()) * (ratio / denom)) / alpha;
        }
    }

    for (w, p) in omega.iter_mut().zip(&pts) {
        *w = (&minv * p).dot(p);
    }
    let gap = omega
        .iter()
        .map(|w| (w / kf - 1.0).abs())
        .fold(0.0, f64::max);
    Err(Error::NotConverged {
        iterations: SOLVER_MAX_ITER,
        gap,
    })
}

fn argmax(v: &[f64]) -> (usize, f64) {
    v.iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty")
}

fn moment_inverse(pts: &[DVector<f64>], u: &[f64]) -> Result<DMatrix<f64>> {
    let k = pts[0].len();
    let mut m = DMatrix::zeros(k, k);
    for (p, w) in pts.iter().zip(u) {
        if *w > 0.0 {
            m += (p * p.transpose()) * *w;
        }
    }
    Cholesky::new(m)
        .map(|c| c.inverse())
        .ok_or(Error::NotPositiveDefinite)
}

fn finish(
    points: &[Vec<f64>],
    active: &[usize],
    pts: &[DVector<f64>],
    u: &[f64],
    minv: &DMatrix<f64>,
    k: usize,
    iterations: usize,
) -> LownerSolution {
    // refactor once more so the certificate A = (k M(u))⁻¹ carries no update drift
    let minv = moment_inverse(pts, u).unwrap_or_else(|_| minv.clone());
    let a = symmetrize(minv / k as f64);
    let ellipsoid = Ellipsoid::new(a).expect("inverse of a positive-definite moment matrix");
    let mut weights = vec![0.0; points.len()];
    for (&orig, w) in active.iter().zip(u) {
        weights[orig] = *w;
    }
    let levels = points.iter().map(|p| ellipsoid.gauge_squared(p)).collect();
    LownerSolution {
        ellipsoid,
        weights,
        levels,
        iterations,
    }
}

/// John ellipsoid of `Q^n ∩ H` in subspace coordinates: the polar of the Löwner
/// ellipsoid of `◊^n | H`, whose vertices are the projected basis vectors.
pub fn john_of_cube_section(subspace: &Subspace, eps: f64) -> Result<Ellipsoid> {
    let frame = project_standard_basis(subspace);
    let lowner = lowner_symmetric(frame.vectors(), eps)?;
    polar_ellipsoid(&lowner.ellipsoid)
}

/// Löwner ellipsoid of `◊^n | H` in subspace coordinates.
pub fn lowner_of_cross_projection(subspace: &Subspace, eps: f64) -> Result<LownerSolution> {
    lowner_symmetric(project_standard_basis(subspace).vectors(), eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringReport {
    /// Every `v_i` satisfies `<A v_i, v_i> <= 1 + tol`.
    pub covers: bool,
    /// `vol(E) / vol(unit ball)`.
    pub ratio: f64,
    /// `(k/n)^{k/2}`.
    pub bound: f64,
    /// Every `|v_i|²` is within `tol` of `k/n`.
    pub equality_profile: bool,
    /// `ratio >= bound - tol`, required whenever `covers` holds.
    pub bound_holds: bool,
}

/// Compares a covering ellipsoid of a unit decomposition with the lower bound
/// `(k/n)^{k/2}` on its volume ratio.
pub fn check_covering_bound(frame: &FrameSet, e: &Ellipsoid, tol: f64) -> CoveringReport {
    let (n, k) = (frame.n() as f64, frame.k() as f64);
    let covers = frame
        .vectors()
        .iter()
        .all(|v| e.gauge_squared(v) <= 1.0 + tol);
    let ratio = e.volume_ratio();
    let bound = (k / n).powf(k / 2.0);
    let equality_profile = frame
        .squared_norms()
        .iter()
        .all(|c| (c - k / n).abs() <= tol);
    CoveringReport {
        covers,
        ratio,
        bound,
        equality_profile,
        bound_holds: !covers || ratio >= bound - tol,
    }
}
