//! Dense simplex method for `max <c, y>` subject to `|<g_i, y>| <= 1`.
//!
//! The origin is feasible, so the slack basis is a feasible start and a single
//! phase suffices. Free variables are split as `y = y⁺ − y⁻`. Bland's rule keeps
//! the method finite on the heavily degenerate instances produced by repeated
//! functionals.

use crate::error::{Error, Result};
use crate::linalg::rank;

const PIVOT_TOL: f64 = 1e-12;

/// Optimal value and maximizer of `max <c, y>` over `{y : |<g_i, y>| <= 1}`.
pub fn maximize_over_slab_intersection(
    c: &[f64],
    functionals: &[Vec<f64>],
) -> Result<(f64, Vec<f64>)> {
    let k = c.len();
    let rows: Vec<&Vec<f64>> = functionals
        .iter()
        .filter(|g| g.iter().any(|x| *x != 0.0))
        .collect();
    if rows.is_empty() {
        return if c.iter().all(|x| *x == 0.0) {
            Ok((0.0, vec![0.0; k]))
        } else {
            Err(Error::Unbounded { rank: 0, dim: k })
        };
    }

    // constraints: +g·y ≤ 1 and −g·y ≤ 1; columns: y⁺ (k), y⁻ (k), slacks (2m)
    let m = 2 * rows.len();
    let cols = 2 * k + m;
    let mut t = vec![vec![0.0; cols + 1]; m];
    for (r, g) in rows.iter().enumerate() {
        for (sign, row) in [(1.0, 2 * r), (-1.0, 2 * r + 1)] {
            for j in 0..k {
                t[row][j] = sign * g[j];
                t[row][k + j] = -sign * g[j];
            }
            t[row][2 * k + row] = 1.0;
            t[row][cols] = 1.0;
        }
    }
    // reduced costs for maximization: entering candidates have positive cost
    let mut cost = vec![0.0; cols + 1];
    for j in 0..k {
        cost[j] = c[j];
        cost[k + j] = -c[j];
    }
    let mut basis: Vec<usize> = (0..m).map(|r| 2 * k + r).collect();

    let max_pivots = 50 * (m + cols);
    for _ in 0..max_pivots {
        let Some(enter) = (0..cols).find(|&j| cost[j] > PIVOT_TOL) else {
            let mut y = vec![0.0; k];
            for (r, &b) in basis.iter().enumerate() {
                if b < k {
                    y[b] += t[r][cols];
                } else if b < 2 * k {
                    y[b - k] -= t[r][cols];
                }
            }
            return Ok((-cost[cols], y));
        };
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            if t[r][enter] > PIVOT_TOL {
                let ratio = t[r][cols] / t[r][enter];
                let better = match leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < best - 1e-15 || (ratio <= best + 1e-15 && basis[r] < basis[lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            let r = rank(
                &rows.iter().map(|g| (*g).clone()).collect::<Vec<_>>(),
                1e-12,
            );
            return Err(Error::Unbounded { rank: r, dim: k });
        };
        pivot(&mut t, &mut cost, pr, enter);
        basis[pr] = enter;
    }
    Err(Error::NotConverged {
        iterations: max_pivots,
        gap: f64::NAN,
    })
}

fn pivot(t: &mut [Vec<f64>], cost: &mut [f64], pr: usize, pc: usize) {
    let p = t[pr][pc];
    t[pr].iter_mut().for_each(|x| *x /= p);
    let prow = t[pr].clone();
    for (r, row) in t.iter_mut().enumerate() {
        if r != pr {
            let f = row[pc];
            if f != 0.0 {
                row.iter_mut().zip(&prow).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    let f = cost[pc];
    cost.iter_mut().zip(&prow).for_each(|(x, y)| *x -= f * y);
}
