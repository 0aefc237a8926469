//! Small dense linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

/// Largest absolute entry of `m - I`.
pub fn deviation_from_identity(m: &DMatrix<f64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((m[(i, j)] - target).abs());
        }
    }
    dev
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Numerical rank of a set of vectors (rows), by Gram–Schmidt with pivoting
/// on the largest residual. `rel_tol` is relative to the largest input norm.
pub fn rank(vectors: &[Vec<f64>], rel_tol: f64) -> usize {
    let scale = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0;
    }
    let mut residuals: Vec<Vec<f64>> = vectors.to_vec();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    while let Some((best, best_norm)) = residuals
        .iter()
        .enumerate()
        .map(|(i, r)| (i, norm(r)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if best_norm <= rel_tol * scale {
            break;
        }
        let q: Vec<f64> = residuals[best].iter().map(|x| x / best_norm).collect();
        for r in residuals.iter_mut() {
            // two passes keep the residuals orthogonal to `q` in floating point
            for _ in 0..2 {
                let c = dot(r, &q);
                r.iter_mut().zip(&q).for_each(|(x, y)| *x -= c * y);
            }
        }
        basis.push(q);
        if basis.len() == vectors[0].len() {
            break;
        }
    }
    basis.len()
}

/// Removes from `v` its components along the orthonormal rows in `basis`,
/// with one re-orthogonalization pass.
pub fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(v, b);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Solves the square system `a x = b` by LU with partial pivoting. Returns `None`
/// when the smallest pivot is below `rel_tol` times the largest entry of `a`.
pub fn solve(a: &DMatrix<f64>, b: &DVector<f64>, rel_tol: f64) -> Option<DVector<f64>> {
    let scale = a.amax();
    if scale == 0.0 {
        return None;
    }
    let lu = a.clone().lu();
    let u = lu.u();
    let min_pivot = (0..u.nrows())
        .map(|i| u[(i, i)].abs())
        .fold(f64::INFINITY, f64::min);
    if min_pivot <= rel_tol * scale {
        return None;
    }
    lu.solve(b)
}

/// Volume of the Euclidean unit ball in `R^k`: `π^{k/2} / Γ(k/2 + 1)`.
pub fn unit_ball_volume(k: usize) -> f64 {
    // V_0 = 1, V_1 = 2, V_k = (2π / k) V_{k-2}
    let mut even = 1.0;
    let mut odd = 2.0;
    for d in 2..=k {
        if d % 2 == 0 {
            even *= 2.0 * std::f64::consts::PI / d as f64;
        } else {
            odd *= 2.0 * std::f64::consts::PI / d as f64;
        }
    }
    if k.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn vectors_to_rows(vectors: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(vectors.len(), cols, |i, j| vectors[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gamma_ball(k: usize) -> f64 {
        // Γ(k/2 + 1) from Γ(1) = 1 and Γ(1/2) = √π
        let mut g = if k.is_multiple_of(2) {
            1.0
        } else {
            PI.sqrt() / 2.0
        };
        let mut x = if k.is_multiple_of(2) { 1.0 } else { 1.5 };
        while x < k as f64 / 2.0 + 1.0 - 1e-9 {
            g *= x;
            x += 1.0;
        }
        PI.powf(k as f64 / 2.0) / g
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        for k in 0..12 {
            let v = unit_ball_volume(k);
            assert!((v - gamma_ball(k)).abs() < 1e-12 * v, "k = {k}");
        }
    }

    #[test]
    fn rank_of_dependent_rows() {
        let rows = vec![
            vec![1.0, 0.0, 1.0],
            vec![2.0, 0.0, 2.0],
            vec![0.0, 1.0, 0.0],
        ];
        assert_eq!(rank(&rows, 1e-10), 2);
        assert_eq!(rank(&[vec![0.0, 0.0]], 1e-10), 0);
    }

    #[test]
    fn singular_solve_is_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(solve(&a, &b, 1e-12).is_none());
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = solve(&a, &b, 1e-12).unwrap();
        assert_eq!(x.as_slice(), &[0.5, 0.25]);
    }
}
