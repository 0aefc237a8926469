//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use lowner_john::experiments::random_subspace;
use lowner_john::frames::project_standard_basis;
use lowner_john::FrameSet;

/// Smallest area found by brute force over origin-centered ellipses
/// `{x'²/a² + y'²/b² <= 1}` rotated by `θ`, covering `±p` for all points.
///
/// `θ` and `a` are gridded; for each `(θ, a)` the smallest feasible `b` is
/// `max_i |y'_i| / sqrt(1 - x'_i²/a²)`, which is exact along the `b` axis.
/// A coarse global pass is followed by refinement at relative resolution
/// `resolution` around the coarse optimum and around `hint` (θ, a).
pub fn grid_min_ellipse_area(points: &[Vec<f64>], resolution: f64, hint: (f64, f64)) -> f64 {
    let rmax = points.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    let area_at = |theta: f64, a: f64| -> f64 {
        let (s, c) = theta.sin_cos();
        let mut b = 0.0f64;
        for p in points {
            let x = c * p[0] + s * p[1];
            let y = -s * p[0] + c * p[1];
            let rest = 1.0 - (x / a).powi(2);
            if rest <= 0.0 {
                return f64::INFINITY;
            }
            b = b.max(y.abs() / rest.sqrt());
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        PI * a * b
    };

    // coarse: θ every 0.5°, a on a 1% geometric grid up to 20 · rmax
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for ti in 0..360 {
        let theta = ti as f64 * PI / 360.0;
        let mut a = rmax * 1e-3;
        while a < 20.0 * rmax {
            let area = area_at(theta, a);
            if area < best.0 {
                best = (area, theta, a);
            }
            a *= 1.01;
        }
    }
    let mut min_area = best.0;
    for (theta0, a0) in [(best.1, best.2), hint] {
        // ±2% in a and ±0.02π in θ at the requested resolution
        let steps = (0.02 / resolution).ceil() as i64;
        for ti in -steps..=steps {
            let theta = theta0 + ti as f64 * resolution * PI;
            for ai in -steps..=steps {
                let a = a0 * (1.0 + ai as f64 * resolution);
                if a > 0.0 {
                    min_area = min_area.min(area_at(theta, a));
                }
            }
        }
    }
    min_area
}

/// A projected standard basis of a Haar-random subspace.
pub fn random_frame(n: usize, k: usize, seed: u64) -> FrameSet {
    project_standard_basis(&random_subspace(n, k, seed).unwrap())
}

/// Largest `|v|` among the points.
pub fn max_norm(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

pub fn unit_vector(k: usize, raw: &[f64]) -> Vec<f64> {
    let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    raw[..k].iter().map(|x| x / n).collect()
}
