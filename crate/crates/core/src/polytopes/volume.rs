//! Exact volume by central triangulation, and a Monte Carlo estimate for
//! cross-checking and for bodies beyond the exact range.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::vertices::TAU_INCIDENCE;
use super::Polytope;
use crate::ellipsoids::{ellipsoid_volume, lowner_symmetric, Ellipsoid};
use crate::error::{Error, Result};
use crate::linalg::{dot, factorial};
use crate::seed;
use crate::tolerances::{K_EXACT, N_EXACT};

/// Exact volume for `k <= K_EXACT` and at most `N_EXACT` representatives.
///
/// Every facet is triangulated by pulling its lowest-indexed vertex (faces of a
/// face are the inclusion-maximal proper intersections with the other facets),
/// and each `(k-1)`-simplex is coned to the origin.
pub fn volume(p: &Polytope) -> Result<f64> {
    let k = p.k;
    let m = p.vrep.as_ref().or(p.hrep.as_ref()).map_or(0, Vec::len);
    if k > K_EXACT || m > N_EXACT {
        return Err(Error::UnsupportedDimension {
            k,
            m,
            max_k: K_EXACT,
            max_m: N_EXACT,
        });
    }
    let half_vertices = p.vertices()?;
    let half_facets = p.facets()?;
    let vertices: Vec<Vec<f64>> = half_vertices
        .iter()
        .cloned()
        .chain(half_vertices.iter().map(|v| v.iter().map(|x| -x).collect()))
        .collect();
    let facets: Vec<Vec<f64>> = half_facets
        .iter()
        .cloned()
        .chain(half_facets.iter().map(|v| v.iter().map(|x| -x).collect()))
        .collect();
    let incidence: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| {
            (0..vertices.len())
                .filter(|&i| (dot(f, &vertices[i]) - 1.0).abs() <= TAU_INCIDENCE)
                .collect()
        })
        .collect();

    let mut total = 0.0;
    for face in &incidence {
        for simplex in triangulate(face, k - 1, &incidence) {
            let m = DMatrix::from_fn(k, k, |r, c| vertices[simplex[c]][r]);
            total += m.determinant().abs();
        }
    }
    Ok(total / factorial(k))
}

fn intersect(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.len() <= b.len() && intersect(a, b).len() == a.len()
}

/// Pulling triangulation of a `dim`-dimensional face given as a sorted vertex
/// index list; returns simplices as `dim + 1` vertex indices.
fn triangulate(face: &[usize], dim: usize, facets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let Some(&apex) = face.first() else {
        return Vec::new();
    };
    if dim == 0 {
        return vec![vec![apex]];
    }
    let mut proper: Vec<Vec<usize>> = Vec::new();
    for f in facets {
        let t = intersect(face, f);
        if !t.is_empty() && t.len() < face.len() && !proper.contains(&t) {
            proper.push(t);
        }
    }
    let maximal: Vec<&Vec<usize>> = proper
        .iter()
        .filter(|t| !proper.iter().any(|s| s.len() > t.len() && is_subset(t, s)))
        .collect();
    let mut out = Vec::new();
    for sub in maximal.into_iter().filter(|t| !t.contains(&apex)) {
        for mut s in triangulate(sub, dim - 1, facets) {
            s.push(apex);
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
    pub hits: usize,
}

const BLOCK: usize = 8192;

/// Hit-or-miss estimate sampling uniformly from an enclosing ellipsoid.
///
/// The ellipsoid is the Löwner ellipsoid of the vertex set, scaled so that it
/// contains every vertex. Samples are drawn in fixed blocks, each from its own
/// stream seeded by `(seed, block index)`, so the result does not depend on
/// thread scheduling.
pub fn estimate_volume(p: &Polytope, samples: usize, seed: u64) -> Result<VolumeEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let k = p.k;
    let vertices = p.vertices()?;
    let lowner = lowner_symmetric(&vertices, 1e-7)?;
    let enclosing = Ellipsoid::new(lowner.ellipsoid.matrix() / lowner.max_level().max(1.0))?;
    let vol_e = ellipsoid_volume(&enclosing);
    let lt = Cholesky::new(enclosing.matrix().clone())
        .ok_or(Error::NotPositiveDefinite)?
        .l()
        .transpose();

    let blocks = samples.div_ceil(BLOCK);
    let hits = (0..blocks)
        .into_par_iter()
        .map(|b| -> Result<usize> {
            let size = BLOCK.min(samples - b * BLOCK);
            let mut rng = seed::rng(seed::stream_seed(seed, b as u64));
            let mut hits = 0;
            for _ in 0..size {
                let z = uniform_in_ball(&mut rng, k);
                let x = lt
                    .solve_upper_triangular(&z)
                    .expect("Cholesky factor is nonsingular");
                if p.contains(x.as_slice(), 0.0)? {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum::<usize>();

    let frac = hits as f64 / samples as f64;
    Ok(VolumeEstimate {
        estimate: frac * vol_e,
        std_error: (frac * (1.0 - frac) / samples as f64).sqrt() * vol_e,
        samples,
        hits,
    })
}

fn uniform_in_ball<R: Rng>(rng: &mut R, k: usize) -> DVector<f64> {
    loop {
        let g = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let n = g.norm();
        if n > 0.0 {
            let r = rng.random::<f64>().powf(1.0 / k as f64);
            return g * (r / n);
        }
    }
}
