//! Vertex enumeration for `{y : |<g_i, y>| <= 1}` and the incidence tests built
//! on it.
//!
//! Vertices are the feasible solutions of `k` independent active constraints.
//! Because the bodies are symmetric, the facets of `conv{±w_i}` are the vertices
//! of the polar `{z : |<w_i, z>| <= 1}`, so the same enumeration yields both
//! representations.

use nalgebra::{DMatrix, DVector};

use super::{collapse_pairs, same_up_to_sign, Polytope};
use crate::error::{Error, Result};
use crate::linalg::{dot, rank, solve};
use crate::tolerances::TAU_GEO;

/// Incidence tolerance: `<g, y>` within this of 1 counts as active.
pub(crate) const TAU_INCIDENCE: f64 = 1e-8;

/// Fills in the vertex representation of an H-represented polytope.
pub fn enumerate_vertices(p: &Polytope) -> Result<Polytope> {
    if p.vrep.is_some() {
        return Ok(p.clone());
    }
    let h = p.hrep.as_ref().expect("one representation is present");
    let vertices = vertices_of_functionals(p.k, h)?;
    Ok(Polytope {
        k: p.k,
        vrep: Some(vertices),
        hrep: p.hrep.clone(),
        multiplicity: p.multiplicity.clone(),
    })
}

/// Vertex representatives of `{y : |<g_i, y>| <= 1}`.
pub(crate) fn vertices_of_functionals(k: usize, functionals: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let g = collapse_pairs(functionals, TAU_GEO).representatives;
    let r = if g.is_empty() { 0 } else { rank(&g, 1e-10) };
    if r < k {
        return Err(Error::Unbounded { rank: r, dim: k });
    }
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let a = DMatrix::from_fn(k, k, |r, c| g[subset[r]][c]);
        // the first sign is fixed; the opposite pattern gives the negated vertex
        for pattern in 0..(1usize << (k - 1)) {
            let rhs = DVector::from_fn(k, |r, _| {
                if r > 0 && pattern & (1 << (r - 1)) != 0 {
                    -1.0
                } else {
                    1.0
                }
            });
            let Some(y) = solve(&a, &rhs, 1e-10) else {
                break;
            };
            let y: Vec<f64> = y.iter().copied().collect();
            let feasible = g.iter().all(|gi| dot(gi, &y).abs() <= 1.0 + TAU_GEO);
            if feasible && !found.iter().any(|v| same_up_to_sign(v, &y, TAU_GEO)) {
                found.push(y);
            }
        }
        if !next_combination(&mut subset, g.len()) {
            break;
        }
    }
    Ok(found)
}

/// Advances `subset` to the next `|subset|`-combination of `0..n` in
/// lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let Some(i) = (0..k).rev().find(|&i| subset[i] < n - k + i) else {
        return false;
    };
    subset[i] += 1;
    for j in i + 1..k {
        subset[j] = subset[j - 1] + 1;
    }
    true
}

/// Facet functionals of `conv{±w_i}`: the vertices of its polar.
pub fn facets_of_vertices(k: usize, vertices: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    vertices_of_functionals(k, vertices).map_err(|e| match e {
        Error::Unbounded { .. } => Error::OriginNotInterior,
        e => e,
    })
}

/// Indices of the candidates that are extreme points of `conv{±c_i}`.
pub fn reduce_to_extreme(k: usize, candidates: &[Vec<f64>]) -> Result<Vec<usize>> {
    let facets = facets_of_vertices(k, candidates).map_err(|e| match e {
        Error::OriginNotInterior => Error::Degenerate(
            "generators do not span the space; the body is not full-dimensional".into(),
        ),
        e => e,
    })?;
    Ok(extreme_given_facets(k, candidates, &facets))
}

/// Candidates `c` whose active set `{w : |<w, c>| = 1}` among `others` has full
/// rank. With `others` the facet functionals of a body this selects its
/// vertices; with `others` its vertices it selects its facet functionals.
pub(crate) fn extreme_given_facets(
    k: usize,
    candidates: &[Vec<f64>],
    others: &[Vec<f64>],
) -> Vec<usize> {
    candidates
        .iter()
        .enumerate()
        .filter(|(_, c)| {
            let active: Vec<Vec<f64>> = others
                .iter()
                .filter(|w| (dot(w, c).abs() - 1.0).abs() <= TAU_INCIDENCE)
                .cloned()
                .collect();
            !active.is_empty() && rank(&active, 1e-8) == k
        })
        .map(|(i, _)| i)
        .collect()
}

/// The functionals among `h` that define facets of the body with vertices `vertices`.
pub(crate) fn irredundant_functionals(
    k: usize,
    h: &[Vec<f64>],
    vertices: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    Ok(extreme_given_facets(k, h, vertices)
        .into_iter()
        .map(|i| h[i].clone())
        .collect())
}
