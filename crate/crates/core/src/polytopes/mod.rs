//! Origin-symmetric polytopes in subspace coordinates.
//!
//! A body is carried by one representative per `±` pair, either as vertices
//! (`conv{±w_i}`) or as functionals (`{y : |<g_i, y>| <= 1}`), or both. For a
//! projected basis `v_i = P e_i`, the functionals `v_i` describe the cube section
//! `Q^n ∩ H` and the vertices `±v_i` span the cross-polytope projection `◊^n | H`;
//! the two are polar to each other.

mod lp;
mod vertices;
mod volume;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{certify_unit_decomposition, FrameSet, Subspace};
use crate::linalg::{dot, norm, rank};
use crate::tolerances::{TAU_CERT, TAU_GEO};

pub use lp::maximize_over_slab_intersection;
pub use vertices::{enumerate_vertices, facets_of_vertices, reduce_to_extreme};
pub use volume::{estimate_volume, volume, VolumeEstimate};

/// Origin-symmetric polytope in `R^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolytope")]
pub struct Polytope {
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    vrep: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hrep: Option<Vec<Vec<f64>>>,
    /// How many input vectors collapsed onto each representative of the
    /// primary representation, when it was built from a frame.
    #[serde(skip)]
    multiplicity: Option<Vec<usize>>,
}

#[derive(Deserialize)]
struct RawPolytope {
    k: usize,
    vrep: Option<Vec<Vec<f64>>>,
    hrep: Option<Vec<Vec<f64>>>,
}

impl TryFrom<RawPolytope> for Polytope {
    type Error = Error;

    fn try_from(raw: RawPolytope) -> Result<Self> {
        if raw.vrep.is_none() && raw.hrep.is_none() {
            return Err(Error::InvalidInput(
                "polytope needs a vrep or an hrep".into(),
            ));
        }
        for list in [&raw.vrep, &raw.hrep].into_iter().flatten() {
            check_vectors(raw.k, list)?;
        }
        Ok(Polytope {
            k: raw.k,
            vrep: raw.vrep,
            hrep: raw.hrep,
            multiplicity: None,
        })
    }
}

fn check_vectors(k: usize, list: &[Vec<f64>]) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidInput(
            "polytope dimension must be positive".into(),
        ));
    }
    for (i, v) in list.iter().enumerate() {
        if v.len() != k {
            return Err(Error::Dimension {
                what: format!("polytope vector {i}"),
                expected: k,
                found: v.len(),
            });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "polytope vector {i} is not finite"
            )));
        }
    }
    Ok(())
}

/// Representatives of `±` classes with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedPairs {
    pub representatives: Vec<Vec<f64>>,
    pub multiplicity: Vec<usize>,
}

pub(crate) fn same_up_to_sign(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = tol * norm(a).max(norm(b)).max(1.0);
    let plus = a.iter().zip(b).all(|(x, y)| (x - y).abs() <= scale);
    plus || a.iter().zip(b).all(|(x, y)| (x + y).abs() <= scale)
}

/// Drops zero vectors and merges vectors equal up to sign (within `tol`).
pub fn collapse_pairs(vectors: &[Vec<f64>], tol: f64) -> CollapsedPairs {
    let mut representatives: Vec<Vec<f64>> = Vec::new();
    let mut multiplicity = Vec::new();
    for v in vectors.iter().filter(|v| norm(v) > 0.0) {
        match representatives
            .iter()
            .position(|r| same_up_to_sign(r, v, tol))
        {
            Some(i) => multiplicity[i] += 1,
            None => {
                representatives.push(v.clone());
                multiplicity.push(1);
            }
        }
    }
    CollapsedPairs {
        representatives,
        multiplicity,
    }
}

impl Polytope {
    /// `conv{±w_i}`, reduced to its extreme points.
    pub fn from_vertices(k: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        check_vectors(k, &vertices)?;
        let collapsed = collapse_pairs(&vertices, TAU_GEO);
        if collapsed.representatives.is_empty() {
            return Err(Error::Degenerate("all generators are zero".into()));
        }
        let extreme = reduce_to_extreme(k, &collapsed.representatives)?;
        let multiplicity = extreme.iter().map(|&i| collapsed.multiplicity[i]).collect();
        Ok(Self {
            k,
            vrep: Some(
                extreme
                    .iter()
                    .map(|&i| collapsed.representatives[i].clone())
                    .collect(),
            ),
            hrep: None,
            multiplicity: Some(multiplicity),
        })
    }

    /// `{y : |<g_i, y>| <= 1}`; zero functionals are dropped and repeated ones merged.
    pub fn from_functionals(k: usize, functionals: Vec<Vec<f64>>) -> Result<Self> {
        check_vectors(k, &functionals)?;
        let collapsed = collapse_pairs(&functionals, TAU_GEO);
        Ok(Self {
            k,
            vrep: None,
            hrep: Some(collapsed.representatives),
            multiplicity: Some(collapsed.multiplicity),
        })
    }

    /// The cube `[-1, 1]^k`.
    pub fn cube(k: usize) -> Self {
        Self {
            k,
            vrep: None,
            hrep: Some(FrameSet::standard_basis(k).vectors().to_vec()),
            multiplicity: None,
        }
    }

    /// The cross-polytope `◊^k`.
    pub fn cross_polytope(k: usize) -> Self {
        Self {
            k,
            vrep: Some(FrameSet::standard_basis(k).vectors().to_vec()),
            hrep: None,
            multiplicity: None,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vrep(&self) -> Option<&[Vec<f64>]> {
        self.vrep.as_deref()
    }

    pub fn hrep(&self) -> Option<&[Vec<f64>]> {
        self.hrep.as_deref()
    }

    pub fn multiplicity(&self) -> Option<&[usize]> {
        self.multiplicity.as_deref()
    }

    /// The dilate `c · P` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        let scale = |list: &Option<Vec<Vec<f64>>>, f: f64| {
            list.as_ref().map(|l| {
                l.iter()
                    .map(|v| v.iter().map(|x| x * f).collect())
                    .collect()
            })
        };
        Self {
            k: self.k,
            vrep: scale(&self.vrep, c),
            hrep: scale(&self.hrep, 1.0 / c),
            multiplicity: self.multiplicity.clone(),
        }
    }

    /// Vertex representatives, enumerating them from the functionals if needed.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        match &self.vrep {
            Some(v) => Ok(v.clone()),
            None => Ok(enumerate_vertices(self)?
                .vrep
                .expect("enumeration fills the vrep")),
        }
    }

    /// Irredundant functional representatives (one per facet pair).
    pub fn facets(&self) -> Result<Vec<Vec<f64>>> {
        let vertices = self.vertices()?;
        match &self.hrep {
            Some(h) => vertices::irredundant_functionals(self.k, h, &vertices),
            None => facets_of_vertices(self.k, &vertices),
        }
    }

    /// Whether `y` lies in the body, up to `tol` on the gauge.
    pub fn contains(&self, y: &[f64], tol: f64) -> Result<bool> {
        Ok(self.gauge(y)? <= 1.0 + tol)
    }

    /// The gauge `‖y‖_P = min{t >= 0 : y ∈ tP}`. Functionals give it directly;
    /// for vertices it is the optimal value of `min Σ|λ_i|` over `Σ λ_i w_i = y`,
    /// obtained from the dual program `max <y, z>` over `{|<w_i, z>| <= 1}`.
    pub fn gauge(&self, y: &[f64]) -> Result<f64> {
        if let Some(h) = &self.hrep {
            return Ok(h.iter().map(|g| dot(g, y).abs()).fold(0.0, f64::max));
        }
        let v = self.vrep.as_ref().expect("one representation is present");
        Ok(maximize_over_slab_intersection(y, v)?.0)
    }
}

/// `{y : |<v_i, y>| <= 1}`, the cube section `Q^n ∩ H` in subspace coordinates
/// when the frame is a projected basis.
pub fn polytope_from_frame(frame: &FrameSet) -> Result<Polytope> {
    require_certified(frame)?;
    Polytope::from_functionals(frame.k(), frame.vectors().to_vec())
}

/// `conv{±v_i}`, the cross-polytope projection `◊^n | H` in subspace coordinates.
pub fn cross_projection(frame: &FrameSet) -> Result<Polytope> {
    require_certified(frame)?;
    Polytope::from_vertices(frame.k(), frame.vectors().to_vec())
}

fn require_certified(frame: &FrameSet) -> Result<()> {
    let report = certify_unit_decomposition(frame, TAU_CERT);
    if !report.certified {
        return Err(Error::NotUnitDecomposition {
            deviation: report.deviation,
            tol: TAU_CERT,
        });
    }
    Ok(())
}

/// `h_P(u) = max_{y ∈ P} <u, y>`.
pub fn support_function(p: &Polytope, direction: &[f64]) -> Result<f64> {
    if direction.len() != p.k {
        return Err(Error::Dimension {
            what: "direction".into(),
            expected: p.k,
            found: direction.len(),
        });
    }
    if let Some(v) = &p.vrep {
        return Ok(v
            .iter()
            .map(|w| dot(w, direction).abs())
            .fold(0.0, f64::max));
    }
    let h = p.hrep.as_ref().expect("one representation is present");
    Ok(maximize_over_slab_intersection(direction, h)?.0)
}

/// The polar body: vertices become functionals and functionals become vertices
/// (reduced to extreme points).
pub fn polar(p: &Polytope) -> Result<Polytope> {
    let k = p.k;
    if let Some(v) = &p.vrep {
        let r = rank(v, 1e-10);
        if r < k {
            return Err(Error::OriginNotInterior);
        }
    }
    if let Some(h) = &p.hrep {
        let r = rank(h, 1e-10);
        if r < k {
            return Err(Error::Unbounded { rank: r, dim: k });
        }
    }
    let hrep = p.vrep.clone();
    let vrep = match &p.hrep {
        Some(h) => {
            let idx = match &p.vrep {
                Some(facets) => vertices::extreme_given_facets(k, h, facets),
                None => reduce_to_extreme(k, h)?,
            };
            Some(idx.into_iter().map(|i| h[i].clone()).collect())
        }
        None => None,
    };
    Ok(Polytope {
        k,
        vrep,
        hrep,
        multiplicity: None,
    })
}

/// The subspace cut out by `x_{(n/k) j + i1} = x_{(n/k) j + i2}`: row `j` is
/// `√(k/n)` on the `j`-th block of `n/k` consecutive coordinates.
pub fn equality_subspace(n: usize, k: usize) -> Result<Subspace> {
    if k == 0 || k > n || !n.is_multiple_of(k) {
        return Err(Error::InvalidInput(format!(
            "the equality subspace needs k | n, got n = {n}, k = {k}"
        )));
    }
    let block = n / k;
    let value = (k as f64 / n as f64).sqrt();
    let basis = (0..k)
        .map(|j| {
            (0..n)
                .map(|c| if c / block == j { value } else { 0.0 })
                .collect()
        })
        .collect();
    Subspace::new(n, basis)
}
