//! Candidate unit decompositions and the four equivalent ways of certifying them:
//! the frame identity `Σ v_i v_iᵀ = I_k`, projection of an orthonormal basis,
//! Gram matrix as an orthogonal projection, and completion to an orthogonal
//! matrix.
//!
//! Frame vectors are stored in the coordinates of the `k`-dimensional space they
//! live in; the ambient embedding, when there is one, is carried by [`Subspace`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{deviation_from_identity, dot, norm, orthogonalize_against};
use crate::tolerances::TAU_ORTH;

/// `n` vectors in `R^k`, a candidate unit decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFrame")]
pub struct FrameSet {
    n: usize,
    k: usize,
    vectors: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawFrame {
    n: usize,
    k: usize,
    vectors: Vec<Vec<f64>>,
}

impl TryFrom<RawFrame> for FrameSet {
    type Error = Error;

    fn try_from(raw: RawFrame) -> Result<Self> {
        if raw.vectors.len() != raw.n {
            return Err(Error::Dimension {
                what: "frame vector list".into(),
                expected: raw.n,
                found: raw.vectors.len(),
            });
        }
        FrameSet::new(raw.k, raw.vectors)
    }
}

impl FrameSet {
    /// Builds a frame of `vectors.len()` vectors in `R^k`.
    pub fn new(k: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let n = vectors.len();
        if k == 0 || n < k {
            return Err(Error::InvalidInput(format!(
                "a frame needs n >= k >= 1, got n = {n}, k = {k}"
            )));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != k {
                return Err(Error::Dimension {
                    what: format!("frame vector {i}"),
                    expected: k,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "frame vector {i} has a non-finite coordinate"
                )));
            }
        }
        Ok(Self { n, k, vectors })
    }

    /// The columns of a `k × n` matrix.
    pub fn from_matrix(a: &DMatrix<f64>) -> Result<Self> {
        let vectors = (0..a.ncols())
            .map(|j| a.column(j).iter().copied().collect())
            .collect();
        Self::new(a.nrows(), vectors)
    }

    /// The standard basis `e_1, …, e_k` of `R^k`.
    pub fn standard_basis(k: usize) -> Self {
        let vectors = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { n: k, k, vectors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// The `k × n` matrix `A = [v_1 … v_n]`.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.n, |r, c| self.vectors[c][r])
    }

    /// The frame operator `Σ v_i v_iᵀ`.
    pub fn frame_operator(&self) -> DMatrix<f64> {
        let a = self.matrix();
        &a * a.transpose()
    }

    /// Squared norms `|v_i|²`.
    pub fn squared_norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| dot(v, v)).collect()
    }
}

/// A `k`-dimensional subspace of `R^n` given by `k` orthonormal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSubspace")]
pub struct Subspace {
    n: usize,
    k: usize,
    basis: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawSubspace {
    n: usize,
    k: usize,
    basis: Vec<Vec<f64>>,
}

impl TryFrom<RawSubspace> for Subspace {
    type Error = Error;

    fn try_from(raw: RawSubspace) -> Result<Self> {
        if raw.basis.len() != raw.k {
            return Err(Error::Dimension {
                what: "subspace basis".into(),
                expected: raw.k,
                found: raw.basis.len(),
            });
        }
        Subspace::new(raw.n, raw.basis)
    }
}

impl Subspace {
    /// Validates orthonormality at the default tolerance [`TAU_ORTH`].
    pub fn new(n: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tolerance(n, basis, TAU_ORTH)
    }

    pub fn with_tolerance(n: usize, basis: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let k = basis.len();
        if k == 0 || k > n {
            return Err(Error::InvalidInput(format!(
                "a subspace needs 1 <= k <= n, got n = {n}, k = {k}"
            )));
        }
        for (i, row) in basis.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension {
                    what: format!("basis row {i}"),
                    expected: n,
                    found: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "basis row {i} has a non-finite coordinate"
                )));
            }
        }
        check_orthonormal(&basis, tol)?;
        Ok(Self { n, k, basis })
    }

    /// The span of the first `k` coordinate axes.
    pub fn coordinate(n: usize, k: usize) -> Result<Self> {
        let basis = (0..k)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(n, basis)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// The `k × n` basis matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.k, self.n, |r, c| self.basis[r][c])
    }

    /// Embeds subspace coordinates `y ∈ R^k` into `R^n`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (coef, row) in y.iter().zip(&self.basis) {
            x.iter_mut().zip(row).for_each(|(xi, bi)| *xi += coef * bi);
        }
        x
    }
}

fn check_orthonormal(rows: &[Vec<f64>], tol: f64) -> Result<()> {
    for i in 0..rows.len() {
        for j in i..rows.len() {
            let target = if i == j { 1.0 } else { 0.0 };
            let deviation = (dot(&rows[i], &rows[j]) - target).abs();
            if deviation > tol {
                return Err(Error::NotOrthonormal {
                    row_a: i,
                    row_b: j,
                    deviation,
                });
            }
        }
    }
    Ok(())
}

/// Symmetric `n × n` Gram matrix `Γ_ij = <v_i, v_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: DMatrix<f64>,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.entries.diagonal().iter().copied().collect()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// Wraps a matrix, symmetrizing it from its upper triangle.
    pub fn from_upper(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                what: "Gram matrix columns".into(),
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let mut entries = m;
        for i in 0..entries.nrows() {
            for j in 0..i {
                entries[(i, j)] = entries[(j, i)];
            }
        }
        Ok(Self { entries })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationReport {
    pub certified: bool,
    /// Largest absolute entry of `Σ v_i v_iᵀ - I_k`.
    pub deviation: f64,
    /// Smallest eigenvalue of the frame operator. The vectors span `R^k` iff this
    /// is positive, which certification implies whenever `k · deviation < 1`.
    pub min_frame_eigenvalue: f64,
}

/// Checks `Σ v_i v_iᵀ = I_k` entrywise within `tol`.
pub fn certify_unit_decomposition(frame: &FrameSet, tol: f64) -> CertificationReport {
    let s = frame.frame_operator();
    let deviation = deviation_from_identity(&s);
    let min_frame_eigenvalue = s.symmetric_eigenvalues().min();
    CertificationReport {
        certified: deviation <= tol,
        deviation,
        min_frame_eigenvalue,
    }
}

/// Projects `e_1, …, e_n` onto the subspace; `v_i` is column `i` of the basis
/// matrix, i.e. the coordinates of `P e_i` in the row basis.
pub fn project_standard_basis(subspace: &Subspace) -> FrameSet {
    let vectors = (0..subspace.n)
        .map(|i| subspace.basis.iter().map(|row| row[i]).collect())
        .collect();
    FrameSet {
        n: subspace.n,
        k: subspace.k,
        vectors,
    }
}

pub fn gram_matrix(frame: &FrameSet) -> GramMatrix {
    let n = frame.n;
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g = dot(&frame.vectors[i], &frame.vectors[j]);
            entries[(i, j)] = g;
            entries[(j, i)] = g;
        }
    }
    GramMatrix { entries }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    pub is_projection: bool,
    /// Largest absolute entry of `Γ² - Γ`.
    pub idempotency_deviation: f64,
    /// `|trace Γ - target_rank|`.
    pub trace_deviation: f64,
}

/// Tests whether `Γ` is an orthogonal projection of rank `target_rank`.
pub fn is_projection_matrix(gram: &GramMatrix, target_rank: usize, tol: f64) -> ProjectionReport {
    let g = &gram.entries;
    let sq = g * g;
    let idempotency_deviation = crate::linalg::max_abs_diff(&sq, g);
    let trace_deviation = (g.trace() - target_rank as f64).abs();
    ProjectionReport {
        is_projection: idempotency_deviation <= tol && trace_deviation <= tol,
        idempotency_deviation,
        trace_deviation,
    }
}

/// Extends the `k` rows of `A = [v_1 … v_n]` to an orthogonal `n × n` matrix.
///
/// The top `k × n` block of the result is `A` itself, bit for bit. The remaining
/// rows are canonical basis vectors orthogonalized against everything chosen so
/// far, picking at each step the candidate with the largest residual.
pub fn orthogonal_completion(frame: &FrameSet, tol: f64) -> Result<DMatrix<f64>> {
    let report = certify_unit_decomposition(frame, tol);
    if !report.certified {
        return Err(Error::NotUnitDecomposition {
            deviation: report.deviation,
            tol,
        });
    }
    let (n, k) = (frame.n, frame.k);
    let mut rows: Vec<Vec<f64>> = (0..k)
        .map(|r| frame.vectors.iter().map(|v| v[r]).collect())
        .collect();
    let mut used = vec![false; n];
    while rows.len() < n {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for (c, _) in used.iter().enumerate().filter(|(_, u)| !**u) {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            orthogonalize_against(&mut e, &rows);
            let r = norm(&e);
            if best.as_ref().is_none_or(|b| r > b.2) {
                best = Some((c, e, r));
            }
        }
        let (c, mut e, r) = best.expect("n - k candidates remain");
        // with n - k rows missing, some canonical vector has residual at least sqrt((n - k) / n)
        used[c] = true;
        e.iter_mut().for_each(|x| *x /= r);
        orthogonalize_against(&mut e, &rows);
        let r2 = norm(&e);
        e.iter_mut().for_each(|x| *x /= r2);
        rows.push(e);
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tolerances::TAU_CERT;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn diag_frame() -> FrameSet {
        FrameSet::new(1, vec![vec![FRAC_1_SQRT_2], vec![FRAC_1_SQRT_2]]).unwrap()
    }

    #[test]
    fn certify_examples() {
        let r = certify_unit_decomposition(&FrameSet::standard_basis(3), TAU_CERT);
        assert!(r.certified);
        assert_eq!(r.deviation, 0.0);

        let r = certify_unit_decomposition(&diag_frame(), TAU_CERT);
        assert!(r.certified);
        assert!(r.deviation < 1e-15);

        let ones = FrameSet::new(1, vec![vec![1.0], vec![1.0]]).unwrap();
        let r = certify_unit_decomposition(&ones, TAU_CERT);
        assert!(!r.certified);
        assert_eq!(r.deviation, 1.0);
    }

    #[test]
    fn structural_errors() {
        let err = FrameSet::new(2, vec![vec![1.0, 0.0], vec![0.0]]).unwrap_err();
        assert!(matches!(err, Error::Dimension { found: 1, .. }));
        assert!(FrameSet::new(3, vec![vec![1.0, 0.0, 0.0]]).is_err());
        assert!(FrameSet::new(1, vec![vec![f64::NAN]]).is_err());
        let json = r#"{"n": 3, "k": 1, "vectors": [[1.0], [0.0]]}"#;
        assert!(serde_json::from_str::<FrameSet>(json).is_err());
    }

    #[test]
    fn project_examples() {
        let h = Subspace::new(2, vec![vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]]).unwrap();
        let f = project_standard_basis(&h);
        assert_eq!(f.vectors(), &[vec![FRAC_1_SQRT_2], vec![FRAC_1_SQRT_2]]);

        let f = project_standard_basis(&Subspace::coordinate(5, 2).unwrap());
        assert_eq!(f.vectors()[0], vec![1.0, 0.0]);
        assert_eq!(f.vectors()[1], vec![0.0, 1.0]);
        for v in &f.vectors()[2..] {
            assert_eq!(v, &vec![0.0, 0.0]);
        }

        let h = Subspace::new(
            4,
            vec![
                vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0, 0.0],
                vec![0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            ],
        )
        .unwrap();
        let f = project_standard_basis(&h);
        assert_eq!(f.vectors()[0], vec![FRAC_1_SQRT_2, 0.0]);
        assert_eq!(f.vectors()[1], vec![FRAC_1_SQRT_2, 0.0]);
        assert_eq!(f.vectors()[2], vec![0.0, FRAC_1_SQRT_2]);
        assert_eq!(f.vectors()[3], vec![0.0, FRAC_1_SQRT_2]);
        assert!(certify_unit_decomposition(&f, 10.0 * TAU_ORTH).certified);
    }

    #[test]
    fn non_orthonormal_basis_names_rows() {
        let err = Subspace::new(3, vec![vec![1.0, 0.0, 0.0], vec![0.6, 0.8, 0.0]]).unwrap_err();
        match err {
            Error::NotOrthonormal { row_a, row_b, .. } => assert_eq!((row_a, row_b), (0, 1)),
            e => panic!("unexpected {e}"),
        }
        let err = Subspace::new(2, vec![vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(
            err,
            Error::NotOrthonormal {
                row_a: 0,
                row_b: 0,
                ..
            }
        ));
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&FrameSet::standard_basis(3));
        assert_eq!(g.entries(), &DMatrix::identity(3, 3));

        let g = gram_matrix(&diag_frame());
        for x in g.entries().iter() {
            assert!((x - 0.5).abs() < 1e-15);
        }

        let f = FrameSet::new(2, vec![vec![1.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let g = gram_matrix(&f);
        assert!(g.entries().row(1).iter().all(|&x| x == 0.0));
        assert!(g.entries().column(1).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn projection_examples() {
        let r = is_projection_matrix(&gram_matrix(&diag_frame()), 1, TAU_CERT);
        assert!(r.is_projection);

        let id = GramMatrix::from_upper(DMatrix::identity(4, 4)).unwrap();
        assert!(is_projection_matrix(&id, 4, TAU_CERT).is_projection);

        let ones = GramMatrix::from_upper(DMatrix::from_element(2, 2, 1.0)).unwrap();
        let r = is_projection_matrix(&ones, 1, TAU_CERT);
        assert!(!r.is_projection);
        assert_eq!(r.idempotency_deviation, 1.0);
        assert_eq!(r.trace_deviation, 1.0);
    }

    #[test]
    fn completion_examples() {
        let m = orthogonal_completion(&FrameSet::standard_basis(3), TAU_CERT).unwrap();
        assert_eq!(m, DMatrix::identity(3, 3));

        let m = orthogonal_completion(&diag_frame(), TAU_CERT).unwrap();
        assert_eq!(m[(0, 0)], FRAC_1_SQRT_2);
        assert_eq!(m[(0, 1)], FRAC_1_SQRT_2);
        let sign = m[(1, 0)].signum();
        assert!((m[(1, 0)] - sign * FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((m[(1, 1)] + sign * FRAC_1_SQRT_2).abs() < 1e-15);

        let ones = FrameSet::new(1, vec![vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(
            orthogonal_completion(&ones, TAU_CERT),
            Err(Error::NotUnitDecomposition { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let f = diag_frame();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<FrameSet>(&s).unwrap(), f);
        let h = Subspace::coordinate(3, 2).unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(serde_json::from_str::<Subspace>(&s).unwrap(), h);
    }
}
