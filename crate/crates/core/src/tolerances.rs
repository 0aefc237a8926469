//! Default tolerances shared across the crate.

/// Orthonormality of subspace bases: `|<b_i, b_j> - δ_ij| <= TAU_ORTH`.
pub const TAU_ORTH: f64 = 1e-10;

/// Unit-decomposition certification (max-norm of `Σ v_i v_iᵀ - I`).
pub const TAU_CERT: f64 = 1e-9;

/// Majorization and realizability comparisons.
pub const TAU_MAJ: f64 = 1e-9;

/// Accuracy promised by the Schur–Horn construction.
pub const TAU_SH: f64 = 1e-8;

/// Vertex deduplication, incidence and extremality tests.
pub const TAU_GEO: f64 = 1e-9;

/// Default stopping tolerance of the enclosing-ellipsoid solver.
pub const DEFAULT_EPS: f64 = 1e-7;

/// Iteration cap of the enclosing-ellipsoid solver.
pub const SOLVER_MAX_ITER: usize = 1_000_000;

/// The inverse moment matrix is refactored from scratch this often.
pub const SOLVER_REFACTOR_EVERY: usize = 1000;

/// Largest dimension handled by exact volume computation.
pub const K_EXACT: usize = 5;

/// Largest number of generators/functionals handled by exact volume computation.
pub const N_EXACT: usize = 14;

/// Tolerance on ellipsoid volume-ratio bounds and equality flags.
pub const BOUND_TOL: f64 = 1e-6;

/// Tolerance on exact polytope volume-ratio bounds.
pub const VOLUME_TOL: f64 = 1e-9;
