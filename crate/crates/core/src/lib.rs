//! Unit decompositions (Parseval frames) in `R^k`, Löwner and John ellipsoids of
//! cross-polytope projections and cube sections, exact volumes of those bodies at
//! small dimension, and a harness that checks the classical volume bounds
//! relating them.
//!
//! The crate is organised bottom-up:
//!
//! - [`frames`]: frame and subspace types, unit-decomposition certification,
//!   Gram/projection checks and orthogonal completion.
//! - [`majorization`]: the majorization order, realizability of squared-norm
//!   profiles and a finite Givens-rotation construction of a frame with a
//!   prescribed profile.
//! - [`ellipsoids`]: centered minimum-volume enclosing ellipsoids (D-optimal
//!   design with away steps), polar ellipsoids and volumes.
//! - [`polytopes`]: symmetric polytopes in V- and H-representation, vertex
//!   enumeration, exact and Monte Carlo volume, support functions and polarity.
//! - [`experiments`]: Haar-random subspaces, bound verification, conjecture scans
//!   and the CSV suite runner used by the CLI.

pub mod ellipsoids;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod linalg;
pub mod majorization;
pub mod polytopes;
pub mod seed;
pub mod tolerances;

pub use error::{Error, Result};
pub use frames::{FrameSet, GramMatrix, Subspace};
