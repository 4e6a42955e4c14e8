//! Covariant localization observables on the circle and covariant phase
//! observables, at finite index-window truncation.
//!
//! An observable is determined by its structure matrix `(c_{n,m})`: unit
//! diagonal, positive semidefinite, equivalently the Gram matrix of a
//! sequence of unit vectors. Its effects are
//!
//! ```text
//! E(X)_{n,m} = c_{n,m} · (1/2π) ∫_X e^{i(m−n)θ} dθ
//! ```
//!
//! on an index window `[lo, hi]`; windows with `lo = 0` describe phase
//! observables in the number basis.
//!
//! - [`torus_kernel`]: arc sets and the closed-form kernel integrals.
//! - [`phase_matrix`]: validated matrix windows and Hermitian eigensolver.
//! - [`gram_factor`]: vector sequences ↔ phase matrices.
//! - [`observable`]: effects, probabilities, densities, sampling.
//! - [`analysis`]: commutativity, projection-valuedness, gauge equivalence, moments.
//! - [`catalog`]: named families and random corpora.

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod gram_factor;
pub mod io;
pub mod linalg;
pub mod observable;
pub mod phase_matrix;
pub mod torus_kernel;

pub use error::{Error, Result};
pub use gram_factor::{factorize_spectral, factorize_weighted, gram, VectorSequence};
pub use linalg::CMatrix;
pub use observable::{effect_matrix, EffectMatrix, StateVector};
pub use phase_matrix::{IndexWindow, PhaseMatrix, Tolerances, ValidationReport};
pub use torus_kernel::{normalize_arcs, Arc, ArcSet};
