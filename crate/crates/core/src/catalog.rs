//! Named example matrices and seeded random corpora.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram_factor::{gram, VectorSequence};
use crate::linalg::CMatrix;
use crate::phase_matrix::{IndexWindow, PhaseMatrix, Tolerances};

/// `c_{n,m} = 1` for even `n − m`, `ξ` for odd: the Gram matrix of a sequence
/// alternating between two unit vectors with inner product `ξ`.
pub fn parity_matrix(xi: f64, window: IndexWindow) -> Result<PhaseMatrix> {
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::OutOfRange { what: "xi", value: xi });
    }
    PhaseMatrix::from_fn(window, &Tolerances::default(), |n, m| {
        Complex64::new(if (n - m).rem_euclid(2) == 0 { 1.0 } else { xi }, 0.0)
    })
}

/// `c_{n,m} = e^{i(υ_n − υ_m)}`, one phase per window index.
pub fn pv_matrix(phases: &[f64], window: IndexWindow) -> Result<PhaseMatrix> {
    if phases.len() != window.dim() {
        return Err(Error::DimensionMismatch {
            expected: window.dim(),
            found: phases.len(),
        });
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("phases"));
    }
    PhaseMatrix::from_fn(window, &Tolerances::default(), |n, m| {
        Complex64::cis(phases[window.pos(n)] - phases[window.pos(m)])
    })
}

/// The identity: `E(X) = μ(X) I`.
pub fn trivial_phase_matrix(window: IndexWindow) -> PhaseMatrix {
    PhaseMatrix::new(window, CMatrix::identity(window.dim()), &Tolerances::default())
        .expect("identity is a phase matrix")
}

/// Uniformly distributed unit vectors in `ℂ^d`, one per window index.
pub fn random_unit_vectors(window: IndexWindow, d: usize, seed: u64) -> Result<VectorSequence> {
    if d == 0 {
        return Err(Error::OutOfRange {
            what: "vector dimension",
            value: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vectors = (0..window.dim())
        .map(|_| {
            let mut v: Vec<Complex64> = (0..d)
                .map(|_| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im)
                })
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            v
        })
        .collect();
    VectorSequence::new(window, vectors)
}

/// Gram matrix of [`random_unit_vectors`].
pub fn random_gram_matrix(window: IndexWindow, d: usize, seed: u64) -> Result<PhaseMatrix> {
    gram(&random_unit_vectors(window, d, seed)?)
}

/// Declarative description of a catalog matrix, e.g.
/// `{"family": "parity", "xi": 0.5, "window": [-6, 6]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSpec {
    Parity { xi: f64, window: IndexWindow },
    Pv { phases: Vec<f64>, window: IndexWindow },
    Trivial { window: IndexWindow },
    RandomGram { window: IndexWindow, dimension: usize, seed: u64 },
}

impl CatalogSpec {
    pub fn window(&self) -> IndexWindow {
        match self {
            Self::Parity { window, .. }
            | Self::Pv { window, .. }
            | Self::Trivial { window }
            | Self::RandomGram { window, .. } => *window,
        }
    }

    pub fn with_window(mut self, w: IndexWindow) -> Self {
        match &mut self {
            Self::Parity { window, .. }
            | Self::Pv { window, .. }
            | Self::Trivial { window }
            | Self::RandomGram { window, .. } => *window = w,
        }
        self
    }

    pub fn build(&self) -> Result<PhaseMatrix> {
        match self {
            Self::Parity { xi, window } => parity_matrix(*xi, *window),
            Self::Pv { phases, window } => pv_matrix(phases, *window),
            Self::Trivial { window } => Ok(trivial_phase_matrix(*window)),
            Self::RandomGram { window, dimension, seed } => random_gram_matrix(*window, *dimension, *seed),
        }
    }
}
