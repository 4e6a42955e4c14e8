//! JSON wire formats for matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::CMatrix;
use crate::phase_matrix::{IndexWindow, PhaseMatrix, Tolerances};

/// `{"window": [lo, hi], "entries": [[[re, im], ...], ...]}`, row-major in
/// window order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub window: IndexWindow,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn new(window: IndexWindow, m: &CMatrix) -> Self {
        Self {
            window,
            entries: (0..m.rows())
                .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows: Vec<Vec<Complex64>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(&rows)
    }

    pub fn to_phase_matrix(&self, tol: &Tolerances) -> Result<PhaseMatrix> {
        PhaseMatrix::new(self.window, self.to_matrix()?, tol)
    }
}

impl From<&PhaseMatrix> for MatrixFile {
    fn from(c: &PhaseMatrix) -> Self {
        Self::new(c.window(), c.entries())
    }
}
