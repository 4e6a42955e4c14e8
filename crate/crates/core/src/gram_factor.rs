//! Conversion between vector sequences `(h_n)` and phase matrices.
//!
//! Two factorizations are provided. [`factorize_spectral`] takes columns of
//! the Hermitian square root of `C`. [`factorize_weighted`] follows the
//! weighted construction that also handles zero diagonal entries: rescale
//! to `S = D B D` with `D = diag(1/(√b_nn (|n|+1)))`, take `A = S^{1/2}`,
//! and undo the scaling on the columns of `A`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::phase_matrix::{IndexWindow, PhaseMatrix, Tolerances};

/// Unit-norm tolerance for vectors fed to [`gram`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// One complex vector per window index, all of the same dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    window: IndexWindow,
    dimension: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl VectorSequence {
    pub fn new(window: IndexWindow, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if vectors.len() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                found: vectors.len(),
            });
        }
        let dimension = vectors.first().map_or(0, Vec::len);
        if dimension == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for v in &vectors {
            if v.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    found: v.len(),
                });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::NonFinite("vector entries"));
            }
        }
        Ok(Self {
            window,
            dimension,
            vectors,
        })
    }

    /// The same vector `h` at every index.
    pub fn constant(window: IndexWindow, h: Vec<Complex64>) -> Result<Self> {
        Self::new(window, vec![h; window.dim()])
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    /// `h_n` by basis index.
    pub fn get(&self, n: i64) -> &[Complex64] {
        &self.vectors[self.window.pos(n)]
    }

    pub fn norms(&self) -> Vec<f64> {
        self.vectors.iter().map(|v| norm(v)).collect()
    }

    /// Applies a `d × d` matrix to every vector.
    pub fn map_vectors(&self, u: &CMatrix) -> Result<Self> {
        if u.cols() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: u.cols(),
            });
        }
        Self::new(self.window, self.vectors.iter().map(|v| u.mul_vec(v)).collect())
    }

    /// Matrix of inner products `⟨h_n|h_m⟩`, without any norm requirement.
    pub fn inner_products(&self) -> CMatrix {
        let d = self.window.dim();
        let mut g = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                let v = inner(&self.vectors[i], &self.vectors[j]);
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
            g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
        }
        g
    }
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Phase matrix `c_{n,m} = ⟨h_n|h_m⟩` of a unit-vector sequence.
pub fn gram(seq: &VectorSequence) -> Result<PhaseMatrix> {
    for (n, v) in seq.window.indices().zip(&seq.vectors) {
        let nv = norm(v);
        if (nv - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NonUnitVector { index: n, norm: nv });
        }
    }
    let mut g = seq.inner_products();
    for i in 0..g.rows() {
        g[(i, i)] = Complex64::new(1.0, 0.0);
    }
    PhaseMatrix::new(seq.window, g, &Tolerances::default())
}

/// `h_n` = column `n` of `C^{1/2}`, renormalized to unit length.
///
/// Eigenvalues of `C` in `[-tol_psd, 0)` are clamped to zero.
pub fn factorize_spectral(c: &PhaseMatrix, tol: &Tolerances) -> Result<VectorSequence> {
    let report = c.validate(tol);
    if !report.is_valid {
        return Err(Error::Invalid(Box::new(report)));
    }
    let root = psd_sqrt(c.entries(), tol)?;
    let vectors = (0..c.dim())
        .map(|j| {
            let mut col = root.column(j);
            let nv = norm(&col);
            if nv > 0.0 {
                col.iter_mut().for_each(|z| *z /= nv);
            }
            col
        })
        .collect();
    VectorSequence::new(c.window(), vectors)
}

/// Weighted square-root factorization of a PSD matrix `B` on `window`,
/// with `⟨h_n|h_m⟩ = b_{n,m}` and `‖h_n‖ = √b_nn`. Rows with `b_nn ≤ tol.psd`
/// get `h_n = 0`.
pub fn factorize_weighted(window: IndexWindow, b: &CMatrix, tol: &Tolerances) -> Result<VectorSequence> {
    let d = window.dim();
    if b.rows() != d || b.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: b.rows(),
        });
    }
    let eig = hermitian_eigen(b, tol.herm)?;
    if eig.min() < -tol.psd {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
        });
    }

    let weight = |i: usize| (window.index(i).unsigned_abs() + 1) as f64;
    let diag: Vec<f64> = (0..d).map(|i| b[(i, i)].re).collect();
    let active: Vec<bool> = diag.iter().map(|&x| x > tol.psd).collect();
    let scale: Vec<f64> = (0..d)
        .map(|i| if active[i] { 1.0 / (diag[i].sqrt() * weight(i)) } else { 0.0 })
        .collect();
    let s = CMatrix::from_fn(d, d, |i, j| {
        if active[i] && active[j] {
            b[(i, j)] * (scale[i] * scale[j])
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .hermitian_part();

    // S = D B D is PSD whenever B is; its spectrum is scaled by up to
    // max(D)^2, so the clamp threshold scales with it.
    let s_scale = scale.iter().fold(0.0f64, |m, &x| m.max(x * x)).max(f64::MIN_POSITIVE);
    let a = psd_sqrt(
        &s,
        &Tolerances {
            psd: tol.psd * s_scale.max(1.0),
            ..*tol
        },
    )?;

    let vectors = (0..d)
        .map(|j| {
            if !active[j] {
                return vec![Complex64::new(0.0, 0.0); d];
            }
            let w = diag[j].sqrt() * weight(j);
            a.column(j).into_iter().map(|z| z * w).collect()
        })
        .collect();
    VectorSequence::new(window, vectors)
}

/// Two sequences generate the same observable iff their Gram matrices agree.
pub fn same_observable(a: &VectorSequence, b: &VectorSequence, tol: f64) -> Result<bool> {
    a.window.ensure_same(&b.window)?;
    Ok(a.inner_products().sub(&b.inner_products()).max_abs() <= tol)
}

fn psd_sqrt(m: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let eig = hermitian_eigen(m, tol.herm)?;
    if eig.min() < -tol.psd {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.apply_fn(|l| l.max(0.0).sqrt()))
}

/// Wire form: `{"window": [lo, hi], "dimension": d, "vectors": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorSequenceFile {
    pub window: IndexWindow,
    pub dimension: usize,
    pub vectors: Vec<Vec<[f64; 2]>>,
}

impl From<&VectorSequence> for VectorSequenceFile {
    fn from(seq: &VectorSequence) -> Self {
        Self {
            window: seq.window,
            dimension: seq.dimension,
            vectors: seq
                .vectors
                .iter()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<VectorSequenceFile> for VectorSequence {
    type Error = Error;

    fn try_from(file: VectorSequenceFile) -> Result<Self> {
        let vectors: Vec<Vec<Complex64>> = file
            .vectors
            .into_iter()
            .map(|v| v.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        let seq = VectorSequence::new(file.window, vectors)?;
        if seq.dimension != file.dimension {
            return Err(Error::DimensionMismatch {
                expected: file.dimension,
                found: seq.dimension,
            });
        }
        Ok(seq)
    }
}
