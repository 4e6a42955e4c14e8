//! Finite windows of the structure matrix `(c_{n,m})`.
//!
//! Entry `(n, m)` pairs with the kernel exponent `m - n`, so that
//! `c_{n,m} = ⟨h_n|h_m⟩` for the generating unit vectors. A [`PhaseMatrix`]
//! can only be obtained through validation: unit diagonal, Hermitian and
//! positive semidefinite within the configured [`Tolerances`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::linalg::{hermitian_eigen, CMatrix, HermitianEigen};

/// Contiguous range of basis indices `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct IndexWindow {
    lo: i64,
    hi: i64,
}

impl IndexWindow {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::EmptyWindow { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    /// `[-half, half]`.
    pub fn symmetric(half: i64) -> Self {
        let half = half.abs();
        Self { lo: -half, hi: half }
    }

    /// `[0, hi]`, the number-basis window of a phase observable.
    pub fn number(hi: i64) -> Result<Self> {
        Self::new(0, hi)
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn dim(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn contains_window(&self, other: &IndexWindow) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Storage position of index `n`. Panics if `n` is outside the window.
    pub fn pos(&self, n: i64) -> usize {
        assert!(self.contains(n), "index {n} outside {self}");
        (n - self.lo) as usize
    }

    /// Basis index stored at position `i`.
    pub fn index(&self, i: usize) -> i64 {
        self.lo + i as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    pub fn as_pair(&self) -> (i64, i64) {
        (self.lo, self.hi)
    }

    pub fn ensure_same(&self, other: &IndexWindow) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::WindowMismatch {
                left: self.as_pair(),
                right: other.as_pair(),
            })
        }
    }
}

impl TryFrom<(i64, i64)> for IndexWindow {
    type Error = Error;

    fn try_from((lo, hi): (i64, i64)) -> Result<Self> {
        Self::new(lo, hi)
    }
}

impl From<IndexWindow> for (i64, i64) {
    fn from(w: IndexWindow) -> Self {
        w.as_pair()
    }
}

impl fmt::Display for IndexWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub diag: f64,
    pub herm: f64,
    pub psd: f64,
    /// Entries with modulus at or below this are structural zeros.
    pub zero: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            diag: 1e-12,
            herm: 1e-12,
            psd: 1e-10,
            zero: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub diag_deviation: f64,
    pub hermitian_deviation: f64,
    pub max_modulus: f64,
    pub min_eigenvalue: f64,
    pub is_valid: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "diag deviation {:e}, hermitian deviation {:e}, max modulus {}, min eigenvalue {:e}",
            self.diag_deviation, self.hermitian_deviation, self.max_modulus, self.min_eigenvalue
        )
    }
}

/// Checks unit diagonal, Hermiticity, entry moduli and positive
/// semidefiniteness of a raw matrix on `window`.
///
/// The minimum eigenvalue is that of the Hermitian part `(C + C*)/2`.
pub fn validate(window: &IndexWindow, entries: &CMatrix, tol: &Tolerances) -> Result<ValidationReport> {
    let dim = window.dim();
    if entries.rows() != dim || entries.cols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if entries.rows() != dim { entries.rows() } else { entries.cols() },
        });
    }
    if !entries.is_finite() {
        return Err(Error::NonFinite("matrix entries"));
    }
    let diag_deviation = (0..dim)
        .map(|i| (entries[(i, i)] - Complex64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max);
    let hermitian_deviation = entries.hermitian_deviation();
    let max_modulus = entries.max_abs();
    let eig = hermitian_eigen(&entries.hermitian_part(), f64::INFINITY)?;
    let min_eigenvalue = eig.min();
    let is_valid = diag_deviation <= tol.diag
        && hermitian_deviation <= tol.herm
        && max_modulus <= 1.0 + tol.psd
        && min_eigenvalue >= -tol.psd;
    Ok(ValidationReport {
        diag_deviation,
        hermitian_deviation,
        max_modulus,
        min_eigenvalue,
        is_valid,
    })
}

/// Validated window of a phase matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    window: IndexWindow,
    entries: CMatrix,
}

impl PhaseMatrix {
    /// Validates `entries` and wraps them. Fails with [`Error::Invalid`]
    /// carrying the report if any condition is violated.
    pub fn new(window: IndexWindow, entries: CMatrix, tol: &Tolerances) -> Result<Self> {
        let report = validate(&window, &entries, tol)?;
        if !report.is_valid {
            return Err(Error::Invalid(Box::new(report)));
        }
        Ok(Self { window, entries })
    }

    /// Builds `c_{n,m} = f(n, m)` and validates it.
    pub fn from_fn(window: IndexWindow, tol: &Tolerances, f: impl Fn(i64, i64) -> Complex64) -> Result<Self> {
        let entries = CMatrix::from_fn(window.dim(), window.dim(), |i, j| f(window.index(i), window.index(j)));
        Self::new(window, entries, tol)
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// `c_{n,m}` by basis index.
    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        self.entries[(self.window.pos(n), self.window.pos(m))]
    }

    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        validate(&self.window, &self.entries, tol).expect("shape checked at construction")
    }

    /// Principal submatrix on `sub`.
    pub fn restrict(&self, sub: IndexWindow) -> Result<Self> {
        if !self.window.contains_window(&sub) {
            return Err(Error::NotContained {
                inner: sub.as_pair(),
                outer: self.window.as_pair(),
            });
        }
        let offset = self.window.pos(sub.lo());
        Ok(Self {
            window: sub,
            entries: self.entries.block(offset, offset, sub.dim(), sub.dim()),
        })
    }

    /// Checks every principal minor of order `≤ max_order`.
    pub fn principal_minor_check(&self, max_order: usize, tol_psd: f64) -> MinorCheck {
        principal_minor_check(&self.window, &self.entries, max_order, tol_psd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorViolation {
    /// Basis indices `k_1 < … < k_s` of the failing submatrix.
    pub indices: Vec<i64>,
    pub determinant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinorCheck {
    pub passed: bool,
    pub checked: usize,
    pub first_violation: Option<MinorViolation>,
}

/// Evaluates the determinants of all principal submatrices on index sets
/// `k_1 < … < k_s`, `s ≤ max_order`, in order of increasing `s` and then
/// lexicographically, stopping at the first determinant below `-tol_psd`.
pub fn principal_minor_check(window: &IndexWindow, entries: &CMatrix, max_order: usize, tol_psd: f64) -> MinorCheck {
    let n = entries.rows();
    let mut checked = 0;
    for order in 1..=max_order.min(n) {
        let mut subset: Vec<usize> = (0..order).collect();
        loop {
            checked += 1;
            let det = entries.select(&subset).determinant().re;
            if det < -tol_psd {
                return MinorCheck {
                    passed: false,
                    checked,
                    first_violation: Some(MinorViolation {
                        indices: subset.iter().map(|&i| window.index(i)).collect(),
                        determinant: det,
                    }),
                };
            }
            if !next_combination(&mut subset, n) {
                break;
            }
        }
    }
    MinorCheck {
        passed: true,
        checked,
        first_violation: None,
    }
}

fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
