//! Classification tests and moment operators.
//!
//! Everything here decides window-restricted statements. Where an identity
//! only holds for the infinite matrix (commutators, products of moments),
//! the functions report a central block away from the truncated edges so
//! that callers can watch the defect shrink as the window grows.

use std::collections::VecDeque;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::observable::effect_matrix;
use crate::phase_matrix::{IndexWindow, PhaseMatrix};
use crate::torus_kernel::ArcSet;

/// Default tolerance for the commutativity criterion.
pub const COMMUTATIVE_TOL: f64 = 1e-10;

/// Maximum number of violating triples kept in a [`CommutativityReport`].
pub const MAX_REPORTED_VIOLATIONS: usize = 64;

/// Unit-modulus phases `z_n`, one per window index.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePhases {
    window: IndexWindow,
    phases: Vec<Complex64>,
}

impl GaugePhases {
    pub fn new(window: IndexWindow, phases: Vec<Complex64>) -> Result<Self> {
        if phases.len() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                found: phases.len(),
            });
        }
        if let Some(z) = phases.iter().find(|z| (z.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::OutOfRange {
                what: "phase modulus",
                value: z.norm(),
            });
        }
        Ok(Self { window, phases })
    }

    /// `z_n = e^{iυ_n}`.
    pub fn from_angles(window: IndexWindow, angles: &[f64]) -> Result<Self> {
        Self::new(window, angles.iter().map(|&a| Complex64::cis(a)).collect())
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn get(&self, n: i64) -> Complex64 {
        self.phases[self.window.pos(n)]
    }

    /// `c'_{n,m} = conj(z_n) z_m c_{n,m}`.
    pub fn transform(&self, c: &CMatrix) -> CMatrix {
        CMatrix::from_fn(c.rows(), c.cols(), |i, j| self.phases[i].conj() * self.phases[j] * c[(i, j)])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleViolation {
    pub n: i64,
    pub m: i64,
    pub k: i64,
    /// `c_{n,n+k} c_{n+k,m}`
    pub lhs: [f64; 2],
    /// `c_{n,m-k} c_{m-k,m}`
    pub rhs: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutativityReport {
    pub holds: bool,
    pub triples_checked: usize,
    pub max_violation: f64,
    pub violation_count: usize,
    /// The largest violations, at most [`MAX_REPORTED_VIOLATIONS`], largest first.
    pub violations: Vec<TripleViolation>,
}

/// Checks `c_{n,n+k} c_{n+k,m} = c_{n,m-k} c_{m-k,m}` for every triple whose
/// four indices `n, m, n+k, m-k` all lie in the window.
pub fn check_commutative_criterion(c: &PhaseMatrix, tol: f64) -> CommutativityReport {
    let w = c.window();
    let mut checked = 0;
    let mut max_violation: f64 = 0.0;
    let mut violations = Vec::new();
    let mut count = 0;
    for n in w.indices() {
        for m in w.indices() {
            // n + k and m - k in the window.
            let k_lo = (w.lo() - n).max(m - w.hi());
            let k_hi = (w.hi() - n).min(m - w.lo());
            for k in k_lo..=k_hi {
                checked += 1;
                let lhs = c.get(n, n + k) * c.get(n + k, m);
                let rhs = c.get(n, m - k) * c.get(m - k, m);
                let v = (lhs - rhs).norm();
                max_violation = max_violation.max(v);
                if v > tol {
                    count += 1;
                    violations.push((
                        v,
                        TripleViolation {
                            n,
                            m,
                            k,
                            lhs: [lhs.re, lhs.im],
                            rhs: [rhs.re, rhs.im],
                        },
                    ));
                }
            }
        }
    }
    violations.sort_by(|a, b| b.0.total_cmp(&a.0));
    violations.truncate(MAX_REPORTED_VIOLATIONS);
    CommutativityReport {
        holds: count == 0,
        triples_checked: checked,
        max_violation,
        violation_count: count,
        violations: violations.into_iter().map(|(_, t)| t).collect(),
    }
}

/// Frobenius norm of the block that remains after dropping `lower` leading
/// and `upper` trailing rows and columns.
pub fn trimmed_block_norm(m: &CMatrix, lower: usize, upper: usize) -> Result<f64> {
    let d = m.rows();
    if lower + upper >= d {
        return Err(Error::MarginTooLarge {
            lower,
            upper,
            dimension: d,
        });
    }
    let size = d - lower - upper;
    Ok(m.block(lower, lower, size, size).frobenius_norm())
}

/// `[E(X), E(Y)]` on the full window.
pub fn commutator(c: &PhaseMatrix, x: &ArcSet, y: &ArcSet) -> CMatrix {
    let ex = effect_matrix(c, x).into_entries();
    let ey = effect_matrix(c, y).into_entries();
    ex.matmul(&ey).sub(&ey.matmul(&ex))
}

/// Frobenius norm of the central block of `[E(X), E(Y)]`, shrinking the
/// window by `margin` indices on each side.
pub fn commutator_norm(c: &PhaseMatrix, x: &ArcSet, y: &ArcSet, margin: usize) -> Result<f64> {
    commutator_block_norm(c, x, y, margin, margin)
}

/// As [`commutator_norm`] with separate lower and upper margins. A number
/// window `[0, L]` has a genuine edge at 0, so only its upper edge is a
/// truncation artefact.
pub fn commutator_block_norm(c: &PhaseMatrix, x: &ArcSet, y: &ArcSet, lower: usize, upper: usize) -> Result<f64> {
    let d = c.dim();
    if lower + upper >= d {
        return Err(Error::MarginTooLarge {
            lower,
            upper,
            dimension: d,
        });
    }
    trimmed_block_norm(&commutator(c, x, y), lower, upper)
}

/// Largest `|1 − |c_{n,m}||` over the window.
pub fn unimodular_deviation(c: &PhaseMatrix) -> f64 {
    c.entries().iter().map(|z| (1.0 - z.norm()).abs()).fold(0.0, f64::max)
}

/// True iff every entry of the window has modulus 1 within `tol`.
pub fn check_projection_valued(c: &PhaseMatrix, tol: f64) -> bool {
    unimodular_deviation(c) <= tol
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagonalTest {
    /// `⟨n|E([0, 2πx))²|n⟩` on the window.
    pub lhs: f64,
    /// `⟨n|E([0, 2πx))|n⟩ = x`.
    pub rhs: f64,
    /// Upper bound on the terms cut off by the window.
    pub tail_bound: f64,
}

/// `Σ_{k > K} 1/k²`.
fn inverse_square_tail(k: u64) -> f64 {
    let partial: f64 = (1..=k).rev().map(|j| 1.0 / (j as f64 * j as f64)).sum();
    (PI * PI / 6.0 - partial).max(0.0)
}

/// Compares `⟨n|E(X)²|n⟩` with `⟨n|E(X)|n⟩` for `X = [0, 2πx)`.
///
/// `E(X)² ≤ E(X)` for any positive contraction, with equality on every
/// basis state exactly when the matrix is unimodular. Each missing term
/// `|c_{n,s}|² |K(X, s−n)|²` is at most `1/(π² (s−n)²)`, which bounds the
/// truncation error.
pub fn pv_diagonal_test(c: &PhaseMatrix, x: f64, n: i64) -> Result<DiagonalTest> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::OutOfRange { what: "x", value: x });
    }
    let w = c.window();
    let required = w.dim() / 4;
    if !w.contains(n) || n - w.lo() < required as i64 || w.hi() - n < required as i64 {
        return Err(Error::TooNearEdge { index: n, required });
    }
    let set = ArcSet::arc(0.0, TAU * x)?;
    let e = effect_matrix(c, &set).into_entries();
    let row = w.pos(n);
    let lhs: f64 = (0..w.dim()).map(|s| e[(row, s)].norm_sqr()).sum();
    let rhs = e[(row, row)].re;
    let tail = inverse_square_tail((n - w.lo()) as u64) + inverse_square_tail((w.hi() - n) as u64);
    Ok(DiagonalTest {
        lhs,
        rhs,
        tail_bound: tail / (PI * PI),
    })
}

/// Finds phases `z_n` with `c'_{n,m} = conj(z_n) z_m c_{n,m}` within `tol`.
///
/// Entries with modulus at most `tol_zero` are structural zeros and must
/// agree between the two matrices. Phases are propagated breadth-first over
/// the graph of nonzero entries with `z = 1` at the lowest index of each
/// connected component, then every edge is verified.
pub fn check_equivalent(c: &PhaseMatrix, c2: &PhaseMatrix, tol: f64, tol_zero: f64) -> Result<Option<GaugePhases>> {
    let w = c.window();
    w.ensure_same(&c2.window())?;
    let d = w.dim();
    let a = c.entries();
    let b = c2.entries();

    for i in 0..d {
        for j in 0..d {
            let za = a[(i, j)].norm() <= tol_zero;
            let zb = b[(i, j)].norm() <= tol_zero;
            if za != zb {
                return Ok(None);
            }
            if !za && (a[(i, j)].norm() - b[(i, j)].norm()).abs() > tol {
                return Ok(None);
            }
        }
    }

    let mut phases: Vec<Option<Complex64>> = vec![None; d];
    let mut queue = VecDeque::new();
    for root in 0..d {
        if phases[root].is_some() {
            continue;
        }
        phases[root] = Some(Complex64::new(1.0, 0.0));
        queue.push_back(root);
        while let Some(i) = queue.pop_front() {
            let zi = phases[i].unwrap();
            for j in 0..d {
                if phases[j].is_some() || a[(i, j)].norm() <= tol_zero {
                    continue;
                }
                // c'_{ij} = conj(z_i) z_j c_{ij}  ⇒  z_j = z_i c'_{ij} / c_{ij}
                let ratio = b[(i, j)] / a[(i, j)];
                phases[j] = Some(zi * ratio / ratio.norm());
                queue.push_back(j);
            }
        }
    }
    let phases: Vec<Complex64> = phases.into_iter().map(Option::unwrap).collect();
    let gauge = GaugePhases { window: w, phases };
    if gauge.transform(a).sub(b).max_abs() > tol {
        return Ok(None);
    }
    Ok(Some(gauge))
}

/// `V^{(k)} = ∫ z^k dE(z) = Σ_n c_{n,n−k} |n⟩⟨n−k|`.
pub fn cyclic_moment(c: &PhaseMatrix, k: i64) -> Result<CMatrix> {
    let d = c.dim();
    if k.unsigned_abs() as usize >= d {
        return Err(Error::OutOfRange {
            what: "moment order",
            value: k as f64,
        });
    }
    let mut v = CMatrix::zeros(d, d);
    for i in 0..d {
        let j = i as i64 - k;
        if (0..d as i64).contains(&j) {
            v[(i, j as usize)] = c.entries()[(i, j as usize)];
        }
    }
    Ok(v)
}

/// Result of deriving unimodularity from the first cyclic moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstMomentPv {
    /// `|c_{n,n+1}| = 1` on the whole window within tolerance.
    pub first_diagonal_unimodular: bool,
    /// Largest `|1 − |c_{n,m}||` over the window (only computed when the
    /// first off-diagonal is unimodular).
    pub window_deviation: Option<f64>,
}

impl FirstMomentPv {
    pub fn is_projection_valued(&self) -> bool {
        self.first_diagonal_unimodular
    }
}

/// Decides projection-valuedness from the first off-diagonal.
///
/// If `|c_{n,n+1}| = 1` for all `n`, the order-3 minor on `{n, n+1, n+2}`
/// equals `−|c_{n,n+2} − c_{n,n+1} c_{n+1,n+2}|²`, so positivity forces
/// `c_{n,n+2} = c_{n,n+1} c_{n+1,n+2}`, and by induction every entry is the
/// product of first off-diagonal entries. The window is checked against that
/// prediction; a mismatch means the matrix was not positive semidefinite.
pub fn pv_from_first_moment(c: &PhaseMatrix, tol: f64) -> Result<FirstMomentPv> {
    let w = c.window();
    let d = w.dim();
    let e = c.entries();
    let first_ok = (0..d.saturating_sub(1)).all(|i| (e[(i, i + 1)].norm() - 1.0).abs() <= tol);
    if !first_ok {
        return Ok(FirstMomentPv {
            first_diagonal_unimodular: false,
            window_deviation: None,
        });
    }
    // Scale the contradiction tolerance with the chain length.
    let chain_tol = tol * d as f64;
    let mut window_deviation: f64 = 0.0;
    for i in 0..d {
        let mut predicted = Complex64::new(1.0, 0.0);
        for j in i + 1..d {
            predicted *= e[(j - 1, j)];
            let deviation = (e[(i, j)] - predicted).norm();
            if deviation > chain_tol {
                return Err(Error::Contradiction {
                    n: w.index(i),
                    m: w.index(j),
                    deviation,
                });
            }
            window_deviation = window_deviation.max((1.0 - e[(i, j)].norm()).abs());
        }
    }
    Ok(FirstMomentPv {
        first_diagonal_unimodular: true,
        window_deviation: Some(window_deviation),
    })
}

/// `E^{(1)} = ∫_0^{2π} θ dE(θ)`: diagonal `π`, off-diagonal `c_{n,m} / (i(m−n))`.
pub fn first_phase_moment(c: &PhaseMatrix) -> CMatrix {
    let d = c.dim();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(PI, 0.0)
        } else {
            let q = j as f64 - i as f64;
            c.entries()[(i, j)] / Complex64::new(0.0, q)
        }
    })
}

/// `c_{n,m} = i(m−n) · E^{(1)}_{n,m}` off the diagonal, ones on it.
pub fn reconstruct_from_first_moment(e1: &CMatrix) -> CMatrix {
    CMatrix::from_fn(e1.rows(), e1.cols(), |i, j| {
        if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, j as f64 - i as f64) * e1[(i, j)]
        }
    })
}

/// `E^{(2)} = ∫_0^{2π} θ² dE(θ)`: diagonal `4π²/3`, off-diagonal
/// `c_{n,m} (2π/(iq) + 2/q²)` with `q = m − n`.
pub fn second_phase_moment(c: &PhaseMatrix) -> CMatrix {
    let d = c.dim();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(4.0 * PI * PI / 3.0, 0.0)
        } else {
            let q = j as f64 - i as f64;
            c.entries()[(i, j)] * (Complex64::new(0.0, -TAU / q) + 2.0 / (q * q))
        }
    })
}

/// Central-block norm of `E^{(2)} − (E^{(1)})²`, which vanishes on the
/// infinite matrix exactly in the projection-valued case.
pub fn moment_defect_norm(c: &PhaseMatrix, margin: usize) -> Result<f64> {
    let e1 = first_phase_moment(c);
    let defect = second_phase_moment(c).sub(&e1.matmul(&e1));
    trimmed_block_norm(&defect, margin, margin)
}

/// Default central-block margin: a quarter of the window dimension.
pub fn default_margin(window: IndexWindow) -> usize {
    window.dim() / 4
}

/// JSON report shape shared by the analysis commands.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub test: String,
    pub pass: bool,
    pub max_violation: f64,
    pub witnesses: Vec<serde_json::Value>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_matrix::Tolerances;

    fn parity(xi: f64, w: IndexWindow) -> PhaseMatrix {
        PhaseMatrix::from_fn(w, &Tolerances::default(), |n, m| {
            Complex64::new(if (n - m).rem_euclid(2) == 0 { 1.0 } else { xi }, 0.0)
        })
        .unwrap()
    }

    fn identity(w: IndexWindow) -> PhaseMatrix {
        PhaseMatrix::new(w, CMatrix::identity(w.dim()), &Tolerances::default()).unwrap()
    }

    fn pv(w: IndexWindow, angle: impl Fn(i64) -> f64) -> PhaseMatrix {
        PhaseMatrix::from_fn(w, &Tolerances::default(), |n, m| Complex64::cis(angle(n) - angle(m))).unwrap()
    }

    #[test]
    fn commutative_criterion_triples_stay_in_window() {
        let w = IndexWindow::new(0, 2).unwrap();
        let r = check_commutative_criterion(&identity(w), COMMUTATIVE_TOL);
        assert!(r.holds);
        // Brute-force count of in-window triples.
        let mut count = 0;
        for n in 0..=2i64 {
            for m in 0..=2i64 {
                for k in -4..=4i64 {
                    if [n + k, m - k].iter().all(|v| w.contains(*v)) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(r.triples_checked, count);
    }

    #[test]
    fn parity_satisfies_commutative_criterion() {
        for xi in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let r = check_commutative_criterion(&parity(xi, IndexWindow::symmetric(6)), COMMUTATIVE_TOL);
            assert!(r.holds, "xi = {xi}: {}", r.max_violation);
        }
    }

    #[test]
    fn commutator_of_trivial_observable_vanishes() {
        let c = identity(IndexWindow::symmetric(5));
        let x = ArcSet::arc(0.0, 2.0).unwrap();
        let y = ArcSet::arc(1.0, 4.0).unwrap();
        assert_eq!(commutator_norm(&c, &x, &y, 2).unwrap(), 0.0);
        assert!(matches!(commutator_norm(&c, &x, &y, 6), Err(Error::MarginTooLarge { .. })));
    }

    #[test]
    fn commutator_norm_is_symmetric_in_sets() {
        let c = parity(0.3, IndexWindow::symmetric(6));
        let x = ArcSet::arc(0.2, 2.0).unwrap();
        let y = ArcSet::arc(1.0, 5.0).unwrap();
        let a = commutator_norm(&c, &x, &y, 3).unwrap();
        let b = commutator_norm(&c, &y, &x, 3).unwrap();
        assert!((a - b).abs() <= 1e-15 * a.max(1.0));
    }

    #[test]
    fn projection_valued_cases() {
        let w = IndexWindow::symmetric(4);
        assert!(check_projection_valued(&parity(1.0, w), 1e-12));
        assert!(check_projection_valued(&parity(-1.0, w), 1e-12));
        assert!(!check_projection_valued(&parity(0.5, w), 1e-12));
        assert!(check_projection_valued(&pv(w, |n| 0.37 * (n * n) as f64), 1e-12));
        assert!(!check_projection_valued(&identity(w), 1e-12));
    }

    #[test]
    fn diagonal_test_identity() {
        let t = pv_diagonal_test(&identity(IndexWindow::symmetric(8)), 0.5, 0).unwrap();
        assert!((t.lhs - 0.25).abs() < 1e-15);
        assert!((t.rhs - 0.5).abs() < 1e-15);
    }

    #[test]
    fn diagonal_test_all_ones() {
        let t = pv_diagonal_test(&parity(1.0, IndexWindow::symmetric(32)), 0.5, 0).unwrap();
        assert!((t.lhs - 0.5).abs() < 0.02);
        assert!(t.lhs <= t.rhs + t.tail_bound);
        // The cut-off terms are what separates lhs from rhs here.
        assert!(t.rhs - t.lhs <= t.tail_bound);
        assert!((t.tail_bound - 2.0 * inverse_square_tail(32) / (PI * PI)).abs() < 1e-15);
    }

    #[test]
    fn diagonal_test_rejects_edge() {
        let c = identity(IndexWindow::symmetric(8));
        assert!(matches!(pv_diagonal_test(&c, 0.5, 7), Err(Error::TooNearEdge { .. })));
        assert!(pv_diagonal_test(&c, 1.0, 0).is_err());
    }

    #[test]
    fn inverse_square_tail_matches_bound() {
        for k in [1u64, 10, 100] {
            let t = inverse_square_tail(k);
            assert!(t < 1.0 / k as f64 && t > 1.0 / (k as f64 + 1.0));
        }
    }

    #[test]
    fn equivalence_recovers_gauge() {
        let w = IndexWindow::symmetric(4);
        let c = parity(0.5, w);
        let gauge = GaugePhases::new(w, w.indices().map(|n| Complex64::i().powi(n as i32)).collect()).unwrap();
        let c2 = PhaseMatrix::new(w, gauge.transform(c.entries()), &Tolerances::default()).unwrap();
        let found = check_equivalent(&c, &c2, 1e-10, 1e-9).unwrap().unwrap();
        assert!(found.transform(c.entries()).sub(c2.entries()).max_abs() <= 1e-10);

        let same = check_equivalent(&c, &c, 1e-10, 1e-9).unwrap().unwrap();
        assert!(same.phases().iter().all(|z| (z - 1.0).norm() < 1e-15));
    }

    #[test]
    fn equivalence_rejects_modulus_change_and_zero_pattern() {
        let w = IndexWindow::new(0, 2).unwrap();
        let c = parity(0.5, w);
        let mut m = c.entries().clone();
        for (i, j) in [(0, 1), (1, 0), (1, 2), (2, 1)] {
            m[(i, j)] = Complex64::new(0.499, 0.0);
        }
        let c2 = PhaseMatrix::new(w, m, &Tolerances::default()).unwrap();
        assert!(check_equivalent(&c, &c2, 1e-10, 1e-9).unwrap().is_none());

        let zeroed = parity(0.0, w);
        assert!(check_equivalent(&c, &zeroed, 1e-10, 1e-9).unwrap().is_none());
        assert!(check_equivalent(&c, &parity(0.5, IndexWindow::new(1, 3).unwrap()), 1e-10, 1e-9).is_err());
    }

    #[test]
    fn equivalence_handles_disconnected_components() {
        // Checkerboard: even and odd indices form two components.
        let w = IndexWindow::new(0, 3).unwrap();
        let c = parity(0.0, w);
        let gauge = GaugePhases::from_angles(w, &[0.3, 1.1, -2.0, 0.7]).unwrap();
        let c2 = PhaseMatrix::new(w, gauge.transform(c.entries()), &Tolerances::default()).unwrap();
        let found = check_equivalent(&c, &c2, 1e-10, 1e-9).unwrap().unwrap();
        assert!(found.transform(c.entries()).sub(c2.entries()).max_abs() <= 1e-12);
    }

    #[test]
    fn cyclic_moment_cases() {
        let w = IndexWindow::symmetric(3);
        let c = parity(0.5, w);
        assert_eq!(cyclic_moment(&c, 0).unwrap(), CMatrix::identity(7));
        assert_eq!(cyclic_moment(&identity(w), 2).unwrap().max_abs(), 0.0);
        assert!(cyclic_moment(&c, 7).is_err());
        let v1 = cyclic_moment(&c, 1).unwrap();
        let vm1 = cyclic_moment(&c, -1).unwrap();
        assert!(v1.adjoint().sub(&vm1).max_abs() < 1e-16);
        assert_eq!(v1[(1, 0)], c.get(-2, -3));
    }

    #[test]
    fn cyclic_moment_of_pv_matrix_is_truncated_unitary() {
        let w = IndexWindow::symmetric(4);
        let c = pv(w, |n| 0.7 * n as f64);
        for k in 1..4i64 {
            let v = cyclic_moment(&c, k).unwrap();
            let vvh = v.matmul(&v.adjoint());
            let eig = crate::linalg::hermitian_eigen(&vvh, 1e-12).unwrap();
            let zeros = eig.values.iter().filter(|l| l.abs() < 1e-12).count();
            let ones = eig.values.iter().filter(|l| (*l - 1.0).abs() < 1e-12).count();
            assert_eq!((zeros, ones), (k as usize, w.dim() - k as usize));
        }
    }

    #[test]
    fn first_moment_pv_cases() {
        let w = IndexWindow::symmetric(4);
        let r = pv_from_first_moment(&pv(w, |n| (n as f64).sin()), 1e-12).unwrap();
        assert!(r.is_projection_valued());
        assert!(r.window_deviation.unwrap() < 1e-12);
        assert!(!pv_from_first_moment(&parity(0.5, w), 1e-12).unwrap().is_projection_valued());
        assert!(!pv_from_first_moment(&identity(w), 1e-12).unwrap().is_projection_valued());
    }

    #[test]
    fn first_moment_pv_flags_contradiction() {
        // Unimodular first off-diagonal but c_{0,2} off the forced value; the
        // raw matrix is indefinite, so build it without validation.
        let w = IndexWindow::new(0, 2).unwrap();
        let mut m = CMatrix::identity(3);
        for (i, j) in [(0, 1), (1, 2)] {
            m[(i, j)] = Complex64::new(1.0, 0.0);
            m[(j, i)] = Complex64::new(1.0, 0.0);
        }
        m[(0, 2)] = Complex64::new(0.5, 0.0);
        m[(2, 0)] = Complex64::new(0.5, 0.0);
        let tol = Tolerances {
            psd: 10.0,
            ..Tolerances::default()
        };
        let c = PhaseMatrix::new(w, m, &tol).unwrap();
        assert!(matches!(pv_from_first_moment(&c, 1e-12), Err(Error::Contradiction { n: 0, m: 2, .. })));
    }

    #[test]
    fn trivial_moments() {
        let w = IndexWindow::symmetric(3);
        let id = identity(w);
        let e1 = first_phase_moment(&id);
        let e2 = second_phase_moment(&id);
        assert!(e1.sub(&CMatrix::identity(7).scale(Complex64::new(PI, 0.0))).max_abs() < 1e-15);
        for i in 0..7 {
            let var = e2[(i, i)].re - e1[(i, i)].re.powi(2);
            assert!((var - PI * PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moments_are_hermitian_and_reconstruct() {
        let c = parity(-0.4, IndexWindow::symmetric(5));
        let e1 = first_phase_moment(&c);
        assert!(e1.hermitian_deviation() < 1e-15);
        assert!(second_phase_moment(&c).hermitian_deviation() < 1e-14);
        assert!(reconstruct_from_first_moment(&e1).sub(c.entries()).max_abs() < 1e-14);
    }
}
