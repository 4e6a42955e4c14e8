//! Independent oracles shared by the integration suites. Nothing here calls
//! the closed forms under test.

#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use phasecov::catalog::random_gram_matrix;
use phasecov::linalg::CMatrix;
use phasecov::torus_kernel::{normalize_arcs, ArcSet};
use phasecov::{IndexWindow, PhaseMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_arcs` arcs with random endpoints; wrap-around allowed.
pub fn random_arc_set(rng: &mut impl Rng, max_arcs: usize) -> ArcSet {
    let k = rng.random_range(1..=max_arcs);
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let a = rng.random::<f64>() * TAU;
            let len = rng.random::<f64>() * TAU / k as f64;
            (a, (a + len) % TAU)
        })
        .collect();
    normalize_arcs(&raw).unwrap()
}

/// Random Gram matrices on `window` with vector dimension cycling through
/// `1..=window.dim()`.
pub fn corpus(window: IndexWindow, count: usize, seed: u64) -> Vec<PhaseMatrix> {
    (0..count)
        .map(|i| {
            let d = 1 + (i * 7) % window.dim();
            random_gram_matrix(window, d, seed + i as u64).unwrap()
        })
        .collect()
}

/// Midpoint Riemann sums of `(1/2π) ∫_X e^{iqθ} dθ` for `q ∈ [-max_q, max_q]`,
/// `points` nodes shared among the arcs by length. Powers of `e^{iθ}` are
/// built by repeated multiplication.
pub fn riemann_kernel(x: &ArcSet, max_q: usize, points: usize) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); 2 * max_q + 1];
    let total: f64 = x.arcs().iter().map(|a| a.length()).sum();
    if total == 0.0 {
        return acc;
    }
    let mut pos = vec![Complex64::new(0.0, 0.0); max_q + 1];
    for arc in x.arcs() {
        let n = ((points as f64 * arc.length() / total).round() as usize).max(1);
        let h = arc.length() / n as f64;
        pos.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        for j in 0..n {
            let z = Complex64::cis(arc.start() + (j as f64 + 0.5) * h);
            let mut p = Complex64::new(1.0, 0.0);
            for s in pos.iter_mut() {
                *s += p;
                p *= z;
            }
        }
        for q in 0..=max_q {
            let v = pos[q] * h / TAU;
            acc[max_q + q] += v;
            if q > 0 {
                acc[max_q - q] += v.conj();
            }
        }
    }
    acc
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<Complex64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, z)| *z).collect())
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[0][j] * cofactor_det(&minor) * sign
            })
            .sum(),
    }
}

pub fn to_nalgebra(m: &CMatrix) -> nalgebra::DMatrix<Complex64> {
    nalgebra::DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)])
}

/// Ascending eigenvalues from nalgebra's Hermitian solver.
pub fn reference_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_nalgebra(m).symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// `Σ_cells w(θ_mid) E(cell)` over `cells` equal cells of the circle, with
/// `E(cell)` computed entrywise from `c` and a quadrature of the kernel over
/// the cell.
pub fn cell_quadrature(c: &PhaseMatrix, cells: usize, w: impl Fn(f64) -> Complex64) -> CMatrix {
    let d = c.dim();
    let h = TAU / cells as f64;
    let max_q = d - 1;
    // ∫_cell e^{iqθ} dθ = e^{iqθ_mid} · 2 sin(qh/2)/q, with h at q = 0.
    let shape: Vec<f64> = (0..=max_q)
        .map(|q| if q == 0 { h } else { 2.0 * (q as f64 * h / 2.0).sin() / q as f64 })
        .collect();
    let mut moment = vec![Complex64::new(0.0, 0.0); 2 * max_q + 1];
    for j in 0..cells {
        let mid = (j as f64 + 0.5) * h;
        let weight = w(mid);
        let z = Complex64::cis(mid);
        let mut p = Complex64::new(1.0, 0.0);
        for q in 0..=max_q {
            moment[max_q + q] += weight * p * shape[q];
            if q > 0 {
                moment[max_q - q] += weight * p.conj() * shape[q];
            }
            p *= z;
        }
    }
    CMatrix::from_fn(d, d, |i, k| {
        let q = k as i64 - i as i64 + max_q as i64;
        c.entries()[(i, k)] * moment[q as usize] / TAU
    })
}

pub fn arb_window(max_half: i64) -> impl Strategy<Value = IndexWindow> {
    (-max_half..=max_half, 0..=2 * max_half).prop_map(|(lo, len)| IndexWindow::new(lo, lo + len).unwrap())
}

/// Random valid phase matrix on a window of dimension at most `2·max_half + 1`.
pub fn arb_phase_matrix(max_half: i64) -> impl Strategy<Value = PhaseMatrix> {
    (arb_window(max_half), 1usize..8, any::<u64>())
        .prop_map(|(w, d, seed)| random_gram_matrix(w, d.min(w.dim()), seed).unwrap())
}

pub fn arb_arc_set() -> impl Strategy<Value = ArcSet> {
    prop::collection::vec((0.0..TAU, 0.0..TAU), 0..4)
        .prop_map(|raw| normalize_arcs(&raw).unwrap())
}
