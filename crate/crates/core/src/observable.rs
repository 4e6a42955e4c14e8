//! Effect operators `E(X)` on an index window and the outcome statistics
//! they define.
//!
//! `E(X)_{n,m} = c_{n,m} · K(X, m - n)` with `K(X, q) = (1/2π) ∫_X e^{iqθ} dθ`.
//! The kernel matrix `K(X)` holds Fourier coefficients of the indicator of `X`,
//! hence is PSD, and `E(X)` is its Schur product with `C`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::phase_matrix::{IndexWindow, PhaseMatrix};
use crate::torus_kernel::ArcSet;

/// Default sampler grid, `2^14` points.
pub const DEFAULT_GRID: usize = 1 << 14;

const STATE_NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectMatrix {
    window: IndexWindow,
    arc_set: ArcSet,
    entries: CMatrix,
}

impl EffectMatrix {
    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn arc_set(&self) -> &ArcSet {
        &self.arc_set
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }
}

/// Unit vector of amplitudes over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    window: IndexWindow,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(window: IndexWindow, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != window.dim() {
            return Err(Error::DimensionMismatch {
                expected: window.dim(),
                found: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::NonUnitState { norm });
        }
        Ok(Self { window, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(window: IndexWindow, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::NonUnitState { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(window, amplitudes)
    }

    /// Basis state `|n⟩`.
    pub fn basis(window: IndexWindow, n: i64) -> Result<Self> {
        if !window.contains(n) {
            return Err(Error::NotContained {
                inner: (n, n),
                outer: window.as_pair(),
            });
        }
        let mut a = vec![Complex64::new(0.0, 0.0); window.dim()];
        a[window.pos(n)] = Complex64::new(1.0, 0.0);
        Ok(Self { window, amplitudes: a })
    }

    /// Equal-weight superposition of every basis state in the window.
    pub fn uniform(window: IndexWindow) -> Self {
        let w = 1.0 / (window.dim() as f64).sqrt();
        Self {
            window,
            amplitudes: vec![Complex64::new(w, 0.0); window.dim()],
        }
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// `E(X)` on the window of `c`.
pub fn effect_matrix(c: &PhaseMatrix, x: &ArcSet) -> EffectMatrix {
    let d = c.dim();
    let max_q = d.saturating_sub(1);
    let kernel = x.kernel_table(max_q);
    let entries = CMatrix::from_fn(d, d, |i, j| {
        let q = j as i64 - i as i64;
        c.entries()[(i, j)] * kernel[(q + max_q as i64) as usize]
    });
    EffectMatrix {
        window: c.window(),
        arc_set: x.clone(),
        entries,
    }
}

/// `K(X)_{n,m} = K(X, m - n)` on a window of dimension `d`.
pub fn kernel_matrix(x: &ArcSet, d: usize) -> CMatrix {
    let max_q = d.saturating_sub(1);
    let kernel = x.kernel_table(max_q);
    CMatrix::from_fn(d, d, |i, j| kernel[(j as i64 - i as i64 + max_q as i64) as usize])
}

/// `⟨ψ|E(X)ψ⟩`, unclamped. Use [`clamp_probability`] when reporting.
pub fn probability(c: &PhaseMatrix, psi: &StateVector, x: &ArcSet) -> Result<f64> {
    c.window().ensure_same(&psi.window)?;
    Ok(effect_matrix(c, x).entries.quadratic_form(&psi.amplitudes).re)
}

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Outcome density with respect to `dθ`:
/// `p(θ) = (1/2π) v* C v` with `v_n = ψ_n e^{inθ}`.
pub fn density(c: &PhaseMatrix, psi: &StateVector, theta: f64) -> Result<f64> {
    c.window().ensure_same(&psi.window)?;
    Ok(density_unchecked(c, psi, theta))
}

fn density_unchecked(c: &PhaseMatrix, psi: &StateVector, theta: f64) -> f64 {
    let v: Vec<Complex64> = psi
        .window
        .indices()
        .zip(&psi.amplitudes)
        .map(|(n, a)| a * Complex64::cis(n as f64 * theta))
        .collect();
    c.entries().quadratic_form(&v).re / TAU
}

/// `(θ_j, p(θ_j))` on `grid + 1` equispaced points covering `[0, 2π]`.
pub fn density_grid(c: &PhaseMatrix, psi: &StateVector, grid: usize) -> Result<Vec<(f64, f64)>> {
    c.window().ensure_same(&psi.window)?;
    if grid == 0 {
        return Err(Error::OutOfRange {
            what: "grid size",
            value: 0.0,
        });
    }
    let h = TAU / grid as f64;
    Ok((0..=grid)
        .map(|j| {
            let theta = j as f64 * h;
            (theta, density_unchecked(c, psi, theta))
        })
        .collect())
}

/// `diag(e^{inθ})` on the window.
pub fn phase_shift(window: IndexWindow, theta: f64) -> Vec<Complex64> {
    window.indices().map(|n| Complex64::cis(n as f64 * theta)).collect()
}

/// `‖U(θ)* E(X) U(θ) − E(X ⊕ θ)‖_F` with `U(θ) = diag(e^{inθ})`.
///
/// With the kernel exponent `m − n`, the rotated set is reached by
/// conjugating with `U(θ)*` on the left.
pub fn covariance_check(c: &PhaseMatrix, x: &ArcSet, theta: f64) -> f64 {
    let u = phase_shift(c.window(), theta);
    let e = effect_matrix(c, x).entries;
    let conjugated = CMatrix::from_fn(e.rows(), e.cols(), |i, j| u[i].conj() * e[(i, j)] * u[j]);
    let rotated = effect_matrix(c, &x.rotate(theta)).entries;
    conjugated.sub(&rotated).frobenius_norm()
}

/// `‖E(X ∪ Y) − E(X) − E(Y)‖_F` for disjoint `X`, `Y`.
pub fn additivity_check(c: &PhaseMatrix, x: &ArcSet, y: &ArcSet) -> Result<f64> {
    let overlap = x.overlap(y);
    if overlap > 0.0 {
        return Err(Error::Overlapping { overlap });
    }
    let union = effect_matrix(c, &x.union(y)).entries;
    let parts = effect_matrix(c, x).entries.add(&effect_matrix(c, y).entries);
    Ok(union.sub(&parts).frobenius_norm())
}

/// Inverse-CDF sampler for the outcome distribution of a state.
///
/// The density is tabulated on a uniform grid, integrated with the
/// trapezoid rule, and inverted by linear interpolation of the CDF.
#[derive(Debug, Clone)]
pub struct Sampler {
    thetas: Vec<f64>,
    cdf: Vec<f64>,
}

impl Sampler {
    pub fn new(c: &PhaseMatrix, psi: &StateVector, grid: usize) -> Result<Self> {
        let points = density_grid(c, psi, grid)?;
        let h = TAU / grid as f64;
        let mut cdf = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in points.windows(2) {
            acc += 0.5 * h * (w[0].1.max(0.0) + w[1].1.max(0.0));
            cdf.push(acc);
        }
        if acc.is_nan() || acc <= 0.0 {
            return Err(Error::OutOfRange {
                what: "total probability",
                value: acc,
            });
        }
        cdf.iter_mut().for_each(|v| *v /= acc);
        Ok(Self {
            thetas: points.into_iter().map(|(t, _)| t).collect(),
            cdf,
        })
    }

    /// Angle at which the tabulated CDF reaches `u ∈ [0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let j = self.cdf.partition_point(|&f| f <= u).clamp(1, self.cdf.len() - 1);
        let (f0, f1) = (self.cdf[j - 1], self.cdf[j]);
        let (t0, t1) = (self.thetas[j - 1], self.thetas[j]);
        let t = if f1 > f0 { t0 + (u - f0) / (f1 - f0) * (t1 - t0) } else { t0 };
        t.clamp(0.0, TAU).rem_euclid(TAU)
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

/// `count` i.i.d. outcome angles in `[0, 2π)`, deterministic given `seed`.
pub fn sample(c: &PhaseMatrix, psi: &StateVector, count: usize, seed: u64, grid: usize) -> Result<Vec<f64>> {
    let sampler = Sampler::new(c, psi, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}

/// Wire form of a state: `{"window": [lo, hi], "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub window: IndexWindow,
    pub amplitudes: Vec<[f64; 2]>,
}

impl From<&StateVector> for StateFile {
    fn from(s: &StateVector) -> Self {
        Self {
            window: s.window,
            amplitudes: s.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl TryFrom<StateFile> for StateVector {
    type Error = Error;

    fn try_from(f: StateFile) -> Result<Self> {
        StateVector::new(f.window, f.amplitudes.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::phase_matrix::Tolerances;

    fn ones(w: IndexWindow) -> PhaseMatrix {
        PhaseMatrix::from_fn(w, &Tolerances::default(), |_, _| Complex64::new(1.0, 0.0)).unwrap()
    }

    fn identity(w: IndexWindow) -> PhaseMatrix {
        PhaseMatrix::new(w, CMatrix::identity(w.dim()), &Tolerances::default()).unwrap()
    }

    fn plus_state() -> StateVector {
        StateVector::normalized(IndexWindow::new(0, 1).unwrap(), vec![Complex64::new(1.0, 0.0); 2]).unwrap()
    }

    #[test]
    fn full_circle_gives_identity_and_empty_gives_zero() {
        let c = ones(IndexWindow::symmetric(3));
        assert_eq!(effect_matrix(&c, &ArcSet::full()).entries, CMatrix::identity(7));
        assert_eq!(effect_matrix(&c, &ArcSet::empty()).entries.max_abs(), 0.0);
    }

    #[test]
    fn trivial_observable_scales_identity() {
        let w = IndexWindow::symmetric(2);
        let x = ArcSet::arc(0.4, 2.9).unwrap();
        let e = effect_matrix(&identity(w), &x);
        let expected = CMatrix::identity(5).scale(Complex64::new(x.haar_measure(), 0.0));
        assert!(e.entries.sub(&expected).max_abs() < 1e-16);
    }

    #[test]
    fn all_ones_half_circle_entries() {
        let e = effect_matrix(&ones(IndexWindow::new(0, 1).unwrap()), &ArcSet::arc(0.0, PI).unwrap());
        let m = e.entries();
        assert!((m[(0, 0)].re - 0.5).abs() < 1e-16);
        assert!((m[(0, 1)] - Complex64::new(0.0, 1.0 / PI)).norm() < 1e-16);
        assert!((m[(1, 0)] - Complex64::new(0.0, -1.0 / PI)).norm() < 1e-16);
    }

    #[test]
    fn probability_examples() {
        let x = ArcSet::arc(0.0, PI).unwrap();
        let p = probability(&ones(IndexWindow::new(0, 1).unwrap()), &plus_state(), &x).unwrap();
        assert!((p - 0.5).abs() < 1e-15);

        let w = IndexWindow::symmetric(2);
        let x = ArcSet::arc(1.0, 2.5).unwrap();
        let psi = StateVector::normalized(w, (0..5).map(|k| Complex64::new(k as f64, 1.0)).collect()).unwrap();
        let p = probability(&identity(w), &psi, &x).unwrap();
        assert!((p - x.haar_measure()).abs() < 1e-15);

        let basis = StateVector::basis(w, 1).unwrap();
        assert!((probability(&ones(w), &basis, &x).unwrap() - x.haar_measure()).abs() < 1e-15);
        assert!((probability(&ones(w), &psi, &ArcSet::full()).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn probability_window_mismatch() {
        let c = ones(IndexWindow::symmetric(1));
        assert!(matches!(
            probability(&c, &plus_state(), &ArcSet::full()),
            Err(Error::WindowMismatch { .. })
        ));
    }

    #[test]
    fn density_examples() {
        let w = IndexWindow::symmetric(2);
        let psi = StateVector::uniform(w);
        for theta in [0.0, 1.0, 4.0] {
            assert!((density(&identity(w), &psi, theta).unwrap() - 1.0 / TAU).abs() < 1e-15);
            let p = density(&ones(IndexWindow::new(0, 1).unwrap()), &plus_state(), theta).unwrap();
            assert!((p - (1.0 + theta.cos()) / TAU).abs() < 1e-15);
        }
    }

    #[test]
    fn covariance_examples() {
        let c = ones(IndexWindow::symmetric(4));
        let x = ArcSet::arc(0.3, 2.0).unwrap();
        assert_eq!(covariance_check(&c, &x, 0.0), 0.0);
        assert!(covariance_check(&c, &ArcSet::full(), 1.3) < 1e-15);
        assert!(covariance_check(&c, &x, 1.1) < 1e-12);
        assert!(covariance_check(&c, &x, 5.9) < 1e-12);
    }

    #[test]
    fn additivity_examples() {
        let c = ones(IndexWindow::symmetric(4));
        let a = ArcSet::arc(0.0, PI).unwrap();
        let b = ArcSet::arc(PI, TAU).unwrap();
        assert!(additivity_check(&c, &a, &b).unwrap() < 1e-14);
        assert_eq!(additivity_check(&c, &a, &ArcSet::empty()).unwrap(), 0.0);
        assert!(matches!(
            additivity_check(&c, &a, &ArcSet::arc(1.0, 4.0).unwrap()),
            Err(Error::Overlapping { .. })
        ));
    }

    #[test]
    fn sampler_is_deterministic() {
        let c = ones(IndexWindow::new(0, 1).unwrap());
        let a = sample(&c, &plus_state(), 100, 7, 1 << 12).unwrap();
        let b = sample(&c, &plus_state(), 100, 7, 1 << 12).unwrap();
        let other = sample(&c, &plus_state(), 100, 8, 1 << 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, other);
        assert!(a.iter().all(|t| (0.0..TAU).contains(t)));
    }

    #[test]
    fn quantile_inverts_uniform_cdf() {
        let w = IndexWindow::symmetric(1);
        let s = Sampler::new(&identity(w), &StateVector::uniform(w), 1 << 10).unwrap();
        for u in [0.0, 0.1, 0.5, 0.999] {
            assert!((s.quantile(u) - u * TAU).abs() < 1e-12);
        }
    }

    #[test]
    fn state_validation() {
        let w = IndexWindow::new(0, 1).unwrap();
        assert!(matches!(
            StateVector::new(w, vec![Complex64::new(1.0, 0.0); 2]),
            Err(Error::NonUnitState { .. })
        ));
        assert!(StateVector::normalized(w, vec![Complex64::new(0.0, 0.0); 2]).is_err());
        assert!(StateVector::basis(w, 3).is_err());
        let json = serde_json::to_string(&StateFile::from(&plus_state())).unwrap();
        let back: StateVector = serde_json::from_str::<StateFile>(&json).unwrap().try_into().unwrap();
        assert_eq!(back, plus_state());
    }
}
