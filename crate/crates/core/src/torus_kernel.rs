//! Finite unions of half-open arcs on the circle and the Fourier kernel
//! `(1/2π) ∫_X e^{iqθ} dθ` over them.
//!
//! Angles are radians. An arc `[a, a + ℓ)` is read modulo 2π, so an arc with
//! `a + ℓ > 2π` wraps through zero. Arc sets are always kept canonical:
//! disjoint, non-adjacent, sorted by start. Arcs or gaps shorter than
//! [`ARC_EPS`] are absorbed.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arcs and gaps shorter than this are treated as measure zero.
pub const ARC_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    start: f64,
    length: f64,
}

impl Arc {
    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Unreduced end point `start + length`, possibly beyond 2π.
    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    /// Pieces of this arc inside `[0, 2π)`, as `(start, end)` with `end ≤ 2π`.
    fn linear_pieces(&self) -> impl Iterator<Item = (f64, f64)> {
        let end = self.end();
        let (first, second) = if self.is_full() {
            ((0.0, TAU), None)
        } else if end > TAU {
            ((self.start, TAU), Some((0.0, end - TAU)))
        } else {
            ((self.start, end), None)
        };
        std::iter::once(first)
            .chain(second)
            .filter(|(a, b)| b - a >= ARC_EPS)
    }

    fn contains(&self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let offset = (theta - self.start).rem_euclid(TAU);
        offset < self.length
    }
}

/// Canonical finite union of half-open arcs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self {
            arcs: vec![Arc {
                start: 0.0,
                length: TAU,
            }],
        }
    }

    /// Single arc from `start` to `end` (wrapping if `end` reduces below `start`).
    pub fn arc(start: f64, end: f64) -> Result<Self> {
        normalize_arcs(&[(start, end)])
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].is_full()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.contains(theta))
    }

    /// Normalized arc length: the Haar measure of the set.
    pub fn haar_measure(&self) -> f64 {
        if self.is_full() {
            return 1.0;
        }
        self.arcs.iter().map(|a| a.length).sum::<f64>() / TAU
    }

    /// `(1/2π) ∫_X e^{iqθ} dθ` in closed form.
    pub fn kernel_integral(&self, q: i64) -> Complex64 {
        if q == 0 {
            return Complex64::new(self.haar_measure(), 0.0);
        }
        if self.is_full() {
            return Complex64::new(0.0, 0.0);
        }
        let qf = q as f64;
        self.linear_pieces()
            .map(|(a, b)| {
                // (e^{iqb} - e^{iqa}) / (2πiq) = sin(q(b-a)/2)/(πq) · e^{iq(a+b)/2}
                let half = 0.5 * (b - a);
                let amplitude = (qf * half).sin() / (PI * qf);
                Complex64::from_polar(amplitude, qf * (a + half))
            })
            .sum()
    }

    /// Kernel values for `q = -max_q ..= max_q`, indexed by `q + max_q`.
    pub fn kernel_table(&self, max_q: usize) -> Vec<Complex64> {
        let m = max_q as i64;
        (-m..=m).map(|q| self.kernel_integral(q)).collect()
    }

    /// `X ⊕ θ`.
    pub fn rotate(&self, theta: f64) -> Self {
        if self.is_full() || self.is_empty() {
            return self.clone();
        }
        let pieces: Vec<(f64, f64)> = self
            .arcs
            .iter()
            .map(|a| {
                let s = (a.start + theta).rem_euclid(TAU);
                (s, s + a.length)
            })
            .collect();
        canonicalize(&pieces)
    }

    pub fn union(&self, other: &Self) -> Self {
        let pieces: Vec<(f64, f64)> = self.linear_pieces().chain(other.linear_pieces()).collect();
        canonicalize(&pieces)
    }

    pub fn complement(&self) -> Self {
        let mut pieces = Vec::new();
        let mut cursor = 0.0;
        for (a, b) in self.linear_pieces_sorted() {
            if a > cursor {
                pieces.push((cursor, a));
            }
            cursor = cursor.max(b);
        }
        if cursor < TAU {
            pieces.push((cursor, TAU));
        }
        canonicalize(&pieces)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    /// Haar measure of `X ∩ Y`.
    pub fn overlap(&self, other: &Self) -> f64 {
        self.intersection(other).haar_measure()
    }

    /// True if `self ⊆ other` up to measure zero.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intersection(&other.complement()).is_empty()
    }

    /// `[start, end)` pairs suitable for serialization; `end` may exceed 2π.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.arcs.iter().map(|a| [a.start, a.end()]).collect()
    }

    fn linear_pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.arcs.iter().flat_map(Arc::linear_pieces)
    }

    fn linear_pieces_sorted(&self) -> Vec<(f64, f64)> {
        let mut v: Vec<_> = self.linear_pieces().collect();
        v.sort_by(|x, y| x.0.total_cmp(&y.0));
        v
    }
}

/// Canonical arc set for the union of half-open arcs `[start, end)` mod 2π.
///
/// Each pair is reduced modulo 2π; an end that reduces below its start wraps
/// through zero. A pair whose ends differ but coincide modulo 2π covers the
/// whole circle. Identical ends denote the empty arc.
pub fn normalize_arcs(raw: &[(f64, f64)]) -> Result<ArcSet> {
    let mut pieces = Vec::with_capacity(raw.len());
    for &(start, end) in raw {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::NonFinite("arc endpoint"));
        }
        if start == end {
            continue;
        }
        let s = start.rem_euclid(TAU);
        let e = end.rem_euclid(TAU);
        let length = if e > s {
            e - s
        } else if e < s {
            TAU - s + e
        } else {
            TAU
        };
        pieces.push((s, s + length));
    }
    Ok(canonicalize(&pieces))
}

/// Union of `(start, end)` arcs with `0 ≤ start < 2π`, `start < end ≤ start + 2π`.
fn canonicalize(pieces: &[(f64, f64)]) -> ArcSet {
    let mut linear: Vec<(f64, f64)> = Vec::with_capacity(pieces.len() + 1);
    for &(s, e) in pieces {
        if e - s >= TAU - ARC_EPS {
            return ArcSet::full();
        }
        if e > TAU {
            linear.push((s, TAU));
            linear.push((0.0, e - TAU));
        } else {
            linear.push((s, e));
        }
    }
    linear.retain(|(s, e)| e - s >= ARC_EPS);
    linear.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(linear.len());
    for (s, e) in linear {
        match merged.last_mut() {
            Some(last) if s <= last.1 + ARC_EPS => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }

    if let [(s, e)] = merged[..] {
        if s <= ARC_EPS && e >= TAU - ARC_EPS {
            return ArcSet::full();
        }
    }
    // Join an arc touching 2π with one starting at 0 into a single wrapping arc.
    if merged.len() >= 2 && merged[0].0 <= ARC_EPS && merged[merged.len() - 1].1 >= TAU - ARC_EPS {
        let (_, first_end) = merged.remove(0);
        let last = merged.last_mut().unwrap();
        last.1 = TAU + first_end;
    }

    let arcs = merged
        .into_iter()
        .map(|(s, e)| Arc {
            start: s,
            length: e - s,
        })
        .collect();
    ArcSet { arcs }
}

impl Serialize for ArcSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ArcSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(deserializer)?;
        let raw: Vec<(f64, f64)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
        normalize_arcs(&raw).map_err(serde::de::Error::custom)
    }
}
