//! Search for a direction `θ` whose translates `ℓℤ^d + s_jθ` fill a ball.
//!
//! Only existence of such a direction is known, so candidates are drawn from a
//! fixed low-discrepancy list and certified by their measured covering radius.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::{cartesian, norm};

use super::focusing::GOLDEN_SLOPE;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSearch {
    /// Ambient dimension `N`; directions live in `ℝ^{N−1}`.
    pub dimension: usize,
    pub lattice_spacing: f64,
    pub shifts: Vec<f64>,
    pub density_target: f64,
    pub candidates: usize,
    #[serde(default = "default_probe_step")]
    pub probe_step: f64,
    #[serde(default = "default_probe_radius")]
    pub probe_radius: f64,
}

fn default_probe_step() -> f64 {
    1.0 / 512.0
}

fn default_probe_radius() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaSearchResult {
    pub theta: Vec<f64>,
    pub covering_radius: f64,
    pub pass: bool,
    pub candidates_tried: usize,
}

impl ThetaSearch {
    fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(invalid("dimension", "need N ≥ 2"));
        }
        if !(self.lattice_spacing > 0.0 && self.probe_step > 0.0 && self.probe_radius > 0.0) {
            return Err(invalid(
                "theta_search",
                "spacing, probe step and radius must be positive",
            ));
        }
        if self.shifts.is_empty() {
            return Err(invalid("shifts", "need at least one translate"));
        }
        if self.candidates == 0 {
            return Err(invalid("candidates", "must be positive"));
        }
        Ok(())
    }

    fn probes(&self) -> Vec<Vec<f64>> {
        let d = self.dimension - 1;
        let k = (self.probe_radius / self.probe_step).floor() as i64;
        let axis: Vec<f64> = (-k..=k).map(|m| m as f64 * self.probe_step).collect();
        cartesian(&vec![axis; d])
            .into_iter()
            .filter(|p| norm(p) <= self.probe_radius)
            .collect()
    }
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while n > 0 {
        out += (n % base) as f64 * inv;
        n /= base;
        inv /= base as f64;
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic candidate directions in `ℝ^d`.
///
/// For `d = 1` these are slopes in `(0, 1)`: the golden slope, `√2 − 1`, then
/// a base-3 radical-inverse sequence. For `d ≥ 2` they are unit vectors: for
/// `d = 2` the golden-angle direction first, then normalized Halton points of
/// the cube `[−1, 1]^d`.
pub fn theta_candidates(d: usize, count: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    if d == 1 {
        out.push(vec![GOLDEN_SLOPE]);
        out.push(vec![std::f64::consts::SQRT_2 - 1.0]);
        let mut n = 1;
        while out.len() < count {
            let v = radical_inverse(n, 3);
            n += 1;
            if v > 0.0 {
                out.push(vec![v]);
            }
        }
    } else {
        if d == 2 {
            let phi = 2.0 * std::f64::consts::PI * GOLDEN_SLOPE;
            out.push(vec![phi.cos(), phi.sin()]);
        }
        let mut n = 1u64;
        while out.len() < count {
            let v: Vec<f64> = (0..d)
                .map(|i| 2.0 * radical_inverse(n, PRIMES[i % PRIMES.len()]) - 1.0)
                .collect();
            n += 1;
            let len = norm(&v);
            if len > 1e-3 {
                out.push(v.iter().map(|c| c / len).collect());
            }
        }
    }
    out.truncate(count);
    out
}

fn lattice_distance(p: &[f64], shift: &[f64], spacing: f64) -> f64 {
    p.iter()
        .zip(shift)
        .map(|(a, b)| {
            let u = (a - b) / spacing;
            ((u - u.round()) * spacing).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Largest distance from a probe point of the ball to `∪_j (ℓℤ^d + s_jθ)`.
pub fn covering_radius(search: &ThetaSearch, theta: &[f64]) -> Result<f64> {
    search.validate()?;
    if theta.len() != search.dimension - 1 {
        return Err(invalid("theta", format!("need {} components", search.dimension - 1)));
    }
    let offsets: Vec<Vec<f64>> = search
        .shifts
        .iter()
        .map(|s| theta.iter().map(|c| s * c).collect())
        .collect();
    Ok(search
        .probes()
        .iter()
        .map(|p| {
            offsets
                .iter()
                .map(|o| lattice_distance(p, o, search.lattice_spacing))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max))
}

/// Returns the candidate with the smallest covering radius; `pass` reports
/// whether it meets the density target.
pub fn theta_search(search: &ThetaSearch) -> Result<ThetaSearchResult> {
    search.validate()?;
    let candidates = theta_candidates(search.dimension - 1, search.candidates);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for theta in &candidates {
        let radius = covering_radius(search, theta)?;
        if best.as_ref().is_none_or(|(_, b)| radius < *b) {
            best = Some((theta.clone(), radius));
        }
    }
    let (theta, covering_radius) = best.expect("at least one candidate");
    Ok(ThetaSearchResult {
        pass: covering_radius <= search.density_target,
        theta,
        covering_radius,
        candidates_tried: candidates.len(),
    })
}
