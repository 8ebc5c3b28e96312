//! Elliptic focusing data: an interval in `ξ₁` times a sparse frequency
//! lattice of tiny balls in `ξ̄`, both shifted far from the origin.
//!
//! The evolution is taken at times `t/(2π)`. With frequency lattice `2πS·ℤ`,
//! spatial probes `S^{−1}ℤ` and times in `S^{−2}ℤ`, every lattice frequency
//! contributes an integer multiple of `2π` to the phase at a probe, so the
//! contributions add up coherently.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sequence::{beta, lattice_times, TimeSequence};
use crate::spectral::{ball_atoms, ball_volume, box_atoms, cartesian, norm, SpectralField, SymbolKind};

/// Radius of every ball in the `ξ̄` lattice.
pub const BALL_RADIUS: f64 = 1e-3;

/// Absolute replacements for the `R`-derived lattice scale and cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusingOverrides {
    pub lattice_scale: f64,
    pub freq_cutoff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusingSpec {
    pub dimension: usize,
    pub r: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// The large parameter `R`.
    pub scale: f64,
    /// For `N = 2` a single number in `(0, 1)`; otherwise a unit vector in `ℝ^{N−1}`.
    pub theta: Vec<f64>,
    #[serde(default)]
    pub overrides: Option<FocusingOverrides>,
    /// Minimum quadrature points on the `ξ₁` interval.
    #[serde(default = "default_interval_points")]
    pub interval_points: usize,
    /// Quadrature points per axis on each lattice ball.
    #[serde(default = "default_ball_points")]
    pub ball_points: usize,
}

fn default_eps() -> f64 {
    0.01
}

fn default_interval_points() -> usize {
    16
}

fn default_ball_points() -> usize {
    12
}

/// `(√5 − 1)/2`
pub const GOLDEN_SLOPE: f64 = 0.618_033_988_749_894_8;

impl FocusingSpec {
    pub fn new(dimension: usize, r: f64, scale: f64, theta: Vec<f64>) -> Self {
        Self {
            dimension,
            r,
            eps: default_eps(),
            scale,
            theta,
            overrides: None,
            interval_points: default_interval_points(),
            ball_points: default_ball_points(),
        }
    }

    /// Chooses `R` so that the default lattice scale `R^{(r+1)β/2}` equals
    /// `lattice_scale`, keeping time spacing `S^{−2}`, and fixes the cutoff.
    pub fn resonant(dimension: usize, r: f64, lattice_scale: f64, freq_cutoff: f64, theta: Vec<f64>) -> Self {
        let b = beta(r, dimension);
        let scale = lattice_scale.powf(2.0 / (b * (r + 1.0)));
        let mut spec = Self::new(dimension, r, scale, theta);
        spec.overrides = Some(FocusingOverrides {
            lattice_scale,
            freq_cutoff,
        });
        spec
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dimension;
        if n < 2 {
            return Err(invalid("dimension", "focusing data needs N ≥ 2"));
        }
        let rmax = n as f64 / (n as f64 + 1.0);
        if !(self.r > 0.0 && self.r <= rmax * (1.0 + 1e-12)) {
            return Err(invalid("r", format!("must lie in (0, {rmax}]")));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(invalid("eps", "must lie in (0, 1)"));
        }
        if !(self.scale > 1.0 && self.scale.is_finite()) {
            return Err(invalid("scale", "R must exceed 1"));
        }
        if self.theta.len() != n - 1 || self.theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("theta", format!("need {} finite components", n - 1)));
        }
        if n == 2 {
            if !(self.theta[0] > 0.0 && self.theta[0] < 1.0) {
                return Err(invalid("theta", "for N = 2 theta must lie in (0, 1)"));
            }
        } else if (norm(&self.theta) - 1.0).abs() > 1e-9 {
            return Err(invalid("theta", "must be a unit vector"));
        }
        if let Some(o) = &self.overrides {
            if !(o.lattice_scale > 0.0 && o.freq_cutoff > 0.0) {
                return Err(invalid("overrides", "lattice scale and cutoff must be positive"));
            }
        }
        if self.interval_points == 0 || self.ball_points == 0 {
            return Err(invalid("quadrature", "point counts must be positive"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        beta(self.r, self.dimension)
    }

    /// `S`
    pub fn lattice_scale(&self) -> f64 {
        self.overrides.map_or_else(
            || self.scale.powf((self.r + 1.0) * self.beta() / 2.0),
            |o| o.lattice_scale,
        )
    }

    /// `ρ`
    pub fn freq_cutoff(&self) -> f64 {
        self.overrides
            .map_or_else(|| self.scale.powf(1.0 - self.eps), |o| o.freq_cutoff)
    }

    /// `R^{−β(r+1)}`
    pub fn time_spacing(&self) -> f64 {
        self.scale.powf(-self.beta() * (self.r + 1.0))
    }

    /// `R^{−β}`
    pub fn time_upper(&self) -> f64 {
        self.scale.powf(-self.beta())
    }

    /// Half-width `R^{β/2}/100` of the `ξ₁` interval.
    pub fn interval_half_width(&self) -> f64 {
        self.scale.powf(self.beta() / 2.0) / 100.0
    }
}

pub struct FocusingDatum {
    /// `f` with `f̂ = f̂₁ ⊗ f̂₂`.
    pub field: SpectralField,
    /// `f₁`, one-dimensional.
    pub factor1: SpectralField,
    /// `f₂` on `ℝ^{N−1}`.
    pub factor2: SpectralField,
    /// Unshifted indicator of the `ξ₁` interval.
    pub interval: SpectralField,
    /// Unshifted indicator of the ball lattice.
    pub lattice: SpectralField,
    pub omega1_measure: f64,
    pub omega2_measure: f64,
    pub omega2_centers: Vec<Vec<f64>>,
    /// Spatial probes `S^{−1}m`, `|m| ≤ 2S`.
    pub u0_centers: Vec<Vec<f64>>,
    pub support_radius: f64,
    pub times: TimeSequence,
}

impl FocusingDatum {
    /// `e^{i(t/2π)Δ} f(x)`
    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<Complex64> {
        self.field.evaluate(x, evolution_time(t), &SymbolKind::Elliptic)
    }
}

/// The elliptic evolution runs at `t/(2π)` for a sequence time `t`.
pub fn evolution_time(t: f64) -> f64 {
    t / (2.0 * PI)
}

fn integer_points_in_ball(d: usize, radius: f64) -> Vec<Vec<i64>> {
    let k = radius.floor() as i64;
    let axis: Vec<f64> = (-k..=k).map(|v| v as f64).collect();
    cartesian(&vec![axis; d])
        .into_iter()
        .filter(|p| norm(p) <= radius * (1.0 + 1e-12))
        .map(|p| p.iter().map(|v| *v as i64).collect())
        .collect()
}

pub fn build_focusing(spec: &FocusingSpec) -> Result<FocusingDatum> {
    spec.validate()?;
    let d = spec.dimension - 1;
    let s = spec.lattice_scale();
    let rho = spec.freq_cutoff();
    let big_r = spec.scale;

    let w = spec.interval_half_width();
    let n1 = spec.interval_points.max((16.0 * w).ceil() as usize);
    let interval = SpectralField::new(1, box_atoms(&[-w], &[w], &[n1], |_| Complex64::new(1.0, 0.0))?)?;

    let spacing = 2.0 * PI * s;
    let omega2_centers: Vec<Vec<f64>> = integer_points_in_ball(d, rho / spacing)
        .into_iter()
        .map(|m| m.iter().map(|v| *v as f64 * spacing).collect::<Vec<_>>())
        .filter(|c| norm(c) < rho)
        .collect();
    if omega2_centers.is_empty() {
        return Err(Error::EmptyLattice(format!(
            "no point of 2πS·ℤ^{d} lies within ρ = {rho}; set overrides (lattice_scale, freq_cutoff)"
        )));
    }
    let mut lattice_atoms = Vec::new();
    for c in &omega2_centers {
        lattice_atoms.extend(ball_atoms(c, BALL_RADIUS, spec.ball_points, |_| {
            Complex64::new(1.0, 0.0)
        })?);
    }
    let lattice = SpectralField::new(d, lattice_atoms)?;

    let factor1 = interval.translated(&[-PI * big_r])?;
    let shift: Vec<f64> = spec.theta.iter().map(|v| -PI * big_r * v).collect();
    let factor2 = lattice.translated(&shift)?;
    let field = factor1.tensor(&factor2)?;

    let u0_centers = integer_points_in_ball(d, 2.0 * s)
        .into_iter()
        .map(|m| m.iter().map(|v| *v as f64 / s).collect())
        .collect();

    Ok(FocusingDatum {
        support_radius: field.support_radius(),
        field,
        factor1,
        factor2,
        interval,
        lattice,
        omega1_measure: 2.0 * w,
        omega2_measure: omega2_centers.len() as f64 * ball_volume(d, BALL_RADIUS),
        omega2_centers,
        u0_centers,
        times: focusing_time_sequence(spec)?,
    })
}

/// `R^{−β(r+1)}ℤ ∩ [R^{−β(r+1)}, R^{−β})`, decreasing.
pub fn focusing_time_sequence(spec: &FocusingSpec) -> Result<TimeSequence> {
    spec.validate()?;
    let times = lattice_times(spec.time_spacing(), spec.time_upper());
    if times.is_empty() {
        return Err(Error::EmptyLattice(format!(
            "no multiple of {} lies below {}",
            spec.time_spacing(),
            spec.time_upper()
        )));
    }
    TimeSequence::new(times, spec.r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub time: f64,
    pub min_ratio: f64,
    pub argmin_probe: Vec<f64>,
    pub pass: bool,
}

/// `min_m |e^{i(t/2π)Δ}g(x̄_m)| / |Ω₂|` at an arbitrary time `t`.
pub fn resonance_at_time(datum: &FocusingDatum, t: f64) -> ResonanceReport {
    let tau = evolution_time(t);
    let mut min_ratio = f64::INFINITY;
    let mut argmin = Vec::new();
    for p in &datum.u0_centers {
        let v = datum.lattice.evaluate_unchecked(p, tau, &SymbolKind::Elliptic).norm() / datum.omega2_measure;
        if v < min_ratio {
            min_ratio = v;
            argmin = p.clone();
        }
    }
    ResonanceReport {
        time: t,
        min_ratio,
        argmin_probe: argmin,
        pass: min_ratio >= 0.5,
    }
}

/// Resonance check at the `j`-th sequence time (1-based).
pub fn verify_resonance(spec: &FocusingSpec, datum: &FocusingDatum, j: usize) -> Result<ResonanceReport> {
    spec.validate()?;
    let t = *datum
        .times
        .values()
        .get(j.wrapping_sub(1))
        .ok_or_else(|| invalid("j", format!("index must lie in 1..={}", datum.times.len())))?;
    Ok(resonance_at_time(datum, t))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct F1Report {
    /// 1-based index of the chosen time.
    pub index: usize,
    pub time: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Picks the smallest `t_j` with `R t_j ∈ [x₁, x₁ + R^{−β/2})` and reports
/// `|e^{i(t_j/2π)Δ}f₁(x₁)| / |Ω₁|`.
pub fn verify_f1_focusing(spec: &FocusingSpec, datum: &FocusingDatum, x1: f64) -> Result<F1Report> {
    spec.validate()?;
    let big_r = spec.scale;
    let hi = 0.5 * big_r.powf(1.0 - spec.beta());
    if !(x1 > 0.0 && x1 < hi) {
        return Err(invalid("x1", format!("must lie in (0, {hi})")));
    }
    let window = big_r.powf(-spec.beta() / 2.0);
    let (idx, t) = datum
        .times
        .values()
        .iter()
        .enumerate()
        .filter(|(_, t)| big_r * **t >= x1 && big_r * **t < x1 + window)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, t)| (i, *t))
        .ok_or_else(|| Error::NoAdmissibleTime(format!("no R·t_j in [{x1}, {})", x1 + window)))?;
    let ratio = datum
        .factor1
        .evaluate_unchecked(&[x1], evolution_time(t), &SymbolKind::Elliptic)
        .norm()
        / datum.omega1_measure;
    Ok(F1Report {
        index: idx + 1,
        time: t,
        ratio,
        pass: ratio >= 0.9,
    })
}

/// Closed-form lower bound for `‖sup|e^{itΔ}f|‖_{L²(B(0,1))}` and upper bound
/// for `‖f‖_{H^s}` as powers of `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusingBounds {
    pub lower: f64,
    pub upper: f64,
    pub lower_exponent: f64,
    pub upper_exponent: f64,
    /// Exponent of `lower / upper`.
    pub ratio_exponent: f64,
}

pub fn predicted_focusing_bounds(spec: &FocusingSpec, s: f64) -> Result<FocusingBounds> {
    spec.validate()?;
    let b = spec.beta();
    let n1 = spec.dimension as f64 - 1.0;
    let gap = 1.0 - (spec.r + 1.0) * b / 2.0;
    let lower_exponent = (1.0 - b) / 2.0 + b / 2.0 + n1 * gap - spec.eps;
    let upper_exponent = s + b / 4.0 + n1 / 2.0 * gap;
    Ok(FocusingBounds {
        lower: spec.scale.powf(lower_exponent),
        upper: spec.scale.powf(upper_exponent),
        lower_exponent,
        upper_exponent,
        ratio_exponent: lower_exponent - upper_exponent,
    })
}
