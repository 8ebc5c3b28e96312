//! Scaling experiments that confront the maximal estimates with data.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::counterexamples::focusing::evolution_time;
use crate::counterexamples::{
    build_focusing, build_nonelliptic, nonelliptic_ratio, predicted_focusing_bounds, FocusingDatum, FocusingOverrides,
    FocusingSpec, NonellipticSpec,
};
use crate::error::{invalid, Error, Result};
use crate::sequence::beta;
use crate::spectral::{annulus_atoms, SpatialGrid, SpectralField, SymbolKind};

use super::fit::fit_power_law;
use super::profile::{ball_l2, for_each_in_ball, maximal_profile, GridEvaluator, TimeSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    pub ratio: f64,
    /// `C·param^{target}` with `C` the geometric-mean prefactor.
    pub predicted: f64,
    /// `ln ratio − ln(fitted power law)`
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub fitted_exponent: f64,
    pub stderr: f64,
    pub target_exponent: f64,
}

impl SweepResult {
    pub fn from_measurements(data: &[(f64, f64)], target_exponent: f64) -> Result<Self> {
        let fit = fit_power_law(data)?;
        let log_c = data.iter().map(|(p, q)| q.ln() - target_exponent * p.ln()).sum::<f64>() / data.len() as f64;
        let rows = data
            .iter()
            .map(|(p, q)| SweepRow {
                param: *p,
                ratio: *q,
                predicted: (log_c + target_exponent * p.ln()).exp(),
                residual: q.ln() - (fit.intercept + fit.exponent * p.ln()),
            })
            .collect();
        Ok(Self {
            rows,
            fitted_exponent: fit.exponent,
            stderr: fit.stderr,
            target_exponent,
        })
    }

    pub fn within(&self, tolerance: f64) -> bool {
        (self.fitted_exponent - self.target_exponent).abs() <= tolerance
    }
}

/// Elliptic focusing data across a range of `R` in resonant mode: the lattice
/// scale stays `S = R^{(r+1)β/2}` (so times remain in `S^{−2}ℤ`) and the
/// cutoff is `ρ = rho_cells · 2πS`, which fixes the number of lattice balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocusingSweep {
    pub dimension: usize,
    pub r: f64,
    pub eps: f64,
    pub theta: Vec<f64>,
    pub scales: Vec<f64>,
    pub s: f64,
    pub rho_cells: f64,
}

impl FocusingSweep {
    pub fn spec_for(&self, scale: f64) -> FocusingSpec {
        let b = beta(self.r, self.dimension);
        let lattice_scale = scale.powf((self.r + 1.0) * b / 2.0);
        let mut spec = FocusingSpec::new(self.dimension, self.r, scale, self.theta.clone());
        spec.eps = self.eps;
        spec.overrides = Some(FocusingOverrides {
            lattice_scale,
            freq_cutoff: self.rho_cells * 2.0 * PI * lattice_scale,
        });
        spec
    }
}

fn axis_grid(spread: f64, half_width: f64) -> Vec<f64> {
    let step = if spread > 0.0 {
        (1.0 / 64.0f64).min(1.0 / (8.0 * spread))
    } else {
        1.0 / 64.0
    };
    let n = ((half_width / step) * (1.0 + 1e-12)).floor() as i64;
    (-n..=n).map(|m| m as f64 * step).collect()
}

/// `‖sup_j |e^{i(t_j/2π)Δ}f|‖_{L²(B(0,radius))}` using `f̂ = f̂₁ ⊗ f̂₂`:
/// the modulus factors into `|E₁(x₁)|·|E₂(x̄)|` at each time, so only the
/// two factors are evaluated on their own grids.
pub fn focusing_ball_l2(datum: &FocusingDatum, radius: f64) -> Result<f64> {
    let kind = SymbolKind::Elliptic;
    let x1 = axis_grid(datum.factor1.axis_spread()[0], radius);
    let rest_axes: Vec<Vec<f64>> = datum
        .factor2
        .axis_spread()
        .iter()
        .map(|s| axis_grid(*s, radius))
        .collect();
    let e1 = GridEvaluator::with_axes(&datum.factor1, std::slice::from_ref(&x1));
    let e2 = GridEvaluator::with_axes(&datum.factor2, &rest_axes);
    let n_rest: usize = rest_axes.iter().map(Vec::len).product();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in datum.times.values() {
        let tau = evolution_time(*t);
        let mut va = vec![0.0; x1.len()];
        e1.moduli(tau, &kind, &mut va);
        let mut vb = vec![0.0; n_rest];
        e2.moduli(tau, &kind, &mut vb);
        a.push(va);
        b.push(vb);
    }
    let mut axes = vec![x1.clone()];
    axes.extend(rest_axes.iter().cloned());
    let cell: f64 = axes
        .iter()
        .map(|ax| if ax.len() > 1 { ax[1] - ax[0] } else { 1.0 })
        .product();
    let center = vec![0.0; axes.len()];
    let mut sum = 0.0;
    for_each_in_ball(&axes, &center, radius, |flat| {
        let (i1, p) = (flat / n_rest, flat % n_rest);
        let sup = a.iter().zip(&b).map(|(va, vb)| va[i1] * vb[p]).fold(0.0, f64::max);
        sum += sup * sup;
    });
    Ok((sum * cell).sqrt())
}

pub fn run_r_sweep(sweep: &FocusingSweep) -> Result<SweepResult> {
    if sweep.scales.len() < 3 {
        return Err(Error::DegenerateFit(format!(
            "need at least 3 values of R, got {}",
            sweep.scales.len()
        )));
    }
    if !(sweep.rho_cells > 0.0) {
        return Err(invalid("rho_cells", "must be positive"));
    }
    let mut data = Vec::with_capacity(sweep.scales.len());
    let mut target = 0.0;
    for &scale in &sweep.scales {
        let spec = sweep.spec_for(scale);
        let datum = build_focusing(&spec)?;
        let ratio = focusing_ball_l2(&datum, 1.0)? / datum.field.sobolev_norm(sweep.s);
        target = predicted_focusing_bounds(&spec, sweep.s)?.ratio_exponent;
        data.push((scale, ratio));
    }
    SweepResult::from_measurements(&data, target)
}

/// Nonelliptic data at fixed `(r, ε, b)` across `M`; the ratio is taken at
/// the critical regularity unless `s` is given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonellipticSweep {
    pub r: f64,
    pub eps: f64,
    pub b: f64,
    pub ms: Vec<f64>,
    pub dimension: usize,
    #[serde(default)]
    pub s: Option<f64>,
}

pub fn nonelliptic_sweep(sweep: &NonellipticSweep) -> Result<SweepResult> {
    let mut data = Vec::with_capacity(sweep.ms.len());
    let mut target = 0.0;
    for &m in &sweep.ms {
        let spec = NonellipticSpec {
            r: sweep.r,
            eps: sweep.eps,
            b: sweep.b,
            m,
        };
        let datum = build_nonelliptic(&spec, sweep.dimension)?;
        let s = sweep.s.unwrap_or_else(|| spec.critical_regularity());
        data.push((m, nonelliptic_ratio(&datum, s)?));
        target = spec.growth_exponent();
    }
    SweepResult::from_measurements(&data, target)
}

/// `‖f‖_{L²(ℝ^N)} = (2π)^{N/2} (Σ|f̂|² w)^{1/2}` under the transform convention.
fn spatial_l2(field: &SpectralField) -> f64 {
    (2.0 * PI).powf(field.dimension() as f64 / 2.0) * field.l2_norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalConfig {
    pub dimension: usize,
    /// Lattice step of the annulus quadrature.
    pub atom_step: f64,
}

impl Default for IntervalConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            atom_step: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalReport {
    pub lambda: f64,
    pub interval_length: f64,
    /// `‖sup_{t∈I}|e^{itL}f|‖_{L²(B(0,1))} / ‖f‖_{L²}`
    pub ratio: f64,
    pub samples: usize,
}

/// Sup over `I = [0, |I|]` for the indicator of `{λ/2 ≤ |ξ| < λ}` under the
/// nonelliptic symbol `ξ₁² − ξ₂² ± …`.
pub fn interval_sup_experiment(lambda: f64, interval_length: f64, cfg: &IntervalConfig) -> Result<IntervalReport> {
    if !(lambda >= 1.0) {
        return Err(invalid("lambda", "must be at least 1"));
    }
    let (lo, hi) = (lambda.powi(-2), 1.0 / lambda);
    if !(interval_length >= lo * (1.0 - 1e-12) && interval_length <= hi * (1.0 + 1e-12)) {
        return Err(invalid("interval_length", format!("must lie in [{lo}, {hi}]")));
    }
    let atoms = annulus_atoms(cfg.dimension, lambda / 2.0, lambda, cfg.atom_step, 0.5, |_| {
        Complex64::new(1.0, 0.0)
    })?;
    let field = SpectralField::new(cfg.dimension, atoms)?;
    let kind = SymbolKind::nonelliptic(cfg.dimension);
    let times = TimeSet::sampled_interval(&field, &kind, 0.0, interval_length)?;
    let grid = SpatialGrid::for_field(&field, vec![0.0; cfg.dimension], 1.0)?;
    let profile = maximal_profile(&field, &times, &kind, &grid)?;
    Ok(IntervalReport {
        lambda,
        interval_length,
        ratio: ball_l2(&profile, &vec![0.0; cfg.dimension], 1.0)? / spatial_l2(&field),
        samples: profile.times.len(),
    })
}

/// Random band-limited field: smooth bumps in frequency with random centers
/// inside an annulus, each carrying a random spatial shift and phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpField {
    pub dimension: usize,
    pub inner: f64,
    pub outer: f64,
    pub atom_step: f64,
    pub atom_offset: f64,
    pub bumps: usize,
    /// Bump radius as a fraction of the annulus width.
    pub width_fraction: f64,
    /// Spatial shifts are drawn from `B(0, shift_radius)`.
    pub shift_radius: f64,
    #[serde(default)]
    pub profile: BumpProfile,
}

/// Frequency profile of one bump, as a function of `|ξ − c|²/w²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// `exp(−1/(1 − u²))`
    #[default]
    Compact,
    /// `exp(−36u²)` cut at `u = 1`, where it is below `3e−16`; its spatial
    /// tail is Gaussian.
    Gaussian,
}

impl BumpProfile {
    fn value(self, u2: f64) -> f64 {
        if u2 >= 1.0 {
            return 0.0;
        }
        match self {
            Self::Compact => (-1.0 / (1.0 - u2)).exp(),
            Self::Gaussian => (-36.0 * u2).exp(),
        }
    }
}

fn random_in_ball(d: usize, radius: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..d).map(|_| rng.gen_range(-radius..radius)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            return p;
        }
    }
}

pub fn random_bump_field(cfg: &BumpField, rng: &mut impl Rng) -> Result<SpectralField> {
    if cfg.bumps == 0 || !(cfg.outer > cfg.inner) || !(cfg.width_fraction > 0.0 && cfg.width_fraction < 0.5) {
        return Err(invalid(
            "bump_field",
            "need bumps > 0, outer > inner, width fraction in (0, 1/2)",
        ));
    }
    let d = cfg.dimension;
    let w = cfg.width_fraction * (cfg.outer - cfg.inner);
    // Bumps stay clear of the annulus edges, so the field is smooth in frequency.
    let bumps: Vec<(Vec<f64>, Vec<f64>, Complex64)> = (0..cfg.bumps)
        .map(|_| {
            let radius = rng.gen_range(cfg.inner + w..cfg.outer - w);
            let mut dir = random_in_ball(d, 1.0, rng);
            let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
            dir.iter_mut().for_each(|v| *v *= radius / len);
            let shift = random_in_ball(d, cfg.shift_radius, rng);
            let coef = Complex64::from_polar(rng.gen_range(0.5..1.0), rng.gen_range(0.0..2.0 * PI));
            (dir, shift, coef)
        })
        .collect();
    let atoms = annulus_atoms(d, cfg.inner, cfg.outer, cfg.atom_step, cfg.atom_offset, |xi| {
        bumps
            .iter()
            .map(|(c, y, a)| {
                let u2: f64 = xi.iter().zip(c).map(|(p, q)| (p - q).powi(2)).sum::<f64>() / (w * w);
                let phase: f64 = -xi.iter().zip(y).map(|(p, q)| p * q).sum::<f64>();
                a * Complex64::from_polar(cfg.profile.value(u2), phase)
            })
            .sum()
    })?;
    let atoms = atoms
        .into_iter()
        .filter(|a| a.amplitude.norm() > 0.0)
        .collect::<Vec<_>>();
    if atoms.is_empty() {
        return Err(Error::Empty("bump field has no support on the atom lattice"));
    }
    SpectralField::new(d, atoms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeRow {
    pub trial: usize,
    pub ratio: f64,
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortTimeReport {
    pub k: f64,
    pub j: f64,
    /// `2^{(2k−j)N/(2(N+1))}`
    pub scale_factor: f64,
    pub rows: Vec<ShortTimeRow>,
    pub max_normalized: f64,
}

/// For random fields supported in `{2^{k−1} ≤ |ξ| < 2^k}`, measures
/// `‖sup_{0<t<2^{−j}}|e^{itΔ}f|‖_{L²(B(0,1))} / ‖f‖_{L²}` and divides by
/// `2^{(2k−j)N/(2(N+1))}`.
pub fn short_time_maximal_experiment(
    k: f64,
    j: f64,
    trials: usize,
    dimension: usize,
    rng: &mut impl Rng,
) -> Result<ShortTimeReport> {
    if !(k > 0.0 && j > k && j < 2.0 * k) {
        return Err(invalid("j", "need 0 < k < j < 2k"));
    }
    if trials == 0 {
        return Err(invalid("trials", "must be positive"));
    }
    let n = dimension as f64;
    let scale_factor = 2f64.powf((2.0 * k - j) * n / (2.0 * (n + 1.0)));
    let cfg = BumpField {
        dimension,
        inner: 2f64.powf(k - 1.0),
        outer: 2f64.powf(k),
        atom_step: 1.0,
        atom_offset: 0.5,
        bumps: 4,
        width_fraction: 0.25,
        shift_radius: 0.5,
        profile: BumpProfile::Compact,
    };
    let kind = SymbolKind::Elliptic;
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let field = random_bump_field(&cfg, rng)?;
        let ratio = interval_ratio(&field, &kind, 2f64.powf(-j))?;
        rows.push(ShortTimeRow {
            trial,
            ratio,
            normalized: ratio / scale_factor,
        });
    }
    let max_normalized = rows.iter().map(|r| r.normalized).fold(0.0, f64::max);
    Ok(ShortTimeReport {
        k,
        j,
        scale_factor,
        rows,
        max_normalized,
    })
}

/// `‖sup_{0≤t≤T}|e^{itσ}f|‖_{L²(B(0,1))} / ‖f‖_{L²}` with admissible sampling.
pub fn interval_ratio(field: &SpectralField, kind: &SymbolKind, length: f64) -> Result<f64> {
    let times = TimeSet::sampled_interval(field, kind, 0.0, length)?;
    let grid = SpatialGrid::for_field(field, vec![0.0; field.dimension()], 1.0)?;
    let profile = maximal_profile(field, &times, kind, &grid)?;
    Ok(ball_l2(&profile, &vec![0.0; field.dimension()], 1.0)? / spatial_l2(field))
}
