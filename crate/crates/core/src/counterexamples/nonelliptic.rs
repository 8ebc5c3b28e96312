//! Focusing data for the nonelliptic evolution `e^{itξ₁ξ₂}` (and
//! `ξ₁ξ₂ ± ξ₃²` in three dimensions).
//!
//! `f̂ = λ^{−1}χ_{[0,λ]×[−λ−1,−λ]}` drifts along `x₁` with speed `λ`; for each
//! `x` in the thin box `U` one of the sequence times brings the bulk of the
//! phase below `3/1000`, so the maximal function exceeds `1/2` on all of `U`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::maximal::{ball_l2, maximal_profile, TimeSet};
use crate::sequence::{lattice_count, TimeSequence};
use crate::spectral::{box_atoms, SpatialGrid, SpectralField, SymbolKind};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonellipticSpec {
    pub r: f64,
    pub eps: f64,
    pub b: f64,
    #[serde(rename = "M")]
    pub m: f64,
}

impl NonellipticSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(invalid("r", "must lie in (0, 1]"));
        }
        if !(self.eps > 0.0 && self.eps < self.r) {
            return Err(invalid("eps", "must lie in (0, r)"));
        }
        if !(self.b > 0.0 && self.b < 1.0) {
            return Err(invalid("b", "must lie in (0, 1)"));
        }
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return Err(invalid("M", "must be at least 1"));
        }
        let c = self.m * self.b.powf(1.0 - self.r + self.eps);
        if c > 1.0 + 1e-12 {
            return Err(invalid("M", format!("M·b^(1−r+ε) = {c} exceeds 1")));
        }
        Ok(())
    }

    /// `q = r − ε + 1`
    fn q(&self) -> f64 {
        self.r - self.eps + 1.0
    }

    /// `λ = M^{1/2} b^{−(r−ε+1)/2} / 1000`
    pub fn lambda(&self) -> f64 {
        self.m.sqrt() * self.b.powf(-self.q() / 2.0) / 1000.0
    }

    /// `2 M^{−1} b^{r−ε+1}`
    pub fn time_spacing(&self) -> f64 {
        2.0 / self.m * self.b.powf(self.q())
    }

    /// `(r − ε)/(r − ε + 1)`
    pub fn critical_regularity(&self) -> f64 {
        (self.r - self.eps) / self.q()
    }

    /// `1/(2(r − ε + 1))`, the growth exponent in `M`.
    pub fn growth_exponent(&self) -> f64 {
        1.0 / (2.0 * self.q())
    }
}

/// Quadrature density of the frequency box.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxQuadrature {
    pub min_points: usize,
    /// Cells per unit frequency length.
    pub per_unit: f64,
}

impl Default for BoxQuadrature {
    fn default() -> Self {
        Self {
            min_points: 12,
            per_unit: 8.0,
        }
    }
}

pub struct NonellipticDatum {
    pub spec: NonellipticSpec,
    pub dimension: usize,
    pub field: SpectralField,
    pub kind: SymbolKind,
    pub lambda: f64,
    pub u_lo: Vec<f64>,
    pub u_hi: Vec<f64>,
    pub times: TimeSequence,
    pub spacing: f64,
}

pub fn build_nonelliptic(spec: &NonellipticSpec, dimension: usize) -> Result<NonellipticDatum> {
    build_nonelliptic_with(spec, dimension, BoxQuadrature::default())
}

pub fn build_nonelliptic_with(
    spec: &NonellipticSpec,
    dimension: usize,
    quad: BoxQuadrature,
) -> Result<NonellipticDatum> {
    spec.validate()?;
    let kind = match dimension {
        2 => SymbolKind::Hyperbolic2D,
        3 => SymbolKind::Saddle3D { sign: 1 },
        _ => return Err(invalid("dimension", "nonelliptic data is built for N = 2 or 3")),
    };
    let lambda = spec.lambda();
    let mut lo = vec![0.0, -lambda - 1.0];
    let mut hi = vec![lambda, -lambda];
    if dimension == 3 {
        lo.push(0.0);
        hi.push(1.0);
    }
    let points: Vec<usize> = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| quad.min_points.max((quad.per_unit * (b - a)).ceil() as usize))
        .collect();
    let amp = Complex64::new(1.0 / lambda, 0.0);
    let field = SpectralField::new(dimension, box_atoms(&lo, &hi, &points, |_| amp)?)?;

    let spacing = spec.time_spacing();
    let count = lattice_count(spacing, spec.b) + 1;
    let values = (0..count).map(|k| spec.b - k as f64 * spacing).collect();
    let times = TimeSequence::new(values, spec.r)?;

    let mut u_lo = vec![0.0, -1e-3];
    let mut u_hi = vec![lambda * spec.b / 2.0, 1e-3];
    if dimension == 3 {
        u_lo.push(-1e-3);
        u_hi.push(1e-3);
    }
    Ok(NonellipticDatum {
        spec: spec.clone(),
        dimension,
        field,
        kind,
        lambda,
        u_lo,
        u_hi,
        times,
        spacing,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonellipticReport {
    /// Fraction of samples with `sup_n |e^{it_n□}f(x)| > 1/2`.
    pub fraction: f64,
    pub min_sup: f64,
    pub samples: usize,
}

/// One sampled point of `U` with `sup_n |e^{it_n□}f(x)|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonellipticSample {
    pub x: Vec<f64>,
    pub sup: f64,
}

/// Samples the open box `U` uniformly (seeded) and evaluates every sequence time.
pub fn sample_nonelliptic(datum: &NonellipticDatum, sample_count: usize, seed: u64) -> Result<Vec<NonellipticSample>> {
    if sample_count == 0 {
        return Err(invalid("sample_count", "must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(sample_count);
    for _ in 0..sample_count {
        let x: Vec<f64> = datum
            .u_lo
            .iter()
            .zip(&datum.u_hi)
            .map(|(a, b)| loop {
                let v = rng.gen_range(*a..*b);
                if v > *a {
                    break v;
                }
            })
            .collect();
        let sup = datum
            .times
            .values()
            .iter()
            .map(|t| datum.field.evaluate_unchecked(&x, *t, &datum.kind).norm())
            .fold(0.0, f64::max);
        out.push(NonellipticSample { x, sup });
    }
    Ok(out)
}

pub fn verify_nonelliptic(datum: &NonellipticDatum, sample_count: usize, seed: u64) -> Result<NonellipticReport> {
    let samples = sample_nonelliptic(datum, sample_count, seed)?;
    let hits = samples.iter().filter(|s| s.sup > 0.5).count();
    Ok(NonellipticReport {
        fraction: hits as f64 / sample_count as f64,
        min_sup: samples.iter().map(|s| s.sup).fold(f64::INFINITY, f64::min),
        samples: sample_count,
    })
}

/// `‖sup_n |e^{it_n□}f|‖_{L²(B(0,1))} / ‖f‖_{H^s}`.
pub fn nonelliptic_ratio(datum: &NonellipticDatum, s: f64) -> Result<f64> {
    let grid = SpatialGrid::for_field(&datum.field, vec![0.0; datum.dimension], 1.0)?;
    nonelliptic_ratio_on(datum, s, &grid)
}

pub fn nonelliptic_ratio_on(datum: &NonellipticDatum, s: f64, grid: &SpatialGrid) -> Result<f64> {
    let profile = maximal_profile(&datum.field, &TimeSet::Sequence(datum.times.clone()), &datum.kind, grid)?;
    let center = vec![0.0; datum.dimension];
    Ok(ball_l2(&profile, &center, 1.0)? / datum.field.sobolev_norm(s))
}
