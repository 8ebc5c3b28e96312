//! Band-limited functions represented on the frequency side.
//!
//! A [`SpectralField`] is a finite list of weighted frequency atoms; the
//! function it represents is the quadrature
//! `f(x) = Σ amplitude · e^{i x·ξ} · weight`, i.e. the Fourier convention
//! `f(x) = ∫ e^{i x·ξ} f̂(ξ) dξ` with no `2π` in the measure. Every norm is
//! computed on the frequency side.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// One quadrature cell of `f̂`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyAtom {
    pub xi: Vec<f64>,
    pub amplitude: Complex64,
    pub weight: f64,
}

impl FrequencyAtom {
    pub fn new(xi: Vec<f64>, amplitude: Complex64, weight: f64) -> Self {
        Self { xi, amplitude, weight }
    }

    pub fn radius(&self) -> f64 {
        norm(&self.xi)
    }
}

/// Dispersion relation `σ(ξ)` of the evolution `e^{itσ(D)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SymbolKind {
    /// `|ξ|²`
    Elliptic,
    /// `|ξ|^a`
    Fractional { a: f64 },
    /// `Σ signs[i] ξ_i²` with `signs[0] = +1`, `signs[1] = −1`.
    Nonelliptic { signs: Vec<i8> },
    /// `ξ₁ξ₂`
    Hyperbolic2D,
    /// `ξ₁ξ₂ + sign·ξ₃²`
    Saddle3D { sign: i8 },
}

impl SymbolKind {
    pub fn nonelliptic(dimension: usize) -> Self {
        let mut signs = vec![-1i8; dimension];
        signs[0] = 1;
        SymbolKind::Nonelliptic { signs }
    }

    /// The dimension this symbol is tied to, if any.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            SymbolKind::Elliptic | SymbolKind::Fractional { .. } => None,
            SymbolKind::Nonelliptic { signs } => Some(signs.len()),
            SymbolKind::Hyperbolic2D => Some(2),
            SymbolKind::Saddle3D { .. } => Some(3),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SymbolKind::Fractional { a } if !(a.is_finite() && *a > 0.0) => Err(invalid(
                "a",
                format!("fractional order must be finite and positive, got {a}"),
            )),
            SymbolKind::Nonelliptic { signs } => {
                if signs.len() < 2 {
                    return Err(invalid("signs", "nonelliptic symbol needs at least two axes"));
                }
                if signs.iter().any(|s| *s != 1 && *s != -1) {
                    return Err(invalid("signs", "entries must be ±1"));
                }
                if signs[0] != 1 || signs[1] != -1 {
                    return Err(invalid("signs", "pattern must start with (+1, −1)"));
                }
                Ok(())
            }
            SymbolKind::Saddle3D { sign } if *sign != 1 && *sign != -1 => Err(invalid("sign", "must be ±1")),
            _ => Ok(()),
        }
    }

    pub fn check_dimension(&self, dimension: usize) -> Result<()> {
        match self.dimension() {
            Some(d) if d != dimension => Err(Error::DimensionMismatch {
                expected: d,
                got: dimension,
            }),
            _ => Ok(()),
        }
    }

    /// `σ(ξ)` without dimension checks. Callers must have checked `xi`.
    #[inline]
    pub(crate) fn value_unchecked(&self, xi: &[f64]) -> f64 {
        match self {
            SymbolKind::Elliptic => xi.iter().map(|v| v * v).sum(),
            SymbolKind::Fractional { a } => {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                r2.powf(0.5 * a)
            }
            SymbolKind::Nonelliptic { signs } => signs.iter().zip(xi).map(|(s, v)| f64::from(*s) * v * v).sum(),
            SymbolKind::Hyperbolic2D => xi[0] * xi[1],
            SymbolKind::Saddle3D { sign } => xi[0] * xi[1] + f64::from(*sign) * xi[2] * xi[2],
        }
    }
}

/// Value of the symbol at `xi`.
pub fn symbol_value(kind: &SymbolKind, xi: &[f64]) -> Result<f64> {
    kind.validate()?;
    kind.check_dimension(xi.len())?;
    Ok(kind.value_unchecked(xi))
}

/// A band-limited function given by finitely many frequency atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    dimension: usize,
    atoms: Vec<FrequencyAtom>,
}

impl SpectralField {
    /// Validates and builds a field. Frequencies must be pairwise distinct.
    pub fn new(dimension: usize, atoms: Vec<FrequencyAtom>) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension", "must be at least 1"));
        }
        for atom in &atoms {
            if atom.xi.len() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: atom.xi.len(),
                });
            }
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::InvalidField(format!(
                    "atom weight must be finite and positive, got {}",
                    atom.weight
                )));
            }
            if !(atom.amplitude.re.is_finite() && atom.amplitude.im.is_finite()) {
                return Err(Error::InvalidField("atom amplitude is not finite".into()));
            }
            if atom.xi.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField("atom frequency is not finite".into()));
            }
        }
        let mut keys: Vec<Vec<u64>> = atoms
            .iter()
            .map(|a| a.xi.iter().map(|v| (v + 0.0).to_bits()).collect())
            .collect();
        keys.sort_unstable();
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidField("atom frequencies are not distinct".into()));
        }
        Ok(Self { dimension, atoms })
    }

    pub fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            atoms: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn atoms(&self) -> &[FrequencyAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `max |ξ|` over the atoms (0 for an empty field).
    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(FrequencyAtom::radius).fold(0.0, f64::max)
    }

    /// Largest `|σ(ξ)|` over the atoms.
    pub fn max_symbol(&self, kind: &SymbolKind) -> Result<f64> {
        kind.validate()?;
        kind.check_dimension(self.dimension)?;
        Ok(self
            .atoms
            .iter()
            .map(|a| kind.value_unchecked(&a.xi).abs())
            .fold(0.0, f64::max))
    }

    /// Per-axis extent `max ξ_i − min ξ_i` of the support.
    pub fn axis_spread(&self) -> Vec<f64> {
        (0..self.dimension)
            .map(|i| {
                let (lo, hi) = self
                    .atoms
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                        (lo.min(a.xi[i]), hi.max(a.xi[i]))
                    });
                if lo.is_finite() {
                    hi - lo
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// `Σ amplitude · e^{i(x·ξ + tσ(ξ))} · weight`.
    pub fn evaluate(&self, x: &[f64], t: f64, kind: &SymbolKind) -> Result<Complex64> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: x.len(),
            });
        }
        kind.validate()?;
        kind.check_dimension(self.dimension)?;
        Ok(self.evaluate_unchecked(x, t, kind))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[f64], t: f64, kind: &SymbolKind) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for atom in &self.atoms {
            let phase = dot(x, &atom.xi) + t * kind.value_unchecked(&atom.xi);
            acc += atom.amplitude * Complex64::from_polar(atom.weight, phase);
        }
        acc
    }

    /// Multiplies every amplitude by `e^{itσ(ξ)}`.
    pub fn propagate(&self, t: f64, kind: &SymbolKind) -> Result<SpectralField> {
        kind.validate()?;
        kind.check_dimension(self.dimension)?;
        let atoms = self
            .atoms
            .iter()
            .map(|a| FrequencyAtom {
                xi: a.xi.clone(),
                amplitude: a.amplitude * Complex64::from_polar(1.0, t * kind.value_unchecked(&a.xi)),
                weight: a.weight,
            })
            .collect();
        Ok(SpectralField {
            dimension: self.dimension,
            atoms,
        })
    }

    /// `(Σ |amplitude|² · weight)^{1/2}`, summed in atom order.
    pub fn l2_norm(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.amplitude.norm_sqr() * a.weight)
            .sum::<f64>()
            .sqrt()
    }

    /// `(Σ (1+|ξ|²)^s |amplitude|² · weight)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.l2_norm();
        }
        self.atoms
            .iter()
            .map(|a| {
                let r2: f64 = a.xi.iter().map(|v| v * v).sum();
                (1.0 + r2).powf(s) * a.amplitude.norm_sqr() * a.weight
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Frequency-side inner product `Σ f̂ · conj(ĝ) · w` over shared atoms.
    ///
    /// Atoms are matched by exact frequency; weights are taken from `self`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        if other.dimension != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let index = other.frequency_index();
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            if let Some(&j) = index.get(&key(&a.xi)) {
                acc += a.amplitude * other.atoms[j].amplitude.conj() * a.weight;
            }
        }
        Ok(acc)
    }

    /// Dyadic pieces: piece 0 holds `|ξ| < 1`, piece `k ≥ 1` holds
    /// `2^{k−1} ≤ |ξ| < 2^k`.
    pub fn littlewood_paley(&self) -> BTreeMap<u32, SpectralField> {
        let mut pieces: BTreeMap<u32, Vec<FrequencyAtom>> = BTreeMap::new();
        for atom in &self.atoms {
            pieces
                .entry(dyadic_shell(atom.radius()))
                .or_default()
                .push(atom.clone());
        }
        pieces
            .into_iter()
            .map(|(k, atoms)| {
                (
                    k,
                    SpectralField {
                        dimension: self.dimension,
                        atoms,
                    },
                )
            })
            .collect()
    }

    /// Union of disjoint fields (frequencies must not collide).
    pub fn union<'a>(dimension: usize, parts: impl IntoIterator<Item = &'a SpectralField>) -> Result<Self> {
        let mut atoms = Vec::new();
        for p in parts {
            if p.dimension != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: p.dimension,
                });
            }
            atoms.extend(p.atoms.iter().cloned());
        }
        SpectralField::new(dimension, atoms)
    }

    /// `α·self + β·other`. Atoms at equal frequencies are merged (weights must agree).
    pub fn combine(&self, alpha: Complex64, other: &SpectralField, beta: Complex64) -> Result<Self> {
        if other.dimension != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let mut atoms: Vec<FrequencyAtom> = self
            .atoms
            .iter()
            .map(|a| FrequencyAtom {
                amplitude: a.amplitude * alpha,
                ..a.clone()
            })
            .collect();
        let index = self.frequency_index();
        for b in &other.atoms {
            match index.get(&key(&b.xi)) {
                Some(&i) => {
                    if atoms[i].weight != b.weight {
                        return Err(Error::InvalidField("cannot merge atoms with different weights".into()));
                    }
                    atoms[i].amplitude += b.amplitude * beta;
                }
                None => atoms.push(FrequencyAtom {
                    amplitude: b.amplitude * beta,
                    ..b.clone()
                }),
            }
        }
        Ok(SpectralField {
            dimension: self.dimension,
            atoms,
        })
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        SpectralField {
            dimension: self.dimension,
            atoms: self
                .atoms
                .iter()
                .map(|a| FrequencyAtom {
                    amplitude: a.amplitude * factor,
                    ..a.clone()
                })
                .collect(),
        }
    }

    /// Same atoms with every frequency shifted by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: shift.len(),
            });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| FrequencyAtom {
                xi: a.xi.iter().zip(shift).map(|(v, s)| v + s).collect(),
                ..a.clone()
            })
            .collect();
        SpectralField::new(self.dimension, atoms)
    }

    /// Tensor product `f̂(ξ₁, ξ₂) = f̂₁(ξ₁) f̂₂(ξ₂)`.
    pub fn tensor(&self, other: &SpectralField) -> Result<Self> {
        let mut atoms = Vec::with_capacity(self.len() * other.len());
        for a in &self.atoms {
            for b in &other.atoms {
                let mut xi = a.xi.clone();
                xi.extend_from_slice(&b.xi);
                atoms.push(FrequencyAtom::new(xi, a.amplitude * b.amplitude, a.weight * b.weight));
            }
        }
        SpectralField::new(self.dimension + other.dimension, atoms)
    }

    fn frequency_index(&self) -> std::collections::HashMap<Vec<u64>, usize> {
        self.atoms.iter().enumerate().map(|(i, a)| (key(&a.xi), i)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&FieldDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FieldDoc = serde_json::from_str(text)?;
        doc.try_into()
    }
}

/// Shell index for the half-open dyadic partition.
pub fn dyadic_shell(radius: f64) -> u32 {
    if radius < 1.0 {
        return 0;
    }
    let mut k = radius.log2().floor().max(0.0) as u32 + 1;
    // correct floating rounding at exact powers of two
    while k > 1 && radius < 2f64.powi(k as i32 - 1) {
        k -= 1;
    }
    while radius >= 2f64.powi(k as i32) {
        k += 1;
    }
    k
}

fn key(xi: &[f64]) -> Vec<u64> {
    xi.iter().map(|v| (v + 0.0).to_bits()).collect()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Serialize, Deserialize)]
struct AtomDoc {
    xi: Vec<f64>,
    re: f64,
    im: f64,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct FieldDoc {
    dimension: usize,
    atoms: Vec<AtomDoc>,
}

impl From<&SpectralField> for FieldDoc {
    fn from(f: &SpectralField) -> Self {
        FieldDoc {
            dimension: f.dimension,
            atoms: f
                .atoms
                .iter()
                .map(|a| AtomDoc {
                    xi: a.xi.clone(),
                    re: a.amplitude.re,
                    im: a.amplitude.im,
                    weight: a.weight,
                })
                .collect(),
        }
    }
}

impl TryFrom<FieldDoc> for SpectralField {
    type Error = Error;

    fn try_from(doc: FieldDoc) -> Result<Self> {
        let atoms = doc
            .atoms
            .into_iter()
            .map(|a| FrequencyAtom::new(a.xi, Complex64::new(a.re, a.im), a.weight))
            .collect();
        SpectralField::new(doc.dimension, atoms)
    }
}

/// Uniform spatial grid `center + m ⊙ step`, `|m_i step_i| ≤ half_width`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub center: Vec<f64>,
    pub half_width: f64,
    pub step: Vec<f64>,
}

impl SpatialGrid {
    pub fn new(center: Vec<f64>, half_width: f64, step: Vec<f64>) -> Result<Self> {
        if center.len() != step.len() {
            return Err(Error::DimensionMismatch {
                expected: center.len(),
                got: step.len(),
            });
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("half_width", "must be finite and positive"));
        }
        for s in &step {
            if !(s.is_finite() && *s > 0.0 && *s <= 2.0 * half_width) {
                return Err(invalid(
                    "step",
                    format!("each step must lie in (0, 2·half_width], got {s}"),
                ));
            }
        }
        Ok(Self {
            center,
            half_width,
            step,
        })
    }

    /// Grid over `[c − h, c + h]^N` with step `min(1/64, 1/(8·spread_i))` on
    /// each axis, where `spread_i` is the frequency extent of `field` along
    /// axis `i` (the modulus of the evolution varies on that scale).
    pub fn for_field(field: &SpectralField, center: Vec<f64>, half_width: f64) -> Result<Self> {
        let step = field
            .axis_spread()
            .iter()
            .map(|s| {
                if *s > 0.0 {
                    (1.0 / 64.0f64).min(1.0 / (8.0 * s))
                } else {
                    1.0 / 64.0
                }
            })
            .collect();
        SpatialGrid::new(center, half_width, step)
    }

    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// Points per axis: `2·⌊h/step⌋ + 1`.
    pub fn axis_counts(&self) -> Vec<usize> {
        self.step
            .iter()
            .map(|s| 2 * ((self.half_width / s) * (1.0 + 1e-12)).floor() as usize + 1)
            .collect()
    }

    pub fn axis_points(&self, axis: usize) -> Vec<f64> {
        let n = self.axis_counts()[axis];
        let half = (n / 2) as f64;
        (0..n)
            .map(|m| self.center[axis] + (m as f64 - half) * self.step[axis])
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.step.iter().product()
    }

    pub fn len(&self) -> usize {
        self.axis_counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All grid points in row-major order (last axis fastest).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = (0..self.dimension()).map(|i| self.axis_points(i)).collect();
        cartesian(&axes)
    }
}

pub(crate) fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for v in axis {
                let mut p = prefix.clone();
                p.push(*v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Midpoint sub-lattice of the box `∏[lo_i, hi_i)` with `points[i]` cells per
/// axis. Weights are cell volumes so the total equals the box volume.
pub fn box_atoms(
    lo: &[f64],
    hi: &[f64],
    points: &[usize],
    amplitude: impl Fn(&[f64]) -> Complex64,
) -> Result<Vec<FrequencyAtom>> {
    if lo.len() != hi.len() || lo.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: lo.len(),
            got: hi.len().min(points.len()),
        });
    }
    let mut weight = 1.0;
    let mut axes = Vec::with_capacity(lo.len());
    for i in 0..lo.len() {
        if !(hi[i] > lo[i]) || points[i] == 0 {
            return Err(invalid("box", format!("axis {i} is empty")));
        }
        let h = (hi[i] - lo[i]) / points[i] as f64;
        weight *= h;
        axes.push((0..points[i]).map(|m| lo[i] + (m as f64 + 0.5) * h).collect::<Vec<_>>());
    }
    Ok(cartesian(&axes)
        .into_iter()
        .map(|xi| {
            let amp = amplitude(&xi);
            FrequencyAtom::new(xi, amp, weight)
        })
        .collect())
}

/// Sub-lattice of the ball `B(center, radius)` taken from the midpoint
/// lattice of its bounding cube with `points_per_axis` cells per axis.
/// Weights are equal and sum to the exact ball volume.
pub fn ball_atoms(
    center: &[f64],
    radius: f64,
    points_per_axis: usize,
    amplitude: impl Fn(&[f64]) -> Complex64,
) -> Result<Vec<FrequencyAtom>> {
    if !(radius > 0.0) || points_per_axis == 0 {
        return Err(invalid("ball", "radius and points must be positive"));
    }
    let d = center.len();
    let h = 2.0 * radius / points_per_axis as f64;
    let axis: Vec<f64> = (0..points_per_axis).map(|m| -radius + (m as f64 + 0.5) * h).collect();
    let axes = vec![axis; d];
    let offsets: Vec<Vec<f64>> = cartesian(&axes).into_iter().filter(|p| norm(p) <= radius).collect();
    if offsets.is_empty() {
        return Err(invalid("ball", "no lattice point inside the ball"));
    }
    let weight = ball_volume(d, radius) / offsets.len() as f64;
    Ok(offsets
        .into_iter()
        .map(|o| {
            let xi: Vec<f64> = o.iter().zip(center).map(|(a, c)| a + c).collect();
            let amp = amplitude(&xi);
            FrequencyAtom::new(xi, amp, weight)
        })
        .collect())
}

/// Lattice points `step·(ℤ^N + offset)` with `inner ≤ |ξ| < outer`, weighted by
/// the cell volume `step^N`.
pub fn annulus_atoms(
    dimension: usize,
    inner: f64,
    outer: f64,
    step: f64,
    offset: f64,
    amplitude: impl FnMut(&[f64]) -> Complex64,
) -> Result<Vec<FrequencyAtom>> {
    if !(outer > inner && inner >= 0.0 && step > 0.0) {
        return Err(invalid("annulus", "need 0 ≤ inner < outer and step > 0"));
    }
    let mut amplitude = amplitude;
    let m = (outer / step).ceil() as i64 + 1;
    let axis: Vec<f64> = (-m..=m).map(|q| (q as f64 + offset) * step).collect();
    let weight = step.powi(dimension as i32);
    let mut atoms = Vec::new();
    for xi in cartesian(&vec![axis; dimension]) {
        let r = norm(&xi);
        if r >= inner && r < outer {
            let amp = amplitude(&xi);
            atoms.push(FrequencyAtom::new(xi, amp, weight));
        }
    }
    Ok(atoms)
}

/// Volume of the Euclidean ball of the given radius in `d` dimensions.
pub fn ball_volume(d: usize, radius: f64) -> f64 {
    // V_d = π^{d/2} / Γ(d/2 + 1) r^d, via the two-step recurrence.
    let unit = match d {
        0 => 1.0,
        1 => 2.0,
        _ => {
            let mut v = [1.0, 2.0];
            for k in 2..=d {
                let next = 2.0 * PI / k as f64 * v[0];
                v = [v[1], next];
            }
            v[1]
        }
    };
    unit * radius.powi(d as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn atom(xi: &[f64], amp: Complex64, w: f64) -> FrequencyAtom {
        FrequencyAtom::new(xi.to_vec(), amp, w)
    }

    #[test]
    fn symbol_values() {
        assert_eq!(symbol_value(&SymbolKind::Elliptic, &[3.0, 4.0]).unwrap(), 25.0);
        assert_eq!(symbol_value(&SymbolKind::Hyperbolic2D, &[2.0, -5.0]).unwrap(), -10.0);
        let v = symbol_value(&SymbolKind::Fractional { a: 3.0 }, &[0.0, 2.0]).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
        assert_eq!(
            symbol_value(&SymbolKind::nonelliptic(3), &[1.0, 2.0, 3.0]).unwrap(),
            1.0 - 4.0 - 9.0
        );
        assert_eq!(
            symbol_value(&SymbolKind::Saddle3D { sign: -1 }, &[1.0, 2.0, 3.0]).unwrap(),
            2.0 - 9.0
        );
    }

    #[test]
    fn symbol_dimension_errors() {
        assert!(matches!(
            symbol_value(&SymbolKind::Hyperbolic2D, &[1.0, 2.0, 3.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
        assert!(symbol_value(&SymbolKind::Fractional { a: -1.0 }, &[1.0]).is_err());
        assert!(SymbolKind::Nonelliptic { signs: vec![1, 1] }.validate().is_err());
        assert!(SymbolKind::Nonelliptic { signs: vec![-1, -1] }.validate().is_err());
    }

    #[test]
    fn field_validation() {
        assert!(SpectralField::new(2, vec![atom(&[1.0], c(1.0, 0.0), 1.0)]).is_err());
        assert!(SpectralField::new(1, vec![atom(&[1.0], c(1.0, 0.0), 0.0)]).is_err());
        assert!(SpectralField::new(1, vec![atom(&[1.0], c(f64::NAN, 0.0), 1.0)]).is_err());
        let dup = vec![atom(&[1.0], c(1.0, 0.0), 1.0), atom(&[1.0], c(2.0, 0.0), 1.0)];
        assert!(SpectralField::new(1, dup).is_err());
        let zeros = vec![atom(&[0.0], c(1.0, 0.0), 1.0), atom(&[-0.0], c(2.0, 0.0), 1.0)];
        assert!(SpectralField::new(1, zeros).is_err());
    }

    #[test]
    fn evaluate_constant_atom() {
        let f = SpectralField::new(2, vec![atom(&[0.0, 0.0], c(1.0, 0.0), 1.0)]).unwrap();
        let v = f.evaluate(&[0.3, -7.0], 2.5, &SymbolKind::Elliptic).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn evaluate_conjugate_pair_is_real() {
        let w = 0.25;
        let f = SpectralField::new(1, vec![atom(&[3.0], c(1.0, 0.0), w), atom(&[-3.0], c(1.0, 0.0), w)]).unwrap();
        let x = 0.7;
        let v = f.evaluate(&[x], 0.0, &SymbolKind::Elliptic).unwrap();
        assert!(v.im.abs() < 1e-15);
        assert!((v.re - 2.0 * w * (3.0 * x).cos()).abs() < 1e-15);
    }

    #[test]
    fn evaluate_checks_dimension() {
        let f = SpectralField::new(2, vec![atom(&[0.0, 1.0], c(1.0, 0.0), 1.0)]).unwrap();
        assert!(f.evaluate(&[0.0], 0.0, &SymbolKind::Elliptic).is_err());
        assert!(f.evaluate(&[0.0, 0.0], 0.0, &SymbolKind::Saddle3D { sign: 1 }).is_err());
    }

    #[test]
    fn norms() {
        assert_eq!(SpectralField::empty(3).l2_norm(), 0.0);
        let f = SpectralField::new(1, vec![atom(&[1.0], c(2.0, 0.0), 0.25)]).unwrap();
        assert!((f.l2_norm() - 1.0).abs() < 1e-15);
        let g = SpectralField::new(3, vec![atom(&[1.0, 1.0, 1.0], c(1.0, 0.0), 1.0)]).unwrap();
        assert!((g.sobolev_norm(1.0) - 2.0).abs() < 1e-15);
        assert_eq!(g.sobolev_norm(0.0), g.l2_norm());
    }

    #[test]
    fn littlewood_paley_pieces() {
        let f = SpectralField::new(
            1,
            vec![
                atom(&[0.5], c(1.0, 0.0), 1.0),
                atom(&[-3.0], c(1.0, 0.0), 1.0),
                atom(&[9.0], c(1.0, 0.0), 1.0),
            ],
        )
        .unwrap();
        let pieces = f.littlewood_paley();
        let keys: Vec<u32> = pieces.keys().copied().collect();
        assert_eq!(keys, vec![0, 2, 4]);
        assert_eq!(pieces[&2].atoms()[0].xi, vec![-3.0]);
    }

    #[test]
    fn dyadic_shell_boundaries() {
        assert_eq!(dyadic_shell(0.0), 0);
        assert_eq!(dyadic_shell(0.999), 0);
        assert_eq!(dyadic_shell(1.0), 1);
        assert_eq!(dyadic_shell(1.999), 1);
        assert_eq!(dyadic_shell(2.0), 2);
        assert_eq!(dyadic_shell(4.0), 3);
        assert_eq!(dyadic_shell(1024.0), 11);
        assert_eq!(dyadic_shell(1023.9), 10);
    }

    #[test]
    fn box_quadrature_matches_volume() {
        let atoms = box_atoms(&[0.0], &[1.0], &[10], |_| c(1.0, 0.0)).unwrap();
        let f = SpectralField::new(1, atoms).unwrap();
        let v = f.evaluate(&[0.0], 0.0, &SymbolKind::Elliptic).unwrap();
        assert!((v.re - 1.0).abs() < 1e-14);
        // x ≠ 0: compare with the exact integral ∫₀¹ e^{ixξ} dξ, midpoint error O(h²)
        let x = 2.0;
        let exact = (Complex64::new(0.0, x).exp() - 1.0) / Complex64::new(0.0, x);
        let v = f.evaluate(&[x], 0.0, &SymbolKind::Elliptic).unwrap();
        assert!((v - exact).norm() < x * x / 24.0 * 0.01 + 1e-12);
    }

    #[test]
    fn ball_volume_values() {
        assert!((ball_volume(2, 1.0) - PI).abs() < 1e-14);
        assert!((ball_volume(3, 2.0) - 4.0 / 3.0 * PI * 8.0).abs() < 1e-12);
        let atoms = ball_atoms(&[0.0, 0.0], 0.5, 12, |_| c(1.0, 0.0)).unwrap();
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        assert!((total - ball_volume(2, 0.5)).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let f = SpectralField::new(
            2,
            vec![
                atom(&[0.1, 1.0 / 3.0], c(PI, -1e-300), 0.7),
                atom(&[-2.5e10, 5e-324], c(0.0, 1.0), 1e-9),
            ],
        )
        .unwrap();
        let back = SpectralField::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(SpectralField::from_json("{\"dimension\":1}").is_err());
    }

    #[test]
    fn grid_counts() {
        let g = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![0.25, 0.5]).unwrap();
        assert_eq!(g.axis_counts(), vec![9, 5]);
        assert_eq!(g.len(), 45);
        assert!(SpatialGrid::new(vec![0.0], 1.0, vec![3.0]).is_err());
    }
}
