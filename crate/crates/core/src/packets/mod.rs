//! Wave-packet frames at scales `(k, j)`.
//!
//! The annulus `{2^{k−1} ≤ |ξ| < 2^k}` is covered by cubes of side
//! `L = 2^{j−k}` centred on `Lℤ^N`; the packet
//! `φ̂_{θ,ν}(ξ) = e^{−ic(ν)·ξ} (2π)^{−N/2} L^{−N/2} ψ((ξ − c(θ))/L)` is
//! concentrated near `c(ν) ∈ L^{−1}ℤ^N` in space. Because `Σ_θ ψ_θ² = 1`
//! and the window support is shorter than `2πL`, the packets form a tight
//! frame with constant one.
//!
//! Fields on the lattice `(2π/P)ℤ^N` with `P·L ∈ ℤ` are decomposed exactly by
//! an `(P·L)^N`-point DFT per cube; other fields fall back to direct sums.

pub mod window;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::maximal::{random_bump_field, BumpField, BumpProfile};
use crate::spectral::{box_atoms, cartesian, dot, FrequencyAtom, SpectralField, SymbolKind};

pub use window::{build_window, partition, smooth_step, Window, SUPPORT_HALF_WIDTH};

/// `δ = ε³` with `ε = 0.05`.
pub const DEFAULT_DELTA: f64 = 0.05 * 0.05 * 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketLattice {
    pub dimension: usize,
    pub k: f64,
    pub j: f64,
    pub delta: f64,
    /// Spatial period `P`; `c(ν)` ranges over `L^{−1}ℤ^N ∩ [−P/2, P/2)^N`.
    pub period: f64,
    /// `m` with `c(θ) = L·m`, for every cube whose window meets the annulus.
    pub theta_cubes: Vec<Vec<i64>>,
}

impl PacketLattice {
    pub fn new(dimension: usize, k: f64, j: f64, period: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        if !(k > 0.0 && j > k && j < 2.0 * k) {
            return Err(invalid("j", format!("need 0 < k < j < 2k, got k = {k}, j = {j}")));
        }
        let side = 2f64.powf(j - k);
        let m = period * side;
        if !(period > 0.0) || (m - m.round()).abs() > 1e-9 * m.max(1.0) || m.round() < 2.0 {
            return Err(invalid("period", "P·2^(j−k) must be an integer ≥ 2"));
        }
        let inner = 2f64.powf(k - 1.0);
        let outer = 2f64.powf(k);
        let reach = (outer / side + SUPPORT_HALF_WIDTH).ceil() as i64;
        let axis: Vec<f64> = (-reach..=reach).map(|v| v as f64).collect();
        let theta_cubes = cartesian(&vec![axis; dimension])
            .into_iter()
            .filter(|m| {
                let near: f64 = m
                    .iter()
                    .map(|c| ((c.abs() - SUPPORT_HALF_WIDTH) * side).max(0.0).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let far: f64 = m
                    .iter()
                    .map(|c| ((c.abs() + SUPPORT_HALF_WIDTH) * side).powi(2))
                    .sum::<f64>()
                    .sqrt();
                near < outer && far > inner
            })
            .map(|m| m.iter().map(|v| *v as i64).collect())
            .collect();
        Ok(Self {
            dimension,
            k,
            j,
            delta: DEFAULT_DELTA,
            period,
            theta_cubes,
        })
    }

    /// `L = 2^{j−k}`
    pub fn side(&self) -> f64 {
        2f64.powf(self.j - self.k)
    }

    pub fn inner_radius(&self) -> f64 {
        2f64.powf(self.k - 1.0)
    }

    pub fn outer_radius(&self) -> f64 {
        2f64.powf(self.k)
    }

    /// Frequency lattice step `2π/P`.
    pub fn atom_step(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// `P·L`, the number of `ν` per axis.
    pub fn nu_per_axis(&self) -> usize {
        (self.period * self.side()).round() as usize
    }

    pub fn theta_center(&self, theta: usize) -> Vec<f64> {
        let l = self.side();
        self.theta_cubes[theta].iter().map(|m| *m as f64 * l).collect()
    }

    pub fn theta_index(&self, cube: &[i64]) -> Option<usize> {
        self.theta_cubes.iter().position(|m| m.as_slice() == cube)
    }

    pub fn nu_center(&self, nu: &[i64]) -> Vec<f64> {
        let l = self.side();
        nu.iter().map(|q| *q as f64 / l).collect()
    }

    /// Integer labels of every `ν` in the spatial box.
    pub fn nu_labels(&self) -> Vec<Vec<i64>> {
        let m = self.nu_per_axis() as i64;
        let lo = -(m / 2);
        let axis: Vec<f64> = (lo..lo + m).map(|v| v as f64).collect();
        cartesian(&vec![axis; self.dimension])
            .into_iter()
            .map(|p| p.iter().map(|v| *v as i64).collect())
            .collect()
    }

    /// Cube of side `L` owning `ξ`; a point on a shared face goes to the lower cube.
    pub fn owning_cube(&self, xi: &[f64]) -> Vec<i64> {
        let l = self.side();
        xi.iter().map(|v| (v / l - 0.5).ceil() as i64).collect()
    }

    /// `(2π)^{−N/2} L^{−N/2} ψ((ξ − c(θ))/L)`
    pub fn window_value(&self, theta: usize, xi: &[f64]) -> f64 {
        let l = self.side();
        let u: Vec<f64> = xi
            .iter()
            .zip(&self.theta_cubes[theta])
            .map(|(x, m)| x / l - *m as f64)
            .collect();
        self.normalization() * Window.value_nd(&u)
    }

    fn normalization(&self) -> f64 {
        (2.0 * PI * self.side()).powf(-(self.dimension as f64) / 2.0)
    }

    /// Cubes whose window does not vanish at `ξ`.
    fn cubes_at(&self, xi: &[f64]) -> Vec<Vec<i64>> {
        let l = self.side();
        let ranges: Vec<Vec<f64>> = xi
            .iter()
            .map(|x| {
                let u = x / l;
                let lo = (u - SUPPORT_HALF_WIDTH).floor() as i64 + 1;
                let hi = (u + SUPPORT_HALF_WIDTH).ceil() as i64 - 1;
                (lo..=hi).map(|v| v as f64).collect()
            })
            .collect();
        cartesian(&ranges)
            .into_iter()
            .map(|p| p.iter().map(|v| *v as i64).collect())
            .collect()
    }

    /// Tube half-width `L^{−1+δ}`.
    pub fn tube_radius(&self) -> f64 {
        self.side().powf(-1.0 + self.delta)
    }

    /// Far-set threshold `multiplier · L^{−1+10δ}`.
    pub fn far_threshold(&self, multiplier: f64) -> f64 {
        multiplier * self.side().powf(-1.0 + 10.0 * self.delta)
    }

    /// The cube whose centre lies closest to the middle radius `¾·2^k`.
    pub fn central_theta(&self) -> usize {
        let mid = 0.75 * self.outer_radius();
        (0..self.theta_cubes.len())
            .min_by(|a, b| {
                let da = (crate::spectral::norm(&self.theta_center(*a)) - mid).abs();
                let db = (crate::spectral::norm(&self.theta_center(*b)) - mid).abs();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }

    /// `φ_{θ,ν}` sampled on the lattice `(2π/P)ℤ^N`, restricted to the annulus.
    pub fn packet_field(&self, theta: usize, nu: &[i64]) -> Result<SpectralField> {
        let h = self.atom_step();
        let l = self.side();
        let c = self.theta_center(theta);
        let ranges: Vec<Vec<f64>> = c
            .iter()
            .map(|ci| {
                let lo = ((ci - SUPPORT_HALF_WIDTH * l) / h).floor() as i64;
                let hi = ((ci + SUPPORT_HALF_WIDTH * l) / h).ceil() as i64;
                (lo..=hi).map(|n| n as f64 * h).collect()
            })
            .collect();
        let center = self.nu_center(nu);
        let weight = h.powi(self.dimension as i32);
        let atoms = cartesian(&ranges)
            .into_iter()
            .filter_map(|xi| {
                let r = crate::spectral::norm(&xi);
                let w = self.window_value(theta, &xi);
                (w > 0.0 && r >= self.inner_radius() && r < self.outer_radius()).then(|| {
                    let amp = Complex64::from_polar(w, -dot(&center, &xi));
                    FrequencyAtom::new(xi, amp, weight)
                })
            })
            .collect();
        SpectralField::new(self.dimension, atoms)
    }

    /// `φ_{θ,ν}` on a fine midpoint grid across its support, for evaluation
    /// far from `c(ν)` without lattice aliasing.
    pub fn fine_packet_field(&self, theta: usize, nu_center: &[f64], points_per_axis: usize) -> Result<SpectralField> {
        let l = self.side();
        let c = self.theta_center(theta);
        let lo: Vec<f64> = c.iter().map(|v| v - SUPPORT_HALF_WIDTH * l).collect();
        let hi: Vec<f64> = c.iter().map(|v| v + SUPPORT_HALF_WIDTH * l).collect();
        let atoms = box_atoms(&lo, &hi, &vec![points_per_axis; self.dimension], |xi| {
            Complex64::from_polar(self.window_value(theta, xi), -dot(nu_center, xi))
        })?;
        SpectralField::new(self.dimension, atoms)
    }

    /// Random field on the lattice `(2π/P)ℤ^N` inside the annulus, built from
    /// Gaussian bumps so that it is spatially concentrated near the origin.
    pub fn random_field(&self, bumps: usize, rng: &mut impl Rng) -> Result<SpectralField> {
        let cfg = BumpField {
            dimension: self.dimension,
            inner: self.inner_radius(),
            outer: self.outer_radius(),
            atom_step: self.atom_step(),
            atom_offset: 0.0,
            bumps,
            width_fraction: 0.45,
            shift_radius: 0.5,
            profile: BumpProfile::Gaussian,
        };
        random_bump_field(&cfg, rng)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketCoefficient {
    pub theta: usize,
    pub nu: Vec<i64>,
    pub value: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PacketCoefficients {
    pub lattice: PacketLattice,
    /// Sorted by `θ`, then `ν` lexicographically.
    pub entries: Vec<PacketCoefficient>,
    /// Frequencies and weights of the decomposed field.
    pub atoms: Vec<(Vec<f64>, f64)>,
    pub field_norm: f64,
    aligned: bool,
}

impl PacketCoefficients {
    pub fn energy(&self) -> f64 {
        self.entries.iter().map(|e| e.value.norm_sqr()).sum()
    }

    /// `Σ|c|² / ‖f‖²`
    pub fn frame_ratio(&self) -> f64 {
        self.energy() / (self.field_norm * self.field_norm)
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|e| e.value *= alpha);
        out.field_norm *= alpha.norm();
        out
    }

    pub fn get(&self, theta: usize, nu: &[i64]) -> Complex64 {
        self.entries
            .iter()
            .find(|e| e.theta == theta && e.nu.as_slice() == nu)
            .map_or(Complex64::new(0.0, 0.0), |e| e.value)
    }

    pub fn largest(&self) -> Option<&PacketCoefficient> {
        self.entries
            .iter()
            .max_by(|a, b| a.value.norm_sqr().total_cmp(&b.value.norm_sqr()))
    }

    /// Keeps the entries accepted by `keep`.
    pub fn filtered(&self, mut keep: impl FnMut(&PacketCoefficient) -> bool) -> Self {
        let mut out = self.clone();
        out.entries.retain(|e| keep(e));
        out
    }
}

/// Default far-set multiplier for the far-field check. At desk scales
/// `L^{10δ}` is close to 1, so the constant carries the separation.
pub const FAR_MULTIPLIER: f64 = 96.0;

/// Relative truncation level for coefficients.
pub const TRUNCATION: f64 = 1e-14;

fn lattice_index(xi: &[f64], h: f64) -> Option<Vec<i64>> {
    xi.iter()
        .map(|v| {
            let n = v / h;
            ((n - n.round()).abs() < 1e-6).then(|| n.round() as i64)
        })
        .collect()
}

fn slot(n: &[i64], m: usize) -> usize {
    n.iter()
        .fold(0usize, |acc, v| acc * m + v.rem_euclid(m as i64) as usize)
}

fn label_of(slot: usize, m: usize, dim: usize) -> Vec<i64> {
    let mut rem = slot;
    let mut out = vec![0i64; dim];
    for i in (0..dim).rev() {
        let k = (rem % m) as i64;
        rem /= m;
        // k ∈ [0, M) ↦ q ∈ [−⌊M/2⌋, M − ⌊M/2⌋)
        let half = (m / 2) as i64;
        out[i] = if k >= m as i64 - half { k - m as i64 } else { k };
    }
    out
}

/// In-place N-dimensional DFT, `sign = +1` for `e^{+2πi nq/M}`.
fn fft_nd(buf: &mut [Complex64], m: usize, dim: usize, planner: &mut FftPlanner<f64>, sign: i32) {
    let fft = if sign > 0 {
        planner.plan_fft_inverse(m)
    } else {
        planner.plan_fft_forward(m)
    };
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        let block = stride * m;
        for base in (0..buf.len()).step_by(block) {
            for off in 0..stride {
                if stride == 1 {
                    fft.process(&mut buf[base..base + m]);
                    break;
                }
                for (i, v) in line.iter_mut().enumerate() {
                    *v = buf[base + off + i * stride];
                }
                fft.process(&mut line);
                for (i, v) in line.iter().enumerate() {
                    buf[base + off + i * stride] = *v;
                }
            }
        }
    }
}

fn check_annulus(field: &SpectralField, lattice: &PacketLattice) -> Result<()> {
    if field.dimension() != lattice.dimension {
        return Err(Error::DimensionMismatch {
            expected: lattice.dimension,
            got: field.dimension(),
        });
    }
    let (inner, outer) = (lattice.inner_radius(), lattice.outer_radius());
    if let Some(a) = field.atoms().iter().find(|a| {
        let r = a.radius();
        r < inner || r >= outer
    }) {
        return Err(Error::OutsideAnnulus { radius: a.radius() });
    }
    Ok(())
}

/// Groups atom indices by the cubes whose window is nonzero at them.
fn group_by_theta(lattice: &PacketLattice, xis: &[&[f64]]) -> BTreeMap<usize, Vec<usize>> {
    let index: HashMap<&[i64], usize> = lattice
        .theta_cubes
        .iter()
        .enumerate()
        .map(|(i, m)| (m.as_slice(), i))
        .collect();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (a, xi) in xis.iter().enumerate() {
        for cube in lattice.cubes_at(xi) {
            if let Some(t) = index.get(cube.as_slice()) {
                groups.entry(*t).or_default().push(a);
            }
        }
    }
    groups
}

/// `⟨f, φ_{θ,ν}⟩ = Σ f̂(ξ) e^{ic(ν)·ξ} ψ_θ(ξ) w` for every `(θ, ν)`,
/// dropping entries below `1e−14 ‖f‖`.
pub fn decompose(field: &SpectralField, lattice: &PacketLattice) -> Result<PacketCoefficients> {
    check_annulus(field, lattice)?;
    let h = lattice.atom_step();
    let weight = h.powi(lattice.dimension as i32);
    let aligned = field
        .atoms()
        .iter()
        .all(|a| lattice_index(&a.xi, h).is_some() && (a.weight - weight).abs() <= 1e-9 * weight);
    if aligned {
        decompose_fft(field, lattice)
    } else {
        decompose_direct(field, lattice)
    }
}

fn finish(
    field: &SpectralField,
    lattice: &PacketLattice,
    mut entries: Vec<PacketCoefficient>,
    aligned: bool,
) -> PacketCoefficients {
    let field_norm = field.l2_norm();
    let cut = TRUNCATION * field_norm;
    entries.retain(|e| e.value.norm() >= cut && e.value.norm() > 0.0);
    entries.sort_by(|a, b| a.theta.cmp(&b.theta).then_with(|| a.nu.cmp(&b.nu)));
    PacketCoefficients {
        lattice: lattice.clone(),
        entries,
        atoms: field.atoms().iter().map(|a| (a.xi.clone(), a.weight)).collect(),
        field_norm,
        aligned,
    }
}

fn decompose_fft(field: &SpectralField, lattice: &PacketLattice) -> Result<PacketCoefficients> {
    let h = lattice.atom_step();
    let m = lattice.nu_per_axis();
    let dim = lattice.dimension;
    let atoms = field.atoms();
    let xis: Vec<&[f64]> = atoms.iter().map(|a| a.xi.as_slice()).collect();
    let mut planner = FftPlanner::new();
    let mut entries = Vec::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(dim as u32)];
    for (theta, members) in group_by_theta(lattice, &xis) {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for a in members {
            let atom = &atoms[a];
            let n = lattice_index(&atom.xi, h).expect("aligned");
            buf[slot(&n, m)] += atom.amplitude * atom.weight * lattice.window_value(theta, &atom.xi);
        }
        fft_nd(&mut buf, m, dim, &mut planner, 1);
        entries.extend(buf.iter().enumerate().map(|(s, v)| PacketCoefficient {
            theta,
            nu: label_of(s, m, dim),
            value: *v,
        }));
    }
    Ok(finish(field, lattice, entries, true))
}

fn decompose_direct(field: &SpectralField, lattice: &PacketLattice) -> Result<PacketCoefficients> {
    let atoms = field.atoms();
    let xis: Vec<&[f64]> = atoms.iter().map(|a| a.xi.as_slice()).collect();
    let labels = lattice.nu_labels();
    let mut entries = Vec::new();
    for (theta, members) in group_by_theta(lattice, &xis) {
        let weighted: Vec<(usize, Complex64)> = members
            .iter()
            .map(|a| {
                (
                    *a,
                    atoms[*a].amplitude * atoms[*a].weight * lattice.window_value(theta, &atoms[*a].xi),
                )
            })
            .collect();
        for nu in &labels {
            let c = lattice.nu_center(nu);
            let value = weighted
                .iter()
                .map(|(a, g)| g * Complex64::from_polar(1.0, dot(&c, &atoms[*a].xi)))
                .sum();
            entries.push(PacketCoefficient {
                theta,
                nu: nu.clone(),
                value,
            });
        }
    }
    Ok(finish(field, lattice, entries, false))
}

/// `Σ c_{θ,ν} φ̂_{θ,ν}` evaluated at the decomposed field's frequencies.
pub fn reconstruct(coeffs: &PacketCoefficients) -> Result<SpectralField> {
    let lattice = &coeffs.lattice;
    let dim = lattice.dimension;
    let xis: Vec<&[f64]> = coeffs.atoms.iter().map(|(xi, _)| xi.as_slice()).collect();
    let mut amps = vec![Complex64::new(0.0, 0.0); xis.len()];
    let mut by_theta: BTreeMap<usize, Vec<&PacketCoefficient>> = BTreeMap::new();
    for e in &coeffs.entries {
        by_theta.entry(e.theta).or_default().push(e);
    }
    let groups = group_by_theta(lattice, &xis);
    let m = lattice.nu_per_axis();
    let h = lattice.atom_step();
    let mut planner = FftPlanner::new();
    let mut buf = vec![Complex64::new(0.0, 0.0); if coeffs.aligned { m.pow(dim as u32) } else { 0 }];
    for (theta, entries) in by_theta {
        let Some(members) = groups.get(&theta) else { continue };
        if coeffs.aligned {
            buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for e in &entries {
                buf[slot(&e.nu, m)] = e.value;
            }
            fft_nd(&mut buf, m, dim, &mut planner, -1);
            for &a in members {
                let n = lattice_index(xis[a], h).expect("aligned");
                amps[a] += lattice.window_value(theta, xis[a]) * buf[slot(&n, m)];
            }
        } else {
            let centers: Vec<(Vec<f64>, Complex64)> =
                entries.iter().map(|e| (lattice.nu_center(&e.nu), e.value)).collect();
            for &a in members {
                let s: Complex64 = centers
                    .iter()
                    .map(|(c, v)| v * Complex64::from_polar(1.0, -dot(c, xis[a])))
                    .sum();
                amps[a] += lattice.window_value(theta, xis[a]) * s;
            }
        }
    }
    let atoms = coeffs
        .atoms
        .iter()
        .zip(amps)
        .map(|((xi, w), amp)| FrequencyAtom::new(xi.clone(), amp, *w))
        .collect();
    SpectralField::new(dim, atoms)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeReport {
    /// Smallest `C_M` with `|e^{itΔ}φ(x)| ≤ C_M L^{N/2}(1 + L·d)^{−M}` on all samples.
    pub c2: f64,
    pub c4: f64,
    pub pass: bool,
    pub samples: usize,
}

/// Distance from `x` to the tube axis point `c(ν) − 2t·c(θ)`.
pub fn tube_distance(lattice: &PacketLattice, theta: usize, nu_center: &[f64], x: &[f64], t: f64) -> f64 {
    let c = lattice.theta_center(theta);
    x.iter()
        .zip(nu_center)
        .zip(&c)
        .map(|((xi, n), ci)| (xi - n + 2.0 * t * ci).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Points per axis of the fine quadrature used for single-packet evaluation.
pub const FINE_POINTS: usize = 96;

pub fn tube_envelope_check(
    lattice: &PacketLattice,
    theta: usize,
    nu: &[i64],
    samples: &[(Vec<f64>, f64)],
) -> Result<TubeReport> {
    if theta >= lattice.theta_cubes.len() {
        return Err(invalid("theta", "index out of range"));
    }
    let center = lattice.nu_center(nu);
    let packet = lattice.fine_packet_field(theta, &center, FINE_POINTS)?;
    let l = lattice.side();
    let amp = l.powf(lattice.dimension as f64 / 2.0);
    let (mut c2, mut c4) = (0.0f64, 0.0f64);
    for (x, t) in samples {
        let v = packet.evaluate(x, *t, &SymbolKind::Elliptic)?.norm();
        let d = 1.0 + l * tube_distance(lattice, theta, &center, x, *t);
        c2 = c2.max(v / amp * d.powi(2));
        c4 = c4.max(v / amp * d.powi(4));
    }
    Ok(TubeReport {
        c2,
        c4,
        pass: c4 <= 1e3,
        samples: samples.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub t: f64,
    pub argmax: Vec<f64>,
    pub distance: f64,
    pub pass: bool,
}

/// Locates the maximum of `|e^{itΔ}φ_{θ,ν}|` on a local grid around the
/// predicted axis point and compares its offset with the tube radius.
pub fn tube_drift(lattice: &PacketLattice, theta: usize, nu: &[i64], times: &[f64]) -> Result<Vec<DriftRow>> {
    let center = lattice.nu_center(nu);
    let packet = lattice.fine_packet_field(theta, &center, 48)?;
    let l = lattice.side();
    let c = lattice.theta_center(theta);
    let step = 1.0 / (16.0 * l);
    let axis: Vec<f64> = (-32..=32).map(|i| i as f64 * step).collect();
    let offsets = cartesian(&vec![axis; lattice.dimension]);
    times
        .iter()
        .map(|t| {
            let axis_point: Vec<f64> = center.iter().zip(&c).map(|(n, ci)| n - 2.0 * t * ci).collect();
            let mut best = (f64::NEG_INFINITY, axis_point.clone());
            for o in &offsets {
                let x: Vec<f64> = axis_point.iter().zip(o).map(|(a, b)| a + b).collect();
                let v = packet.evaluate(&x, *t, &SymbolKind::Elliptic)?.norm();
                if v > best.0 {
                    best = (v, x);
                }
            }
            let distance = tube_distance(lattice, theta, &center, &best.1, *t);
            Ok(DriftRow {
                t: *t,
                argmax: best.1,
                distance,
                pass: distance <= lattice.tube_radius(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarFieldReport {
    pub ratio: f64,
    pub far_packets: usize,
    pub near_packets: usize,
    pub threshold: f64,
}

/// Distance between spatial centres on the torus of period `P`.
pub fn periodic_distance(a: &[f64], b: &[f64], period: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = (x - y) / period;
            ((d - d.round()) * period).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// `sup |e^{itΔ} Σ_{far ν} f_{θ,ν}| / ‖f‖₂` over `B(center, L^{−1}) × (0, 2^{−j})`,
/// where far means `|c(ν) − center| > multiplier · L^{−1+10δ}`.
pub fn far_field_negligible(coeffs: &PacketCoefficients, center: &[f64], multiplier: f64) -> Result<FarFieldReport> {
    let lattice = &coeffs.lattice;
    if center.len() != lattice.dimension {
        return Err(Error::DimensionMismatch {
            expected: lattice.dimension,
            got: center.len(),
        });
    }
    let threshold = lattice.far_threshold(multiplier);
    let is_far =
        |e: &PacketCoefficient| periodic_distance(&lattice.nu_center(&e.nu), center, lattice.period) > threshold;
    let far = coeffs.filtered(is_far);
    let far_packets = far.entries.len();
    let near_packets = coeffs.entries.len() - far_packets;
    if far_packets == 0 || coeffs.field_norm == 0.0 {
        return Ok(FarFieldReport {
            ratio: 0.0,
            far_packets,
            near_packets,
            threshold,
        });
    }
    let far_field = reconstruct(&far)?;
    let l = lattice.side();
    let radius = 1.0 / l;
    let axis: Vec<f64> = (-4..=4).map(|i| i as f64 * radius / 4.0).collect();
    let points: Vec<Vec<f64>> = cartesian(&vec![axis; lattice.dimension])
        .into_iter()
        .filter(|o| o.iter().map(|v| v * v).sum::<f64>() <= radius * radius)
        .map(|o| o.iter().zip(center).map(|(a, b)| a + b).collect())
        .collect();
    let horizon = 2f64.powf(-lattice.j);
    let times: Vec<f64> = (0..8).map(|i| horizon * (i as f64 + 0.5) / 8.0).collect();
    let mut sup = 0.0f64;
    for t in &times {
        for x in &points {
            sup = sup.max(far_field.evaluate(x, *t, &SymbolKind::Elliptic)?.norm());
        }
    }
    Ok(FarFieldReport {
        ratio: sup / coeffs.field_norm,
        far_packets,
        near_packets,
        threshold,
    })
}
