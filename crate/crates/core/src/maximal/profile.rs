use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::sequence::TimeSequence;
use crate::spectral::{SpatialGrid, SpectralField, SymbolKind};

/// The set of times a maximal function is taken over.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TimeSet {
    Sequence(TimeSequence),
    Points {
        times: Vec<f64>,
    },
    /// `lo, lo + Δ, …, hi` with `Δ ≤ step`.
    Interval {
        lo: f64,
        hi: f64,
        step: f64,
    },
}

impl TimeSet {
    /// Interval sampling at the largest admissible step for `field`.
    pub fn sampled_interval(field: &SpectralField, kind: &SymbolKind, lo: f64, hi: f64) -> Result<Self> {
        let step = required_step(field, kind)?;
        Ok(TimeSet::Interval { lo, hi, step })
    }

    pub fn times(&self) -> Vec<f64> {
        match self {
            TimeSet::Sequence(s) => s.values().to_vec(),
            TimeSet::Points { times } => times.clone(),
            TimeSet::Interval { lo, hi, step } => {
                let n = (((hi - lo) / step) * (1.0 - 1e-12)).ceil().max(0.0) as usize;
                if n == 0 {
                    return vec![*lo];
                }
                let h = (hi - lo) / n as f64;
                (0..=n).map(|k| lo + k as f64 * h).collect()
            }
        }
    }
}

/// `π / (4 · max |σ(ξ)|)`: no atom's phase moves by more than `π/4` between samples.
pub fn required_step(field: &SpectralField, kind: &SymbolKind) -> Result<f64> {
    let m = field.max_symbol(kind)?;
    Ok(if m > 0.0 {
        std::f64::consts::PI / (4.0 * m)
    } else {
        f64::INFINITY
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximalProfile {
    pub grid: SpatialGrid,
    pub sup_values: Vec<f64>,
    pub argmax_time_index: Vec<usize>,
    pub times: Vec<f64>,
}

pub fn maximal_profile(
    field: &SpectralField,
    times: &TimeSet,
    kind: &SymbolKind,
    grid: &SpatialGrid,
) -> Result<MaximalProfile> {
    if field.is_empty() {
        return Err(Error::Empty("field"));
    }
    if grid.dimension() != field.dimension() {
        return Err(Error::DimensionMismatch {
            expected: field.dimension(),
            got: grid.dimension(),
        });
    }
    kind.validate()?;
    kind.check_dimension(field.dimension())?;
    if let TimeSet::Interval { lo, hi, step } = times {
        if !(hi >= lo) {
            return Err(invalid("interval", "need lo ≤ hi"));
        }
        let required = required_step(field, kind)?;
        if !(*step > 0.0) || *step > required * (1.0 + 1e-12) {
            return Err(Error::SamplingStep { step: *step, required });
        }
    }
    let ts = times.times();
    if ts.is_empty() {
        return Err(Error::Empty("time set"));
    }
    let eval = GridEvaluator::new(field, grid);
    let n = grid.len();
    let mut sup_values = vec![f64::NEG_INFINITY; n];
    let mut argmax_time_index = vec![0usize; n];
    let mut buf = vec![0.0; n];
    for (ti, t) in ts.iter().enumerate() {
        eval.moduli(*t, kind, &mut buf);
        for ((s, a), v) in sup_values.iter_mut().zip(argmax_time_index.iter_mut()).zip(&buf) {
            if *v > *s {
                *s = *v;
                *a = ti;
            }
        }
    }
    Ok(MaximalProfile {
        grid: grid.clone(),
        sup_values,
        argmax_time_index,
        times: ts,
    })
}

/// Riemann sum of `sup²` over grid points inside the ball, square-rooted.
pub fn ball_l2(profile: &MaximalProfile, center: &[f64], radius: f64) -> Result<f64> {
    let grid = &profile.grid;
    check_coverage(grid, center, radius)?;
    let axes: Vec<Vec<f64>> = (0..grid.dimension()).map(|i| grid.axis_points(i)).collect();
    let mut sum = 0.0;
    for_each_in_ball(&axes, center, radius, |flat| {
        let v = profile.sup_values[flat];
        sum += v * v;
    });
    Ok((sum * grid.cell_volume()).sqrt())
}

pub(crate) fn check_coverage(grid: &SpatialGrid, center: &[f64], radius: f64) -> Result<()> {
    if center.len() != grid.dimension() {
        return Err(Error::DimensionMismatch {
            expected: grid.dimension(),
            got: center.len(),
        });
    }
    let covered = center
        .iter()
        .zip(&grid.center)
        .all(|(c, g)| (c - g).abs() + radius <= grid.half_width * (1.0 + 1e-12));
    if !(radius > 0.0) || !covered {
        return Err(Error::Coverage {
            center: center.to_vec(),
            radius,
        });
    }
    Ok(())
}

/// Calls `f(flat_index)` for every grid point strictly inside the ball.
pub(crate) fn for_each_in_ball(axes: &[Vec<f64>], center: &[f64], radius: f64, mut f: impl FnMut(usize)) {
    let dims: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = dims.iter().product();
    let r2 = radius * radius;
    let mut idx = vec![0usize; dims.len()];
    for flat in 0..total {
        let d2: f64 = idx
            .iter()
            .enumerate()
            .map(|(i, m)| (axes[i][*m] - center[i]).powi(2))
            .sum();
        if d2 < r2 {
            f(flat);
        }
        for i in (0..dims.len()).rev() {
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// Evaluates `|e^{itσ(D)} f|` on a whole grid.
///
/// Plane waves factor across axes, so each atom needs only table lookups.
/// Atoms are grouped by their first coordinate: the sum over the remaining
/// axes is formed once per group and then combined with the first axis, which
/// is cheap when atoms sit on a lattice.
pub(crate) struct GridEvaluator<'a> {
    field: &'a SpectralField,
    dims: Vec<usize>,
    /// `tables[i][d * dims[i] + m] = e^{i x_i(m) · distinct_i[d]}`
    tables: Vec<Vec<Complex64>>,
    index: Vec<Vec<usize>>,
    groups: Vec<Vec<usize>>,
}

impl<'a> GridEvaluator<'a> {
    pub(crate) fn new(field: &'a SpectralField, grid: &SpatialGrid) -> Self {
        let axes: Vec<Vec<f64>> = (0..grid.dimension()).map(|i| grid.axis_points(i)).collect();
        Self::with_axes(field, &axes)
    }

    pub(crate) fn with_axes(field: &'a SpectralField, axes: &[Vec<f64>]) -> Self {
        let n = field.dimension();
        let dims: Vec<usize> = axes.iter().map(Vec::len).collect();
        let mut tables = Vec::with_capacity(n);
        let mut index = vec![vec![0usize; n]; field.len()];
        let mut groups = Vec::new();
        for i in 0..n {
            let mut seen: HashMap<u64, usize> = HashMap::new();
            let mut distinct = Vec::new();
            for (a, atom) in field.atoms().iter().enumerate() {
                let v = atom.xi[i] + 0.0;
                let d = *seen.entry(v.to_bits()).or_insert_with(|| {
                    distinct.push(v);
                    distinct.len() - 1
                });
                index[a][i] = d;
                if i == 0 {
                    if d == groups.len() {
                        groups.push(Vec::new());
                    }
                    groups[d].push(a);
                }
            }
            let mut table = Vec::with_capacity(distinct.len() * dims[i]);
            for v in &distinct {
                table.extend(axes[i].iter().map(|x| Complex64::from_polar(1.0, x * v)));
            }
            tables.push(table);
        }
        Self {
            field,
            dims,
            tables,
            index,
            groups,
        }
    }

    /// Complex values at every grid point, row-major with the last axis fastest.
    pub(crate) fn values(&self, t: f64, kind: &SymbolKind, out: &mut [Complex64]) {
        let atoms = self.field.atoms();
        let coef: Vec<Complex64> = atoms
            .iter()
            .map(|a| a.amplitude * Complex64::from_polar(a.weight, t * kind.value_unchecked(&a.xi)))
            .collect();
        let n0 = self.dims[0];
        let rest: usize = self.dims[1..].iter().product();
        out.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let mut inner = vec![Complex64::new(0.0, 0.0); rest];
        let mut rest_idx = vec![0usize; self.dims.len()];
        for (d0, group) in self.groups.iter().enumerate() {
            inner.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for &a in group {
                let c = coef[a];
                if self.dims.len() == 2 {
                    let row = &self.tables[1][self.index[a][1] * self.dims[1]..][..self.dims[1]];
                    for (acc, e) in inner.iter_mut().zip(row) {
                        *acc += c * e;
                    }
                } else {
                    rest_idx.iter_mut().for_each(|v| *v = 0);
                    for acc in inner.iter_mut() {
                        let mut p = c;
                        for (i, r) in rest_idx.iter().enumerate().skip(1) {
                            p *= self.tables[i][self.index[a][i] * self.dims[i] + r];
                        }
                        *acc += p;
                        for i in (1..self.dims.len()).rev() {
                            rest_idx[i] += 1;
                            if rest_idx[i] < self.dims[i] {
                                break;
                            }
                            rest_idx[i] = 0;
                        }
                    }
                }
            }
            let row0 = &self.tables[0][d0 * n0..][..n0];
            for (m0, e0) in row0.iter().enumerate() {
                let dst = &mut out[m0 * rest..][..rest];
                for (o, v) in dst.iter_mut().zip(&inner) {
                    *o += e0 * v;
                }
            }
        }
    }

    pub(crate) fn moduli(&self, t: f64, kind: &SymbolKind, out: &mut [f64]) {
        let mut vals = vec![Complex64::new(0.0, 0.0); out.len()];
        self.values(t, kind, &mut vals);
        for (o, v) in out.iter_mut().zip(&vals) {
            *o = v.norm();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{box_atoms, FrequencyAtom};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(dim: usize, n: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atoms = (0..n)
            .map(|_| {
                let xi: Vec<f64> = (0..dim).map(|_| rng.gen_range(-6.0..6.0)).collect();
                FrequencyAtom::new(
                    xi,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    0.1,
                )
            })
            .collect();
        SpectralField::new(dim, atoms).unwrap()
    }

    #[test]
    fn grid_evaluator_matches_direct_sum() {
        for dim in 1..=3 {
            let field = random_field(dim, 25, dim as u64);
            let grid = SpatialGrid::new(vec![0.1; dim], 0.5, vec![0.125; dim]).unwrap();
            let eval = GridEvaluator::new(&field, &grid);
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            let kind = SymbolKind::Elliptic;
            eval.values(0.3, &kind, &mut out);
            for (p, v) in grid.points().iter().zip(&out) {
                let direct = field.evaluate(p, 0.3, &kind).unwrap();
                assert!((direct - v).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn lattice_field_grouping_matches_direct_sum() {
        let atoms = box_atoms(&[-2.0, 1.0], &[2.0, 3.0], &[6, 5], |xi| Complex64::new(xi[0], 1.0)).unwrap();
        let field = SpectralField::new(2, atoms).unwrap();
        let grid = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![0.25, 0.2]).unwrap();
        let eval = GridEvaluator::new(&field, &grid);
        let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
        let kind = SymbolKind::Hyperbolic2D;
        eval.values(0.7, &kind, &mut out);
        for (p, v) in grid.points().iter().zip(&out) {
            assert!((field.evaluate(p, 0.7, &kind).unwrap() - v).norm() < 1e-10);
        }
    }

    #[test]
    fn single_time_profile_is_modulus() {
        let field = random_field(2, 10, 7);
        let grid = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![0.25, 0.25]).unwrap();
        let kind = SymbolKind::Elliptic;
        let prof = maximal_profile(&field, &TimeSet::Points { times: vec![0.2] }, &kind, &grid).unwrap();
        for (p, v) in grid.points().iter().zip(&prof.sup_values) {
            assert!((field.evaluate(p, 0.2, &kind).unwrap().norm() - v).abs() < 1e-10);
        }
    }

    #[test]
    fn duplicate_times_are_idempotent_and_supersets_dominate() {
        let field = random_field(2, 10, 9);
        let grid = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![0.25, 0.25]).unwrap();
        let kind = SymbolKind::Elliptic;
        let one = maximal_profile(&field, &TimeSet::Points { times: vec![0.2] }, &kind, &grid).unwrap();
        let dup = maximal_profile(&field, &TimeSet::Points { times: vec![0.2, 0.2] }, &kind, &grid).unwrap();
        assert_eq!(one.sup_values, dup.sup_values);
        let more = maximal_profile(
            &field,
            &TimeSet::Points {
                times: vec![0.2, 0.05, 0.4],
            },
            &kind,
            &grid,
        )
        .unwrap();
        assert!(more.sup_values.iter().zip(&one.sup_values).all(|(a, b)| a >= b));
    }

    #[test]
    fn interval_step_is_enforced() {
        let field = random_field(1, 5, 1);
        let grid = SpatialGrid::new(vec![0.0], 1.0, vec![0.1]).unwrap();
        let kind = SymbolKind::Elliptic;
        let bad = TimeSet::Interval {
            lo: 0.0,
            hi: 1.0,
            step: 0.5,
        };
        assert!(matches!(
            maximal_profile(&field, &bad, &kind, &grid),
            Err(Error::SamplingStep { .. })
        ));
        let good = TimeSet::sampled_interval(&field, &kind, 0.0, 0.1).unwrap();
        let ts = good.times();
        let req = required_step(&field, &kind).unwrap();
        assert!(ts.windows(2).all(|w| w[1] - w[0] <= req * (1.0 + 1e-9)));
        assert!((ts[ts.len() - 1] - 0.1).abs() < 1e-15);
        assert!(maximal_profile(&field, &good, &kind, &grid).is_ok());
    }

    fn constant_profile(grid: SpatialGrid, c: f64) -> MaximalProfile {
        let n = grid.len();
        MaximalProfile {
            grid,
            sup_values: vec![c; n],
            argmax_time_index: vec![0; n],
            times: vec![0.0],
        }
    }

    #[test]
    fn ball_l2_of_constant() {
        for dim in [1usize, 2, 3] {
            let grid = SpatialGrid::new(vec![0.0; dim], 1.0, vec![1.0 / 64.0; dim]).unwrap();
            let got = ball_l2(&constant_profile(grid, 3.0), &vec![0.0; dim], 1.0).unwrap();
            let want = 3.0 * crate::spectral::ball_volume(dim, 1.0).sqrt();
            assert!((got - want).abs() / want < 0.01, "dim {dim}: {got} vs {want}");
        }
        let grid = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![0.1, 0.1]).unwrap();
        assert_eq!(
            ball_l2(&constant_profile(grid.clone(), 0.0), &[0.0, 0.0], 1.0).unwrap(),
            0.0
        );
        assert!(matches!(
            ball_l2(&constant_profile(grid, 1.0), &[0.5, 0.0], 1.0),
            Err(Error::Coverage { .. })
        ));
    }

    #[test]
    fn ball_l2_refinement_stable() {
        let atoms = box_atoms(&[-3.0, -3.0], &[3.0, 3.0], &[12, 12], |_| Complex64::new(1.0, 0.0)).unwrap();
        let field = SpectralField::new(2, atoms).unwrap();
        let kind = SymbolKind::Elliptic;
        let times = TimeSet::Points { times: vec![0.0, 0.05] };
        let coarse = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![1.0 / 32.0; 2]).unwrap();
        let fine = SpatialGrid::new(vec![0.0, 0.0], 1.0, vec![1.0 / 64.0; 2]).unwrap();
        let a = ball_l2(
            &maximal_profile(&field, &times, &kind, &coarse).unwrap(),
            &[0.0, 0.0],
            1.0,
        )
        .unwrap();
        let b = ball_l2(
            &maximal_profile(&field, &times, &kind, &fine).unwrap(),
            &[0.0, 0.0],
            1.0,
        )
        .unwrap();
        assert!((a - b).abs() / b < 0.01);
    }
}
