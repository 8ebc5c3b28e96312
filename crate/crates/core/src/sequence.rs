//! Decreasing time sequences in the weak Lorentz class `ℓ^{r,∞}(ℕ)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Strictly decreasing reals in `(0, 1)` together with the intended class `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SequenceDoc", into = "SequenceDoc")]
pub struct TimeSequence {
    values: Vec<f64>,
    r: f64,
}

#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    r: f64,
    values: Vec<f64>,
}

impl TryFrom<SequenceDoc> for TimeSequence {
    type Error = Error;
    fn try_from(doc: SequenceDoc) -> Result<Self> {
        TimeSequence::new(doc.values, doc.r)
    }
}

impl From<TimeSequence> for SequenceDoc {
    fn from(s: TimeSequence) -> Self {
        SequenceDoc {
            r: s.r,
            values: s.values,
        }
    }
}

impl TimeSequence {
    pub fn new(values: Vec<f64>, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
            return Err(invalid("values", format!("{v} is outside (0, 1)")));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("values", "sequence must be strictly decreasing"));
        }
        Ok(Self { values, r })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `max_{m ≤ n} m · t_m^r` for every prefix length `n`.
    pub fn running_quasinorm(&self, r: f64) -> Vec<f64> {
        let mut best = 0.0f64;
        self.values
            .iter()
            .enumerate()
            .map(|(i, t)| {
                best = best.max((i + 1) as f64 * t.powf(r));
                best
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `2 / ((N+1)r/N + 1)`.
pub fn beta(r: f64, dimension: usize) -> f64 {
    let n = dimension as f64;
    2.0 / ((n + 1.0) * r / n + 1.0)
}

/// Parameters of the concatenated block sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub r: f64,
    pub dimension: usize,
    pub first_scale: f64,
    pub block_count: usize,
}

impl BlockSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(invalid("r", "must be positive"));
        }
        if self.dimension < 2 {
            return Err(invalid("dimension", "must be at least 2"));
        }
        if !(self.first_scale >= 2.0 && self.first_scale.is_finite()) {
            return Err(invalid("first_scale", "must be at least 2"));
        }
        if self.block_count == 0 {
            return Err(invalid("block_count", "must be positive"));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        beta(self.r, self.dimension)
    }
}

/// Metadata of one block `I_n = [R_n^{−β(r+1)}, R_n^{−β})`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockInfo {
    pub scale: f64,
    pub lower: f64,
    pub upper: f64,
    pub spacing: f64,
    pub count: usize,
    /// Set when `I_n` holds no lattice point and the block contributes nothing.
    pub skipped: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockSequence {
    pub sequence: TimeSequence,
    pub blocks: Vec<BlockInfo>,
}

/// Number of `k ≥ 1` with `k·spacing < upper`.
///
/// Ratios within `1e-9` (relative) of an integer are snapped to it, so an
/// upper endpoint that is a lattice point is excluded as intended.
pub fn lattice_count(spacing: f64, upper: f64) -> usize {
    let ratio = upper / spacing;
    let nearest = ratio.round();
    if nearest >= 1.0 && (ratio - nearest).abs() <= 1e-9 * ratio {
        nearest as usize - 1
    } else {
        ratio.floor().max(0.0) as usize
    }
}

/// Decreasing enumeration of `spacing·ℤ ∩ [spacing, upper)`.
pub fn lattice_times(spacing: f64, upper: f64) -> Vec<f64> {
    let count = lattice_count(spacing, upper);
    (1..=count).rev().map(|k| k as f64 * spacing).collect()
}

/// Smallest `2^{m/8}` with `R^{−β} ≤ ½ R_n^{−β(r+1)}`.
pub fn next_block_scale(current: f64, r: f64, beta: f64) -> f64 {
    let target = 1.0 / beta + (r + 1.0) * current.log2();
    let mut m = (8.0 * target - 1e-9).ceil() as i64;
    let bound = 0.5 * current.powf(-beta * (r + 1.0));
    while 2f64.powf(m as f64 / 8.0).powf(-beta) > bound {
        m += 1;
    }
    while m > 0 && 2f64.powf((m - 1) as f64 / 8.0).powf(-beta) <= bound {
        m -= 1;
    }
    2f64.powf(m as f64 / 8.0)
}

pub fn build_block_sequence(spec: &BlockSpec) -> Result<BlockSequence> {
    spec.validate()?;
    let beta = spec.beta();
    let mut values = Vec::new();
    let mut blocks = Vec::with_capacity(spec.block_count);
    let mut scale = spec.first_scale;
    for n in 0..spec.block_count {
        if n > 0 {
            scale = next_block_scale(scale, spec.r, beta);
        }
        let spacing = scale.powf(-beta * (spec.r + 1.0));
        let upper = scale.powf(-beta);
        if !(spacing > 0.0) {
            return Err(invalid("block_count", format!("block {n} underflows double precision")));
        }
        let times = lattice_times(spacing, upper);
        blocks.push(BlockInfo {
            scale,
            lower: spacing,
            upper,
            spacing,
            count: times.len(),
            skipped: times.is_empty(),
        });
        values.extend(times);
    }
    Ok(BlockSequence {
        sequence: TimeSequence::new(values, spec.r)?,
        blocks,
    })
}

/// `t_n = (n+1)^{−1/r}`, `n = 1..=count`.
pub fn build_power_sequence(r: f64, count: usize) -> Result<TimeSequence> {
    if !(r.is_finite() && r > 0.0) {
        return Err(invalid("r", "must be positive"));
    }
    let values = (1..=count).map(|n| ((n + 1) as f64).powf(-1.0 / r)).collect();
    TimeSequence::new(values, r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakLrReport {
    /// `sup_b b^r ♯{n : t_n > b}`
    pub quasinorm: f64,
    /// 1-based index `n` attaining `n·t_n^r`.
    pub witness_index: usize,
    /// The sup is approached as `b ↑ witness_b`.
    pub witness_b: f64,
    /// `sup_b b^r ♯{n : b < t_n ≤ 2b}`
    pub dyadic_sup: f64,
}

/// For a finite decreasing sequence the sup equals `max_n n·t_n^r`.
pub fn weak_lr_quasinorm(seq: &TimeSequence, r: f64) -> Result<WeakLrReport> {
    if seq.is_empty() {
        return Err(Error::Empty("time sequence"));
    }
    let (idx, quasinorm) = seq
        .values
        .iter()
        .enumerate()
        .map(|(i, t)| (i, (i + 1) as f64 * t.powf(r)))
        .fold(
            (0, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
    Ok(WeakLrReport {
        quasinorm,
        witness_index: idx + 1,
        witness_b: seq.values[idx],
        dyadic_sup: dyadic_count_bound(seq, r)?,
    })
}

/// `sup_{b>0} b^r ♯{m : b < t_m ≤ 2b}`.
///
/// The counting function is piecewise constant with jumps at `b = t_m` and
/// `b = t_m/2`; on each piece `b^r` increases, so the sup is attained at a
/// breakpoint or as a left limit into one. Both are evaluated.
pub fn dyadic_count_bound(seq: &TimeSequence, r: f64) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::Empty("time sequence"));
    }
    let mut asc = seq.values.clone();
    asc.reverse();
    // ♯{t : lo < t ≤ hi} and ♯{t : lo ≤ t < hi}
    let open_closed = |lo: f64, hi: f64| asc.partition_point(|t| *t <= hi) - asc.partition_point(|t| *t <= lo);
    let closed_open = |lo: f64, hi: f64| asc.partition_point(|t| *t < hi) - asc.partition_point(|t| *t < lo);
    let mut best = 0.0f64;
    for t in &seq.values {
        for b in [*t, 0.5 * t] {
            let at = open_closed(b, 2.0 * b) as f64;
            let left = closed_open(b, 2.0 * b) as f64;
            best = best.max(b.powf(r) * at.max(left));
        }
    }
    Ok(best)
}

/// `τ = 2^{−2k/((N+1)r/N+1)}`.
pub fn split_threshold(k: f64, r: f64, dimension: usize) -> f64 {
    2f64.powf(-k * beta(r, dimension))
}

/// Splits into `{t ≥ τ}` and `{t < τ}`.
pub fn split_at_threshold(
    seq: &TimeSequence,
    k: f64,
    r: f64,
    dimension: usize,
) -> Result<(TimeSequence, TimeSequence)> {
    let tau = split_threshold(k, r, dimension);
    let cut = seq.values.partition_point(|t| *t >= tau);
    Ok((
        TimeSequence::new(seq.values[..cut].to_vec(), seq.r)?,
        TimeSequence::new(seq.values[cut..].to_vec(), seq.r)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn beta_values() {
        assert!((beta(2.0 / 3.0, 2) - 1.0).abs() < 1e-15);
        assert!((beta(0.5, 2) - 8.0 / 7.0).abs() < 1e-15);
        assert!((beta(0.75, 3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sequence_validation() {
        assert!(TimeSequence::new(vec![0.5, 0.5], 1.0).is_err());
        assert!(TimeSequence::new(vec![1.0], 1.0).is_err());
        assert!(TimeSequence::new(vec![0.5], 0.0).is_err());
        assert!(TimeSequence::new(vec![], 1.0).is_ok());
    }

    #[test]
    fn lattice_snapping() {
        assert_eq!(lattice_count(0.25, 1.0), 3);
        assert_eq!(lattice_count(0.1, 0.3), 2);
        assert_eq!(lattice_count(0.3, 0.2), 0);
        assert_eq!(lattice_count(1.0, 2.5), 2);
    }

    #[test]
    fn power_sequence_small() {
        let s = build_power_sequence(1.0, 3).unwrap();
        let want = [0.5, 1.0 / 3.0, 0.25];
        for (a, b) in s.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn power_sequence_quasinorm_below_one() {
        let s = build_power_sequence(0.5, 100).unwrap();
        let q = weak_lr_quasinorm(&s, 0.5).unwrap().quasinorm;
        // brute force: n·t_n^r = n/(n+1)
        let oracle = (1..=100).map(|n| n as f64 / (n + 1) as f64).fold(0.0, f64::max);
        assert!((q - oracle).abs() < 1e-12);
        assert!(q < 1.0);
    }

    #[test]
    fn quasinorm_examples() {
        let s = TimeSequence::new(vec![0.5], 1.0).unwrap();
        assert_eq!(weak_lr_quasinorm(&s, 1.0).unwrap().quasinorm, 0.5);
        let s = TimeSequence::new(vec![0.5, 0.25, 0.125], 1.0).unwrap();
        let rep = weak_lr_quasinorm(&s, 1.0).unwrap();
        assert_eq!(rep.quasinorm, 0.5);
        assert!(weak_lr_quasinorm(&TimeSequence::new(vec![], 1.0).unwrap(), 1.0).is_err());
    }

    #[test]
    fn dyadic_bound_examples() {
        // b ↑ 1/2 keeps t = 1/2 inside (b, 2b]: the sup is 1/2, not the
        // value 1/4 seen at the breakpoint b = 1/4.
        let s = TimeSequence::new(vec![0.5, 0.25, 0.125], 1.0).unwrap();
        assert!((dyadic_count_bound(&s, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let single = TimeSequence::new(vec![0.3], 0.5).unwrap();
        assert!((dyadic_count_bound(&single, 0.5).unwrap() - 0.3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn block_sequence_first_block() {
        let spec = BlockSpec {
            r: 0.5,
            dimension: 2,
            first_scale: 2.0,
            block_count: 1,
        };
        let out = build_block_sequence(&spec).unwrap();
        // oracle: brute-force scan of k·2^{−12/7} against [2^{−12/7}, 2^{−8/7})
        let h = 2f64.powf(-12.0 / 7.0);
        let hi = 2f64.powf(-8.0 / 7.0);
        let oracle: Vec<f64> = (1..100)
            .rev()
            .map(|k| k as f64 * h)
            .filter(|t| *t >= h && *t < hi)
            .collect();
        assert_eq!(out.sequence.values(), oracle.as_slice());
        assert_eq!(out.blocks[0].count, 1);
    }

    #[test]
    fn block_scale_rule() {
        let beta = beta(0.5, 2);
        let next = next_block_scale(16.0, 0.5, beta);
        assert!(next.powf(-beta) <= 0.5 * 16f64.powf(-beta * 1.5));
        let smaller = next / 2f64.powf(1.0 / 8.0);
        assert!(smaller.powf(-beta) > 0.5 * 16f64.powf(-beta * 1.5));
        assert!((next.log2() * 8.0 - 55.0).abs() < 1e-9);
    }

    #[test]
    fn block_sequence_certificates() {
        let spec = BlockSpec {
            r: 0.5,
            dimension: 2,
            first_scale: 16.0,
            block_count: 3,
        };
        let out = build_block_sequence(&spec).unwrap();
        let rep = weak_lr_quasinorm(&out.sequence, 0.5).unwrap();
        assert!(rep.quasinorm <= 2.0);
        assert!(rep.dyadic_sup <= 1.0);
        for pair in out.blocks.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.count > 0 && b.count > 0 {
                assert!(b.spacing * b.count as f64 <= a.lower);
            }
        }
    }

    #[test]
    fn split_examples() {
        let s = build_power_sequence(0.5, 50).unwrap();
        let (a1, a2) = split_at_threshold(&s, 0.01, 0.5, 2).unwrap();
        assert_eq!(a1.len(), 0);
        assert_eq!(a2.len(), 50);
        let (a1, a2) = split_at_threshold(&s, 1000.0, 0.5, 2).unwrap();
        assert_eq!(a1.len(), 50);
        assert!(a2.is_empty());
        let s = TimeSequence::new(vec![0.9, 0.8], 1.0).unwrap();
        let (_, a2) = split_at_threshold(&s, 0.01, 1.0, 2).unwrap();
        assert!(a2.is_empty() || a2.len() == 2);
    }

    #[test]
    fn json_round_trip() {
        let s = build_power_sequence(0.7, 5).unwrap();
        assert_eq!(TimeSequence::from_json(&s.to_json().unwrap()).unwrap(), s);
        assert!(TimeSequence::from_json(r#"{"r":1.0,"values":[0.1,0.2]}"#).is_err());
    }

    /// Dense-b oracle: evaluate the defining sup directly on a b-grid that
    /// brackets every breakpoint from both sides.
    fn sup_over_grid(values: &[f64], r: f64, dyadic: bool) -> f64 {
        let mut bs = Vec::new();
        for t in values {
            for base in [*t, 0.5 * t] {
                for f in [1.0 - 1e-9, 1.0, 1.0 + 1e-9] {
                    bs.push(base * f);
                }
            }
        }
        bs.iter()
            .map(|b| {
                let n = values
                    .iter()
                    .filter(|t| **t > *b && (!dyadic || **t <= 2.0 * b))
                    .count();
                b.powf(r) * n as f64
            })
            .fold(0.0, f64::max)
    }

    fn arb_sequence() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.001f64..0.999, 1..40).prop_map(|mut v| {
            v.sort_by(|a, b| b.partial_cmp(a).unwrap());
            v.dedup();
            v
        })
    }

    proptest! {
        #[test]
        fn quasinorm_matches_dense_b(values in arb_sequence(), r in 0.1f64..3.0) {
            let s = TimeSequence::new(values.clone(), r).unwrap();
            let q = weak_lr_quasinorm(&s, r).unwrap().quasinorm;
            prop_assert!((q - sup_over_grid(&values, r, false)).abs() < 1e-6);
        }

        #[test]
        fn dyadic_matches_dense_b(values in arb_sequence(), r in 0.1f64..3.0) {
            let s = TimeSequence::new(values.clone(), r).unwrap();
            let q = dyadic_count_bound(&s, r).unwrap();
            prop_assert!((q - sup_over_grid(&values, r, true)).abs() < 1e-6);
        }

        #[test]
        fn appending_never_decreases(values in arb_sequence(), r in 0.1f64..3.0, frac in 0.01f64..0.99) {
            let s = TimeSequence::new(values.clone(), r).unwrap();
            let before = weak_lr_quasinorm(&s, r).unwrap().quasinorm;
            let mut longer = values.clone();
            longer.push(values.last().unwrap() * frac);
            let after = weak_lr_quasinorm(&TimeSequence::new(longer, r).unwrap(), r).unwrap().quasinorm;
            prop_assert!(after >= before);
        }

        #[test]
        fn split_partitions(values in arb_sequence(), k in 0.1f64..20.0, r in 0.1f64..2.0) {
            let s = TimeSequence::new(values.clone(), r).unwrap();
            let (a1, a2) = split_at_threshold(&s, k, r, 2).unwrap();
            let tau = split_threshold(k, r, 2);
            prop_assert_eq!(a1.len() + a2.len(), values.len());
            prop_assert!(a1.values().iter().all(|t| *t >= tau));
            prop_assert!(a2.values().iter().all(|t| *t < tau));
            let q = weak_lr_quasinorm(&s, r).unwrap().quasinorm;
            prop_assert!(a1.len() as f64 <= q * tau.powf(-r) * (1.0 + 1e-12));
        }

        #[test]
        fn block_sequences_certified(r in 0.1f64..0.66, n in 2usize..5, m in 8u32..40, blocks in 1usize..4) {
            let spec = BlockSpec { r, dimension: n, first_scale: 2f64.powf(m as f64 / 8.0), block_count: blocks };
            if let Ok(out) = build_block_sequence(&spec) {
                if !out.sequence.is_empty() {
                    prop_assert!(dyadic_count_bound(&out.sequence, r).unwrap() <= 1.0);
                }
            }
        }
    }
}
