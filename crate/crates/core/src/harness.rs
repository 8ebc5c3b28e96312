//! Configuration resolution and experiment drivers behind the `schro-lab` binary.
//!
//! Every command takes a JSON parameter block. Values are resolved with the
//! precedence command-line flags > config file > built-in defaults, and the
//! fully resolved block is echoed in `manifest.json`. Outputs are written only
//! after the experiment finishes, each file atomically.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::counterexamples::focusing::GOLDEN_SLOPE;
use crate::counterexamples::{
    build_focusing, build_nonelliptic, resonance_at_time, sample_nonelliptic, verify_f1_focusing, FocusingSpec,
    NonellipticSpec,
};
use crate::error::{invalid, Error, Result};
use crate::maximal::{
    interval_sup_experiment, nonelliptic_sweep, run_r_sweep, threshold, threshold_table, Family, FocusingSweep,
    IntervalConfig, NonellipticSweep, SweepResult, ThresholdQuery,
};
use crate::packets::{decompose, far_field_negligible, reconstruct, tube_drift, PacketLattice, FAR_MULTIPLIER};
use crate::sequence::{
    beta, build_block_sequence, build_power_sequence, dyadic_count_bound, weak_lr_quasinorm, BlockSpec, TimeSequence,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Thresholds,
    Seq,
    Focusing,
    Nonelliptic,
    Packets,
    Sweep,
    Interval,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Thresholds => "thresholds",
            Self::Seq => "seq",
            Self::Focusing => "focusing",
            Self::Nonelliptic => "nonelliptic",
            Self::Packets => "packets",
            Self::Sweep => "sweep",
            Self::Interval => "interval",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdsConfig {
    /// `schrodinger`, `fractional` or `nonelliptic`; absent prints the full table.
    pub family: Option<String>,
    pub dimension: usize,
    pub r: Option<f64>,
    pub a: Option<f64>,
}

impl Default for ThresholdsConfig {
    fn default() -> Self {
        Self {
            family: None,
            dimension: 2,
            r: None,
            a: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeqMode {
    Block,
    Power,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeqConfig {
    pub mode: SeqMode,
    pub r: f64,
    pub dimension: usize,
    pub first_scale: f64,
    pub block_count: usize,
    /// Length of a power sequence.
    pub count: usize,
}

impl Default for SeqConfig {
    fn default() -> Self {
        Self {
            mode: SeqMode::Block,
            r: 0.5,
            dimension: 2,
            first_scale: 2.0,
            block_count: 3,
            count: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FocusingConfig {
    pub dimension: usize,
    pub r: f64,
    pub eps: f64,
    /// `R`; ignored in resonant mode, where it is derived from `lattice_scale`.
    pub scale: f64,
    pub theta: Vec<f64>,
    /// Resonant mode when set: `S`, with `R = S^{2/(β(r+1))}`.
    pub lattice_scale: Option<f64>,
    /// `ρ` in resonant mode.
    pub freq_cutoff: Option<f64>,
    pub f1_samples: usize,
}

impl Default for FocusingConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            r: 0.5,
            eps: 0.01,
            scale: 128.0,
            theta: vec![GOLDEN_SLOPE],
            lattice_scale: Some(8.0),
            freq_cutoff: Some(100.0),
            f1_samples: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonellipticConfig {
    pub r: f64,
    pub eps: f64,
    pub b: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub dimension: usize,
    pub samples: usize,
}

impl Default for NonellipticConfig {
    fn default() -> Self {
        Self {
            r: 0.5,
            eps: 0.1,
            b: 2f64.powi(-10),
            m: 4.0,
            dimension: 2,
            samples: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketsConfig {
    pub dimension: usize,
    pub k: f64,
    pub j: f64,
    /// Spatial period `P`; `P·2^{j−k}` must be an integer.
    pub period: f64,
    pub fields: usize,
    pub bumps: usize,
    pub far_multiplier: f64,
    /// Rows with `|c|² < csv_min_energy · ‖f‖²` are left out of the CSV.
    pub csv_min_energy: f64,
}

impl Default for PacketsConfig {
    fn default() -> Self {
        Self {
            dimension: 2,
            k: 5.0,
            j: 8.0,
            period: 32.0,
            fields: 3,
            bumps: 3,
            far_multiplier: FAR_MULTIPLIER,
            csv_min_energy: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    Focusing,
    Nonelliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub focusing: FocusingSweep,
    pub nonelliptic: NonellipticSweep,
    /// Allowed distance between fitted and target exponents; defaults to
    /// 0.1 for focusing and 0.15 for nonelliptic sweeps.
    pub tolerance: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        let (n, r) = (2usize, 0.5);
        Self {
            family: SweepFamily::Focusing,
            focusing: FocusingSweep {
                dimension: n,
                r,
                eps: 0.01,
                theta: vec![GOLDEN_SLOPE],
                scales: (6..=10).map(|e| 2f64.powi(e)).collect(),
                s: r * beta(r, n) / 2.0,
                rho_cells: 1.5,
            },
            nonelliptic: NonellipticSweep {
                r: 0.5,
                eps: 0.1,
                b: 2f64.powi(-10),
                ms: vec![2.0, 4.0, 8.0, 16.0],
                dimension: 2,
                s: None,
            },
            tolerance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntervalSweepConfig {
    pub lambdas: Vec<f64>,
    /// Interval lengths `|I| = λ^{−e}` for each listed `e ∈ [1, 2]`.
    pub length_exponents: Vec<f64>,
    pub dimension: usize,
    pub atom_step: f64,
    /// Allowed spread (max/min) of the ratios at `|I| = λ^{−2}`.
    pub spread_limit: f64,
}

impl Default for IntervalSweepConfig {
    fn default() -> Self {
        Self {
            lambdas: vec![8.0, 16.0, 32.0],
            length_exponents: vec![2.0, 1.5, 1.0],
            dimension: 2,
            atom_step: 1.0,
            spread_limit: 2.0,
        }
    }
}

/// A command together with its fully resolved parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub command: CommandKind,
    pub seed: u64,
    pub jobs: usize,
    pub params: Value,
}

/// Result of one experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub csv: String,
    pub summary: Value,
    pub pass: bool,
}

fn default_params(command: CommandKind) -> Value {
    let v = match command {
        CommandKind::Thresholds => serde_json::to_value(ThresholdsConfig::default()),
        CommandKind::Seq => serde_json::to_value(SeqConfig::default()),
        CommandKind::Focusing => serde_json::to_value(FocusingConfig::default()),
        CommandKind::Nonelliptic => serde_json::to_value(NonellipticConfig::default()),
        CommandKind::Packets => serde_json::to_value(PacketsConfig::default()),
        CommandKind::Sweep => serde_json::to_value(SweepConfig::default()),
        CommandKind::Interval => serde_json::to_value(IntervalSweepConfig::default()),
    };
    v.expect("defaults serialize")
}

/// Recursively overlays `top` on `base`; objects merge key by key.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

fn typed<T: DeserializeOwned + Serialize>(params: &Value) -> Result<(T, Value)> {
    let cfg: T = serde_json::from_value(params.clone())?;
    let canonical = serde_json::to_value(&cfg)?;
    Ok((cfg, canonical))
}

/// Resolves parameters with the precedence flags > file > defaults.
///
/// The config file is a JSON object with the command's parameters and an
/// optional top-level `seed`.
pub fn resolve(
    command: CommandKind,
    config_text: Option<&str>,
    flags: Map<String, Value>,
    seed_flag: Option<u64>,
    jobs: usize,
) -> Result<Resolved> {
    let mut params = default_params(command);
    let mut seed = 0u64;
    if let Some(text) = config_text {
        let file: Value = serde_json::from_str(text)?;
        let Value::Object(mut file) = file else {
            return Err(invalid("config", "must be a JSON object"));
        };
        if let Some(s) = file.remove("seed") {
            seed = s
                .as_u64()
                .ok_or_else(|| invalid("seed", "must be an unsigned 64-bit integer"))?;
        }
        merge(&mut params, Value::Object(file));
    }
    merge(&mut params, Value::Object(flags));
    if let Some(s) = seed_flag {
        seed = s;
    }
    if jobs == 0 {
        return Err(invalid("jobs", "must be positive"));
    }
    // Round-trip through the typed config so the manifest holds every default.
    let params = match command {
        CommandKind::Thresholds => typed::<ThresholdsConfig>(&params)?.1,
        CommandKind::Seq => typed::<SeqConfig>(&params)?.1,
        CommandKind::Focusing => typed::<FocusingConfig>(&params)?.1,
        CommandKind::Nonelliptic => typed::<NonellipticConfig>(&params)?.1,
        CommandKind::Packets => typed::<PacketsConfig>(&params)?.1,
        CommandKind::Sweep => typed::<SweepConfig>(&params)?.1,
        CommandKind::Interval => typed::<IntervalSweepConfig>(&params)?.1,
    };
    Ok(Resolved {
        command,
        seed,
        jobs,
        params,
    })
}

pub fn run(resolved: &Resolved) -> Result<Outcome> {
    let p = &resolved.params;
    match resolved.command {
        CommandKind::Thresholds => run_thresholds(&typed(p)?.0),
        CommandKind::Seq => run_seq(&typed(p)?.0),
        CommandKind::Focusing => run_focusing(&typed(p)?.0, resolved.seed),
        CommandKind::Nonelliptic => run_nonelliptic(&typed(p)?.0, resolved.seed),
        CommandKind::Packets => run_packets(&typed(p)?.0, resolved.seed),
        CommandKind::Sweep => run_sweep(&typed(p)?.0),
        CommandKind::Interval => run_interval(&typed(p)?.0),
    }
}

fn header(title: &str, columns: &[&str]) -> String {
    format!("# {title}\n# columns: {}\n{}\n", columns.join(" "), columns.join(","))
}

fn join_coords(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

fn parse_family(name: &str, a: Option<f64>) -> Result<Family> {
    match name {
        "schrodinger" => Ok(Family::Schrodinger),
        "nonelliptic" => Ok(Family::Nonelliptic),
        "fractional" => Ok(Family::Fractional {
            a: a.ok_or_else(|| invalid("a", "required for the fractional family"))?,
        }),
        other => Err(invalid("family", format!("unknown family `{other}`"))),
    }
}

pub fn run_thresholds(cfg: &ThresholdsConfig) -> Result<Outcome> {
    match &cfg.family {
        None => {
            let mut csv = header(
                "sharp regularity thresholds",
                &["operator", "dimensions", "continuous", "discrete"],
            );
            let rows = threshold_table();
            for row in &rows {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    row.operator, row.dimensions, row.continuous, row.discrete
                );
            }
            Ok(Outcome {
                csv,
                summary: json!({ "rows": rows.len(), "pass": true }),
                pass: true,
            })
        }
        Some(name) => {
            let family = parse_family(name, cfg.a)?;
            let t = threshold(&ThresholdQuery {
                family,
                dimension: cfg.dimension,
                r: cfg.r,
            })?;
            let mut csv = header("threshold s0", &["dimension", "r", "s0", "inclusive"]);
            let r = cfg.r.map_or("inf".to_string(), |r| r.to_string());
            let _ = writeln!(csv, "{},{},{},{}", cfg.dimension, r, t.s0, t.inclusive);
            Ok(Outcome {
                csv,
                summary: json!({ "s0": t.s0, "inclusive": t.inclusive, "pass": true }),
                pass: true,
            })
        }
    }
}

pub fn run_seq(cfg: &SeqConfig) -> Result<Outcome> {
    let (seq, blocks): (TimeSequence, Value) = match cfg.mode {
        SeqMode::Block => {
            let b = build_block_sequence(&BlockSpec {
                r: cfg.r,
                dimension: cfg.dimension,
                first_scale: cfg.first_scale,
                block_count: cfg.block_count,
            })?;
            let blocks = serde_json::to_value(&b.blocks)?;
            (b.sequence, blocks)
        }
        SeqMode::Power => (build_power_sequence(cfg.r, cfg.count)?, Value::Null),
    };
    let report = weak_lr_quasinorm(&seq, cfg.r)?;
    let dyadic = dyadic_count_bound(&seq, cfg.r)?;
    let pass = match cfg.mode {
        SeqMode::Block => dyadic <= 1.0 && report.quasinorm <= 2.0,
        SeqMode::Power => report.quasinorm < 1.0,
    };
    let mut csv = header(
        "weak-l^r sequence: t_n and running quasinorm",
        &["index", "t_n", "running_quasinorm"],
    );
    for (i, (t, q)) in seq.values().iter().zip(seq.running_quasinorm(cfg.r)).enumerate() {
        let _ = writeln!(csv, "{},{},{}", i + 1, t, q);
    }
    Ok(Outcome {
        csv,
        summary: json!({
            "length": seq.len(),
            "quasinorm": report.quasinorm,
            "witness_index": report.witness_index,
            "dyadic_count_bound": dyadic,
            "blocks": blocks,
            "pass": pass,
        }),
        pass,
    })
}

pub fn run_focusing(cfg: &FocusingConfig, seed: u64) -> Result<Outcome> {
    let mut spec = match (cfg.lattice_scale, cfg.freq_cutoff) {
        (Some(s), Some(rho)) => FocusingSpec::resonant(cfg.dimension, cfg.r, s, rho, cfg.theta.clone()),
        (None, None) => FocusingSpec::new(cfg.dimension, cfg.r, cfg.scale, cfg.theta.clone()),
        _ => {
            return Err(invalid(
                "lattice_scale",
                "set both lattice_scale and freq_cutoff, or neither",
            ))
        }
    };
    spec.eps = cfg.eps;
    let datum = build_focusing(&spec)?;
    let mut csv = header("focusing checks", &["check", "index", "x1", "time", "ratio", "pass"]);
    let mut failures = Vec::new();
    let mut min_resonance = f64::INFINITY;
    for (i, t) in datum.times.values().iter().enumerate() {
        let rep = resonance_at_time(&datum, *t);
        min_resonance = min_resonance.min(rep.min_ratio);
        if !rep.pass {
            failures.push(format!("resonance at j = {}", i + 1));
        }
        let _ = writeln!(csv, "resonance,{},,{},{},{}", i + 1, t, rep.min_ratio, rep.pass);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = 0.5 * spec.scale.powf(1.0 - spec.beta());
    let mut min_f1 = f64::INFINITY;
    for _ in 0..cfg.f1_samples {
        let x1 = loop {
            let v = rng.gen_range(0.0..hi);
            if v > 0.0 {
                break v;
            }
        };
        match verify_f1_focusing(&spec, &datum, x1) {
            Ok(rep) => {
                min_f1 = min_f1.min(rep.ratio);
                if !rep.pass {
                    failures.push(format!("f1 focusing at x1 = {x1}"));
                }
                let _ = writeln!(csv, "f1,{},{},{},{},{}", rep.index, x1, rep.time, rep.ratio, rep.pass);
            }
            Err(Error::NoAdmissibleTime(msg)) => {
                failures.push(msg);
                let _ = writeln!(csv, "f1,,{x1},,,false");
            }
            Err(e) => return Err(e),
        }
    }
    let pass = failures.is_empty();
    Ok(Outcome {
        csv,
        summary: json!({
            "scale": spec.scale,
            "beta": spec.beta(),
            "lattice_scale": spec.lattice_scale(),
            "freq_cutoff": spec.freq_cutoff(),
            "times": datum.times.len(),
            "omega1_measure": datum.omega1_measure,
            "omega2_measure": datum.omega2_measure,
            "omega2_centers": datum.omega2_centers.len(),
            "support_radius": datum.support_radius,
            "min_resonance_ratio": min_resonance,
            "min_f1_ratio": if min_f1.is_finite() { json!(min_f1) } else { Value::Null },
            "failures": failures,
            "pass": pass,
        }),
        pass,
    })
}

pub fn run_nonelliptic(cfg: &NonellipticConfig, seed: u64) -> Result<Outcome> {
    let spec = NonellipticSpec {
        r: cfg.r,
        eps: cfg.eps,
        b: cfg.b,
        m: cfg.m,
    };
    let datum = build_nonelliptic(&spec, cfg.dimension)?;
    let samples = sample_nonelliptic(&datum, cfg.samples, seed)?;
    let mut csv = header("nonelliptic focusing samples", &["index", "x", "sup", "pass"]);
    let mut failures = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let ok = s.sup > 0.5;
        if !ok {
            failures.push(i);
        }
        let _ = writeln!(csv, "{},{},{},{}", i, join_coords(&s.x), s.sup, ok);
    }
    let fraction = (samples.len() - failures.len()) as f64 / samples.len() as f64;
    let pass = failures.is_empty();
    Ok(Outcome {
        csv,
        summary: json!({
            "lambda": datum.lambda,
            "spacing": datum.spacing,
            "times": datum.times.len(),
            "fraction": fraction,
            "min_sup": samples.iter().map(|s| s.sup).fold(f64::INFINITY, f64::min),
            "failed_samples": failures,
            "pass": pass,
        }),
        pass,
    })
}

pub fn run_packets(cfg: &PacketsConfig, seed: u64) -> Result<Outcome> {
    if cfg.fields == 0 {
        return Err(invalid("fields", "must be positive"));
    }
    let lattice = PacketLattice::new(cfg.dimension, cfg.k, cfg.j, cfg.period)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frame = (f64::INFINITY, 0.0f64);
    let mut csv = header(
        "wave-packet coefficients",
        &["theta_center", "nu_center", "coef_sq", "tube_direction"],
    );
    let mut far_ratio = 0.0f64;
    for i in 0..cfg.fields {
        let field = lattice.random_field(cfg.bumps, &mut rng)?;
        let coeffs = decompose(&field, &lattice)?;
        let ratio = coeffs.frame_ratio();
        frame = (frame.0.min(ratio), frame.1.max(ratio));
        if i == 0 {
            let floor = cfg.csv_min_energy * coeffs.field_norm * coeffs.field_norm;
            for e in coeffs.entries.iter().filter(|e| e.value.norm_sqr() >= floor) {
                let c = lattice.theta_center(e.theta);
                let mut dir: Vec<f64> = c.iter().map(|v| -2.0 * v).collect();
                dir.push(1.0);
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    join_coords(&c),
                    join_coords(&lattice.nu_center(&e.nu)),
                    e.value.norm_sqr(),
                    join_coords(&dir)
                );
            }
            let far = far_field_negligible(&coeffs, &vec![0.0; cfg.dimension], cfg.far_multiplier)?;
            far_ratio = far.ratio;
        }
    }
    let theta = lattice.central_theta();
    let nu = vec![1i64; cfg.dimension];
    let packet = lattice.packet_field(theta, &nu)?;
    let back = reconstruct(&decompose(&packet, &lattice)?)?;
    let round_trip = back
        .combine(Complex64::new(1.0, 0.0), &packet, Complex64::new(-1.0, 0.0))?
        .l2_norm()
        / packet.l2_norm();
    let horizon = 2f64.powf(-cfg.j);
    let drift = tube_drift(&lattice, theta, &nu, &[0.0, 0.25 * horizon, 0.5 * horizon, horizon])?;
    let drift_ok = drift.iter().all(|d| d.pass);
    let frame_ok = frame.0 >= 0.5 && frame.1 <= 2.0;
    let pass = frame_ok && round_trip <= 1e-3 && far_ratio <= 1e-6 && drift_ok;
    Ok(Outcome {
        csv,
        summary: json!({
            "theta_cubes": lattice.theta_cubes.len(),
            "nu_per_axis": lattice.nu_per_axis(),
            "frame_lower": frame.0,
            "frame_upper": frame.1,
            "round_trip_error": round_trip,
            "far_field_ratio": far_ratio,
            "drift": drift,
            "checks": {
                "frame": frame_ok,
                "round_trip": round_trip <= 1e-3,
                "far_field": far_ratio <= 1e-6,
                "drift": drift_ok,
            },
            "pass": pass,
        }),
        pass,
    })
}

fn sweep_csv(title: &str, result: &SweepResult) -> String {
    let mut csv = header(title, &["param", "ratio", "predicted", "residual"]);
    for row in &result.rows {
        let _ = writeln!(csv, "{},{},{},{}", row.param, row.ratio, row.predicted, row.residual);
    }
    csv
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<Outcome> {
    let (title, result) = match cfg.family {
        SweepFamily::Focusing => ("focusing ratio vs R", run_r_sweep(&cfg.focusing)?),
        SweepFamily::Nonelliptic => ("nonelliptic ratio vs M", nonelliptic_sweep(&cfg.nonelliptic)?),
    };
    let tolerance = cfg.tolerance.unwrap_or(match cfg.family {
        SweepFamily::Focusing => 0.1,
        SweepFamily::Nonelliptic => 0.15,
    });
    let pass = result.within(tolerance);
    Ok(Outcome {
        csv: sweep_csv(title, &result),
        summary: json!({
            "fitted_exponent": result.fitted_exponent,
            "stderr": result.stderr,
            "target_exponent": result.target_exponent,
            "tolerance": tolerance,
            "pass": pass,
        }),
        pass,
    })
}

/// Ratios at `|I| = λ^{−2}` define the envelope `C·λ|I|^{1/2}` with `C` their
/// maximum; every other cell must stay below it.
pub fn run_interval(cfg: &IntervalSweepConfig) -> Result<Outcome> {
    if cfg.lambdas.is_empty() || cfg.length_exponents.is_empty() {
        return Err(Error::Empty("interval sweep needs lambdas and length exponents"));
    }
    let icfg = IntervalConfig {
        dimension: cfg.dimension,
        atom_step: cfg.atom_step,
    };
    let mut cells = Vec::new();
    for &lambda in &cfg.lambdas {
        for &e in &cfg.length_exponents {
            let rep = interval_sup_experiment(lambda, lambda.powf(-e), &icfg)?;
            cells.push((e, rep));
        }
    }
    let base: Vec<f64> = cells
        .iter()
        .filter(|(e, _)| (*e - 2.0).abs() < 1e-12)
        .map(|(_, r)| r.ratio)
        .collect();
    let (lo, hi) = base
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    let spread = if base.is_empty() { f64::NAN } else { hi / lo };
    let c = if base.is_empty() {
        cells
            .iter()
            .map(|(_, r)| r.ratio / (r.lambda * r.interval_length.sqrt()))
            .fold(0.0, f64::max)
    } else {
        hi
    };
    let mut csv = header(
        "maximal ratio over time intervals",
        &["lambda", "interval_length", "ratio", "envelope", "within"],
    );
    let mut exceeded = Vec::new();
    for (_, r) in &cells {
        let envelope = c * r.lambda * r.interval_length.sqrt();
        let ok = r.ratio <= envelope * (1.0 + 1e-12);
        if !ok {
            exceeded.push(json!({ "lambda": r.lambda, "interval_length": r.interval_length }));
        }
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.lambda, r.interval_length, r.ratio, envelope, ok
        );
    }
    let spread_ok = base.is_empty() || spread < cfg.spread_limit;
    let pass = spread_ok && exceeded.is_empty();
    Ok(Outcome {
        csv,
        summary: json!({
            "envelope_constant": c,
            "base_spread": if spread.is_finite() { json!(spread) } else { Value::Null },
            "exceeded": exceeded,
            "pass": pass,
        }),
        pass,
    })
}

fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| invalid("out", "output path has no file name"))?;
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Writes `results.csv`, `summary.json` and `manifest.json` into `dir`.
pub fn write_outputs(dir: &Path, resolved: &Resolved, outcome: &Outcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let manifest = json!({
        "command": resolved.command.name(),
        "seed": resolved.seed,
        "jobs": resolved.jobs,
        "version": env!("CARGO_PKG_VERSION"),
        "config": resolved.params,
    });
    let files = [
        ("results.csv", outcome.csv.clone().into_bytes()),
        ("summary.json", serde_json::to_vec_pretty(&outcome.summary)?),
        ("manifest.json", serde_json::to_vec_pretty(&manifest)?),
    ];
    let mut written = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        written.push(path);
    }
    Ok(written)
}
