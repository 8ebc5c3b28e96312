//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schro_lab::counterexamples::{
    build_focusing, build_nonelliptic, resonance_at_time, verify_f1_focusing, verify_nonelliptic, FocusingSpec,
    NonellipticSpec, GOLDEN_SLOPE,
};
use schro_lab::harness::{run_interval, run_sweep, IntervalSweepConfig, SweepConfig, SweepFamily};
use schro_lab::maximal::{
    nonelliptic_critical_r, nonelliptic_sweep, random_bump_field, threshold, threshold_table, BumpField, BumpProfile,
    Family, NonellipticSweep, ThresholdQuery,
};
use schro_lab::packets::{
    decompose, far_field_negligible, reconstruct, tube_drift, tube_envelope_check, PacketLattice, FAR_MULTIPLIER,
};
use schro_lab::sequence::{
    build_block_sequence, build_power_sequence, dyadic_count_bound, weak_lr_quasinorm, BlockSpec,
};
use schro_lab::SymbolKind;

struct Verdict {
    pass: bool,
    detail: String,
}

type Check = fn() -> Result<Verdict, String>;

fn verdict(pass: bool, detail: String) -> Result<Verdict, String> {
    Ok(Verdict { pass, detail })
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn symbols(dimension: usize) -> Vec<SymbolKind> {
    let mut out = vec![
        SymbolKind::Elliptic,
        SymbolKind::Fractional { a: 0.5 },
        SymbolKind::Fractional { a: 3.0 },
    ];
    if dimension >= 2 {
        out.push(SymbolKind::nonelliptic(dimension));
    }
    if dimension == 2 {
        out.push(SymbolKind::Hyperbolic2D);
    }
    if dimension == 3 {
        out.push(SymbolKind::Saddle3D { sign: 1 });
        out.push(SymbolKind::Saddle3D { sign: -1 });
    }
    out
}

fn unitarity() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut evolutions = 0;
    for i in 0..100 {
        let dimension = 1 + i % 3;
        let cfg = BumpField {
            dimension,
            inner: 1.0,
            outer: 12.0,
            atom_step: 0.5,
            atom_offset: 0.25,
            bumps: 3,
            width_fraction: 0.3,
            shift_radius: 2.0,
            profile: BumpProfile::Compact,
        };
        let f = random_bump_field(&cfg, &mut rng).map_err(err)?;
        let n0 = f.l2_norm();
        for kind in symbols(dimension) {
            for _ in 0..10 {
                let t = rng.gen_range(-10.0..10.0);
                let g = f.propagate(t, &kind).map_err(err)?;
                worst = worst.max((g.l2_norm() - n0).abs() / n0);
                evolutions += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("{evolutions} evolutions, max relative drift {worst:.2e}"),
    )
}

fn weak_lr() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut worst_dyadic, mut worst_q) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let spec = BlockSpec {
            r: rng.gen_range(0.2..1.5),
            dimension: rng.gen_range(2..=3),
            first_scale: rng.gen_range(2.0..8.0),
            block_count: rng.gen_range(1..=3),
        };
        let seq = build_block_sequence(&spec).map_err(err)?.sequence;
        worst_dyadic = worst_dyadic.max(dyadic_count_bound(&seq, spec.r).map_err(err)?);
        worst_q = worst_q.max(weak_lr_quasinorm(&seq, spec.r).map_err(err)?.quasinorm);
    }
    let mut worst_power = 0.0f64;
    for r in [0.1, 0.25, 0.5, 1.0, 2.0] {
        let seq = build_power_sequence(r, 2000).map_err(err)?;
        worst_power = worst_power.max(weak_lr_quasinorm(&seq, r).map_err(err)?.quasinorm);
    }
    verdict(
        worst_dyadic <= 1.0 && worst_q <= 2.0 && worst_power < 1.0,
        format!(
            "block: max dyadic {worst_dyadic:.4}, max quasinorm {worst_q:.4}; power: max quasinorm {worst_power:.4}"
        ),
    )
}

fn resonance() -> Result<Verdict, String> {
    let spec = FocusingSpec::resonant(2, 0.5, 8.0, 100.0, vec![GOLDEN_SLOPE]);
    let datum = build_focusing(&spec).map_err(err)?;
    let h = spec.time_spacing();
    let mut min_on = f64::INFINITY;
    let mut min_off = f64::INFINITY;
    for t in datum.times.values() {
        min_on = min_on.min(resonance_at_time(&datum, *t).min_ratio);
        min_off = min_off.min(resonance_at_time(&datum, t + 0.5 * h).min_ratio);
    }
    verdict(
        min_on >= 0.5 && min_off < 0.5,
        format!(
            "{} times, min ratio {min_on:.5}; half-step control min {min_off:.4}",
            datum.times.len()
        ),
    )
}

fn f1_focusing() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::INFINITY;
    for scale in [64.0, 128.0] {
        let spec = FocusingSpec::new(2, 0.5, scale, vec![GOLDEN_SLOPE]);
        let datum = build_focusing(&spec).map_err(err)?;
        let hi = 0.5 * scale.powf(1.0 - spec.beta());
        for _ in 0..50 {
            let x1 = loop {
                let v = rng.gen_range(0.0..hi);
                if v > 0.0 {
                    break v;
                }
            };
            worst = worst.min(verify_f1_focusing(&spec, &datum, x1).map_err(err)?.ratio);
        }
    }
    verdict(
        worst >= 0.9,
        format!("100 samples at R = 64, 128, min ratio {worst:.5}"),
    )
}

fn nonelliptic() -> Result<Verdict, String> {
    let specs = [
        NonellipticSpec {
            r: 0.5,
            eps: 0.1,
            b: 2f64.powi(-10),
            m: 4.0,
        },
        NonellipticSpec {
            r: 1.0 / 3.0,
            eps: 0.05,
            b: 2f64.powi(-9),
            m: 8.0,
        },
        NonellipticSpec {
            r: 0.8,
            eps: 0.1,
            b: 2f64.powi(-6),
            m: 2.0,
        },
    ];
    let mut fractions = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let datum = build_nonelliptic(spec, 2).map_err(err)?;
        fractions.push(verify_nonelliptic(&datum, 200, 50 + i as u64).map_err(err)?.fraction);
    }
    let sweep = NonellipticSweep {
        r: 0.5,
        eps: 0.1,
        b: 2f64.powi(-10),
        ms: vec![2.0, 4.0, 8.0, 16.0],
        dimension: 2,
        s: None,
    };
    let fit = nonelliptic_sweep(&sweep).map_err(err)?;
    let target = 1.0 / (2.0 * (sweep.r - sweep.eps + 1.0));
    let diff = (fit.fitted_exponent - target).abs();
    verdict(
        fractions.iter().all(|f| *f == 1.0) && diff <= 0.15,
        format!(
            "fractions {fractions:?}; M-sweep exponent {:.4} vs {target:.4} (diff {diff:.4})",
            fit.fitted_exponent
        ),
    )
}

/// Table entries written out independently of the library.
fn table_oracle(family: &Family, n: f64, r: Option<f64>) -> f64 {
    let lorentz = |r: f64| r / ((n + 1.0) * r / n + 1.0);
    match (family, r) {
        (Family::Schrodinger, None) => n / (2.0 * (n + 1.0)),
        (Family::Schrodinger, Some(r)) => (n / (2.0 * (n + 1.0))).min(lorentz(r)),
        (Family::Nonelliptic, None) => 0.5,
        (Family::Nonelliptic, Some(r)) => 0.5f64.min(r / (r + 1.0)),
        (Family::Fractional { a }, None) if *a > 1.0 => n / (2.0 * (n + 1.0)),
        (Family::Fractional { a }, Some(r)) if *a > 1.0 => (n / (2.0 * (n + 1.0))).min(a / 2.0 * lorentz(r)),
        (Family::Fractional { a }, None) => a / 4.0,
        (Family::Fractional { a }, Some(r)) => (a / 4.0).min(a / 2.0 * r / (2.0 * r + 1.0)),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs())
}

fn exponent_algebra() -> Result<Verdict, String> {
    let mut failures = Vec::new();
    let mut checked = 0;
    let rs = [
        None,
        Some(0.1),
        Some(0.25),
        Some(0.5),
        Some(2.0 / 3.0),
        Some(1.0),
        Some(3.0),
        Some(f64::INFINITY),
    ];
    for row in threshold_table() {
        let dims: Vec<usize> = if row.dimensions.starts_with("N>=") {
            (row.min_dimension..row.min_dimension + 3).collect()
        } else {
            vec![row.min_dimension]
        };
        let Some(family) = row.family.clone() else {
            let q = ThresholdQuery {
                family: Family::Fractional { a: 0.5 },
                dimension: row.min_dimension,
                r: Some(0.5),
            };
            if threshold(&q).is_ok() {
                failures.push(format!("{} {}: open entry answered", row.operator, row.dimensions));
            }
            continue;
        };
        let inclusive = row.continuous.starts_with("s>=");
        for &d in &dims {
            for r in rs {
                let got = threshold(&ThresholdQuery {
                    family: family.clone(),
                    dimension: d,
                    r,
                })
                .map_err(err)?;
                let want = table_oracle(&family, d as f64, r.filter(|v| v.is_finite()));
                checked += 1;
                if !close(got.s0, want) || got.inclusive != inclusive {
                    failures.push(format!("{} N={d} r={r:?}: {} vs {want}", row.operator, got.s0));
                }
            }
        }
    }
    // Crossovers: the sequence arm meets the continuous value exactly there.
    for d in 1..=5usize {
        let n = d as f64;
        let q = ThresholdQuery {
            family: Family::Schrodinger,
            dimension: d,
            r: Some(n / (n + 1.0)),
        };
        let s = threshold(&q).map_err(err)?.s0;
        let arm = (n / (n + 1.0)) / ((n + 1.0) / n * (n / (n + 1.0)) + 1.0);
        if !close(s, n / (2.0 * (n + 1.0))) || !close(arm, n / (2.0 * (n + 1.0))) {
            failures.push(format!("Schrödinger crossover N={d}: {s}"));
        }
    }
    for d in 2..=4usize {
        let s = threshold(&ThresholdQuery {
            family: Family::Nonelliptic,
            dimension: d,
            r: Some(1.0),
        })
        .map_err(err)?
        .s0;
        if s != 0.5 {
            failures.push(format!("nonelliptic crossover N={d}: {s}"));
        }
    }
    let mut worst_inverse = 0.0f64;
    for i in 1..100 {
        let s = 0.5 * i as f64 / 100.0;
        let r = nonelliptic_critical_r(s).map_err(err)?;
        let back = threshold(&ThresholdQuery {
            family: Family::Nonelliptic,
            dimension: 2,
            r: Some(r),
        })
        .map_err(err)?
        .s0;
        worst_inverse = worst_inverse.max((back - s).abs());
    }
    if worst_inverse > 1e-12 {
        failures.push(format!("inverse round trip error {worst_inverse:e}"));
    }
    verdict(
        failures.is_empty(),
        format!("{checked} table values, crossovers, inverse round trip {worst_inverse:.1e}; failures {failures:?}"),
    )
}

fn focusing_sweep() -> Result<Verdict, String> {
    let (n, r) = (2.0, 0.5);
    let mut sharp = SweepConfig {
        family: SweepFamily::Focusing,
        ..SweepConfig::default()
    };
    sharp.focusing.dimension = 2;
    sharp.focusing.r = r;
    sharp.focusing.s = r / ((n + 1.0) * r / n + 1.0);
    let a = run_sweep(&sharp).map_err(err)?;
    let fitted_sharp = a.summary["fitted_exponent"].as_f64().ok_or("missing exponent")?;

    let mut zero = sharp.clone();
    zero.focusing.s = 0.0;
    let b = run_sweep(&zero).map_err(err)?;
    let fitted_zero = b.summary["fitted_exponent"].as_f64().ok_or("missing exponent")?;
    // lower − upper exponent at s = 0
    let beta = 2.0 / ((n + 1.0) * r / n + 1.0);
    let gap = 1.0 - (r + 1.0) * beta / 2.0;
    let target = 0.5 + (n - 1.0) * gap / 2.0 - zero.focusing.eps - beta / 4.0;
    verdict(
        (-0.1..=0.1).contains(&fitted_sharp) && (fitted_zero - target).abs() <= 0.1,
        format!("sharp s: exponent {fitted_sharp:.4}; s = 0: exponent {fitted_zero:.4} vs {target:.4}"),
    )
}

fn wave_packets() -> Result<Verdict, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut round_trip = 0.0f64;
    let mut drift_ok = true;
    let mut c4 = 0.0f64;
    for (k, j) in [(4.0, 6.0), (5.0, 8.0), (6.0, 9.0)] {
        let lattice = PacketLattice::new(2, k, j, 8.0).map_err(err)?;
        for _ in 0..5 {
            let f = lattice.random_field(3, &mut rng).map_err(err)?;
            let ratio = decompose(&f, &lattice).map_err(err)?.frame_ratio();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        let theta = lattice.central_theta();
        let nu = vec![1i64, 0];
        let packet = lattice.packet_field(theta, &nu).map_err(err)?;
        let back = reconstruct(&decompose(&packet, &lattice).map_err(err)?).map_err(err)?;
        let diff = back
            .combine(Complex64::new(1.0, 0.0), &packet, Complex64::new(-1.0, 0.0))
            .map_err(err)?
            .l2_norm();
        round_trip = round_trip.max(diff / packet.l2_norm());

        let horizon = 2f64.powf(-j);
        let times = [0.0, 0.25 * horizon, 0.5 * horizon, 0.75 * horizon, horizon];
        drift_ok &= tube_drift(&lattice, theta, &nu, &times)
            .map_err(err)?
            .iter()
            .all(|d| d.pass);

        let l = lattice.side();
        let c = lattice.theta_center(theta);
        let nc = lattice.nu_center(&nu);
        let samples: Vec<(Vec<f64>, f64)> = times
            .iter()
            .flat_map(|t| {
                let axis: Vec<f64> = nc.iter().zip(&c).map(|(n, ci)| n - 2.0 * t * ci).collect();
                [0.0, 1.0, 4.0, 16.0]
                    .into_iter()
                    .map(move |off| (vec![axis[0] + off / l, axis[1]], *t))
            })
            .collect();
        c4 = c4.max(tube_envelope_check(&lattice, theta, &nu, &samples).map_err(err)?.c4);
    }
    let far_lattice = PacketLattice::new(2, 5.0, 8.0, 32.0).map_err(err)?;
    let f = far_lattice
        .random_field(3, &mut ChaCha8Rng::seed_from_u64(0))
        .map_err(err)?;
    let coeffs = decompose(&f, &far_lattice).map_err(err)?;
    let far = far_field_negligible(&coeffs, &[0.0, 0.0], FAR_MULTIPLIER).map_err(err)?;
    verdict(
        lo >= 0.5 && hi <= 2.0 && round_trip <= 1e-3 && far.ratio <= 1e-6 && drift_ok && c4 <= 1e3,
        format!(
            "frame [{lo:.12}, {hi:.12}], round trip {round_trip:.1e}, far field {:.1e}, drift {}, tube C4 {c4:.1}",
            far.ratio,
            if drift_ok { "ok" } else { "violated" }
        ),
    )
}

fn interval() -> Result<Verdict, String> {
    let out = run_interval(&IntervalSweepConfig::default()).map_err(err)?;
    let spread = out.summary["base_spread"].as_f64().ok_or("missing spread")?;
    let exceeded = out.summary["exceeded"].as_array().map_or(0, |a| a.len());
    verdict(
        spread < 2.0 && exceeded == 0,
        format!(
            "spread at |I| = λ^-2: {spread:.4}; envelope constant {:.4}; cells above envelope {exceeded}",
            out.summary["envelope_constant"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn determinism() -> Result<Verdict, String> {
    let dir = tempfile::tempdir().map_err(err)?;
    let commands: [&[&str]; 8] = [
        &["thresholds"],
        &["seq"],
        &["focusing"],
        &["nonelliptic"],
        &["packets"],
        &["sweep"],
        &["sweep", "--family", "nonelliptic"],
        &["interval"],
    ];
    let mut differing = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{i}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_schro-lab"))
                .args(["--seed", "17", "--out"])
                .arg(&out)
                .args(*args)
                .output()
                .map_err(err)?
                .status;
            if !matches!(status.code(), Some(0) | Some(1)) {
                return Err(format!("{args:?} exited with {status}"));
            }
            outputs.push(fs::read(out.join("results.csv")).map_err(err)?);
        }
        if outputs[0] != outputs[1] {
            differing.push(args.join(" "));
        }
    }
    verdict(
        differing.is_empty(),
        format!("{} commands run twice; differing CSVs {differing:?}", commands.len()),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Option<Duration>); 10] = [
        ("unitarity", unitarity, Some(Duration::from_secs(5))),
        ("weak-l^r certificates", weak_lr, Some(Duration::from_secs(5))),
        ("resonance", resonance, Some(Duration::from_secs(60))),
        ("f1 focusing", f1_focusing, Some(Duration::from_secs(30))),
        ("nonelliptic focusing", nonelliptic, Some(Duration::from_secs(120))),
        ("exponent algebra", exponent_algebra, None),
        ("focusing R-sweep", focusing_sweep, Some(Duration::from_secs(600))),
        ("wave packets", wave_packets, Some(Duration::from_secs(300))),
        ("interval experiment", interval, Some(Duration::from_secs(300))),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let (pass, detail) = match result {
            Ok(v) => (v.pass && in_time, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
        println!(
            "criterion {}: {} {name}: {detail} [{:.2}s{budget}]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
