use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{Map, Value};

use schro_lab::harness::{resolve, run, write_outputs, CommandKind};

#[derive(Parser)]
#[command(
    name = "schro-lab",
    version,
    about = "Maximal-function experiments for Schrödinger-type evolutions"
)]
struct Cli {
    /// JSON file with the command's parameters (and optionally `seed`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for results.csv, summary.json and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regularity thresholds: the full table, or one family.
    Thresholds(ThresholdArgs),
    /// Weak-ℓ^r time sequences.
    Seq(SeqArgs),
    /// Elliptic focusing data: resonance and f₁ checks.
    Focusing(FocusingArgs),
    /// Nonelliptic focusing data.
    Nonelliptic(NonellipticArgs),
    /// Wave-packet frame, round trip, far field and tube drift.
    Packets(PacketArgs),
    /// Scaling sweeps with a power-law fit.
    Sweep(SweepArgs),
    /// Maximal ratios over short time intervals.
    Interval(IntervalArgs),
}

#[derive(Args, Serialize)]
struct ThresholdArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

#[derive(Args, Serialize)]
struct SeqArgs {
    /// `block` or `power`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    first_scale: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    block_count: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    count: Option<usize>,
}

#[derive(Args, Serialize)]
struct FocusingArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    scale: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    lattice_scale: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    freq_cutoff: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    f1_samples: Option<usize>,
}

#[derive(Args, Serialize)]
struct NonellipticArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[arg(long = "M")]
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
}

#[derive(Args, Serialize)]
struct PacketArgs {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    period: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    fields: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    far_multiplier: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// `focusing` or `nonelliptic`.
    #[arg(long)]
    family: Option<String>,
    /// Sobolev exponent for the ratio denominator.
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Serialize)]
struct IntervalArgs {
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    length_exponents: Option<Vec<f64>>,
}

fn object(v: impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(v) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

fn sweep_flags(args: &SweepArgs, config_text: Option<&str>) -> Map<String, Value> {
    let mut m = Map::new();
    if let Some(f) = &args.family {
        m.insert("family".into(), Value::from(f.clone()));
    }
    if let Some(t) = args.tolerance {
        m.insert("tolerance".into(), Value::from(t));
    }
    if let Some(s) = args.s {
        // `--s` applies to whichever family ends up selected.
        let family = args
            .family
            .clone()
            .or_else(|| {
                config_text
                    .and_then(|t| serde_json::from_str::<Value>(t).ok())
                    .and_then(|v| v.get("family").and_then(|f| f.as_str()).map(str::to_string))
            })
            .unwrap_or_else(|| "focusing".into());
        let mut inner = Map::new();
        inner.insert("s".into(), Value::from(s));
        m.insert(family, Value::Object(inner));
    }
    m
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config_text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => Some(t),
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => None,
    };
    let (kind, flags) = match &cli.command {
        Command::Thresholds(a) => (CommandKind::Thresholds, object(a)),
        Command::Seq(a) => (CommandKind::Seq, object(a)),
        Command::Focusing(a) => (CommandKind::Focusing, object(a)),
        Command::Nonelliptic(a) => (CommandKind::Nonelliptic, object(a)),
        Command::Packets(a) => (CommandKind::Packets, object(a)),
        Command::Sweep(a) => (CommandKind::Sweep, sweep_flags(a, config_text.as_deref())),
        Command::Interval(a) => (CommandKind::Interval, object(a)),
    };
    let resolved = match resolve(kind, config_text.as_deref(), flags, cli.seed, cli.jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: invalid configuration: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = match run(&resolved) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_outputs(&cli.out, &resolved, &outcome) {
        eprintln!("error: writing outputs: {e}");
        return ExitCode::from(3);
    }
    println!(
        "{}: {} ({})",
        kind.name(),
        if outcome.pass { "pass" } else { "fail" },
        cli.out.display()
    );
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
