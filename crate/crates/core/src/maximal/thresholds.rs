//! Closed-form regularity thresholds `s₀` for the maximal estimates.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Family {
    Schrodinger,
    Fractional { a: f64 },
    Nonelliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdQuery {
    pub family: Family,
    pub dimension: usize,
    /// `None` is the continuous case `t → 0` (`r = ∞`).
    pub r: Option<f64>,
}

/// `s₀` together with whether the endpoint itself is included (`s ≥ s₀`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub s0: f64,
    pub inclusive: bool,
}

fn lorentz_arm(r: f64, n: f64) -> f64 {
    r / ((n + 1.0) / n * r + 1.0)
}

pub fn threshold(q: &ThresholdQuery) -> Result<Threshold> {
    if q.dimension == 0 {
        return Err(invalid("dimension", "must be positive"));
    }
    if let Some(r) = q.r {
        if !(r > 0.0) || r.is_nan() {
            return Err(invalid("r", "must be positive"));
        }
    }
    let n = q.dimension as f64;
    // r = ∞ makes every sequence arm drop out of the minimum.
    let arm =
        |scale: f64, f: &dyn Fn(f64) -> f64| q.r.filter(|r| r.is_finite()).map_or(f64::INFINITY, |r| scale * f(r));
    let (s0, inclusive) = match q.family {
        Family::Schrodinger => {
            let cont = n / (2.0 * (n + 1.0));
            (cont.min(arm(1.0, &|r| lorentz_arm(r, n))), q.dimension == 1)
        }
        Family::Fractional { a } => {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid("a", "must be finite and positive"));
            }
            if a > 1.0 {
                let cont = n / (2.0 * (n + 1.0));
                (cont.min(arm(a / 2.0, &|r| lorentz_arm(r, n))), q.dimension == 1)
            } else if a < 1.0 && q.dimension == 1 {
                ((a / 4.0).min(arm(a / 2.0, &|r| lorentz_arm(r, 1.0))), false)
            } else if a < 1.0 {
                return Err(Error::Unsupported(
                    "fractional order below 1 in dimension ≥ 2: the sharp threshold is open".into(),
                ));
            } else {
                return Err(Error::Unsupported("fractional order a = 1 is not covered".into()));
            }
        }
        Family::Nonelliptic => {
            if q.dimension < 2 {
                return Err(Error::Unsupported("nonelliptic symbols need dimension ≥ 2".into()));
            }
            (0.5f64.min(arm(1.0, &|r| r / (r + 1.0))), q.dimension == 2)
        }
    };
    Ok(Threshold { s0, inclusive })
}

pub fn threshold_s0(q: &ThresholdQuery) -> Result<f64> {
    threshold(q).map(|t| t.s0)
}

/// `r(s) = s / (1 − s)`, the sequence class matching regularity `s` for the
/// nonelliptic evolution.
pub fn nonelliptic_critical_r(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 0.5) {
        return Err(invalid("s", format!("must lie in (0, 1/2), got {s}")));
    }
    Ok(s / (1.0 - s))
}

/// One row of the summary table of sharp thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub operator: &'static str,
    pub dimensions: &'static str,
    pub continuous: &'static str,
    pub discrete: &'static str,
    /// A representative query for each column (`None` when the entry is open).
    #[serde(skip)]
    pub family: Option<Family>,
    #[serde(skip)]
    pub min_dimension: usize,
}

pub fn threshold_table() -> Vec<TableRow> {
    let row = |operator, dimensions, continuous, discrete, family, min_dimension| TableRow {
        operator,
        dimensions,
        continuous,
        discrete,
        family,
        min_dimension,
    };
    vec![
        row(
            "schrodinger",
            "N=1",
            "s>=1/4",
            "s>=min{1/4, r/(2r+1)}",
            Some(Family::Schrodinger),
            1,
        ),
        row(
            "schrodinger",
            "N>=2",
            "s>N/(2(N+1))",
            "s>min{N/(2(N+1)), r/((N+1)r/N+1)}",
            Some(Family::Schrodinger),
            2,
        ),
        row(
            "nonelliptic",
            "N=2",
            "s>=1/2",
            "s>=min{1/2, r/(r+1)}",
            Some(Family::Nonelliptic),
            2,
        ),
        row(
            "nonelliptic",
            "N>=3",
            "s>1/2",
            "s>min{1/2, r/(r+1)}",
            Some(Family::Nonelliptic),
            3,
        ),
        row(
            "fractional a>1",
            "N=1",
            "s>=1/4",
            "s>=min{1/4, (a/2)r/(2r+1)}",
            Some(Family::Fractional { a: 3.0 }),
            1,
        ),
        row(
            "fractional a>1",
            "N>=2",
            "s>N/(2(N+1))",
            "s>min{N/(2(N+1)), (a/2)r/((N+1)r/N+1)}",
            Some(Family::Fractional { a: 3.0 }),
            2,
        ),
        row(
            "fractional 0<a<1",
            "N=1",
            "s>a/4",
            "s>min{a/4, (a/2)r/(2r+1)}",
            Some(Family::Fractional { a: 0.5 }),
            1,
        ),
        row("fractional 0<a<1", "N>=2", "open", "open", None, 2),
    ]
}
