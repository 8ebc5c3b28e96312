//! Maximal functions over time sets, ball norms, regularity thresholds and
//! scaling sweeps.

pub mod experiments;
pub mod fit;
pub mod profile;
pub mod thresholds;

pub use experiments::{
    focusing_ball_l2, interval_ratio, interval_sup_experiment, nonelliptic_sweep, random_bump_field, run_r_sweep,
    short_time_maximal_experiment, BumpField, BumpProfile, FocusingSweep, IntervalConfig, IntervalReport,
    NonellipticSweep, ShortTimeReport, ShortTimeRow, SweepResult, SweepRow,
};
pub use fit::{fit_power_law, PowerFit};
pub use profile::{ball_l2, maximal_profile, required_step, MaximalProfile, TimeSet};
pub use thresholds::{
    nonelliptic_critical_r, threshold, threshold_s0, threshold_table, Family, TableRow, Threshold, ThresholdQuery,
};
