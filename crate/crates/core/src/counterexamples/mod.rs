//! Explicit focusing data showing that the regularity thresholds are sharp.

pub mod focusing;
pub mod nonelliptic;
pub mod theta;

pub use focusing::{
    build_focusing, focusing_time_sequence, predicted_focusing_bounds, resonance_at_time, verify_f1_focusing,
    verify_resonance, F1Report, FocusingBounds, FocusingDatum, FocusingOverrides, FocusingSpec, ResonanceReport,
    GOLDEN_SLOPE,
};
pub use nonelliptic::{
    build_nonelliptic, build_nonelliptic_with, nonelliptic_ratio, nonelliptic_ratio_on, sample_nonelliptic,
    verify_nonelliptic, BoxQuadrature, NonellipticDatum, NonellipticReport, NonellipticSample, NonellipticSpec,
};
pub use theta::{covering_radius, theta_candidates, theta_search, ThetaSearch, ThetaSearchResult};
