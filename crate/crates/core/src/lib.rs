//! Numerical laboratory for pointwise convergence of Schrödinger-type means
//! along decreasing time sequences.
//!
//! The crate is organised by role:
//!
//! * [`spectral`]: band-limited fields as frequency atoms, evolutions, norms.
//! * [`sequence`]: weak-`ℓ^r` time sequences and their certificates.
//! * [`counterexamples`]: focusing data (elliptic and nonelliptic) and the
//!   checks of their quantitative claims.
//! * [`packets`]: wave-packet frames at scales `(k, j)`.
//! * [`maximal`]: maximal profiles, regularity thresholds, scaling sweeps.
//! * [`harness`]: configuration and experiment drivers behind the CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counterexamples;
pub mod error;
pub mod harness;
pub mod maximal;
pub mod packets;
pub mod sequence;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::{FrequencyAtom, SpatialGrid, SpectralField, SymbolKind};
