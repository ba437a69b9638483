//! Negative type of finite semi-metric spaces.
//!
//! A space has q-negative type when `sum d(x_i, x_j)^q eta_i eta_j <= 0` for
//! every load vector `eta` summing to zero, and strict q-negative type when the
//! inequality is strict for nonzero `eta`. This crate decides both spectrally,
//! finds the supremal exponent, computes the normalized negative type gap by
//! exhaustive bipartition search and evaluates the closed-form bounds that
//! follow from the gap.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod checker;
pub mod error;
pub mod extended;
pub mod gap;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod qp;
pub mod space;
pub mod tolerance;
pub mod verify;

pub use bounds::{gamma_fn, star_exact_type, tree_type_lower_bound, zeta_bound, ZetaReport};
pub use checker::{
    check, interval_scan, supremal_negative_type, witness_null_simplex, NegTypeVerdict,
    NullWitness, ScanPoint, Status, SupremalResult,
};
pub use error::{Error, Result};
pub use extended::ExtendedReal;
pub use gap::{
    brute_force_gap, gap_from_eta, negative_type_gap, simplex_gap, tree_gap, GapResult,
    LoadedSimplex, OracleResult,
};
pub use generators::{
    gen_circle, gen_discrete, gen_enflo_truncation, gen_path, gen_random_semimetric, gen_star,
    gen_tree, WeightedTree,
};
pub use space::FiniteSemiMetricSpace;
pub use tolerance::ToleranceConfig;
