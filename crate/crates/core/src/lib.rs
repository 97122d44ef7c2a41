//! Uniform random generation of capacities (monotone set functions) on a
//! finite ground set, together with exact references and uniformity
//! diagnostics.
//!
//! A capacity on `N = {1, …, n}` is a set function `μ: 2^N → [0, 1]` with
//! `μ(∅) = 0`, `μ(N) = 1`, monotone under inclusion. The set of capacities
//! is the order polytope of the Boolean lattice minus its bounds, so uniform
//! generation reduces to uniform generation of linear extensions of
//! `2^N ∖ {∅, N}` followed by assigning sorted uniform draws along the
//! extension.
//!
//! The crate provides:
//!
//! - [`poset`], [`subset`]: bitmask subset arithmetic, the layered poset
//!   state, linear extensions and their validation;
//! - [`exact`]: exact extension counting and exact uniform sampling via
//!   dynamic programming over order ideals, plus exact rank-frequency
//!   tables;
//! - [`twolayer`]: the fast approximate sampler driven by the two top /
//!   two bottom layers of the remaining poset;
//! - [`reference`]: baseline generators (adjacent-transposition Markov
//!   chain, random-node generator);
//! - [`capacity`]: the capacity type and the extension → capacity map;
//! - [`eval`]: order-statistic marginals, histograms, KL divergence,
//!   centroids, symmetry checks and timing harness;
//! - [`structure`]: structural analysis of two-layer posets (profiles,
//!   regularity, closure classification).
//!
//! Floating-point code is generic over the [`scalar::Real`] scalar
//! (`f32`/`f64`); exact quantities use big integers and big rationals.

pub mod capacity;
pub mod eval;
pub mod exact;
pub mod generators;
pub mod poset;
pub mod reference;
pub mod rng;
pub mod scalar;
pub mod structure;
pub mod subset;
pub mod twolayer;

pub use capacity::{Capacity, CapacityViolation};
pub use poset::{ExtensionViolation, LinearExtension, PosetState};
pub use scalar::Real;
pub use subset::{LatticeError, SubsetId, MAX_GROUND_SET};

/// Capacity with `f64` coordinates (the default precision).
pub type Capacity64 = Capacity<f64>;
/// Capacity with `f32` coordinates.
pub type Capacity32 = Capacity<f32>;
/// Histogram over `f64` masses.
pub type Histogram64 = eval::Histogram<f64>;
/// Centroid report over `f64` coordinates.
pub type CentroidReport64 = eval::CentroidReport<f64>;

/// Default master seed used by the command-line tools; fixed (not
/// time-based) so runs are reproducible by default.
pub const DEFAULT_SEED: u64 = 42;
