//! Uniformity diagnostics: order-statistic marginals, exact marginal CDFs
//! and centroids, histograms with KL divergence, distributional symmetry
//! checks, and a timing harness.

mod bench;
mod centroid;
mod histogram;
mod marginal;
mod orderstat;
mod symmetry;

pub use bench::{bench, BenchRow};
pub use centroid::{empirical_centroid, exact_centroid, exact_centroid_rational, CentroidReport};
pub use histogram::{
    histogram, histogram_from_cdf, histogram_of_values, kl_divergence, kl_divergence_with,
    Histogram, DEFAULT_KL_EPSILON,
};
pub use marginal::{exact_marginal_cdf, exact_marginal_mean};
pub use orderstat::{order_stat_cdf, regularized_incomplete_beta};
pub use symmetry::{
    ks_distance_sorted, symmetry_report, ClassSymmetry, ConjugacySymmetry, SymmetryReport,
};

use thiserror::Error;

use crate::capacity::CapacityViolation;
use crate::generators::GeneratorError;
use crate::subset::LatticeError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("argument {name} = {value} outside domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("histograms have different bin layouts ({left} vs {right} bins)")]
    BinLayoutMismatch { left: usize, right: usize },
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },
    #[error("sample list is empty")]
    EmptySamples,
    #[error("samples mix ground sets ({left} vs {right})")]
    MixedGroundSets { left: u8, right: u8 },
    #[error("histogram needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("series failed to converge")]
    NoConvergence,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Capacity(#[from] CapacityViolation),
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}
