//! Exact marginal distribution of a single coordinate `μ(S)` under the
//! uniform distribution on capacities.
//!
//! Conditional on the extension placing `S` at rank `k`, the coordinate is
//! the k-th order statistic of `2^n − 2` uniforms, so the exact CDF is the
//! rank-frequency mixture `F(α) = (1/e) Σ_k N(S, k) · OS_k(α)`.

use num_traits::ToPrimitive;

use crate::exact::RankTable;
use crate::scalar::Real;
use crate::subset::{proper_node_count, SubsetId};

use super::orderstat::order_stat_cdf;
use super::EvalError;

/// Exact CDF of `μ(S)` at `alpha`.
pub fn exact_marginal_cdf<T: Real>(
    table: &RankTable,
    s: SubsetId,
    alpha: T,
) -> Result<T, EvalError> {
    if alpha < T::zero() || alpha > T::one() {
        return Err(EvalError::Domain {
            name: "alpha",
            value: alpha.to_f64().unwrap_or(f64::NAN),
            domain: "[0, 1]",
        });
    }
    let m = proper_node_count(table.n());
    let freq = table.rank_frequencies(s)?;
    let e = table
        .extension_count()
        .to_f64()
        .expect("extension count fits f64 range");
    let mut acc = T::zero();
    for (idx, count) in freq.iter().enumerate() {
        if count.to_u64() == Some(0) {
            continue;
        }
        let weight = T::from_f64_lossy(count.to_f64().expect("count fits f64 range") / e);
        acc += weight * order_stat_cdf(idx + 1, m, alpha)?;
    }
    Ok(acc.min(T::one()).max(T::zero()))
}

/// Exact mean of `μ(S)`: the k-th order statistic of `m` uniforms has mean
/// `k/(m+1)`, so the mean is the rank mixture of those values.
pub fn exact_marginal_mean<T: Real>(table: &RankTable, s: SubsetId) -> Result<T, EvalError> {
    let m = proper_node_count(table.n());
    let freq = table.rank_frequencies(s)?;
    let e = table
        .extension_count()
        .to_f64()
        .expect("extension count fits f64 range");
    let denom = T::from_usize(m + 1).expect("fits");
    let mut acc = T::zero();
    for (idx, count) in freq.iter().enumerate() {
        let weight = T::from_f64_lossy(count.to_f64().expect("fits") / e);
        acc += weight * T::from_usize(idx + 1).expect("fits") / denom;
    }
    Ok(acc)
}
