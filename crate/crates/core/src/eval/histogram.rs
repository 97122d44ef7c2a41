//! Equal-width histograms on `[0, 1]` and Kullback-Leibler divergence
//! between them.

use crate::capacity::Capacity;
use crate::scalar::{kahan_sum, Real};
use crate::subset::SubsetId;

use super::EvalError;

/// Smoothing mass added per bin before a KL evaluation, then renormalized:
/// keeps empty bins from producing infinities while perturbing well-filled
/// histograms by far less than sampling noise.
pub const DEFAULT_KL_EPSILON: f64 = 1e-10;

/// Normalized equal-width histogram over `[0, 1]`.
///
/// Bin `j` covers `[j/bins, (j+1)/bins)`, except the last bin which also
/// includes 1; a value equal to a bin edge lands in the upper bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram<T> {
    mass: Vec<T>,
    sample_count: usize,
}

impl<T: Real> Histogram<T> {
    pub fn bins(&self) -> usize {
        self.mass.len()
    }

    /// Normalized bin masses (sum 1 within 1e-12).
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// Number of samples binned, or 0 for analytic histograms.
    pub fn sample_count(&self) -> usize {
        self.sample_count
    }

    /// Bin edges `0, 1/bins, …, 1`.
    pub fn edges(&self) -> impl Iterator<Item = T> + '_ {
        let bins = T::from_usize(self.bins()).expect("bins fit scalar");
        (0..=self.bins()).map(move |j| T::from_usize(j).expect("fits") / bins)
    }
}

/// Bins the values of `μ(S)` across the samples.
pub fn histogram<T: Real>(
    samples: &[Capacity<T>],
    s: SubsetId,
    bins: usize,
) -> Result<Histogram<T>, EvalError> {
    let values = samples
        .iter()
        .map(|c| c.value(s))
        .collect::<Result<Vec<T>, _>>()?;
    histogram_of_values(values, bins)
}

/// Bins raw values from `[0, 1]`.
pub fn histogram_of_values<T: Real>(
    values: Vec<T>,
    bins: usize,
) -> Result<Histogram<T>, EvalError> {
    if bins < 2 {
        return Err(EvalError::TooFewBins(bins));
    }
    if values.is_empty() {
        return Err(EvalError::EmptySamples);
    }
    let mut counts = vec![0usize; bins];
    let scale = T::from_usize(bins).expect("bins fit scalar");
    for v in &values {
        let idx = (*v * scale)
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(bins - 1);
        counts[idx] += 1;
    }
    let total = T::from_usize(values.len()).expect("fits");
    let mass = counts
        .iter()
        .map(|&c| T::from_usize(c).expect("fits") / total)
        .collect();
    Ok(Histogram {
        mass,
        sample_count: values.len(),
    })
}

/// Analytic histogram with bin masses `F(edge_{j+1}) − F(edge_j)` for a CDF.
pub fn histogram_from_cdf<T: Real>(
    bins: usize,
    mut cdf: impl FnMut(T) -> Result<T, EvalError>,
) -> Result<Histogram<T>, EvalError> {
    if bins < 2 {
        return Err(EvalError::TooFewBins(bins));
    }
    let scale = T::from_usize(bins).expect("fits");
    let mut mass = Vec::with_capacity(bins);
    let mut prev = cdf(T::zero())?;
    for j in 1..=bins {
        let edge = T::from_usize(j).expect("fits") / scale;
        let cur = cdf(edge)?;
        mass.push((cur - prev).max(T::zero()));
        prev = cur;
    }
    let total = kahan_sum(mass.iter().copied());
    for m in mass.iter_mut() {
        *m /= total;
    }
    Ok(Histogram {
        mass,
        sample_count: 0,
    })
}

/// `D_KL(p ‖ q) = Σ p ln(p/q)` in nats with the default smoothing.
pub fn kl_divergence<T: Real>(p: &Histogram<T>, q: &Histogram<T>) -> Result<T, EvalError> {
    kl_divergence_with(p, q, T::from_f64_lossy(DEFAULT_KL_EPSILON))
}

/// KL divergence with explicit additive smoothing: `epsilon` mass is added
/// to every bin of both histograms, each is renormalized, then the sum is
/// taken with natural logarithms. Zero iff the smoothed histograms agree.
pub fn kl_divergence_with<T: Real>(
    p: &Histogram<T>,
    q: &Histogram<T>,
    epsilon: T,
) -> Result<T, EvalError> {
    if p.bins() != q.bins() {
        return Err(EvalError::BinLayoutMismatch {
            left: p.bins(),
            right: q.bins(),
        });
    }
    let bins = T::from_usize(p.bins()).expect("fits");
    let norm = T::one() + bins * epsilon;
    let mut sum = T::zero();
    for (&pm, &qm) in p.mass().iter().zip(q.mass()) {
        let ps = (pm + epsilon) / norm;
        let qs = (qm + epsilon) / norm;
        sum += ps * (ps / qs).ln();
    }
    Ok(sum.max(T::zero()))
}
