//! Centroid of the capacity polytope, exact and estimated.
//!
//! The polytope triangulates into one simplex per linear extension, each
//! with volume `1/p!`; the centroid is the average of the simplex
//! barycenters, whose coordinate at rank `k` is `k/(p + 1)`. The exact
//! centroid coordinate of a node is therefore its mean rank (over all
//! extensions) divided by `p + 1`, available in exact rational arithmetic
//! from the rank-frequency table.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::capacity::Capacity;
use crate::exact::RankTable;
use crate::scalar::Real;
use crate::subset::{full_mask, proper_node_count, SubsetId};

use super::EvalError;

/// Centroid coordinates (one per subset mask, boundary entries 0 and 1)
/// plus, for estimates, the total squared error against a reference.
#[derive(Debug, Clone, PartialEq)]
pub struct CentroidReport<T> {
    n: u8,
    coordinates: Vec<T>,
    squared_error: Option<T>,
    sample_count: Option<usize>,
}

impl<T: Real> CentroidReport<T> {
    pub fn n(&self) -> u8 {
        self.n
    }

    /// Coordinates indexed by subset mask.
    pub fn coordinates(&self) -> &[T] {
        &self.coordinates
    }

    pub fn coordinate(&self, s: SubsetId) -> T {
        self.coordinates[s.mask() as usize]
    }

    /// Total squared error against the reference (estimates only).
    pub fn squared_error(&self) -> Option<T> {
        self.squared_error
    }

    pub fn sample_count(&self) -> Option<usize> {
        self.sample_count
    }
}

/// Exact centroid in rational arithmetic: coordinate of node `S` is
/// `Σ_k N(S, k) · k / (e · (p + 1))`.
pub fn exact_centroid_rational(table: &RankTable) -> Vec<BigRational> {
    let n = table.n();
    let p = proper_node_count(n);
    let full = full_mask(n);
    let e = table.extension_count();
    let denom = BigUint::from(p as u64 + 1) * e;
    (0..=u32::from(full))
        .map(|mask| {
            let mask = mask as u16;
            if mask == 0 {
                BigRational::zero()
            } else if mask == full {
                BigRational::from_integer(1.into())
            } else {
                let node = SubsetId::new(n, mask).expect("in range");
                let freq = table.rank_frequencies(node).expect("proper node");
                let weighted: BigUint = freq
                    .iter()
                    .enumerate()
                    .map(|(idx, c)| c * BigUint::from(idx as u64 + 1))
                    .sum();
                BigRational::new(weighted.into(), denom.clone().into())
            }
        })
        .collect()
}

/// Exact centroid as floating-point coordinates.
pub fn exact_centroid<T: Real>(table: &RankTable) -> CentroidReport<T> {
    let coordinates = exact_centroid_rational(table)
        .into_iter()
        .map(|r| T::from_f64_lossy(r.to_f64().expect("coordinate in [0,1]")))
        .collect();
    CentroidReport {
        n: table.n(),
        coordinates,
        squared_error: None,
        sample_count: None,
    }
}

/// Coordinate-wise mean of the samples; when a reference is given, reports
/// the total squared error over the nonboundary coordinates.
pub fn empirical_centroid<T: Real>(
    samples: &[Capacity<T>],
    reference: Option<&CentroidReport<T>>,
) -> Result<CentroidReport<T>, EvalError> {
    let first = samples.first().ok_or(EvalError::EmptySamples)?;
    let n = first.n();
    for c in samples {
        if c.n() != n {
            return Err(EvalError::MixedGroundSets {
                left: n,
                right: c.n(),
            });
        }
    }
    let size = 1usize << n;
    let mut coordinates = vec![T::zero(); size];
    for c in samples {
        for (acc, v) in coordinates.iter_mut().zip(c.values()) {
            *acc += *v;
        }
    }
    let count = T::from_usize(samples.len()).expect("fits");
    for acc in coordinates.iter_mut() {
        *acc /= count;
    }
    let squared_error = reference.map(|r| {
        let full = full_mask(n);
        (1..full)
            .map(|mask| {
                let d = coordinates[mask as usize] - r.coordinates()[mask as usize];
                d * d
            })
            .sum()
    });
    Ok(CentroidReport {
        n,
        coordinates,
        squared_error,
        sample_count: Some(samples.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn s(n: u8, elements: &[u8]) -> SubsetId {
        SubsetId::from_elements(n, elements).unwrap()
    }

    #[test]
    fn centroid_n2_is_half_half() {
        let table = RankTable::new(2).unwrap();
        let c: CentroidReport<f64> = exact_centroid(&table);
        assert!((c.coordinate(s(2, &[1])) - 0.5).abs() < 1e-15);
        assert!((c.coordinate(s(2, &[2])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn centroid_n3_matches_reported_values() {
        let table = RankTable::new(3).unwrap();
        let c: CentroidReport<f64> = exact_centroid(&table);
        for single in [s(3, &[1]), s(3, &[2]), s(3, &[3])] {
            assert!((c.coordinate(single) - 0.298).abs() < 5e-4);
        }
        for pair in [s(3, &[1, 2]), s(3, &[1, 3]), s(3, &[2, 3])] {
            assert!((c.coordinate(pair) - 0.702).abs() < 5e-4);
        }
    }

    #[test]
    fn centroid_n4_matches_reported_values() {
        let table = RankTable::new(4).unwrap();
        let c: CentroidReport<f64> = exact_centroid(&table);
        assert!((c.coordinate(s(4, &[2])) - 0.1810).abs() < 5e-5);
        assert!((c.coordinate(s(4, &[1, 4])) - 0.5000).abs() < 5e-5);
        assert!((c.coordinate(s(4, &[1, 3, 4])) - 0.8190).abs() < 5e-5);
    }

    #[test]
    fn rational_centroid_symmetries_exact() {
        for n in 2..=4u8 {
            let table = RankTable::new(n).unwrap();
            let c = exact_centroid_rational(&table);
            let full = full_mask(n);
            for mask in 1..full {
                // Depends only on cardinality.
                let witness = (1u16 << mask.count_ones()) - 1;
                assert_eq!(c[mask as usize], c[witness as usize]);
                // c(N∖S) = 1 − c(S), exactly.
                let comp = full & !mask;
                assert_eq!(
                    &c[mask as usize] + &c[comp as usize],
                    BigRational::one(),
                    "n={n} mask={mask}"
                );
            }
        }
    }

    #[test]
    fn centroid_matches_marginal_means() {
        let table = RankTable::new(4).unwrap();
        let c: CentroidReport<f64> = exact_centroid(&table);
        for mask in 1..full_mask(4) {
            let node = SubsetId::new(4, mask).unwrap();
            let mean: f64 = super::super::exact_marginal_mean(&table, node).unwrap();
            assert!((c.coordinate(node) - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_centroid_of_reference_is_zero_error() {
        let table = RankTable::new(3).unwrap();
        let exact: CentroidReport<f64> = exact_centroid(&table);
        let as_capacity =
            Capacity::from_values_unchecked(3, exact.coordinates().to_vec());
        let report = empirical_centroid(&[as_capacity], Some(&exact)).unwrap();
        assert_eq!(report.squared_error(), Some(0.0));
        assert_eq!(report.sample_count(), Some(1));
    }

    #[test]
    fn empirical_centroid_rejects_bad_input() {
        assert!(matches!(
            empirical_centroid::<f64>(&[], None),
            Err(EvalError::EmptySamples)
        ));
        let a = Capacity::<f64>::uniform_additive(3);
        let b = Capacity::<f64>::uniform_additive(4);
        assert!(matches!(
            empirical_centroid(&[a, b], None),
            Err(EvalError::MixedGroundSets { .. })
        ));
    }
}
