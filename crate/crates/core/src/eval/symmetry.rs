//! Distributional symmetry checks.
//!
//! Under the uniform distribution on capacities, `μ(S)` depends on `S` only
//! through its cardinality, and `μ(S)` is distributed as `1 − μ(N∖S)`. Both
//! properties are checkable on any sample set without an exact reference,
//! which is the only diagnostic available once exact tables are out of
//! reach.

use crate::capacity::Capacity;
use crate::scalar::Real;
use crate::subset::{full_mask, SubsetId};

use super::EvalError;

/// Minimum sample count for a meaningful report.
pub const MIN_SYMMETRY_SAMPLES: usize = 1000;

/// Worst pairwise Kolmogorov-Smirnov distance within one cardinality class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSymmetry<T> {
    pub cardinality: u32,
    pub max_ks: T,
    /// Pair realizing the maximum (absent for singleton classes).
    pub witness: Option<(SubsetId, SubsetId)>,
    pub pass: bool,
}

/// KS distance between `μ(S)` and `1 − μ(N∖S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacySymmetry<T> {
    pub subset: SubsetId,
    pub ks: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryReport<T> {
    pub n: u8,
    pub sample_count: usize,
    pub threshold: T,
    pub classes: Vec<ClassSymmetry<T>>,
    pub conjugacy: Vec<ConjugacySymmetry<T>>,
    pub pass: bool,
}

/// Two-sample KS distance of two ascending-sorted value slices. Tied values
/// advance both empirical CDFs together.
pub fn ks_distance_sorted<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert!(!a.is_empty() && !b.is_empty());
    let (mut i, mut j) = (0usize, 0usize);
    let na = T::from_usize(a.len()).expect("fits");
    let nb = T::from_usize(b.len()).expect("fits");
    let mut max = T::zero();
    while i < a.len() && j < b.len() {
        let v = if a[i] < b[j] { a[i] } else { b[j] };
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        let fa = T::from_usize(i).expect("fits") / na;
        let fb = T::from_usize(j).expect("fits") / nb;
        let d = (fa - fb).abs();
        if d > max {
            max = d;
        }
    }
    max
}

/// Builds the symmetry report: per cardinality class the worst pairwise KS
/// distance among the class marginals, and per subset the KS distance of
/// `μ(S)` against `1 − μ(N∖S)`, each compared to `threshold`.
pub fn symmetry_report<T: Real>(
    samples: &[Capacity<T>],
    threshold: T,
) -> Result<SymmetryReport<T>, EvalError> {
    if samples.len() < MIN_SYMMETRY_SAMPLES {
        return Err(EvalError::InsufficientSamples {
            needed: MIN_SYMMETRY_SAMPLES,
            got: samples.len(),
        });
    }
    let n = samples[0].n();
    for c in samples {
        if c.n() != n {
            return Err(EvalError::MixedGroundSets {
                left: n,
                right: c.n(),
            });
        }
    }
    let full = full_mask(n);

    // Sorted marginal per node, and sorted reflected marginal of its
    // complement.
    let mut sorted: Vec<Vec<T>> = vec![Vec::new(); usize::from(full) + 1];
    for mask in 1..full {
        let mut vals: Vec<T> = samples
            .iter()
            .map(|c| c.value_of_mask(mask))
            .collect();
        vals.sort_by(|a, b| a.partial_cmp(b).expect("capacity values are ordered"));
        sorted[mask as usize] = vals;
    }

    let mut classes = Vec::new();
    for cardinality in 1..u32::from(n) {
        let members: Vec<u16> = crate::subset::masks_of_cardinality(n, cardinality).collect();
        let mut max_ks = T::zero();
        let mut witness = None;
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                let d = ks_distance_sorted(&sorted[a as usize], &sorted[b as usize]);
                if d > max_ks {
                    max_ks = d;
                    witness = Some((
                        SubsetId::new(n, a).expect("in range"),
                        SubsetId::new(n, b).expect("in range"),
                    ));
                }
            }
        }
        classes.push(ClassSymmetry {
            cardinality,
            max_ks,
            witness,
            pass: max_ks <= threshold,
        });
    }

    let mut conjugacy = Vec::new();
    for mask in 1..full {
        let comp = full & !mask;
        // 1 − μ(N∖S), sorted ascending = reversed complement of the sorted
        // complement values.
        let reflected: Vec<T> = sorted[comp as usize]
            .iter()
            .rev()
            .map(|&v| T::one() - v)
            .collect();
        let ks = ks_distance_sorted(&sorted[mask as usize], &reflected);
        conjugacy.push(ConjugacySymmetry {
            subset: SubsetId::new(n, mask).expect("in range"),
            ks,
            pass: ks <= threshold,
        });
    }

    let pass = classes.iter().all(|c| c.pass) && conjugacy.iter().all(|c| c.pass);
    Ok(SymmetryReport {
        n,
        sample_count: samples.len(),
        threshold,
        classes,
        conjugacy,
        pass,
    })
}
