//! Capacities (normalized monotone set functions) and the map from linear
//! extensions to uniformly distributed capacities.

use rand::Rng;
use thiserror::Error;

use crate::poset::LinearExtension;
use crate::scalar::Real;
use crate::subset::{full_mask, LatticeError, SubsetId};

/// First violation found when checking a capacity.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityViolation {
    #[error("value vector has {found} entries, expected {expected}")]
    WrongLength { expected: usize, found: usize },
    #[error("value at subset mask {mask:#b} is not a finite number in [0, 1]")]
    OutOfRange { mask: u16 },
    #[error("empty set must map to 0")]
    EmptySetNotZero,
    #[error("full set must map to 1")]
    FullSetNotOne,
    #[error("monotonicity violated: value at {subset} exceeds value at {superset}")]
    Monotonicity { subset: SubsetId, superset: SubsetId },
}

/// A capacity `μ: 2^N → [0, 1]` stored as one value per subset mask.
///
/// Invariants: `μ(∅) = 0`, `μ(N) = 1`, and `S ⊆ T ⇒ μ(S) ≤ μ(T)`; checking
/// every covering pair `(S, S ∪ {i})` is sufficient for the latter. Values
/// are compared exactly as stored (tolerance zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Capacity<T> {
    n: u8,
    values: Vec<T>,
}

impl<T: Real> Capacity<T> {
    /// Builds and validates a capacity from its full value vector (indexed
    /// by subset mask, `2^n` entries).
    pub fn new(n: u8, values: Vec<T>) -> Result<Self, CapacityViolation> {
        let c = Self::from_values_unchecked(n, values);
        c.validate()?;
        Ok(c)
    }

    pub fn from_values_unchecked(n: u8, values: Vec<T>) -> Self {
        Self { n, values }
    }

    /// The capacity that is 0 everywhere except at `N`.
    pub fn minimal(n: u8) -> Self {
        let mut values = vec![T::zero(); 1 << n];
        values[full_mask(n) as usize] = T::one();
        Self { n, values }
    }

    /// The capacity that is 1 everywhere except at `∅`.
    pub fn maximal(n: u8) -> Self {
        let mut values = vec![T::one(); 1 << n];
        values[0] = T::zero();
        Self { n, values }
    }

    /// The additive capacity `μ(S) = |S| / n`.
    pub fn uniform_additive(n: u8) -> Self {
        let denom = T::from_u8(n).expect("n fits scalar");
        let values = (0..1u32 << n)
            .map(|m| T::from_u32(m.count_ones()).expect("count fits") / denom)
            .collect();
        Self { n, values }
    }

    /// Uniform point of the order-polytope region selected by `ext`: draws
    /// `2^n − 2` independent uniforms, sorts them ascending and assigns them
    /// along the extension order. With an exactly uniform extension sampler
    /// the output is uniform over all capacities.
    pub fn from_extension<R: Rng + ?Sized>(ext: &LinearExtension, rng: &mut R) -> Self {
        let n = ext.n();
        let mut draws: Vec<T> = (0..ext.len())
            .map(|_| T::from_f64_lossy(rng.random::<f64>()))
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are ordered"));
        let mut values = vec![T::zero(); 1 << n];
        values[full_mask(n) as usize] = T::one();
        for (&mask, z) in ext.masks().iter().zip(draws) {
            values[mask as usize] = z;
        }
        Self { n, values }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value vector indexed by subset mask.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn value(&self, s: SubsetId) -> Result<T, LatticeError> {
        if s.n() != self.n {
            return Err(LatticeError::MaskOutOfRange {
                n: self.n,
                mask: s.mask().into(),
            });
        }
        Ok(self.values[s.mask() as usize])
    }

    pub fn value_of_mask(&self, mask: u16) -> T {
        self.values[mask as usize]
    }

    pub fn validate(&self) -> Result<(), CapacityViolation> {
        let expected = 1usize << self.n;
        if self.values.len() != expected {
            return Err(CapacityViolation::WrongLength {
                expected,
                found: self.values.len(),
            });
        }
        for (m, v) in self.values.iter().enumerate() {
            if !v.is_finite() || *v < T::zero() || *v > T::one() {
                return Err(CapacityViolation::OutOfRange { mask: m as u16 });
            }
        }
        if self.values[0] != T::zero() {
            return Err(CapacityViolation::EmptySetNotZero);
        }
        let full = full_mask(self.n);
        if self.values[full as usize] != T::one() {
            return Err(CapacityViolation::FullSetNotOne);
        }
        for mask in 0..full {
            for i in 0..self.n {
                let bit = 1u16 << i;
                if mask & bit == 0 {
                    let sup = mask | bit;
                    if self.values[mask as usize] > self.values[sup as usize] {
                        return Err(CapacityViolation::Monotonicity {
                            subset: SubsetId::new(self.n, mask).expect("in range"),
                            superset: SubsetId::new(self.n, sup).expect("in range"),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Conjugate capacity `μ̄(S) = 1 − μ(N ∖ S)`.
    ///
    /// Applying it twice recovers the original up to floating-point
    /// rounding of `1 − (1 − v)`: the round trip is exact for `v ≥ 1/2` and
    /// within one ulp elsewhere.
    pub fn conjugate(&self) -> Self {
        let full = full_mask(self.n);
        let values: Vec<T> = (0..=full)
            .map(|m| {
                if m == 0 {
                    T::zero()
                } else if m == full {
                    T::one()
                } else {
                    T::one() - self.values[(full & !m) as usize]
                }
            })
            .collect();
        Self {
            n: self.n,
            values,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(n: u8, elements: &[u8]) -> SubsetId {
        SubsetId::from_elements(n, elements).unwrap()
    }

    /// RNG that replays a fixed `f64` tape (for pinning sorted-assignment
    /// examples).
    struct Tape {
        values: Vec<f64>,
        at: usize,
    }

    impl rand::RngCore for Tape {
        fn next_u32(&mut self) -> u32 {
            unimplemented!()
        }

        fn next_u64(&mut self) -> u64 {
            // rand derives f64 from the top 53 bits of next_u64.
            let v = self.values[self.at];
            self.at += 1;
            ((v * (1u64 << 53) as f64) as u64) << 11
        }

        fn fill_bytes(&mut self, _dest: &mut [u8]) {
            unimplemented!()
        }
    }

    #[test]
    fn sort_and_assign_example() {
        let ext = LinearExtension::from_masks(2, vec![0b01, 0b10]);
        let mut tape = Tape {
            values: vec![0.7, 0.2],
            at: 0,
        };
        let c: Capacity<f64> = Capacity::from_extension(&ext, &mut tape);
        assert!((c.value(s(2, &[1])).unwrap() - 0.2).abs() < 1e-12);
        assert!((c.value(s(2, &[2])).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(c.value_of_mask(0), 0.0);
        assert_eq!(c.value_of_mask(0b11), 1.0);
    }

    #[test]
    fn sampled_capacities_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let sampler = crate::exact::ExactSampler::new(3).unwrap();
        for _ in 0..500 {
            let ext = sampler.sample(&mut rng);
            let c: Capacity<f64> = Capacity::from_extension(&ext, &mut rng);
            assert!(c.is_valid());
            // Monotone along the extension order by construction.
            let mut prev = 0.0;
            for &m in ext.masks() {
                assert!(c.value_of_mask(m) >= prev);
                prev = c.value_of_mask(m);
            }
        }
    }

    #[test]
    fn validate_examples() {
        assert!(Capacity::<f64>::minimal(3).is_valid());
        assert!(Capacity::<f64>::maximal(3).is_valid());
        assert!(Capacity::<f64>::uniform_additive(4).is_valid());

        // μ({2}) = 1.1 is flagged on the value itself.
        let bad = Capacity::from_values_unchecked(2, vec![0.0, 0.5, 1.1, 1.0]);
        assert!(matches!(
            bad.validate(),
            Err(CapacityViolation::OutOfRange { mask: 0b10 })
        ));
        let bad = Capacity::from_values_unchecked(2, vec![0.0, 0.5, 0.4, 0.45]);
        assert!(matches!(
            bad.validate(),
            Err(CapacityViolation::FullSetNotOne)
        ));
        let bad = Capacity::from_values_unchecked(2, vec![0.1, 0.5, 0.4, 1.0]);
        assert!(matches!(
            bad.validate(),
            Err(CapacityViolation::EmptySetNotZero)
        ));
        let ok = Capacity::from_values_unchecked(2, vec![0.0, 0.5, 0.4, 1.0]);
        assert!(ok.is_valid());
    }

    #[test]
    fn monotonicity_violation_is_reported() {
        let mut values = vec![0.0; 8];
        values[0b111] = 1.0;
        values[0b001] = 0.6;
        values[0b011] = 0.2;
        values[0b010] = 0.1;
        values[0b100] = 0.1;
        values[0b101] = 0.7;
        values[0b110] = 0.8;
        let c = Capacity::from_values_unchecked(3, values);
        match c.validate() {
            Err(CapacityViolation::Monotonicity { subset, superset }) => {
                assert_eq!(subset, s(3, &[1]));
                assert_eq!(superset, s(3, &[1, 2]));
            }
            other => panic!("expected monotonicity violation, got {other:?}"),
        }
    }

    #[test]
    fn conjugate_swaps_extremes() {
        let min = Capacity::<f64>::minimal(3);
        assert_eq!(min.conjugate(), Capacity::<f64>::maximal(3));
        assert_eq!(min.conjugate().conjugate(), min);
    }

    #[test]
    fn additive_capacity_is_self_conjugate() {
        let add = Capacity::<f64>::uniform_additive(4);
        let conj = add.conjugate();
        for (a, b) in add.values().iter().zip(conj.values()) {
            assert!((a - b).abs() <= f64::EPSILON);
        }
    }

    #[test]
    fn conjugation_is_involutive_within_one_ulp() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let sampler = crate::exact::ExactSampler::new(3).unwrap();
        for _ in 0..200 {
            let ext = sampler.sample(&mut rng);
            let c: Capacity<f64> = Capacity::from_extension(&ext, &mut rng);
            let back = c.conjugate().conjugate();
            assert!(back.is_valid());
            for (a, b) in c.values().iter().zip(back.values()) {
                let ulp = if *a == 0.0 { f64::MIN_POSITIVE } else { a.abs() * f64::EPSILON };
                assert!(
                    (a - b).abs() <= ulp,
                    "round trip moved {a} to {b}"
                );
            }
        }
    }
}
