//! Timing harness for the capacity generators.

use std::time::{Duration, Instant};

use crate::generators::{CapacityGenerator, GeneratorError, Method};
use crate::rng::sample_rng;

use super::EvalError;

/// Wall-clock result of generating `count` capacities with one method.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n: u8,
    pub count: usize,
    pub elapsed: Duration,
    pub per_sample: Duration,
}

impl BenchRow {
    pub fn per_sample_micros(&self) -> f64 {
        self.per_sample.as_secs_f64() * 1e6
    }
}

/// Times each method generating `count` capacities. Generation runs
/// single-threaded and method after method so the rows do not interfere;
/// the same per-sample streams are used for every method.
pub fn bench(
    methods: &[Method],
    n: u8,
    count: usize,
    seed: u64,
    markov_steps: Option<u64>,
) -> Result<Vec<BenchRow>, EvalError> {
    if count == 0 {
        return Err(GeneratorError::EmptyBatch.into());
    }
    if methods.is_empty() {
        return Err(GeneratorError::UnknownMethod("<none>".into()).into());
    }
    let mut rows = Vec::with_capacity(methods.len());
    for &method in methods {
        let generator = CapacityGenerator::new(method, n, markov_steps)?;
        let start = Instant::now();
        for i in 0..count {
            let mut rng = sample_rng(seed, i as u64);
            let capacity: crate::Capacity64 = generator.generate(&mut rng);
            std::hint::black_box(&capacity);
        }
        let elapsed = start.elapsed();
        rows.push(BenchRow {
            method,
            n,
            count,
            elapsed,
            per_sample: elapsed / count as u32,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_count_is_rejected() {
        assert!(bench(&[Method::TwoLayer], 3, 0, 1, None).is_err());
    }

    #[test]
    fn single_sample_row() {
        let rows = bench(&[Method::TwoLayer, Method::RandomNode], 3, 1, 1, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].count, 1);
        assert!(rows[0].elapsed >= rows[0].per_sample);
    }
}
