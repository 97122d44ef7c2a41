//! Uniform front end over the capacity generators, plus reproducible
//! (optionally parallel) batch generation.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::capacity::Capacity;
use crate::exact::{ExactSampler, MAX_TABLE_N};
use crate::reference::{generate_markov, generate_random_node, MarkovConfig};
use crate::rng::sample_rng;
use crate::scalar::Real;
use crate::subset::MAX_GROUND_SET;
use crate::twolayer::generate_two_layer;

/// The capacity-generation methods exposed by the library and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    TwoLayer,
    Markov,
    RandomNode,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Exact,
        Method::TwoLayer,
        Method::Markov,
        Method::RandomNode,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::TwoLayer => "twolayer",
            Method::Markov => "markov",
            Method::RandomNode => "randomnode",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("unknown generator id {0:?} (expected exact|twolayer|markov|randomnode)")]
    UnknownMethod(String),
    #[error("method {method} does not support n={n}: {reason}")]
    UnsupportedGroundSet {
        method: Method,
        n: u8,
        reason: String,
    },
    #[error("count must be at least 1")]
    EmptyBatch,
}

impl FromStr for Method {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(Method::Exact),
            "twolayer" | "two-layer" | "2layer" => Ok(Method::TwoLayer),
            "markov" => Ok(Method::Markov),
            "randomnode" | "random-node" => Ok(Method::RandomNode),
            other => Err(GeneratorError::UnknownMethod(other.to_string())),
        }
    }
}

/// A ready-to-run generator: method dispatch plus any per-batch tables
/// (the exact sampler's ideal table is built once here).
pub struct CapacityGenerator {
    method: Method,
    n: u8,
    markov: MarkovConfig,
    exact: Option<ExactSampler>,
}

impl CapacityGenerator {
    /// `markov_steps = None` uses [`MarkovConfig::recommended`].
    pub fn new(method: Method, n: u8, markov_steps: Option<u64>) -> Result<Self, GeneratorError> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(GeneratorError::UnsupportedGroundSet {
                method,
                n,
                reason: format!("supported ground sets are 1..={MAX_GROUND_SET}"),
            });
        }
        let exact = match method {
            Method::Exact => Some(ExactSampler::new(n).map_err(|e| {
                GeneratorError::UnsupportedGroundSet {
                    method,
                    n,
                    reason: format!("{e} (exact sampling is limited to n ≤ {MAX_TABLE_N})"),
                }
            })?),
            _ => None,
        };
        let markov = match markov_steps {
            Some(steps) => MarkovConfig::with_steps(steps),
            None => MarkovConfig::recommended(n),
        };
        Ok(Self {
            method,
            n,
            markov,
            exact,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn markov_config(&self) -> MarkovConfig {
        self.markov
    }

    /// Draws one capacity from the given stream.
    pub fn generate<T: Real, R: Rng + ?Sized>(&self, rng: &mut R) -> Capacity<T> {
        match self.method {
            Method::Exact => {
                let ext = self
                    .exact
                    .as_ref()
                    .expect("constructor builds the sampler")
                    .sample(rng);
                Capacity::from_extension(&ext, rng)
            }
            Method::TwoLayer => {
                let ext = generate_two_layer(self.n, rng).expect("ground set validated");
                Capacity::from_extension(&ext, rng)
            }
            Method::Markov => {
                let ext =
                    generate_markov(self.n, self.markov, rng).expect("ground set validated");
                Capacity::from_extension(&ext, rng)
            }
            Method::RandomNode => generate_random_node(self.n, rng),
        }
    }
}

/// Generates `count` capacities in parallel, one independent stream per
/// sample index; the result is identical for any thread count.
pub fn generate_batch<T: Real>(
    generator: &CapacityGenerator,
    count: usize,
    seed: u64,
) -> Result<Vec<Capacity<T>>, GeneratorError> {
    if count == 0 {
        return Err(GeneratorError::EmptyBatch);
    }
    Ok((0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            generator.generate(&mut rng)
        })
        .collect())
}

/// Streams `count` capacities through `f` in parallel without retaining
/// them (validation sweeps over large batches).
pub fn for_each_sample<T, F>(
    generator: &CapacityGenerator,
    count: usize,
    seed: u64,
    f: F,
) -> Result<(), GeneratorError>
where
    T: Real,
    F: Fn(usize, Capacity<T>) + Sync + Send,
{
    if count == 0 {
        return Err(GeneratorError::EmptyBatch);
    }
    (0..count).into_par_iter().for_each(|i| {
        let mut rng = sample_rng(seed, i as u64);
        f(i, generator.generate(&mut rng));
    });
    Ok(())
}
