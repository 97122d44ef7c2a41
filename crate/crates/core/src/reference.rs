//! Baseline generators used for comparison: a lazy adjacent-transposition
//! Markov chain over linear extensions, and the random-node capacity
//! generator.

use rand::Rng;

use crate::capacity::Capacity;
use crate::poset::LinearExtension;
use crate::scalar::Real;
use crate::subset::{full_mask, proper_node_count, LatticeError};

/// Parameters of the Markov-chain generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkovConfig {
    /// Chain length per sample.
    pub steps: u64,
    /// Stay put with probability ½ before proposing a swap (guarantees
    /// aperiodicity).
    pub lazy: bool,
}

impl MarkovConfig {
    /// Default chain length `p³` with `p = 2^n − 2` steps, lazy. Long enough
    /// to mix acceptably for small `n` while keeping the cost ordering of
    /// the methods visible.
    pub fn recommended(n: u8) -> Self {
        let p = proper_node_count(n) as u64;
        Self {
            steps: p.saturating_mul(p).saturating_mul(p).max(1),
            lazy: true,
        }
    }

    pub fn with_steps(steps: u64) -> Self {
        Self { steps, lazy: true }
    }
}

/// Runs the chain from the canonical extension (sorted by cardinality, then
/// mask) and returns the state after `cfg.steps` steps.
///
/// Each step either stays (lazy coin) or picks a uniformly random adjacent
/// position and swaps the two nodes iff they are incomparable under
/// inclusion; swapping comparable nodes would leave the set of linear
/// extensions. The chain is symmetric and aperiodic, so its stationary
/// distribution is uniform over all extensions.
pub fn generate_markov<R: Rng + ?Sized>(
    n: u8,
    cfg: MarkovConfig,
    rng: &mut R,
) -> Result<LinearExtension, LatticeError> {
    let mut ext = LinearExtension::canonical(n);
    let p = ext.len();
    if p < 2 {
        return Ok(ext);
    }
    let mut order = ext.masks().to_vec();
    for step in 0..cfg.steps {
        if cfg.lazy && rng.random::<bool>() {
            continue;
        }
        let i = rng.random_range(0..p - 1);
        try_adjacent_swap(&mut order, i);
        if cfg!(debug_assertions) && step % 100 == 0 {
            debug_assert!(LinearExtension::from_masks(n, order.clone()).is_valid());
        }
    }
    ext = LinearExtension::from_masks(n, order);
    debug_assert!(ext.is_valid());
    Ok(ext)
}

/// Swaps `order[i]` and `order[i + 1]` iff they are incomparable under
/// inclusion; comparable pairs leave the state unchanged.
fn try_adjacent_swap(order: &mut [u16], i: usize) -> bool {
    let (a, b) = (order[i], order[i + 1]);
    if a & b == a || a & b == b {
        return false;
    }
    order.swap(i, i + 1);
    true
}

/// Random-node capacity generator: visits all nonempty proper subsets in a
/// uniformly random order and draws each value uniformly from the interval
/// allowed by the already-assigned neighbours (maximum over assigned strict
/// subsets up to minimum over assigned strict supersets). Simple, but known
/// to produce visibly biased marginals.
pub fn generate_random_node<T: Real, R: Rng + ?Sized>(n: u8, rng: &mut R) -> Capacity<T> {
    let full = full_mask(n);
    let size = usize::from(full) + 1;
    let mut values = vec![T::zero(); size];
    let mut assigned = vec![false; size];
    assigned[0] = true;
    values[full as usize] = T::one();
    assigned[full as usize] = true;

    let mut visit: Vec<u16> = (1..full).collect();
    // Fisher-Yates with the caller's generator.
    for i in (1..visit.len()).rev() {
        let j = rng.random_range(0..=i);
        visit.swap(i, j);
    }

    for s in visit {
        let mut lo = T::zero();
        let mut hi = T::one();
        // Strict submasks via the decrement-and-mask walk.
        let mut sub = s & s.wrapping_sub(1);
        loop {
            if assigned[sub as usize] && values[sub as usize] > lo {
                lo = values[sub as usize];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & s;
        }
        // Strict supermasks: (t + 1) | s steps to the next superset.
        let mut sup = s;
        loop {
            sup = (sup + 1) | s;
            if sup > full {
                break;
            }
            if assigned[sup as usize] && values[sup as usize] < hi {
                hi = values[sup as usize];
            }
        }
        let u = T::from_f64_lossy(rng.random::<f64>());
        let v = lo + (hi - lo) * u;
        values[s as usize] = v.max(lo).min(hi);
        assigned[s as usize] = true;
    }
    Capacity::from_values_unchecked(n, values)
}
