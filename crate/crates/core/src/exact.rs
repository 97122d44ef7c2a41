//! Exact linear-extension machinery via dynamic programming on order ideals.
//!
//! An order ideal (down-set) of the node poset is encoded as a `u64` bitmap
//! with bit `mask − 1` standing for the node with subset mask `mask`; for
//! `n ≤ 6` there are at most 62 nodes, so every ideal fits one word. Counting
//! walks the ideal lattice generation by generation (ideals of size `k` feed
//! ideals of size `k + 1`), which keeps only two generations alive and makes
//! `n = 6` tractable. All counts are big integers: the totals fit `u64` only
//! marginally at `n = 5` and not at all beyond.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::poset::LinearExtension;
use crate::subset::{full_mask, proper_node_count, SubsetId};

/// Largest `n` for which exact counting is offered.
pub const MAX_COUNT_N: u8 = 6;
/// Largest `n` for which exact sampling and rank tables are offered by
/// default (the `n = 6` table costs several gigabytes; see
/// [`ExactSampler::with_n6_opt_in`]).
pub const MAX_TABLE_N: u8 = 5;
/// Largest `n` for which full explicit enumeration of extensions is offered.
pub const MAX_ENUMERATE_N: u8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("exact {operation} supports n ≤ {max}, got n={n}")]
    ResourceLimit {
        operation: &'static str,
        n: u8,
        max: u8,
    },
    #[error("ground-set size {0} outside supported range")]
    GroundSetSize(u8),
    #[error("subset {0} is not a poset node")]
    NotAPosetNode(SubsetId),
}

/// Multiply-xor hasher for the dense `u64` ideal keys; the default SipHash
/// dominates the n=6 count otherwise.
#[derive(Default)]
pub(crate) struct IdealHasher(u64);

impl Hasher for IdealHasher {
    fn write(&mut self, _bytes: &[u8]) {
        unreachable!("ideal keys are written as u64");
    }

    fn write_u64(&mut self, key: u64) {
        let mut x = key.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        x ^= x >> 32;
        self.0 = x.wrapping_mul(0xd6e8_feb8_6659_fd93);
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

type IdealMap<V> = HashMap<u64, V, BuildHasherDefault<IdealHasher>>;

fn node_bit(mask: u16) -> u64 {
    1u64 << (mask - 1)
}

/// Whether `node` can be appended to the ideal: not yet contained, and every
/// covering subset (one element removed, nonempty) already contained. Because
/// ideals are down-sets, checking covers suffices.
fn addable(n: u8, ideal: u64, node: u16) -> bool {
    if ideal & node_bit(node) != 0 {
        return false;
    }
    for i in 0..n {
        let bit = 1u16 << i;
        if node & bit != 0 {
            let sub = node & !bit;
            if sub != 0 && ideal & node_bit(sub) == 0 {
                return false;
            }
        }
    }
    true
}

fn check_n(operation: &'static str, n: u8, max: u8) -> Result<(), ExactError> {
    if n == 0 || n > crate::subset::MAX_GROUND_SET {
        return Err(ExactError::GroundSetSize(n));
    }
    if n > max {
        return Err(ExactError::ResourceLimit { operation, n, max });
    }
    Ok(())
}

/// Exact number of linear extensions of `2^N ∖ {∅, N}` (equal to the count
/// for the full lattice `2^N`).
pub fn count_extensions(n: u8) -> Result<BigUint, ExactError> {
    check_n("counting", n, MAX_COUNT_N)?;
    let p = proper_node_count(n);
    let full = full_mask(n);
    let mut current: IdealMap<BigUint> = IdealMap::default();
    current.insert(0, BigUint::one());
    for _ in 0..p {
        let mut next: IdealMap<BigUint> = IdealMap::default();
        next.reserve(current.len() * 2);
        for (&ideal, count) in &current {
            for node in 1..full {
                if addable(n, ideal, node) {
                    let entry = next.entry(ideal | node_bit(node)).or_default();
                    *entry += count;
                }
            }
        }
        current = next;
    }
    debug_assert_eq!(current.len(), 1);
    let full_ideal = if p == 0 { 0 } else { (1u64 << p) - 1 };
    Ok(current.remove(&full_ideal).expect("chain DP ends at the full ideal"))
}

/// All ideals grouped by size, small `n` only.
fn ideals_by_size(n: u8) -> Vec<Vec<u64>> {
    let p = proper_node_count(n);
    let full = full_mask(n);
    let mut by_size: Vec<Vec<u64>> = Vec::with_capacity(p + 1);
    by_size.push(vec![0]);
    for size in 0..p {
        let mut next: Vec<u64> = Vec::new();
        let mut seen: IdealMap<()> = IdealMap::default();
        for &ideal in &by_size[size] {
            for node in 1..full {
                if addable(n, ideal, node) {
                    let key = ideal | node_bit(node);
                    if seen.insert(key, ()).is_none() {
                        next.push(key);
                    }
                }
            }
        }
        by_size.push(next);
    }
    by_size
}

/// Counts of extensions of the complement of each ideal: `up(D)` is the
/// number of ways to complete a prefix whose placed set is `D`.
fn up_counts(n: u8, by_size: &[Vec<u64>]) -> IdealMap<BigUint> {
    let p = proper_node_count(n);
    let full = full_mask(n);
    let mut up: IdealMap<BigUint> = IdealMap::default();
    up.reserve(by_size.iter().map(Vec::len).sum());
    for &ideal in &by_size[p] {
        up.insert(ideal, BigUint::one());
    }
    for size in (0..p).rev() {
        for &ideal in &by_size[size] {
            let mut total = BigUint::zero();
            for node in 1..full {
                if addable(n, ideal, node) {
                    total += &up[&(ideal | node_bit(node))];
                }
            }
            up.insert(ideal, total);
        }
    }
    up
}

/// Exact rank-frequency table: for every node `S` and rank `k`, the number
/// of linear extensions that place `S` at position `k`.
#[derive(Clone, Debug)]
pub struct RankTable {
    n: u8,
    extension_count: BigUint,
    /// counts[mask][k − 1]; rows for ∅ and N are empty.
    counts: Vec<Vec<BigUint>>,
}

impl RankTable {
    pub fn new(n: u8) -> Result<Self, ExactError> {
        check_n("rank tables", n, MAX_TABLE_N)?;
        let p = proper_node_count(n);
        let full = full_mask(n);
        let by_size = ideals_by_size(n);
        let up = up_counts(n, &by_size);

        // Forward pass for down-counts, accumulating the rank histogram on
        // the fly: an extension places node S at rank k exactly when its
        // first k − 1 elements form an ideal D with S addable to D.
        let mut counts: Vec<Vec<BigUint>> =
            vec![vec![BigUint::zero(); p]; usize::from(full) + 1];
        let mut down: IdealMap<BigUint> = IdealMap::default();
        down.insert(0, BigUint::one());
        for size in 0..p {
            let mut next: IdealMap<BigUint> = IdealMap::default();
            next.reserve(by_size[size + 1].len());
            for (&ideal, d) in &down {
                for node in 1..full {
                    if addable(n, ideal, node) {
                        let extended = ideal | node_bit(node);
                        counts[node as usize][size] += d * &up[&extended];
                        let entry = next.entry(extended).or_default();
                        *entry += d;
                    }
                }
            }
            down = next;
        }

        let extension_count = up[&0].clone();
        Ok(Self {
            n,
            extension_count,
            counts,
        })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    /// Total number of linear extensions, `e(2^N)`.
    pub fn extension_count(&self) -> &BigUint {
        &self.extension_count
    }

    /// `N(S, k)` for `k = 1..2^n − 2` (0-indexed slice).
    pub fn rank_frequencies(&self, s: SubsetId) -> Result<&[BigUint], ExactError> {
        if s.n() != self.n || !s.is_proper_node() {
            return Err(ExactError::NotAPosetNode(s));
        }
        Ok(&self.counts[s.mask() as usize])
    }
}

/// `N(S, k)` vector for a single node, building the table on the fly.
pub fn rank_frequencies(n: u8, s: SubsetId) -> Result<Vec<BigUint>, ExactError> {
    let table = RankTable::new(n)?;
    Ok(table.rank_frequencies(s)?.to_vec())
}

/// Exact uniform sampler over linear extensions: successive minimal elements
/// chosen with probability `e(P ∖ {m}) / e(P)`, realized as ratios of
/// completion counts along the ideal lattice.
#[derive(Clone, Debug)]
pub struct ExactSampler {
    n: u8,
    up: IdealMap<BigUint>,
}

impl ExactSampler {
    /// Default constructor, `n ≤ 5`.
    pub fn new(n: u8) -> Result<Self, ExactError> {
        check_n("sampling", n, MAX_TABLE_N)?;
        Ok(Self::build(n))
    }

    /// Allows `n = 6` as well. The completion table then holds roughly
    /// 7.8 million big integers (several gigabytes); the default constructor
    /// refuses so the cost is always explicit.
    pub fn with_n6_opt_in(n: u8) -> Result<Self, ExactError> {
        check_n("sampling (n=6 opt-in)", n, MAX_COUNT_N)?;
        Ok(Self::build(n))
    }

    fn build(n: u8) -> Self {
        let by_size = ideals_by_size(n);
        let up = up_counts(n, &by_size);
        Self { n, up }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn extension_count(&self) -> &BigUint {
        &self.up[&0]
    }

    /// Draws one linear extension; each of the `e(2^N)` extensions has
    /// probability exactly `1 / e(2^N)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> LinearExtension {
        let p = proper_node_count(self.n);
        let full = full_mask(self.n);
        let mut order: Vec<u16> = Vec::with_capacity(p);
        let mut ideal = 0u64;
        let mut scratch: Vec<(u16, &BigUint)> = Vec::new();
        for _ in 0..p {
            scratch.clear();
            for node in 1..full {
                if addable(self.n, ideal, node) {
                    scratch.push((node, &self.up[&(ideal | node_bit(node))]));
                }
            }
            debug_assert_eq!(
                scratch.iter().map(|(_, w)| (*w).clone()).sum::<BigUint>(),
                self.up[&ideal],
                "completion counts of the candidates must sum to the parent count"
            );
            let mut draw = random_biguint_below(rng, &self.up[&ideal]);
            let mut chosen = scratch[scratch.len() - 1].0;
            for &(node, weight) in &scratch {
                if &draw < weight {
                    chosen = node;
                    break;
                }
                draw -= weight;
            }
            order.push(chosen);
            ideal |= node_bit(chosen);
        }
        LinearExtension::from_masks(self.n, order)
    }
}

/// Uniform big integer in `[0, bound)` by rejection on the bit width.
fn random_biguint_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    debug_assert!(!bound.is_zero());
    if bound.is_one() {
        return BigUint::zero();
    }
    let bits = bound.bits();
    let digits = ((bits + 31) / 32) as usize;
    let top_extra = (digits as u64) * 32 - bits;
    loop {
        let mut words: Vec<u32> = (0..digits).map(|_| rng.random()).collect();
        if top_extra > 0 {
            let last = words.last_mut().expect("at least one digit");
            *last &= u32::MAX >> top_extra;
        }
        let candidate = BigUint::new(words);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Explicit enumeration of all extensions by backtracking over minimal
/// elements. Limited to tiny ground sets; serves as an oracle independent of
/// the ideal DP.
pub fn enumerate_extensions(n: u8) -> Result<Vec<LinearExtension>, ExactError> {
    check_n("enumeration", n, MAX_ENUMERATE_N)?;
    let p = proper_node_count(n);
    let full = full_mask(n);
    let mut out = Vec::new();
    let mut prefix: Vec<u16> = Vec::with_capacity(p);
    fn recurse(
        n: u8,
        full: u16,
        p: usize,
        placed: u64,
        prefix: &mut Vec<u16>,
        out: &mut Vec<LinearExtension>,
    ) {
        if prefix.len() == p {
            out.push(LinearExtension::from_masks(n, prefix.clone()));
            return;
        }
        for node in 1..full {
            if addable(n, placed, node) {
                prefix.push(node);
                recurse(n, full, p, placed | node_bit(node), prefix, out);
                prefix.pop();
            }
        }
    }
    recurse(n, full, p, 0, &mut prefix, &mut out);
    Ok(out)
}
