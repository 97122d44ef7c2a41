//! Approximate uniform sampling of linear extensions driven by the two top
//! and two bottom layers of the remaining poset.
//!
//! Instead of the (intractable) exact selection probability
//! `e(P ∖ {M}) / e(P)` for a maximal element `M`, only the sub-poset formed
//! by the two highest layers is consulted, and likewise the two lowest
//! layers for minimal elements. Within such a window the extension counts
//! have closed forms: isolated nodes contribute a rising-factorial insertion
//! factor, and removing any upper node of a regular window contributes a
//! uniform factor. One generation pass alternately removes a maximal and a
//! minimal element until the poset collapses to two layers, then one, which
//! is an antichain emitted in uniform random order.
//!
//! Bottom windows are realized by complementation: complementing every
//! subset reverses inclusion, so the two bottom layers become the two top
//! layers of the complemented poset and a single code path serves both
//! orientations. Views store masks in this canonical (top) form and convert
//! back when reporting nodes.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::poset::{LinearExtension, PosetState};
use crate::scalar::{kahan_sum, Real};
use crate::subset::{LatticeError, SubsetId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ViewError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the upper layer of a two-layer view must be nonempty")]
    EmptyUpperLayer,
    #[error("all nodes of the {layer} layer must share one cardinality")]
    MixedCardinality { layer: &'static str },
    #[error("the lower layer must have strictly smaller cardinality than the upper layer")]
    LayersNotOrdered,
    #[error("node {0} appears twice in the view")]
    DuplicateNode(SubsetId),
    #[error("node {0} is not in the upper layer")]
    NotInUpperLayer(SubsetId),
    #[error("no selection candidates in the view")]
    EmptyCandidates,
    #[error("exact enumeration requested on a core of {nodes} nodes (limit {limit})")]
    CoreTooLarge { nodes: usize, limit: usize },
    #[error("not a valid linear extension: {0}")]
    InvalidExtension(#[from] crate::poset::ExtensionViolation),
}

/// Which extreme of the original poset the view describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// The two top layers; candidates are maximal elements.
    Top,
    /// The two bottom layers; candidates are minimal elements. Masks are
    /// stored complemented so that all window logic runs in top form.
    Bottom,
}

/// A two-layer window: the candidate layer (`upper`), the adjacent layer
/// (`lower`), per-node predecessor counts and the isolated lower nodes.
///
/// After removals the nonempty layers of the poset need not sit on adjacent
/// cardinalities, so "the two top layers" means the top two *nonempty*
/// layers, with predecessors taken as strict supersets in the upper layer
/// regardless of the cardinality gap. On gap-free states this coincides with
/// the usual covering relation.
#[derive(Debug, Clone)]
pub struct TwoLayerView {
    n: u8,
    orientation: Orientation,
    upper: Vec<u16>,
    lower: Vec<u16>,
    prec_count: Vec<u32>,
    isolated: Vec<usize>,
    upper_card: u32,
    lower_card: u32,
}

impl TwoLayerView {
    /// The two top nonempty layers of `state`.
    pub fn top_of(state: &PosetState) -> Result<Self, ViewError> {
        let top = state.top_cardinality().ok_or(LatticeError::EmptyPoset)?;
        let upper = state.layer(top).to_vec();
        let lower = match state.next_cardinality_below(top) {
            Some(c) => state.layer(c).to_vec(),
            None => Vec::new(),
        };
        Self::build(state.n(), Orientation::Top, upper, lower)
    }

    /// The two bottom nonempty layers of `state`, complemented into top form.
    pub fn bottom_of(state: &PosetState) -> Result<Self, ViewError> {
        let n = state.n();
        let full = crate::subset::full_mask(n);
        let bottom = state.bottom_cardinality().ok_or(LatticeError::EmptyPoset)?;
        let upper: Vec<u16> = state.layer(bottom).iter().map(|&m| full & !m).collect();
        let lower: Vec<u16> = match state.next_cardinality_above(bottom) {
            Some(c) => state.layer(c).iter().map(|&m| full & !m).collect(),
            None => Vec::new(),
        };
        Self::build(n, Orientation::Bottom, upper, lower)
    }

    /// Builds a top-oriented view from explicit layers (analysis, tests,
    /// random corpora).
    pub fn from_layers(
        n: u8,
        upper: Vec<SubsetId>,
        lower: Vec<SubsetId>,
    ) -> Result<Self, ViewError> {
        for node in upper.iter().chain(lower.iter()) {
            if node.n() != n {
                return Err(LatticeError::MaskOutOfRange {
                    n,
                    mask: node.mask().into(),
                }
                .into());
            }
            node.ensure_proper_node()?;
        }
        Self::build(
            n,
            Orientation::Top,
            upper.iter().map(SubsetId::mask).collect(),
            lower.iter().map(SubsetId::mask).collect(),
        )
    }

    fn build(
        n: u8,
        orientation: Orientation,
        mut upper: Vec<u16>,
        mut lower: Vec<u16>,
    ) -> Result<Self, ViewError> {
        if upper.is_empty() {
            return Err(ViewError::EmptyUpperLayer);
        }
        upper.sort_unstable();
        lower.sort_unstable();
        for w in upper.windows(2).chain(lower.windows(2)) {
            if w[0] == w[1] {
                return Err(ViewError::DuplicateNode(
                    SubsetId::new(n, w[0]).expect("mask in range"),
                ));
            }
        }
        let upper_card = upper[0].count_ones();
        if upper.iter().any(|m| m.count_ones() != upper_card) {
            return Err(ViewError::MixedCardinality { layer: "upper" });
        }
        let lower_card = lower.first().map_or(0, |m| m.count_ones());
        if lower.iter().any(|m| m.count_ones() != lower_card) {
            return Err(ViewError::MixedCardinality { layer: "lower" });
        }
        if !lower.is_empty() && lower_card >= upper_card {
            return Err(ViewError::LayersNotOrdered);
        }

        let adjacent = lower_card + 1 == upper_card;
        let prec_count: Vec<u32> = lower
            .iter()
            .map(|&y| {
                if adjacent {
                    (0..n)
                        .filter(|&i| {
                            let bit = 1u16 << i;
                            y & bit == 0 && upper.binary_search(&(y | bit)).is_ok()
                        })
                        .count() as u32
                } else {
                    upper.iter().filter(|&&x| y & x == y && y != x).count() as u32
                }
            })
            .collect();
        let isolated: Vec<usize> = prec_count
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == 0).then_some(i))
            .collect();
        Ok(Self {
            n,
            orientation,
            upper,
            lower,
            prec_count,
            isolated,
            upper_card,
            lower_card,
        })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Number of nodes in the candidate layer (`h`).
    pub fn upper_len(&self) -> usize {
        self.upper.len()
    }

    /// Number of nodes in the adjacent layer (`k`).
    pub fn lower_len(&self) -> usize {
        self.lower.len()
    }

    /// Number of isolated adjacent-layer nodes (`|I|`).
    pub fn isolated_len(&self) -> usize {
        self.isolated.len()
    }

    /// Canonical (top-form) masks of the candidate layer, ascending.
    pub fn upper_masks(&self) -> &[u16] {
        &self.upper
    }

    /// Canonical (top-form) masks of the adjacent layer, ascending.
    pub fn lower_masks(&self) -> &[u16] {
        &self.lower
    }

    /// Predecessor counts aligned with [`TwoLayerView::lower_masks`].
    pub fn prec_counts(&self) -> &[u32] {
        &self.prec_count
    }

    fn external(&self, canonical_mask: u16) -> SubsetId {
        let mask = match self.orientation {
            Orientation::Top => canonical_mask,
            Orientation::Bottom => crate::subset::full_mask(self.n) & !canonical_mask,
        };
        SubsetId::new(self.n, mask).expect("mask in range")
    }

    fn canonical(&self, node: SubsetId) -> u16 {
        match self.orientation {
            Orientation::Top => node.mask(),
            Orientation::Bottom => crate::subset::full_mask(self.n) & !node.mask(),
        }
    }

    /// Candidate-layer nodes in original orientation.
    pub fn upper_nodes(&self) -> Vec<SubsetId> {
        self.upper.iter().map(|&m| self.external(m)).collect()
    }

    /// Adjacent-layer nodes in original orientation.
    pub fn lower_nodes(&self) -> Vec<SubsetId> {
        self.lower.iter().map(|&m| self.external(m)).collect()
    }

    /// Isolated adjacent-layer nodes in original orientation.
    pub fn isolated_nodes(&self) -> Vec<SubsetId> {
        self.isolated
            .iter()
            .map(|&i| self.external(self.lower[i]))
            .collect()
    }

    /// Calls `f` with the lower-layer index of every successor of canonical
    /// upper mask `x`.
    fn for_each_successor_index(&self, x: u16, mut f: impl FnMut(usize)) {
        if self.lower_card + 1 == self.upper_card {
            for i in 0..self.n {
                let bit = 1u16 << i;
                if x & bit != 0 {
                    if let Ok(idx) = self.lower.binary_search(&(x & !bit)) {
                        f(idx);
                    }
                }
            }
        } else {
            for (i, &y) in self.lower.iter().enumerate() {
                if y & x == y && y != x {
                    f(i);
                }
            }
        }
    }

    /// Number of successors of `x` whose only predecessor is `x`: exactly
    /// the nodes that become isolated when `x` is removed.
    pub fn newly_isolated_count(&self, x: SubsetId) -> Result<u32, ViewError> {
        let canonical = self.canonical(x);
        if self.upper.binary_search(&canonical).is_err() {
            return Err(ViewError::NotInUpperLayer(x));
        }
        Ok(self.newly_isolated_count_canonical(canonical))
    }

    fn newly_isolated_count_canonical(&self, x: u16) -> u32 {
        let mut count = 0;
        self.for_each_successor_index(x, |i| {
            if self.prec_count[i] == 1 {
                count += 1;
            }
        });
        count
    }
}

/// `∏_{i=1..count} (base + i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rising {
    base: u64,
    count: u64,
}

impl Rising {
    fn product(self) -> BigUint {
        let mut acc = BigUint::one();
        for i in 1..=self.count {
            acc *= BigUint::from(self.base + i);
        }
        acc
    }
}

/// Cumulative log-factorial table: `get(m) = Σ_{j=1..m} ln j`, so a rising
/// product collapses to one subtraction per node.
struct LnFactorialTable<T> {
    cumulative: Vec<T>,
}

impl<T: Real> LnFactorialTable<T> {
    fn up_to(max: usize) -> Self {
        let mut cumulative = Vec::with_capacity(max + 1);
        cumulative.push(T::zero());
        for m in 1..=max {
            let last = *cumulative.last().expect("nonempty");
            cumulative.push(last + T::from_usize(m).expect("factor fits").ln());
        }
        Self { cumulative }
    }

    fn ln_rising(&self, r: Rising) -> T {
        self.cumulative[(r.base + r.count) as usize] - self.cumulative[r.base as usize]
    }
}

/// Integer factor structure of the selection weights, shared by the
/// floating-point and exact-rational routes.
struct WeightShape {
    h: u64,
    upper_factors: Vec<Rising>,
    /// `(insertion factors of the reference node, reinsertion factors of the
    /// remaining isolated nodes)`; present only when the view has isolated
    /// nodes.
    isolated_factors: Option<(Rising, Rising)>,
}

/// Derives the weight factors.
///
/// Removing upper node `x` leaves `|I'| = |I| + s(x)` isolated nodes
/// (`s(x)` = successors whose only predecessor is `x`), each insertable
/// anywhere, so the weight of `x` is `A(x)/h` with
/// `A(x) = ∏_{i=1}^{|I'|} (h − 1 + k − |I'| + i)`. Removing an isolated node
/// instead leaves the other `|I| − 1` isolated nodes plus, after one upper
/// removal, `s(x̂)` new ones; its weight is
/// `B = ∏_{i=1}^{s(x̂)} (h − 1 + k − |I'(x̂)| + i) · ∏_{i=1}^{|I|−1} (h + k − |I| + i)`.
/// Under regularity `s(x)` does not depend on `x` and the normalized weights
/// reproduce the closed-form selection probabilities exactly; outside
/// regularity the per-node `A(x)` and the smallest-mask reference node `x̂`
/// make the rule deterministic and coincide with the regular case whenever
/// it applies.
fn weight_shape(view: &TwoLayerView) -> WeightShape {
    let h = view.upper.len() as u64;
    let k = view.lower.len() as u64;
    let iso = view.isolated.len() as u64;
    let upper_factors: Vec<Rising> = view
        .upper
        .iter()
        .map(|&x| {
            let marked = iso + u64::from(view.newly_isolated_count_canonical(x));
            Rising {
                base: h - 1 + k - marked,
                count: marked,
            }
        })
        .collect();
    let isolated_factors = (iso > 0).then(|| {
        let s_ref = u64::from(view.newly_isolated_count_canonical(view.upper[0]));
        let marked_ref = iso + s_ref;
        (
            Rising {
                base: h - 1 + k - marked_ref,
                count: s_ref,
            },
            Rising {
                base: h + k - iso,
                count: iso - 1,
            },
        )
    });
    WeightShape {
        h,
        upper_factors,
        isolated_factors,
    }
}

/// Normalized selection distribution over the maximal candidates of a view:
/// the upper-layer nodes followed by the isolated lower-layer nodes, in
/// ascending canonical mask order. Weights are kept in log form; products of
/// up to `h + k` integer factors overflow fixed-width floats otherwise.
#[derive(Debug, Clone)]
pub struct SelectionWeights<T> {
    candidates: Vec<SubsetId>,
    log_weights: Vec<T>,
    probabilities: Vec<T>,
    log_normalizer: T,
}

impl<T: Real> SelectionWeights<T> {
    /// Candidates in original orientation.
    pub fn candidates(&self) -> &[SubsetId] {
        &self.candidates
    }

    pub fn probabilities(&self) -> &[T] {
        &self.probabilities
    }

    pub fn log_weights(&self) -> &[T] {
        &self.log_weights
    }

    pub fn log_normalizer(&self) -> T {
        self.log_normalizer
    }

    /// Draws a candidate index.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::from_f64(rng.random::<f64>()).expect("uniform fits scalar");
        let mut acc = T::zero();
        for (i, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probabilities.len() - 1
    }
}

/// Candidate selection distribution in floating point (log-domain weights).
pub fn selection_weights<T: Real>(
    view: &TwoLayerView,
) -> Result<SelectionWeights<T>, ViewError> {
    if view.upper.is_empty() {
        return Err(ViewError::EmptyCandidates);
    }
    let shape = weight_shape(view);
    let table = LnFactorialTable::<T>::up_to(view.upper.len() + view.lower.len());
    let ln_h = T::from_u64(shape.h).expect("h fits").ln();
    let mut candidates: Vec<SubsetId> =
        view.upper.iter().map(|&m| view.external(m)).collect();
    let mut log_weights: Vec<T> = shape
        .upper_factors
        .iter()
        .map(|&r| table.ln_rising(r) - ln_h)
        .collect();
    if let Some((head, tail)) = shape.isolated_factors {
        let lw = table.ln_rising(head) + table.ln_rising(tail);
        for &i in &view.isolated {
            candidates.push(view.external(view.lower[i]));
            log_weights.push(lw);
        }
    }
    let max = log_weights
        .iter()
        .copied()
        .fold(T::neg_infinity(), T::max);
    let raw: Vec<T> = log_weights.iter().map(|&lw| (lw - max).exp()).collect();
    let total = kahan_sum(raw.iter().copied());
    let probabilities: Vec<T> = raw.iter().map(|&w| w / total).collect();
    let log_normalizer = max + total.ln();
    debug_assert!(probabilities.iter().all(|p| p.is_finite() && *p > T::zero()));
    debug_assert!(
        (kahan_sum(probabilities.iter().copied()) - T::one()).abs()
            <= T::from_f64(1e-12).expect("tolerance fits"),
        "selection probabilities must sum to 1"
    );
    Ok(SelectionWeights {
        candidates,
        log_weights,
        probabilities,
        log_normalizer,
    })
}

/// Exact-rational counterpart of [`selection_weights`]; probabilities are
/// closed-form rationals.
#[derive(Debug, Clone)]
pub struct ExactSelectionWeights {
    candidates: Vec<SubsetId>,
    weights: Vec<BigRational>,
    probabilities: Vec<BigRational>,
}

impl ExactSelectionWeights {
    pub fn candidates(&self) -> &[SubsetId] {
        &self.candidates
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn probabilities(&self) -> &[BigRational] {
        &self.probabilities
    }

    pub fn probability_of(&self, node: SubsetId) -> Option<&BigRational> {
        self.candidates
            .iter()
            .position(|&c| c == node)
            .map(|i| &self.probabilities[i])
    }
}

pub fn selection_weights_exact(
    view: &TwoLayerView,
) -> Result<ExactSelectionWeights, ViewError> {
    if view.upper.is_empty() {
        return Err(ViewError::EmptyCandidates);
    }
    let shape = weight_shape(view);
    let h = BigRational::from_integer(shape.h.into());
    let mut candidates: Vec<SubsetId> =
        view.upper.iter().map(|&m| view.external(m)).collect();
    let mut weights: Vec<BigRational> = shape
        .upper_factors
        .iter()
        .map(|r| BigRational::from_integer(r.product().into()) / &h)
        .collect();
    if let Some((head, tail)) = shape.isolated_factors {
        let w = BigRational::from_integer((head.product() * tail.product()).into());
        for &i in &view.isolated {
            candidates.push(view.external(view.lower[i]));
            weights.push(w.clone());
        }
    }
    let total: BigRational = weights.iter().sum();
    let probabilities: Vec<BigRational> = weights.iter().map(|w| w / &total).collect();
    debug_assert_eq!(
        probabilities.iter().sum::<BigRational>(),
        BigRational::one()
    );
    Ok(ExactSelectionWeights {
        candidates,
        weights,
        probabilities,
    })
}

/// How a two-layer extension count was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    /// Isolated-node factors plus exhaustive enumeration of the remaining
    /// core: exact for any view.
    Enumerated,
    /// Uniform upper-removal steps were used: exact when every intermediate
    /// window is regular, an approximation otherwise.
    RegularFormula,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountStrategy {
    /// Enumerate when the de-isolated core has at most
    /// [`ENUMERATION_NODE_LIMIT`] nodes, otherwise fall back to the formula.
    Auto,
    /// Error instead of falling back.
    ExactOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoLayerCount {
    pub count: BigUint,
    pub method: CountMethod,
}

/// Cores above this size are not enumerated (the subset memo grows as
/// `2^nodes` in the worst case).
pub const ENUMERATION_NODE_LIMIT: usize = 20;

/// Number of linear extensions of the view, treated as a standalone poset.
///
/// Isolated nodes are incomparable to everything else, so each can be
/// inserted anywhere: stripping all `|I|` of them multiplies the count of
/// the remaining core by `∏_{i=1}^{|I|} (k − |I| + h + i)`. Small cores are
/// enumerated exactly; larger ones are reduced by uniform upper-removal
/// steps, which is exact under regularity.
pub fn extension_count(
    view: &TwoLayerView,
    strategy: CountStrategy,
) -> Result<TwoLayerCount, ViewError> {
    let mut upper = view.upper.clone();
    let mut lower: Vec<(u16, u32)> = view
        .lower
        .iter()
        .copied()
        .zip(view.prec_count.iter().copied())
        .collect();
    let mut total = BigUint::one();
    let mut used_formula = false;
    loop {
        let iso = lower.iter().filter(|(_, c)| *c == 0).count() as u64;
        if iso > 0 {
            let h = upper.len() as u64;
            let k = lower.len() as u64;
            total *= Rising {
                base: k - iso + h,
                count: iso,
            }
            .product();
            lower.retain(|(_, c)| *c > 0);
        }
        let nodes = upper.len() + lower.len();
        if nodes <= ENUMERATION_NODE_LIMIT {
            total *= enumerate_core(&upper, &lower);
            break;
        }
        if strategy == CountStrategy::ExactOnly {
            return Err(ViewError::CoreTooLarge {
                nodes,
                limit: ENUMERATION_NODE_LIMIT,
            });
        }
        used_formula = true;
        total *= BigUint::from(upper.len() as u64);
        let x = upper.remove(0);
        for (mask, count) in lower.iter_mut() {
            if *mask & x == *mask && *mask != x {
                *count -= 1;
            }
        }
    }
    Ok(TwoLayerCount {
        count: total,
        method: if used_formula {
            CountMethod::RegularFormula
        } else {
            CountMethod::Enumerated
        },
    })
}

/// Linear-extension count of a bipartite two-layer poset by memoized
/// deletion of minimal elements. At most [`ENUMERATION_NODE_LIMIT`] nodes,
/// so counts fit `u64` (`20! < 2^64`).
fn enumerate_core(upper: &[u16], lower: &[(u16, u32)]) -> BigUint {
    let nl = lower.len();
    let nu = upper.len();
    debug_assert!(nl + nu <= ENUMERATION_NODE_LIMIT);
    if nl + nu == 0 {
        return BigUint::one();
    }
    // succ_bits[j] = bitmap (over lower indices) of subsets of upper[j].
    let succ_bits: Vec<u32> = upper
        .iter()
        .map(|&x| {
            let mut bits = 0u32;
            for (i, &(y, _)) in lower.iter().enumerate() {
                if y & x == y && y != x {
                    bits |= 1 << i;
                }
            }
            bits
        })
        .collect();
    let full: u32 = if nl + nu == 32 {
        u32::MAX
    } else {
        (1u32 << (nl + nu)) - 1
    };
    let mut memo: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
    fn count(
        remaining: u32,
        nl: usize,
        nu: usize,
        succ_bits: &[u32],
        memo: &mut std::collections::HashMap<u32, u64>,
    ) -> u64 {
        if remaining == 0 {
            return 1;
        }
        if let Some(&v) = memo.get(&remaining) {
            return v;
        }
        let mut total = 0u64;
        let lower_part = remaining & ((1u32 << nl).wrapping_sub(1));
        for i in 0..nl {
            if remaining & (1 << i) != 0 {
                total += count(remaining & !(1 << i), nl, nu, succ_bits, memo);
            }
        }
        for j in 0..nu {
            let bit = 1u32 << (nl + j);
            if remaining & bit != 0 && succ_bits[j] & lower_part == 0 {
                total += count(remaining & !bit, nl, nu, succ_bits, memo);
            }
        }
        memo.insert(remaining, total);
        total
    }
    BigUint::from(count(full, nl, nu, &succ_bits, &mut memo))
}

/// Which extreme a selection step draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Max,
    Min,
}

/// Hook deciding each selection of the generation run. The default
/// implementation draws from the step distribution; scripted policies replay
/// fixed choices or force a target extension.
pub trait SelectionPolicy {
    /// Picks an index into `candidates` (aligned with `probabilities`), or
    /// `None` to abort the run (replay mismatch).
    fn choose(
        &mut self,
        side: Side,
        candidates: &[SubsetId],
        probabilities: &[f64],
    ) -> Option<usize>;

    /// Arranges the final antichain in emission order; `false` aborts.
    fn arrange_antichain(&mut self, nodes: &mut Vec<SubsetId>) -> bool;
}

struct RngPolicy<'r, R: Rng + ?Sized>(&'r mut R);

impl<R: Rng + ?Sized> SelectionPolicy for RngPolicy<'_, R> {
    fn choose(
        &mut self,
        _side: Side,
        _candidates: &[SubsetId],
        probabilities: &[f64],
    ) -> Option<usize> {
        let u: f64 = self.0.random();
        let mut acc = 0.0;
        for (i, &p) in probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                return Some(i);
            }
        }
        Some(probabilities.len() - 1)
    }

    fn arrange_antichain(&mut self, nodes: &mut Vec<SubsetId>) -> bool {
        nodes.shuffle(self.0);
        true
    }
}

/// Outcome of one generation run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub extension: LinearExtension,
    /// Natural log of the probability of the realized choice sequence.
    pub log_probability: f64,
}

/// Runs the generation loop under an arbitrary selection policy.
///
/// Returns `Ok(None)` when the policy aborts (a scripted choice was not
/// among the candidates).
pub fn run_with_policy<P: SelectionPolicy>(
    n: u8,
    policy: &mut P,
) -> Result<Option<RunRecord>, ViewError> {
    let mut state = PosetState::full(n)?;
    let mut lmin: Vec<u16> = Vec::with_capacity(state.len());
    let mut lmax_rev: Vec<u16> = Vec::new();
    let mut log_p = 0.0f64;

    // Alternate one maximal and one minimal removal while more than two
    // layers remain. The bottom window sees the state with the maximal
    // element already removed.
    while !state.is_empty() && state.height().expect("nonempty") > 2 {
        if !select_and_remove(&mut state, Side::Max, policy, &mut lmax_rev, &mut log_p)? {
            return Ok(None);
        }
        if !select_and_remove(&mut state, Side::Min, policy, &mut lmin, &mut log_p)? {
            return Ok(None);
        }
    }

    // Two layers left: work on the side with fewer nodes, maximal on ties.
    while !state.is_empty() && state.height().expect("nonempty") == 2 {
        let top = state.top_cardinality().expect("nonempty");
        let bottom = state.bottom_cardinality().expect("nonempty");
        let side = if state.layer_count(top) <= state.layer_count(bottom) {
            Side::Max
        } else {
            Side::Min
        };
        let out = match side {
            Side::Max => &mut lmax_rev,
            Side::Min => &mut lmin,
        };
        if !select_and_remove(&mut state, side, policy, out, &mut log_p)? {
            return Ok(None);
        }
    }

    // One layer left: an antichain, every order equally likely.
    if !state.is_empty() {
        let c = state.top_cardinality().expect("nonempty");
        let mut rest: Vec<SubsetId> = {
            let mut masks = state.layer(c).to_vec();
            masks.sort_unstable();
            masks
                .into_iter()
                .map(|m| SubsetId::new(n, m).expect("mask in range"))
                .collect()
        };
        if !policy.arrange_antichain(&mut rest) {
            return Ok(None);
        }
        for i in 2..=rest.len() {
            log_p -= (i as f64).ln();
        }
        lmin.extend(rest.iter().map(SubsetId::mask));
    }

    let mut order = lmin;
    order.extend(lmax_rev.iter().rev());
    Ok(Some(RunRecord {
        extension: LinearExtension::from_masks(n, order),
        log_probability: log_p,
    }))
}

fn select_and_remove<P: SelectionPolicy>(
    state: &mut PosetState,
    side: Side,
    policy: &mut P,
    out: &mut Vec<u16>,
    log_p: &mut f64,
) -> Result<bool, ViewError> {
    let view = match side {
        Side::Max => TwoLayerView::top_of(state)?,
        Side::Min => TwoLayerView::bottom_of(state)?,
    };
    let weights = selection_weights::<f64>(&view)?;
    let Some(idx) = policy.choose(side, weights.candidates(), weights.probabilities())
    else {
        return Ok(false);
    };
    let node = weights.candidates()[idx];
    *log_p += weights.probabilities()[idx].ln();
    state.remove(node)?;
    out.push(node.mask());
    Ok(true)
}

/// Draws one linear extension with the two-layer method. Deterministic given
/// the RNG state; the output always validates.
pub fn generate_two_layer<R: Rng + ?Sized>(
    n: u8,
    rng: &mut R,
) -> Result<LinearExtension, ViewError> {
    let record = run_with_policy(n, &mut RngPolicy(rng))?
        .expect("the random policy never aborts");
    debug_assert!(record.extension.is_valid());
    Ok(record.extension)
}

/// Probability that [`generate_two_layer`] emits exactly `ext`, computed by
/// replaying the run with every choice forced. Extensions the method cannot
/// produce have probability zero.
pub fn extension_probability(ext: &LinearExtension) -> Result<f64, ViewError> {
    ext.validate()?;
    let mut policy = ForcedEnds {
        masks: ext.masks(),
        front: 0,
        back: ext.len(),
    };
    Ok(match run_with_policy(ext.n(), &mut policy)? {
        Some(record) => {
            debug_assert_eq!(record.extension.masks(), ext.masks());
            record.log_probability.exp()
        }
        None => 0.0,
    })
}

/// Policy that forces the run to reproduce a target extension: maximal
/// selections consume it from the back, minimal selections from the front.
struct ForcedEnds<'a> {
    masks: &'a [u16],
    front: usize,
    back: usize,
}

impl SelectionPolicy for ForcedEnds<'_> {
    fn choose(
        &mut self,
        side: Side,
        candidates: &[SubsetId],
        _probabilities: &[f64],
    ) -> Option<usize> {
        let target = match side {
            Side::Max => self.masks[self.back - 1],
            Side::Min => self.masks[self.front],
        };
        let idx = candidates.iter().position(|c| c.mask() == target)?;
        match side {
            Side::Max => self.back -= 1,
            Side::Min => self.front += 1,
        }
        Some(idx)
    }

    fn arrange_antichain(&mut self, nodes: &mut Vec<SubsetId>) -> bool {
        let segment = &self.masks[self.front..self.back];
        if segment.len() != nodes.len() {
            return false;
        }
        let mut sorted: Vec<u16> = segment.to_vec();
        sorted.sort_unstable();
        let mut have: Vec<u16> = nodes.iter().map(SubsetId::mask).collect();
        have.sort_unstable();
        if sorted != have {
            return false;
        }
        let n = nodes[0].n();
        *nodes = segment
            .iter()
            .map(|&m| SubsetId::new(n, m).expect("mask in range"))
            .collect();
        self.front = self.back;
        true
    }
}

/// Scripted policy: replays a fixed sequence of node choices (in selection
/// order) and a fixed antichain arrangement.
pub struct ScriptedPolicy {
    picks: Vec<SubsetId>,
    antichain: Vec<SubsetId>,
    cursor: usize,
    /// Step probabilities observed for each scripted pick.
    pub observed_probabilities: Vec<f64>,
}

impl ScriptedPolicy {
    pub fn new(picks: Vec<SubsetId>, antichain: Vec<SubsetId>) -> Self {
        Self {
            picks,
            antichain,
            cursor: 0,
            observed_probabilities: Vec::new(),
        }
    }
}

impl SelectionPolicy for ScriptedPolicy {
    fn choose(
        &mut self,
        _side: Side,
        candidates: &[SubsetId],
        probabilities: &[f64],
    ) -> Option<usize> {
        let target = *self.picks.get(self.cursor)?;
        self.cursor += 1;
        let idx = candidates.iter().position(|&c| c == target)?;
        self.observed_probabilities.push(probabilities[idx]);
        Some(idx)
    }

    fn arrange_antichain(&mut self, nodes: &mut Vec<SubsetId>) -> bool {
        if self.antichain.len() != nodes.len() {
            return false;
        }
        let mut want: Vec<SubsetId> = self.antichain.clone();
        want.sort();
        let mut have = nodes.clone();
        have.sort();
        if want != have {
            return false;
        }
        *nodes = self.antichain.clone();
        true
    }
}
