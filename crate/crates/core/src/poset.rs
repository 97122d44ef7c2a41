//! The Boolean-lattice poset restricted to nonempty proper subsets, with
//! layer bookkeeping, plus linear extensions and their validation.

use thiserror::Error;

use crate::subset::{full_mask, proper_node_count, LatticeError, SubsetId};

/// Mutable "remaining nodes" view of `2^N ∖ {∅, N}` used during generation.
///
/// Nodes are grouped into layers by cardinality. Removal is O(1); listing a
/// layer is O(size of layer).
#[derive(Clone, Debug)]
pub struct PosetState {
    n: u8,
    present: Vec<bool>,
    layers: Vec<Vec<u16>>,
    pos: Vec<u32>,
    remaining: usize,
}

impl PosetState {
    /// Full poset on all `2^n − 2` nonempty proper subsets.
    pub fn full(n: u8) -> Result<Self, LatticeError> {
        if n == 0 || n > crate::subset::MAX_GROUND_SET {
            return Err(LatticeError::GroundSetSize(n));
        }
        let size = 1usize << n;
        let mut present = vec![false; size];
        let mut layers = vec![Vec::new(); usize::from(n) + 1];
        let mut pos = vec![0u32; size];
        for mask in 1..full_mask(n) {
            let c = mask.count_ones() as usize;
            present[mask as usize] = true;
            pos[mask as usize] = layers[c].len() as u32;
            layers[c].push(mask);
        }
        Ok(Self {
            n,
            present,
            layers,
            pos,
            remaining: proper_node_count(n),
        })
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.remaining
    }

    pub fn is_empty(&self) -> bool {
        self.remaining == 0
    }

    pub fn is_present(&self, node: SubsetId) -> bool {
        node.n() == self.n && self.present[node.mask() as usize]
    }

    fn is_present_mask(&self, mask: u16) -> bool {
        self.present[mask as usize]
    }

    /// Present nodes of cardinality `c` (unordered).
    pub fn layer(&self, c: usize) -> &[u16] {
        &self.layers[c]
    }

    pub fn layer_count(&self, c: usize) -> usize {
        self.layers[c].len()
    }

    /// Number of distinct cardinalities with at least one present node.
    pub fn height(&self) -> Result<usize, LatticeError> {
        if self.is_empty() {
            return Err(LatticeError::EmptyPoset);
        }
        Ok(self.layers.iter().filter(|l| !l.is_empty()).count())
    }

    /// Largest cardinality with a present node.
    pub fn top_cardinality(&self) -> Option<usize> {
        (1..=usize::from(self.n)).rev().find(|&c| !self.layers[c].is_empty())
    }

    /// Smallest cardinality with a present node.
    pub fn bottom_cardinality(&self) -> Option<usize> {
        (1..=usize::from(self.n)).find(|&c| !self.layers[c].is_empty())
    }

    /// Next nonempty cardinality strictly below `c`.
    pub fn next_cardinality_below(&self, c: usize) -> Option<usize> {
        (1..c).rev().find(|&d| !self.layers[d].is_empty())
    }

    /// Next nonempty cardinality strictly above `c`.
    pub fn next_cardinality_above(&self, c: usize) -> Option<usize> {
        (c + 1..=usize::from(self.n)).find(|&d| !self.layers[d].is_empty())
    }

    /// Removes a present node in O(1) (swap-remove within its layer).
    pub fn remove(&mut self, node: SubsetId) -> Result<(), LatticeError> {
        if !self.is_present(node) {
            return Err(LatticeError::NodeAbsent(node));
        }
        let mask = node.mask();
        let c = mask.count_ones() as usize;
        let idx = self.pos[mask as usize] as usize;
        let layer = &mut self.layers[c];
        layer.swap_remove(idx);
        if idx < layer.len() {
            let moved = layer[idx];
            self.pos[moved as usize] = idx as u32;
        }
        self.present[mask as usize] = false;
        self.remaining -= 1;
        Ok(())
    }

    /// Present nodes `x ⊃ y` with `|x| = |y| + 1`.
    pub fn present_predecessors(&self, y: SubsetId) -> Result<Vec<SubsetId>, LatticeError> {
        if !self.is_present(y) {
            return Err(LatticeError::NodeAbsent(y));
        }
        let mut out = Vec::new();
        for i in 0..self.n {
            let bit = 1u16 << i;
            if y.mask() & bit == 0 {
                let sup = y.mask() | bit;
                if sup != full_mask(self.n) && self.is_present_mask(sup) {
                    out.push(SubsetId::new(self.n, sup).expect("superset mask in range"));
                }
            }
        }
        Ok(out)
    }

    /// Present nodes `x ⊂ y` with `|x| = |y| − 1`.
    pub fn present_successors(&self, y: SubsetId) -> Result<Vec<SubsetId>, LatticeError> {
        if !self.is_present(y) {
            return Err(LatticeError::NodeAbsent(y));
        }
        let mut out = Vec::new();
        for i in 0..self.n {
            let bit = 1u16 << i;
            if y.mask() & bit != 0 {
                let sub = y.mask() & !bit;
                if sub != 0 && self.is_present_mask(sub) {
                    out.push(SubsetId::new(self.n, sub).expect("subset mask in range"));
                }
            }
        }
        Ok(out)
    }
}

/// First violation found when checking a linear extension.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionViolation {
    #[error("expected {expected} nodes, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("mask {mask:#b} repeated or not a proper nonempty subset")]
    BadNode { mask: u16 },
    #[error("superset {superset} at position {position} precedes its subset {subset}")]
    OrderViolation {
        superset: SubsetId,
        subset: SubsetId,
        position: usize,
    },
}

/// An ordering of all `2^n − 2` nonempty proper subsets compatible with
/// inclusion.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearExtension {
    n: u8,
    order: Vec<u16>,
}

impl LinearExtension {
    /// Wraps an order without validating it; use [`LinearExtension::validate`]
    /// to check the invariants.
    pub fn from_masks(n: u8, order: Vec<u16>) -> Self {
        Self { n, order }
    }

    /// The order sorted by cardinality then mask: always a valid extension.
    pub fn canonical(n: u8) -> Self {
        let mut order: Vec<u16> = (1..full_mask(n)).collect();
        order.sort_by_key(|m| (m.count_ones(), *m));
        Self { n, order }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn masks(&self) -> &[u16] {
        &self.order
    }

    pub fn nodes(&self) -> impl Iterator<Item = SubsetId> + '_ {
        let n = self.n;
        self.order
            .iter()
            .map(move |&m| SubsetId::new(n, m).expect("stored mask in range"))
    }

    /// 1-based rank of `node` in the order, if present.
    pub fn rank_of(&self, node: SubsetId) -> Option<usize> {
        self.order.iter().position(|&m| m == node.mask()).map(|i| i + 1)
    }

    /// Checks both invariants: the order is a permutation of all nonempty
    /// proper subsets, and no element precedes one of its supersets.
    ///
    /// Verifying every covering pair `(S ∖ {i}, S)` suffices: inclusion is
    /// the transitive closure of the covering relation on the full node set.
    pub fn validate(&self) -> Result<(), ExtensionViolation> {
        let expected = proper_node_count(self.n);
        if self.order.len() != expected {
            return Err(ExtensionViolation::WrongLength {
                expected,
                found: self.order.len(),
            });
        }
        let full = full_mask(self.n);
        let mut seen = vec![false; usize::from(full) + 1];
        for &m in &self.order {
            if m == 0 || m >= full || seen[m as usize] {
                return Err(ExtensionViolation::BadNode { mask: m });
            }
            seen[m as usize] = true;
        }
        // Single forward pass: when S appears, all its covering subsets must
        // already have appeared.
        let mut placed = vec![false; usize::from(full) + 1];
        for (j, &m) in self.order.iter().enumerate() {
            for i in 0..self.n {
                let bit = 1u16 << i;
                if m & bit != 0 {
                    let sub = m & !bit;
                    if sub != 0 && !placed[sub as usize] {
                        return Err(ExtensionViolation::OrderViolation {
                            superset: SubsetId::new(self.n, m).expect("in range"),
                            subset: SubsetId::new(self.n, sub).expect("in range"),
                            position: j,
                        });
                    }
                }
            }
            placed[m as usize] = true;
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: u8, elements: &[u8]) -> SubsetId {
        SubsetId::from_elements(n, elements).unwrap()
    }

    fn masks(n: u8, sets: &[&[u8]]) -> Vec<u16> {
        sets.iter().map(|e| s(n, e).mask()).collect()
    }

    #[test]
    fn full_poset_heights() {
        assert_eq!(PosetState::full(4).unwrap().height().unwrap(), 3);
        assert_eq!(PosetState::full(5).unwrap().height().unwrap(), 4);
        for n in 2..=8u8 {
            assert_eq!(
                PosetState::full(n).unwrap().height().unwrap(),
                usize::from(n) - 1
            );
        }
    }

    #[test]
    fn antichain_height_is_one() {
        let mut state = PosetState::full(4).unwrap();
        // Reduce to the 2-set layer only.
        for mask in 1..full_mask(4) {
            if mask.count_ones() != 2 {
                state.remove(SubsetId::new(4, mask).unwrap()).unwrap();
            }
        }
        assert_eq!(state.height().unwrap(), 1);
        assert_eq!(state.len(), 6);
    }

    #[test]
    fn height_errors_on_empty() {
        let mut state = PosetState::full(2).unwrap();
        state.remove(s(2, &[1])).unwrap();
        state.remove(s(2, &[2])).unwrap();
        assert!(matches!(state.height(), Err(LatticeError::EmptyPoset)));
    }

    #[test]
    fn predecessors_in_full_lattice() {
        let state = PosetState::full(4).unwrap();
        let mut pred = state.present_predecessors(s(4, &[1, 3])).unwrap();
        pred.sort();
        assert_eq!(pred, vec![s(4, &[1, 2, 3]), s(4, &[1, 3, 4])]);
    }

    #[test]
    fn predecessors_in_reduced_state() {
        // Three-layer poset on n=4 minus {123, 134}: node 13 is isolated.
        let mut state = PosetState::full(4).unwrap();
        state.remove(s(4, &[1, 2, 3])).unwrap();
        state.remove(s(4, &[1, 3, 4])).unwrap();
        assert!(state.present_predecessors(s(4, &[1, 3])).unwrap().is_empty());
        // Top-cardinality nodes never have predecessors.
        assert!(state
            .present_predecessors(s(4, &[1, 2, 4]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn predecessors_require_presence() {
        let mut state = PosetState::full(3).unwrap();
        state.remove(s(3, &[1])).unwrap();
        assert!(matches!(
            state.present_predecessors(s(3, &[1])),
            Err(LatticeError::NodeAbsent(_))
        ));
    }

    #[test]
    fn predecessor_contract_on_random_removals() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut state = PosetState::full(5).unwrap();
            for mask in 1..full_mask(5) {
                if rng.random::<bool>() {
                    state.remove(SubsetId::new(5, mask).unwrap()).unwrap();
                }
            }
            for mask in 1..full_mask(5) {
                let node = SubsetId::new(5, mask).unwrap();
                if !state.is_present(node) {
                    continue;
                }
                let preds = state.present_predecessors(node).unwrap();
                for p in preds {
                    assert!(state.is_present(p));
                    assert!(node.is_strict_subset_of(&p));
                    assert_eq!(p.cardinality(), node.cardinality() + 1);
                }
            }
        }
    }

    #[test]
    fn validate_accepts_antichain_order() {
        let ext = LinearExtension::from_masks(2, masks(2, &[&[1], &[2]]));
        assert!(ext.is_valid());
        let ext = LinearExtension::from_masks(2, masks(2, &[&[2], &[1]]));
        assert!(ext.is_valid());
    }

    #[test]
    fn validate_rejects_subset_after_superset() {
        let ext = LinearExtension::from_masks(
            3,
            masks(3, &[&[1, 2], &[1], &[2], &[3], &[1, 3], &[2, 3]]),
        );
        match ext.validate() {
            Err(ExtensionViolation::OrderViolation {
                superset, position, ..
            }) => {
                assert_eq!(superset, s(3, &[1, 2]));
                assert_eq!(position, 0);
            }
            other => panic!("expected order violation, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_duplicates_and_boundaries() {
        let ext = LinearExtension::from_masks(2, vec![1, 1]);
        assert!(matches!(
            ext.validate(),
            Err(ExtensionViolation::BadNode { mask: 1 })
        ));
        let ext = LinearExtension::from_masks(2, vec![1, 3]);
        assert!(matches!(
            ext.validate(),
            Err(ExtensionViolation::BadNode { mask: 3 })
        ));
        let ext = LinearExtension::from_masks(3, vec![1, 2]);
        assert!(matches!(
            ext.validate(),
            Err(ExtensionViolation::WrongLength { .. })
        ));
    }

    #[test]
    fn worked_example_order_is_valid() {
        let ext = LinearExtension::from_masks(
            4,
            masks(
                4,
                &[
                    &[1],
                    &[4],
                    &[1, 4],
                    &[2],
                    &[3],
                    &[1, 2],
                    &[3, 4],
                    &[2, 4],
                    &[2, 3],
                    &[1, 3],
                    &[1, 2, 3],
                    &[1, 2, 4],
                    &[1, 3, 4],
                    &[2, 3, 4],
                ],
            ),
        );
        assert!(ext.is_valid());
    }

    #[test]
    fn canonical_extension_is_valid() {
        for n in 1..=8u8 {
            assert!(LinearExtension::canonical(n).is_valid());
        }
    }

    /// Covering-pair validation agrees with the brute-force pairwise check on
    /// every permutation of the 6 nodes for n=3.
    #[test]
    fn validator_matches_pairwise_oracle_exhaustively() {
        fn pairwise_ok(order: &[u16]) -> bool {
            for i in 0..order.len() {
                for j in (i + 1)..order.len() {
                    let (a, b) = (order[j], order[i]);
                    if a != b && a & b == a {
                        // later is a strict subset of earlier
                        return false;
                    }
                }
            }
            true
        }
        let nodes: Vec<u16> = (1..full_mask(3)).collect();
        let mut accepted = 0usize;
        let mut perm = nodes.clone();
        // Heap's algorithm over the 720 permutations.
        fn heaps(k: usize, arr: &mut Vec<u16>, visit: &mut impl FnMut(&[u16])) {
            if k <= 1 {
                visit(arr);
                return;
            }
            for i in 0..k {
                heaps(k - 1, arr, visit);
                if k % 2 == 0 {
                    arr.swap(i, k - 1);
                } else {
                    arr.swap(0, k - 1);
                }
            }
        }
        let mut total = 0usize;
        heaps(6, &mut perm, &mut |order| {
            total += 1;
            let fast = LinearExtension::from_masks(3, order.to_vec()).is_valid();
            let slow = pairwise_ok(order);
            assert_eq!(fast, slow, "disagreement on {order:?}");
            if fast {
                accepted += 1;
            }
        });
        assert_eq!(total, 720);
        assert_eq!(accepted, 48);
    }
}
