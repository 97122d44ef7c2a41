//! Subsets of the ground set `{1, …, n}` encoded as bitmasks.
//!
//! Element `i` (1-based) corresponds to bit `i − 1`. Ground sets up to
//! `n = 16` are supported, so a mask always fits in a `u16` and per-subset
//! state arrays have at most 65 536 entries.

use std::fmt;

use thiserror::Error;

/// Largest supported ground-set size.
pub const MAX_GROUND_SET: u8 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("ground-set size {0} outside supported range 1..={MAX_GROUND_SET}")]
    GroundSetSize(u8),
    #[error("mask {mask:#b} out of range for n={n}")]
    MaskOutOfRange { n: u8, mask: u32 },
    #[error("subset {0} is not a poset node (empty and full set are excluded)")]
    NotAPosetNode(SubsetId),
    #[error("node {0} is not present in the poset state")]
    NodeAbsent(SubsetId),
    #[error("operation requires a nonempty poset state")]
    EmptyPoset,
}

/// Bitmask over all elements of the ground set of size `n`.
pub fn full_mask(n: u8) -> u16 {
    debug_assert!(n >= 1 && n <= MAX_GROUND_SET);
    (((1u32) << n) - 1) as u16
}

/// A subset of the ground set `{1, …, n}`, self-describing (carries `n`).
///
/// Any subset, including the empty set and the full set, is representable;
/// poset-node operations additionally require `0 < mask < 2^n − 1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId {
    n: u8,
    mask: u16,
}

impl SubsetId {
    /// Builds a subset from its bitmask, checking that it fits the ground set.
    pub fn new(n: u8, mask: u16) -> Result<Self, LatticeError> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(LatticeError::GroundSetSize(n));
        }
        if u32::from(mask) > u32::from(full_mask(n)) {
            return Err(LatticeError::MaskOutOfRange {
                n,
                mask: mask.into(),
            });
        }
        Ok(Self { n, mask })
    }

    /// Builds a subset from 1-based element labels.
    pub fn from_elements(n: u8, elements: &[u8]) -> Result<Self, LatticeError> {
        let mut mask = 0u16;
        for &e in elements {
            if e == 0 || e > n {
                return Err(LatticeError::MaskOutOfRange {
                    n,
                    mask: 1u32 << (e.max(1) - 1),
                });
            }
            mask |= 1 << (e - 1);
        }
        Self::new(n, mask)
    }

    pub fn empty(n: u8) -> Self {
        Self { n, mask: 0 }
    }

    pub fn full(n: u8) -> Self {
        Self {
            n,
            mask: full_mask(n),
        }
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn mask(&self) -> u16 {
        self.mask
    }

    pub fn cardinality(&self) -> u32 {
        self.mask.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == full_mask(self.n)
    }

    /// True when the subset is a node of the poset `2^N ∖ {∅, N}`.
    pub fn is_proper_node(&self) -> bool {
        !self.is_empty() && !self.is_full()
    }

    pub fn ensure_proper_node(&self) -> Result<(), LatticeError> {
        if self.is_proper_node() {
            Ok(())
        } else {
            Err(LatticeError::NotAPosetNode(*self))
        }
    }

    /// Set complement `N ∖ S`. Involutive; cardinalities sum to `n`.
    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            mask: full_mask(self.n) & !self.mask,
        }
    }

    pub fn contains_element(&self, element: u8) -> bool {
        element >= 1 && element <= self.n && self.mask & (1 << (element - 1)) != 0
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask & other.mask == self.mask
    }

    pub fn is_strict_subset_of(&self, other: &Self) -> bool {
        self.mask != other.mask && self.is_subset_of(other)
    }

    /// 1-based element labels in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=self.n).filter(move |e| self.contains_element(*e))
    }
}

impl fmt::Display for SubsetId {
    /// Compact digit form (`"134"`) for ground sets up to 9 elements,
    /// dot-separated labels (`"1.3.14"`) beyond; `"{}"` for the empty set.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        if self.n <= 9 {
            for e in self.elements() {
                write!(f, "{e}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.elements().map(|e| e.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl fmt::Debug for SubsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({self})")
    }
}

/// Masks of all nonempty proper subsets, ascending.
pub fn proper_node_masks(n: u8) -> impl Iterator<Item = u16> {
    1..full_mask(n)
}

/// Number of nonempty proper subsets, `2^n − 2`.
pub fn proper_node_count(n: u8) -> usize {
    (1usize << n) - 2
}

/// Masks of cardinality `c` within a ground set of size `n`, ascending
/// (Gosper's hack).
pub fn masks_of_cardinality(n: u8, c: u32) -> impl Iterator<Item = u16> {
    let full = u32::from(full_mask(n));
    let mut next = if c == 0 || c > u32::from(n) {
        None
    } else {
        Some((1u32 << c) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        if cur > full {
            next = None;
            return None;
        }
        // Gosper: next higher integer with the same popcount.
        let lo = cur & cur.wrapping_neg();
        let ripple = cur + lo;
        let ones = ((cur ^ ripple) >> 2) / lo;
        next = Some(ripple | ones);
        Some(cur as u16)
    })
}
