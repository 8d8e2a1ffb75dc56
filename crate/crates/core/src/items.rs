//! Subsets of a fixed ground set `[m] = {0, .., m-1}`.
//!
//! Sets carry their ground size so cross-instance mixups surface as errors
//! instead of silent nonsense. Orderings are always the lexicographic order
//! of the sorted member list: `[] < [0] < [0,1] < [1]`.

use crate::error::{Error, Result};

/// Subset of the ground set, kept as a strictly increasing index list.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemSet {
    members: Vec<usize>,
    ground_size: usize,
}

impl ItemSet {
    /// Builds a set from arbitrary indices; duplicates collapse, order is
    /// normalized. Indices must lie below `ground_size`.
    pub fn new(mut members: Vec<usize>, ground_size: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&worst) = members.last() {
            if worst >= ground_size {
                return Err(Error::IndexOutOfRange {
                    index: worst,
                    ground: ground_size,
                });
            }
        }
        Ok(ItemSet {
            members,
            ground_size,
        })
    }

    pub fn empty(ground_size: usize) -> Self {
        ItemSet {
            members: Vec::new(),
            ground_size,
        }
    }

    pub fn full(ground_size: usize) -> Self {
        ItemSet {
            members: (0..ground_size).collect(),
            ground_size,
        }
    }

    pub fn singleton(item: usize, ground_size: usize) -> Result<Self> {
        ItemSet::new(vec![item], ground_size)
    }

    /// Decodes a bitmask; bit `i` set means item `i` present.
    pub fn from_mask(mask: u64, ground_size: usize) -> Result<Self> {
        if ground_size < 64 && mask >> ground_size != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - mask.leading_zeros() as usize,
                ground: ground_size,
            });
        }
        let members = (0..ground_size.min(64)).filter(|i| mask >> i & 1 == 1).collect();
        Ok(ItemSet {
            members,
            ground_size,
        })
    }

    /// Bitmask form; only valid for grounds of at most 64 items.
    pub fn mask(&self) -> u64 {
        debug_assert!(self.ground_size <= 64);
        self.members.iter().fold(0u64, |acc, &i| acc | 1 << i)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.members.binary_search(&item).is_ok()
    }

    pub fn is_subset_of(&self, other: &ItemSet) -> bool {
        self.members.iter().all(|&i| other.contains(i))
    }

    /// New set without `item`; unchanged clone if absent.
    pub fn without(&self, item: usize) -> Self {
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&i| i != item)
            .collect();
        ItemSet {
            members,
            ground_size: self.ground_size,
        }
    }

    pub fn with(&self, item: usize) -> Result<Self> {
        let mut members = self.members.clone();
        members.push(item);
        ItemSet::new(members, self.ground_size)
    }

    /// Members falling in `[lo, hi)`, re-indexed relative to `lo`, on a ground
    /// of `hi - lo` items. Used to slice disjoint-union copies.
    pub fn slice(&self, lo: usize, hi: usize) -> ItemSet {
        let members = self
            .members
            .iter()
            .filter(|&&i| i >= lo && i < hi)
            .map(|&i| i - lo)
            .collect();
        ItemSet {
            members,
            ground_size: hi - lo,
        }
    }

    /// Checks the ground tag against an expected size.
    pub fn expect_ground(&self, expected: usize) -> Result<()> {
        if self.ground_size != expected {
            return Err(Error::GroundMismatch {
                expected,
                got: self.ground_size,
            });
        }
        Ok(())
    }
}

impl std::fmt::Display for ItemSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (pos, i) in self.members.iter().enumerate() {
            if pos > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Errors unless a `2^m` loop over `m` items fits under `cap` (and under the
/// 63-bit mask limit).
pub fn check_enum_cap(m: usize, cap: usize) -> Result<()> {
    if m > cap || m > 63 {
        return Err(Error::EnumCapExceeded {
            needed: m,
            cap: cap.min(63),
        });
    }
    Ok(())
}

/// All subset masks of `[m]`, ascending. Callers must have passed
/// [`check_enum_cap`].
pub fn all_masks(m: usize) -> impl Iterator<Item = u64> {
    debug_assert!(m <= 63);
    0..1u64 << m
}

/// All submasks of `mask`, ascending by value (starts at 0, ends at `mask`).
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(cur)
    })
}

/// Mask-level version of the `ItemSet` ordering: does `a`'s sorted member
/// list precede `b`'s lexicographically? Both masks agree below the lowest
/// differing bit; whichever side owns that bit has the smaller next element,
/// unless the other side has nothing left at all (prefix case).
pub(crate) fn lex_less_mask(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let low = diff & diff.wrapping_neg();
    if a & low != 0 {
        b >= low
    } else {
        a < low
    }
}

/// All subsets of `pool` (a sorted member list) with at most `max_size`
/// members, visited in lexicographic member-list order.
pub fn bounded_subsets(pool: &[usize], max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for prefix in &frontier {
            let start = prefix
                .last()
                .map(|&p| pool.partition_point(|&x| x <= p))
                .unwrap_or(0);
            for &e in &pool[start..] {
                let mut grown = prefix.clone();
                grown.push(e);
                next.push(grown);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out.sort();
    out
}
