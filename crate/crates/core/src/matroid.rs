//! Matroid representations, an exhaustive axiom checker, rank queries, and
//! the greedy maximum-weight routine.
//!
//! Four kinds cover everything the reductions need: explicit independence
//! lists, uniform matroids, partition matroids, and cardinality truncations.
//! Composite structure (direct sums of truncations, as produced by the
//! closure transforms) is handled by an internal view type rather than by
//! widening the public enum.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::items::{all_masks, check_enum_cap, ItemSet};

/// A matroid over the ground set `[ground_size]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Matroid {
    /// Independence family listed set-by-set (as bitmasks). No axioms are
    /// assumed at construction; run [`verify_axioms`] to certify them.
    ExplicitIndependent {
        ground_size: usize,
        independent: BTreeSet<u64>,
    },
    /// Sets of size at most `rank` are independent.
    Uniform { ground_size: usize, rank: usize },
    /// At most `caps[b]` items from block `b`; blocks partition the ground.
    Partition {
        ground_size: usize,
        blocks: Vec<Vec<usize>>,
        caps: Vec<usize>,
    },
    /// Independent sets of the inner matroid with at most `y` members.
    Truncated { y: usize, inner: Box<Matroid> },
}

impl Matroid {
    pub fn explicit(ground_size: usize, independent: Vec<Vec<usize>>) -> Result<Self> {
        if ground_size > 63 {
            return Err(Error::invalid(
                "explicit matroids are limited to grounds of at most 63 items",
            ));
        }
        let mut masks = BTreeSet::new();
        for set in independent {
            masks.insert(ItemSet::new(set, ground_size)?.mask());
        }
        Ok(Matroid::ExplicitIndependent {
            ground_size,
            independent: masks,
        })
    }

    pub fn uniform(ground_size: usize, rank: usize) -> Result<Self> {
        if rank > ground_size {
            return Err(Error::invalid(format!(
                "uniform rank {rank} exceeds ground size {ground_size}"
            )));
        }
        Ok(Matroid::Uniform { ground_size, rank })
    }

    pub fn partition(ground_size: usize, blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::LengthMismatch {
                expected: blocks.len(),
                got: caps.len(),
            });
        }
        let mut seen = vec![false; ground_size];
        for block in &blocks {
            for &i in block {
                if i >= ground_size {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        ground: ground_size,
                    });
                }
                if seen[i] {
                    return Err(Error::invalid(format!("item {i} appears in two blocks")));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::invalid(format!(
                "item {missing} is not covered by any block"
            )));
        }
        Ok(Matroid::Partition {
            ground_size,
            blocks,
            caps,
        })
    }

    pub fn truncated(y: usize, inner: Matroid) -> Result<Self> {
        if y > inner.ground_size() {
            return Err(Error::invalid(format!(
                "truncation parameter {y} exceeds ground size {}",
                inner.ground_size()
            )));
        }
        Ok(Matroid::Truncated {
            y,
            inner: Box::new(inner),
        })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Matroid::ExplicitIndependent { ground_size, .. } => *ground_size,
            Matroid::Uniform { ground_size, .. } => *ground_size,
            Matroid::Partition { ground_size, .. } => *ground_size,
            Matroid::Truncated { inner, .. } => inner.ground_size(),
        }
    }

    /// Independence test for a set given by its sorted member list.
    pub fn is_independent(&self, set: &ItemSet) -> Result<bool> {
        set.expect_ground(self.ground_size())?;
        Ok(self.is_independent_members(set.members()))
    }

    pub(crate) fn is_independent_members(&self, members: &[usize]) -> bool {
        match self {
            Matroid::ExplicitIndependent { independent, .. } => {
                let mask = members.iter().fold(0u64, |acc, &i| acc | 1 << i);
                independent.contains(&mask)
            }
            Matroid::Uniform { rank, .. } => members.len() <= *rank,
            Matroid::Partition { blocks, caps, .. } => {
                let mut counts = vec![0usize; blocks.len()];
                for &i in members {
                    for (b, block) in blocks.iter().enumerate() {
                        if block.contains(&i) {
                            counts[b] += 1;
                            break;
                        }
                    }
                }
                counts.iter().zip(caps).all(|(c, cap)| c <= cap)
            }
            Matroid::Truncated { y, inner } => {
                members.len() <= *y && inner.is_independent_members(members)
            }
        }
    }

    /// Restriction to the sorted index list `keep`, with items re-indexed by
    /// their position in `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Result<Matroid> {
        let ground = keep.len();
        match self {
            Matroid::ExplicitIndependent { independent, .. } => {
                let keep_mask = keep.iter().fold(0u64, |acc, &i| acc | 1 << i);
                let mut remapped = BTreeSet::new();
                for &mask in independent {
                    if mask & !keep_mask != 0 {
                        continue;
                    }
                    let mut new_mask = 0u64;
                    for (new_i, &old_i) in keep.iter().enumerate() {
                        if mask >> old_i & 1 == 1 {
                            new_mask |= 1 << new_i;
                        }
                    }
                    remapped.insert(new_mask);
                }
                Ok(Matroid::ExplicitIndependent {
                    ground_size: ground,
                    independent: remapped,
                })
            }
            Matroid::Uniform { rank, .. } => Matroid::uniform(ground, (*rank).min(ground)),
            Matroid::Partition { blocks, caps, .. } => {
                let mut new_blocks = Vec::new();
                let mut new_caps = Vec::new();
                for (block, &cap) in blocks.iter().zip(caps) {
                    let filtered: Vec<usize> = block
                        .iter()
                        .filter_map(|i| keep.binary_search(i).ok())
                        .collect();
                    if !filtered.is_empty() {
                        new_blocks.push(filtered);
                        new_caps.push(cap);
                    }
                }
                Matroid::partition(ground, new_blocks, new_caps)
            }
            Matroid::Truncated { y, inner } => {
                Matroid::truncated((*y).min(ground), inner.restrict(keep)?)
            }
        }
    }

    /// Rank of `set`: the size of its largest independent subset, computed by
    /// the greedy exchange scan.
    pub fn rank(&self, set: &ItemSet) -> Result<usize> {
        set.expect_ground(self.ground_size())?;
        let mut current: Vec<usize> = Vec::new();
        for &i in set.members() {
            current.push(i);
            if !self.is_independent_members(&current) {
                current.pop();
            }
        }
        Ok(current.len())
    }
}

/// Verdict of the exhaustive axiom check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub holds: bool,
    pub violation: Option<AxiomViolation>,
}

/// First axiom violation found, with certifying sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    EmptySetMissing,
    /// `set` is independent but `subset` (one item removed) is not.
    DownwardClosure { set: ItemSet, subset: ItemSet },
    /// `small` and `large` are independent with `|small| < |large|`, yet no
    /// element of `large - small` extends `small`.
    Augmentation { small: ItemSet, large: ItemSet },
}

/// Checks all three matroid axioms exhaustively over the ground set.
pub fn verify_axioms(matroid: &Matroid, cap: usize) -> Result<AxiomReport> {
    let m = matroid.ground_size();
    check_enum_cap(m, cap)?;
    let independent: Vec<u64> = all_masks(m)
        .filter(|&mask| {
            let set = ItemSet::from_mask(mask, m).expect("mask within ground");
            matroid.is_independent_members(set.members())
        })
        .collect();
    let is_indep = |mask: u64| independent.binary_search(&mask).is_ok();

    if !is_indep(0) {
        return Ok(AxiomReport {
            holds: false,
            violation: Some(AxiomViolation::EmptySetMissing),
        });
    }
    for &mask in &independent {
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            if !is_indep(mask ^ bit) {
                return Ok(AxiomReport {
                    holds: false,
                    violation: Some(AxiomViolation::DownwardClosure {
                        set: ItemSet::from_mask(mask, m)?,
                        subset: ItemSet::from_mask(mask ^ bit, m)?,
                    }),
                });
            }
        }
    }
    for &small in &independent {
        for &large in &independent {
            if (small.count_ones()) >= large.count_ones() {
                continue;
            }
            let candidates = large & !small;
            let mut extended = false;
            let mut rest = candidates;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                if is_indep(small | bit) {
                    extended = true;
                    break;
                }
            }
            if !extended {
                return Ok(AxiomReport {
                    holds: false,
                    violation: Some(AxiomViolation::Augmentation {
                        small: ItemSet::from_mask(small, m)?,
                        large: ItemSet::from_mask(large, m)?,
                    }),
                });
            }
        }
    }
    Ok(AxiomReport {
        holds: true,
        violation: None,
    })
}

/// Matroid with per-item natural weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMatroid {
    pub matroid: Matroid,
    pub weights: Vec<u64>,
}

impl WeightedMatroid {
    pub fn new(matroid: Matroid, weights: Vec<u64>) -> Result<Self> {
        if weights.len() != matroid.ground_size() {
            return Err(Error::LengthMismatch {
                expected: matroid.ground_size(),
                got: weights.len(),
            });
        }
        Ok(WeightedMatroid { matroid, weights })
    }
}

/// Maximum weight of an independent subset of `set`, by the matroid greedy:
/// scan items of `set` in descending weight (ties by index), keep an item
/// whenever it preserves independence. Zero-weight items never help and are
/// skipped.
pub fn greedy_max_weight(wm: &WeightedMatroid, set: &ItemSet) -> Result<u64> {
    set.expect_ground(wm.matroid.ground_size())?;
    let view = MatroidView::Leaf(wm.matroid.clone());
    Ok(greedy_view_value(&view, &wm.weights, set.members()))
}

/// Independence structure assembled from leaves, direct sums, and
/// truncations. Mirrors what the closure transforms build without widening
/// the public `Matroid` enum; grounds may exceed the 63-item mask limit as
/// long as every leaf stays small.
#[derive(Clone, Debug)]
pub(crate) enum MatroidView {
    Leaf(Matroid),
    /// Parts at increasing offsets; `(offset, view)` pairs, densely packed.
    Sum {
        parts: Vec<(usize, MatroidView)>,
        ground_size: usize,
    },
    Trunc { y: usize, inner: Box<MatroidView> },
}

impl MatroidView {
    pub fn ground_size(&self) -> usize {
        match self {
            MatroidView::Leaf(m) => m.ground_size(),
            MatroidView::Sum { ground_size, .. } => *ground_size,
            MatroidView::Trunc { inner, .. } => inner.ground_size(),
        }
    }

    pub fn is_independent_members(&self, members: &[usize]) -> bool {
        match self {
            MatroidView::Leaf(m) => m.is_independent_members(members),
            MatroidView::Sum { parts, .. } => {
                let mut lo = 0;
                for (offset, part) in parts {
                    debug_assert_eq!(lo, *offset);
                    let hi = offset + part.ground_size();
                    let local: Vec<usize> = members
                        .iter()
                        .filter(|&&i| i >= *offset && i < hi)
                        .map(|&i| i - offset)
                        .collect();
                    if !part.is_independent_members(&local) {
                        return false;
                    }
                    lo = hi;
                }
                true
            }
            MatroidView::Trunc { y, inner } => {
                members.len() <= *y && inner.is_independent_members(members)
            }
        }
    }
}

/// Greedy maximum-weight independent subset value over a view.
pub(crate) fn greedy_view_value(view: &MatroidView, weights: &[u64], members: &[usize]) -> u64 {
    let mut order: Vec<usize> = members.iter().copied().filter(|&i| weights[i] > 0).collect();
    order.sort_by(|&a, &b| weights[b].cmp(&weights[a]).then(a.cmp(&b)));
    let mut chosen: Vec<usize> = Vec::new();
    let mut total = 0u64;
    for i in order {
        let pos = chosen.partition_point(|&c| c < i);
        chosen.insert(pos, i);
        if view.is_independent_members(&chosen) {
            total += weights[i];
        } else {
            chosen.remove(pos);
        }
    }
    total
}
