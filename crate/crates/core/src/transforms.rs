//! Closure operations on valuations: scaling, disjoint unions, item- and
//! value-truncation, and the scaled-disjoint-union family that powers the
//! difference-optimization reduction.
//!
//! `fast_truncated_value` evaluates an item-truncated union with a counted
//! number of value queries against the blocks; `truncated_value_exhaustive`
//! is its brute-force reference.

use crate::error::{Error, Result};
use crate::items::{bounded_subsets, ItemSet};
use crate::valuation::Valuation;

pub fn scale(v: Valuation, factor: u64) -> Result<Valuation> {
    if factor == 0 {
        return Err(Error::invalid("scale factor must be at least 1"));
    }
    Ok(Valuation::Scaled {
        factor,
        inner: Box::new(v),
    })
}

pub fn disjoint_union(parts: Vec<Valuation>) -> Result<Valuation> {
    if parts.is_empty() {
        return Err(Error::invalid("a union needs at least one part"));
    }
    Ok(Valuation::DisjointUnion { parts })
}

/// `v(S) = max over T ⊆ S, |T| ≤ y of inner(T)`; `y = 0` yields the
/// constant-zero valuation.
pub fn item_truncate(v: Valuation, y: usize) -> Result<Valuation> {
    Ok(Valuation::ItemTruncated {
        y,
        inner: Box::new(v),
    })
}

/// `v(S) = min(inner(S), x)`; `x = 0` yields the constant-zero valuation.
pub fn value_truncate(v: Valuation, x: u64) -> Result<Valuation> {
    Ok(Valuation::ValueTruncated {
        x,
        inner: Box::new(v),
    })
}

/// Type `ell` of the scaled-disjoint-union family over a pair `(v, w)` on
/// `m` items: `k - 1` scaled copies side by side, copy `i` (1-based) scaled
/// by `k + i` and built from `v` when `i >= ell`, else from `w`. Types are
/// `ell = 1..=k`; type `k` uses `w` everywhere.
pub fn scaled_disjoint_union(
    v: &Valuation,
    w: &Valuation,
    k: usize,
    ell: usize,
) -> Result<Valuation> {
    if k < 2 {
        return Err(Error::invalid("the family needs k >= 2 types"));
    }
    if ell == 0 || ell > k {
        return Err(Error::invalid(format!("type index {ell} outside 1..={k}")));
    }
    if v.ground_size() != w.ground_size() {
        return Err(Error::GroundMismatch {
            expected: v.ground_size(),
            got: w.ground_size(),
        });
    }
    let mut parts = Vec::with_capacity(k - 1);
    for i in 1..k {
        let base = if i >= ell { v.clone() } else { w.clone() };
        let factor = (k as u64)
            .checked_add(i as u64)
            .ok_or(Error::Overflow("copy coefficient"))?;
        parts.push(scale(base, factor)?);
    }
    disjoint_union(parts)
}

/// Query accounting for [`fast_truncated_value`]: one query per singleton
/// plus two block-local queries per candidate item.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TruncationQueryLog {
    pub singleton_queries: usize,
    pub marginal_queries: usize,
}

impl TruncationQueryLog {
    pub fn total(&self) -> usize {
        self.singleton_queries + self.marginal_queries
    }
}

/// Item-truncated value of `v` on `set` with budget `y`, computed greedily
/// with counted value queries: items are tried in descending singleton-value
/// order and kept while they have a strictly positive block-local marginal,
/// stopping at `y` items. Exact whenever every block of `v` is
/// matroid-based-shaped (a weighted matroid, possibly scaled); the
/// brute-force reference is [`truncated_value_exhaustive`].
pub fn fast_truncated_value(
    v: &Valuation,
    y: usize,
    set: &ItemSet,
    cap: usize,
) -> Result<(u64, TruncationQueryLog)> {
    set.expect_ground(v.ground_size())?;
    // Accept the already-truncated wrapper as long as the budgets agree.
    if let Valuation::ItemTruncated { y: wrapped, inner } = v {
        if *wrapped != y {
            return Err(Error::invalid(format!(
                "valuation is truncated at {wrapped}, not {y}"
            )));
        }
        return fast_truncated_value(inner, y, set, cap);
    }
    if v.weighted_view().is_none() {
        return Err(Error::NotMatroidBased);
    }
    // Blocks with their global offsets; a non-union valuation is one block.
    let blocks: Vec<(usize, &Valuation)> = match v {
        Valuation::DisjointUnion { parts } => {
            let mut offset = 0;
            parts
                .iter()
                .map(|p| {
                    let entry = (offset, p);
                    offset += p.ground_size();
                    entry
                })
                .collect()
        }
        other => vec![(0, other)],
    };
    let block_of = |item: usize| {
        blocks
            .iter()
            .enumerate()
            .rev()
            .find(|(_, (offset, _))| item >= *offset)
            .map(|(b, _)| b)
            .expect("item below first block offset")
    };

    let mut log = TruncationQueryLog::default();
    let mut order: Vec<(u64, usize)> = Vec::with_capacity(set.len());
    for &i in set.members() {
        let b = block_of(i);
        let (offset, part) = blocks[b];
        let local = ItemSet::singleton(i - offset, part.ground_size())?;
        let value = part.value_with_cap(&local, cap)?;
        log.singleton_queries += 1;
        order.push((value, i));
    }
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut chosen_local: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    let mut block_value: Vec<u64> = vec![0; blocks.len()];
    let mut taken = 0usize;
    for (_, i) in order {
        if taken == y {
            break;
        }
        let b = block_of(i);
        let (offset, part) = blocks[b];
        let local_ground = part.ground_size();
        let current = ItemSet::new(chosen_local[b].clone(), local_ground)?;
        let grown = current.with(i - offset)?;
        let before = part.value_with_cap(&current, cap)?;
        let after = part.value_with_cap(&grown, cap)?;
        log.marginal_queries += 2;
        if after > before {
            chosen_local[b].push(i - offset);
            block_value[b] = after;
            taken += 1;
        }
    }

    let mut total = 0u64;
    for v in block_value {
        total = total
            .checked_add(v)
            .ok_or(Error::Overflow("truncated value"))?;
    }
    Ok((total, log))
}

/// Brute-force item-truncated value: maximum of `inner` over all subsets of
/// `members` with at most `y` elements.
pub fn truncated_value_exhaustive(
    inner: &Valuation,
    y: usize,
    members: &[usize],
    cap: usize,
) -> Result<u64> {
    if members.len() > cap || members.len() > 63 {
        return Err(Error::EnumCapExceeded {
            needed: members.len(),
            cap: cap.min(63),
        });
    }
    let m = inner.ground_size();
    let mut best = 0u64;
    for subset in bounded_subsets(members, y.min(members.len())) {
        let candidate = inner.value_with_cap(&ItemSet::new(subset, m)?, cap)?;
        best = best.max(candidate);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::items::all_masks;
    use crate::matroid::Matroid;

    #[test]
    fn scaling_and_value_truncation_compose() {
        let base = Valuation::additive(vec![2, 3]).unwrap();
        let scaled = scale(base, 4).unwrap();
        let full = ItemSet::full(2);
        assert_eq!(scaled.value(&full).unwrap(), 20);
        let clipped = value_truncate(scaled, 11).unwrap();
        assert_eq!(clipped.value(&full).unwrap(), 11);
        assert_eq!(
            clipped
                .value(&ItemSet::singleton(0, 2).unwrap())
                .unwrap(),
            8
        );
    }

    #[test]
    fn union_splits_by_offset() {
        let left = Valuation::additive(vec![1, 2]).unwrap();
        let right = Valuation::cdemand(1, vec![10, 20]).unwrap();
        let u = disjoint_union(vec![left, right]).unwrap();
        assert_eq!(u.ground_size(), 4);
        let s = ItemSet::new(vec![1, 2, 3], 4).unwrap();
        assert_eq!(u.value(&s).unwrap(), 2 + 20);
    }

    #[test]
    fn scaled_union_family_frozen_values() {
        // m = 2, v = additive(2,1), w = additive(1,3), k = 3: coefficients
        // are 4 (copy 1) and 5 (copy 2).
        let v = Valuation::additive(vec![2, 1]).unwrap();
        let w = Valuation::additive(vec![1, 3]).unwrap();
        let full = ItemSet::full(4);
        let v1 = scaled_disjoint_union(&v, &w, 3, 1).unwrap();
        let v2 = scaled_disjoint_union(&v, &w, 3, 2).unwrap();
        let v3 = scaled_disjoint_union(&v, &w, 3, 3).unwrap();
        assert_eq!(v1.value(&full).unwrap(), 27);
        assert_eq!(v2.value(&full).unwrap(), 31);
        assert_eq!(v3.value(&full).unwrap(), 36);
        assert!(scaled_disjoint_union(&v, &w, 3, 0).is_err());
        assert!(scaled_disjoint_union(&v, &w, 3, 4).is_err());
    }

    #[test]
    fn item_truncation_matches_exhaustive_reference_on_tables() {
        // Non-matroid table: the wrapper must fall back to enumeration.
        let inner = Valuation::explicit_table(vec![0, 1, 1, 4, 2, 3, 3, 5]).unwrap();
        let truncated = item_truncate(inner.clone(), 2).unwrap();
        for mask in all_masks(3) {
            let s = ItemSet::from_mask(mask, 3).unwrap();
            let direct = truncated.value(&s).unwrap();
            let reference = truncated_value_exhaustive(&inner, 2, s.members(), 16).unwrap();
            assert_eq!(direct, reference);
        }
    }

    #[test]
    fn item_truncation_of_matroid_valuation_is_truncated_matroid() {
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..25 {
            let (v, matroid, weights) = crate::testutil::random_matroid_valuation(&mut rng, 6, 9);
            for y in 1..=6 {
                let truncated = item_truncate(v.clone(), y).unwrap();
                let direct = Valuation::matroid_based(
                    Matroid::truncated(y, matroid.clone()).unwrap(),
                    weights.clone(),
                )
                .unwrap();
                for mask in all_masks(6) {
                    let s = ItemSet::from_mask(mask, 6).unwrap();
                    assert_eq!(
                        truncated.value(&s).unwrap(),
                        direct.value(&s).unwrap(),
                        "y={y} S={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn fast_truncated_value_agrees_with_exhaustive_on_unions() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(99);
        for round in 0..25 {
            let m = rng.gen_range(2..=3);
            let k = rng.gen_range(2..=3);
            let (v, _, _) = crate::testutil::random_matroid_valuation(&mut rng, m, 6);
            let (w, _, _) = crate::testutil::random_matroid_valuation(&mut rng, m, 6);
            let ell = rng.gen_range(1..=k);
            let union = scaled_disjoint_union(&v, &w, k, ell).unwrap();
            let ground = union.ground_size();
            for mask in all_masks(ground) {
                let s = ItemSet::from_mask(mask, ground).unwrap();
                let (fast, log) = fast_truncated_value(&union, m, &s, 16).unwrap();
                let slow = truncated_value_exhaustive(&union, m, s.members(), 16).unwrap();
                assert_eq!(fast, slow, "round {round} S={s}");
                assert_eq!(log.singleton_queries, s.len());
                assert!(log.marginal_queries <= 2 * s.len());
            }
        }
    }

    #[test]
    fn scaling_by_one_is_identity_and_matches_additive_semantics() {
        let v = Valuation::additive(vec![3, 5]).unwrap();
        let same = scale(v.clone(), 1).unwrap();
        let doubled = scale(v, 2).unwrap();
        let reference = Valuation::additive(vec![6, 10]).unwrap();
        for mask in all_masks(2) {
            let s = ItemSet::from_mask(mask, 2).unwrap();
            assert_eq!(
                same.value(&s).unwrap(),
                Valuation::additive(vec![3, 5]).unwrap().value(&s).unwrap()
            );
            assert_eq!(doubled.value(&s).unwrap(), reference.value(&s).unwrap());
        }
        let boxs = crate::instances::boxs_family(4).unwrap().base;
        let tripled = scale(boxs, 3).unwrap();
        assert_eq!(tripled.value(&ItemSet::full(4)).unwrap(), 6);
        assert!(scale(Valuation::additive(vec![1]).unwrap(), 0).is_err());
    }

    #[test]
    fn mixed_union_example_with_one_item_blocks() {
        let v = Valuation::additive(vec![1]).unwrap();
        let w = Valuation::cdemand(1, vec![1]).unwrap();
        let v2 = scaled_disjoint_union(&v, &w, 3, 2).unwrap();
        // Copy 1 uses w at coefficient 4, copy 2 uses v at coefficient 5.
        assert_eq!(v2.value(&ItemSet::full(2)).unwrap(), 9);
    }

    #[test]
    fn union_of_additive_parts_is_extensionally_additive() {
        let left = Valuation::additive(vec![2, 5]).unwrap();
        let right = Valuation::additive(vec![7]).unwrap();
        let union = disjoint_union(vec![left, right]).unwrap();
        let flat = Valuation::additive(vec![2, 5, 7]).unwrap();
        for mask in all_masks(3) {
            let s = ItemSet::from_mask(mask, 3).unwrap();
            assert_eq!(union.value(&s).unwrap(), flat.value(&s).unwrap());
        }
    }

    #[test]
    fn union_of_matroid_parts_is_the_direct_sum_matroid() {
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..10 {
            let (left, lm, lw) = crate::testutil::random_matroid_valuation(&mut rng, 3, 5);
            let (right, rm, rw) = crate::testutil::random_matroid_valuation(&mut rng, 3, 5);
            let union = disjoint_union(vec![left, right]).unwrap();

            // Materialize the direct sum explicitly: independent iff both
            // slices are independent.
            let mut independent = Vec::new();
            for mask in all_masks(6) {
                let s = ItemSet::from_mask(mask, 6).unwrap();
                let a = s.slice(0, 3);
                let b = s.slice(3, 6);
                if lm.is_independent(&a).unwrap() && rm.is_independent(&b).unwrap() {
                    independent.push(s.members().to_vec());
                }
            }
            let sum = Matroid::explicit(6, independent).unwrap();
            let weights: Vec<u64> = lw.iter().chain(rw.iter()).copied().collect();
            let direct = Valuation::matroid_based(sum, weights).unwrap();
            for mask in all_masks(6) {
                let s = ItemSet::from_mask(mask, 6).unwrap();
                assert_eq!(union.value(&s).unwrap(), direct.value(&s).unwrap());
            }
        }
    }

    #[test]
    fn truncations_on_the_four_item_counterexample_table() {
        let v = crate::instances::appendix_counterexample();
        let truncated = item_truncate(v.clone(), 2).unwrap();
        // {a,b,d} is worth 10 outright but only 9 through two-item subsets.
        let abd = ItemSet::new(vec![0, 1, 3], 4).unwrap();
        assert_eq!(v.value(&abd).unwrap(), 10);
        assert_eq!(truncated.value(&abd).unwrap(), 9);
        let capped = value_truncate(v, 9).unwrap();
        let cd = ItemSet::new(vec![2, 3], 4).unwrap();
        assert_eq!(capped.value(&cd).unwrap(), 9);
    }

    #[test]
    fn zero_truncations_are_constant_zero() {
        let v = Valuation::additive(vec![3, 4]).unwrap();
        let by_items = item_truncate(v.clone(), 0).unwrap();
        let by_value = value_truncate(v, 0).unwrap();
        for mask in all_masks(2) {
            let s = ItemSet::from_mask(mask, 2).unwrap();
            assert_eq!(by_items.value(&s).unwrap(), 0);
            assert_eq!(by_value.value(&s).unwrap(), 0);
        }
    }

    #[test]
    fn value_truncation_preserves_submodularity() {
        let instances = vec![
            crate::instances::appendix_counterexample(),
            crate::instances::boxs_family(4).unwrap().base,
            Valuation::additive(vec![2, 3, 4]).unwrap(),
        ];
        for v in instances {
            assert!(v.check_properties(16).unwrap().submodular);
            let top = v.value(&ItemSet::full(v.ground_size())).unwrap();
            for x in 0..=top {
                let capped = value_truncate(v.clone(), x).unwrap();
                assert!(
                    capped.check_properties(16).unwrap().submodular,
                    "x={x} on {v:?}"
                );
            }
        }
    }

    #[test]
    fn fast_truncation_rejects_non_matroid_blocks() {
        let table = Valuation::explicit_table(vec![0, 1, 1, 3]).unwrap();
        let err = fast_truncated_value(&table, 1, &ItemSet::full(2), 16);
        assert!(matches!(err, Err(crate::error::Error::NotMatroidBased)));
    }

    #[test]
    fn fast_truncation_accepts_the_wrapped_instance_type() {
        let (v, _, _) = {
            use rand::rngs::StdRng;
            use rand::SeedableRng;
            let mut rng = StdRng::seed_from_u64(3);
            crate::testutil::random_matroid_valuation(&mut rng, 2, 4)
        };
        let union = scaled_disjoint_union(&v, &v, 3, 2).unwrap();
        let wrapped = item_truncate(union.clone(), 2).unwrap();
        let full = ItemSet::full(4);
        let (a, _) = fast_truncated_value(&union, 2, &full, 16).unwrap();
        let (b, _) = fast_truncated_value(&wrapped, 2, &full, 16).unwrap();
        assert_eq!(a, b);
        assert!(fast_truncated_value(&wrapped, 3, &full, 16).is_err());
    }

    #[test]
    fn fast_truncation_query_budget_is_linear() {
        let v = Valuation::additive(vec![3, 2, 1]).unwrap();
        let w = Valuation::additive(vec![1, 1, 1]).unwrap();
        let union = scaled_disjoint_union(&v, &w, 4, 2).unwrap();
        let ground = union.ground_size();
        let full = ItemSet::full(ground);
        let (_, log) = fast_truncated_value(&union, 3, &full, 16).unwrap();
        assert_eq!(log.singleton_queries, ground);
        assert!(log.total() <= 3 * ground);
    }
}
