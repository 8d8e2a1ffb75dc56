//! Shared helpers for unit tests: random instances drawn from the stock
//! kinds and brute-force oracles that implementations are checked against.

use rand::Rng;

use crate::items::{all_masks, ItemSet};
use crate::matroid::{Matroid, WeightedMatroid};
use crate::valuation::Valuation;

/// Exhaustive maximum weight over independent subsets of `set`.
pub fn brute_force_max_weight(wm: &WeightedMatroid, set: &ItemSet) -> u64 {
    let m = wm.matroid.ground_size();
    let mut best = 0;
    for mask in all_masks(m) {
        if mask & !set.mask() != 0 {
            continue;
        }
        let s = ItemSet::from_mask(mask, m).unwrap();
        if wm.matroid.is_independent(&s).unwrap() {
            let w: u64 = s.members().iter().map(|&i| wm.weights[i]).sum();
            best = best.max(w);
        }
    }
    best
}

/// Random matroid from the stock kinds, axioms guaranteed by construction.
pub fn random_matroid(rng: &mut impl Rng, m: usize) -> Matroid {
    match rng.gen_range(0..4) {
        0 => Matroid::uniform(m, rng.gen_range(0..=m)).unwrap(),
        1 => random_partition(rng, m),
        2 => {
            let inner = Matroid::uniform(m, rng.gen_range(0..=m)).unwrap();
            Matroid::truncated(rng.gen_range(0..=m), inner).unwrap()
        }
        _ => {
            // Materialize a partition matroid into explicit form.
            let base = random_partition(rng, m);
            let sets: Vec<Vec<usize>> = all_masks(m)
                .filter_map(|mask| {
                    let s = ItemSet::from_mask(mask, m).unwrap();
                    base.is_independent(&s)
                        .unwrap()
                        .then(|| s.members().to_vec())
                })
                .collect();
            Matroid::explicit(m, sets).unwrap()
        }
    }
}

pub fn random_partition(rng: &mut impl Rng, m: usize) -> Matroid {
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for i in 0..m {
        current.push(i);
        if rng.gen_bool(0.4) || i == m - 1 {
            blocks.push(std::mem::take(&mut current));
        }
    }
    let caps: Vec<usize> = blocks.iter().map(|b| rng.gen_range(1..=b.len())).collect();
    Matroid::partition(m, blocks, caps).unwrap()
}

/// Random matroid-based valuation with weights at least 1, returned together
/// with its matroid and weight vector.
pub fn random_matroid_valuation(
    rng: &mut impl Rng,
    m: usize,
    max_weight: u64,
) -> (Valuation, Matroid, Vec<u64>) {
    let matroid = random_matroid(rng, m);
    let weights: Vec<u64> = (0..m).map(|_| rng.gen_range(1..=max_weight)).collect();
    let v = Valuation::matroid_based(matroid.clone(), weights.clone()).unwrap();
    (v, matroid, weights)
}

/// Random valuation mixing the basic kinds (no wrappers), weights at least 1.
pub fn random_basic_valuation(rng: &mut impl Rng, m: usize, max_weight: u64) -> Valuation {
    match rng.gen_range(0..4) {
        0 => Valuation::additive((0..m).map(|_| rng.gen_range(1..=max_weight)).collect()).unwrap(),
        1 => Valuation::cdemand(
            rng.gen_range(1..=m),
            (0..m).map(|_| rng.gen_range(1..=max_weight)).collect(),
        )
        .unwrap(),
        2 => {
            let cols = rng.gen_range(1..=m);
            let grid = (0..m)
                .map(|_| (0..cols).map(|_| rng.gen_range(0..=max_weight)).collect())
                .collect();
            Valuation::oxs(grid).unwrap()
        }
        _ => random_matroid_valuation(rng, m, max_weight).0,
    }
}
