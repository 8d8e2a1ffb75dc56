//! Normalized monotone valuations with natural-number values.
//!
//! The basic kinds are additive, c-demand, OXS (maximum-weight matching
//! against a fixed right side), matroid-based, and explicit tables; closure
//! wrappers add scaling, disjoint unions, item- and value-truncation, and
//! SAT-encoded perturbations. Value queries are exact; demand queries break
//! ties toward the lexicographically smallest optimizer.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::items::{all_masks, check_enum_cap, lex_less_mask, ItemSet};
use crate::matching::max_weight_matching_nat;
use crate::matroid::{greedy_view_value, Matroid, MatroidView, WeightedMatroid};
use crate::{Rational, DEFAULT_ENUM_CAP};

/// CNF formula as DIMACS-style clause lists: literal `+i` means variable `i`
/// true, `-i` false; variables are 1-indexed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(clauses: Vec<Vec<i32>>, num_vars: usize) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::invalid(format!("clause {ci} is empty")));
            }
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::invalid(format!(
                        "literal {lit} in clause {ci} is out of range for {num_vars} variables"
                    )));
                }
            }
        }
        Ok(Cnf { clauses })
    }

    /// Evaluates under `assignment`, where `assignment[i]` is variable `i+1`.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let var = lit.unsigned_abs() as usize - 1;
                assignment[var] == (lit > 0)
            })
        })
    }
}

/// A valuation over `[ground_size]`. Construct through the checked helpers;
/// the generators and transforms only ever produce normalized monotone
/// instances, while `check_properties` diagnoses arbitrary explicit tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// `v(S) = sum of weights over S`.
    Additive { weights: Vec<u64> },
    /// `v(S) = sum of the c largest weights in S`.
    CDemand { c: usize, weights: Vec<u64> },
    /// `v(S)` is the maximum-weight matching of `S` against a fixed right
    /// side; `weights[item][right_node]`, zero meaning a useless edge.
    Oxs { weights: Vec<Vec<u64>> },
    /// `v(S)` is the maximum weight of an independent subset of `S`.
    MatroidBased { matroid: Matroid, weights: Vec<u64> },
    /// Dense table indexed by subset bitmask; length is `2^m`.
    ExplicitTable { ground_size: usize, values: Vec<u64> },
    /// `base`, lowered by one on ground/2-sized sets whose lexicographic rank
    /// encodes a satisfying assignment of `cnf`.
    SatPerturbed {
        base: Box<Valuation>,
        cnf: Cnf,
        num_vars: usize,
    },
    /// `factor * inner(S)`.
    Scaled { factor: u64, inner: Box<Valuation> },
    /// Parts side by side on disjoint item ranges; value adds up.
    DisjointUnion { parts: Vec<Valuation> },
    /// `v(S) = max over T ⊆ S with |T| ≤ y of inner(T)`.
    ItemTruncated { y: usize, inner: Box<Valuation> },
    /// `v(S) = min(inner(S), x)`.
    ValueTruncated { x: u64, inner: Box<Valuation> },
}

impl Valuation {
    pub fn additive(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("valuation needs at least one item"));
        }
        Ok(Valuation::Additive { weights })
    }

    pub fn cdemand(c: usize, weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("valuation needs at least one item"));
        }
        if c == 0 {
            return Err(Error::invalid("c-demand requires c >= 1"));
        }
        Ok(Valuation::CDemand { c, weights })
    }

    pub fn oxs(weights: Vec<Vec<u64>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("valuation needs at least one item"));
        }
        let cols = weights[0].len();
        if cols == 0 {
            return Err(Error::invalid("OXS right side must be non-empty"));
        }
        if weights.iter().any(|row| row.len() != cols) {
            return Err(Error::invalid("OXS weight grid must be rectangular"));
        }
        Ok(Valuation::Oxs { weights })
    }

    pub fn matroid_based(matroid: Matroid, weights: Vec<u64>) -> Result<Self> {
        let wm = WeightedMatroid::new(matroid, weights)?;
        Ok(Valuation::MatroidBased {
            matroid: wm.matroid,
            weights: wm.weights,
        })
    }

    pub fn explicit_table(values: Vec<u64>) -> Result<Self> {
        let len = values.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "explicit table length {len} is not a power of two"
            )));
        }
        let ground_size = len.trailing_zeros() as usize;
        if ground_size == 0 || ground_size > 24 {
            return Err(Error::invalid(format!(
                "explicit table ground size {ground_size} outside 1..=24"
            )));
        }
        Ok(Valuation::ExplicitTable {
            ground_size,
            values,
        })
    }

    pub fn sat_perturbed(base: Valuation, cnf: Cnf, num_vars: usize) -> Result<Self> {
        let m = base.ground_size();
        if m % 2 != 0 {
            return Err(Error::invalid(
                "SAT perturbation requires an even ground size",
            ));
        }
        if num_vars == 0 || num_vars > 63 {
            return Err(Error::invalid("variable count outside 1..=63"));
        }
        Ok(Valuation::SatPerturbed {
            base: Box::new(base),
            cnf,
            num_vars,
        })
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Valuation::Additive { weights } => weights.len(),
            Valuation::CDemand { weights, .. } => weights.len(),
            Valuation::Oxs { weights } => weights.len(),
            Valuation::MatroidBased { matroid, .. } => matroid.ground_size(),
            Valuation::ExplicitTable { ground_size, .. } => *ground_size,
            Valuation::SatPerturbed { base, .. } => base.ground_size(),
            Valuation::Scaled { inner, .. } => inner.ground_size(),
            Valuation::DisjointUnion { parts } => parts.iter().map(Valuation::ground_size).sum(),
            Valuation::ItemTruncated { inner, .. } => inner.ground_size(),
            Valuation::ValueTruncated { inner, .. } => inner.ground_size(),
        }
    }

    /// Value query with the default enumeration cap.
    pub fn value(&self, set: &ItemSet) -> Result<u64> {
        self.value_with_cap(set, DEFAULT_ENUM_CAP)
    }

    /// Value query; `cap` guards the exhaustive fallback of item truncation,
    /// the only value path that enumerates.
    pub fn value_with_cap(&self, set: &ItemSet, cap: usize) -> Result<u64> {
        set.expect_ground(self.ground_size())?;
        self.value_members(set.members(), cap)
    }

    fn value_members(&self, members: &[usize], cap: usize) -> Result<u64> {
        match self {
            Valuation::Additive { weights } => sum_checked(members.iter().map(|&i| weights[i])),
            Valuation::CDemand { c, weights } => {
                let mut picked: Vec<u64> = members.iter().map(|&i| weights[i]).collect();
                picked.sort_unstable_by(|a, b| b.cmp(a));
                picked.truncate(*c);
                sum_checked(picked.into_iter())
            }
            Valuation::Oxs { weights } => {
                let rows: Vec<Vec<u64>> =
                    members.iter().map(|&i| weights[i].clone()).collect();
                max_weight_matching_nat(&rows)
            }
            Valuation::MatroidBased { matroid, weights } => {
                let view = MatroidView::Leaf(matroid.clone());
                Ok(greedy_view_value(&view, weights, members))
            }
            Valuation::ExplicitTable { values, .. } => {
                let mask = members.iter().fold(0u64, |acc, &i| acc | 1 << i);
                Ok(values[mask as usize])
            }
            Valuation::SatPerturbed {
                base,
                cnf,
                num_vars,
            } => {
                let base_value = base.value_members(members, cap)?;
                let m = base.ground_size();
                if members.len() * 2 != m {
                    return Ok(base_value);
                }
                let rank = crate::instances::subset_rank_members(m, members)?;
                if *num_vars < 64 && rank > 1u64 << num_vars {
                    return Ok(base_value);
                }
                let encoded = rank - 1;
                let assignment: Vec<bool> =
                    (0..*num_vars).map(|i| encoded >> i & 1 == 1).collect();
                if cnf.satisfied_by(&assignment) {
                    base_value
                        .checked_sub(1)
                        .ok_or_else(|| Error::invalid("perturbation drives a zero value negative"))
                } else {
                    Ok(base_value)
                }
            }
            Valuation::Scaled { factor, inner } => inner
                .value_members(members, cap)?
                .checked_mul(*factor)
                .ok_or(Error::Overflow("scaled value")),
            Valuation::DisjointUnion { parts } => {
                let mut total = 0u64;
                let mut offset = 0;
                for part in parts {
                    let width = part.ground_size();
                    let local: Vec<usize> = members
                        .iter()
                        .filter(|&&i| i >= offset && i < offset + width)
                        .map(|&i| i - offset)
                        .collect();
                    let v = part.value_members(&local, cap)?;
                    total = total.checked_add(v).ok_or(Error::Overflow("union value"))?;
                    offset += width;
                }
                Ok(total)
            }
            Valuation::ItemTruncated { y, inner } => {
                if let Some((view, weights)) = inner.weighted_view() {
                    let truncated = MatroidView::Trunc {
                        y: *y,
                        inner: Box::new(view),
                    };
                    Ok(greedy_view_value(&truncated, &weights, members))
                } else {
                    crate::transforms::truncated_value_exhaustive(inner, *y, members, cap)
                }
            }
            Valuation::ValueTruncated { x, inner } => {
                Ok(inner.value_members(members, cap)?.min(*x))
            }
        }
    }

    /// Matroid-plus-weights structure of this valuation, when its shape
    /// exposes one. Powers the fast item-truncation path.
    pub(crate) fn weighted_view(&self) -> Option<(MatroidView, Vec<u64>)> {
        match self {
            Valuation::Additive { weights } => Some((
                MatroidView::Leaf(Matroid::uniform(weights.len(), weights.len()).ok()?),
                weights.clone(),
            )),
            Valuation::CDemand { c, weights } => Some((
                MatroidView::Leaf(Matroid::uniform(weights.len(), (*c).min(weights.len())).ok()?),
                weights.clone(),
            )),
            Valuation::MatroidBased { matroid, weights } => {
                Some((MatroidView::Leaf(matroid.clone()), weights.clone()))
            }
            Valuation::Scaled { factor, inner } => {
                let (view, weights) = inner.weighted_view()?;
                let scaled: Option<Vec<u64>> =
                    weights.iter().map(|w| w.checked_mul(*factor)).collect();
                Some((view, scaled?))
            }
            Valuation::DisjointUnion { parts } => {
                let mut views = Vec::new();
                let mut weights = Vec::new();
                let mut offset = 0;
                for part in parts {
                    let (view, mut w) = part.weighted_view()?;
                    views.push((offset, view));
                    offset += part.ground_size();
                    weights.append(&mut w);
                }
                Some((
                    MatroidView::Sum {
                        parts: views,
                        ground_size: offset,
                    },
                    weights,
                ))
            }
            Valuation::ItemTruncated { y, inner } => {
                let (view, weights) = inner.weighted_view()?;
                Some((
                    MatroidView::Trunc {
                        y: *y,
                        inner: Box::new(view),
                    },
                    weights,
                ))
            }
            Valuation::Oxs { .. }
            | Valuation::ExplicitTable { .. }
            | Valuation::SatPerturbed { .. }
            | Valuation::ValueTruncated { .. } => None,
        }
    }

    /// Dense value table indexed by subset mask; `2^m` value queries.
    pub fn value_table(&self, cap: usize) -> Result<Vec<u64>> {
        let m = self.ground_size();
        check_enum_cap(m, cap)?;
        all_masks(m)
            .map(|mask| {
                let set = ItemSet::from_mask(mask, m)?;
                self.value_members(set.members(), cap)
            })
            .collect()
    }

    /// Utility-maximizing set under per-item prices, by exhaustive
    /// enumeration; ties break toward the lexicographically smallest member
    /// list. Prices must be non-negative rationals, one per item.
    pub fn demand(&self, prices: &[Rational], cap: usize) -> Result<ItemSet> {
        let m = self.ground_size();
        if prices.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: prices.len(),
            });
        }
        if prices.iter().any(|p| p.is_negative()) {
            return Err(Error::invalid("prices must be non-negative"));
        }
        let table = self.value_table(cap)?;
        let mask = demand_from_table(&table, m, prices)?;
        ItemSet::from_mask(mask, m)
    }

    /// Property diagnosis over the full subset lattice.
    pub fn check_properties(&self, cap: usize) -> Result<PropertyReport> {
        let m = self.ground_size();
        let table = self.value_table(cap)?;
        let normalized = table[0] == 0;

        let mut monotone = true;
        let mut monotone_witness = None;
        'mono: for mask in all_masks(m) {
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    continue;
                }
                let bigger = mask | 1 << i;
                if table[bigger as usize] < table[mask as usize] {
                    monotone = false;
                    monotone_witness = Some(MonotonicityViolation {
                        subset: ItemSet::from_mask(mask, m)?,
                        superset: ItemSet::from_mask(bigger, m)?,
                    });
                    break 'mono;
                }
            }
        }

        let mut submodular = true;
        let mut submodular_witness = None;
        'sub: for mask in all_masks(m) {
            for item in 0..m {
                if mask >> item & 1 == 1 {
                    continue;
                }
                for extra in 0..m {
                    if extra == item || mask >> extra & 1 == 1 {
                        continue;
                    }
                    let with_extra = mask | 1 << extra;
                    let both = with_extra | 1 << item;
                    let with_item = mask | 1 << item;
                    // Marginal of `item` must not grow when `extra` joins.
                    let lhs = table[both as usize] as i128 - table[with_extra as usize] as i128;
                    let rhs = table[with_item as usize] as i128 - table[mask as usize] as i128;
                    if lhs > rhs {
                        submodular = false;
                        submodular_witness = Some(SubmodularityViolation {
                            base: ItemSet::from_mask(mask, m)?,
                            item,
                            extra,
                        });
                        break 'sub;
                    }
                }
            }
        }

        let trivial_items = (0..m).filter(|&i| table[1usize << i] == 0).collect();
        Ok(PropertyReport {
            normalized,
            monotone,
            monotone_witness,
            submodular,
            submodular_witness,
            trivial_items,
        })
    }

    /// Restriction to the sorted index list `keep`, re-indexed by position.
    /// Structure is preserved where the kind allows; otherwise the valuation
    /// is materialized (guarded by `cap`) into an explicit table.
    pub fn restrict(&self, keep: &[usize], cap: usize) -> Result<Valuation> {
        let m = self.ground_size();
        for &i in keep {
            if i >= m {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    ground: m,
                });
            }
        }
        if keep.is_empty() {
            return Err(Error::invalid("restriction would leave no items"));
        }
        match self {
            Valuation::Additive { weights } => {
                Valuation::additive(keep.iter().map(|&i| weights[i]).collect())
            }
            Valuation::CDemand { c, weights } => Valuation::cdemand(
                (*c).min(keep.len()),
                keep.iter().map(|&i| weights[i]).collect(),
            ),
            Valuation::Oxs { weights } => {
                Valuation::oxs(keep.iter().map(|&i| weights[i].clone()).collect())
            }
            Valuation::MatroidBased { matroid, weights } => Valuation::matroid_based(
                matroid.restrict(keep)?,
                keep.iter().map(|&i| weights[i]).collect(),
            ),
            Valuation::ExplicitTable { values, .. } => {
                let mut restricted = Vec::with_capacity(1 << keep.len());
                for mask in all_masks(keep.len()) {
                    let mut embedded = 0u64;
                    for (new_i, &old_i) in keep.iter().enumerate() {
                        if mask >> new_i & 1 == 1 {
                            embedded |= 1 << old_i;
                        }
                    }
                    restricted.push(values[embedded as usize]);
                }
                Valuation::explicit_table(restricted)
            }
            _ => {
                check_enum_cap(m, cap)?;
                let table = self.value_table(cap)?;
                let mut restricted = Vec::with_capacity(1 << keep.len());
                for mask in all_masks(keep.len()) {
                    let mut embedded = 0u64;
                    for (new_i, &old_i) in keep.iter().enumerate() {
                        if mask >> new_i & 1 == 1 {
                            embedded |= 1 << old_i;
                        }
                    }
                    restricted.push(table[embedded as usize]);
                }
                Valuation::explicit_table(restricted)
            }
        }
    }
}

fn sum_checked(values: impl Iterator<Item = u64>) -> Result<u64> {
    let mut total = 0u64;
    for v in values {
        total = total.checked_add(v).ok_or(Error::Overflow("value sum"))?;
    }
    Ok(total)
}

/// Shared demand core: maximizes `value(T) - prices(T)` over a dense table,
/// lexicographically smallest optimizer wins. Exact via a common-denominator
/// integer comparison.
pub(crate) fn demand_from_table(table: &[u64], m: usize, prices: &[Rational]) -> Result<u64> {
    let mut denom = BigInt::from(1);
    for p in prices {
        denom = denom.lcm(p.denom());
    }
    let scaled: Vec<BigInt> = prices
        .iter()
        .map(|p| p.numer() * (&denom / p.denom()))
        .collect();
    let fast: Option<Vec<i128>> = scaled.iter().map(|s| s.to_i128()).collect();
    let denom_i128 = denom.to_i128();

    let mut best_mask = 0u64;
    if let (Some(scaled), Some(denom)) = (fast, denom_i128) {
        let mut best = 0i128; // empty set: surplus 0
        let mut overflow_free = denom.checked_mul(i64::MAX as i128).is_some();
        for mask in all_masks(m).skip(1) {
            let value = table[mask as usize] as i128;
            if value > i64::MAX as i128 {
                overflow_free = false;
                break;
            }
            let mut surplus = value * denom;
            for (i, s) in scaled.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    surplus -= s;
                }
            }
            if surplus > best || (surplus == best && lex_less_mask(mask, best_mask)) {
                best = surplus;
                best_mask = mask;
            }
        }
        if overflow_free {
            return Ok(best_mask);
        }
    }

    // Cold path for enormous numbers: same scan over BigInt.
    best_mask = 0;
    let mut best = BigInt::zero();
    for mask in all_masks(m).skip(1) {
        let mut surplus = BigInt::from(table[mask as usize]) * &denom;
        for (i, s) in scaled.iter().enumerate() {
            if mask >> i & 1 == 1 {
                surplus -= s;
            }
        }
        if surplus > best || (surplus == best && lex_less_mask(mask, best_mask)) {
            best = surplus;
            best_mask = mask;
        }
    }
    Ok(best_mask)
}

/// Diagnosis of the standing assumptions on a valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub normalized: bool,
    pub monotone: bool,
    pub monotone_witness: Option<MonotonicityViolation>,
    pub submodular: bool,
    pub submodular_witness: Option<SubmodularityViolation>,
    /// Items whose singleton value is zero.
    pub trivial_items: Vec<usize>,
}

impl PropertyReport {
    /// The standing input assumptions: normalized, monotone, no trivial
    /// items. Submodularity is diagnostic only.
    pub fn satisfies_assumptions(&self) -> bool {
        self.normalized && self.monotone && self.trivial_items.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityViolation {
    pub subset: ItemSet,
    pub superset: ItemSet,
}

/// Certificate that the marginal of `item` grows: adding it on top of
/// `base ∪ {extra}` gains strictly more than adding it on top of `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodularityViolation {
    pub base: ItemSet,
    pub item: usize,
    pub extra: usize,
}

/// Trivial-item preprocessing for difference optimization: items worthless
/// under the first valuation are dropped outright; items worthless under the
/// second are dropped and recorded for re-insertion into solutions.
#[derive(Clone, Debug)]
pub struct TrivialSplit {
    pub v: Valuation,
    pub w: Valuation,
    /// Items with `v({i}) = 0`, removed for good.
    pub removed_value_trivial: Vec<usize>,
    /// Items with `w({i}) = 0` (and `v({i}) > 0`), to re-add to solutions.
    pub removed_weight_trivial: Vec<usize>,
    /// Original indices of the surviving items, in order.
    pub kept: Vec<usize>,
}

pub fn preprocess_trivial_items(v: &Valuation, w: &Valuation, cap: usize) -> Result<TrivialSplit> {
    let m = v.ground_size();
    w.value_with_cap(&ItemSet::empty(m), cap)
        .and(Ok(()))
        .map_err(|_| Error::GroundMismatch {
            expected: m,
            got: w.ground_size(),
        })?;
    let mut removed_value_trivial = Vec::new();
    let mut removed_weight_trivial = Vec::new();
    let mut kept = Vec::new();
    for i in 0..m {
        let single = ItemSet::singleton(i, m)?;
        if v.value_with_cap(&single, cap)? == 0 {
            removed_value_trivial.push(i);
        } else if w.value_with_cap(&single, cap)? == 0 {
            removed_weight_trivial.push(i);
        } else {
            kept.push(i);
        }
    }
    if kept.is_empty() {
        return Err(Error::invalid(
            "every item is trivial for one of the valuations",
        ));
    }
    Ok(TrivialSplit {
        v: v.restrict(&kept, cap)?,
        w: w.restrict(&kept, cap)?,
        removed_value_trivial,
        removed_weight_trivial,
        kept,
    })
}

/// Explicit distribution over finitely many valuation types.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeDistribution {
    ground_size: usize,
    entries: Vec<(Valuation, Rational)>,
}

impl TypeDistribution {
    pub fn new(entries: Vec<(Valuation, Rational)>) -> Result<Self> {
        let Some((first, _)) = entries.first() else {
            return Err(Error::invalid("distribution needs at least one type"));
        };
        let ground_size = first.ground_size();
        let mut total = Rational::zero();
        for (i, (valuation, probability)) in entries.iter().enumerate() {
            if valuation.ground_size() != ground_size {
                return Err(Error::GroundMismatch {
                    expected: ground_size,
                    got: valuation.ground_size(),
                });
            }
            if probability <= &Rational::zero() {
                return Err(Error::invalid(format!(
                    "type {i} has non-positive probability"
                )));
            }
            total += probability;
        }
        if total != Rational::new(1.into(), 1.into()) {
            return Err(Error::invalid(format!("probabilities sum to {total}")));
        }
        Ok(TypeDistribution {
            ground_size,
            entries,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(Valuation, Rational)] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational;

    fn uniform_matroid_valuation(m: usize, rank: usize, weights: Vec<u64>) -> Valuation {
        Valuation::matroid_based(Matroid::uniform(m, rank).unwrap(), weights).unwrap()
    }

    #[test]
    fn matroid_based_value_matches_brute_force_example() {
        let v = uniform_matroid_valuation(4, 2, vec![5, 4, 3, 2]);
        let s = ItemSet::new(vec![0, 2, 3], 4).unwrap();
        assert_eq!(v.value(&s).unwrap(), 8);
    }

    #[test]
    fn additive_and_cdemand_values() {
        let add = Valuation::additive(vec![3, 5, 7]).unwrap();
        assert_eq!(add.value(&ItemSet::new(vec![0, 2], 3).unwrap()).unwrap(), 10);
        let cd = Valuation::cdemand(2, vec![3, 5, 7]).unwrap();
        assert_eq!(cd.value(&ItemSet::full(3)).unwrap(), 12);
        assert_eq!(cd.value(&ItemSet::empty(3)).unwrap(), 0);
    }

    #[test]
    fn oxs_value_is_a_matching_optimum() {
        // Two right nodes; items 0 and 1 compete for the strong one.
        let v = Valuation::oxs(vec![vec![4, 1], vec![3, 2], vec![0, 1]]).unwrap();
        assert_eq!(v.value(&ItemSet::new(vec![0, 1], 3).unwrap()).unwrap(), 6);
        // Item 2 reaches only the weak node, which items 0 and 1 use better.
        assert_eq!(v.value(&ItemSet::full(3)).unwrap(), 6);
        assert_eq!(v.value(&ItemSet::new(vec![2], 3).unwrap()).unwrap(), 1);
    }

    #[test]
    fn ground_mismatch_is_an_error() {
        let v = Valuation::additive(vec![1, 2]).unwrap();
        assert!(matches!(
            v.value(&ItemSet::empty(3)),
            Err(Error::GroundMismatch { .. })
        ));
    }

    #[test]
    fn demand_picks_surplus_maximizer() {
        let v = uniform_matroid_valuation(2, 1, vec![5, 3]);
        let prices = vec![rational(1, 1), rational(4, 1)];
        let got = v.demand(&prices, 16).unwrap();
        assert_eq!(got.members(), &[0]);
    }

    #[test]
    fn demand_at_zero_prices_attains_full_value() {
        let cases = vec![
            Valuation::additive(vec![2, 0, 1]).unwrap(),
            Valuation::cdemand(1, vec![4, 4, 1]).unwrap(),
            uniform_matroid_valuation(3, 2, vec![3, 3, 3]),
        ];
        for v in cases {
            let m = v.ground_size();
            let zeros = vec![Rational::zero(); m];
            let demanded = v.demand(&zeros, 16).unwrap();
            assert_eq!(
                v.value(&demanded).unwrap(),
                v.value(&ItemSet::full(m)).unwrap()
            );
        }
    }

    #[test]
    fn demand_tie_break_is_lexicographic() {
        // Both singletons and the pair all reach surplus 4.
        let v = Valuation::cdemand(1, vec![4, 4]).unwrap();
        let zeros = vec![Rational::zero(); 2];
        assert_eq!(v.demand(&zeros, 16).unwrap().members(), &[0]);
    }

    #[test]
    fn demand_matches_naive_enumeration_on_random_valuations() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..40 {
            let m = rng.gen_range(1..=5);
            let v = crate::testutil::random_basic_valuation(&mut rng, m, 9);
            let prices: Vec<Rational> = (0..m)
                .map(|_| rational(rng.gen_range(0..8), rng.gen_range(1..4)))
                .collect();
            let got = v.demand(&prices, 16).unwrap();

            // Naive oracle: rational arithmetic and explicit lex ordering.
            let mut best_mask = 0u64;
            let mut best = Rational::zero();
            for mask in all_masks(m) {
                let set = ItemSet::from_mask(mask, m).unwrap();
                let mut surplus = rational(v.value(&set).unwrap() as i64, 1);
                for &i in set.members() {
                    surplus -= prices[i].clone();
                }
                let better = surplus > best
                    || (surplus == best
                        && ItemSet::from_mask(mask, m).unwrap()
                            < ItemSet::from_mask(best_mask, m).unwrap());
                if better {
                    best = surplus;
                    best_mask = mask;
                }
            }
            assert_eq!(got.mask(), best_mask, "demand mismatch on {v:?}");
        }
    }

    #[test]
    fn property_report_flags_uncapped_tables() {
        let not_normalized = Valuation::explicit_table(vec![1, 2]).unwrap();
        let report = not_normalized.check_properties(16).unwrap();
        assert!(!report.normalized);

        let not_monotone = Valuation::explicit_table(vec![0, 2, 1, 1]).unwrap();
        let report = not_monotone.check_properties(16).unwrap();
        assert!(!report.monotone);
        let witness = report.monotone_witness.unwrap();
        assert_eq!(witness.subset.members(), &[0]);
        assert_eq!(witness.superset.members(), &[0, 1]);
    }

    #[test]
    fn property_report_on_additive_is_clean() {
        let v = Valuation::additive(vec![2, 3]).unwrap();
        let report = v.check_properties(16).unwrap();
        assert!(report.normalized && report.monotone && report.submodular);
        assert!(report.trivial_items.is_empty());
        assert!(report.satisfies_assumptions());
    }

    #[test]
    fn trivial_items_are_listed() {
        let v = Valuation::additive(vec![0, 3, 0]).unwrap();
        let report = v.check_properties(16).unwrap();
        assert_eq!(report.trivial_items, vec![0, 2]);
    }

    #[test]
    fn submodularity_violation_is_witnessed() {
        // v({0,1}) jumps: complements are not submodular.
        let v = Valuation::explicit_table(vec![0, 1, 1, 4]).unwrap();
        let report = v.check_properties(16).unwrap();
        assert!(!report.submodular);
        let w = report.submodular_witness.unwrap();
        let base = w.base.mask();
        let lhs = 4 - 1; // v({0,1}) - v({extra})
        let rhs = 1 - 0; // v({item}) - v(empty)
        assert_eq!(base, 0);
        assert!(lhs > rhs);
    }

    #[test]
    fn preprocessing_removes_both_kinds_of_trivial_items() {
        let v = Valuation::additive(vec![0, 2, 3]).unwrap();
        let w = Valuation::additive(vec![5, 0, 1]).unwrap();
        let split = preprocess_trivial_items(&v, &w, 16).unwrap();
        assert_eq!(split.removed_value_trivial, vec![0]);
        assert_eq!(split.removed_weight_trivial, vec![1]);
        assert_eq!(split.kept, vec![2]);
        assert_eq!(split.v.ground_size(), 1);
        let single = ItemSet::full(1);
        assert_eq!(split.v.value(&single).unwrap(), 3);
        assert_eq!(split.w.value(&single).unwrap(), 1);
    }

    #[test]
    fn restriction_agrees_with_embedding() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..30 {
            let m = rng.gen_range(2..=5);
            let v = crate::testutil::random_basic_valuation(&mut rng, m, 7);
            let keep: Vec<usize> = (0..m).filter(|_| rng.gen_bool(0.6)).collect();
            if keep.is_empty() {
                continue;
            }
            let restricted = v.restrict(&keep, 16).unwrap();
            for mask in all_masks(keep.len()) {
                let local = ItemSet::from_mask(mask, keep.len()).unwrap();
                let embedded =
                    ItemSet::new(local.members().iter().map(|&i| keep[i]).collect(), m).unwrap();
                assert_eq!(
                    restricted.value(&local).unwrap(),
                    v.value(&embedded).unwrap()
                );
            }
        }
    }

    #[test]
    fn distribution_validation_catches_bad_sums() {
        let v1 = Valuation::additive(vec![1]).unwrap();
        let v2 = Valuation::additive(vec![2]).unwrap();
        let err = TypeDistribution::new(vec![
            (v1.clone(), rational(1, 2)),
            (v2.clone(), rational(1, 3)),
        ])
        .unwrap_err();
        assert!(err.to_string().contains("5/6"), "got: {err}");
        assert!(TypeDistribution::new(vec![
            (v1.clone(), rational(1, 2)),
            (v2, rational(1, 2)),
        ])
        .is_ok());
        // Identical types are redundant but legal.
        assert!(TypeDistribution::new(vec![
            (v1.clone(), rational(1, 2)),
            (v1.clone(), rational(1, 2)),
        ])
        .is_ok());
        assert!(TypeDistribution::new(vec![(v1, rational(0, 1))]).is_err());
    }

    #[test]
    fn value_queries_are_deterministic() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..20 {
            let m = rng.gen_range(1..=5);
            let v = crate::testutil::random_basic_valuation(&mut rng, m, 9);
            assert_eq!(v.value(&ItemSet::empty(m)).unwrap(), 0);
            for mask in all_masks(m) {
                let s = ItemSet::from_mask(mask, m).unwrap();
                assert_eq!(v.value(&s).unwrap(), v.value(&s).unwrap());
            }
        }
    }
}
