//! The reduction pipeline from difference optimization to gap
//! approximation: instance construction by item or value truncation,
//! solution recovery, balancedness measurement, compatibility witnesses,
//! and the parameter formulas tying approximation quality to instance size.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::items::{all_masks, check_enum_cap, ItemSet};
use crate::matching::{attains_max, max_weight_matching, BipartiteWeights, Matching};
use crate::solvers::brute_force_odp;
use crate::transforms::{item_truncate, scaled_disjoint_union, value_truncate};
use crate::valuation::Valuation;
use crate::Rational;

/// Which truncation produced an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    ItemTruncation,
    ValueTruncation,
}

impl std::fmt::Display for Construction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Construction::ItemTruncation => write!(f, "item truncation"),
            Construction::ValueTruncation => write!(f, "value truncation"),
        }
    }
}

/// How an instance was built: the source pair and the truncation parameter
/// (the item budget for item truncation, the value cap otherwise).
#[derive(Clone, Debug)]
pub struct Provenance {
    pub v: Valuation,
    pub w: Valuation,
    pub construction: Construction,
    pub truncation: u64,
}

/// A gap-approximation instance: valuations `v_1..v_k` on a common ground.
#[derive(Clone, Debug)]
pub struct SadpInstance {
    valuations: Vec<Valuation>,
    provenance: Option<Provenance>,
}

impl SadpInstance {
    /// Hand-built instance without provenance; recovery entry points will
    /// refuse it, the solvers and checks accept it.
    pub fn new(valuations: Vec<Valuation>) -> Result<Self> {
        if valuations.len() < 2 {
            return Err(Error::invalid("an instance needs at least two types"));
        }
        let ground = valuations[0].ground_size();
        for v in &valuations[1..] {
            if v.ground_size() != ground {
                return Err(Error::GroundMismatch {
                    expected: ground,
                    got: v.ground_size(),
                });
            }
        }
        Ok(SadpInstance {
            valuations,
            provenance: None,
        })
    }

    pub fn with_provenance(valuations: Vec<Valuation>, provenance: Provenance) -> Result<Self> {
        let mut inst = SadpInstance::new(valuations)?;
        inst.provenance = Some(provenance);
        Ok(inst)
    }

    pub fn k(&self) -> usize {
        self.valuations.len()
    }

    pub fn ground_size(&self) -> usize {
        self.valuations[0].ground_size()
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.valuations
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    fn expect_construction(&self, expected: Construction) -> Result<&Provenance> {
        match &self.provenance {
            Some(p) if p.construction == expected => Ok(p),
            Some(p) => Err(Error::WrongConstruction {
                expected: expected.to_string(),
                got: p.construction.to_string(),
            }),
            None => Err(Error::WrongConstruction {
                expected: expected.to_string(),
                got: "no provenance".into(),
            }),
        }
    }
}

/// Builds the item-truncated instance: type `ell` is the scaled disjoint
/// union of `(v, w)` with parameter `k`, item-truncated at the block size.
/// The source pair should be normalized and monotone; trivial items weaken
/// the witness construction but not recovery, so they are not rejected here.
pub fn build_it(v: &Valuation, w: &Valuation, k: usize) -> Result<SadpInstance> {
    let m = v.ground_size();
    let mut valuations = Vec::with_capacity(k);
    for ell in 1..=k {
        let union = scaled_disjoint_union(v, w, k, ell)?;
        valuations.push(item_truncate(union, m)?);
    }
    SadpInstance::with_provenance(
        valuations,
        Provenance {
            v: v.clone(),
            w: w.clone(),
            construction: Construction::ItemTruncation,
            truncation: m as u64,
        },
    )
}

/// Builds the value-truncated instance: the same unions capped at
/// `2k * v(full)`.
pub fn build_vt(v: &Valuation, w: &Valuation, k: usize, cap: usize) -> Result<SadpInstance> {
    let m = v.ground_size();
    let full_value = v.value_with_cap(&ItemSet::full(m), cap)?;
    let x = (2 * k as u64)
        .checked_mul(full_value)
        .ok_or(Error::Overflow("value cap"))?;
    let mut valuations = Vec::with_capacity(k);
    for ell in 1..=k {
        let union = scaled_disjoint_union(v, w, k, ell)?;
        valuations.push(value_truncate(union, x)?);
    }
    SadpInstance::with_provenance(
        valuations,
        Provenance {
            v: v.clone(),
            w: w.clone(),
            construction: Construction::ValueTruncation,
            truncation: x,
        },
    )
}

/// Recovers a difference-optimization solution from a solution `s` of an
/// item-truncated instance. For each type the set is refined item by item —
/// an item goes whenever dropping it preserves the type's value and more
/// than the block size remains — and the type's own block slice competes on
/// `v - w`. Falls back to the empty set when every slice is negative.
pub fn recover_from_it(s: &ItemSet, inst: &SadpInstance, cap: usize) -> Result<(ItemSet, u64)> {
    let prov = inst.expect_construction(Construction::ItemTruncation)?;
    s.expect_ground(inst.ground_size())?;
    let m = prov.v.ground_size();
    let k = inst.k();

    let mut best: Option<(i128, ItemSet)> = None;
    for ell in 1..k {
        let v_ell = &inst.valuations()[ell - 1];
        let mut current = s.clone();
        let target = v_ell.value_with_cap(&current, cap)?;
        for i in s.members() {
            if current.len() <= m {
                break;
            }
            let shrunk = current.without(*i);
            if v_ell.value_with_cap(&shrunk, cap)? == target {
                current = shrunk;
            }
        }
        let slice = current.slice((ell - 1) * m, ell * m);
        let gain = prov.v.value_with_cap(&slice, cap)? as i128
            - prov.w.value_with_cap(&slice, cap)? as i128;
        if best.as_ref().map_or(true, |(b, _)| gain > *b) {
            best = Some((gain, slice));
        }
    }
    let (gain, slice) = best.expect("k >= 2 leaves at least one candidate");
    if gain < 0 {
        return Ok((ItemSet::empty(m), 0));
    }
    Ok((slice, gain as u64))
}

/// Recovery from a value-truncated instance: no refinement, every type's
/// block slice competes directly on `v - w`, empty set when all negative.
pub fn recover_from_vt(s: &ItemSet, inst: &SadpInstance, cap: usize) -> Result<(ItemSet, u64)> {
    let prov = inst.expect_construction(Construction::ValueTruncation)?;
    s.expect_ground(inst.ground_size())?;
    let m = prov.v.ground_size();
    let k = inst.k();

    let mut best: Option<(i128, ItemSet)> = None;
    for ell in 1..k {
        let slice = s.slice((ell - 1) * m, ell * m);
        let gain = prov.v.value_with_cap(&slice, cap)? as i128
            - prov.w.value_with_cap(&slice, cap)? as i128;
        if best.as_ref().map_or(true, |(b, _)| gain > *b) {
            best = Some((gain, slice));
        }
    }
    let (gain, slice) = best.expect("k >= 2 leaves at least one candidate");
    if gain < 0 {
        return Ok((ItemSet::empty(m), 0));
    }
    Ok((slice, gain as u64))
}

/// Balancedness and gap survey of an instance.
#[derive(Clone, Debug)]
pub struct ReductionReport {
    /// `v_k(full) / min gap`; at least 1 on instances from the builders.
    pub d: Rational,
    /// `max_T (v_l(T) - v_{l+1}(T))` for `l = 1..k-1`, by exhaustive search.
    pub gaps: Vec<u64>,
    /// `v_l(full ground)` per type.
    pub full_values: Vec<u64>,
}

/// Measures how large the last type's total value is against the smallest
/// adjacent gap. Degenerate instances (some gap zero, i.e. two adjacent
/// types with identical maxima everywhere) are rejected.
pub fn balancedness(inst: &SadpInstance, cap: usize) -> Result<ReductionReport> {
    let n = inst.ground_size();
    check_enum_cap(n, cap)?;
    let tables: Vec<Vec<u64>> = inst
        .valuations()
        .iter()
        .map(|v| v.value_table(cap))
        .collect::<Result<_>>()?;
    let k = inst.k();
    let full = (1usize << n) - 1;

    let mut gaps = Vec::with_capacity(k - 1);
    for ell in 0..k - 1 {
        let mut gap = 0i128;
        for mask in all_masks(n) {
            let g = tables[ell][mask as usize] as i128 - tables[ell + 1][mask as usize] as i128;
            gap = gap.max(g);
        }
        if gap == 0 {
            return Err(Error::DegenerateGap { index: ell + 1 });
        }
        gaps.push(gap as u64);
    }
    let min_gap = *gaps.iter().min().expect("k >= 2 gives a gap");
    let top = tables[k - 1][full];
    Ok(ReductionReport {
        d: Rational::new(top.into(), min_gap.into()),
        gaps,
        full_values: tables.iter().map(|t| t[full]).collect(),
    })
}

/// Allocations plus strictly growing integer multipliers certifying that a
/// full-bundle deal is expressible: `Q_1 = 1` and every `Q_i <= 2^c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub allocations: Vec<ItemSet>,
    pub multipliers: Vec<BigUint>,
    pub c: u64,
    pub c1: BigUint,
}

impl CompatibilityWitness {
    pub fn new(
        allocations: Vec<ItemSet>,
        multipliers: Vec<BigUint>,
        c: u64,
        c1: BigUint,
    ) -> Result<Self> {
        if allocations.len() != multipliers.len() || allocations.is_empty() {
            return Err(Error::LengthMismatch {
                expected: allocations.len(),
                got: multipliers.len(),
            });
        }
        if !multipliers[0].is_one() {
            return Err(Error::invalid("first multiplier must be 1"));
        }
        for pair in multipliers.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::invalid("multipliers must strictly increase"));
            }
        }
        let bound = BigUint::one() << usize::try_from(c).map_err(|_| Error::Overflow("witness bound"))?;
        if let Some(q) = multipliers.iter().find(|q| **q > bound) {
            return Err(Error::invalid(format!("multiplier {q} exceeds 2^{c}")));
        }
        Ok(CompatibilityWitness {
            allocations,
            multipliers,
            c,
            c1,
        })
    }

    pub fn k(&self) -> usize {
        self.allocations.len()
    }
}

/// Builds the standard witness for the item-truncated instance of `(v, w)`:
/// the difference optimum `A*` placed in type `ell`'s own block (the last
/// block for the final type), multipliers `(c1 + 1)^(i-1)` with
/// `c1 = 2k * max(v(full), w(full))`, and the smallest `c` with
/// `2^c >= c1^k`. Sound when the pair has no trivial items and the optimal
/// difference is at least 1.
pub fn witness_for_it(v: &Valuation, w: &Valuation, k: usize, cap: usize) -> Result<CompatibilityWitness> {
    if k < 2 {
        return Err(Error::invalid("the witness needs k >= 2 types"));
    }
    let m = v.ground_size();
    let (a_star, _) = brute_force_odp(v, w, cap)?;
    let full = ItemSet::full(m);
    let top = v.value_with_cap(&full, cap)?.max(w.value_with_cap(&full, cap)?);
    let c1 = BigUint::from(2u64) * BigUint::from(k as u64) * BigUint::from(top);
    if c1.is_zero() {
        return Err(Error::invalid("both valuations vanish on the full set"));
    }

    let ground = (k - 1) * m;
    let mut allocations = Vec::with_capacity(k);
    for ell in 1..=k {
        let block = ell.min(k - 1);
        let members = a_star.members().iter().map(|&a| (block - 1) * m + a).collect();
        allocations.push(ItemSet::new(members, ground)?);
    }

    let base = &c1 + BigUint::one();
    let multipliers: Vec<BigUint> = (0..k as u32).map(|i| base.pow(i)).collect();
    let c = ceil_log2(&c1.pow(k as u32));
    CompatibilityWitness::new(allocations, multipliers, c, c1)
}

/// Smallest `c` with `2^c >= n`; zero for `n <= 1`.
fn ceil_log2(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        return 0;
    }
    (n - BigUint::one()).bits()
}

/// The first matching condition that failed: either the full-grid identity
/// matching (`window = None`) or the shifted matching on the window of types
/// `i+1..=j` against allocations `i..=j-1` (1-based, `window = (i, j)`).
#[derive(Clone, Debug)]
pub struct CompatibilityViolation {
    pub window: Option<(usize, usize)>,
    pub required: Matching,
    pub required_weight: Rational,
    pub optimal: Matching,
    pub optimal_weight: Rational,
}

/// Checks the two matching conditions on the grid `W[i][j] = Q_j * v_j(X_i)`:
/// the identity matching must attain the optimum on the full grid, and for
/// every window `i < j` the shifted matching (allocation `l` to type `l+1`)
/// must attain the optimum of the corresponding sub-grid. Ties count as
/// success. Returns the first violation, or `None` when compatible.
pub fn check_compatibility(
    valuations: &[Valuation],
    multipliers: &[BigUint],
    allocations: &[ItemSet],
    cap: usize,
) -> Result<Option<CompatibilityViolation>> {
    let k = valuations.len();
    if multipliers.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: multipliers.len(),
        });
    }
    if allocations.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: allocations.len(),
        });
    }
    let mut grid = vec![vec![Rational::zero(); k]; k];
    for (i, x) in allocations.iter().enumerate() {
        for (j, v) in valuations.iter().enumerate() {
            let value = v.value_with_cap(x, cap)?;
            let scaled = BigInt::from(multipliers[j].clone()) * BigInt::from(value);
            grid[i][j] = Rational::from_integer(scaled);
        }
    }

    // Full grid, identity matching.
    let weights = BipartiteWeights::new(grid.clone())?;
    let identity = Matching { pairs: (0..k).map(|t| (t, t)).collect() };
    if !attains_max(&weights, &identity)? {
        let (optimal_weight, optimal) = max_weight_matching(&weights)?;
        let required_weight = identity.weight(&weights)?;
        return Ok(Some(CompatibilityViolation {
            window: None,
            required: identity,
            required_weight,
            optimal,
            optimal_weight,
        }));
    }

    // Windows: types i+1..=j against allocations i..=j-1, shifted matching.
    for i in 1..=k {
        for j in i + 1..=k {
            let rows: Vec<Vec<Rational>> = (i - 1..j - 1)
                .map(|r| (i..j).map(|c| grid[r][c].clone()).collect())
                .collect();
            let weights = BipartiteWeights::new(rows)?;
            let shifted = Matching { pairs: (0..j - i).map(|t| (t, t)).collect() };
            if !attains_max(&weights, &shifted)? {
                let (optimal_weight, optimal) = max_weight_matching(&weights)?;
                let required_weight = shifted.weight(&weights)?;
                return Ok(Some(CompatibilityViolation {
                    window: Some((i, j)),
                    required: shifted,
                    required_weight,
                    optimal,
                    optimal_weight,
                }));
            }
        }
    }
    Ok(None)
}

/// Outcome of the full witness check.
#[derive(Clone, Debug)]
pub enum WitnessCheck {
    Holds,
    /// Allocation `index` (1-based) misses the exhaustive gap maximum.
    GapNotAttained { index: usize },
    Incompatible(CompatibilityViolation),
}

impl WitnessCheck {
    pub fn holds(&self) -> bool {
        matches!(self, WitnessCheck::Holds)
    }
}

/// Full witness check against an instance: every allocation but the last
/// must attain its adjacent gap maximum (exhaustively verified), multipliers
/// must respect the `2^c` bound (enforced by the witness type), and the
/// matching conditions must hold.
pub fn check_c_compatibility(
    inst: &SadpInstance,
    witness: &CompatibilityWitness,
    cap: usize,
) -> Result<WitnessCheck> {
    let k = inst.k();
    if witness.k() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: witness.k(),
        });
    }
    let n = inst.ground_size();
    check_enum_cap(n, cap)?;
    for x in &witness.allocations {
        x.expect_ground(n)?;
    }

    let tables: Vec<Vec<u64>> = inst
        .valuations()
        .iter()
        .map(|v| v.value_table(cap))
        .collect::<Result<_>>()?;
    for ell in 1..k {
        let mut max_gap = i128::MIN;
        for mask in all_masks(n) {
            let g = tables[ell - 1][mask as usize] as i128 - tables[ell][mask as usize] as i128;
            max_gap = max_gap.max(g);
        }
        let x = &witness.allocations[ell - 1];
        let attained =
            tables[ell - 1][x.mask() as usize] as i128 - tables[ell][x.mask() as usize] as i128;
        if attained != max_gap {
            return Ok(WitnessCheck::GapNotAttained { index: ell });
        }
    }

    match check_compatibility(
        inst.valuations(),
        &witness.multipliers,
        &witness.allocations,
        cap,
    )? {
        None => Ok(WitnessCheck::Holds),
        Some(violation) => Ok(WitnessCheck::Incompatible(violation)),
    }
}

/// Approximation guarantee surviving the pipeline: `a - (1-a)d/(k-1)`,
/// clamped below at zero.
pub fn quality_formula(alpha: &Rational, d: &Rational, k: usize) -> Result<Rational> {
    if k < 2 {
        return Err(Error::invalid("quality formula needs k >= 2"));
    }
    if alpha < &Rational::zero() || alpha > &Rational::one() {
        return Err(Error::invalid("alpha must lie in [0, 1]"));
    }
    let one = Rational::one();
    let spread = Rational::from_integer(BigInt::from(k as u64 - 1));
    let value = alpha - (&one - alpha) * d / spread;
    Ok(if value.is_negative() {
        Rational::zero()
    } else {
        value
    })
}

/// Instance budget needed to push the hardness bound below `eps`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardnessBudget {
    /// Number of types, `ceil(m^(2/eps))`.
    pub k: BigUint,
    /// Ground size of the truncated instance, `(k - 1) m`.
    pub items: BigUint,
    /// Support size of the resulting distribution (one per type).
    pub support: BigUint,
    /// Best approximation still possible, `m^2 / (k - 1 + m^2)`.
    pub bound: Rational,
}

pub fn hardness_budget(m: usize, eps: &Rational) -> Result<HardnessBudget> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::invalid("budget needs an even item count m >= 2"));
    }
    if eps <= &Rational::zero() || eps >= &Rational::one() {
        return Err(Error::invalid("eps must lie strictly between 0 and 1"));
    }
    // eps = p/q in lowest terms: m^(2/eps) = (m^(2q))^(1/p), rounded up.
    let p = eps
        .numer()
        .to_biguint()
        .ok_or(Error::Overflow("eps numerator"))?;
    let q = eps
        .denom()
        .to_biguint()
        .ok_or(Error::Overflow("eps denominator"))?;
    let exp = (BigUint::from(2u32) * q)
        .try_into()
        .map_err(|_| Error::Overflow("exponent 2/eps"))?;
    let root: u32 = p.try_into().map_err(|_| Error::Overflow("root 1/eps"))?;
    let power = BigUint::from(m as u64).pow(exp);
    let mut k = power.nth_root(root);
    if k.pow(root) < power {
        k += BigUint::one();
    }
    budget_for_k(m, k)
}

/// The same budget for an explicitly chosen number of types.
pub fn hardness_budget_for_k(m: usize, k: u64) -> Result<HardnessBudget> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::invalid("budget needs an even item count m >= 2"));
    }
    if k < 2 {
        return Err(Error::invalid("budget needs k >= 2"));
    }
    budget_for_k(m, BigUint::from(k))
}

fn budget_for_k(m: usize, k: BigUint) -> Result<HardnessBudget> {
    let m_big = BigUint::from(m as u64);
    let items = (&k - BigUint::one()) * &m_big;
    let m_sq = BigInt::from(&m_big * &m_big);
    let denom = BigInt::from(&k - BigUint::one()) + &m_sq;
    let bound = Rational::new(m_sq, denom);
    Ok(HardnessBudget {
        support: k.clone(),
        k,
        items,
        bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{boxs_family, perturb};
    use crate::rational;

    fn boxs_pair_m2() -> (Valuation, Valuation) {
        let fam = boxs_family(2).unwrap();
        let w = perturb(&fam, &ItemSet::singleton(0, 2).unwrap()).unwrap();
        (fam.base, w)
    }

    /// Additive pair with no trivial items and optimal difference 1 at {0}.
    fn clean_pair_m2() -> (Valuation, Valuation) {
        (
            Valuation::additive(vec![2, 1]).unwrap(),
            Valuation::additive(vec![1, 1]).unwrap(),
        )
    }

    #[test]
    fn it_instance_shape_and_small_set_values() {
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        assert_eq!(inst.k(), 3);
        assert_eq!(inst.ground_size(), 4);
        // Sets within the truncation budget keep their union value.
        let s = ItemSet::new(vec![0, 2], 4).unwrap();
        let union = scaled_disjoint_union(&v, &w, 3, 1).unwrap();
        assert_eq!(
            inst.valuations()[0].value(&s).unwrap(),
            union.value(&s).unwrap()
        );
    }

    #[test]
    fn it_with_two_types_is_a_single_scaled_block() {
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 2).unwrap();
        assert_eq!(inst.ground_size(), 2);
        // Single copy, coefficient k + 1 = 3, truncation inactive on m items.
        for mask in all_masks(2) {
            let s = ItemSet::from_mask(mask, 2).unwrap();
            assert_eq!(inst.valuations()[0].value(&s).unwrap(), 3 * v.value(&s).unwrap());
            assert_eq!(inst.valuations()[1].value(&s).unwrap(), 3 * w.value(&s).unwrap());
        }
    }

    #[test]
    fn vt_cap_is_twice_k_times_full_value() {
        let v = Valuation::additive(vec![1, 1]).unwrap();
        let inst = build_vt(&v, &v, 2, 16).unwrap();
        assert_eq!(inst.provenance().unwrap().truncation, 8);
        // Full block value 3*2 = 6 stays below the cap of 8.
        assert_eq!(
            inst.valuations()[0].value(&ItemSet::full(2)).unwrap(),
            6
        );
    }

    #[test]
    fn vt_cap_becomes_active_for_large_k() {
        let (v, w) = clean_pair_m2();
        let k = 3;
        let inst = build_vt(&v, &w, k, 16).unwrap();
        let cap = 2 * k as u64 * v.value(&ItemSet::full(2)).unwrap();
        let full = ItemSet::full(inst.ground_size());
        let top = inst.valuations()[k - 1].value(&full).unwrap();
        assert!(top <= cap, "top {top} above cap {cap}");
    }

    #[test]
    fn recovery_is_identity_on_planted_optima() {
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        // A* = {0} planted in copy 2 (items 2..4).
        let planted = ItemSet::new(vec![2], 4).unwrap();
        let (a, achieved) = recover_from_it(&planted, &inst, 16).unwrap();
        assert_eq!(a.members(), &[0]);
        assert_eq!(achieved, 1);
    }

    #[test]
    fn recovery_of_empty_set_is_empty() {
        let (v, w) = clean_pair_m2();
        let it = build_it(&v, &w, 3).unwrap();
        let (a, achieved) = recover_from_it(&ItemSet::empty(4), &it, 16).unwrap();
        assert!(a.is_empty());
        assert_eq!(achieved, 0);
        let vt = build_vt(&v, &w, 3, 16).unwrap();
        let (a, achieved) = recover_from_vt(&ItemSet::empty(4), &vt, 16).unwrap();
        assert!(a.is_empty());
        assert_eq!(achieved, 0);
    }

    #[test]
    fn recovery_rejects_wrong_construction() {
        let (v, w) = clean_pair_m2();
        let it = build_it(&v, &w, 2).unwrap();
        let vt = build_vt(&v, &w, 2, 16).unwrap();
        let s = ItemSet::empty(2);
        assert!(matches!(
            recover_from_vt(&s, &it, 16),
            Err(Error::WrongConstruction { .. })
        ));
        assert!(matches!(
            recover_from_it(&s, &vt, 16),
            Err(Error::WrongConstruction { .. })
        ));
        let bare = SadpInstance::new(it.valuations().to_vec()).unwrap();
        assert!(recover_from_it(&s, &bare, 16).is_err());
    }

    #[test]
    fn solved_instance_recovers_the_true_optimum() {
        // The perturbed matching pair: optimum 1, attained at {0}.
        let (v, w) = boxs_pair_m2();
        for k in [2usize, 3] {
            let it = build_it(&v, &w, k).unwrap();
            let (s, ratio) = crate::solvers::sadp_opt(&it, 16).unwrap();
            assert_eq!(ratio, rational(1, 1));
            let (_, achieved) = recover_from_it(&s, &it, 16).unwrap();
            assert_eq!(achieved, 1, "IT k={k}");
            let vt = build_vt(&v, &w, k, 16).unwrap();
            let (s, ratio) = crate::solvers::sadp_opt(&vt, 16).unwrap();
            assert_eq!(ratio, rational(1, 1));
            let (_, achieved) = recover_from_vt(&s, &vt, 16).unwrap();
            assert_eq!(achieved, 1, "VT k={k}");
        }
    }

    #[test]
    fn balancedness_matches_hand_computation() {
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        let report = balancedness(&inst, 16).unwrap();
        // Gaps (k+l)*OPT = 4, 5; v_3(full) = best two of the w-blocks = 10.
        assert_eq!(report.gaps, vec![4, 5]);
        assert_eq!(report.full_values[2], 10);
        assert_eq!(report.d, rational(10, 4));
    }

    #[test]
    fn balance_bounds_hold_on_perturbed_pairs() {
        let (v, w) = boxs_pair_m2();
        let m = 2u64;
        for k in [2usize, 3] {
            let it = build_it(&v, &w, k).unwrap();
            let d = balancedness(&it, 16).unwrap().d;
            let w_full = w.value(&ItemSet::full(2)).unwrap();
            assert!(d <= rational((2 * m * w_full) as i64, 1), "IT k={k} d={d}");
            let vt = build_vt(&v, &w, k, 16).unwrap();
            let d = balancedness(&vt, 16).unwrap().d;
            let v_full = v.value(&ItemSet::full(2)).unwrap();
            assert!(d <= rational((2 * v_full) as i64, 1), "VT k={k} d={d}");
        }
    }

    #[test]
    fn degenerate_gap_is_rejected() {
        let v = Valuation::additive(vec![1]).unwrap();
        let inst = SadpInstance::new(vec![v.clone(), v]).unwrap();
        assert!(matches!(
            balancedness(&inst, 16),
            Err(Error::DegenerateGap { index: 1 })
        ));
    }

    #[test]
    fn unit_gap_balancedness_is_the_top_value() {
        let v1 = Valuation::additive(vec![2]).unwrap();
        let v2 = Valuation::additive(vec![1]).unwrap();
        let inst = SadpInstance::new(vec![v1, v2]).unwrap();
        let report = balancedness(&inst, 16).unwrap();
        assert_eq!(report.gaps, vec![1]);
        assert_eq!(report.d, rational(1, 1));
    }

    #[test]
    fn witness_multipliers_follow_the_geometric_rule() {
        let (v, w) = boxs_pair_m2();
        let witness = witness_for_it(&v, &w, 3, 16).unwrap();
        assert_eq!(witness.c1, BigUint::from(6u32));
        let expected: Vec<BigUint> =
            [1u32, 7, 49].iter().map(|&q| BigUint::from(q)).collect();
        assert_eq!(witness.multipliers, expected);
        // 6^3 = 216 needs 8 bits.
        assert_eq!(witness.c, 8);
        assert!(witness.multipliers[0].is_one());
    }

    #[test]
    fn witness_holds_on_a_pair_without_trivial_items() {
        let (v, w) = clean_pair_m2();
        for k in [2usize, 3] {
            let inst = build_it(&v, &w, k).unwrap();
            let witness = witness_for_it(&v, &w, k, 16).unwrap();
            let check = check_c_compatibility(&inst, &witness, 16).unwrap();
            assert!(check.holds(), "k={k}: {check:?}");
        }
    }

    #[test]
    fn trivial_item_in_w_defeats_the_witness_construction() {
        // w({0}) = 0 makes the off-diagonal grid entries collapse, so the
        // identity matching is beaten and the check reports the violation.
        let (v, w) = boxs_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        let witness = witness_for_it(&v, &w, 3, 16).unwrap();
        let check = check_c_compatibility(&inst, &witness, 16).unwrap();
        assert!(!check.holds());
        match check {
            WitnessCheck::Incompatible(violation) => {
                assert_eq!(violation.window, None);
                assert_eq!(violation.required_weight, rational(39, 1));
                assert_eq!(violation.optimal_weight, rational(40, 1));
            }
            other => panic!("expected a matching violation, got {other:?}"),
        }
    }

    #[test]
    fn tampered_witness_fails_the_gap_check() {
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        let mut witness = witness_for_it(&v, &w, 3, 16).unwrap();
        witness.allocations[0] = ItemSet::empty(4);
        let check = check_c_compatibility(&inst, &witness, 16).unwrap();
        assert!(matches!(check, WitnessCheck::GapNotAttained { index: 1 }));
    }

    #[test]
    fn witness_constructor_enforces_the_bound() {
        let allocations = vec![ItemSet::empty(2), ItemSet::empty(2)];
        let qs = vec![BigUint::from(1u32), BigUint::from(9u32)];
        // 9 > 2^3.
        assert!(CompatibilityWitness::new(allocations.clone(), qs.clone(), 3, BigUint::from(8u32)).is_err());
        assert!(CompatibilityWitness::new(allocations.clone(), qs, 4, BigUint::from(8u32)).is_ok());
        let not_one = vec![BigUint::from(2u32), BigUint::from(3u32)];
        assert!(CompatibilityWitness::new(allocations, not_one, 4, BigUint::from(8u32)).is_err());
    }

    #[test]
    fn unscaled_multipliers_fail_on_a_growing_instance() {
        // With all multipliers 1 the last column loses its weight advantage
        // and a cross matching beats the identity.
        let (v, w) = clean_pair_m2();
        let inst = build_it(&v, &w, 3).unwrap();
        let witness = witness_for_it(&v, &w, 3, 16).unwrap();
        let ones = vec![BigUint::one(); 3];
        let violation = check_compatibility(
            inst.valuations(),
            &ones,
            &witness.allocations,
            16,
        )
        .unwrap();
        assert!(violation.is_some());
    }

    #[test]
    fn quality_formula_frozen_points() {
        assert_eq!(
            quality_formula(&rational(1, 2), &rational(4, 1), 9).unwrap(),
            rational(1, 4)
        );
        assert_eq!(
            quality_formula(&rational(1, 1), &rational(100, 1), 5).unwrap(),
            rational(1, 1)
        );
        // Threshold alpha = d/(d + k - 1): exactly zero, below clamps to zero.
        let d = rational(4, 1);
        let threshold = rational(4, 12);
        assert_eq!(quality_formula(&threshold, &d, 9).unwrap(), rational(0, 1));
        assert_eq!(
            quality_formula(&rational(1, 4), &d, 9).unwrap(),
            rational(0, 1)
        );
        assert!(quality_formula(&rational(3, 2), &d, 9).is_err());
        assert!(quality_formula(&rational(1, 2), &d, 1).is_err());
    }

    #[test]
    fn quality_formula_is_monotone() {
        let d = rational(3, 1);
        let mut last = rational(-1, 1);
        for num in 0..=8 {
            let alpha = rational(num, 8);
            let q = quality_formula(&alpha, &d, 5).unwrap();
            assert!(q >= last);
            last = q;
        }
        let alpha = rational(3, 4);
        let mut last = rational(-1, 1);
        for k in 2..10 {
            let q = quality_formula(&alpha, &d, k).unwrap();
            assert!(q >= last);
            last = q;
        }
        let loose = quality_formula(&alpha, &rational(2, 1), 5).unwrap();
        let tight = quality_formula(&alpha, &rational(5, 1), 5).unwrap();
        assert!(loose >= tight);
    }

    #[test]
    fn hardness_budget_frozen_points() {
        let b = hardness_budget(4, &rational(1, 2)).unwrap();
        assert_eq!(b.k, BigUint::from(256u32));
        assert_eq!(b.items, BigUint::from(1020u32));
        assert_eq!(b.support, BigUint::from(256u32));
        let direct = hardness_budget_for_k(4, 17).unwrap();
        assert_eq!(direct.bound, rational(1, 2));
        assert!(hardness_budget(4, &rational(3, 2)).is_err());
        assert!(hardness_budget(3, &rational(1, 2)).is_err());
    }

    #[test]
    fn hardness_bound_shrinks_with_k() {
        let mut last = rational(2, 1);
        for k in [2u64, 4, 16, 64, 1024] {
            let bound = hardness_budget_for_k(4, k).unwrap().bound;
            assert!(bound < last);
            last = bound;
        }
    }

    #[test]
    fn rounded_root_budget_is_exact_on_non_powers() {
        // eps = 2/3: k = ceil(6^3) = 216 for m = 6; eps = 3/5 exercises a
        // fractional root: k = ceil(4^(10/3)) = ceil(101.59) = 102.
        let b = hardness_budget(6, &rational(2, 3)).unwrap();
        assert_eq!(b.k, BigUint::from(216u32));
        let b = hardness_budget(4, &rational(3, 5)).unwrap();
        assert_eq!(b.k, BigUint::from(102u32));
    }
}
