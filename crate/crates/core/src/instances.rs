//! Instance generators: the perturbable bipartite-matching family, its
//! SAT-encoded perturbations, lexicographic subset indexing, and the
//! four-item table showing item truncation can break submodularity.

use crate::error::{Error, Result};
use crate::items::ItemSet;
use crate::valuation::{Cnf, Valuation};

/// A base valuation together with the combinatorics of its pointwise
/// perturbations: `x` sets of size `y = m/2` may each have their value
/// lowered by one without leaving the valuation class.
#[derive(Clone, Debug)]
pub struct PerturbableFamily {
    pub base: Valuation,
    pub m: usize,
    /// Number of perturbing sets, `C(m, m/2)`.
    pub x: u64,
    /// Full-set base value, `m/2`.
    pub y: usize,
}

/// The complete-bipartite family: `m` items matched against `m/2` right
/// nodes with unit weights, so `base(S) = min(|S|, m/2)`.
pub fn boxs_family(m: usize) -> Result<PerturbableFamily> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::invalid(format!(
            "family needs an even positive item count, got {m}"
        )));
    }
    if m > 62 {
        return Err(Error::invalid(format!("item count {m} above 62")));
    }
    let right = m / 2;
    let weights = vec![vec![1u64; right]; m];
    let base = Valuation::oxs(weights)?;
    let x = binomial(m, right)
        .try_into()
        .map_err(|_| Error::Overflow("perturbing-set count"))?;
    Ok(PerturbableFamily {
        base,
        m,
        x,
        y: right,
    })
}

/// Perturbation at `s` in graph form: every item of `s` loses its edge to
/// the first right node. Extensionally this equals lowering the base value
/// by one exactly at `s`.
pub fn perturb(fam: &PerturbableFamily, s: &ItemSet) -> Result<Valuation> {
    s.expect_ground(fam.m)?;
    if s.len() != fam.y {
        return Err(Error::invalid(format!(
            "perturbing sets have {} items, got {}",
            fam.y,
            s.len()
        )));
    }
    let Valuation::Oxs { weights } = &fam.base else {
        return Err(Error::invalid("family base is not in graph form"));
    };
    let mut weights = weights.clone();
    for &i in s.members() {
        weights[i][0] = 0;
    }
    Valuation::oxs(weights)
}

/// Pointwise form of the same perturbation: the base table with the value at
/// `s` lowered by one. Reference implementation for cross-checks.
pub fn perturb_pointwise(fam: &PerturbableFamily, s: &ItemSet, cap: usize) -> Result<Valuation> {
    s.expect_ground(fam.m)?;
    if s.len() != fam.y {
        return Err(Error::invalid(format!(
            "perturbing sets have {} items, got {}",
            fam.y,
            s.len()
        )));
    }
    let mut table = fam.base.value_table(cap)?;
    let at = s.mask() as usize;
    table[at] = table[at]
        .checked_sub(1)
        .ok_or_else(|| Error::invalid("perturbation drives a zero value negative"))?;
    Valuation::explicit_table(table)
}

/// SAT-gadget valuation: size-`m/2` sets whose lexicographic rank encodes a
/// satisfying assignment of `cnf` are perturbed; everything else follows the
/// base. Requires `2^nvars` to fit inside the perturbing-set count.
pub fn sat_perturbed_valuation(
    fam: &PerturbableFamily,
    cnf: Cnf,
    nvars: usize,
) -> Result<Valuation> {
    if nvars >= 64 || (1u64 << nvars) > fam.x {
        return Err(Error::invalid(format!(
            "2^{nvars} assignments exceed the {} perturbing sets",
            fam.x
        )));
    }
    Valuation::sat_perturbed(fam.base.clone(), cnf, nvars)
}

/// Rank of `s` (1-based) among the size-`m/2` subsets of `[m]` in
/// lexicographic member-list order.
pub fn subset_rank(m: usize, s: &ItemSet) -> Result<u64> {
    s.expect_ground(m)?;
    if s.len() * 2 != m {
        return Err(Error::invalid(format!(
            "ranking is defined for {}-item sets, got {}",
            m / 2,
            s.len()
        )));
    }
    subset_rank_members(m, s.members())
}

/// Inverse of [`subset_rank`]: the `rank`-th size-`m/2` subset of `[m]`.
pub fn subset_unrank(m: usize, rank: u64) -> Result<ItemSet> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::invalid(format!("even ground size required, got {m}")));
    }
    let t = m / 2;
    let total = binomial(m, t);
    if rank == 0 || u128::from(rank) > total {
        return Err(Error::invalid(format!(
            "rank {rank} outside 1..={total} for {t}-item subsets of [{m}]"
        )));
    }
    let mut remaining = u128::from(rank) - 1;
    let mut members = Vec::with_capacity(t);
    let mut next = 0usize;
    for j in 0..t {
        let mut c = next;
        loop {
            let completions = binomial(m - 1 - c, t - 1 - j);
            if remaining < completions {
                members.push(c);
                next = c + 1;
                break;
            }
            remaining -= completions;
            c += 1;
        }
    }
    ItemSet::new(members, m)
}

/// Rank among same-size subsets; shared with the SAT-gadget value path.
pub(crate) fn subset_rank_members(m: usize, members: &[usize]) -> Result<u64> {
    let t = members.len();
    let mut rank = 1u128;
    let mut prev = 0usize;
    for (j, &a) in members.iter().enumerate() {
        for c in prev..a {
            rank += binomial(m - 1 - c, t - 1 - j);
        }
        prev = a + 1;
    }
    rank.try_into().map_err(|_| Error::Overflow("subset rank"))
}

/// `C(n, k)` exactly; zero when `k > n`. Grounds are capped at 62 items so
/// this never overflows.
pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The four-item valuation (items a,b,c,d = 0..4) that is monotone and
/// submodular yet loses submodularity under two-item truncation: singletons
/// are worth 5, pairs 9 except {c,d} = 10, triples 10 except {a,b,c} = 9,
/// the full set 10.
pub fn appendix_counterexample() -> Valuation {
    let mut table = vec![0u64; 16];
    for mask in 1u64..16 {
        table[mask as usize] = match mask.count_ones() {
            1 => 5,
            2 => {
                if mask == 0b1100 {
                    10
                } else {
                    9
                }
            }
            3 => {
                if mask == 0b0111 {
                    9
                } else {
                    10
                }
            }
            _ => 10,
        };
    }
    Valuation::explicit_table(table).expect("fixed table is well-formed")
}
