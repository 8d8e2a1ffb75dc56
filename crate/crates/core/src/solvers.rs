//! Exact desk-scale solvers: exhaustive difference optimization, gap-ratio
//! evaluation of candidate sets, LP-optimal lottery menus for explicit type
//! distributions, the full-bundle baseline menu, and menu auditing.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::items::{all_masks, check_enum_cap, lex_less_mask, ItemSet};
use crate::reduction::SadpInstance;
use crate::simplex::{maximize, Constraint, LpOutcome, Relation};
use crate::valuation::{TypeDistribution, Valuation};
use crate::Rational;

fn rat(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// Exhaustive maximizer of `v(S) - w(S)`. The empty set is always a
/// candidate, so the value is never negative; ties break toward the
/// lexicographically smallest set.
pub fn brute_force_odp(v: &Valuation, w: &Valuation, cap: usize) -> Result<(ItemSet, u64)> {
    let m = v.ground_size();
    if w.ground_size() != m {
        return Err(Error::GroundMismatch {
            expected: m,
            got: w.ground_size(),
        });
    }
    check_enum_cap(m, cap)?;
    let v_table = v.value_table(cap)?;
    let w_table = w.value_table(cap)?;
    let mut best = 0i128;
    let mut best_mask = 0u64;
    for mask in all_masks(m) {
        let diff = v_table[mask as usize] as i128 - w_table[mask as usize] as i128;
        if diff > best || (diff == best && lex_less_mask(mask, best_mask)) {
            best = diff;
            best_mask = mask;
        }
    }
    Ok((ItemSet::from_mask(best_mask, m)?, best as u64))
}

/// How a candidate solution compares to the exhaustive optimum.
#[derive(Clone, Debug)]
pub struct ApproxReport {
    pub achieved: Rational,
    pub optimum: Rational,
    /// `achieved / optimum`; absent when the optimum is zero.
    pub ratio: Option<Rational>,
    pub witness: ItemSet,
}

/// Scores `candidate` against the exhaustive difference optimum.
pub fn odp_report(
    v: &Valuation,
    w: &Valuation,
    candidate: &ItemSet,
    cap: usize,
) -> Result<ApproxReport> {
    let (witness, optimum) = brute_force_odp(v, w, cap)?;
    let achieved = BigInt::from(v.value_with_cap(candidate, cap)?)
        - BigInt::from(w.value_with_cap(candidate, cap)?);
    let achieved = Rational::from_integer(achieved);
    let optimum = rat(optimum);
    let ratio = if optimum.is_zero() {
        None
    } else {
        Some(&achieved / &optimum)
    };
    Ok(ApproxReport {
        achieved,
        optimum,
        ratio,
        witness,
    })
}

/// Per-gap scores of a candidate set on an instance.
#[derive(Clone, Debug)]
pub struct SadpEvaluation {
    /// `(v_j(S) - v_{j+1}(S)) / max_T (v_j(T) - v_{j+1}(T))` for `j=1..k-1`.
    pub ratios: Vec<Rational>,
    /// 1-based index of the best ratio (smallest on ties).
    pub best_index: usize,
    pub best_ratio: Rational,
}

/// Scores `s` against every adjacent gap, with exhaustively computed
/// denominators. A zero gap (two adjacent types whose difference never
/// leaves zero) makes the ratio meaningless and is rejected.
pub fn sadp_eval(inst: &SadpInstance, s: &ItemSet, cap: usize) -> Result<SadpEvaluation> {
    let n = inst.ground_size();
    s.expect_ground(n)?;
    check_enum_cap(n, cap)?;
    let tables = instance_tables(inst, cap)?;
    let gaps = exhaustive_gaps(&tables, n)?;
    let ratios = ratios_at(&tables, &gaps, s.mask());
    let (best_index, best_ratio) = best_of(&ratios);
    Ok(SadpEvaluation {
        ratios,
        best_index,
        best_ratio,
    })
}

/// Exhaustive best candidate: the set with the largest best-gap ratio,
/// lexicographically smallest on ties.
pub fn sadp_opt(inst: &SadpInstance, cap: usize) -> Result<(ItemSet, Rational)> {
    let n = inst.ground_size();
    check_enum_cap(n, cap)?;
    let tables = instance_tables(inst, cap)?;
    let gaps = exhaustive_gaps(&tables, n)?;
    let mut best_mask = 0u64;
    let mut best: Option<Rational> = None;
    for mask in all_masks(n) {
        let ratios = ratios_at(&tables, &gaps, mask);
        let (_, ratio) = best_of(&ratios);
        let better = match &best {
            None => true,
            Some(b) => ratio > *b || (ratio == *b && lex_less_mask(mask, best_mask)),
        };
        if better {
            best = Some(ratio);
            best_mask = mask;
        }
    }
    Ok((
        ItemSet::from_mask(best_mask, n)?,
        best.expect("ground enumeration is never empty"),
    ))
}

fn instance_tables(inst: &SadpInstance, cap: usize) -> Result<Vec<Vec<u64>>> {
    inst.valuations()
        .iter()
        .map(|v| v.value_table(cap))
        .collect()
}

fn exhaustive_gaps(tables: &[Vec<u64>], n: usize) -> Result<Vec<i128>> {
    let mut gaps = Vec::with_capacity(tables.len() - 1);
    for j in 0..tables.len() - 1 {
        let mut gap = 0i128;
        for mask in all_masks(n) {
            gap = gap.max(tables[j][mask as usize] as i128 - tables[j + 1][mask as usize] as i128);
        }
        if gap == 0 {
            return Err(Error::DegenerateGap { index: j + 1 });
        }
        gaps.push(gap);
    }
    Ok(gaps)
}

fn ratios_at(tables: &[Vec<u64>], gaps: &[i128], mask: u64) -> Vec<Rational> {
    gaps.iter()
        .enumerate()
        .map(|(j, gap)| {
            let num =
                tables[j][mask as usize] as i128 - tables[j + 1][mask as usize] as i128;
            Rational::new(BigInt::from(num), BigInt::from(*gap))
        })
        .collect()
}

fn best_of(ratios: &[Rational]) -> (usize, Rational) {
    let mut best_index = 1;
    let mut best = ratios[0].clone();
    for (j, r) in ratios.iter().enumerate().skip(1) {
        if *r > best {
            best = r.clone();
            best_index = j + 1;
        }
    }
    (best_index, best)
}

/// One menu line: a lottery over sets and a price. The null option (empty
/// set, price zero) is always implicitly available to every type.
#[derive(Clone, Debug, PartialEq)]
pub struct MenuEntry {
    pub lottery: Vec<(ItemSet, Rational)>,
    pub price: Rational,
}

/// A menu assigns one entry to each type of a distribution, in order.
#[derive(Clone, Debug, PartialEq)]
pub struct Menu {
    ground_size: usize,
    entries: Vec<MenuEntry>,
}

impl Menu {
    pub fn new(ground_size: usize, entries: Vec<MenuEntry>) -> Result<Self> {
        for (t, entry) in entries.iter().enumerate() {
            if entry.lottery.is_empty() {
                return Err(Error::invalid(format!("entry {t} has an empty lottery")));
            }
            let mut total = Rational::zero();
            for (set, p) in &entry.lottery {
                set.expect_ground(ground_size)?;
                if p.is_negative() {
                    return Err(Error::invalid(format!(
                        "entry {t} has a negative probability"
                    )));
                }
                total += p;
            }
            if !total.is_one() {
                return Err(Error::invalid(format!(
                    "entry {t} probabilities sum to {total}"
                )));
            }
            if entry.price.is_negative() {
                return Err(Error::invalid(format!("entry {t} has a negative price")));
            }
        }
        Ok(Menu {
            ground_size,
            entries,
        })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn entries(&self) -> &[MenuEntry] {
        &self.entries
    }

    /// Merges duplicate lottery sets, drops zero probabilities, and sorts
    /// each lottery; the stable form used for serialization.
    pub fn canonical(mut self) -> Self {
        for entry in &mut self.entries {
            let mut merged: Vec<(ItemSet, Rational)> = Vec::new();
            entry.lottery.sort_by(|a, b| a.0.cmp(&b.0));
            for (set, p) in entry.lottery.drain(..) {
                match merged.last_mut() {
                    Some((last, q)) if *last == set => *q += p,
                    _ => merged.push((set, p)),
                }
            }
            merged.retain(|(_, p)| !p.is_zero());
            entry.lottery = merged;
        }
        self
    }
}

/// The `v_t(S)`-expectation of type `t` under an entry's lottery.
fn expected_value(table: &[u64], entry: &MenuEntry) -> Rational {
    entry
        .lottery
        .iter()
        .map(|(set, p)| p * rat(table[set.mask() as usize]))
        .sum()
}

/// LP-optimal lottery menu: maximizes expected revenue over per-type
/// lotteries (supported on all subsets) and prices, subject to truthfulness
/// between every ordered type pair and individual rationality against the
/// null option. Exact rational optimum; prices are kept non-negative, which
/// never lowers the optimum (a negative-priced entry could be replaced by
/// the favorite non-negative option without breaking truthfulness).
pub fn lp_optimal_mdmdp(d: &TypeDistribution, cap: usize) -> Result<(Menu, Rational)> {
    let m = d.ground_size();
    check_enum_cap(m, cap)?;
    let n = 1usize << m;
    let k = d.len();
    let tables: Vec<Vec<u64>> = d
        .entries()
        .iter()
        .map(|(v, _)| v.value_table(cap))
        .collect::<Result<_>>()?;

    // Columns: lottery weights type-major, then the k prices.
    let total = k * n + k;
    let price_col = |t: usize| k * n + t;
    let mut objective = vec![Rational::zero(); total];
    for (t, (_, prob)) in d.entries().iter().enumerate() {
        objective[price_col(t)] = prob.clone();
    }

    let mut constraints = Vec::new();
    for t in 0..k {
        let mut coeffs = vec![Rational::zero(); total];
        for s in 0..n {
            coeffs[t * n + s] = Rational::one();
        }
        constraints.push(Constraint::new(coeffs, Relation::Eq, Rational::one()));
    }
    for t in 0..k {
        // Truthfulness against every other entry, and against null (IR).
        for u in 0..k {
            let mut coeffs = vec![Rational::zero(); total];
            for s in 0..n {
                coeffs[t * n + s] = -rat(tables[t][s]);
            }
            coeffs[price_col(t)] = Rational::one();
            if u != t {
                for s in 0..n {
                    coeffs[u * n + s] = rat(tables[t][s]);
                }
                coeffs[price_col(u)] = -Rational::one();
            }
            constraints.push(Constraint::new(coeffs, Relation::Le, Rational::zero()));
        }
    }

    let solution = match maximize(&objective, &constraints)? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible => {
            return Err(Error::InternalLpFault(
                "menu program reported infeasible although the null menu is feasible".into(),
            ))
        }
        LpOutcome::Unbounded => {
            return Err(Error::InternalLpFault(
                "menu program reported unbounded although prices are IR-capped".into(),
            ))
        }
    };

    let mut entries = Vec::with_capacity(k);
    for t in 0..k {
        let mut lottery = Vec::new();
        for s in 0..n {
            let p = &solution.values[t * n + s];
            if !p.is_zero() {
                lottery.push((ItemSet::from_mask(s as u64, m)?, p.clone()));
            }
        }
        entries.push(MenuEntry {
            lottery,
            price: solution.values[price_col(t)].clone(),
        });
    }
    let menu = Menu::new(m, entries)?.canonical();
    Ok((menu, solution.objective))
}

/// The full-bundle baseline menu and its guarantees.
#[derive(Clone, Debug)]
pub struct TrivialBundle {
    pub menu: Menu,
    /// Exact expected revenue of the menu.
    pub revenue: Rational,
    /// Index of the targeted type.
    pub target: usize,
    /// The targeting guarantee `Pr[target] * v_target(full)`; at most the
    /// revenue, and at least a `1/k` fraction of the optimum.
    pub bound: Rational,
}

/// Sells the full bundle at the price of the type maximizing
/// `Pr[t] * v_t(full)`; types valuing the bundle below that price get the
/// null entry.
pub fn trivial_bundle_menu(d: &TypeDistribution, cap: usize) -> Result<TrivialBundle> {
    let m = d.ground_size();
    let full = ItemSet::full(m);
    let full_values: Vec<u64> = d
        .entries()
        .iter()
        .map(|(v, _)| v.value_with_cap(&full, cap))
        .collect::<Result<_>>()?;

    let mut target = 0;
    let mut bound = Rational::zero();
    for (t, (_, prob)) in d.entries().iter().enumerate() {
        let weight = prob * rat(full_values[t]);
        if weight > bound {
            bound = weight;
            target = t;
        }
    }
    let price = rat(full_values[target]);

    let mut entries = Vec::with_capacity(d.len());
    let mut revenue = Rational::zero();
    for (t, (_, prob)) in d.entries().iter().enumerate() {
        if rat(full_values[t]) >= price {
            revenue += prob * &price;
            entries.push(MenuEntry {
                lottery: vec![(full.clone(), Rational::one())],
                price: price.clone(),
            });
        } else {
            entries.push(MenuEntry {
                lottery: vec![(ItemSet::empty(m), Rational::one())],
                price: Rational::zero(),
            });
        }
    }
    Ok(TrivialBundle {
        menu: Menu::new(m, entries)?,
        revenue,
        target,
        bound,
    })
}

/// Exact truthfulness audit of a menu against a distribution.
#[derive(Clone, Debug)]
pub struct MenuAudit {
    pub revenue: Rational,
    /// Largest gain any type gets from taking another type's entry.
    pub max_ic_violation: Rational,
    /// Largest shortfall of any type's own utility below zero.
    pub max_ir_violation: Rational,
}

impl MenuAudit {
    pub fn clean(&self) -> bool {
        self.max_ic_violation.is_zero() && self.max_ir_violation.is_zero()
    }
}

pub fn verify_menu(d: &TypeDistribution, menu: &Menu, cap: usize) -> Result<MenuAudit> {
    let m = d.ground_size();
    if menu.ground_size() != m {
        return Err(Error::GroundMismatch {
            expected: m,
            got: menu.ground_size(),
        });
    }
    if menu.entries().len() != d.len() {
        return Err(Error::LengthMismatch {
            expected: d.len(),
            got: menu.entries().len(),
        });
    }
    check_enum_cap(m, cap)?;
    let tables: Vec<Vec<u64>> = d
        .entries()
        .iter()
        .map(|(v, _)| v.value_table(cap))
        .collect::<Result<_>>()?;

    let mut revenue = Rational::zero();
    let mut max_ic = Rational::zero();
    let mut max_ir = Rational::zero();
    for (t, (_, prob)) in d.entries().iter().enumerate() {
        let own = expected_value(&tables[t], &menu.entries()[t]) - &menu.entries()[t].price;
        revenue += prob * &menu.entries()[t].price;
        max_ir = max_ir.max(-own.clone());
        for (u, entry) in menu.entries().iter().enumerate() {
            if u == t {
                continue;
            }
            let other = expected_value(&tables[t], entry) - &entry.price;
            max_ic = max_ic.max(other - own.clone());
        }
    }
    Ok(MenuAudit {
        revenue,
        max_ic_violation: max_ic,
        max_ir_violation: max_ir,
    })
}

/// Best uniform bundle price over the support's full-set values. For a
/// single item this matches the LP optimum exactly; it serves as the
/// independent cross-check there.
pub fn best_posted_price(d: &TypeDistribution, cap: usize) -> Result<(Rational, Rational)> {
    let m = d.ground_size();
    let full = ItemSet::full(m);
    let full_values: Vec<u64> = d
        .entries()
        .iter()
        .map(|(v, _)| v.value_with_cap(&full, cap))
        .collect::<Result<_>>()?;
    let mut candidates: Vec<u64> = full_values.clone();
    candidates.sort_unstable();
    candidates.dedup();

    let mut best_price = Rational::zero();
    let mut best_revenue = Rational::zero();
    for price in candidates {
        let price = rat(price);
        let mut revenue = Rational::zero();
        for (t, (_, prob)) in d.entries().iter().enumerate() {
            if rat(full_values[t]) >= price {
                revenue += prob * &price;
            }
        }
        if revenue > best_revenue {
            best_revenue = revenue;
            best_price = price;
        }
    }
    Ok((best_price, best_revenue))
}
