//! Exact two-phase simplex over arbitrary-precision rationals.
//!
//! All variables are non-negative; constraints may mix equalities and both
//! inequality directions. Bland's rule picks pivots, so the solver cannot
//! cycle; everything is bit-exact, with no tolerances anywhere.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

/// Maximizes `objective . x` over `x >= 0` subject to `constraints`.
pub fn maximize(objective: &[Rational], constraints: &[Constraint]) -> Result<LpOutcome> {
    let n = objective.len();
    for (i, c) in constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::invalid(format!(
                "constraint {i} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
    }

    let m = constraints.len();
    if m == 0 {
        // Without constraints the problem is unbounded unless no objective
        // coefficient is positive, in which case x = 0 is optimal.
        if objective.iter().any(|c| c.is_positive()) {
            return Ok(LpOutcome::Unbounded);
        }
        return Ok(LpOutcome::Optimal(LpSolution {
            values: vec![Rational::zero(); n],
            objective: Rational::zero(),
        }));
    }

    // Column layout: structural 0..n, then one slack/surplus per inequality,
    // then one artificial per row that needs one. Rows are normalized to a
    // non-negative right-hand side first.
    let mut rows: Vec<(Vec<Rational>, Relation, Rational)> = constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let coeffs = c.coeffs.iter().map(|x| -x.clone()).collect();
                let relation = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (coeffs, relation, -c.rhs.clone())
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();

    let slack_count = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    // `<=` rows start with their slack in the basis; every other row gets an
    // artificial variable.
    let artificial_count = rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();

    let total = n + slack_count + artificial_count;
    let mut tableau: Vec<Vec<Rational>> = Vec::with_capacity(m + 1);
    let mut basis: Vec<usize> = vec![usize::MAX; m];
    let mut slack_at = n;
    let mut artificial_at = n + slack_count;
    let artificial_start = n + slack_count;

    for (i, (coeffs, rel, rhs)) in rows.iter_mut().enumerate() {
        let mut row = vec![Rational::zero(); total + 1];
        for (j, c) in coeffs.iter().enumerate() {
            row[j] = c.clone();
        }
        match rel {
            Relation::Le => {
                row[slack_at] = Rational::one();
                basis[i] = slack_at;
                slack_at += 1;
            }
            Relation::Ge => {
                row[slack_at] = -Rational::one();
                slack_at += 1;
                row[artificial_at] = Rational::one();
                basis[i] = artificial_at;
                artificial_at += 1;
            }
            Relation::Eq => {
                row[artificial_at] = Rational::one();
                basis[i] = artificial_at;
                artificial_at += 1;
            }
        }
        row[total] = rhs.clone();
        tableau.push(row);
    }

    // Phase 1: maximize minus the sum of artificials (drive them to zero).
    if artificial_at > artificial_start {
        let mut z = vec![Rational::zero(); total + 1];
        for a in artificial_start..artificial_at {
            z[a] = Rational::one();
        }
        // Basic artificials must show zero reduced cost.
        for (i, &b) in basis.iter().enumerate() {
            if b >= artificial_start {
                let row = tableau[i].clone();
                for (zj, rj) in z.iter_mut().zip(row.iter()) {
                    *zj -= rj;
                }
            }
        }
        run_simplex(&mut tableau, &mut z, &mut basis, total, None)?;
        if !z[total].is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // Pivot any degenerate artificial out of the basis; a row where no
        // structural or slack column survives is redundant and gets dropped.
        let mut row = 0;
        while row < tableau.len() {
            if basis[row] >= artificial_start {
                let col = (0..artificial_start)
                    .find(|&j| !tableau[row][j].is_zero());
                match col {
                    Some(j) => pivot(&mut tableau, &mut z, &mut basis, row, j),
                    None => {
                        tableau.remove(row);
                        basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }
    }

    // Phase 2: the real objective over structural and slack columns only.
    let mut z = vec![Rational::zero(); total + 1];
    for (j, c) in objective.iter().enumerate() {
        z[j] = -c.clone();
    }
    for (i, &b) in basis.iter().enumerate() {
        if b < n && !z[b].is_zero() {
            let factor = z[b].clone();
            let row = tableau[i].clone();
            for (zj, rj) in z.iter_mut().zip(row.iter()) {
                *zj -= &factor * rj;
            }
        }
    }
    let bounded = run_simplex(
        &mut tableau,
        &mut z,
        &mut basis,
        total,
        Some(artificial_start),
    )?;
    if !bounded {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![Rational::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            values[b] = tableau[i][total].clone();
        }
    }
    Ok(LpOutcome::Optimal(LpSolution {
        values,
        objective: z[total].clone(),
    }))
}

/// Pivots to optimality with Bland's rule. Columns at or past `ban_from`
/// (the artificials in phase 2) may not enter. Returns false on an
/// unbounded direction.
fn run_simplex(
    tableau: &mut Vec<Vec<Rational>>,
    z: &mut Vec<Rational>,
    basis: &mut Vec<usize>,
    total: usize,
    ban_from: Option<usize>,
) -> Result<bool> {
    let limit = ban_from.unwrap_or(total);
    loop {
        // Bland: the lowest-index column with a negative reduced cost.
        let Some(col) = (0..limit).find(|&j| z[j].is_negative()) else {
            return Ok(true);
        };
        let mut leaving: Option<(usize, Rational)> = None;
        for (i, row) in tableau.iter().enumerate() {
            if row[col].is_positive() {
                let ratio = &row[total] / &row[col];
                let better = match &leaving {
                    None => true,
                    Some((r, best)) => {
                        ratio < *best || (ratio == *best && basis[i] < basis[*r])
                    }
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leaving else {
            return Ok(false);
        };
        pivot(tableau, z, basis, row, col);
    }
}

fn pivot(
    tableau: &mut [Vec<Rational>],
    z: &mut [Rational],
    basis: &mut [usize],
    row: usize,
    col: usize,
) {
    let divisor = tableau[row][col].clone();
    debug_assert!(!divisor.is_zero());
    for cell in tableau[row].iter_mut() {
        *cell /= &divisor;
    }
    let pivot_row = tableau[row].clone();
    for (i, other) in tableau.iter_mut().enumerate() {
        if i == row || other[col].is_zero() {
            continue;
        }
        let factor = other[col].clone();
        for (cell, p) in other.iter_mut().zip(pivot_row.iter()) {
            *cell -= &factor * p;
        }
    }
    if !z[col].is_zero() {
        let factor = z[col].clone();
        for (cell, p) in z.iter_mut().zip(pivot_row.iter()) {
            *cell -= &factor * p;
        }
    }
    basis[row] = col;
}
