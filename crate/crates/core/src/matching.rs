//! Exact maximum-weight bipartite matching.
//!
//! Weights are non-negative rationals and results are bit-exact, so ties can
//! be tested with `==` (compatibility checks depend on that). The solver is
//! a subset DP over the smaller side, which is exhaustive and therefore
//! trivially correct at the desk scales this crate targets; a guard rejects
//! grids whose smaller side exceeds 20 nodes.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Rational;

const DP_SIDE_CAP: usize = 20;

/// Rectangular grid of non-negative rational edge weights;
/// `weights[row][col]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteWeights {
    rows: usize,
    cols: usize,
    weights: Vec<Vec<Rational>>,
}

impl BipartiteWeights {
    pub fn new(weights: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = weights.len();
        let cols = weights.first().map(Vec::len).unwrap_or(0);
        for row in &weights {
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            if row.iter().any(|w| w < &Rational::zero()) {
                return Err(Error::invalid("matching weights must be non-negative"));
            }
        }
        Ok(BipartiteWeights {
            rows,
            cols,
            weights,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn weight(&self, row: usize, col: usize) -> &Rational {
        &self.weights[row][col]
    }
}

/// A (not necessarily perfect) matching as `(row, col)` pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Total weight under `grid`; errors on out-of-range or repeated nodes.
    pub fn weight(&self, grid: &BipartiteWeights) -> Result<Rational> {
        let mut row_used = vec![false; grid.rows];
        let mut col_used = vec![false; grid.cols];
        let mut total = Rational::zero();
        for &(r, c) in &self.pairs {
            if r >= grid.rows {
                return Err(Error::IndexOutOfRange {
                    index: r,
                    ground: grid.rows,
                });
            }
            if c >= grid.cols {
                return Err(Error::IndexOutOfRange {
                    index: c,
                    ground: grid.cols,
                });
            }
            if row_used[r] || col_used[c] {
                return Err(Error::invalid(format!(
                    "matching repeats a node at pair ({r},{c})"
                )));
            }
            row_used[r] = true;
            col_used[c] = true;
            total += grid.weight(r, c).clone();
        }
        Ok(total)
    }
}

/// Maximum-weight matching; returns the optimum value and one witness.
pub fn max_weight_matching(grid: &BipartiteWeights) -> Result<(Rational, Matching)> {
    if grid.rows == 0 || grid.cols == 0 {
        return Ok((Rational::zero(), Matching { pairs: Vec::new() }));
    }
    let transposed = grid.cols > grid.rows;
    let (big, small) = if transposed {
        (grid.cols, grid.rows)
    } else {
        (grid.rows, grid.cols)
    };
    if small > DP_SIDE_CAP {
        return Err(Error::EnumCapExceeded {
            needed: small,
            cap: DP_SIDE_CAP,
        });
    }
    let at = |b: usize, s: usize| {
        if transposed {
            &grid.weights[s][b]
        } else {
            &grid.weights[b][s]
        }
    };

    // dp[i][mask]: best weight matching rows {0..i} of the big side into the
    // column subset `mask` of the small side.
    let full = (1usize << small) - 1;
    let mut dp = vec![vec![Rational::zero(); full + 1]; big + 1];
    for i in 1..=big {
        for mask in 0..=full {
            let mut best = dp[i - 1][mask].clone();
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                let c = bit.trailing_zeros() as usize;
                let cand = dp[i - 1][mask ^ bit].clone() + at(i - 1, c).clone();
                if cand > best {
                    best = cand;
                }
            }
            dp[i][mask] = best;
        }
    }

    // Walk the table back to recover one optimal matching.
    let mut pairs = Vec::new();
    let mut mask = full;
    for i in (1..=big).rev() {
        if dp[i][mask] == dp[i - 1][mask] {
            continue;
        }
        let mut rest = mask;
        let mut picked = None;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            let c = bit.trailing_zeros() as usize;
            if dp[i - 1][mask ^ bit].clone() + at(i - 1, c).clone() == dp[i][mask] {
                picked = Some((bit, c));
                break;
            }
        }
        let (bit, c) = picked.expect("dp value must be achieved by some column");
        mask ^= bit;
        pairs.push(if transposed { (c, i - 1) } else { (i - 1, c) });
    }
    pairs.sort_unstable();
    let best = dp[big][full].clone();
    Ok((best, Matching { pairs }))
}

/// Does `matching` attain the maximum weight on `grid`? Ties count: any
/// matching whose weight equals the optimum passes.
pub fn attains_max(grid: &BipartiteWeights, matching: &Matching) -> Result<bool> {
    let w = matching.weight(grid)?;
    let (best, _) = max_weight_matching(grid)?;
    Ok(w == best)
}

/// Integer twin of [`max_weight_matching`] for natural weight grids, used on
/// hot value-query paths. Returns only the optimum value.
pub(crate) fn max_weight_matching_nat(weights: &[Vec<u64>]) -> Result<u64> {
    let rows = weights.len();
    let cols = weights.first().map(Vec::len).unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Ok(0);
    }
    let transposed = cols > rows;
    let (big, small) = if transposed { (cols, rows) } else { (rows, cols) };
    if small > DP_SIDE_CAP {
        return Err(Error::EnumCapExceeded {
            needed: small,
            cap: DP_SIDE_CAP,
        });
    }
    let at = |b: usize, s: usize| {
        if transposed {
            weights[s][b]
        } else {
            weights[b][s]
        }
    };
    let full = (1usize << small) - 1;
    let mut prev = vec![0u64; full + 1];
    let mut cur = vec![0u64; full + 1];
    for i in 1..=big {
        for mask in 0..=full {
            let mut best = prev[mask];
            let mut rest = mask;
            while rest != 0 {
                let bit = rest & rest.wrapping_neg();
                rest ^= bit;
                let c = bit.trailing_zeros() as usize;
                let cand = prev[mask ^ bit]
                    .checked_add(at(i - 1, c))
                    .ok_or(Error::Overflow("matching weight sum"))?;
                if cand > best {
                    best = cand;
                }
            }
            cur[mask] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(prev[full])
}
