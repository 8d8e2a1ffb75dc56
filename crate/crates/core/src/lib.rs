//! Desk-scale workbench for single-buyer revenue maximization and the
//! difference-optimization reductions behind its hardness results.
//!
//! The crate is organized around a handful of small, exact components:
//!
//! * [`items`] — subsets of a ground set `[m] = {0, .., m-1}`.
//! * [`matroid`] — matroid representations with an exhaustive axiom checker,
//!   rank queries, and the greedy maximum-weight routine.
//! * [`matching`] — exact maximum-weight bipartite matching over rationals.
//! * [`valuation`] — normalized monotone valuations (additive, c-demand, OXS,
//!   matroid-based, explicit tables, and closure wrappers), value and demand
//!   queries, and property checks.
//! * [`transforms`] — scaling, disjoint unions, item- and value-truncation,
//!   and the scaled-disjoint-union construction used by the reductions.
//! * [`instances`] — hard-instance generators: the binary-OXS perturbable
//!   family, SAT-encoded perturbations, and a submodularity counterexample.
//! * [`reduction`] — the difference-optimization to any-difference reduction
//!   (item-truncated and value-truncated forms), solution recovery,
//!   balancedness, and compatibility witnesses.
//! * [`solvers`] — exact brute-force and LP solvers for the three problem
//!   layers, including a rational-simplex menu optimizer.
//! * [`games`] — an oracle-adversary harness for hidden-perturbation games
//!   with reproducible transcripts.
//! * [`formats`] — canonical JSON documents for every shared artifact.
//!
//! All value arithmetic is exact: natural numbers for valuations, arbitrary
//! precision rationals elsewhere. Every `2^m` enumeration is guarded by an
//! explicit cap so nothing silently explodes.

pub mod error;
pub mod formats;
pub mod games;
pub mod instances;
pub mod items;
pub mod matching;
pub mod matroid;
pub mod reduction;
pub mod simplex;
pub mod solvers;
pub mod transforms;
pub mod valuation;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use items::ItemSet;
pub use valuation::Valuation;

/// Arbitrary-precision rational used everywhere exactness matters.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Default guard for `2^m` enumeration loops.
pub const DEFAULT_ENUM_CAP: usize = 16;

/// Default ground-size guard for the menu LP, which scales with `k * 2^m`.
pub const DEFAULT_LP_CAP: usize = 10;

/// Environment variable consulted by the CLI for enumeration-cap overrides.
pub const ENUM_CAP_ENV: &str = "MDD_ENUM_CAP";
