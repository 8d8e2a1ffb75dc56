"""Exact workbench for lottery-menu revenue maximization and
difference-optimization reductions.

Everything is computed in exact arithmetic: valuations are natural-valued,
prices and probabilities are `fractions.Fraction`, and unbounded naturals
(witness multipliers, hardness budgets) are plain `int`. Operations that
enumerate all `2^m` subsets take a `cap` keyword defaulting to
`DEFAULT_ENUM_CAP` and raise `ValueError` when the ground set exceeds it.
"""

from ._native import (
    DEFAULT_ENUM_CAP,
    DEFAULT_LP_CAP,
    SCHEMA_VERSION,
    Matroid,
    Menu,
    SadpInstance,
    Transcript,
    TypeDistribution,
    Valuation,
    Witness,
    algorithms,
    appendix_counterexample,
    balancedness,
    best_posted_price,
    boxs_family,
    brute_force_odp,
    build_it,
    build_vt,
    check_c_compatibility,
    disjoint_union,
    fast_truncated_value,
    hardness_budget,
    hardness_budget_for_k,
    load_json,
    lp_optimal_mdmdp,
    perturb,
    quality,
    recover_from_it,
    recover_from_vt,
    run_game,
    sadp_eval,
    sadp_opt,
    scaled_disjoint_union,
    subset_rank,
    subset_unrank,
    theoretical_bound,
    trivial_bundle_menu,
    verify_menu,
    witness_for_it,
)

__all__ = [
    "DEFAULT_ENUM_CAP",
    "DEFAULT_LP_CAP",
    "SCHEMA_VERSION",
    "Matroid",
    "Menu",
    "SadpInstance",
    "Transcript",
    "TypeDistribution",
    "Valuation",
    "Witness",
    "algorithms",
    "appendix_counterexample",
    "balancedness",
    "best_posted_price",
    "boxs_family",
    "brute_force_odp",
    "build_it",
    "build_vt",
    "check_c_compatibility",
    "disjoint_union",
    "fast_truncated_value",
    "hardness_budget",
    "hardness_budget_for_k",
    "load_json",
    "lp_optimal_mdmdp",
    "perturb",
    "quality",
    "recover_from_it",
    "recover_from_vt",
    "run_game",
    "sadp_eval",
    "sadp_opt",
    "scaled_disjoint_union",
    "subset_rank",
    "subset_unrank",
    "theoretical_bound",
    "trivial_bundle_menu",
    "verify_menu",
    "witness_for_it",
]
