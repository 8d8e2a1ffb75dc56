"""End-to-end smoke test of the Python bindings.

Run after `pip install -e . --no-build-isolation`:

    python python/smoke_test.py

Covers the whole surface once with exact expected values; prints one line
per section and exits nonzero on the first mismatch.
"""

from fractions import Fraction

import mdd


def check_valuations():
    v = mdd.Valuation.oxs([[4, 1], [3, 2], [0, 1]])
    assert v.ground_size() == 3
    assert v.value([0, 1, 2]) == 6  # best matching: items 0 and 1 take both nodes
    assert v.value([2]) == 1
    assert v.value_table()[0b011] == 6

    table = mdd.Valuation.explicit_table([0, 2, 1, 3])
    props = table.check_properties()
    assert props["normalized"] and props["monotone"]
    assert props["trivial_items"] == []

    m = mdd.Matroid.partition(3, [[0, 1], [2]], [1, 1])
    holds, violation = m.verify_axioms()
    assert holds and violation is None
    assert m.rank([0, 1, 2]) == 2
    based = mdd.Valuation.matroid_based(m, [5, 3, 2])
    assert based.value([0, 1, 2]) == 7
    # Item truncation to one item == rank-one truncated matroid.
    t1 = based.item_truncated(1)
    t2 = mdd.Valuation.matroid_based(mdd.Matroid.truncated(1, m), [5, 3, 2])
    assert t1.value_table() == t2.value_table() == [0, 5, 3, 5, 2, 5, 3, 5]

    # Demand: zero prices on {0}, half off elsewhere.
    assert mdd.Valuation.additive([2, 1]).demand([Fraction(1, 2), Fraction(2)]) == [0]
    print("ok valuations, matroids, transforms")


def check_reduction():
    v = mdd.Valuation.additive([2, 1])
    w = mdd.Valuation.additive([1, 1])
    best, opt = mdd.brute_force_odp(v, w)
    assert (best, opt) == ([0], 1)

    inst = mdd.build_it(v, w, 3)
    assert inst.k() == 3 and inst.ground_size() == 4
    construction, truncation, pv, pw = inst.provenance()
    assert construction == "item-truncation" and truncation == 2
    assert pv == v and pw == w

    s, ratio = mdd.sadp_opt(inst)
    assert ratio == Fraction(1)
    recovered, value = mdd.recover_from_it(s, inst)
    assert value == opt
    assert v.value(recovered) - w.value(recovered) == opt

    report = mdd.balancedness(inst)
    assert report["d"] <= 2 * 2 * w.value([0, 1])

    witness = mdd.witness_for_it(v, w, 3)
    assert witness.c1 == 2 * 3 * max(v.value([0, 1]), w.value([0, 1]))
    holds, violation = mdd.check_c_compatibility(inst, witness)
    assert holds and violation is None

    vt = mdd.build_vt(v, w, 3)
    s, ratio = mdd.sadp_opt(vt)
    assert ratio == Fraction(1)
    _, value = mdd.recover_from_vt(s, vt)
    assert value == opt

    assert mdd.quality(Fraction(1, 2), Fraction(4), 9) == Fraction(1, 4)
    budget = mdd.hardness_budget(4, Fraction(1, 2))
    assert budget["k"] == 256 and budget["items"] == 1020
    assert budget["bound"] == Fraction(16, 271)
    assert mdd.hardness_budget_for_k(4, 17)["bound"] == Fraction(1, 2)
    print("ok reduction, recovery, witnesses, budgets")


def check_menus():
    d = mdd.TypeDistribution(
        [
            (mdd.Valuation.additive([10]), Fraction(1, 10)),
            (mdd.Valuation.additive([3]), Fraction(9, 10)),
        ]
    )
    menu, revenue = mdd.lp_optimal_mdmdp(d)
    assert revenue == Fraction(3)
    price, posted = mdd.best_posted_price(d)
    assert posted == revenue and price == Fraction(3)
    audit = mdd.verify_menu(d, menu)
    assert audit["clean"] and audit["revenue"] == revenue
    assert audit["max_ic_violation"] == 0 and audit["max_ir_violation"] == 0
    bundle = mdd.trivial_bundle_menu(d)
    assert bundle["revenue"] <= revenue <= 2 * bundle["revenue"]
    assert mdd.verify_menu(d, bundle["menu"])["clean"]
    print("ok menu LP, posted prices, audits")


def check_games():
    fam = mdd.boxs_family(4)
    assert (fam["m"], fam["x"], fam["y"]) == (4, 6, 2)
    hidden = mdd.subset_unrank(4, 3)
    assert mdd.subset_rank(4, hidden) == 3
    perturbed = mdd.perturb(4, hidden)
    assert fam["base"].value(hidden) - perturbed.value(hidden) == 1

    assert mdd.theoretical_bound(10, 70) == Fraction(67, 420)
    # Full names; run_game also accepts the short aliases zero/prober/scanner.
    assert set(mdd.algorithms()) == {
        "zero-query-guesser",
        "random-singleton-prober",
        "exhaustive-scanner",
    }

    # A budget covering all six candidates wins every time.
    t = mdd.run_game("demand", "scanner", 4, 6, 50, 7)
    assert t.successes == t.trials == 50 and t.bound == Fraction(1)
    t = mdd.run_game("value", "scanner", 4, 2, 300, 11)
    rate = float(t.empirical_rate())
    bound = float(t.bound)
    assert rate <= bound + 3 * (bound * (1 - bound) / t.trials) ** 0.5
    assert t.game == "value" and t.x == 6 and len(t.hidden_ranks) == 300
    print("ok oracle games and transcripts")


def check_json():
    v = mdd.appendix_counterexample()
    text = v.to_json()
    assert mdd.SCHEMA_VERSION in text
    assert mdd.Valuation.from_json(text) == v
    loaded = mdd.load_json(text)
    assert isinstance(loaded, mdd.Valuation) and loaded == v

    inst = mdd.build_it(mdd.Valuation.additive([2, 1]), mdd.Valuation.additive([1, 1]), 2)
    again = mdd.SadpInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    assert again.valuations() == inst.valuations()

    t = mdd.run_game("value", "zero", 2, 0, 10, 3)
    assert mdd.Transcript.from_json(t.to_json()) == t

    d = mdd.TypeDistribution([(mdd.Valuation.additive([1]), Fraction(1))])
    assert mdd.TypeDistribution.from_json(d.to_json()) == d

    try:
        mdd.load_json('{"kind":"valuation","payload":{},"schema":"mdd/9"}')
    except ValueError as e:
        assert "mdd/9" in str(e)
    else:
        raise AssertionError("bad schema version must be rejected")
    print("ok json round trips")


def main():
    check_valuations()
    check_reduction()
    check_menus()
    check_games()
    check_json()
    print("smoke test passed")


if __name__ == "__main__":
    main()
