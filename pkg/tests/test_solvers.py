import itertools
import math

import pytest

from hspkit.group import ExponentVector, closure, parse_signature, representative_set_elements, sub
from hspkit.oracle import CountingOracle, HspInstance, build_instance
from hspkit.solvers import (
    InvariantViolation,
    Verdict,
    ceil_sqrt_ratio,
    decide_abelian,
    decide_cyclic_prime_power,
    decision_query_bound,
    find_pair,
    identify_abelian,
    identify_cyclic_prime_power,
    scan_collision,
)
from hspkit.verify import abelian_signatures, check_generating_pair, iter_subgroups


def oracle_for(text, gens):
    return CountingOracle(build_instance(parse_signature(text), gens))


def test_scan_collision_examples():
    o = oracle_for("2,2", [(1, 1)])
    assert scan_collision(o, [(0, 0)], [(1, 1)]) == ((0, 0), (1, 1))
    o = oracle_for("2,2", [])
    assert scan_collision(o, [(0, 0), (1, 0)], [(0, 1), (1, 1)]) is None
    assert o.count == 4
    o = oracle_for("2^3", [(4,)])
    assert scan_collision(o, [(0,)], [(4,)]) == ((0,), (4,))


def test_scan_collision_picks_least_pair():
    o = oracle_for("2^3", [(2,)])
    assert scan_collision(o, [(1,), (0,)], [(6,), (3,)]) == ((0,), (6,))


@pytest.mark.parametrize(
    "text, gens, verdict",
    [("2^3", [(4,)], Verdict.NONTRIVIAL), ("2^3", [], Verdict.TRIVIAL), ("3^2", [(1,)], Verdict.NONTRIVIAL)],
)
def test_decide_cyclic_examples(text, gens, verdict):
    out = decide_cyclic_prime_power(oracle_for(text, gens))
    assert out.verdict == verdict
    assert out.queries == 2


@pytest.mark.parametrize(
    "text, gens, expected, queries",
    [("2^3", [(2,)], [(2,)], 3), ("2^3", [], [], 4), ("3^2", [(1,)], [(1,)], 2)],
)
def test_identify_cyclic_examples(text, gens, expected, queries):
    sig = parse_signature(text)
    out = identify_cyclic_prime_power(oracle_for(text, gens))
    assert out.recovered == closure(sig, expected)
    assert out.queries == queries


def test_cyclic_solvers_reject_products():
    with pytest.raises(ValueError):
        decide_cyclic_prime_power(oracle_for("2,2", []))
    with pytest.raises(ValueError):
        identify_cyclic_prime_power(oracle_for("2,3", []))


def test_ceil_sqrt_ratio_is_exact():
    for n in range(1, 400):
        for d in range(1, 12):
            assert ceil_sqrt_ratio(n, d) == math.ceil(math.sqrt(n / d) - 1e-12)
    big = 10**40 + 1
    assert ceil_sqrt_ratio(big, 1) == 10**20 + 1


def test_find_pair_z4():
    sig = parse_signature("2^2")
    pair = find_pair(sig, ExponentVector((2,)), 1)
    assert pair.w1 == {(0,), (1,)}
    assert pair.w2 == {(0,), (2,)}
    assert {sub(sig, a, b) for a in pair.w1 for b in pair.w2} == set(sig.elements())


def test_find_pair_mixed_example():
    sig = parse_signature("2,3^2")
    pair = find_pair(sig, ExponentVector((1, 2)), 1)
    assert pair.w1 == set(itertools.product(range(2), range(2)))
    assert pair.w2 == {(0, c) for c in (0, 7, 5, 3, 1)}
    assert len(pair.w1) <= 2 * 5 and len(pair.w2) <= 5
    assert check_generating_pair(sig, pair) is None


def test_find_pair_degenerate_cases():
    sig = parse_signature("2^2,3")
    for r in (1, 2, 7):
        pair = find_pair(sig, ExponentVector((0, 0)), r)
        assert pair.w1 == pair.w2 == {(0, 0)}
    # s = 1 once r >= |V|
    pair = find_pair(sig, ExponentVector((1, 1)), 6)
    assert pair.w2 == {(0, 0)}
    assert pair.w1 == representative_set_elements(sig, ExponentVector((1, 1)))
    with pytest.raises(ValueError):
        find_pair(sig, ExponentVector((1, 1)), 0)


def test_find_pair_sizes_and_coverage_sweep():
    for sig in abelian_signatures(200):
        for exps in itertools.product(*(range(k + 1) for _, k in sig.factors)):
            v = ExponentVector(exps)
            for r in (1, 2, 3, 5):
                assert check_generating_pair(sig, find_pair(sig, v, r)) is None


def test_find_pair_makes_no_queries(monkeypatch):
    calls = []
    monkeypatch.setattr(CountingOracle, "query", lambda self, g: calls.append(g))
    find_pair(parse_signature("2^3,3^2"), ExponentVector((3, 2)), 2)
    assert calls == []


def test_decide_abelian_examples():
    out = decide_abelian(oracle_for("2,2", [(1, 1)]))
    assert out.verdict == Verdict.NONTRIVIAL
    assert out.witness == ((0, 0), (1, 1))
    assert out.queries == 4
    assert decide_abelian(oracle_for("2,2", [])).verdict == Verdict.TRIVIAL
    out = decide_abelian(oracle_for("2^3", [(4,)]))
    assert (out.verdict, out.queries) == (Verdict.NONTRIVIAL, 2)


def test_identify_abelian_examples():
    sig = parse_signature("2,2")
    out = identify_abelian(oracle_for("2,2", [(1, 1)]))
    assert out.recovered == closure(sig, [(1, 1)])
    assert out.queries == 4
    assert [ph.t for ph in out.trace] == [1, 0]
    assert out.trace[-1].r == 1
    assert out.trace[-1].collision == (1, 1)

    out = identify_abelian(oracle_for("2^3", [(2,)]))
    assert out.recovered.elements == {(0,), (2,), (4,), (6,)}
    assert out.trace[0].t == 1


def test_identify_abelian_trivial_runs_every_phase():
    for text in ["2^3,3", "2,2,2", "5,7", "3^2,3"]:
        sig = parse_signature(text)
        out = identify_abelian(oracle_for(text, []))
        assert out.recovered.is_trivial()
        assert [ph.t for ph in out.trace] == [k for _, k in sig.factors]
        assert out.trace[-1].r == 0


def test_general_solvers_on_every_small_instance():
    for sig in abelian_signatures(72):
        for H in iter_subgroups(sig):
            inst = HspInstance(sig, H)
            d = decide_abelian(CountingOracle(inst), debug=True)
            assert (d.verdict == Verdict.NONTRIVIAL) == (H.order > 1)
            if d.witness is not None:
                x, y = d.witness
                assert sub(sig, x, y) in H and x != y
            oracle = CountingOracle(inst)
            out = identify_abelian(oracle, truth=H)
            assert out.recovered == H
            assert out.queries == oracle.count <= oracle.raw_calls


def test_general_solvers_agree_with_cyclic_ones_on_single_factors():
    for text in ["2^5", "3^3", "5^2", "7"]:
        sig = parse_signature(text)
        for H in iter_subgroups(sig):
            inst = HspInstance(sig, H)
            assert decide_abelian(CountingOracle(inst)).verdict == decide_cyclic_prime_power(CountingOracle(inst)).verdict
            assert identify_abelian(CountingOracle(inst)).recovered == identify_cyclic_prime_power(CountingOracle(inst)).recovered


def test_shared_oracle_counts_only_new_queries():
    o = oracle_for("2^2,3", [])
    first = decide_abelian(o)
    again = decide_abelian(o)
    assert again.queries == 0
    assert o.count == first.queries


def test_debug_bound_is_checked(monkeypatch):
    import hspkit.solvers as solvers

    monkeypatch.setattr(solvers, "decision_query_bound", lambda sig: 0.5)
    with pytest.raises(InvariantViolation):
        decide_abelian(oracle_for("2,3", []), debug=True)
    assert decide_abelian(oracle_for("2,3", [])).verdict == Verdict.TRIVIAL


def test_decision_bound_value():
    sig = parse_signature("2^2,3")
    root = 2.0
    assert decision_query_bound(sig) == pytest.approx(2 * (root + 1) + root / (1 - 1 / math.sqrt(2)) + 2)


def test_phase_checks_catch_a_wrong_truth():
    sig = parse_signature("2,2")
    inst = build_instance(sig, [(1, 1)])
    with pytest.raises(InvariantViolation):
        identify_abelian(CountingOracle(inst), truth=closure(sig, [(1, 0)]))
