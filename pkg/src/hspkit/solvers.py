"""Deterministic query algorithms for the Abelian hidden subgroup problem.

Solvers only see the group signature and the labels returned by
``oracle.query``; labels are compared for equality and nothing else.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .group import (
    CapExceeded,
    Element,
    ExponentVector,
    GroupSignature,
    Subgroup,
    closure,
    enumeration_cap,
    prefix_subgroup,
    sub,
)
from .oracle import CountingOracle


class Verdict(str, enum.Enum):
    TRIVIAL = "Trivial"
    NONTRIVIAL = "NonTrivial"


class InvariantViolation(AssertionError):
    """A debug-mode runtime check failed; this always means a solver bug."""


@dataclass
class DecisionOutcome:
    verdict: Verdict
    queries: int
    witness: Optional[tuple[Element, Element]] = None


@dataclass
class PhaseRecord:
    i: int
    t: int
    collision: Optional[Element]
    r: int


@dataclass
class IdentificationOutcome:
    recovered: Subgroup
    queries: int
    trace: list[PhaseRecord] = field(default_factory=list)


@dataclass(frozen=True)
class GeneratingPair:
    w1: frozenset
    w2: frozenset
    over: ExponentVector
    balance: int


def ceil_sqrt_ratio(n: int, d: int) -> int:
    """Exact ``ceil(sqrt(n / d))`` for positive integers."""
    c = -(-n // d)
    return math.isqrt(c - 1) + 1


def find_pair(sig: GroupSignature, v: ExponentVector, r: int, cap: int | None = None) -> GeneratingPair:
    """Split the box ``V`` into ``W1``, ``W2`` with ``W1 - W2`` covering ``V``.

    No queries are made.  ``|W1| <= 2*ceil(sqrt(|V|*r))`` and
    ``|W2| <= ceil(sqrt(|V|/r))``.  Negated coordinates of ``W2`` are stored
    modulo the ambient factor moduli, so the ambient difference set contains
    every element of ``V`` (and equals it when ``V`` is the whole group).
    """
    if r < 1:
        raise ValueError(f"balance r must be >= 1, got {r}")
    if cap is None:
        cap = enumeration_cap()
    v.validate(sig)
    ranges = v.ranges(sig)
    size = v.size(sig)
    if size > cap:
        raise CapExceeded(f"|V| = {size} exceeds cap {cap}")
    zero = sig.identity
    if size == 1:
        return GeneratingPair(frozenset([zero]), frozenset([zero]), v, r)
    s = ceil_sqrt_ratio(size, r)
    if s <= 1:
        w1 = frozenset(itertools.product(*(range(m) for m in ranges)))
        return GeneratingPair(w1, frozenset([zero]), v, r)

    l = sig.rank
    # suffix[i] = prod_{m >= i} ranges[m], 0-based, suffix[l] = 1
    suffix = [1] * (l + 1)
    for m in range(l - 1, -1, -1):
        suffix[m] = suffix[m + 1] * ranges[m]
    # largest pivot with suffix[pivot] >= s, hence suffix[pivot + 1] < s
    pivot = max(m for m in range(l) if suffix[m] >= s)
    a = s // suffix[pivot + 1]
    b = -(-ranges[pivot] // a)
    modulus = sig.moduli[pivot]

    w1_axes = [range(ranges[m]) for m in range(pivot)] + [range(b)] + [[0]] * (l - pivot - 1)
    w2_axes = (
        [[0]] * pivot
        + [sorted({-c * b % modulus for c in range(a)})]
        + [sorted({-x % sig.moduli[m] for x in range(ranges[m])}) for m in range(pivot + 1, l)]
    )
    w1 = frozenset(itertools.product(*w1_axes))
    w2 = frozenset(itertools.product(*w2_axes))
    return GeneratingPair(w1, w2, v, r)


def _place(sig: GroupSignature, elems: Iterable[Element], i: int, value: int) -> list[Element]:
    """``W x {value}``: coordinate ``i`` (1-based) set to ``value``, later ones zeroed."""
    out = []
    for e in elems:
        e = list(e[: i - 1]) + [value % sig.moduli[i - 1]] + [0] * (sig.rank - i)
        out.append(tuple(e))
    return sorted(set(out))


def _label_table(oracle: CountingOracle, A: Sequence[Element]) -> dict:
    """Map each label seen on ``A`` to the least element of ``A`` carrying it."""
    table: dict = {}
    for x in A:
        lab = oracle.query(x)
        if lab not in table or x < table[lab]:
            table[lab] = x
    return table


def _match(oracle: CountingOracle, table: dict, B: Sequence[Element]) -> Optional[tuple[Element, Element]]:
    best = None
    for y in B:
        x = table.get(oracle.query(y))
        if x is not None and (best is None or (x, y) < best):
            best = (x, y)
    return best


def scan_collision(
    oracle: CountingOracle, A: Sequence[Element], B: Sequence[Element]
) -> Optional[tuple[Element, Element]]:
    """Query ``A`` then ``B``; return the lexicographically least ``(x, y)`` with equal labels."""
    return _match(oracle, _label_table(oracle, A), B)


def _require_cyclic(sig: GroupSignature) -> tuple[int, int]:
    if sig.rank != 1:
        raise ValueError(f"cyclic solvers need a single prime-power factor, got {sig}")
    return sig.factors[0]


def decide_cyclic_prime_power(oracle: CountingOracle) -> DecisionOutcome:
    """Two queries: every nontrivial subgroup of ``Z_{p^k}`` contains ``p^(k-1)``."""
    p, k = _require_cyclic(oracle.sig)
    before = oracle.count
    zero, top = (0,), (p ** (k - 1),)
    hit = scan_collision(oracle, [zero], [top])
    queries = oracle.count - before
    if hit is not None:
        return DecisionOutcome(Verdict.NONTRIVIAL, queries, hit)
    return DecisionOutcome(Verdict.TRIVIAL, queries)


def identify_cyclic_prime_power(oracle: CountingOracle) -> IdentificationOutcome:
    """Test ``p^0, p^1, ...`` against ``0``; the first hit generates ``H``."""
    sig = oracle.sig
    p, k = _require_cyclic(sig)
    before = oracle.count
    base = oracle.query((0,))
    trace = []
    for i in range(k):
        if oracle.query((p**i,)) == base:
            trace.append(PhaseRecord(1, i, (p**i,), 0))
            return IdentificationOutcome(closure(sig, [(p**i,)]), oracle.count - before, trace)
    trace.append(PhaseRecord(1, k, None, 0))
    return IdentificationOutcome(closure(sig, []), oracle.count - before, trace)


def decision_query_bound(sig: GroupSignature) -> float:
    """Query ceiling for a Trivial answer, from the geometric-sum argument."""
    g = 1
    for m in sig.moduli[:-1]:
        g *= m
    root = math.sqrt(g)
    return 2 * (root + 1) + root / (1 - 1 / math.sqrt(2)) + sig.rank


def decide_abelian(oracle: CountingOracle, debug: bool = False) -> DecisionOutcome:
    """Phase ``i`` looks for ``x - y`` in ``G_{i-1} x {p_i^(k_i-1)}`` inside ``H``.

    With ``debug`` set, a Trivial answer is checked against
    :func:`decision_query_bound`.
    """
    sig = oracle.sig
    before = oracle.count
    w1: Iterable[Element] = [sig.identity]
    w2: Iterable[Element] = [sig.identity]
    for i, (p, k) in enumerate(sig.factors, start=1):
        A = _place(sig, w1, i, 0)
        B = _place(sig, w2, i, p ** (k - 1))
        hit = scan_collision(oracle, A, B)
        if hit is not None:
            return DecisionOutcome(Verdict.NONTRIVIAL, oracle.count - before, hit)
        pair = find_pair(sig, ExponentVector.prefix(sig, i), 1)
        w1, w2 = pair.w1, pair.w2
    queries = oracle.count - before
    if debug and queries > decision_query_bound(sig):
        raise InvariantViolation(
            f"decision used {queries} queries, above {decision_query_bound(sig):.2f} for {sig}"
        )
    return DecisionOutcome(Verdict.TRIVIAL, queries)


def identify_abelian(oracle: CountingOracle, truth: Subgroup | None = None) -> IdentificationOutcome:
    """Recover ``H`` one prefix ``H_i = H_{i-1} + <h>`` at a time.

    ``V`` tracks a transversal of the recovered prefix; each phase tests the
    translates ``V x {p_i^j}`` for ``j = 0, 1, ...`` through a generating pair.
    ``truth`` turns on the per-phase checks ``<H'> == H_i`` and
    ``|<H'>| * |V_i| == |G_i|``; harness use only.
    """
    sig = oracle.sig
    before = oracle.count
    v = ExponentVector.zeros(sig)
    w1: Iterable[Element] = [sig.identity]
    w2: Iterable[Element] = [sig.identity]
    found: list[Element] = []
    r = 0
    trace = []
    prefix_order = 1
    for i, (p, k) in enumerate(sig.factors, start=1):
        A = _place(sig, w1, i, 0)
        table = _label_table(oracle, A)
        t, hit = k, None
        for j in range(k):
            B = _place(sig, w2, i, p**j)
            pair = _match(oracle, table, B)
            if pair is not None:
                x, y = pair
                hit = sub(sig, x, y)
                found.append(hit)
                t = j
                if j == 0:
                    r += 1
                break
        v = v.with_exp(i, t)
        trace.append(PhaseRecord(i, t, hit, r))
        gp = find_pair(sig, v, max(1, r))
        w1, w2 = gp.w1, gp.w2
        prefix_order *= sig.moduli[i - 1]
        if truth is not None:
            _check_phase(sig, found, truth, i, v, prefix_order)
    return IdentificationOutcome(closure(sig, found), oracle.count - before, trace)


def _check_phase(sig, found, truth, i, v, prefix_order) -> None:
    current = closure(sig, found)
    expected = prefix_subgroup(truth, i)
    if current != expected:
        raise InvariantViolation(f"phase {i}: recovered prefix {current} differs from {expected}")
    if current.order * v.size(sig) != prefix_order:
        raise InvariantViolation(
            f"phase {i}: |H'| * |V| = {current.order} * {v.size(sig)} != |G_i| = {prefix_order}"
        )
