"""Ground truth and bound arithmetic used to check the solvers."""

from __future__ import annotations

import itertools
import math
import statistics
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .group import (
    CapExceeded,
    ExponentVector,
    GroupSignature,
    Subgroup,
    enumeration_cap,
    extend_subgroup,
    is_prime,
    parse_signature,
    scalar_mul,
)
from .oracle import CountingOracle

SMALL_GROUP_CAP = 256

ALGORITHMS = ("decide-cyclic", "identify-cyclic", "decide-abelian", "identify-abelian", "brute-force")
IDENTIFICATION = ("identify-cyclic", "identify-abelian", "brute-force")


class VacuousBound(ValueError):
    """The lower bound has no content because ``|G|/|H| < 2``."""


def brute_force_identify(oracle: CountingOracle, cap: int | None = None) -> Subgroup:
    sig = oracle.sig
    if cap is None:
        cap = enumeration_cap()
    if sig.order > cap:
        raise CapExceeded(f"|G| = {sig.order} exceeds cap {cap}")
    base = oracle.query(sig.identity)
    members = [g for g in sig.elements() if oracle.query(g) == base]
    return Subgroup(sig, tuple(sorted(members))[1:], frozenset(members))


def iter_subgroups(sig: GroupSignature) -> Iterator[Subgroup]:
    """Yield every subgroup of ``sig`` exactly once.

    A subgroup is built factor by factor: ``H_i`` either equals ``H_{i-1}`` or
    is ``H_{i-1} + <h>`` with ``h = (u, p_i^j, 0, ...)``, where ``u`` ranges over
    the box transversal of ``H_{i-1}`` and ``p_i^(k_i-j) * h`` must already lie
    in ``H_{i-1}``.  Each choice of ``(j, u)`` gives a different subgroup.
    """
    l = sig.rank

    def rec(i: int, elems: frozenset, gens: tuple, box: tuple) -> Iterator[Subgroup]:
        if i == l:
            yield Subgroup(sig, gens, elems)
            return
        p, k = sig.factors[i]
        tail = (0,) * (l - i - 1)
        yield from rec(i + 1, elems, gens, box + (p**k,))
        for j in range(k):
            lift = p ** (k - j)
            for u in itertools.product(*(range(m) for m in box)):
                h = u + (p**j,) + tail
                if scalar_mul(sig, lift, h) not in elems:
                    continue
                yield from rec(i + 1, extend_subgroup(sig, elems, h, cap=sig.order), gens + (h,), box + (p**j,))

    yield from rec(0, frozenset([sig.identity]), (), ())


def enumerate_subgroups(sig: GroupSignature, cap: int = SMALL_GROUP_CAP) -> list[Subgroup]:
    if sig.order > cap:
        raise CapExceeded(f"|G| = {sig.order} exceeds the small-group cap {cap}")
    return sorted(iter_subgroups(sig), key=lambda s: (s.order, s.canonical))


@lru_cache(maxsize=None)
def subgroup_order_counts(sig: GroupSignature) -> Counter:
    """Number of subgroups of each order, by enumeration."""
    return Counter(s.order for s in iter_subgroups(sig))


def count_subgroups_zpn(p: int, n: int, k: int) -> int:
    """Subgroups of order ``p^k`` in ``Z_p^n`` (the Gaussian binomial)."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    num = den = 1
    for j in range(k):
        num *= p**n - p**j
        den *= p**k - p**j
    count, rem = divmod(num, den)
    assert rem == 0
    return count


def lower_bound_value(order_g: int, order_h: int, count_h: int) -> float:
    if count_h < 1:
        raise ValueError("count of candidate subgroups must be >= 1")
    index = order_g // order_h
    if index < 2:
        raise VacuousBound(f"|G|/|H| = {index} leaves no room for a lower bound")
    return math.log(count_h) / math.log(index)


def elementary_rank(sig: GroupSignature) -> Optional[tuple[int, int]]:
    """``(p, n)`` when ``sig`` is ``Z_p^n``, else None."""
    primes = {p for p, _ in sig.factors}
    if len(primes) == 1 and all(k == 1 for _, k in sig.factors):
        return primes.pop(), sig.rank
    return None


def class_count(sig: GroupSignature, order_h: int, small_cap: int = SMALL_GROUP_CAP) -> Optional[int]:
    """``|{H' <= G : |H'| = order_h}|`` when known, else None."""
    er = elementary_rank(sig)
    if er is not None:
        p, n = er
        k = round(math.log(order_h, p))
        if p**k == order_h:
            return count_subgroups_zpn(p, n, k)
        return 0
    if sig.order <= small_cap:
        return subgroup_order_counts(sig)[order_h]
    return None


def class_lower_bound(sig: GroupSignature, order_h: int) -> Optional[float]:
    count = class_count(sig, order_h)
    if not count:
        return None
    try:
        return lower_bound_value(sig.order, order_h, count)
    except VacuousBound:
        return None


def lemma_witness(p: int, k: int, h: int) -> int:
    """``b`` with ``b*h == p^(k-1) (mod p^k)`` for nonzero ``h``.

    Strips the ``p``-part of ``h`` first, so non-units are covered too.
    """
    q = p**k
    h %= q
    if h == 0:
        raise ValueError("h must be nonzero")
    v = 0
    while h % p ** (v + 1) == 0:
        v += 1
    unit = (h // p**v) % p
    return pow(unit, -1, p) * p ** (k - 1 - v) % q


def check_lemma_scaling(p: int, k: int, exhaustive: bool = True) -> bool:
    """True iff every nonzero ``h`` in ``Z_{p^k}`` scales onto ``p^(k-1)``."""
    q = p**k
    target = p ** (k - 1)
    if exhaustive:
        return all(any(b * h % q == target for b in range(q)) for h in range(1, q))
    return all(lemma_witness(p, k, h) * h % q == target for h in range(1, q))


@dataclass(frozen=True)
class AuditConfig:
    decide_scale: float = 10.0
    decide_offset: float = 10.0
    identify_scale: float = 12.0


@dataclass
class BoundReport:
    id: str
    algo: str
    measured: int
    upper_bound_value: float
    lower_bound_value: Optional[float]
    passed: bool


def upper_bound(algo: str, sig: GroupSignature, order_h: int, config: AuditConfig = AuditConfig()) -> float:
    index = sig.order / order_h
    if algo == "decide-cyclic":
        return 2
    if algo == "identify-cyclic":
        p, k = sig.factors[0]
        if order_h == 1:
            return k + 1
        j = k - round(math.log(order_h, p))
        return j + 2
    if algo == "decide-abelian":
        return config.decide_scale * math.sqrt(index) + config.decide_offset
    if algo == "identify-abelian":
        lh = math.log2(order_h)
        return config.identify_scale * (math.sqrt(index * (1 + lh)) + lh + 1)
    if algo == "brute-force":
        return sig.order
    raise ValueError(f"unknown algorithm {algo!r}")


def audit(records: Iterable, config: AuditConfig = AuditConfig()) -> list[BoundReport]:
    """One report per record.  Records need ``id``, ``sig``, ``orderH``, ``algo``, ``queries_distinct``."""
    reports = []
    for rec in records:
        sig = rec.sig if isinstance(rec.sig, GroupSignature) else parse_signature(rec.sig)
        upper = upper_bound(rec.algo, sig, rec.orderH, config)
        lower = class_lower_bound(sig, rec.orderH) if rec.algo in IDENTIFICATION else None
        reports.append(BoundReport(rec.id, rec.algo, rec.queries_distinct, upper, lower, rec.queries_distinct <= upper))
    return reports


@dataclass
class ClassCheck:
    sig: str
    orderH: int
    algo: str
    instances: int
    worst: int
    lower_bound_value: Optional[float]

    @property
    def passed(self) -> Optional[bool]:
        if self.lower_bound_value is None:
            return None
        return self.worst >= math.ceil(self.lower_bound_value - 1e-12)


def lower_bound_checks(records: Iterable) -> list[ClassCheck]:
    """Worst measured queries per ``(G, |H|, algorithm)`` class against the class bound."""
    classes: dict[tuple, list] = {}
    for rec in records:
        if rec.algo not in IDENTIFICATION:
            continue
        classes.setdefault((str(rec.sig), rec.orderH, rec.algo), []).append(rec)
    out = []
    for (sig, order_h, algo), recs in sorted(classes.items()):
        lower = recs[0].lower_bound
        out.append(ClassCheck(sig, order_h, algo, len(recs), max(r.queries_distinct for r in recs), lower))
    return out


def fit_scaling_exponent(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    if len(points) < 4:
        raise ValueError("need at least 4 points")
    for x, y in points:
        if x < 2 or y < 1:
            raise ValueError(f"point ({x}, {y}) outside x >= 2, y >= 1")
    xs = [math.log(x) for x, _ in points]
    ys = [math.log(y) for _, y in points]
    if len(set(xs)) == 1:
        raise ValueError("all x values are equal; slope undefined")
    return statistics.linear_regression(xs, ys).slope


def _partitions(n: int, largest: Optional[int] = None) -> Iterator[tuple[int, ...]]:
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def abelian_signatures(max_order: int, primes: Sequence[int] = (2, 3, 5, 7)) -> list[GroupSignature]:
    """One signature per isomorphism type of nontrivial Abelian group with ``|G| <= max_order``.

    Factors are listed by ascending prime, exponents descending within a prime.
    The result is sorted by group order.
    """
    primes = sorted(primes)
    out = []

    def rec(idx: int, order: int, factors: tuple):
        if idx == len(primes):
            if factors:
                out.append(GroupSignature(factors))
            return
        p = primes[idx]
        n = 0
        while order * p**n <= max_order:
            for part in _partitions(n):
                rec(idx + 1, order * p**n, factors + tuple((p, e) for e in part))
            n += 1

    rec(0, 1, ())
    out.sort(key=lambda s: (s.order, s.factors))
    return out


def _as_array(sig: GroupSignature, elems) -> np.ndarray:
    return np.fromiter(itertools.chain.from_iterable(elems), dtype=np.int64).reshape(-1, sig.rank)


def _encode(sig: GroupSignature, arr: np.ndarray) -> np.ndarray:
    radix = np.ones(sig.rank, dtype=np.int64)
    for m in range(sig.rank - 2, -1, -1):
        radix[m] = radix[m + 1] * sig.moduli[m + 1]
    return arr @ radix


def ambient_difference_codes(sig: GroupSignature, w1, w2) -> np.ndarray:
    """Mixed-radix codes of ``{x - y mod ambient : x in w1, y in w2}``."""
    a = _as_array(sig, w1)
    b = _as_array(sig, w2)
    mod = np.asarray(sig.moduli, dtype=np.int64)
    diff = ((a[:, None, :] - b[None, :, :]) % mod).reshape(-1, sig.rank)
    return np.unique(_encode(sig, diff))


def check_generating_pair(sig: GroupSignature, pair) -> Optional[str]:
    """None if ``pair`` meets every generating-pair guarantee, else the first failure."""
    v, r = pair.over, pair.balance
    size = v.size(sig)
    w1_max = 2 * (math.isqrt(size * r - 1) + 1)
    w2_max = -(-size // r)
    w2_max = math.isqrt(w2_max - 1) + 1
    if len(pair.w1) > w1_max:
        return f"|W1| = {len(pair.w1)} > {w1_max}"
    if len(pair.w2) > w2_max:
        return f"|W2| = {len(pair.w2)} > {w2_max}"
    diff = ambient_difference_codes(sig, pair.w1, pair.w2)
    axes = np.meshgrid(*(np.arange(m, dtype=np.int64) for m in v.ranges(sig)), indexing="ij")
    box = np.unique(_encode(sig, np.stack(axes, axis=-1).reshape(-1, sig.rank)))
    if not np.isin(box, diff).all():
        return "W1 - W2 misses part of V"
    if v.exps == sig.exponents and not np.array_equal(box, diff):
        return "W1 - W2 != V although V is the whole group"
    return None


def findpair_sweep_cases(
    max_size: int = 5000, primes: Sequence[int] = (2, 3, 5, 7), balances: Sequence[int] = (1, 2, 3, 4)
) -> Iterator[tuple[GroupSignature, ExponentVector, int]]:
    """Exponent vectors of every shape with ``|V| <= max_size``, each placed in several ambients.

    Each nonzero shape is tried in two factor orders and three ambients: exact
    (``k_i = j_i``), lifted (``k_i = j_i + 1``), and with a zero-exponent
    factor inserted after every factor.  The all-zero vector is added per prime.
    """
    for p in primes:
        for r in balances:
            yield GroupSignature(((p, 1),)), ExponentVector((0,)), r
            yield GroupSignature(((p, 2), (2, 1))), ExponentVector((0, 0)), r
    for shape in abelian_signatures(max_size, primes):
        for factors in (shape.factors, shape.factors[::-1]):
            exps = tuple(j for _, j in factors)
            variants = [
                (factors, exps),
                (tuple((p, j + 1) for p, j in factors), exps),
                (
                    tuple(f for p, j in factors for f in ((p, j), (p, 1))),
                    tuple(e for j in exps for e in (j, 0)),
                ),
            ]
            for amb, v in variants:
                sig = GroupSignature(amb)
                for r in balances:
                    yield sig, ExponentVector(v), r
