"""Desk-scale property batteries behind ``hspkit verify``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .group import CapExceeded, GroupSignature, enumeration_cap
from .oracle import CountingOracle, HspInstance, build_instance, verify_promise
from .solvers import InvariantViolation, Verdict, decide_abelian, find_pair, identify_abelian
from .verify import (
    abelian_signatures,
    brute_force_identify,
    check_generating_pair,
    check_lemma_scaling,
    count_subgroups_zpn,
    findpair_sweep_cases,
    iter_subgroups,
    subgroup_order_counts,
)
from .bench import random_generator_lists


@dataclass
class BatteryResult:
    name: str
    passed: int = 0
    failed: int = 0
    skipped: int = 0
    first_failure: Optional[str] = None

    def fail(self, what: str) -> None:
        self.failed += 1
        if self.first_failure is None:
            self.first_failure = what

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        text = f"[{status}] {self.name}: {self.passed} passed, {self.failed} failed, {self.skipped} skipped"
        if self.first_failure:
            text += f"; first failure: {self.first_failure}"
        return text


def _run(name: str, cases: Iterable, check: Callable) -> BatteryResult:
    res = BatteryResult(name)
    for case in cases:
        try:
            problem = check(case)
        except CapExceeded:
            res.skipped += 1
            continue
        except InvariantViolation as exc:
            problem = str(exc)
        if problem:
            res.fail(problem)
        else:
            res.passed += 1
    return res


def _small_instances(max_order: int, cap: int) -> Iterable[tuple[GroupSignature, object]]:
    for sig in abelian_signatures(max_order):
        if sig.order > cap:
            yield sig, None
            continue
        for H in iter_subgroups(sig):
            yield sig, H


def promise_battery(max_exhaustive: int = 32, max_random: int = 512, seed: int = 0) -> BatteryResult:
    cap = enumeration_cap()
    rng = random.Random(seed)

    def cases():
        yield from _small_instances(max_exhaustive, cap)
        for sig in abelian_signatures(max_random):
            if sig.order <= max_exhaustive:
                continue
            if sig.order > cap:
                yield sig, None
                continue
            for gens in random_generator_lists(sig, 2, rng):
                yield sig, gens

    def check(case):
        sig, what = case
        if what is None:
            raise CapExceeded(str(sig))
        inst = HspInstance(sig, what) if not isinstance(what, list) else build_instance(sig, what)
        return None if verify_promise(inst) else f"promise broken for {sig} H={inst.hidden}"

    return _run("promise", cases(), check)


def findpair_battery(max_size: int = 1000) -> BatteryResult:
    def check(case):
        sig, v, r = case
        msg = check_generating_pair(sig, find_pair(sig, v, r))
        return None if msg is None else f"(sig={sig}, v={v.exps}, r={r}): {msg}"

    return _run("findPair", findpair_sweep_cases(max_size), check)


def lemma_battery(limit: int = 1024) -> BatteryResult:
    cap = enumeration_cap()

    def cases():
        for p in (2, 3, 5, 7):
            k = 1
            while p**k <= limit:
                yield p, k
                k += 1

    def check(case):
        p, k = case
        if p**k > cap:
            raise CapExceeded(f"{p}^{k}")
        return None if check_lemma_scaling(p, k) else f"scaling fails in Z_{p}^{k}"

    return _run("lemma-scaling", cases(), check)


def count_battery(limit: int = 64) -> BatteryResult:
    cap = enumeration_cap()

    def cases():
        for p in (2, 3, 5, 7):
            n = 1
            while p**n <= limit:
                yield p, n
                n += 1

    def check(case):
        p, n = case
        if p**n > cap:
            raise CapExceeded(f"{p}^{n}")
        counts = subgroup_order_counts(GroupSignature(((p, 1),) * n))
        for k in range(n + 1):
            if counts[p**k] != count_subgroups_zpn(p, n, k):
                return f"Z_{p}^{n}, order {p}^{k}: enumerated {counts[p**k]}, formula {count_subgroups_zpn(p, n, k)}"
        return None

    return _run("subgroup-count", cases(), check)


def solver_battery(max_order: int = 48) -> BatteryResult:
    cap = enumeration_cap()

    def check(case):
        sig, H = case
        if H is None:
            raise CapExceeded(str(sig))
        inst = HspInstance(sig, H)
        truth = brute_force_identify(CountingOracle(inst))
        d = decide_abelian(CountingOracle(inst), debug=True)
        if (d.verdict == Verdict.NONTRIVIAL) != (truth.order > 1):
            return f"decide-abelian wrong on {sig} H={H}"
        got = identify_abelian(CountingOracle(inst), truth=H).recovered
        if got != truth:
            return f"identify-abelian wrong on {sig} H={H}: got {got}"
        return None

    return _run("solvers-vs-brute-force", _small_instances(max_order, cap), check)


def run_all(write: Callable[[str], None] = print) -> bool:
    ok = True
    for battery in (promise_battery, findpair_battery, lemma_battery, count_battery, solver_battery):
        res = battery()
        write(res.line())
        ok &= res.ok
    return ok
