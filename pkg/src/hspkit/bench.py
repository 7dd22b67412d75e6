"""Run solvers on generated instance suites and emit audited records."""

from __future__ import annotations

import csv
import io
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .group import (
    Element,
    GroupSignature,
    closure,
    enumeration_cap,
    format_element,
    parse_signature,
)
from .oracle import CountingOracle, HspInstance, build_instance
from .solvers import (
    decide_abelian,
    decide_cyclic_prime_power,
    identify_abelian,
    identify_cyclic_prime_power,
)
from .verify import (
    ALGORITHMS,
    SMALL_GROUP_CAP,
    AuditConfig,
    audit,
    brute_force_identify,
    fit_scaling_exponent,
    iter_subgroups,
    lower_bound_checks,
)

CSV_COLUMNS = (
    "id", "sig", "gens", "orderG", "orderH", "algo", "result",
    "queries_distinct", "queries_raw", "upper_bound", "lower_bound", "pass", "ms",
)
MODES = ("all-subgroups", "random-subgroups", "trivial-only")


class CrossCheckMismatch(RuntimeError):
    """A solver disagreed with brute force."""


@dataclass
class RunRecord:
    id: str
    sig: str
    gens: str
    orderG: int
    orderH: int
    algo: str
    result: str
    queries_distinct: int
    queries_raw: int
    upper_bound: float = math.nan
    lower_bound: Optional[float] = None
    passed: bool = False
    ms: float = 0.0
    crosscheck: Optional[bool] = None

    def row(self) -> dict:
        return {
            "id": self.id,
            "sig": self.sig,
            "gens": self.gens,
            "orderG": self.orderG,
            "orderH": self.orderH,
            "algo": self.algo,
            "result": self.result,
            "queries_distinct": self.queries_distinct,
            "queries_raw": self.queries_raw,
            "upper_bound": round(self.upper_bound, 6),
            "lower_bound": "n/a" if self.lower_bound is None else round(self.lower_bound, 6),
            "pass": self.passed,
            "ms": round(self.ms, 3),
        }


@dataclass
class SuiteConfig:
    signatures: list[str]
    mode: str = "all-subgroups"
    algorithms: list[str] = field(default_factory=lambda: ["decide-abelian", "identify-abelian"])
    count: int = 5
    seed: int = 0
    small_cap: int = SMALL_GROUP_CAP
    audit: AuditConfig = field(default_factory=AuditConfig)
    debug: bool = False

    def validate(self) -> None:
        if not self.signatures:
            raise ValueError("no signatures given")
        if not self.algorithms:
            raise ValueError("no algorithms selected")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; choose from {', '.join(MODES)}")
        sigs = [parse_signature(s) for s in self.signatures]
        if self.mode == "all-subgroups":
            for s in sigs:
                if s.order > self.small_cap:
                    raise ValueError(f"all-subgroups mode needs |G| <= {self.small_cap}, {s} has {s.order}")
        if self.mode == "random-subgroups" and self.count < 1:
            raise ValueError("random-subgroups mode needs count >= 1")


def applicable(algo: str, sig: GroupSignature) -> bool:
    return sig.rank == 1 or algo not in ("decide-cyclic", "identify-cyclic")


def _solve(algo: str, oracle: CountingOracle, instance: HspInstance, debug: bool):
    if algo == "decide-cyclic":
        return decide_cyclic_prime_power(oracle)
    if algo == "identify-cyclic":
        return identify_cyclic_prime_power(oracle)
    if algo == "decide-abelian":
        return decide_abelian(oracle, debug=debug)
    if algo == "identify-abelian":
        return identify_abelian(oracle, truth=instance.hidden if debug else None)
    if algo == "brute-force":
        return brute_force_identify(oracle)
    raise ValueError(f"unknown algorithm {algo!r}")


def run_one(
    sig: GroupSignature,
    gens: Sequence[Element],
    algo: str,
    run_id: str = "0",
    audit_config: AuditConfig = AuditConfig(),
    debug: bool = False,
) -> RunRecord:
    """Run ``algo`` on a fresh oracle, cross-check against brute force, and audit."""
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}")
    if not applicable(algo, sig):
        raise ValueError(f"{algo} needs a single-factor signature, got {sig}")
    instance = build_instance(sig, gens)
    oracle = CountingOracle(instance)
    start = time.perf_counter()
    outcome = _solve(algo, oracle, instance, debug)
    ms = (time.perf_counter() - start) * 1000

    if algo.startswith("decide"):
        result = outcome.verdict.value
        nontrivial = outcome.verdict.value == "NonTrivial"
    else:
        recovered = outcome if algo == "brute-force" else outcome.recovered
        result = str(recovered)

    crosscheck = None
    if sig.order <= enumeration_cap():
        truth = brute_force_identify(CountingOracle(instance))
        if algo.startswith("decide"):
            crosscheck = nontrivial == (truth.order > 1)
        else:
            crosscheck = recovered == truth

    rec = RunRecord(
        id=run_id,
        sig=str(sig),
        gens=";".join(format_element(g) for g in gens),
        orderG=sig.order,
        orderH=instance.hidden.order,
        algo=algo,
        result=result,
        queries_distinct=oracle.count,
        queries_raw=oracle.raw_calls,
        ms=ms,
        crosscheck=crosscheck,
    )
    (report,) = audit([rec], audit_config)
    rec.upper_bound = report.upper_bound_value
    rec.lower_bound = report.lower_bound_value
    rec.passed = report.passed and crosscheck is not False
    return rec


def random_generator_lists(sig: GroupSignature, count: int, rng: random.Random) -> list[list[Element]]:
    """``count`` draws of 1-3 uniform elements, deduplicated by generated subgroup."""
    seen = set()
    out = []
    for _ in range(count):
        gens = [tuple(rng.randrange(m) for m in sig.moduli) for _ in range(rng.randint(1, 3))]
        key = closure(sig, gens)
        if key in seen:
            continue
        seen.add(key)
        out.append(gens)
    return out


def generate_instances(config: SuiteConfig) -> Iterator[tuple[GroupSignature, list[Element]]]:
    rng = random.Random(config.seed)
    for text in config.signatures:
        sig = parse_signature(text)
        if config.mode == "trivial-only":
            yield sig, []
        elif config.mode == "all-subgroups":
            for H in sorted(iter_subgroups(sig), key=lambda s: (s.order, s.canonical)):
                yield sig, list(H.generators)
        else:
            for gens in random_generator_lists(sig, config.count, rng):
                yield sig, gens


def _task(args) -> RunRecord:
    sig_text, gens, algo, run_id, audit_config, debug = args
    return run_one(parse_signature(sig_text), gens, algo, run_id, audit_config, debug)


def run_suite(config: SuiteConfig, jobs: int = 1) -> list[RunRecord]:
    """Records ordered by instance id, then by the configured algorithm order."""
    config.validate()
    tasks = []
    for n, (sig, gens) in enumerate(generate_instances(config)):
        for algo in config.algorithms:
            if applicable(algo, sig):
                tasks.append((str(sig), gens, algo, f"{n:05d}", config.audit, config.debug))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_task, tasks, chunksize=8))
    return [_task(t) for t in tasks]


def _csv_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def records_to_csv(records: Iterable[RunRecord], include_ms: bool = True) -> str:
    columns = CSV_COLUMNS if include_ms else CSV_COLUMNS[:-1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        row = rec.row()
        writer.writerow([_csv_value(row[c]) for c in columns])
    return buf.getvalue()


def records_to_json(records: Iterable[RunRecord]) -> str:
    return json.dumps([rec.row() for rec in records], indent=1) + "\n"


def summarize(records: Sequence[RunRecord], write: Callable[[str], None] = print) -> bool:
    """Print per-algorithm totals, scaling fits and lower-bound checks; True when all pass."""
    ok = True
    algos = sorted({r.algo for r in records}, key=ALGORITHMS.index)
    write(f"{len(records)} records")
    for algo in algos:
        recs = [r for r in records if r.algo == algo]
        passed = sum(r.passed for r in recs)
        checked = [r for r in recs if r.crosscheck is not None]
        agree = sum(bool(r.crosscheck) for r in checked)
        worst = max(recs, key=lambda r: r.queries_distinct / r.upper_bound)
        write(
            f"{algo}: {passed}/{len(recs)} pass, brute-force agreement {agree}/{len(checked)}, "
            f"worst queries/bound {worst.queries_distinct}/{worst.upper_bound:.1f} (id {worst.id})"
        )
        ok &= passed == len(recs) and agree == len(checked)
        points = [(r.orderG / r.orderH, r.queries_distinct) for r in recs if r.orderG / r.orderH >= 2]
        try:
            slope = fit_scaling_exponent(points)
        except ValueError as exc:
            write(f"  scaling exponent: n/a ({exc})")
        else:
            write(f"  scaling exponent (log queries vs log |G|/|H|): {slope:.4f}")
    for chk in lower_bound_checks(records):
        if chk.lower_bound_value is None:
            status = "n/a"
        else:
            status = "ok" if chk.passed else "VIOLATED"
            ok &= bool(chk.passed)
        lb = "n/a" if chk.lower_bound_value is None else f"{chk.lower_bound_value:.3f}"
        write(f"  class {chk.sig} |H|={chk.orderH} {chk.algo}: worst {chk.worst} over {chk.instances}, lower bound {lb} [{status}]")
    return ok


def parse_family(text: str) -> list[str]:
    """``"2:4-10"`` -> signatures ``Z_2^4`` .. ``Z_2^10``."""
    try:
        p, rng = text.split(":")
        lo, hi = (int(x) for x in rng.split("-"))
    except ValueError:
        raise ValueError(f"family must look like 'p:nmin-nmax', got {text!r}") from None
    if lo < 1 or hi < lo:
        raise ValueError(f"bad family range in {text!r}")
    return [",".join([p] * n) for n in range(lo, hi + 1)]
