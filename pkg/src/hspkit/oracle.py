"""Hidden subgroup instances and the query-counting oracle solvers talk to."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

from .group import (
    CapExceeded,
    Element,
    GroupSignature,
    Subgroup,
    add,
    closure,
    enumeration_cap,
    format_element,
    parse_element,
    parse_signature,
)

Label = Hashable


@dataclass(frozen=True, eq=False)
class HspInstance:
    sig: GroupSignature
    hidden: Subgroup
    labeler: Callable[[Element], Label] | None = None
    # memo only: labels of every coset member seen so far
    _memo: dict = field(default_factory=dict, repr=False)

    def label_of(self, g: Element) -> Label:
        if self.labeler is not None:
            return self.labeler(g)
        g = self.sig.check(g)
        try:
            return self._memo[g]
        except KeyError:
            pass
        coset = [add(self.sig, g, h) for h in self.hidden.elements]
        label = format_element(min(coset))
        if len(self._memo) + len(coset) <= enumeration_cap():
            self._memo.update(dict.fromkeys(coset, label))
        return label

    @property
    def generators(self) -> tuple[Element, ...]:
        return self.hidden.generators


def coset_label(sig: GroupSignature, hidden: Subgroup, g: Element) -> str:
    """Lexicographically least element of ``g + hidden``, as an element string."""
    g = sig.check(g)
    return format_element(min(add(sig, g, h) for h in hidden.elements))


def build_instance(sig: GroupSignature, gens: Iterable[Sequence[int]], cap: int | None = None) -> HspInstance:
    return HspInstance(sig, closure(sig, gens, cap))


def verify_promise(instance: HspInstance, cap: int | None = None) -> bool:
    """Exhaustively check ``f(a) == f(b)  <=>  a - b in hidden``.

    Equivalent to: ``f`` is invariant under translation by each generator of
    ``hidden`` and takes exactly ``|G|/|H|`` distinct values.
    """
    if cap is None:
        cap = enumeration_cap()
    sig = instance.sig
    if sig.order > cap:
        raise CapExceeded(f"|G| = {sig.order} exceeds cap {cap}")
    labels = {g: instance.label_of(g) for g in sig.elements()}
    gens = instance.hidden.generators
    for g, lab in labels.items():
        for s in gens:
            if labels[add(sig, g, s)] != lab:
                return False
    return len(set(labels.values())) * instance.hidden.order == sig.order


class CountingOracle:
    """Caching query interface; ``count`` is the number of distinct elements asked."""

    def __init__(self, instance: HspInstance):
        self._instance = instance
        self._cache: dict[Element, Label] = {}
        self.raw_calls = 0

    @property
    def sig(self) -> GroupSignature:
        return self._instance.sig

    @property
    def count(self) -> int:
        return len(self._cache)

    def query(self, g: Sequence[int]) -> Label:
        self.raw_calls += 1
        g = self.sig.check(g)
        try:
            return self._cache[g]
        except KeyError:
            label = self._cache[g] = self._instance.label_of(g)
            return label

    def queried(self, g: Sequence[int]) -> bool:
        return tuple(g) in self._cache


def load_instance_file(path: str | Path) -> tuple[GroupSignature, list[Element]]:
    """Read ``{"sig": ..., "generators": [...]}``; labels are recomputed by the caller."""
    data = json.loads(Path(path).read_text())
    if set(data) != {"sig", "generators"}:
        raise ValueError(f"instance file keys must be exactly 'sig' and 'generators', got {sorted(data)}")
    sig = parse_signature(data["sig"])
    gens = [parse_element(s, sig) for s in data["generators"]]
    return sig, gens


def dump_instance_file(path: str | Path, sig: GroupSignature, gens: Iterable[Element]) -> None:
    data = {"sig": str(sig), "generators": [format_element(g) for g in gens]}
    Path(path).write_text(json.dumps(data) + "\n")
