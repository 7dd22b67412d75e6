"""Finite Abelian groups given as products of prime-power cyclic factors.

Elements are plain tuples of residues, one per factor.  Every operation
returns canonical residues in ``[0, p_i**k_i)``.
"""

from __future__ import annotations

import itertools
import os
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Tuple

Element = Tuple[int, ...]

DEFAULT_CAP = 10**6
CAP_ENV = "HSPKIT_CAP"


class CapExceeded(RuntimeError):
    """An enumeration would grow past the configured element cap."""


def enumeration_cap() -> int:
    """Current enumeration cap; ``HSPKIT_CAP`` overrides the default."""
    value = os.environ.get(CAP_ENV)
    if value is None or value == "":
        return DEFAULT_CAP
    cap = int(value)
    if cap < 1:
        raise ValueError(f"{CAP_ENV} must be a positive integer, got {value!r}")
    return cap


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
# the bases above make Miller-Rabin exact below this bound
_MR_LIMIT = 3_317_044_064_679_887_385_961_981


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    if n >= _MR_LIMIT:
        raise ValueError(f"primality of {n} is outside the deterministic range")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class GroupSignature:
    """``Z_{p_1^k_1} x ... x Z_{p_l^k_l}`` in the order the factors were given."""

    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        factors = tuple((int(p), int(k)) for p, k in self.factors)
        if not factors:
            raise ValueError("a signature needs at least one factor")
        for p, k in factors:
            if not is_prime(p):
                raise ValueError(f"factor base {p} is not prime")
            if k < 1:
                raise ValueError(f"factor exponent must be >= 1, got {p}^{k}")
        object.__setattr__(self, "factors", factors)

    @cached_property
    def moduli(self) -> Tuple[int, ...]:
        return tuple(p**k for p, k in self.factors)

    @property
    def rank(self) -> int:
        return len(self.factors)

    @cached_property
    def order(self) -> int:
        n = 1
        for m in self.moduli:
            n *= m
        return n

    @property
    def identity(self) -> Element:
        return (0,) * len(self.factors)

    @property
    def exponents(self) -> Tuple[int, ...]:
        return tuple(k for _, k in self.factors)

    def unit(self, i: int) -> Element:
        """The 1-based ``i``-th unit vector."""
        e = [0] * self.rank
        e[i - 1] = 1
        return tuple(e)

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(m) for m in self.moduli))

    def check(self, a: Sequence[int]) -> Element:
        """Validate length and reduce ``a`` to canonical residues."""
        if len(a) != self.rank:
            raise ValueError(
                f"element {tuple(a)} has {len(a)} coordinates, signature {self} has {self.rank}"
            )
        return tuple(int(x) % m for x, m in zip(a, self.moduli))

    def __str__(self) -> str:
        return ",".join(str(p) if k == 1 else f"{p}^{k}" for p, k in self.factors)


_FACTOR_RE = re.compile(r"([0-9]+)(?:\^([0-9]+))?")


def parse_signature(text: str) -> GroupSignature:
    """Parse ``"2^3,3^2"``-style text.  Whitespace is not allowed."""
    if not text:
        raise ValueError("empty signature")
    factors = []
    for token in text.split(","):
        m = _FACTOR_RE.fullmatch(token)
        if m is None:
            raise ValueError(f"malformed factor {token!r} in signature {text!r}")
        p = int(m.group(1))
        k = int(m.group(2)) if m.group(2) is not None else 1
        factors.append((p, k))
    return GroupSignature(tuple(factors))


def format_element(a: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in a) + ")"


_ELEMENT_RE = re.compile(r"\((-?[0-9]+(?:,-?[0-9]+)*)\)")


def parse_element(text: str, sig: GroupSignature) -> Element:
    m = _ELEMENT_RE.fullmatch(text.strip())
    if m is None:
        raise ValueError(f"malformed element {text!r}")
    return sig.check([int(x) for x in m.group(1).split(",")])


def parse_elements(text: str, sig: GroupSignature) -> list[Element]:
    """Semicolon-separated element strings; the empty string means no elements."""
    text = text.strip()
    if not text:
        return []
    return [parse_element(t, sig) for t in text.split(";")]


def _conform(sig: GroupSignature, *xs: Sequence[int]) -> None:
    for x in xs:
        if len(x) != sig.rank:
            raise ValueError(
                f"element {tuple(x)} has {len(x)} coordinates, signature {sig} has {sig.rank}"
            )


def add(sig: GroupSignature, a: Element, b: Element) -> Element:
    _conform(sig, a, b)
    return tuple((x + y) % m for x, y, m in zip(a, b, sig.moduli))


def neg(sig: GroupSignature, a: Element) -> Element:
    _conform(sig, a)
    return tuple(-x % m for x, m in zip(a, sig.moduli))


def sub(sig: GroupSignature, a: Element, b: Element) -> Element:
    return add(sig, a, neg(sig, b))


def scalar_mul(sig: GroupSignature, c: int, a: Element) -> Element:
    _conform(sig, a)
    return tuple(c * x % m for x, m in zip(a, sig.moduli))


def max_nonzero_index(a: Sequence[int]) -> int:
    """1-based index of the last nonzero coordinate, 0 for the identity."""
    for i in range(len(a), 0, -1):
        if a[i - 1] != 0:
            return i
    return 0


@dataclass(frozen=True, eq=False)
class Subgroup:
    """An enumerated subgroup.  Equality compares the element sets."""

    sig: GroupSignature
    generators: Tuple[Element, ...]
    elements: frozenset = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def canonical(self) -> Tuple[Element, ...]:
        return tuple(sorted(self.elements))

    def __contains__(self, g) -> bool:
        return tuple(g) in self.elements

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.sig == other.sig and self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash((self.sig, self.canonical))

    def __str__(self) -> str:
        return "{" + ",".join(format_element(e) for e in self.canonical) + "}"

    def is_trivial(self) -> bool:
        return len(self.elements) == 1


def extend_subgroup(
    sig: GroupSignature, elements: frozenset | set, g: Element, cap: int | None = None
) -> frozenset:
    """Elements of ``<elements> + <g>`` given that ``elements`` is already a subgroup.

    Adds whole cosets ``elements + c*g`` until a multiple of ``g`` falls back
    into the current set.
    """
    if cap is None:
        cap = enumeration_cap()
    if g in elements:
        return frozenset(elements)
    base = list(elements)
    out = set(elements)
    step = g
    while step not in elements:
        if len(out) + len(base) > cap:
            raise CapExceeded(f"subgroup closure exceeds cap {cap} in {sig}")
        out.update(add(sig, h, step) for h in base)
        step = add(sig, step, g)
    return frozenset(out)


def closure(sig: GroupSignature, gens: Iterable[Sequence[int]], cap: int | None = None) -> Subgroup:
    gens = tuple(sig.check(g) for g in gens)
    elements = frozenset([sig.identity])
    for g in gens:
        elements = extend_subgroup(sig, elements, g, cap)
    return Subgroup(sig, gens, elements)


def subgroup_from_elements(sig: GroupSignature, elements: Iterable[Element]) -> Subgroup:
    """Wrap a set already known to be a subgroup, picking a small generating set."""
    elements = frozenset(elements)
    gens = []
    current: frozenset = frozenset([sig.identity])
    for e in sorted(elements):
        if e not in current:
            gens.append(e)
            current = extend_subgroup(sig, current, e, cap=max(len(elements), 1))
    if current != elements:
        raise ValueError("element set is not closed under addition")
    return Subgroup(sig, tuple(gens), elements)


def prefix_subgroup(H: Subgroup, i: int) -> Subgroup:
    """``{h in H : max_nonzero_index(h) <= i}``."""
    if not 0 <= i <= H.sig.rank:
        raise IndexError(f"prefix index {i} outside [0, {H.sig.rank}]")
    kept = frozenset(h for h in H.elements if max_nonzero_index(h) <= i)
    return subgroup_from_elements(H.sig, kept)


@dataclass(frozen=True)
class ExponentVector:
    """Exponents ``j_i`` of the box ``prod {0, ..., p_i**j_i - 1}`` inside a group."""

    exps: Tuple[int, ...]

    def validate(self, sig: GroupSignature) -> None:
        if len(self.exps) != sig.rank:
            raise ValueError(f"exponent vector {self.exps} does not match {sig}")
        for j, k in zip(self.exps, sig.exponents):
            if not 0 <= j <= k:
                raise ValueError(f"exponent vector {self.exps} out of range for {sig}")

    def ranges(self, sig: GroupSignature) -> Tuple[int, ...]:
        return tuple(p**j for (p, _), j in zip(sig.factors, self.exps))

    def size(self, sig: GroupSignature) -> int:
        n = 1
        for m in self.ranges(sig):
            n *= m
        return n

    def with_exp(self, i: int, j: int) -> "ExponentVector":
        """Copy with the 1-based ``i``-th exponent replaced by ``j``."""
        e = list(self.exps)
        e[i - 1] = j
        return ExponentVector(tuple(e))

    @classmethod
    def zeros(cls, sig: GroupSignature) -> "ExponentVector":
        return cls((0,) * sig.rank)

    @classmethod
    def prefix(cls, sig: GroupSignature, i: int) -> "ExponentVector":
        """Exponents of ``G_i``: the full first ``i`` factors, nothing after."""
        ks = sig.exponents
        return cls(tuple(ks[:i]) + (0,) * (sig.rank - i))


def representative_set_elements(
    sig: GroupSignature, v: ExponentVector, cap: int | None = None
) -> set[Element]:
    if cap is None:
        cap = enumeration_cap()
    v.validate(sig)
    if v.size(sig) > cap:
        raise CapExceeded(f"|V| = {v.size(sig)} exceeds cap {cap}")
    return set(itertools.product(*(range(m) for m in v.ranges(sig))))
