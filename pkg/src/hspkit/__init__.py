"""Deterministic query algorithms for the Abelian hidden subgroup problem."""

from .group import (
    ExponentVector,
    GroupSignature,
    Subgroup,
    closure,
    parse_signature,
)
from .oracle import CountingOracle, HspInstance, build_instance
from .solvers import (
    decide_abelian,
    decide_cyclic_prime_power,
    find_pair,
    identify_abelian,
    identify_cyclic_prime_power,
)

__all__ = [
    "CountingOracle",
    "ExponentVector",
    "GroupSignature",
    "HspInstance",
    "Subgroup",
    "build_instance",
    "closure",
    "decide_abelian",
    "decide_cyclic_prime_power",
    "find_pair",
    "identify_abelian",
    "identify_cyclic_prime_power",
    "parse_signature",
]
