"""Exhaustive enumeration of nested configurations with exact multiplicities.

A canonical configuration lists, per species, one non-increasing integer
partition per group (empty where the species has no individuals in that
group); species are unordered. Its multiplicity is the number of labeled
nested set partitions it stands for.
"""
import math
from collections import Counter
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from src.errors import DomainError, EnvelopeError
from src.numerics.envelope import get_numeric_envelope
from src.observability.logger import get_logger
from src.partitions.enumeration import (
    bell_number,
    enumerate_integer_partitions,
    labeled_partition_count,
)
from src.phibp.models import NestedConfig

logger = get_logger(__name__)

SpeciesType = Tuple[Tuple[int, ...], ...]


def _check_totals(totals: Sequence[int]) -> Tuple[int, ...]:
    totals = tuple(int(n) for n in totals)
    if not totals or any(n < 0 for n in totals) or sum(totals) < 1:
        raise DomainError(f"totals must be nonnegative with a positive sum, got {totals}")
    cap = get_numeric_envelope().enumeration.max_total_count
    if sum(totals) > cap:
        raise EnvelopeError(f"enumeration is capped at a total count of {cap}, got {sum(totals)}")
    return totals


@lru_cache(maxsize=64)
def _species_types(totals: Tuple[int, ...]) -> Tuple[SpeciesType, ...]:
    per_group: List[List[Tuple[int, ...]]] = []
    for n_j in totals:
        options: List[Tuple[int, ...]] = [()]
        for m in range(1, n_j + 1):
            options.extend(enumerate_integer_partitions(m))
        per_group.append(options)

    types: List[SpeciesType] = [()]
    for options in per_group:
        types = [t + (p,) for t in types for p in options]
    return tuple(t for t in types if any(t))


def _type_counts(species_type: SpeciesType) -> Tuple[int, ...]:
    return tuple(sum(p) for p in species_type)


def nested_multiplicity(species: Sequence[SpeciesType]) -> int:
    """Number of labeled nested partitions behind a canonical configuration."""
    n_groups = len(species[0])
    totals = [sum(sum(sp[j]) for sp in species) for j in range(n_groups)]
    numerator = math.prod(math.factorial(n) for n in totals)
    denominator = 1
    for sp in species:
        for parts in sp:
            denominator *= math.prod(math.factorial(c) for c in parts)
            denominator *= math.prod(math.factorial(m) for m in Counter(parts).values())
    denominator *= math.prod(math.factorial(m) for m in Counter(species).values())
    return numerator // denominator


def _multisets(
    types: Tuple[SpeciesType, ...], remaining: Tuple[int, ...], start: int
) -> Iterator[List[SpeciesType]]:
    if not any(remaining):
        yield []
        return
    for idx in range(start, len(types)):
        counts = _type_counts(types[idx])
        if any(c > r for c, r in zip(counts, remaining)):
            continue
        left = tuple(r - c for r, c in zip(remaining, counts))
        for rest in _multisets(types, left, idx):
            yield [types[idx]] + rest


def enumerate_nested_configs(totals: Sequence[int]) -> Iterator[Tuple[NestedConfig, int]]:
    """Every canonical nested configuration with group totals n_j, exactly once."""
    totals = _check_totals(totals)
    types = _species_types(totals)
    emitted = 0
    for species in _multisets(types, totals, 0):
        emitted += 1
        config = NestedConfig.from_species([list(sp) for sp in species])
        yield config, nested_multiplicity(species)
    logger.debug(f"Enumerated {emitted} nested configurations", totals=list(totals))


def fine_multiplicity(config: NestedConfig) -> int:
    """Labeled fine partitions with the same block sizes per group."""
    return math.prod(labeled_partition_count(config.fine_blocks(j)) for j in range(config.n_groups))


def coarse_multiplicity(config: NestedConfig) -> int:
    """Labeled species partitions with the same count vectors."""
    vectors = [config.species_counts(ell) for ell in range(config.r)]
    out = math.prod(math.factorial(n) for n in config.group_totals)
    for vec in vectors:
        out //= math.prod(math.factorial(n) for n in vec)
    out //= math.prod(math.factorial(m) for m in Counter(vectors).values())
    return out


def fine_key(config: NestedConfig) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(sorted(config.fine_blocks(j), reverse=True)) for j in range(config.n_groups))


def coarse_key(config: NestedConfig) -> Tuple[Tuple[int, ...], ...]:
    return tuple(sorted((config.species_counts(ell) for ell in range(config.r)), reverse=True))


@lru_cache(maxsize=None)
def a000258(n: int) -> int:
    """Pairs (partition of [n], partition of its blocks): a(n) = sum C(n-1,k-1) B(k) a(n-k)."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n == 0:
        return 1
    return sum(math.comb(n - 1, k - 1) * bell_number(k) * a000258(n - k) for k in range(1, n + 1))


def enumeration_count(totals: Sequence[int]) -> int:
    """Sum of multiplicities over the enumeration: the number of labeled nested partitions."""
    return sum(mult for _, mult in enumerate_nested_configs(totals))
