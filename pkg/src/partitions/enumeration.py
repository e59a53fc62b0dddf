"""Enumeration of set partitions, compositions and integer partitions."""
import math
from collections import Counter
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from src.errors import DomainError, EnvelopeError
from src.numerics.envelope import get_numeric_envelope

SetPartition = Tuple[Tuple[int, ...], ...]


def enumerate_set_partitions(n: int) -> Iterator[SetPartition]:
    """All partitions of {1..n}, blocks in least-element order.

    Generated from restricted growth strings, so each partition appears once.
    """
    cap = get_numeric_envelope().enumeration.max_set_partition_size
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if n > cap:
        raise EnvelopeError(f"set-partition enumeration capped at n={cap}, got {n}")

    growth = [0] * n

    def emit(num_blocks: int) -> SetPartition:
        blocks: List[List[int]] = [[] for _ in range(num_blocks)]
        for label, b in enumerate(growth, start=1):
            blocks[b].append(label)
        return tuple(tuple(b) for b in blocks)

    def extend(i: int, num_blocks: int) -> Iterator[SetPartition]:
        if i == n:
            yield emit(num_blocks)
            return
        for b in range(num_blocks + 1):
            growth[i] = b
            yield from extend(i + 1, max(num_blocks, b + 1))

    growth[0] = 0
    yield from extend(1, 1)


@lru_cache(maxsize=64)
def bell_number(n: int) -> int:
    if n == 0:
        return 1
    return sum(math.comb(n - 1, k) * bell_number(k) for k in range(n))


def enumerate_compositions(n: int, r: int | None = None) -> Iterator[Tuple[int, ...]]:
    """Ordered compositions of n (into exactly r positive parts when r is given)."""
    if n < 1:
        return
    if r is None:
        for parts in range(1, n + 1):
            yield from enumerate_compositions(n, parts)
        return
    if r < 1 or r > n:
        return
    if r == 1:
        yield (n,)
        return
    for first in range(1, n - r + 2):
        for rest in enumerate_compositions(n - first, r - 1):
            yield (first,) + rest


def enumerate_integer_partitions(n: int, max_part: int | None = None) -> Iterator[Tuple[int, ...]]:
    """Partitions of n into non-increasing positive parts bounded by max_part."""
    if n == 0:
        yield ()
        return
    top = n if max_part is None else min(n, max_part)
    for first in range(top, 0, -1):
        for rest in enumerate_integer_partitions(n - first, first):
            yield (first,) + rest


def labeled_partition_count(blocks: Sequence[int]) -> int:
    """Number of set partitions of [n] whose block sizes are the multiset ``blocks``."""
    n = sum(blocks)
    denom = 1
    for b in blocks:
        denom *= math.factorial(b)
    for mult in Counter(blocks).values():
        denom *= math.factorial(mult)
    return math.factorial(n) // denom


def kolchin_multiplicity(blocks: Sequence[int]) -> Tuple[int, int]:
    """n!/(r! prod n_l!) as an exact fraction (numerator, denominator).

    Multiplies an EPPF of ordered compositions into the law of the block counts.
    """
    n = sum(blocks)
    denom = math.factorial(len(blocks))
    for b in blocks:
        denom *= math.factorial(b)
    return math.factorial(n), denom


def log_kolchin_multiplicity(blocks: Sequence[int]) -> float:
    num, den = kolchin_multiplicity(blocks)
    return math.log(num) - math.log(den)


def block_sizes(partition: SetPartition) -> Tuple[int, ...]:
    return tuple(len(b) for b in partition)
