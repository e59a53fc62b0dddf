"""Chinese-restaurant sampling of PD(beta, theta) partitions."""
from typing import List

import numpy as np

from src.errors import DomainError


def sample_crp(beta: float, theta: float, n: int, rng: np.random.Generator) -> List[int]:
    """Table sizes after seating n customers.

    Customer m+1 opens a new table with probability (theta + k beta)/(theta + m)
    and joins table i with probability (n_i - beta)/(theta + m).
    """
    if not 0.0 <= beta < 1.0 or not theta > -beta:
        raise DomainError(f"invalid PD parameters beta={beta}, theta={theta}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    tables: List[int] = [1]
    for m in range(1, n):
        k = len(tables)
        weights = np.empty(k + 1)
        weights[:k] = np.asarray(tables, dtype=float) - beta
        weights[k] = theta + k * beta
        choice = int(rng.choice(k + 1, p=weights / (theta + m)))
        if choice == k:
            tables.append(1)
        else:
            tables[choice] += 1
    return tables


def fragment_blocks(
    blocks: List[int], alpha: float, theta: float, rng: np.random.Generator
) -> List[List[int]]:
    """Split every block independently by a PD(alpha, theta) partition."""
    return [sample_crp(alpha, theta, b, rng) for b in blocks]
