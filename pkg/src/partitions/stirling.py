"""Generalized Stirling numbers S_alpha(n, k)."""
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from src.errors import DomainError

NEG_INF = -math.inf


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")


@lru_cache(maxsize=128)
def _log_stirling_table(alpha: float, n_max: int) -> np.ndarray:
    table = np.full((n_max + 1, n_max + 1), NEG_INF)
    table[1, 1] = 0.0
    for m in range(1, n_max):
        for k in range(1, m + 2):
            carry = table[m, k - 1] if k >= 2 else NEG_INF
            stay = table[m, k] + math.log(m - k * alpha) if k <= m else NEG_INF
            table[m + 1, k] = np.logaddexp(carry, stay)
    return table


def log_gen_stirling(alpha: float, n: int, k: int) -> float:
    """log S_alpha(n, k) from S(n+1,k) = S(n,k-1) + (n - k alpha) S(n,k), S(1,1) = 1."""
    _check_alpha(alpha)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    return float(_log_stirling_table(float(alpha), n)[n, k])


def gen_stirling(alpha: float, n: int, k: int) -> float:
    return math.exp(log_gen_stirling(alpha, n, k))


def _rising(a: Fraction, n: int) -> Fraction:
    """Rising factorial (a)_n in exact arithmetic."""
    out = Fraction(1)
    for i in range(n):
        out *= a + i
    return out


def gen_stirling_alternating(alpha: float, n: int, k: int) -> float:
    """S_alpha(n,k) = 1/(alpha^k k!) sum_j (-1)^j C(k,j) (-j alpha)_n, alpha > 0.

    The sum is carried out exactly on the binary value of alpha.
    """
    _check_alpha(alpha)
    if alpha == 0.0:
        raise DomainError("the alternating form needs alpha > 0")
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    a = Fraction(alpha)
    total = Fraction(0)
    for j in range(1, k + 1):
        term = math.comb(k, j) * _rising(-j * a, n)
        total += -term if j % 2 else term
    return float(total / (a**k * math.factorial(k)))


@lru_cache(maxsize=64)
def _unsigned_stirling_first(n_max: int) -> tuple:
    rows = [[0] * (n_max + 1) for _ in range(n_max + 1)]
    rows[0][0] = 1
    for m in range(1, n_max + 1):
        for k in range(1, m + 1):
            rows[m][k] = rows[m - 1][k - 1] + (m - 1) * rows[m - 1][k]
    return tuple(tuple(r) for r in rows)


def stirling_first_unsigned(n: int, k: int) -> int:
    """|s(n, k)| as an exact integer."""
    return _unsigned_stirling_first(n)[n][k]


def gen_stirling_exact(alpha: float, n: int, k: int) -> Fraction:
    """S_alpha(n, k) by the triangular recurrence in exact rational arithmetic."""
    _check_alpha(alpha)
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got n={n}, k={k}")
    a = Fraction(alpha)
    row = [Fraction(0), Fraction(1)]
    for m in range(1, n):
        nxt = [Fraction(0)] * (m + 2)
        for j in range(1, m + 2):
            carry = row[j - 1] if j >= 2 else Fraction(0)
            stay = row[j] * (m - j * a) if j <= m else Fraction(0)
            nxt[j] = carry + stay
        row = nxt
    return row[k]
