"""Partial Bell sums of exponential cumulants.

Xi^[n]_r(tau, gamma) is the coefficient of lambda^r in
E[sigma(lambda)^n e^{-gamma sigma(lambda)}] e^{lambda psi(gamma)}, i.e. the
partial Bell polynomial B_{n,r} evaluated at the cumulants psi^(k)(gamma).
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from src.errors import DomainError
from src.levy.cumulants import cumulant_table, psi
from src.levy.models import LevyModel

NEG_INF = -math.inf


@dataclass(frozen=True)
class BellTable:
    """Log partial Bell sums for every count m <= n.

    ``log_xi_partial[m, r]`` holds log Xi^[m]_r; entries with r > m or r = 0 < m
    are -inf and ``log_xi_partial[0, 0] = 0``.
    """

    model: LevyModel
    gamma: float
    n: int
    log_xi_partial: np.ndarray

    def log_xi(self, r: int, m: int | None = None) -> float:
        m = self.n if m is None else m
        return float(self.log_xi_partial[m, r])

    def log_xi_total(self, lam: float, m: int | None = None) -> float:
        """log Xi^[m](lam tau, gamma); Xi^[0] = 1."""
        m = self.n if m is None else m
        if m > self.n:
            raise DomainError(f"table holds counts up to {self.n}, asked for {m}")
        if m == 0:
            return 0.0
        if not lam > 0.0:
            raise DomainError(f"lambda must be positive, got {lam}")
        r = np.arange(1, m + 1)
        return float(logsumexp(r * math.log(lam) + self.log_xi_partial[m, 1 : m + 1]))

    def log_moment(self, lam: float, m: int | None = None) -> float:
        """log E[sigma(lam)^m exp(-gamma sigma(lam))]."""
        return -lam * psi(self.model, self.gamma) + self.log_xi_total(lam, m)


def _bell_recurrence(log_x: np.ndarray, n: int) -> np.ndarray:
    table = np.full((n + 1, n + 1), NEG_INF)
    table[0, 0] = 0.0
    for m in range(1, n + 1):
        # B_{m,r} = sum_i C(m-1, i-1) x_i B_{m-i, r-1}
        i = np.arange(1, m + 1)
        log_choose = gammaln(m) - gammaln(i) - gammaln(m - i + 1)
        head = log_choose + log_x[:m]
        for r in range(1, m + 1):
            upper = m - r + 1
            terms = head[:upper] + table[m - i[:upper], r - 1]
            table[m, r] = logsumexp(terms)
    return table


@lru_cache(maxsize=4096)
def xi_partial(model: LevyModel, n: int, gamma: float) -> BellTable:
    if n < 0:
        raise DomainError(f"count must be nonnegative, got {n}")
    log_x = np.asarray(cumulant_table(model, gamma, max(n, 1)).log_psi_c)
    return BellTable(model=model, gamma=gamma, n=n, log_xi_partial=_bell_recurrence(log_x, n))


def log_base_moment(model: LevyModel, k: int, u: float) -> float:
    """log E[sigma(1)^k exp(-u sigma(1))]."""
    return xi_partial(model, k, u).log_moment(1.0, k)
