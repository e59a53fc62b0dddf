"""Mixed truncated Poisson count laws and their inverse-CDF sampler."""
import math
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp

from src.errors import DomainError
from src.levy.cumulants import check_gamma, log_psi, log_psi_cumulant
from src.levy.models import LevyModel
from src.numerics.envelope import MtPEnvelope, get_numeric_envelope

_CHUNK = 1024


def log_mtp_pmf(model: LevyModel, gamma: float, c: int) -> float:
    """log P(C = c) = log[gamma^c psi^(c)(gamma) / (c! psi(gamma))]."""
    if c < 1:
        raise DomainError(f"count must be >= 1, got {c}")
    gamma = check_gamma(gamma)
    return (
        c * math.log(gamma)
        + log_psi_cumulant(model, c, gamma)
        - float(gammaln(c + 1))
        - log_psi(model, gamma)
    )


def mtp_pmf(model: LevyModel, gamma: float, c: int) -> float:
    return math.exp(log_mtp_pmf(model, gamma, c))


def _log_pmf_block(model: LevyModel, gamma: float, start: int, stop: int) -> np.ndarray:
    alpha, theta, zeta = model.gg()
    c = np.arange(start, stop, dtype=float)
    return (
        c * math.log(gamma)
        + math.log(theta)
        + gammaln(c - alpha)
        - gammaln(1.0 - alpha)
        + (alpha - c) * math.log(zeta + gamma)
        - gammaln(c + 1.0)
        - log_psi(model, gamma)
    )


def log_sibuya_survival(alpha: float, k: np.ndarray) -> np.ndarray:
    """log P(C > k) for the Sibuya(alpha) law."""
    k = np.asarray(k, dtype=float)
    return gammaln(k + 1.0 - alpha) - gammaln(1.0 - alpha) - gammaln(k + 1.0)


def log_mtp_survival(model: LevyModel, gamma: float, k: int) -> float:
    """log P(C > k). Closed form for Sibuya laws, a direct tail sum otherwise."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    gamma = check_gamma(gamma)
    if k == 0:
        return 0.0
    if model.heavy_tailed:
        return float(log_sibuya_survival(model.gg().alpha, np.array(k)))
    total = -math.inf
    start = k + 1
    while True:
        block = _log_pmf_block(model, gamma, start, start + _CHUNK)
        total = float(np.logaddexp(total, logsumexp(block)))
        # terms decay geometrically past the mode
        if block[-1] < total + math.log(1e-17) and block[-1] <= block[0]:
            return total
        start += _CHUNK


class MtPSampler:
    """Inverse-CDF sampler for MtP(tau, gamma).

    The head of the law is tabulated until the cumulative reaches
    1 - tail_epsilon or the table cap. Uniforms beyond the table are resolved
    by bisection on the closed-form survival when the law is Sibuya, and by
    continuing the table otherwise.
    """

    def __init__(self, model: LevyModel, gamma: float, envelope: MtPEnvelope | None = None):
        self.model = model
        self.gamma = check_gamma(gamma)
        self.envelope = envelope or get_numeric_envelope().mtp
        self.heavy = model.heavy_tailed
        self.cdf = self._build_table()

    def _build_table(self) -> np.ndarray:
        eps = self.envelope.tail_epsilon
        blocks = []
        total = 0.0
        start = 1
        while start <= self.envelope.table_cap:
            stop = min(start + _CHUNK, self.envelope.table_cap + 1)
            pmf = np.exp(_log_pmf_block(self.model, self.gamma, start, stop))
            blocks.append(pmf)
            total += float(pmf.sum())
            start = stop
            if total >= 1.0 - eps:
                break
        pmf = np.concatenate(blocks)
        cdf = np.cumsum(pmf)
        if not self.heavy and cdf[-1] >= 1.0 - eps:
            # renormalize the capped light tail
            cdf = cdf / cdf[-1]
        return cdf

    @property
    def table_size(self) -> int:
        return int(self.cdf.size)

    def pmf_table(self) -> np.ndarray:
        return np.diff(self.cdf, prepend=0.0)

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray | int:
        u = rng.random(size)
        draws = self.invert(np.atleast_1d(u))
        if size is None:
            return int(draws[0])
        return draws

    def invert(self, u: np.ndarray) -> np.ndarray:
        out = np.searchsorted(self.cdf, u, side="left").astype(np.int64) + 1
        beyond = out > self.cdf.size
        if beyond.any():
            out[beyond] = self._tail(u[beyond])
        return out

    def _tail(self, u: np.ndarray) -> np.ndarray:
        if self.heavy:
            alpha = self.model.gg().alpha
            return _sibuya_tail_bisection(alpha, 1.0 - u, self.cdf.size)
        return self._light_tail_walk(u)

    def _light_tail_walk(self, u: np.ndarray) -> np.ndarray:
        cdf_end = float(self.cdf[-1])
        start = self.cdf.size + 1
        result = np.zeros(u.size, dtype=np.int64)
        pending = np.ones(u.size, dtype=bool)
        while pending.any():
            pmf = np.exp(_log_pmf_block(self.model, self.gamma, start, start + _CHUNK))
            cdf = cdf_end + np.cumsum(pmf)
            idx = np.searchsorted(cdf, u[pending], side="left")
            found = idx < cdf.size
            positions = np.flatnonzero(pending)
            result[positions[found]] = start + idx[found]
            pending[positions[found]] = False
            cdf_end = float(cdf[-1])
            start += _CHUNK
            if pmf[-1] == 0.0 and pending.any():
                # the remaining mass is below double resolution
                result[pending] = start
                break
        return result


def _sibuya_tail_bisection(alpha: float, v: np.ndarray, k_low: int) -> np.ndarray:
    """Smallest k >= k_low with P(C > k) <= v, vectorised."""
    log_v = np.log(v)
    lo = np.full(v.size, float(k_low))
    hi = np.full(v.size, float(2 * k_low))
    grow = log_sibuya_survival(alpha, hi) > log_v
    while grow.any():
        hi[grow] *= 2.0
        grow = log_sibuya_survival(alpha, hi) > log_v
        if np.any(hi > 2.0**62):
            hi = np.minimum(hi, 2.0**62)
            break
    # invariant: S(lo) > v >= S(hi)
    while True:
        open_ = hi - lo > 1.0
        if not open_.any():
            break
        mid = np.floor((lo + hi) / 2.0)
        above = log_sibuya_survival(alpha, mid) > log_v
        lo = np.where(open_ & above, mid, lo)
        hi = np.where(open_ & ~above, mid, hi)
    return hi.astype(np.int64)


@lru_cache(maxsize=256)
def get_mtp_sampler(model: LevyModel, gamma: float) -> MtPSampler:
    return MtPSampler(model, gamma)
