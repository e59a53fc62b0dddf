"""Adaptive quadrature on the half line and on bounded intervals.

Half-line integrals use the map u = x / (1 + x) onto (0, 1) and QUADPACK's
adaptive Gauss-Kronrod rule (``scipy.integrate.quad``). Integrands are passed
in log scale so that the heads and tails of probability integrands never
overflow.
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

from scipy import integrate

from src.errors import QuadratureError
from src.numerics.envelope import QuadratureEnvelope, get_numeric_envelope

LogIntegrand = Callable[[float], float]

# Accept QUADPACK warnings only while the error estimate stays below this fraction.
_ACCEPT_REL_ERROR = 1e-9


@dataclass(frozen=True)
class QuadResult:
    value: float
    abserr: float
    neval: int
    warning: Optional[str] = None

    @property
    def log_value(self) -> float:
        return math.log(self.value) if self.value > 0 else -math.inf


def _settings(envelope: Optional[QuadratureEnvelope]) -> QuadratureEnvelope:
    return envelope or get_numeric_envelope().quadrature


def _run_quad(
    func: Callable[[float], float],
    a: float,
    b: float,
    envelope: QuadratureEnvelope,
    points: Optional[Sequence[float]] = None,
) -> QuadResult:
    out = integrate.quad(
        func,
        a,
        b,
        epsabs=envelope.epsabs,
        epsrel=envelope.epsrel,
        limit=envelope.limit,
        points=points,
        full_output=1,
    )
    value, abserr, info = out[0], out[1], out[2]
    message = out[3] if len(out) > 3 else None
    neval = int(info.get("neval", 0))
    if not math.isfinite(value):
        raise QuadratureError("non-finite integral", abserr=abserr, neval=neval)
    if message is not None:
        tolerance = max(_ACCEPT_REL_ERROR * abs(value), 100 * envelope.epsabs)
        if abserr > tolerance:
            raise QuadratureError(str(message).strip(), abserr=abserr, neval=neval)
    return QuadResult(value=value, abserr=abserr, neval=neval, warning=message)


def integrate_half_line(
    log_integrand: LogIntegrand,
    envelope: Optional[QuadratureEnvelope] = None,
) -> QuadResult:
    """Integral of exp(log_integrand(x)) over (0, inf)."""
    env = _settings(envelope)

    def mapped(u: float) -> float:
        if u <= 0.0 or u >= 1.0:
            return 0.0
        x = u / (1.0 - u)
        log_value = log_integrand(x) - 2.0 * math.log1p(-u)
        return math.exp(log_value) if log_value > -745.0 else 0.0

    return _run_quad(mapped, 0.0, 1.0, env)


def integrate_half_line_nd(
    log_integrand: Callable[[Tuple[float, ...]], float],
    dim: int,
    envelope: Optional[QuadratureEnvelope] = None,
) -> QuadResult:
    """Nested adaptive passes, one per axis, for integrands on (0, inf)^dim."""
    if dim < 1:
        raise ValueError("dim must be positive")
    if dim == 1:
        return integrate_half_line(lambda x: log_integrand((x,)), envelope)

    neval = 0

    def outer(x: float) -> float:
        nonlocal neval
        inner = integrate_half_line_nd(
            lambda rest: log_integrand((x,) + rest), dim - 1, envelope
        )
        neval += inner.neval
        return inner.log_value

    result = integrate_half_line(outer, envelope)
    return QuadResult(result.value, result.abserr, result.neval + neval, result.warning)


def integrate_interval(
    integrand: Callable[[float], float],
    a: float,
    b: float,
    envelope: Optional[QuadratureEnvelope] = None,
    points: Optional[Sequence[float]] = None,
) -> QuadResult:
    """Integral of a linear-scale integrand over [a, b] (b may be inf)."""
    return _run_quad(integrand, a, b, _settings(envelope), points)
