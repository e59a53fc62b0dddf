"""Quadrature oracles against closed-form total-mass densities.

Closed forms exist for the gamma family and for generalized gamma with
alpha = 1/2, whose total mass is an exponentially tilted Levy law.
"""
import math
from typing import Optional, Sequence

from scipy.special import gammaln

from src.errors import DomainError
from src.levy.bell import xi_partial
from src.levy.cumulants import psi
from src.levy.models import LevyModel
from src.numerics.envelope import QuadratureEnvelope
from src.numerics.quadrature import QuadResult, integrate_half_line, integrate_half_line_nd
from src.observability.logger import get_logger
from src.oracle.models import QuadratureRow, VerificationReport
from src.oracle.tolerances import AcceptanceTolerances, get_tolerances
from src.phibp.counts import log_hier_joint_moment
from src.phibp.models import HierModel

logger = get_logger(__name__)


def has_closed_form_density(model: LevyModel) -> bool:
    alpha, _, zeta = model.gg()
    return alpha == 0.0 or (alpha == 0.5 and zeta > 0.0)


def log_total_mass_density(model: LevyModel, lam: float, x: float) -> float:
    """log density of sigma(lam) at x."""
    if not (lam > 0.0 and x > 0.0):
        raise DomainError(f"need positive time and value, got lam={lam}, x={x}")
    alpha, theta, zeta = model.gg()
    if alpha == 0.0:
        shape = lam * theta
        return float(
            shape * math.log(zeta) + (shape - 1.0) * math.log(x) - zeta * x - gammaln(shape)
        )
    if alpha == 0.5 and zeta > 0.0:
        # Levy law with c = 2 (lam theta)^2, tilted by exp(-zeta x)
        scale = lam * theta
        return (
            math.log(scale)
            - 0.5 * math.log(math.pi)
            - 1.5 * math.log(x)
            - scale * scale / x
            - zeta * x
            + 2.0 * scale * math.sqrt(zeta)
        )
    raise DomainError(f"no closed-form total-mass density for {model.describe()}")


def quadrature_base_moment(
    model: LevyModel,
    k: int,
    u: float,
    lam: float = 1.0,
    envelope: Optional[QuadratureEnvelope] = None,
) -> QuadResult:
    """E[sigma(lam)^k exp(-u sigma(lam))] by quadrature."""
    if k < 0:
        raise DomainError(f"moment order must be nonnegative, got {k}")

    def integrand(x: float) -> float:
        return k * math.log(x) - u * x + log_total_mass_density(model, lam, x)

    return integrate_half_line(integrand, envelope)


def quadrature_oracle(
    hier: HierModel, totals: Sequence[int], envelope: Optional[QuadratureEnvelope] = None
) -> QuadResult:
    """Joint moment of one group by nested quadrature over (sigma_0(1), sigma_1)."""
    if hier.n_groups != 1:
        raise DomainError("the quadrature oracle handles one group")
    (n,) = tuple(int(v) for v in totals)
    tau0, tau1, gamma = hier.tau0, hier.taus[0], hier.gammas[0]
    if not (has_closed_form_density(tau0) and has_closed_form_density(tau1)):
        raise DomainError("the quadrature oracle needs gamma or GG(1/2) models")

    if n == 0:
        rate = psi(tau1, gamma)
        return integrate_half_line(
            lambda b: -rate * b + log_total_mass_density(tau0, 1.0, b), envelope
        )

    def integrand(point: tuple) -> float:
        b, t = point
        return (
            log_total_mass_density(tau0, 1.0, b)
            + log_total_mass_density(tau1, b, t)
            + n * math.log(t)
            - gamma * t
        )

    return integrate_half_line_nd(integrand, 2, envelope)


def _relative_error(reference: float, value: float) -> float:
    return abs(value - reference) / abs(reference)


def quadrature_oracle_check(
    hier: HierModel, totals: Sequence[int], tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    tol = tolerances or get_tolerances()
    label = f"n={list(totals)}"
    reference = math.exp(log_hier_joint_moment(hier, totals))
    result = quadrature_oracle(hier, totals)
    rel = _relative_error(reference, result.value)
    logger.debug(f"Quadrature oracle {label}: rel error {rel:.3e}", stage="quadrature_oracle")
    report = VerificationReport(
        sweep_id=f"quadrature-{label}",
        task="quadrature-oracle",
        model=hier.describe(),
        totals=list(totals),
        quadrature=[
            QuadratureRow(
                label=label,
                reference=reference,
                quadrature=result.value,
                rel_error=rel,
                abserr=result.abserr,
                neval=result.neval,
            )
        ],
    )
    report.add_criterion("quadrature_oracle", rel, tol.quadrature_oracle)
    return report


def log_gamma_family_moment(model: LevyModel, lam: float, gamma: float, n: int) -> float:
    """log E[sigma(lam)^n e^{-gamma sigma(lam)}] for the gamma family, in closed form."""
    alpha, theta, zeta = model.gg()
    if alpha != 0.0:
        raise DomainError(f"closed-form moments need the gamma family, got {model.describe()}")
    shape = lam * theta
    return float(
        gammaln(shape + n)
        - gammaln(shape)
        + shape * math.log(zeta)
        - (shape + n) * math.log(zeta + gamma)
    )


def bell_moment_check(
    model: LevyModel,
    lam: float,
    gamma: float,
    n_max: int,
    tolerances: Optional[AcceptanceTolerances] = None,
) -> VerificationReport:
    """Bell-sum moments against closed forms (gamma) or quadrature (GG with alpha = 1/2)."""
    tol = tolerances or get_tolerances()
    table = xi_partial(model, n_max, gamma)
    rows = []
    gamma_family = model.gg().alpha == 0.0
    for n in range(n_max + 1):
        bell = math.exp(table.log_moment(lam, n))
        if gamma_family:
            reference = math.exp(log_gamma_family_moment(model, lam, gamma, n))
            abserr, neval = 0.0, 0
        else:
            result = quadrature_base_moment(model, n, gamma, lam)
            reference, abserr, neval = result.value, result.abserr, result.neval
        rows.append(
            QuadratureRow(
                label=f"n={n}",
                reference=reference,
                quadrature=bell,
                rel_error=_relative_error(reference, bell),
                abserr=abserr,
                neval=neval,
            )
        )
    criterion = "bell_gamma_moment" if gamma_family else "bell_quadrature"
    report = VerificationReport(
        sweep_id=f"bell-{model.describe()}",
        task="bell-moment",
        model=model.describe(),
        quadrature=rows,
    )
    report.add_criterion(criterion, max(r.rel_error for r in rows), getattr(tol, criterion))
    return report

