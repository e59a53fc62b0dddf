"""Monte-Carlo comparison of sampled counts against the exact count laws."""
import itertools
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.errors import DomainError
from src.levy.mtp import mtp_pmf
from src.observability.logger import get_logger
from src.oracle.models import MCRow, VerificationReport
from src.oracle.tolerances import AcceptanceTolerances, get_tolerances
from src.phibp.counts import (
    allocation_pmf,
    fragment_count_pmf,
    joint_count_pmf,
    species_count_pmf,
)
from src.phibp.models import HierModel
from src.sampler.coupled import CountSummary, sample_count_summary

logger = get_logger(__name__)

MIN_EXPECTED = 5.0

DEFAULT_STATISTICS = ("phi", "x_tilde", "first_block", "fine_counts", "totals", "species_counts")


@dataclass(frozen=True)
class ChiSquareResult:
    chi2: float
    dof: int
    p_value: float
    tv: float


def chi_square_pooled(observed: np.ndarray, probs: np.ndarray) -> ChiSquareResult:
    """Goodness of fit on a truncated support plus a tail bin.

    ``observed`` has one entry per support point followed by the count of draws
    outside the support. Bins whose expected count is below 5 are pooled into
    the tail; a thin tail is folded into the last kept bin.
    """
    observed = np.asarray(observed, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if observed.size != probs.size + 1:
        raise DomainError("observed needs one more entry (the tail) than probs")
    total = observed.sum()
    if total <= 0:
        raise DomainError("no observations")
    full_probs = np.append(probs, max(0.0, 1.0 - float(probs.sum())))
    tv = 0.5 * float(np.abs(observed / total - full_probs).sum())

    expected = total * full_probs
    keep = expected[:-1] >= MIN_EXPECTED
    pooled_obs = np.append(observed[:-1][keep], observed[:-1][~keep].sum() + observed[-1])
    pooled_exp = np.append(expected[:-1][keep], expected[:-1][~keep].sum() + expected[-1])
    if pooled_exp[-1] < MIN_EXPECTED and pooled_obs.size > 1:
        pooled_obs = np.append(pooled_obs[:-2], pooled_obs[-2:].sum())
        pooled_exp = np.append(pooled_exp[:-2], pooled_exp[-2:].sum())
    if pooled_obs.size < 2:
        return ChiSquareResult(chi2=0.0, dof=0, p_value=1.0, tv=tv)

    pooled_exp = pooled_exp * (pooled_obs.sum() / pooled_exp.sum())
    chi2, p_value = stats.chisquare(pooled_obs, pooled_exp)
    return ChiSquareResult(
        chi2=float(chi2), dof=int(pooled_obs.size - 1), p_value=float(p_value), tv=tv
    )


def _histogram(values: np.ndarray, support: Sequence[Tuple[int, ...]], cap: int) -> np.ndarray:
    """Counts per support point, with a trailing entry for everything else."""
    values = np.atleast_2d(np.asarray(values, dtype=np.int64).T).T
    dims = (cap + 2,) * values.shape[1]
    clipped = np.minimum(values, cap + 1)
    flat = np.ravel_multi_index(tuple(clipped.T), dims)
    counts = np.bincount(flat, minlength=int(np.prod(dims)))
    index = [np.ravel_multi_index(point, dims) for point in support]
    in_support = counts[index]
    return np.append(in_support, values.shape[0] - in_support.sum())


def _grid(n_groups: int, cap: int, low: int = 0, drop_zero: bool = False) -> List[Tuple[int, ...]]:
    points = list(itertools.product(range(low, cap + 1), repeat=n_groups))
    if drop_zero:
        points = [p for p in points if any(p)]
    return points


StatisticSpec = Tuple[np.ndarray, List[Tuple[int, ...]], Callable[[Tuple[int, ...]], float]]


def _statistics(
    hier: HierModel, summary: CountSummary, cap: int
) -> Dict[str, List[StatisticSpec]]:
    u = hier.psi_total
    J = hier.n_groups
    specs: Dict[str, List[StatisticSpec]] = {
        "phi": [(summary.phi, _grid(1, cap), lambda p: species_count_pmf(hier, p[0]))],
        "x_tilde": [
            (summary.x_tilde, _grid(1, cap, low=1), lambda p: mtp_pmf(hier.tau0, u, p[0]))
        ],
        "fine_counts": [
            (summary.fine_counts, _grid(J, cap), lambda p: allocation_pmf(hier, p))
        ],
        "totals": [
            (summary.group_totals, _grid(J, cap), lambda p: joint_count_pmf(hier, p))
        ],
        "species_counts": [
            (
                summary.species_counts,
                _grid(J, cap, drop_zero=True),
                lambda p: fragment_count_pmf(hier, p),
            )
        ],
    }
    specs["first_block"] = [
        (
            summary.first_blocks[j],
            _grid(1, cap, low=1),
            lambda p, m=model, g=gamma: mtp_pmf(m, g, p[0]),
        )
        for j, (model, gamma) in enumerate(zip(hier.taus, hier.gammas))
    ]
    return specs


def mc_compare(
    hier: HierModel,
    draws: int,
    seed: int,
    statistics: Sequence[str] = DEFAULT_STATISTICS,
    count_cap: int = 30,
    tolerances: Optional[AcceptanceTolerances] = None,
) -> VerificationReport:
    """Chi-square and total-variation comparison of sampled counts with exact pmfs."""
    tol = tolerances or get_tolerances()
    unknown = set(statistics) - set(DEFAULT_STATISTICS)
    if unknown:
        raise DomainError(f"unknown statistics {sorted(unknown)}")
    if hier.n_groups > 2 and {"fine_counts", "totals", "species_counts"} & set(statistics):
        raise DomainError("joint count statistics are tabulated for at most two groups")

    summary = sample_count_summary(hier, draws, count_cap, seed)
    specs = _statistics(hier, summary, count_cap)
    rows: List[MCRow] = []
    for name in statistics:
        for j, (values, support, pmf) in enumerate(specs[name]):
            label = name if len(specs[name]) == 1 else f"{name}[{j}]"
            if len(values) == 0:
                logger.warning(f"No samples for {label}", stage="mc_compare")
                continue
            probs = np.array([pmf(point) for point in support])
            result = chi_square_pooled(_histogram(values, support, count_cap), probs)
            rows.append(
                MCRow(
                    statistic=label,
                    chi2=result.chi2,
                    dof=result.dof,
                    p_value=result.p_value,
                    tv=result.tv,
                    draws=int(len(values)),
                )
            )
            logger.debug(
                f"{label}: chi2={result.chi2:.2f} dof={result.dof} p={result.p_value:.4f}",
                stage="mc_compare",
            )

    if not rows:
        raise DomainError(f"no statistic had samples in {draws} draws")
    report = VerificationReport(
        sweep_id=f"mc-{seed}",
        task="mc-compare",
        model=hier.describe(),
        mc=rows,
        details={"draws": draws, "seed": seed, "count_cap": count_cap},
    )
    report.add_criterion("mc_p_value", min(r.p_value for r in rows), tol.mc_p_value, kind="lower")
    report.add_criterion("mc_total_variation", max(r.tv for r in rows), tol.mc_total_variation)
    return report


def empirical_tv(a: np.ndarray, b: np.ndarray) -> float:
    """Total variation between the empirical laws of two integer samples."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    top = int(max(a.max(initial=0), b.max(initial=0))) + 1
    pa = np.bincount(a, minlength=top) / max(a.size, 1)
    pb = np.bincount(b, minlength=top) / max(b.size, 1)
    return 0.5 * float(np.abs(pa - pb).sum())
