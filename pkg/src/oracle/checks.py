"""Enumeration-based verification sweeps."""
import math
from typing import Dict, List, Optional, Sequence, Tuple

from src.observability.logger import get_logger
from src.oracle.enumeration import (
    coarse_key,
    coarse_multiplicity,
    enumerate_nested_configs,
    fine_key,
    fine_multiplicity,
)
from src.oracle.models import DualityRow, NormalizationRow, QuadratureRow, VerificationReport
from src.oracle.tolerances import AcceptanceTolerances, get_tolerances
from src.partitions.enumeration import enumerate_compositions
from src.partitions.stirling import (
    gen_stirling,
    gen_stirling_alternating,
    stirling_first_unsigned,
)
from src.phibp.laws import duality_sides, log_p_coarse, log_p_fine
from src.phibp.marginal import marginal_eppf_quad
from src.phibp.models import HierModel
from src.stable.duality import (
    frag_invariance_check,
    gibbs_duality_residual,
    gibbs_mixing_residual,
    master_factors,
    recover_pitman_by_quadrature,
    stable_reduction_gap,
)
from src.stable.models import StableDualityParams

logger = get_logger(__name__)


def _label(totals: Sequence[int]) -> str:
    return "n=" + ",".join(str(n) for n in totals)


def total_mass_check(
    hier: HierModel, totals: Sequence[int], tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    """Both factorizations, and each marginal law, sum to one over the enumeration."""
    tol = tolerances or get_tolerances()
    label = _label(totals)
    fine_side: List[float] = []
    frag_side: List[float] = []
    fine_laws: Dict[Tuple, float] = {}
    coarse_laws: Dict[Tuple, float] = {}
    count = 0
    for config, mult in enumerate_nested_configs(totals):
        count += 1
        sides = duality_sides(config, hier)
        log_mult = math.log(mult)
        fine_side.append(math.exp(log_mult + sides.log_lhs))
        frag_side.append(math.exp(log_mult + sides.log_rhs))
        key = fine_key(config)
        if key not in fine_laws:
            fine_laws[key] = fine_multiplicity(config) * math.exp(log_p_fine(config, hier))
        key = coarse_key(config)
        if key not in coarse_laws:
            coarse_laws[key] = coarse_multiplicity(config) * math.exp(log_p_coarse(config, hier))

    sums = {
        "coag_fine": math.fsum(fine_side),
        "frag_coarse": math.fsum(frag_side),
        "fine": math.fsum(fine_laws.values()),
        "coarse": math.fsum(coarse_laws.values()),
    }
    rows = [
        NormalizationRow(label=label, law=law, total=total, abs_error=abs(total - 1.0))
        for law, total in sums.items()
    ]
    report = VerificationReport(
        sweep_id=f"normalize-{label}",
        task="normalize",
        model=hier.describe(),
        totals=list(totals),
        config_count=count,
        normalization=rows,
    )
    report.add_criterion("normalization", max(r.abs_error for r in rows), tol.normalization)
    logger.debug(
        f"Normalization {label}: max error {max(r.abs_error for r in rows):.3e}",
        stage="normalize",
    )
    return report


def duality_sweep(
    hier: HierModel, totals: Sequence[int], tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    tol = tolerances or get_tolerances()
    label = _label(totals)
    rows: List[DualityRow] = []
    for config_id, (config, mult) in enumerate(enumerate_nested_configs(totals)):
        sides = duality_sides(config, hier)
        rows.append(
            DualityRow(
                label=label,
                config_id=config_id,
                r=config.r,
                k_tilde=config.k_tilde,
                multiplicity=mult,
                log_lhs=sides.log_lhs,
                log_rhs=sides.log_rhs,
                residual=sides.residual,
            )
        )
    max_residual = max(row.residual for row in rows)
    report = VerificationReport(
        sweep_id=f"duality-{label}",
        task="verify-duality",
        model=hier.describe(),
        totals=list(totals),
        config_count=len(rows),
        max_residual=max_residual,
        duality=rows,
    )
    report.add_criterion("duality_residual", max_residual, tol.duality_residual)
    logger.debug(f"Duality sweep {label}: {len(rows)} configs, max {max_residual:.3e}")
    return report


def marginal_duality_check(
    hier: HierModel, totals: Sequence[int], tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    """Integrate both sides of the duality over the sampling times."""
    tol = tolerances or get_tolerances()
    label = _label(totals)
    rows: List[QuadratureRow] = []
    joint_total: List[float] = []
    for config_id, (config, mult) in enumerate(enumerate_nested_configs(totals)):
        joint = marginal_eppf_quad(config, hier, side="joint")
        frag = marginal_eppf_quad(config, hier, side="joint_frag")
        rows.append(
            QuadratureRow(
                label=f"{label}#{config_id:04d}",
                reference=joint.value,
                quadrature=frag.value,
                rel_error=abs(joint.value - frag.value) / joint.value,
                abserr=max(joint.abserr, frag.abserr),
                neval=joint.neval + frag.neval,
            )
        )
        joint_total.append(mult * joint.value)
    total = math.fsum(joint_total)
    report = VerificationReport(
        sweep_id=f"marginalize-{label}",
        task="marginalize",
        model=hier.describe(),
        totals=list(totals),
        config_count=len(rows),
        quadrature=rows,
        normalization=[
            NormalizationRow(
                label=label, law="marginal_joint", total=total, abs_error=abs(total - 1.0)
            )
        ],
    )
    report.add_criterion("marginal_duality", max(r.rel_error for r in rows), tol.marginal_duality)
    report.add_criterion("marginal_normalization", abs(total - 1.0), tol.marginal_duality)
    return report


def stable_master_sweep(
    params: StableDualityParams,
    n_max: int,
    zetas: Sequence[float],
    mixing_n_max: int = 8,
    tolerances: Optional[AcceptanceTolerances] = None,
) -> VerificationReport:
    """Master equation, stable reduction, Gibbs duality and fragmentation invariance."""
    tol = tolerances or get_tolerances()
    rows: List[DualityRow] = []
    reduction = 0.0
    gibbs = 0.0
    frag_free = 0.0
    for n in range(1, n_max + 1):
        for config_id, (config, mult) in enumerate(enumerate_nested_configs((n,))):
            gibbs = max(gibbs, gibbs_duality_residual(params, config))
            frag_values = []
            for zeta in zetas:
                factors = master_factors(params, config, zeta)
                frag_values.append(factors.log_frag)
                reduction = max(reduction, stable_reduction_gap(params, config, zeta))
                rows.append(
                    DualityRow(
                        label=f"n={n},zeta={zeta:g}",
                        config_id=config_id,
                        r=config.r,
                        k_tilde=config.k_tilde,
                        multiplicity=mult,
                        log_lhs=factors.log_lhs,
                        log_rhs=factors.log_rhs,
                        residual=factors.residual,
                    )
                )
            frag_free = max(frag_free, max(frag_values) - min(frag_values))

    mixing = max(
        gibbs_mixing_residual(params, n, k)
        for n in range(1, mixing_n_max + 1)
        for k in range(1, n + 1)
    )
    invariance = max(
        frag_invariance_check(params.alpha, params.beta, n, comp)
        for n in range(1, n_max + 1)
        for comp in enumerate_compositions(n)
    )
    max_residual = max(row.residual for row in rows)
    report = VerificationReport(
        sweep_id=f"stable-a{params.alpha:g}-b{params.beta:g}-t{params.theta:g}",
        task="stable-master",
        model=f"stable(alpha={params.alpha:g}, beta={params.beta:g}, theta={params.theta:g})",
        config_count=len(rows),
        max_residual=max_residual,
        duality=rows,
        details={"zeta_free_frag_gap": frag_free},
    )
    report.add_criterion("duality_residual", max_residual, tol.duality_residual)
    report.add_criterion("stable_reduction", reduction, tol.stable_reduction)
    report.add_criterion("gibbs_duality", gibbs, tol.gibbs_duality)
    report.add_criterion("gibbs_mixing", mixing, tol.gibbs_mixing)
    report.add_criterion("frag_invariance", max(invariance, frag_free), tol.frag_invariance)
    return report


def pitman_recovery_sweep(
    params: StableDualityParams, n_max: int, tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    tol = tolerances or get_tolerances()
    rows: List[QuadratureRow] = []
    path_gap = 0.0
    closed_gap = 0.0
    for n in range(1, n_max + 1):
        for config_id, (config, _) in enumerate(enumerate_nested_configs((n,))):
            recovery = recover_pitman_by_quadrature(params, config)
            path_gap = max(path_gap, recovery.path_gap)
            closed_gap = max(closed_gap, recovery.closed_form_gap)
            rows.append(
                QuadratureRow(
                    label=f"n={n}#{config_id:04d}",
                    reference=recovery.closed_form_coag,
                    quadrature=recovery.coag_path,
                    rel_error=recovery.closed_form_gap,
                    abserr=recovery.abserr,
                )
            )
    report = VerificationReport(
        sweep_id=f"pitman-a{params.alpha:g}-b{params.beta:g}-t{params.theta:g}",
        task="recover-pitman",
        model=f"stable(alpha={params.alpha:g}, beta={params.beta:g}, theta={params.theta:g})",
        config_count=len(rows),
        quadrature=rows,
    )
    report.add_criterion("pitman_recovery", closed_gap, tol.pitman_recovery)
    report.add_criterion("pitman_paths", path_gap, tol.pitman_paths)
    return report


def stirling_check(
    alphas: Sequence[float], n_max: int, tolerances: Optional[AcceptanceTolerances] = None
) -> VerificationReport:
    """Recurrence against the alternating sum, and S_0 against first-kind Stirling numbers."""
    tol = tolerances or get_tolerances()
    worst = 0.0
    exact_mismatch = 0
    for alpha in alphas:
        for n in range(1, n_max + 1):
            for k in range(1, n + 1):
                value = gen_stirling(alpha, n, k)
                if alpha == 0.0:
                    exact_mismatch += int(round(value) != stirling_first_unsigned(n, k))
                    continue
                reference = gen_stirling_alternating(alpha, n, k)
                worst = max(worst, abs(value - reference) / abs(reference))
    report = VerificationReport(
        sweep_id=f"stirling-n{n_max}",
        task="stirling",
        details={"first_kind_mismatches": exact_mismatch},
    )
    report.add_criterion("stirling_relative", worst, tol.stirling_relative)
    report.add_criterion("stirling_first_kind", float(exact_mismatch), 0.0)
    return report

