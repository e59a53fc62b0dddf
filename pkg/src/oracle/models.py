"""Verification report sections and their order-independent merge."""
from typing import Any, Dict, List, Literal, Optional, Sequence

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"


class CriterionResult(BaseModel):
    """One pass/fail criterion. ``upper`` bounds errors, ``lower`` bounds p-values."""

    name: str
    value: float
    tolerance: float
    kind: Literal["upper", "lower"] = "upper"

    @property
    def passed(self) -> bool:
        if self.kind == "upper":
            return self.value <= self.tolerance
        return self.value >= self.tolerance

    def worst(self, other: "CriterionResult") -> "CriterionResult":
        if self.kind == "upper":
            return self if self.value >= other.value else other
        return self if self.value <= other.value else other


class NormalizationRow(BaseModel):
    label: str = Field(description="Totals the sum was taken at")
    law: str
    total: float
    abs_error: float


class DualityRow(BaseModel):
    label: str
    config_id: int
    r: int
    k_tilde: int
    multiplicity: int
    log_lhs: float
    log_rhs: float
    residual: float


class QuadratureRow(BaseModel):
    label: str
    reference: float = Field(description="Closed-form or Bell-sum value")
    quadrature: float
    rel_error: float
    abserr: float
    neval: int = 0


class MCRow(BaseModel):
    statistic: str
    chi2: float
    dof: int
    p_value: float
    tv: float
    draws: int


class SampleRow(BaseModel):
    seed: int
    draw: int
    phi: int
    k_tilde: int
    totals: List[int] = Field(description="Individuals per group")
    fine_counts: List[int] = Field(description="Fine blocks per group")


class VerificationReport(BaseModel):
    schema_version: str = SCHEMA_VERSION
    sweep_id: str
    task: str
    model: str = Field(default="", description="Model descriptor")
    totals: Optional[List[int]] = None
    config_count: int = 0
    max_residual: float = 0.0
    normalization: List[NormalizationRow] = Field(default_factory=list)
    duality: List[DualityRow] = Field(default_factory=list)
    quadrature: List[QuadratureRow] = Field(default_factory=list)
    mc: List[MCRow] = Field(default_factory=list)
    samples: List[SampleRow] = Field(default_factory=list)
    criteria: List[CriterionResult] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)
    wall_clock_ms: Optional[float] = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.criteria)

    def add_criterion(
        self, name: str, value: float, tolerance: float, kind: Literal["upper", "lower"] = "upper"
    ) -> CriterionResult:
        result = CriterionResult(name=name, value=value, tolerance=tolerance, kind=kind)
        self.criteria.append(result)
        return result

    def failed_criteria(self) -> List[str]:
        return [c.name for c in self.criteria if not c.passed]


def merge_reports(sections: Sequence[VerificationReport], sweep_id: str) -> VerificationReport:
    """Combine sections into one report.

    Residuals take the max, counts add up, rows are sorted and criteria with the
    same name keep their worst value, so the result does not depend on order.
    """
    if not sections:
        raise ValueError("nothing to merge")
    tasks = sorted({s.task for s in sections})
    models = sorted({s.model for s in sections if s.model})
    totals = {tuple(s.totals) for s in sections if s.totals is not None}

    criteria: Dict[str, CriterionResult] = {}
    for section in sections:
        for criterion in section.criteria:
            current = criteria.get(criterion.name)
            criteria[criterion.name] = criterion if current is None else current.worst(criterion)

    details: Dict[str, Any] = {}
    for section in sorted(sections, key=lambda s: (s.task, s.sweep_id)):
        details.update(section.details)

    return VerificationReport(
        sweep_id=sweep_id,
        task="+".join(tasks),
        model=" | ".join(models),
        totals=list(next(iter(totals))) if len(totals) == 1 else None,
        config_count=sum(s.config_count for s in sections),
        max_residual=max(s.max_residual for s in sections),
        normalization=sorted(
            (row for s in sections for row in s.normalization), key=lambda r: (r.label, r.law)
        ),
        duality=sorted(
            (row for s in sections for row in s.duality), key=lambda r: (r.label, r.config_id)
        ),
        quadrature=sorted((row for s in sections for row in s.quadrature), key=lambda r: r.label),
        mc=sorted(
            (row for s in sections for row in s.mc), key=lambda r: (r.statistic, r.draws, r.chi2)
        ),
        samples=sorted(
            (row for s in sections for row in s.samples), key=lambda r: (r.seed, r.draw)
        ),
        criteria=[criteria[name] for name in sorted(criteria)],
        details=details,
    )
