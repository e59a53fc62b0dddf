import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field

from src.numerics.envelope import resolve_data_path

logger = logging.getLogger(__name__)


class AcceptanceTolerances(BaseModel):
    model_config = ConfigDict(extra="forbid")

    duality_residual: float = Field(default=1e-10, gt=0)
    normalization: float = Field(default=1e-9, gt=0)
    stable_reduction: float = Field(default=1e-12, gt=0)
    pitman_recovery: float = Field(default=1e-8, gt=0)
    pitman_paths: float = Field(default=1e-9, gt=0)
    gibbs_duality: float = Field(default=1e-12, gt=0)
    gibbs_mixing: float = Field(default=1e-10, gt=0)
    frag_invariance: float = Field(default=1e-12, gt=0)
    mc_p_value: float = Field(default=1e-3, gt=0, lt=1)
    mc_total_variation: float = Field(default=5e-3, gt=0)
    bell_gamma_moment: float = Field(default=1e-12, gt=0)
    bell_quadrature: float = Field(default=1e-7, gt=0)
    quadrature_oracle: float = Field(default=1e-7, gt=0)
    stirling_relative: float = Field(default=1e-9, gt=0)
    marginal_duality: float = Field(default=1e-7, gt=0)

    def with_overrides(self, overrides: Optional[Dict[str, float]]) -> "AcceptanceTolerances":
        if not overrides:
            return self
        return AcceptanceTolerances.model_validate({**self.model_dump(), **overrides})


class ToleranceLoader:
    def __init__(self, rules_file: Optional[Path] = None):
        self.rules_file = rules_file or resolve_data_path("acceptance_tolerances.yaml")
        self.rules: Dict[str, Any] = {}
        self._load_rules()

    def _load_rules(self) -> None:
        if not self.rules_file.exists():
            logger.warning(f"Tolerance file not found, using defaults: {self.rules_file}")
            return
        with open(self.rules_file, "r", encoding="utf-8") as f:
            self.rules = yaml.safe_load(f) or {}

    def tolerances(self) -> AcceptanceTolerances:
        return AcceptanceTolerances.model_validate(self.rules)


_tolerances: Optional[AcceptanceTolerances] = None


def get_tolerances() -> AcceptanceTolerances:
    global _tolerances
    if _tolerances is None:
        _tolerances = ToleranceLoader().tolerances()
    return _tolerances
