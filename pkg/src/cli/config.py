"""Experiment configuration: one self-describing JSON document per run."""
import itertools
import json
import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from scipy.optimize import brentq

from src.errors import ConfigError
from src.levy.models import LevyModel
from src.oracle.montecarlo import DEFAULT_STATISTICS
from src.oracle.tolerances import AcceptanceTolerances, get_tolerances
from src.phibp.models import HierModel
from src.stable.models import StableDualityParams

Task = Literal[
    "verify-duality",
    "normalize",
    "sample",
    "mc-compare",
    "stable-master",
    "recover-pitman",
    "marginalize",
]

MAX_SEED = 2**64 - 1

HIER_TASKS = {"verify-duality", "normalize", "sample", "mc-compare", "marginalize"}
TOTALS_TASKS = {"verify-duality", "normalize", "marginalize"}
SEEDED_TASKS = {"sample", "mc-compare"}
STABLE_TASKS = {"stable-master", "recover-pitman"}


class ModelBlock(BaseModel):
    """Base subordinator, group subordinators, and either sampling times or zeta.

    With ``zeta`` every group is observed at the same time gamma, chosen so that
    the expected number of observed species Psi_0(sum_j psi_j(gamma)) equals zeta.
    """

    model_config = ConfigDict(extra="forbid")

    tau0: LevyModel
    groups: List[LevyModel] = Field(min_length=1)
    gammas: Optional[List[float]] = None
    zeta: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _check_times(self) -> "ModelBlock":
        if (self.gammas is None) == (self.zeta is None):
            raise ValueError("give exactly one of 'gammas' and 'zeta'")
        if self.gammas is not None and len(self.gammas) != len(self.groups):
            raise ValueError(f"{len(self.groups)} groups but {len(self.gammas)} gammas")
        return self

    def hier(self) -> HierModel:
        if self.gammas is not None:
            return HierModel(tau0=self.tau0, taus=tuple(self.groups), gammas=tuple(self.gammas))
        return _hier_at_zeta(self.tau0, tuple(self.groups), float(self.zeta or 0.0))


def _hier_at_zeta(tau0: LevyModel, groups: Tuple[LevyModel, ...], zeta: float) -> HierModel:
    def gap(log_gamma: float) -> float:
        gamma = math.exp(log_gamma)
        hier = HierModel(tau0=tau0, taus=groups, gammas=(gamma,) * len(groups))
        return math.log(hier.species_mass) - math.log(zeta)

    try:
        log_gamma = brentq(gap, -40.0, 40.0, xtol=1e-14, rtol=1e-15)
    except ValueError as exc:
        raise ConfigError(f"no common sampling time gives zeta={zeta}", "model.zeta") from exc
    gamma = math.exp(log_gamma)
    return HierModel(tau0=tau0, taus=groups, gammas=(gamma,) * len(groups))


class OutputBlock(BaseModel):
    model_config = ConfigDict(extra="forbid")

    report: str = Field(default="report.json", description="JSON report file name")
    tables: bool = Field(default=True, description="Write one CSV per statistic family")
    draws: bool = Field(default=True, description="Write sampled draws as JSON lines")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    task: Task
    model: Optional[ModelBlock] = None
    stable: List[StableDualityParams] = Field(default_factory=list)
    totals: List[List[int]] = Field(default_factory=list, description="Group totals per sweep")
    max_total: Optional[int] = Field(
        default=None, ge=1, description="Sweep every totals vector with n_j >= 1, sum <= max_total"
    )
    n_max: int = Field(default=6, ge=1)
    mixing_n_max: int = Field(default=8, ge=1)
    zetas: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0])
    seeds: List[int] = Field(default_factory=list)
    draws: int = Field(default=1000, ge=1)
    count_cap: int = Field(default=30, ge=1)
    statistics: List[str] = Field(default_factory=lambda: list(DEFAULT_STATISTICS))
    tolerances: Dict[str, float] = Field(default_factory=dict)
    outputs: OutputBlock = Field(default_factory=OutputBlock)
    record_wall_clock: bool = False

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, value: List[int]) -> List[int]:
        bad = [s for s in value if not 0 <= s <= MAX_SEED]
        if bad:
            raise ValueError(f"seeds must be 64-bit unsigned integers, got {bad}")
        return value

    @field_validator("zetas")
    @classmethod
    def _check_zetas(cls, value: List[float]) -> List[float]:
        if not value or any(z <= 0.0 for z in value):
            raise ValueError("zetas must be a non-empty list of positive values")
        return value

    @field_validator("statistics")
    @classmethod
    def _check_statistics(cls, value: List[str]) -> List[str]:
        unknown = sorted(set(value) - set(DEFAULT_STATISTICS))
        if unknown:
            raise ValueError(f"unknown statistics {unknown}")
        return value

    @field_validator("tolerances")
    @classmethod
    def _check_tolerances(cls, value: Dict[str, float]) -> Dict[str, float]:
        AcceptanceTolerances().with_overrides(value)
        return value

    @model_validator(mode="after")
    def _check_task_fields(self) -> "ExperimentConfig":
        if self.task in HIER_TASKS and self.model is None:
            raise ValueError(f"task {self.task} needs a 'model' block")
        if self.task in STABLE_TASKS and not self.stable:
            raise ValueError(f"task {self.task} needs at least one 'stable' parameter set")
        if self.task in SEEDED_TASKS and not self.seeds:
            raise ValueError(f"task {self.task} needs 'seeds'")
        if self.task in TOTALS_TASKS:
            if not self.totals and self.max_total is None:
                raise ValueError(f"task {self.task} needs 'totals' or 'max_total'")
            n_groups = len(self.model.groups) if self.model else 0
            for totals in self.totals:
                if len(totals) != n_groups:
                    raise ValueError(f"totals {totals} do not match {n_groups} groups")
                if any(n < 1 for n in totals):
                    raise ValueError(f"every group total must be >= 1, got {totals}")
        return self

    def resolved_tolerances(self) -> AcceptanceTolerances:
        return get_tolerances().with_overrides(self.tolerances)

    def sweep_totals(self) -> List[Tuple[int, ...]]:
        """Explicit totals followed by the max_total grid, without repeats."""
        n_groups = len(self.model.groups) if self.model else 1
        sweep = [tuple(t) for t in self.totals]
        if self.max_total is not None:
            grid = itertools.product(range(1, self.max_total + 1), repeat=n_groups)
            sweep.extend(t for t in grid if sum(t) <= self.max_total)
        return list(dict.fromkeys(sweep))

    def with_seed(self, seed: Optional[int]) -> "ExperimentConfig":
        if seed is None:
            return self
        return ExperimentConfig.model_validate({**self.model_dump(), "seeds": [seed]})


def _field_path(loc: Tuple) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def load_config(path: Path) -> ExperimentConfig:
    """Parse and validate a config file; errors carry a line/column or field path."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(exc), str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"{path}: line {exc.lineno}, column {exc.colno}") from exc
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise ConfigError(
            f"{first['msg']} ({exc.error_count()} error(s))", f"{path}: {_field_path(first['loc'])}"
        ) from exc
