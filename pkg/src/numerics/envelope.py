import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field

from src.config import get_settings

logger = logging.getLogger(__name__)

REPO_ROOT = Path(__file__).resolve().parents[2]


def resolve_data_path(filename: str) -> Path:
    data_dir = Path(get_settings().data_dir)
    if not data_dir.is_absolute():
        data_dir = REPO_ROOT / data_dir
    return data_dir / filename


class MtPEnvelope(BaseModel):
    tail_epsilon: float = Field(default=1e-12, gt=0, lt=1e-3)
    table_cap: int = Field(default=65536, ge=16)


class GenGammaEnvelope(BaseModel):
    max_attempts: int = Field(default=1_000_000, ge=1)


class EnumerationEnvelope(BaseModel):
    max_total_count: int = Field(default=10, ge=1)
    max_set_partition_size: int = Field(default=12, ge=1)


class ConditionalSamplingEnvelope(BaseModel):
    max_group_count: int = Field(default=8, ge=1)
    max_groups: int = Field(default=2, ge=1)


class SamplerEnvelope(BaseModel):
    max_subblocks: int = Field(default=1_000_000, ge=1)


class QuadratureEnvelope(BaseModel):
    epsabs: float = Field(default=1e-13, gt=0)
    epsrel: float = Field(default=1e-11, gt=0)
    limit: int = Field(default=200, ge=10)


class NumericEnvelope(BaseModel):
    """Size caps and tolerances shared by evaluation and sampling code."""

    mtp: MtPEnvelope = Field(default_factory=MtPEnvelope)
    gengamma: GenGammaEnvelope = Field(default_factory=GenGammaEnvelope)
    enumeration: EnumerationEnvelope = Field(default_factory=EnumerationEnvelope)
    conditional_sampling: ConditionalSamplingEnvelope = Field(
        default_factory=ConditionalSamplingEnvelope
    )
    sampler: SamplerEnvelope = Field(default_factory=SamplerEnvelope)
    quadrature: QuadratureEnvelope = Field(default_factory=QuadratureEnvelope)


class EnvelopeLoader:
    def __init__(self, rules_file: Optional[Path] = None):
        self.rules_file = rules_file or resolve_data_path("numeric_envelope.yaml")
        self.rules: Dict[str, Any] = {}
        self._load_rules()

    def _load_rules(self) -> None:
        if not self.rules_file.exists():
            logger.warning(f"Envelope file not found, using defaults: {self.rules_file}")
            return
        with open(self.rules_file, "r", encoding="utf-8") as f:
            self.rules = yaml.safe_load(f) or {}

    def envelope(self) -> NumericEnvelope:
        return NumericEnvelope.model_validate(self.rules)


_envelope: Optional[NumericEnvelope] = None


def get_numeric_envelope() -> NumericEnvelope:
    global _envelope
    if _envelope is None:
        _envelope = EnvelopeLoader().envelope()
    return _envelope
