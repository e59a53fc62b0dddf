"""Exact sampling of a nested configuration given the group totals."""
import math
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from src.errors import DomainError, EnvelopeError
from src.numerics.envelope import get_numeric_envelope
from src.observability.logger import get_logger
from src.oracle.enumeration import enumerate_nested_configs
from src.phibp.laws import log_p_coarse, log_p_frag
from src.phibp.models import HierModel, NestedConfig

logger = get_logger(__name__)


def _check_envelope(hier: HierModel, totals: Tuple[int, ...]) -> None:
    envelope = get_numeric_envelope().conditional_sampling
    if len(totals) != hier.n_groups:
        raise DomainError(f"{len(totals)} totals for {hier.n_groups} groups")
    if any(n < 1 for n in totals):
        raise DomainError(f"every group total must be >= 1, got {totals}")
    if hier.n_groups > envelope.max_groups or max(totals) > envelope.max_group_count:
        raise EnvelopeError(
            f"exact conditional sampling supports up to {envelope.max_groups} groups "
            f"and totals up to {envelope.max_group_count}, got {totals}"
        )


@lru_cache(maxsize=32)
def conditional_law(
    hier: HierModel, totals: Tuple[int, ...]
) -> Tuple[Tuple[NestedConfig, ...], np.ndarray]:
    """Canonical configurations with probabilities multiplicity x p_coarse x p_frag."""
    configs = []
    log_weights = []
    for config, mult in enumerate_nested_configs(totals):
        configs.append(config)
        log_weights.append(
            math.log(mult) + log_p_coarse(config, hier) + log_p_frag(config, hier)
        )
    weights = np.asarray(log_weights)
    log_norm = float(logsumexp(weights))
    logger.debug(
        f"Conditional law over {len(configs)} configurations",
        totals=list(totals),
        log_norm=log_norm,
    )
    return tuple(configs), np.exp(weights - log_norm)


def sample_conditional_given_totals(
    hier: HierModel, totals: Sequence[int], rng: np.random.Generator
) -> NestedConfig:
    totals = tuple(int(n) for n in totals)
    _check_envelope(hier, totals)
    configs, probs = conditional_law(hier, totals)
    return configs[int(rng.choice(len(configs), p=probs))]
