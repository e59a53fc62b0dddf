"""Hierarchy and nested-configuration models."""
import math
from typing import List, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.levy.cumulants import psi
from src.levy.models import LevyModel

Composition = Tuple[int, ...]


class HierModel(BaseModel):
    """Base subordinator tau0, group subordinators tau_j and sampling times gamma_j."""

    model_config = ConfigDict(frozen=True)

    tau0: LevyModel = Field(description="Base (species) subordinator")
    taus: Tuple[LevyModel, ...] = Field(description="Group subordinators, one per group")
    gammas: Tuple[float, ...] = Field(description="Sampling time per group")

    @field_validator("gammas")
    @classmethod
    def _positive_gammas(cls, value: Tuple[float, ...]) -> Tuple[float, ...]:
        if any(not (g > 0.0 and math.isfinite(g)) for g in value):
            raise ValueError(f"sampling times must be positive and finite, got {value}")
        return tuple(float(g) for g in value)

    @model_validator(mode="after")
    def _check_groups(self) -> "HierModel":
        if len(self.taus) < 1:
            raise ValueError("at least one group is required")
        if len(self.taus) != len(self.gammas):
            raise ValueError(
                f"{len(self.taus)} group models but {len(self.gammas)} sampling times"
            )
        return self

    @property
    def n_groups(self) -> int:
        return len(self.taus)

    @property
    def psis(self) -> Tuple[float, ...]:
        return tuple(psi(model, g) for model, g in zip(self.taus, self.gammas))

    @property
    def psi_total(self) -> float:
        return math.fsum(self.psis)

    @property
    def species_mass(self) -> float:
        """Psi_0(sum_j psi_j(gamma_j)), the Poisson mean of the species count."""
        return psi(self.tau0, self.psi_total)

    @property
    def q(self) -> Tuple[float, ...]:
        total = self.psi_total
        return tuple(p / total for p in self.psis)

    def with_gammas(self, gammas: Sequence[float]) -> "HierModel":
        return HierModel(tau0=self.tau0, taus=self.taus, gammas=tuple(gammas))

    def describe(self) -> str:
        groups = ", ".join(m.describe() for m in self.taus)
        return f"tau0={self.tau0.describe()}; taus=[{groups}]; gammas={list(self.gammas)}"


class NestedConfig(BaseModel):
    """Coarse species blocks, per-group counts and fine refinements.

    ``refinements[j][l]`` is the composition of the group-j individuals of
    species l into fine blocks; it is empty when the species has no group-j
    individuals.
    """

    model_config = ConfigDict(frozen=True)

    refinements: Tuple[Tuple[Composition, ...], ...] = Field(
        description="Per group, per species fine block sizes"
    )

    @model_validator(mode="after")
    def _check_structure(self) -> "NestedConfig":
        if not self.refinements:
            raise ValueError("at least one group is required")
        r = len(self.refinements[0])
        if r < 1:
            raise ValueError("at least one species is required")
        if any(len(group) != r for group in self.refinements):
            raise ValueError("every group must list the same number of species")
        for group in self.refinements:
            for parts in group:
                if any(c < 1 for c in parts):
                    raise ValueError(f"fine block sizes must be >= 1, got {parts}")
        for ell in range(r):
            if all(len(group[ell]) == 0 for group in self.refinements):
                raise ValueError(f"species {ell} has no individuals in any group")
        return self

    @classmethod
    def from_species(cls, species: Sequence[Sequence[Sequence[int]]]) -> "NestedConfig":
        """Build from species-major data: ``species[l][j]`` is a composition."""
        if not species:
            raise ValueError("at least one species is required")
        n_groups = len(species[0])
        groups = tuple(
            tuple(tuple(int(c) for c in sp[j]) for sp in species) for j in range(n_groups)
        )
        return cls(refinements=groups)

    @property
    def n_groups(self) -> int:
        return len(self.refinements)

    @property
    def r(self) -> int:
        return len(self.refinements[0])

    @property
    def counts(self) -> Tuple[Tuple[int, ...], ...]:
        """n[j][l]."""
        return tuple(tuple(sum(parts) for parts in group) for group in self.refinements)

    @property
    def x(self) -> Tuple[Tuple[int, ...], ...]:
        """x[j][l], the number of fine blocks."""
        return tuple(tuple(len(parts) for parts in group) for group in self.refinements)

    @property
    def group_totals(self) -> Tuple[int, ...]:
        """n_j."""
        return tuple(sum(row) for row in self.counts)

    @property
    def fine_counts(self) -> Tuple[int, ...]:
        """K_j."""
        return tuple(sum(row) for row in self.x)

    @property
    def k_tilde(self) -> int:
        return sum(self.fine_counts)

    @property
    def x_tilde(self) -> Tuple[int, ...]:
        return tuple(sum(self.x[j][ell] for j in range(self.n_groups)) for ell in range(self.r))

    def species_counts(self, ell: int) -> Tuple[int, ...]:
        """n_l, the count vector of species l across groups."""
        return tuple(self.counts[j][ell] for j in range(self.n_groups))

    def fine_blocks(self, j: int) -> List[int]:
        """All fine block sizes of group j."""
        return [c for parts in self.refinements[j] for c in parts]

    def species(self, ell: int) -> Tuple[Composition, ...]:
        return tuple(self.refinements[j][ell] for j in range(self.n_groups))

    def restrict_to_species(self, ell: int) -> "NestedConfig":
        return NestedConfig(refinements=tuple((group[ell],) for group in self.refinements))
