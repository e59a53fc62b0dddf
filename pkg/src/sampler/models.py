"""Sampled objects: coupled draws, step-function paths, posterior draws."""
import bisect
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SubBlock(BaseModel):
    """One fine block: C individuals carrying the tag U."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(ge=1, description="Individuals in the fine block")
    tag: float = Field(ge=0.0, le=1.0, description="Uniform label of the fine block")


class SpeciesRecord(BaseModel):
    """One observed species of the base process."""

    model_config = ConfigDict(frozen=True)

    tag: float = Field(ge=0.0, le=1.0, description="Uniform species label")
    h: float = Field(gt=0.0, description="Base jump size")
    x: Tuple[int, ...] = Field(description="Fine-block count per group")
    subblocks: Tuple[Tuple[SubBlock, ...], ...] = Field(description="Fine blocks per group")

    @model_validator(mode="after")
    def _check_counts(self) -> "SpeciesRecord":
        if sum(self.x) < 1:
            raise ValueError("an observed species has at least one fine block")
        if len(self.x) != len(self.subblocks):
            raise ValueError("fine-block counts and fine blocks disagree on groups")
        if any(len(blocks) != x for blocks, x in zip(self.subblocks, self.x)):
            raise ValueError("fine-block count does not match the listed fine blocks")
        return self

    @property
    def x_tilde(self) -> int:
        return sum(self.x)

    @property
    def counts(self) -> Tuple[int, ...]:
        return tuple(sum(b.count for b in blocks) for blocks in self.subblocks)


class CoupledDraw(BaseModel):
    """A sample of (phi, H_l, X_{j,l}, C_{j,k,l}) with tags."""

    model_config = ConfigDict(frozen=True)

    n_groups: int = Field(ge=1)
    species: Tuple[SpeciesRecord, ...] = Field(default=())

    @model_validator(mode="after")
    def _check_tags(self) -> "CoupledDraw":
        tags = [s.tag for s in self.species]
        tags += [b.tag for s in self.species for blocks in s.subblocks for b in blocks]
        if len(set(tags)) != len(tags):
            raise ValueError("tags must be pairwise distinct")
        if any(len(s.x) != self.n_groups for s in self.species):
            raise ValueError("species records disagree with the number of groups")
        return self

    @property
    def phi(self) -> int:
        return len(self.species)

    @property
    def fine_counts(self) -> Tuple[int, ...]:
        """K_j."""
        return tuple(sum(s.x[j] for s in self.species) for j in range(self.n_groups))

    @property
    def k_tilde(self) -> int:
        return sum(s.x_tilde for s in self.species)

    @property
    def group_totals(self) -> Tuple[int, ...]:
        """Z_j(gamma_j, 1)."""
        return tuple(sum(s.counts[j] for s in self.species) for j in range(self.n_groups))


class StepFunction(BaseModel):
    """Nondecreasing pure-jump function on [0, 1]."""

    model_config = ConfigDict(frozen=True)

    jumps: Tuple[Tuple[float, int], ...] = Field(default=(), description="(location, increment)")

    @model_validator(mode="after")
    def _check_sorted(self) -> "StepFunction":
        locations = [loc for loc, _ in self.jumps]
        if locations != sorted(locations):
            raise ValueError("jump locations must be sorted")
        if any(inc < 1 for _, inc in self.jumps):
            raise ValueError("increments must be positive")
        return self

    @classmethod
    def from_jumps(cls, jumps: list) -> "StepFunction":
        return cls(jumps=tuple(sorted((float(a), int(b)) for a, b in jumps)))

    def __call__(self, y: float) -> int:
        locations = [loc for loc, _ in self.jumps]
        idx = bisect.bisect_right(locations, y)
        return sum(inc for _, inc in self.jumps[:idx])

    @property
    def total(self) -> int:
        return sum(inc for _, inc in self.jumps)

    @property
    def locations(self) -> Tuple[float, ...]:
        return tuple(loc for loc, _ in self.jumps)


class DrawPaths(BaseModel):
    """The four path components of a coupled draw, per group."""

    model_config = ConfigDict(frozen=True)

    individuals: Tuple[StepFunction, ...] = Field(description="I_j, jumps at fine-block tags")
    allocation: Tuple[StepFunction, ...] = Field(description="A_j, fine blocks at species tags")
    counts: Tuple[StepFunction, ...] = Field(description="Z_j, individuals at species tags")
    fragments: Tuple[Tuple[StepFunction, ...], ...] = Field(
        description="F_{j,l}, individuals of species l at its fine-block tags"
    )


class SpeciesPosterior(BaseModel):
    model_config = ConfigDict(frozen=True)

    h: float = Field(gt=0.0, description="Base jump")
    group_masses: Tuple[float, ...] = Field(description="Tilted group masses")


class PosteriorDraw(BaseModel):
    """Observed species plus the unobserved remainder of the hierarchy."""

    model_config = ConfigDict(frozen=True)

    species: Tuple[SpeciesPosterior, ...]
    unobserved_base_mass: float = Field(ge=0.0)
    unobserved_group_masses: Tuple[float, ...]
    truncation_level: float = Field(
        default=0.0, ge=0.0, description="Jump truncation used for the unobserved part"
    )
