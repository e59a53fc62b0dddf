from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class StableDualityParams(BaseModel):
    """Fine index alpha, coarse index beta, tilt theta and latent time zeta."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(description="Index of the fine (fragmenting) stable law")
    beta: float = Field(description="Index of the coarse stable law")
    theta: float = Field(default=0.0, description="Pitman-Yor tilt of the coarse law")
    zeta: float = Field(default=1.0, gt=0.0, description="Latent time, gamma^beta")

    @model_validator(mode="after")
    def _check_indices(self) -> "StableDualityParams":
        if not 0.0 < self.beta < self.alpha < 1.0:
            raise ValueError(
                f"need 0 < beta < alpha < 1, got alpha={self.alpha}, beta={self.beta}"
            )
        if not self.theta > -self.beta:
            raise ValueError(f"theta must exceed -beta, got theta={self.theta}")
        return self

    @property
    def ratio(self) -> float:
        """beta / alpha, the index of the species-level law."""
        return self.beta / self.alpha

    def at_zeta(self, zeta: Optional[float]) -> float:
        return self.zeta if zeta is None else float(zeta)


class StableBridgeDraw(BaseModel):
    """Atoms of a stable bridge observed up to count n, plus its continuous remainder."""

    model_config = ConfigDict(frozen=True)

    alpha: float
    scale: float = Field(gt=0.0, description="lambda gamma^alpha")
    block_sizes: Tuple[int, ...] = Field(default=(), description="Counts N_k per atom")
    atoms: Tuple[float, ...] = Field(default=(), description="Gamma(N_k - alpha, 1) masses")
    remainder: float = Field(ge=0.0, description="Tilted-stable remainder mass")

    @property
    def num_blocks(self) -> int:
        return len(self.block_sizes)

    @property
    def total_mass(self) -> float:
        return self.remainder + sum(self.atoms)

    @property
    def normalizer(self) -> float:
        """Total mass over lambda^{1/alpha} gamma, which equals scale^{1/alpha}."""
        return self.total_mass / self.scale ** (1.0 / self.alpha)
