"""Parametric subordinator models."""
from typing import Annotated, Literal, NamedTuple, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, model_validator


class GGParams(NamedTuple):
    """Generalized-gamma coordinates (alpha, theta, zeta) of any built-in family."""

    alpha: float
    theta: float
    zeta: float


class _LevyBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    def gg(self) -> GGParams:
        raise NotImplementedError

    def tilt(self, gamma: float) -> "GenGammaModel":
        """Model with Levy density exp(-gamma s) tau(s)."""
        alpha, theta, zeta = self.gg()
        return GenGammaModel(alpha=alpha, theta=theta, zeta=zeta + gamma)

    @property
    def heavy_tailed(self) -> bool:
        """True when the count law has a power tail (no exponential tilt)."""
        return self.gg().zeta == 0.0

    def describe(self) -> str:
        fields = ", ".join(f"{k}={v:g}" for k, v in self.model_dump(exclude={"family"}).items())
        return f"{self.model_dump()['family']}({fields})"


class StableModel(_LevyBase):
    """Positive alpha-stable subordinator, psi(gamma) = gamma^alpha."""

    family: Literal["stable"] = "stable"
    alpha: float = Field(gt=0.0, lt=1.0, description="Stability index")

    def gg(self) -> GGParams:
        return GGParams(self.alpha, self.alpha, 0.0)


class GammaModel(_LevyBase):
    """Gamma subordinator, tau(s) = theta s^-1 exp(-zeta s)."""

    family: Literal["gamma"] = "gamma"
    theta: float = Field(gt=0.0, description="Jump-intensity scale")
    zeta: float = Field(gt=0.0, description="Exponential tilt")

    def gg(self) -> GGParams:
        return GGParams(0.0, self.theta, self.zeta)


class GenGammaModel(_LevyBase):
    """Generalized gamma, tau(s) = theta s^(-alpha-1) exp(-zeta s) / Gamma(1-alpha)."""

    family: Literal["gengamma"] = "gengamma"
    alpha: float = Field(ge=0.0, lt=1.0, description="Index")
    theta: float = Field(gt=0.0, description="Scale")
    zeta: float = Field(ge=0.0, description="Exponential tilt")

    @model_validator(mode="after")
    def _check_not_degenerate(self) -> "GenGammaModel":
        if self.alpha == 0.0 and self.zeta == 0.0:
            raise ValueError("alpha = 0 requires zeta > 0")
        return self

    def gg(self) -> GGParams:
        return GGParams(self.alpha, self.theta, self.zeta)


LevyModel = Annotated[
    Union[StableModel, GammaModel, GenGammaModel], Field(discriminator="family")
]

levy_model_adapter: TypeAdapter = TypeAdapter(LevyModel)


def parse_levy_model(data: dict) -> Union[StableModel, GammaModel, GenGammaModel]:
    return levy_model_adapter.validate_python(data)
