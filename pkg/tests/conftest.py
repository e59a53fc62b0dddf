import numpy as np
import pytest

from src.levy.models import GammaModel, GenGammaModel, StableModel
from src.phibp.models import HierModel
from src.stable.duality import stable_hierarchy
from src.stable.models import StableDualityParams


@pytest.fixture
def gg_hier() -> HierModel:
    """Two-group generalized-gamma hierarchy used by the acceptance sweep."""
    return HierModel(
        tau0=GenGammaModel(alpha=0.4, theta=1.0, zeta=0.5),
        taus=(
            GenGammaModel(alpha=0.3, theta=1.0, zeta=0.2),
            GenGammaModel(alpha=0.6, theta=2.0, zeta=0.1),
        ),
        gammas=(1.0, 1.5),
    )


@pytest.fixture
def gg_single() -> HierModel:
    return HierModel(
        tau0=GenGammaModel(alpha=0.4, theta=1.0, zeta=0.5),
        taus=(GenGammaModel(alpha=0.3, theta=1.0, zeta=0.2),),
        gammas=(1.0,),
    )


@pytest.fixture
def gamma_hier() -> HierModel:
    return HierModel(
        tau0=GammaModel(theta=1.0, zeta=1.0),
        taus=(GammaModel(theta=2.0, zeta=0.5),),
        gammas=(0.7,),
    )


@pytest.fixture
def half_hier() -> HierModel:
    """GG(1/2) models, whose total masses have closed-form densities."""
    return HierModel(
        tau0=GenGammaModel(alpha=0.5, theta=1.0, zeta=0.5),
        taus=(GenGammaModel(alpha=0.5, theta=0.8, zeta=0.3),),
        gammas=(1.2,),
    )


@pytest.fixture
def stable_params() -> StableDualityParams:
    return StableDualityParams(alpha=0.6, beta=0.3)


@pytest.fixture
def stable_hier(stable_params: StableDualityParams) -> HierModel:
    return stable_hierarchy(stable_params, 1.0)


@pytest.fixture
def stable_model() -> StableModel:
    return StableModel(alpha=0.6)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)
