"""Scenario earthquake ground motion at component sites.

A point-source attenuation stands in for a full GMPE::

    ln PGA = beta0 + beta1 * (Mw - 6) - beta2 * ln(R_hyp + c_near)

with one inter-event residual shared by all sites and independent
intra-event residuals per site.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ModelDefinitionError


@dataclass(frozen=True)
class EventSpec:
    magnitude: float
    epicenter: tuple[float, float]
    depth_km: float = 0.0

    def __post_init__(self):
        if not 4.0 <= self.magnitude <= 9.0:
            raise ModelDefinitionError(f"magnitude {self.magnitude} outside [4, 9]")
        if self.depth_km < 0:
            raise ModelDefinitionError("depth must be nonnegative")


@dataclass(frozen=True)
class AttenuationModel:
    beta0: float
    beta1: float
    beta2: float
    c_near: float
    sigma_inter: float = 0.0
    sigma_intra: float = 0.0

    def __post_init__(self):
        if not self.beta2 > 0:
            raise ModelDefinitionError("beta2 must be positive")
        if not self.c_near > 0:
            raise ModelDefinitionError("c_near must be positive")
        if self.sigma_inter < 0 or self.sigma_intra < 0:
            raise ModelDefinitionError("sigmas must be nonnegative")


@dataclass(frozen=True, eq=False)
class IMField:
    pga: np.ndarray
    eta: float


def _hypocentral_distance(event: EventSpec, sites) -> np.ndarray:
    xy = np.asarray(sites, dtype=np.float64).reshape(-1, 2)
    dx = xy[:, 0] - event.epicenter[0]
    dy = xy[:, 1] - event.epicenter[1]
    return np.sqrt(dx * dx + dy * dy + event.depth_km**2)


def _ln_median(event: EventSpec, sites, model: AttenuationModel) -> np.ndarray:
    r_hyp = _hypocentral_distance(event, sites)
    return (
        model.beta0
        + model.beta1 * (event.magnitude - 6.0)
        - model.beta2 * np.log(r_hyp + model.c_near)
    )


def median_pga(event: EventSpec, site: Sequence[float], model: AttenuationModel) -> float:
    """Median PGA (g) at a single site."""
    return float(np.exp(_ln_median(event, [site], model))[0])


def median_pga_field(event: EventSpec, sites, model: AttenuationModel) -> np.ndarray:
    return np.exp(_ln_median(event, sites, model))


def sample_im_field(
    event: EventSpec,
    sites,
    model: AttenuationModel,
    seed: int | np.random.SeedSequence | np.random.Generator,
) -> IMField:
    """Draw one correlated PGA realization over ``sites``.

    The inter-event residual is drawn first, then one intra-event residual per
    site, all from ``numpy.random.default_rng(seed)``.
    """
    ln_med = _ln_median(event, sites, model)
    if ln_med.size == 0:
        raise ModelDefinitionError("at least one site is required")
    rng = np.random.default_rng(seed)
    z_inter = rng.standard_normal()
    z_intra = rng.standard_normal(ln_med.size)
    if model.sigma_inter == 0.0 and model.sigma_intra == 0.0:
        return IMField(pga=np.exp(ln_med), eta=0.0)
    eta = model.sigma_inter * z_inter
    return IMField(pga=np.exp(ln_med + eta + model.sigma_intra * z_intra), eta=float(eta))
