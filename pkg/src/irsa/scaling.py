"""Finite-length scaling predictions for IRSA in the waterfall region."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .degree import DegreeDistribution
from .errors import InvalidPopulation, UnknownDistribution


@dataclass(frozen=True)
class ScalingParams:
    g_star: float
    alpha0: float
    beta0: float
    gamma: float

    def __post_init__(self):
        for name in ("g_star", "alpha0", "beta0", "gamma"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.gamma > 1:
            raise ValueError("gamma is a probability and cannot exceed 1")


@dataclass(frozen=True)
class PredictionPoint:
    m: int
    g: float
    fep: float
    plp: float


# g*, alpha0, beta0, gamma
BUILTIN_PARAMS: dict[str, ScalingParams] = {
    "x3": ScalingParams(0.818469, 0.497867, 0.964528, 0.783499),
    "x4": ScalingParams(0.772280, 0.409321, 0.827849, 0.906054),
    "x5": ScalingParams(0.701780, 0.375892, 0.760593, 0.961253),
    "lambda1": ScalingParams(0.661090, 0.404986, 0.849037, 0.982040),
    "lambda2": ScalingParams(0.851325, 0.496301, 1.50477, 0.835418),
}


def builtin_params(name: str) -> ScalingParams:
    try:
        return BUILTIN_PARAMS[name]
    except KeyError:
        raise UnknownDistribution(
            f"no tabulated scaling parameters for {name!r}; known: {', '.join(BUILTIN_PARAMS)}"
        ) from None


def params_from_de(dist: DegreeDistribution, alpha0: float, beta0: float) -> ScalingParams:
    """Scaling parameters for an arbitrary distribution: threshold and gamma
    from density evolution, alpha0/beta0 supplied by the caller."""
    from .density_evolution import bp_threshold, compute_gamma

    return ScalingParams(bp_threshold(dist, tol=1e-7).g_star, alpha0, beta0, compute_gamma(dist))


def q_tail(x):
    """Standard normal tail probability Q(x) = P(Z > x)."""
    out = 0.5 * erfc(np.asarray(x, dtype=float) / np.sqrt(2.0))
    return float(out) if np.ndim(out) == 0 else out


def fep_predict(m: int, g, params: ScalingParams, population: int | None = None):
    """Predicted frame error probability.

    Without ``population`` this is the infinite-population form with
    alpha = sqrt(alpha0^2 + g). With a finite population n (> m) the
    variance term becomes g * (1 - (1 - R) g) where R = (n - m) / n.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    g = np.asarray(g, dtype=float)
    if np.any(g <= 0):
        raise ValueError("load must be positive")
    if population is None:
        var = params.alpha0**2 + g
    else:
        if population <= m:
            raise InvalidPopulation(f"population n={population} must exceed m={m}")
        one_minus_rate = m / population
        var = params.alpha0**2 + g * (1.0 - one_minus_rate * g)
    shift = params.g_star - params.beta0 * m ** (-2.0 / 3.0)
    arg = np.sqrt(m) * (shift - g) / np.sqrt(var)
    return _clamp(q_tail(arg))


def plp_predict(m: int, g, params: ScalingParams, population: int | None = None):
    """Predicted packet loss probability, gamma times the frame error one."""
    return _clamp(params.gamma * np.asarray(fep_predict(m, g, params, population)))


def predict(m: int, g: float, params: ScalingParams, population: int | None = None) -> PredictionPoint:
    return PredictionPoint(m, g, fep_predict(m, g, params, population),
                           plp_predict(m, g, params, population))


def waterfall_center(m: int, params: ScalingParams) -> float:
    """Load at which the predicted FEP is exactly 1/2."""
    return params.g_star - params.beta0 * m ** (-2.0 / 3.0)


def _clamp(x):
    out = np.clip(x, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out
