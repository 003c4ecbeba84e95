"""Asymptotic (m -> infinity) analysis of SIC via density evolution.

The slot side is Poisson, so the slot->user erasure update is
``p = 1 - exp(-g * Lambda'(1) * q)``; the user side is ``q = lambda(p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .degree import DegreeDistribution, edge_perspective
from .errors import BracketFailure

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 100_000
VANISHING_Q = 1e-10
DEFAULT_BRACKET = (0.01, 1.0)


@dataclass(frozen=True)
class DEState:
    q: float  # user -> slot edge erasure probability
    p: float  # slot -> user edge erasure probability
    iterations: int

    @property
    def converged_to_zero(self) -> bool:
        return self.q < VANISHING_Q


@dataclass(frozen=True)
class ThresholdResult:
    g_star: float
    bracket_width: float
    iterations_used: int


def de_trajectory(dist: DegreeDistribution, g: float, iterations: int) -> list[float]:
    """q after each of ``iterations`` DE steps, starting from q0 = 1."""
    lam = edge_perspective(dist)
    load = g * lam.mean_degree
    q, out = 1.0, [1.0]
    for _ in range(iterations):
        q = lam(-math.expm1(-load * q))
        out.append(q)
    return out


def de_fixed_point(
    dist: DegreeDistribution,
    g: float,
    max_iters: int = DEFAULT_MAX_ITERS,
    tol: float = DEFAULT_TOL,
) -> DEState:
    """Run DE from q0 = 1 until successive q differ by less than ``tol``.

    Hitting ``max_iters`` is not an error: the last state is returned with
    ``iterations == max_iters``.
    """
    if g <= 0 or tol <= 0:
        raise ValueError("need g > 0 and tol > 0")
    lam = edge_perspective(dist)
    terms = list(lam.coeffs.items())
    load = g * lam.mean_degree
    q = 1.0
    p = 1.0
    for it in range(1, max_iters + 1):
        p = -math.expm1(-load * q)
        q_new = sum(c * p ** (d - 1) for d, c in terms)
        if abs(q_new - q) < tol:
            return DEState(q_new, -math.expm1(-load * q_new), it)
        q = q_new
    return DEState(q, p, max_iters)


def asymptotic_plp(dist: DegreeDistribution, g: float, weighting: str = "edge") -> float:
    """Asymptotic fraction of unresolved users at load ``g``.

    A degree-d user stays unresolved with probability p^d. ``"node"``
    averages this over Lambda (plain per-user loss); ``"edge"`` averages
    over lambda, i.e. weights users by their number of copies, which is
    the convention of the published gamma constants.
    """
    state = de_fixed_point(dist, g)
    p = state.p
    if state.converged_to_zero:
        return 0.0
    if weighting == "node":
        weights = dist.coeffs
    elif weighting == "edge":
        weights = edge_perspective(dist).coeffs
    else:
        raise ValueError(f"weighting must be 'node' or 'edge', not {weighting!r}")
    return min(1.0, max(0.0, sum(w * p**d for d, w in weights.items())))


def _decodes(dist: DegreeDistribution, g: float, max_iters: int) -> bool:
    """Does DE at load g drive q below VANISHING_Q?

    Gives up once q stalls in relative terms; an absolute step test would
    wrongly stall on slow linear convergence (degree-2 users).
    """
    lam = edge_perspective(dist)
    terms = list(lam.coeffs.items())
    load = g * lam.mean_degree
    q = 1.0
    for _ in range(max_iters):
        p = -math.expm1(-load * q)
        q_new = sum(c * p ** (d - 1) for d, c in terms)
        if q_new < VANISHING_Q:
            return True
        if q - q_new <= DEFAULT_TOL * q_new:
            return False
        q = q_new
    return False


def bp_threshold(
    dist: DegreeDistribution,
    tol: float = 1e-7,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> ThresholdResult:
    """Largest load for which DE drives q to zero, by bisection."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi = bracket
    if not (_decodes(dist, lo, max_iters) and not _decodes(dist, hi, max_iters)):
        raise BracketFailure(f"DE does not change behaviour across [{lo}, {hi}]")
    steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _decodes(dist, mid, max_iters):
            lo = mid
        else:
            hi = mid
        steps += 1
    return ThresholdResult(0.5 * (lo + hi), hi - lo, steps)


def compute_gamma(dist: DegreeDistribution) -> float:
    """Asymptotic loss fraction at full load g = 1."""
    return asymptotic_plp(dist, 1.0)
