"""Repetition-degree distributions Lambda(x) = sum_d Lambda_d x^d.

A distribution is written in config files and on the command line as
comma-separated ``d:p`` pairs, e.g. ``"3:0.86,8:0.14"``.
"""

from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    DistributionParseError,
    EmptyDistribution,
    NegativeCoefficient,
    NotNormalized,
    UnknownDistribution,
)

INPUT_TOL = 1e-9
INTERNAL_TOL = 1e-12


class DegreeOneWarning(UserWarning):
    """Degree-1 users can never be recovered from a collision."""


class RenormalizedWarning(UserWarning):
    pass


@dataclass(frozen=True)
class DegreeDistribution:
    """Node-perspective degree distribution, immutable once built.

    Use :func:`make_distribution` rather than the constructor directly.
    """

    coeffs: Mapping[int, float]
    renormalized: bool = False

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(self.coeffs)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(self.coeffs.values())

    @property
    def max_degree(self) -> int:
        return max(self.coeffs)

    @property
    def min_degree(self) -> int:
        return min(self.coeffs)

    @property
    def has_degree_one(self) -> bool:
        return self.coeffs.get(1, 0.0) > 0.0

    def __call__(self, x):
        """Evaluate Lambda(x)."""
        return sum(p * x**d for d, p in self.coeffs.items())

    def to_spec(self) -> str:
        return ",".join(f"{d}:{p:.12g}" for d, p in self.coeffs.items())

    def __str__(self) -> str:
        return " + ".join(
            f"x^{d}" if p == 1.0 else f"{p:g}x^{d}" for d, p in self.coeffs.items()
        )


@dataclass(frozen=True)
class EdgeDistribution:
    coeffs: Mapping[int, float]
    mean_degree: float

    def __call__(self, x):
        """Evaluate lambda(x) = sum_d lambda_d x^(d-1)."""
        return sum(l * x ** (d - 1) for d, l in self.coeffs.items())


def make_distribution(coeffs: Mapping[int, float]) -> DegreeDistribution:
    """Validate a degree -> probability map and freeze it.

    Sums within ``INPUT_TOL`` of one are renormalized (flagged via
    ``renormalized`` and a warning); anything further off is rejected.
    Zero-probability entries are dropped.
    """
    if not coeffs:
        raise EmptyDistribution("degree distribution has no entries")
    clean: dict[int, float] = {}
    for d, p in coeffs.items():
        if int(d) != d or d < 1:
            raise DistributionParseError(f"degree must be a positive integer, got {d!r}")
        p = float(p)
        if not np.isfinite(p):
            raise NotNormalized(f"non-finite probability for degree {d}")
        if p < 0:
            raise NegativeCoefficient(f"Lambda_{d} = {p} < 0")
        if p > 0:
            clean[int(d)] = clean.get(int(d), 0.0) + p
    if not clean:
        raise EmptyDistribution("all probabilities are zero")
    total = math.fsum(clean.values())
    if abs(total - 1.0) > INPUT_TOL:
        raise NotNormalized(f"probabilities sum to {total!r}, not 1")
    renormalized = abs(total - 1.0) > INTERNAL_TOL
    if renormalized:
        warnings.warn(
            f"degree distribution summed to {total!r}; renormalized", RenormalizedWarning
        )
    if total != 1.0:
        clean = {d: p / total for d, p in clean.items()}
    if 1 in clean:
        warnings.warn(
            "distribution puts mass on degree 1; such users are lost on any collision",
            DegreeOneWarning,
        )
    ordered = dict(sorted(clean.items()))
    return DegreeDistribution(MappingProxyType(ordered), renormalized)


def mean_degree(dist: DegreeDistribution) -> float:
    """Lambda'(1), the average number of copies per user."""
    return float(sum(d * p for d, p in dist.coeffs.items()))


def edge_perspective(dist: DegreeDistribution) -> EdgeDistribution:
    mean = mean_degree(dist)
    lam = {d: p * d / mean for d, p in dist.coeffs.items()}
    return EdgeDistribution(MappingProxyType(lam), mean)


def sample_degree(dist: DegreeDistribution, rng: np.random.Generator) -> int:
    """Draw one repetition degree."""
    return int(sample_degrees(dist, rng, 1)[0])


def sample_degrees(dist: DegreeDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    degrees = np.fromiter(dist.coeffs, dtype=np.int64)
    if len(degrees) == 1:
        return np.full(size, degrees[0], dtype=np.int64)
    probs = np.fromiter(dist.coeffs.values(), dtype=float)
    return rng.choice(degrees, size=size, p=probs)


_PAIR = re.compile(r"^\s*(\d+)\s*:\s*([0-9]*\.?[0-9]+(?:[eE][-+]?\d+)?)\s*$")


def parse_distribution(text: str) -> DegreeDistribution:
    """Parse ``"d:p,d:p,..."`` into a distribution."""
    if not text or not text.strip():
        raise EmptyDistribution("empty distribution string")
    coeffs: dict[int, float] = {}
    for chunk in text.split(","):
        match = _PAIR.match(chunk)
        if match is None:
            raise DistributionParseError(f"cannot parse {chunk!r}; expected d:p")
        d = int(match.group(1))
        if d < 1:
            raise DistributionParseError(f"degree must be >= 1, got {d}")
        if d in coeffs:
            raise DistributionParseError(f"degree {d} listed twice")
        coeffs[d] = float(match.group(2))
    return make_distribution(coeffs)


NAMED_DISTRIBUTIONS: dict[str, dict[int, float]] = {
    "x3": {3: 1.0},
    "x4": {4: 1.0},
    "x5": {5: 1.0},
    "lambda1": {4: 0.5, 8: 0.5},
    "lambda2": {3: 0.86, 8: 0.14},
}


def named_distribution(name: str) -> DegreeDistribution:
    try:
        return make_distribution(NAMED_DISTRIBUTIONS[name])
    except KeyError:
        raise UnknownDistribution(
            f"unknown distribution {name!r}; known: {', '.join(NAMED_DISTRIBUTIONS)}"
        ) from None


def resolve_distribution(text: str) -> tuple[DegreeDistribution, str | None]:
    """Accept either a built-in name or a ``d:p`` list.

    Returns the distribution and its built-in name (None for ad-hoc specs).
    """
    key = text.strip()
    if key in NAMED_DISTRIBUTIONS:
        return named_distribution(key), key
    dist = parse_distribution(key)
    for name, coeffs in NAMED_DISTRIBUTIONS.items():
        if dict(dist.coeffs) == coeffs:
            return dist, name
    return dist, None
