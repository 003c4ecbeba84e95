"""Low-load error floor from the dominant stopping set.

At low load the cheapest unresolvable pattern is two users that pick the
same degree and exactly the same slots. With a Poisson number of active
users (mean g*m) the expected number of such pairs is

    E2 = (g m)^2 / 2 * sum_d Lambda_d^2 / C(m, d)

Larger stopping sets are ignored, so this tends to sit slightly below
the true floor.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

from .degree import DegreeDistribution
from .frame import FrameGraph


@dataclass(frozen=True)
class FloorEstimate:
    plp_floor: float
    fep_floor: float
    dominant_term_only: bool = True


def expected_identical_pairs(dist: DegreeDistribution, m: int, g: float) -> float:
    collide = sum(p * p / math.comb(m, d) for d, p in dist.coeffs.items() if d <= m)
    return 0.5 * (g * m) ** 2 * collide


def floor_estimate(dist: DegreeDistribution, m: int, g: float) -> FloorEstimate:
    if g <= 0 or m < 1:
        raise ValueError("need g > 0 and m >= 1")
    pairs = expected_identical_pairs(dist, m, g)
    fep = -math.expm1(-pairs)
    plp = 2.0 * pairs / (g * m)
    return FloorEstimate(plp_floor=min(plp, 1.0), fep_floor=min(fep, 1.0))


def identical_pairs(frame: FrameGraph) -> list[tuple[int, int]]:
    """Pairs of active users whose slot sets coincide exactly."""
    by_slots: dict[tuple[int, ...], list[int]] = defaultdict(list)
    for u in frame.users:
        by_slots[tuple(sorted(u.slots))].append(u.user_id)
    return [
        (ids[i], ids[j])
        for ids in by_slots.values()
        for i in range(len(ids))
        for j in range(i + 1, len(ids))
    ]
