"""IRSA frame realizations and the SIC (peeling) decoder.

Users are variable nodes, slots are check nodes. Only active users are
materialized; inactive users never interfere so they are irrelevant to
decoding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .degree import DegreeDistribution, sample_degrees
from .errors import ConfigError, DegreeExceedsSlots, TooLargeToEnumerate

ENUMERATION_LIMIT = 10**7


# -- activity models ---------------------------------------------------------


@dataclass(frozen=True)
class PoissonActivity:
    """Infinite population: active count ~ Poisson(mean)."""

    mean: float

    def draw(self, rng: np.random.Generator) -> int:
        return int(rng.poisson(self.mean))


@dataclass(frozen=True)
class BinomialActivity:
    """Finite population of ``population`` users, each active w.p. ``prob``."""

    population: int
    prob: float

    def draw(self, rng: np.random.Generator) -> int:
        return int(rng.binomial(self.population, self.prob))


@dataclass(frozen=True)
class FixedActivity:
    count: int

    def draw(self, rng: np.random.Generator) -> int:
        return self.count


ActivityModel = PoissonActivity | BinomialActivity | FixedActivity


def activity_for_load(kind: str, g: float, m: int, population: int | None = None) -> ActivityModel:
    """Build the activity model giving an expected ``g * m`` active users."""
    mean = g * m
    if kind == "poisson":
        return PoissonActivity(mean)
    if kind == "binomial":
        if population is None or population < mean:
            raise ConfigError(f"binomial activity needs population >= g*m = {mean}")
        return BinomialActivity(population, mean / population)
    if kind == "fixed":
        return FixedActivity(int(round(mean)))
    raise ConfigError(f"unknown activity model {kind!r}")


# -- frame graph ---------------------------------------------------------------


@dataclass(frozen=True)
class ActiveUser:
    user_id: int
    slots: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class FrameGraph:
    num_slots: int
    users: tuple[ActiveUser, ...]

    def __post_init__(self):
        if self.num_slots < 1:
            raise ValueError("a frame needs at least one slot")
        seen = set()
        for u in self.users:
            if u.user_id in seen:
                raise ValueError(f"duplicate user id {u.user_id}")
            seen.add(u.user_id)
            if len(set(u.slots)) != len(u.slots):
                raise ValueError(f"user {u.user_id} repeats a slot")
            if any(s < 0 or s >= self.num_slots for s in u.slots):
                raise ValueError(f"user {u.user_id} has a slot outside [0, {self.num_slots})")

    @classmethod
    def from_slot_sets(cls, m: int, slot_sets: Iterable[Iterable[int]]) -> FrameGraph:
        users = tuple(ActiveUser(i, tuple(sorted(s))) for i, s in enumerate(slot_sets))
        return cls(m, users)

    @property
    def user_ids(self) -> frozenset[int]:
        return frozenset(u.user_id for u in self.users)

    def occupancy(self) -> np.ndarray:
        counts = np.zeros(self.num_slots, dtype=np.int64)
        for u in self.users:
            counts[list(u.slots)] += 1
        return counts

    def without(self, user_id: int) -> FrameGraph:
        return FrameGraph(self.num_slots, tuple(u for u in self.users if u.user_id != user_id))

    def dump(self) -> str:
        lines = [f"m={self.num_slots}"]
        lines += [f"{u.user_id}\t{','.join(map(str, u.slots))}" for u in self.users]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> FrameGraph:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("m="):
            raise ValueError("frame dump must start with an 'm=<slots>' header")
        m = int(lines[0][2:])
        users = []
        for ln in lines[1:]:
            uid, _, slots = ln.partition("\t")
            users.append(ActiveUser(int(uid), tuple(int(s) for s in slots.split(",") if s)))
        return cls(m, tuple(users))


def generate_frame(
    m: int,
    dist: DegreeDistribution,
    activity: ActivityModel,
    rng: np.random.Generator,
) -> FrameGraph:
    """Draw one frame: active count from ``activity``, degrees i.i.d. from
    ``dist``, and for each user a uniformly random set of distinct slots."""
    n_active = activity.draw(rng)
    degrees = sample_degrees(dist, rng, n_active)
    if n_active and degrees.max() > m:
        raise DegreeExceedsSlots(f"sampled degree {degrees.max()} exceeds m={m} slots")
    users = tuple(
        ActiveUser(i, tuple(sorted(int(s) for s in rng.choice(m, size=int(d), replace=False))))
        for i, d in enumerate(degrees)
    )
    return FrameGraph(m, users)


# -- SIC decoding --------------------------------------------------------------


@dataclass(frozen=True)
class DecodeOutcome:
    resolved: frozenset[int]
    unresolved: frozenset[int]
    iterations: int

    @property
    def frame_error(self) -> bool:
        return bool(self.unresolved)


def sic_decode(frame: FrameGraph, rng: np.random.Generator | None = None) -> DecodeOutcome:
    """Successive interference cancellation under the collision channel.

    Repeatedly takes a slot holding exactly one copy, decodes that user and
    cancels all of its copies. One user is resolved per iteration. With
    ``rng`` the next singleton slot is picked at random instead of FIFO;
    the resolved set does not depend on that choice.
    """
    count = [0] * frame.num_slots
    occupants: list[set[int]] = [set() for _ in range(frame.num_slots)]
    slots_of = {u.user_id: u.slots for u in frame.users}
    for u in frame.users:
        for s in u.slots:
            count[s] += 1
            occupants[s].add(u.user_id)

    pending = [s for s in range(frame.num_slots) if count[s] == 1]
    resolved: set[int] = set()
    while pending:
        if rng is not None:
            k = int(rng.integers(len(pending)))
            pending[k], pending[-1] = pending[-1], pending[k]
        s = pending.pop()
        if count[s] != 1:
            continue
        (uid,) = occupants[s]
        resolved.add(uid)
        for t in slots_of[uid]:
            count[t] -= 1
            occupants[t].discard(uid)
            if count[t] == 1:
                pending.append(t)

    unresolved = frozenset(slots_of) - resolved
    return DecodeOutcome(frozenset(resolved), unresolved, len(resolved))


# -- brute-force oracle --------------------------------------------------------


def exact_fer_fraction(m: int, degrees: Sequence[int]) -> Fraction:
    """Exact frame error probability by enumerating every slot assignment."""
    if any(d < 1 or d > m for d in degrees):
        raise DegreeExceedsSlots(f"degrees {list(degrees)} do not fit in m={m} slots")
    total = math.prod(math.comb(m, d) for d in degrees)
    if total > ENUMERATION_LIMIT:
        raise TooLargeToEnumerate(f"{total} assignments exceeds the {ENUMERATION_LIMIT} limit")
    choices = [list(itertools.combinations(range(m), d)) for d in degrees]
    errors = 0
    for assignment in itertools.product(*choices):
        if sic_decode(FrameGraph.from_slot_sets(m, assignment)).frame_error:
            errors += 1
    return Fraction(errors, total)


def exact_fer_small(m: int, degrees: Sequence[int]) -> float:
    return float(exact_fer_fraction(m, degrees))
