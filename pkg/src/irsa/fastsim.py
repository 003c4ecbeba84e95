"""Vectorized frame generation plus a compiled peeling kernel for bulk trials.

Randomness is drawn with numpy in blocks; the kernel only places copies
and decodes. ``frame.sic_decode`` is the reference the kernel is tested
against.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numba
import numpy as np

from .degree import DegreeDistribution, mean_degree, sample_degrees
from .errors import DegreeExceedsSlots
from .frame import ActivityModel, BinomialActivity, FixedActivity, PoissonActivity

# caps memory per block at roughly this many uniforms
EDGE_BUDGET = 2_000_000


@numba.njit(cache=True, nogil=True)
def place_slots(m, degrees, uniforms):
    """Floyd's sampling: each user's d uniforms -> d distinct slots, sorted."""
    out = np.empty(uniforms.shape[0], dtype=np.int64)
    pos = 0
    for i in range(degrees.shape[0]):
        d = degrees[i]
        for k in range(d):
            j = m - d + k
            t = np.int64(uniforms[pos + k] * (j + 1))
            if t > j:
                t = j
            for r in range(pos, pos + k):
                if out[r] == t:
                    t = j
                    break
            # insertion keeps the user's slots sorted; j exceeds all earlier picks
            r = pos + k
            while r > pos and out[r - 1] > t:
                out[r] = out[r - 1]
                r -= 1
            out[r] = t
        pos += d
    return out


@numba.njit(cache=True, nogil=True)
def decode_frames(m, n_active, degrees, slots, max_errors):
    """Peel each frame; return per-frame lost counts and frames processed.

    Stops early once ``max_errors`` frames have failed (negative: never).
    """
    n_frames = n_active.shape[0]
    lost = np.zeros(n_frames, dtype=np.int64)
    count = np.zeros(m, dtype=np.int64)
    xor_id = np.zeros(m, dtype=np.int64)
    user_off = 0
    edge_off = 0
    errors = 0
    done = 0
    for f in range(n_frames):
        na = n_active[f]
        starts = np.empty(na + 1, dtype=np.int64)
        starts[0] = edge_off
        for u in range(na):
            starts[u + 1] = starts[u] + degrees[user_off + u]
        n_edges = starts[na] - edge_off
        for e in range(edge_off, starts[na]):
            count[slots[e]] = 0
            xor_id[slots[e]] = 0
        for u in range(na):
            for e in range(starts[u], starts[u + 1]):
                count[slots[e]] += 1
                xor_id[slots[e]] ^= u
        stack = np.empty(n_edges + 1, dtype=np.int64)
        top = 0
        for e in range(edge_off, starts[na]):
            s = slots[e]
            if count[s] == 1:
                stack[top] = s
                top += 1
                count[s] = -count[s]  # mark queued; restored on pop
        resolved = 0
        while top > 0:
            top -= 1
            s = stack[top]
            count[s] = -count[s]
            if count[s] != 1:
                continue
            u = xor_id[s]
            resolved += 1
            for e in range(starts[u], starts[u + 1]):
                t = slots[e]
                queued = count[t] < 0
                if queued:
                    count[t] = -count[t]
                count[t] -= 1
                xor_id[t] ^= u
                if queued:
                    count[t] = -count[t]
                elif count[t] == 1:
                    stack[top] = t
                    top += 1
                    count[t] = -count[t]
        lost[f] = na - resolved
        user_off += na
        edge_off = starts[na]
        done = f + 1
        if lost[f] > 0:
            errors += 1
            if max_errors >= 0 and errors >= max_errors:
                break
    return lost, done


@dataclass
class FrameStats:
    """Mergeable counters from a batch of simulated frames."""

    frames: int = 0
    frame_errors: int = 0
    packets_sent: int = 0
    packets_lost: int = 0
    sent_sq: int = 0
    lost_sq: int = 0
    lost_sent: int = 0

    def __add__(self, other: FrameStats) -> FrameStats:
        return FrameStats(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    @classmethod
    def from_frames(cls, sent: np.ndarray, lost: np.ndarray) -> FrameStats:
        sent = sent.astype(np.int64)
        lost = lost.astype(np.int64)
        return cls(
            frames=len(sent),
            frame_errors=int(np.count_nonzero(lost)),
            packets_sent=int(sent.sum()),
            packets_lost=int(lost.sum()),
            sent_sq=int((sent * sent).sum()),
            lost_sq=int((lost * lost).sum()),
            lost_sent=int((lost * sent).sum()),
        )


def draw_active_counts(activity: ActivityModel, rng: np.random.Generator, size: int) -> np.ndarray:
    if isinstance(activity, PoissonActivity):
        return rng.poisson(activity.mean, size).astype(np.int64)
    if isinstance(activity, BinomialActivity):
        return rng.binomial(activity.population, activity.prob, size).astype(np.int64)
    if isinstance(activity, FixedActivity):
        return np.full(size, activity.count, dtype=np.int64)
    raise TypeError(f"unsupported activity model {activity!r}")


def expected_active(activity: ActivityModel) -> float:
    if isinstance(activity, PoissonActivity):
        return activity.mean
    if isinstance(activity, BinomialActivity):
        return activity.population * activity.prob
    return float(activity.count)


def draw_block(m: int, dist: DegreeDistribution, activity: ActivityModel,
               rng: np.random.Generator, n_frames: int):
    """Random frame block as flat arrays (active counts, degrees, slots)."""
    n_active = draw_active_counts(activity, rng, n_frames)
    degrees = sample_degrees(dist, rng, int(n_active.sum()))
    if degrees.size and degrees.max() > m:
        raise DegreeExceedsSlots(f"sampled degree {degrees.max()} exceeds m={m} slots")
    uniforms = rng.random(int(degrees.sum()))
    slots = place_slots(m, degrees, uniforms)
    return n_active, degrees, slots


def block_size(dist: DegreeDistribution, activity: ActivityModel) -> int:
    per_frame = expected_active(activity) * mean_degree(dist) + 1.0
    return max(1, int(EDGE_BUDGET / per_frame))


def simulate_frames(
    m: int,
    dist: DegreeDistribution,
    activity: ActivityModel,
    rng: np.random.Generator,
    n_frames: int,
    max_errors: int | None = None,
) -> FrameStats:
    """Simulate up to ``n_frames`` frames, stopping early after ``max_errors``
    frame errors when given."""
    stats = FrameStats()
    chunk = block_size(dist, activity)
    remaining = n_frames
    while remaining > 0:
        b = min(chunk, remaining)
        n_active, degrees, slots = draw_block(m, dist, activity, rng, b)
        budget = -1 if max_errors is None else max_errors - stats.frame_errors
        lost, done = decode_frames(m, n_active, degrees, slots, budget)
        stats = stats + FrameStats.from_frames(n_active[:done], lost[:done])
        remaining -= done
        if max_errors is not None and stats.frame_errors >= max_errors:
            break
    return stats
