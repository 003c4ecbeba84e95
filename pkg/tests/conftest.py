import itertools

import numpy as np
import pytest

from irsa.frame import FrameGraph


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def max_stopping_set(frame: FrameGraph) -> frozenset:
    """Union of all stopping sets, by brute force over user subsets.

    A set S of users is a stopping set when every slot used by S is used by
    at least two members of S. Independent of the peeling implementation.
    """
    users = {u.user_id: set(u.slots) for u in frame.users}
    ids = sorted(users)
    union = set()
    for r in range(2, len(ids) + 1):
        for subset in itertools.combinations(ids, r):
            counts = {}
            for uid in subset:
                for s in users[uid]:
                    counts[s] = counts.get(s, 0) + 1
            if all(c >= 2 for c in counts.values()):
                union.update(subset)
    return frozenset(union)


def random_frame(rng, m, n_users, max_degree):
    sets = []
    for _ in range(n_users):
        d = int(rng.integers(1, min(max_degree, m) + 1))
        sets.append(rng.choice(m, size=d, replace=False).tolist())
    return FrameGraph.from_slot_sets(m, sets)
