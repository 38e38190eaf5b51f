"""Shared helpers: seeded random instances for cross-checking solvers."""

import random

import pytest

from bmatch import Instance
from bmatch.oracles import feasibility_check


def draw_instance(rng, max_s=4, max_t=4, cost_max=9, cap_max=3, demands_one=False):
    """One random instance, not necessarily feasible."""
    s = rng.randint(1, max_s)
    t = rng.randint(1, max_t)
    cost = [[rng.randint(0, cost_max) for _ in range(t)] for _ in range(s)]
    a_cap = [rng.randint(1, min(cap_max, t)) for _ in range(s)]
    b_cap = [rng.randint(1, min(cap_max, s)) for _ in range(t)]
    if demands_one:
        a_dem, b_dem = [1] * s, [1] * t
    else:
        a_dem = [rng.randint(0, c) for c in a_cap]
        b_dem = [rng.randint(0, c) for c in b_cap]
    return Instance.from_lists(
        cost=cost, a_demand=a_dem, a_capacity=a_cap, b_demand=b_dem, b_capacity=b_cap
    )


def draw_feasible(rng, **kw):
    while True:
        inst = draw_instance(rng, **kw)
        ok, _ = feasibility_check(inst)
        if ok:
            return inst


@pytest.fixture
def rng():
    return random.Random(0xB347C4)
