"""Problem data model: instances, assignments, validation, normalization.

An instance is a complete bipartite cost matrix over two vertex sets A
(rows, size s) and B (columns, size t) plus per-vertex degree bounds.
Row i must be matched with between ``a_demand[i]`` and ``a_capacity[i]``
distinct columns, column j with between ``b_demand[j]`` and
``b_capacity[j]`` distinct rows.  A pair (i, j) can be used at most once.
The objective is the minimum total cost over the chosen pairs.

All quantities are non-negative integers and all arithmetic is exact.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "Instance",
    "Assignment",
    "ValidationReport",
    "validate_instance",
    "normalize_instance",
    "assignment_cost",
    "make_assignment",
    "instance_to_json",
    "instance_from_json",
    "instance_digest",
]

_INSTANCE_KEYS = ("s", "t", "cost", "a_demand", "a_capacity", "b_demand", "b_capacity")


@dataclass(frozen=True)
class Instance:
    """Immutable problem instance.

    Construction is deliberately permissive: inconsistent shapes or bad
    bounds are representable so that ``validate_instance`` can report on
    them.  Every solver entry point normalizes and validates first.
    """

    s: int
    t: int
    cost: tuple[tuple[int, ...], ...]
    a_demand: tuple[int, ...]
    a_capacity: tuple[int, ...]
    b_demand: tuple[int, ...]
    b_capacity: tuple[int, ...]

    @classmethod
    def from_lists(
        cls,
        cost: Sequence[Sequence[int]],
        a_demand: Sequence[int],
        a_capacity: Sequence[int],
        b_demand: Sequence[int],
        b_capacity: Sequence[int],
    ) -> "Instance":
        return cls(
            s=len(cost),
            t=len(cost[0]) if cost else 0,
            cost=tuple(tuple(int(c) for c in row) for row in cost),
            a_demand=tuple(int(x) for x in a_demand),
            a_capacity=tuple(int(x) for x in a_capacity),
            b_demand=tuple(int(x) for x in b_demand),
            b_capacity=tuple(int(x) for x in b_capacity),
        )


@dataclass(frozen=True)
class Assignment:
    """A set of matched (row, column) pairs plus its recomputed total cost."""

    pairs: tuple[tuple[int, int], ...]
    total_cost: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the necessary-condition screen.

    ``feasible_necessary`` is a screen, not a guarantee: instances that
    pass can still be infeasible (the flow-based check is authoritative).
    """

    feasible_necessary: bool
    violations: tuple[str, ...]


def _is_int(x: object) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_bound_vector(name: str, vec: Sequence[object], n: int, out: list[str]) -> bool:
    if len(vec) != n:
        out.append(f"shape: {name} has length {len(vec)}, expected {n}")
        return False
    ok = True
    for k, v in enumerate(vec):
        if not _is_int(v) or v < 0:
            out.append(f"type: {name}[{k}] = {v!r} is not a non-negative integer")
            ok = False
    return ok


def validate_instance(inst: Instance) -> ValidationReport:
    """Check necessary feasibility conditions; never raises.

    Checks shapes, integrality, demand <= capacity on both sides,
    per-vertex demand against the opposite side size, and the two
    aggregate conditions sum(a_demand) <= sum(effective b_capacity) and
    sum(b_demand) <= sum(effective a_capacity).  Effective capacities
    are clipped to the opposite side size, since a vertex can never be
    matched more often than there are partners.

    These conditions are necessary but not sufficient; see
    ``bmatch.oracles.feasibility_check`` for the exact test.
    """
    v: list[str] = []
    if not _is_int(inst.s) or not _is_int(inst.t) or inst.s < 1 or inst.t < 1:
        v.append(f"shape: s={inst.s!r}, t={inst.t!r} must be positive integers")
        return ValidationReport(False, tuple(v))

    shapes_ok = True
    if len(inst.cost) != inst.s:
        v.append(f"shape: cost has {len(inst.cost)} rows, expected {inst.s}")
        shapes_ok = False
    else:
        for i, row in enumerate(inst.cost):
            if len(row) != inst.t:
                v.append(f"shape: cost row {i} has length {len(row)}, expected {inst.t}")
                shapes_ok = False
            else:
                for j, c in enumerate(row):
                    if not _is_int(c) or c < 0:
                        v.append(f"type: cost[{i}][{j}] = {c!r} is not a non-negative integer")
                        shapes_ok = False
    shapes_ok &= _check_bound_vector("a_demand", inst.a_demand, inst.s, v)
    shapes_ok &= _check_bound_vector("a_capacity", inst.a_capacity, inst.s, v)
    shapes_ok &= _check_bound_vector("b_demand", inst.b_demand, inst.t, v)
    shapes_ok &= _check_bound_vector("b_capacity", inst.b_capacity, inst.t, v)
    if not shapes_ok:
        return ValidationReport(False, tuple(v))

    for i in range(inst.s):
        if inst.a_demand[i] > inst.a_capacity[i]:
            v.append(f"bounds: a_demand[{i}]={inst.a_demand[i]} exceeds a_capacity[{i}]={inst.a_capacity[i]}")
        if inst.a_demand[i] > inst.t:
            v.append(f"bounds: a_demand[{i}]={inst.a_demand[i]} exceeds t={inst.t}")
    for j in range(inst.t):
        if inst.b_demand[j] > inst.b_capacity[j]:
            v.append(f"bounds: b_demand[{j}]={inst.b_demand[j]} exceeds b_capacity[{j}]={inst.b_capacity[j]}")
        if inst.b_demand[j] > inst.s:
            v.append(f"bounds: b_demand[{j}]={inst.b_demand[j]} exceeds s={inst.s}")

    eff_a_cap = sum(min(c, inst.t) for c in inst.a_capacity)
    eff_b_cap = sum(min(c, inst.s) for c in inst.b_capacity)
    if sum(inst.a_demand) > eff_b_cap:
        v.append(f"aggregate: sum(a_demand)={sum(inst.a_demand)} exceeds total effective b_capacity={eff_b_cap}")
    if sum(inst.b_demand) > eff_a_cap:
        v.append(f"aggregate: sum(b_demand)={sum(inst.b_demand)} exceeds total effective a_capacity={eff_a_cap}")

    return ValidationReport(not v, tuple(v))


def normalize_instance(inst: Instance) -> Instance:
    """Clip capacities to the opposite side size; reject hard violations.

    ``a_capacity[i]`` is lowered to ``min(a_capacity[i], t)`` (a row can
    never use more than t distinct columns) and symmetrically for
    ``b_capacity``.  Idempotent.  Violations that clipping cannot repair
    (bad shapes, demand above capacity or above the opposite side size,
    aggregate demand above effective capacity) raise ``ValueError``.
    """
    report = validate_instance(inst)
    if not report.feasible_necessary:
        raise ValueError("instance has hard violations: " + "; ".join(report.violations))
    return Instance(
        s=inst.s,
        t=inst.t,
        cost=inst.cost,
        a_demand=inst.a_demand,
        a_capacity=tuple(min(c, inst.t) for c in inst.a_capacity),
        b_demand=inst.b_demand,
        b_capacity=tuple(min(c, inst.s) for c in inst.b_capacity),
    )


def assignment_cost(inst: Instance, pairs: Iterable[tuple[int, int]]) -> int:
    """Total cost of a pair set.  Rejects out-of-range and duplicate pairs."""
    seen: set[tuple[int, int]] = set()
    total = 0
    for p in pairs:
        i, j = p
        if not (0 <= i < inst.s and 0 <= j < inst.t):
            raise ValueError(f"pair {p!r} out of range for {inst.s}x{inst.t} instance")
        if p in seen:
            raise ValueError(f"duplicate pair {p!r}")
        seen.add((i, j))
        total += inst.cost[i][j]
    return total


def make_assignment(inst: Instance, pairs: Iterable[tuple[int, int]]) -> Assignment:
    ps = tuple(sorted((int(i), int(j)) for i, j in pairs))
    return Assignment(pairs=ps, total_cost=assignment_cost(inst, ps))


def instance_to_json(inst: Instance) -> str:
    """Canonical single-line JSON encoding (stable key order, no spaces)."""
    doc = {
        "s": inst.s,
        "t": inst.t,
        "cost": [list(row) for row in inst.cost],
        "a_demand": list(inst.a_demand),
        "a_capacity": list(inst.a_capacity),
        "b_demand": list(inst.b_demand),
        "b_capacity": list(inst.b_capacity),
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def instance_from_json(text: str) -> Instance:
    """Parse an instance document.  Unknown keys are rejected."""
    doc = json.loads(text)
    if not isinstance(doc, dict):
        raise ValueError("instance document must be a JSON object")
    unknown = sorted(set(doc) - set(_INSTANCE_KEYS))
    if unknown:
        raise ValueError(f"unknown instance keys: {', '.join(unknown)}")
    missing = sorted(set(_INSTANCE_KEYS) - set(doc))
    if missing:
        raise ValueError(f"missing instance keys: {', '.join(missing)}")
    if not _is_int(doc["s"]) or not _is_int(doc["t"]):
        raise ValueError("s and t must be integers")
    cost = doc["cost"]
    if not isinstance(cost, list) or not all(isinstance(r, list) for r in cost):
        raise ValueError("cost must be a list of lists")
    for key in ("a_demand", "a_capacity", "b_demand", "b_capacity"):
        if not isinstance(doc[key], list):
            raise ValueError(f"{key} must be a list")
    return Instance(
        s=doc["s"],
        t=doc["t"],
        cost=tuple(tuple(c for c in row) for row in cost),
        a_demand=tuple(doc["a_demand"]),
        a_capacity=tuple(doc["a_capacity"]),
        b_demand=tuple(doc["b_demand"]),
        b_capacity=tuple(doc["b_capacity"]),
    )


def instance_digest(inst: Instance) -> str:
    """Short stable content hash, used to key differential-test fixtures."""
    return hashlib.sha256(instance_to_json(inst).encode()).hexdigest()[:12]
