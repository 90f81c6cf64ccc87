"""Brute-force exact computations over the full allocation space.

`enumerate_allocations` streams every allocation in mixed-radix counter order
(good 1 is the most significant digit; digit order is unallocated first, then
agents 1..n). `exact_optimum` and `optimum_value` run a table-driven
depth-first scan with a float prefilter, then re-score the surviving
candidates exactly, so the returned optimum and argmax set are decided by
exact arithmetic.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from .fairness import (
    DEFAULT_QUAD_TOL,
    NotionParams,
    OBJECTIVES,
    WelfareValue,
    check_notion,
    extended_harmonic,
    harmonic,
    modified_harmonic,
    welfare,
)
from .instances import Allocation, Instance

BUDGET_ENV_VAR = "FAIRSHARE_BUDGET"
DEFAULT_MAX_STATES = 10_000_000
ARGMAX_LIMIT = 500_000
_COMPACT_AT = 8_192
_EPS = 1e-6


class BudgetExceededError(RuntimeError):
    """The allocation space is larger than the search budget allows."""


@dataclass(frozen=True)
class SearchBudget:
    max_states: int = DEFAULT_MAX_STATES
    mode: str = "exhaustive"  # or "sampled" (honored by callers that sample)

    def __post_init__(self):
        if self.max_states < 1:
            raise ValueError("max_states must be positive")
        if self.mode not in ("exhaustive", "sampled"):
            raise ValueError(f"unknown budget mode {self.mode!r}")

    @staticmethod
    def default() -> "SearchBudget":
        raw = os.environ.get(BUDGET_ENV_VAR)
        if raw is None:
            return SearchBudget()
        return SearchBudget(max_states=int(raw))


def _state_count(instance: Instance, complete_only: bool) -> int:
    base = instance.n if complete_only else instance.n + 1
    return base**instance.m


def _check_budget(instance: Instance, complete_only: bool, budget: Optional[SearchBudget]) -> SearchBudget:
    budget = budget or SearchBudget.default()
    states = _state_count(instance, complete_only)
    if states > budget.max_states:
        raise BudgetExceededError(
            f"{states} allocations exceed the budget of {budget.max_states} states"
        )
    return budget


def enumerate_allocations(
    instance: Instance, complete_only: bool = False, budget: Optional[SearchBudget] = None
) -> Iterator[Allocation]:
    """Yield every allocation exactly once, in mixed-radix counter order."""
    _check_budget(instance, complete_only, budget)
    n, m = instance.n, instance.m
    owners = list(range(1, n + 1)) if complete_only else list(range(0, n + 1))
    bundles: list[set[int]] = [set() for _ in range(n + 1)]

    def rec(good: int) -> Iterator[Allocation]:
        if good > m:
            yield Allocation(tuple(frozenset(bundles[i]) for i in range(1, n + 1)))
            return
        for owner in owners:
            if owner:
                bundles[owner].add(good)
            yield from rec(good + 1)
            if owner:
                bundles[owner].remove(good)

    yield from rec(1)


def notion_exists(
    instance: Instance,
    params: NotionParams,
    complete_only: bool = False,
    budget: Optional[SearchBudget] = None,
) -> tuple[bool, Optional[Allocation]]:
    """Whether some (complete, if flagged) allocation satisfies the notion;
    returns the first witnessing allocation in enumeration order."""
    for allocation in enumerate_allocations(instance, complete_only, budget):
        if check_notion(allocation, instance, params).verdict:
            return True, allocation
    return False, None


# ---------------------------------------------------------------------------
# Exact optimization


def _mask_utilities(instance: Instance) -> list[list[Fraction]]:
    """Per-agent utility of every good subset, indexed by bitmask
    (bit g-1 set means good g is in the bundle)."""
    m = instance.m
    goods_by_mask = [
        frozenset(g for g in range(1, m + 1) if mask >> (g - 1) & 1) for mask in range(1 << m)
    ]
    return [[v.value(b) for b in goods_by_mask] for v in instance.valuations]


def _score_tables(instance: Instance, objective: str, x, utv, tol):
    """Per-agent float contribution tables indexed by mask, plus (for the
    lexicographic objectives) 0/1 positive-utility tables."""
    n = instance.n
    pos = None
    if objective == "utilitarian":
        contrib = [[float(u) for u in agent] for agent in utv]
    elif objective == "whw":
        x = Fraction(x)
        contrib = []
        for k in range(n):
            w = float(instance.weights[k])
            max_u = max(int(u) for u in utv[k])
            if x < 1:
                by_count = [w * float(modified_harmonic(u, x)) for u in range(max_u + 1)]
            else:
                by_count = [0.0] + [w * float(modified_harmonic(u, x)) for u in range(1, max_u + 1)]
            contrib.append([by_count[int(u)] for u in utv[k]])
        if x == 1:
            pos = [[1 if u > 0 else 0 for u in agent] for agent in utv]
    elif objective == "wnw":
        contrib = []
        for k in range(n):
            w = float(instance.weights[k])
            contrib.append([w * math.log(u) if u > 0 else 0.0 for u in utv[k]])
        pos = [[1 if u > 0 else 0 for u in agent] for agent in utv]
    elif objective == "hw":
        contrib = []
        for k in range(n):
            max_u = max(int(u) for u in utv[k])
            by_count = [float(harmonic(u)) for u in range(max_u + 1)]
            contrib.append([by_count[int(u)] for u in utv[k]])
    else:  # hw-extended
        cache: dict[Fraction, float] = {}

        def ext(u: Fraction) -> float:
            if u not in cache:
                cache[u] = extended_harmonic(u, tol).value
            return cache[u]

        contrib = [[ext(u) for u in agent] for agent in utv]
    return contrib, pos


def _scan(instance: Instance, objective: str, x, complete_only: bool, collect: bool, tol):
    """Incremental DFS with a float prefilter; surviving candidates are
    re-scored exactly. Returns (exact optimum value, argmax or None)."""
    n, m = instance.n, instance.m
    # objective preconditions surface before the scan, not at candidate time
    if objective in ("hw", "hw-extended"):
        from .fairness import _require_additive

        _require_additive(instance, objective, integer_values=objective == "hw")
    utv = _mask_utilities(instance)
    if objective == "whw":
        for k in range(n):
            bad = next((u for u in utv[k] if u.denominator != 1 or u < 0), None)
            if bad is not None:
                raise ValueError(f"whw needs non-negative integer utilities; agent {k + 1} reaches {bad}")
    contrib, pos = _score_tables(instance, objective, x, utv, tol)
    owners = list(range(1, n + 1)) if complete_only else list(range(0, n + 1))
    tuple_mode = pos is not None

    masks = [0] * (n + 1)  # index 0 unused
    assignment = [0] * (m + 1)
    state = {"f": 0.0, "p": 0, "best_f": None, "best_p": -1}
    candidates: list[tuple[int, ...]] = []
    resolved: list = [None, None]  # best (WelfareValue, Allocation) among compacted candidates

    def to_allocation(owners_tuple) -> Allocation:
        lists: list[list[int]] = [[] for _ in range(n)]
        for g, o in enumerate(owners_tuple, start=1):
            if o:
                lists[o - 1].append(g)
        return Allocation.from_lists(lists)

    def compact():
        best_v, best_a = resolved
        for owners_tuple in candidates:
            allocation = to_allocation(owners_tuple)
            value = welfare(allocation, instance, objective, x=x, tol=tol)
            if best_v is None or value > best_v:
                best_v, best_a = value, allocation
        candidates.clear()
        resolved[0], resolved[1] = best_v, best_a

    def leaf():
        f = state["f"]
        if tuple_mode:
            p = state["p"]
            bf, bp = state["best_f"], state["best_p"]
            if bf is None or p > bp or (p == bp and f > bf + _EPS):
                state["best_f"], state["best_p"] = f, p
                candidates.clear()
                candidates.append(tuple(assignment[1:]))
            elif p == bp and f >= bf - _EPS:
                candidates.append(tuple(assignment[1:]))
        else:
            bf = state["best_f"]
            if bf is None or f > bf + _EPS:
                state["best_f"] = f
                candidates.clear()
                candidates.append(tuple(assignment[1:]))
            elif f >= bf - _EPS:
                candidates.append(tuple(assignment[1:]))
        if len(candidates) > (_COMPACT_AT if not collect else ARGMAX_LIMIT):
            if collect:
                raise BudgetExceededError(f"more than {ARGMAX_LIMIT} near-optimal allocations")
            compact()

    if tuple_mode:

        def rec(good: int):
            if good > m:
                leaf()
                return
            bit = 1 << (good - 1)
            for owner in owners:
                assignment[good] = owner
                if owner:
                    table = contrib[owner - 1]
                    ptable = pos[owner - 1]
                    old_mask = masks[owner]
                    new_mask = old_mask | bit
                    old_f, old_p = state["f"], state["p"]
                    state["f"] = old_f + table[new_mask] - table[old_mask]
                    state["p"] = old_p + ptable[new_mask] - ptable[old_mask]
                    masks[owner] = new_mask
                    rec(good + 1)
                    masks[owner] = old_mask
                    state["f"], state["p"] = old_f, old_p
                else:
                    rec(good + 1)

    else:

        def rec(good: int):
            if good > m:
                leaf()
                return
            bit = 1 << (good - 1)
            for owner in owners:
                assignment[good] = owner
                if owner:
                    table = contrib[owner - 1]
                    old_mask = masks[owner]
                    new_mask = old_mask | bit
                    old_f = state["f"]
                    state["f"] = old_f + table[new_mask] - table[old_mask]
                    masks[owner] = new_mask
                    rec(good + 1)
                    masks[owner] = old_mask
                    state["f"] = old_f
                else:
                    rec(good + 1)

    rec(1)

    best_value: Optional[WelfareValue] = resolved[0]
    argmax: list[Allocation] = [] if resolved[1] is None else [resolved[1]]
    for owners_tuple in candidates:
        allocation = to_allocation(owners_tuple)
        value = welfare(allocation, instance, objective, x=x, tol=tol)
        if best_value is None or value > best_value:
            best_value = value
            argmax = [allocation]
        elif collect and value == best_value:
            argmax.append(allocation)
    return best_value, argmax if collect else None


def exact_optimum(
    instance: Instance,
    objective: str,
    x=None,
    budget: Optional[SearchBudget] = None,
    complete_only: bool = False,
    tol=None,
) -> tuple[WelfareValue, list[Allocation]]:
    """Exact optimum of the objective over every allocation (or every
    complete allocation), together with the full argmax set in enumeration
    order. Near-ties in the float prefilter are re-decided exactly."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    if objective == "whw" and x is None:
        raise ValueError("objective whw needs a parameter x")
    _check_budget(instance, complete_only, budget)
    value, argmax = _scan(instance, objective, x, complete_only, collect=True, tol=tol or DEFAULT_QUAD_TOL)
    return value, argmax


def optimum_value(
    instance: Instance,
    objective: str,
    x=None,
    budget: Optional[SearchBudget] = None,
    complete_only: bool = False,
    tol=None,
) -> WelfareValue:
    """Exact optimum value only (no argmax set); same exhaustive search as
    `exact_optimum` with lighter bookkeeping."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    if objective == "whw" and x is None:
        raise ValueError("objective whw needs a parameter x")
    _check_budget(instance, complete_only, budget)
    value, _ = _scan(instance, objective, x, complete_only, collect=False, tol=tol or DEFAULT_QUAD_TOL)
    return value
