"""Constructive allocation rules.

picking_sequence     weighted turn schedule; each turn goes to an agent with
                     the smallest (picks_so_far + 1 - x) / weight and the
                     agent takes an available good of highest marginal gain.
transfer_algorithm   start from a clean utilitarian-welfare-maximizing
                     allocation and move single goods until the transferable
                     weighted-envy condition holds for every ordered pair.
max_clean_utilitarian / mwhw_gain
                     exchange-graph augmentation over clean bundles; the
                     latter grows, at every step, a growable agent with the
                     largest gain score weight / (size + 1 - x).

The latter three require every valuation to have marginal gains in {0, 1}.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .fairness import _check_unit_interval, check_twef
from .instances import Allocation, Instance, format_rational
from .valuations import ZERO, is_matroid_rank


class MatroidRankRequiredError(ValueError):
    """Raised when a rule that needs binary marginal gains gets a valuation
    without them."""


def _require_matroid_rank(instance: Instance, rule: str) -> None:
    for i, v in enumerate(instance.valuations, start=1):
        if not is_matroid_rank(v):
            raise MatroidRankRequiredError(
                f"{rule} needs matroid-rank valuations; agent {i} (kind {v.kind}) is not"
            )


@dataclass(frozen=True)
class PickStep:
    turn: int
    agent: int
    good: int
    gain: Fraction
    ratio: Fraction  # (picks_so_far + 1 - x) / weight at the moment of assignment


@dataclass(frozen=True)
class PickTrace:
    x: Fraction
    steps: tuple[PickStep, ...]

    def to_json(self) -> dict:
        return {
            "x": format_rational(self.x),
            "steps": [
                {
                    "turn": s.turn,
                    "agent": s.agent,
                    "good": s.good,
                    "gain": format_rational(s.gain),
                    "ratio": format_rational(s.ratio),
                }
                for s in self.steps
            ],
        }


@dataclass(frozen=True)
class TransferStep:
    from_agent: int
    to_agent: int
    good: int
    phi_before: Fraction
    phi_after: Fraction


@dataclass(frozen=True)
class TransferTrace:
    x: Fraction
    steps: tuple[TransferStep, ...]

    def to_json(self) -> dict:
        return {
            "x": format_rational(self.x),
            "steps": [
                {
                    "from": s.from_agent,
                    "to": s.to_agent,
                    "good": s.good,
                    "phi_before": format_rational(s.phi_before),
                    "phi_after": format_rational(s.phi_after),
                }
                for s in self.steps
            ],
        }


def picking_sequence(
    instance: Instance, x, tie_break: str = "index", seed: Optional[int] = None
) -> tuple[Allocation, PickTrace]:
    """Run the weighted picking sequence with parameter x in [0, 1].

    Ties (both the minimizing agent and the best good) break to the lowest
    index by default; tie_break="random" draws among the tied options with a
    generator seeded by `seed`. Agents whose marginal gains are all zero still
    pick (the lowest-index remaining good), so the output is always complete.
    """
    x = _check_unit_interval("x", x)
    if tie_break not in ("index", "random"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    rng = random.Random(seed)
    n, m = instance.n, instance.m
    picks = [0] * (n + 1)  # 1-based
    bundles: list[set[int]] = [set() for _ in range(n + 1)]
    utilities = [ZERO] * (n + 1)
    available = set(instance.goods())
    steps = []
    for turn in range(1, m + 1):
        ratios = {i: Fraction(picks[i] + 1 - x) / instance.weight(i) for i in instance.agents()}
        best_ratio = min(ratios.values())
        tied_agents = [i for i in instance.agents() if ratios[i] == best_ratio]
        agent = tied_agents[0] if tie_break == "index" else rng.choice(tied_agents)
        v = instance.valuation(agent)
        own = utilities[agent]
        gains = {g: v.value(frozenset(bundles[agent] | {g})) - own for g in available}
        best_gain = max(gains.values())
        tied_goods = sorted(g for g in available if gains[g] == best_gain)
        good = tied_goods[0] if tie_break == "index" else rng.choice(tied_goods)
        bundles[agent].add(good)
        utilities[agent] = own + best_gain
        available.remove(good)
        picks[agent] += 1
        steps.append(PickStep(turn=turn, agent=agent, good=good, gain=best_gain, ratio=ratios[agent]))
    allocation = Allocation(tuple(frozenset(bundles[i]) for i in instance.agents()))
    return allocation, PickTrace(x=x, steps=tuple(steps))


# ---------------------------------------------------------------------------
# Exchange-graph augmentation over clean bundles


def _transfer_path(
    instance: Instance, bundles: list[set[int]], unallocated: set[int], target: int
) -> Optional[list[int]]:
    """Shortest chain of goods g_1 .. g_k such that the target agent can take
    g_1 with marginal gain 1, the owner of every g_t replaces it by g_{t+1} at
    unchanged utility, and g_k is unallocated. The chain may route through the
    target's own bundle (the target then swaps internally while keeping the
    net gain of one good). Returns None when the target agent cannot grow.
    """
    owner = {}
    for j in instance.agents():
        for g in bundles[j]:
            owner[g] = j
    vt = instance.valuation(target)
    t_bundle = frozenset(bundles[target])
    t_util = vt.value(t_bundle)
    sources = [
        g
        for g in sorted(set(instance.goods()) - bundles[target])
        if vt.value(t_bundle | {g}) - t_util == 1
    ]
    if not sources:
        return None
    for g in sources:
        if g in unallocated:
            return [g]
    parent: dict[int, Optional[int]] = {g: None for g in sources}
    frontier = list(sources)
    while frontier:
        next_frontier = []
        for p in frontier:
            j = owner[p]  # p is owned: unallocated sources returned above
            vj = instance.valuation(j)
            j_bundle = frozenset(bundles[j])
            reduced = j_bundle - {p}
            base = vj.value(reduced)
            for q in sorted(set(instance.goods()) - bundles[j]):
                if q in parent:
                    continue
                if vj.value(reduced | {q}) - base != 1:
                    continue
                parent[q] = p
                if q in unallocated:
                    path = [q]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    path.reverse()
                    return path
                next_frontier.append(q)
        frontier = next_frontier
    return None


def _apply_path(
    instance: Instance, bundles: list[set[int]], unallocated: set[int], target: int, path: list[int]
) -> None:
    owner = {}
    for j in instance.agents():
        for g in bundles[j]:
            owner[g] = j
    # reassign along the chain using the pre-move owners
    owners = [owner.get(g) for g in path]
    bundles[target].add(path[0])
    for t in range(len(path) - 1):
        j = owners[t]
        bundles[j].discard(path[t])
        bundles[j].add(path[t + 1])
    unallocated.discard(path[-1])
    # every touched bundle must stay clean; cheap guard against graph bugs
    for j in {target, *(o for o in owners if o is not None)}:
        vj = instance.valuation(j)
        if vj.value(frozenset(bundles[j])) != len(bundles[j]):
            raise RuntimeError(f"augmentation left agent {j} with a non-clean bundle")


def max_clean_utilitarian(instance: Instance) -> Allocation:
    """Clean allocation maximizing total utility, built by repeated
    exchange-graph augmentation from the empty allocation."""
    _require_matroid_rank(instance, "max_clean_utilitarian")
    n = instance.n
    bundles: list[set[int]] = [set() for _ in range(n + 1)]
    unallocated = set(instance.goods())
    progressed = True
    while progressed:
        progressed = False
        for i in instance.agents():
            path = _transfer_path(instance, bundles, unallocated, i)
            if path is not None:
                _apply_path(instance, bundles, unallocated, i, path)
                progressed = True
    return Allocation(tuple(frozenset(bundles[i]) for i in instance.agents()))


def gain_value(weight: Fraction, bundle_size: int, x, w_max: Fraction) -> Fraction:
    """Per-step objective increase from growing a clean bundle by one good:
    weight / (size + 1 - x), with the sentinel w_max + 1 for an empty bundle
    at x = 1 (growing such an agent dominates everything else)."""
    x = _check_unit_interval("x", x)
    if x == 1 and bundle_size == 0:
        return w_max + 1
    return Fraction(weight) / (bundle_size + 1 - x)


def mwhw_gain(instance: Instance, x) -> Allocation:
    """Clean allocation maximizing the weighted shifted-harmonic welfare for
    parameter x (and, among its maximizers, total utility). Grows, at every
    step, a growable agent with the largest gain score, lowest index first.
    """
    _require_matroid_rank(instance, "mwhw_gain")
    x = _check_unit_interval("x", x)
    n = instance.n
    w_max = max(instance.weights)
    bundles: list[set[int]] = [set() for _ in range(n + 1)]
    unallocated = set(instance.goods())
    while True:
        candidates = []
        for i in instance.agents():
            path = _transfer_path(instance, bundles, unallocated, i)
            if path is not None:
                candidates.append((i, path))
        if not candidates:
            break
        best_i, best_path = max(
            candidates, key=lambda c: (gain_value(instance.weight(c[0]), len(bundles[c[0]]), x, w_max), -c[0])
        )
        _apply_path(instance, bundles, unallocated, best_i, best_path)
    return Allocation(tuple(frozenset(bundles[i]) for i in instance.agents()))


# ---------------------------------------------------------------------------
# Transfer algorithm


def potential(allocation: Allocation, instance: Instance, x) -> Fraction:
    """Sum over agents of (u^2 + (1 - 2x) u) / w; strictly decreases with
    every transfer the algorithm makes."""
    x = _check_unit_interval("x", x)
    total = ZERO
    for i in instance.agents():
        u = instance.valuation(i).value(allocation.bundle(i))
        total += (u * u + (1 - 2 * x) * u) / instance.weight(i)
    return total


def transfer_algorithm(instance: Instance, x) -> tuple[Allocation, TransferTrace]:
    """Return a clean allocation that maximizes total utility and satisfies
    the transferable weighted-envy condition TWEF(x, 1-x).

    Violated ordered pairs are scanned lexicographically; the moved good is
    the lowest-index one in the envied bundle that gives the envier marginal
    gain 1. The transfer count never exceeds m^2 * n.
    """
    _require_matroid_rank(instance, "transfer_algorithm")
    x = _check_unit_interval("x", x)
    n, m = instance.n, instance.m
    allocation = max_clean_utilitarian(instance)
    bundles = [set(allocation.bundle(i)) for i in instance.agents()]
    steps = []
    limit = m * m * n + 1
    while True:
        current = Allocation(tuple(frozenset(b) for b in bundles))
        report = check_twef(current, instance, x)
        if report.verdict:
            return current, TransferTrace(x=x, steps=tuple(steps))
        i, j = report.violations[0].i, report.violations[0].j
        vi = instance.valuation(i)
        ai = frozenset(bundles[i - 1])
        own = vi.value(ai)
        good = None
        for g in sorted(bundles[j - 1]):
            if vi.value(ai | {g}) - own == 1:
                good = g
                break
        if good is None:
            raise RuntimeError(f"violated pair ({i}, {j}) admits no unit-gain transfer good")
        phi_before = potential(current, instance, x)
        bundles[j - 1].remove(good)
        bundles[i - 1].add(good)
        after = Allocation(tuple(frozenset(b) for b in bundles))
        phi_after = potential(after, instance, x)
        steps.append(
            TransferStep(from_agent=j, to_agent=i, good=good, phi_before=phi_before, phi_after=phi_after)
        )
        if len(steps) >= limit:
            raise RuntimeError(f"transfer count exceeded the m^2*n bound ({limit - 1})")
