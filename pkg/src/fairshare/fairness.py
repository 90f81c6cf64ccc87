"""Fairness predicates and welfare objectives.

The pairwise notions all share one report shape: a verdict, the list of
violated ordered pairs, and for each satisfied pair the clause that satisfied
it (empty envied bundle, the saturation clause, or a witnessing good). All
comparisons are exact; weighted inequalities are evaluated by
cross-multiplication so no division is involved.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .instances import Allocation, Instance, format_rational
from .valuations import ZERO

NOTIONS = ("WEF", "TWEF", "WMEF", "WWMEF1", "EF1", "MEF1")

PO_EXHAUSTIVE_CAP = 10_000_000
PO_SAMPLE_TRIALS = 200_000

NEG_INF = float("-inf")

DEFAULT_QUAD_TOL = Fraction(1, 10**9)


def _check_unit_interval(name: str, q: Fraction) -> Fraction:
    q = Fraction(q)
    if not (0 <= q <= 1):
        raise ValueError(f"{name} must lie in [0, 1], got {q}")
    return q


@dataclass(frozen=True)
class NotionParams:
    """A fairness notion plus its parameters; y defaults to 1 - x for the
    parameterized notions and stays unset for the rest."""

    notion: str
    x: Optional[Fraction] = None
    y: Optional[Fraction] = None

    def __post_init__(self):
        if self.notion not in NOTIONS:
            raise ValueError(f"unknown notion {self.notion!r}; choose from {NOTIONS}")
        if self.notion in ("WEF", "TWEF", "WMEF"):
            x = _check_unit_interval("x", self.x if self.x is not None else Fraction(1))
            y = _check_unit_interval("y", self.y if self.y is not None else 1 - x)
            object.__setattr__(self, "x", x)
            object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class PairViolation:
    i: int
    j: int
    reason: str


@dataclass(frozen=True)
class Witness:
    clause: str  # "empty" | "saturation" | "good"
    good: Optional[int] = None


@dataclass(frozen=True)
class FairnessReport:
    notion: str
    x: Optional[Fraction]
    y: Optional[Fraction]
    verdict: bool
    violations: tuple[PairViolation, ...]
    witnesses: dict = field(default_factory=dict, compare=False)
    weights_ignored: bool = False

    def to_json(self) -> dict:
        return {
            "notion": self.notion,
            "x": None if self.x is None else format_rational(self.x),
            "y": None if self.y is None else format_rational(self.y),
            "verdict": self.verdict,
            "violations": [{"i": v.i, "j": v.j, "reason": v.reason} for v in self.violations],
        }


def _assemble(notion, x, y, results, weights_ignored=False) -> FairnessReport:
    violations = []
    witnesses = {}
    for (i, j), outcome in sorted(results.items()):
        if isinstance(outcome, Witness):
            witnesses[(i, j)] = outcome
        else:
            violations.append(PairViolation(i, j, outcome))
    return FairnessReport(
        notion=notion,
        x=x,
        y=y,
        verdict=not violations,
        violations=tuple(violations),
        witnesses=witnesses,
        weights_ignored=weights_ignored,
    )


def _pairs(instance: Instance):
    for i in instance.agents():
        for j in instance.agents():
            if i != j:
                yield i, j


def check_wef(allocation: Allocation, instance: Instance, x, y=None) -> FairnessReport:
    """Weighted envy-freeness with split compensation: pair (i, j) holds when
    A_j is empty or some g in A_j satisfies
    (v_i(A_i) + y*gain_i(A_i, g)) / w_i >= (v_i(A_j) - x*loss_i(A_j, g)) / w_j.
    """
    x = _check_unit_interval("x", x)
    y = _check_unit_interval("y", 1 - x if y is None else y)
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        wi, wj = instance.weight(i), instance.weight(j)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        if not aj:
            results[(i, j)] = Witness("empty")
            continue
        own = vi.value(ai)
        envied = vi.value(aj)
        found = None
        for g in sorted(aj):
            gain = vi.value(ai | {g}) - own
            loss = envied - vi.value(aj - {g})
            if (own + y * gain) * wj >= (envied - x * loss) * wi:
                found = g
                break
        if found is None:
            results[(i, j)] = f"no good in A_{j} closes the weighted envy gap"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("WEF", x, y, results)


def check_twef(allocation: Allocation, instance: Instance, x, y=None) -> FairnessReport:
    """WEF(x, y) with a transferability escape: a pair also counts as
    satisfied when the envier would gain nothing even from absorbing the whole
    envied bundle."""
    x = _check_unit_interval("x", x)
    y = _check_unit_interval("y", 1 - x if y is None else y)
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        wi, wj = instance.weight(i), instance.weight(j)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        own = vi.value(ai)
        if own == vi.value(ai | aj):
            results[(i, j)] = Witness("saturation")
            continue
        envied = vi.value(aj)
        found = None
        for g in sorted(aj):
            gain = vi.value(ai | {g}) - own
            loss = envied - vi.value(aj - {g})
            if (own + y * gain) * wj >= (envied - x * loss) * wi:
                found = g
                break
        if found is None:
            results[(i, j)] = f"agent {i} still gains from A_{j} and no single good closes the gap"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("TWEF", x, y, results)


def check_wmef(allocation: Allocation, instance: Instance, x, y=None) -> FairnessReport:
    """Marginal variant: the envied bundle is measured by its marginal value
    on top of the envier's own bundle."""
    x = _check_unit_interval("x", x)
    y = _check_unit_interval("y", 1 - x if y is None else y)
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        wi, wj = instance.weight(i), instance.weight(j)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        if not aj:
            results[(i, j)] = Witness("empty")
            continue
        own = vi.value(ai)
        union = vi.value(ai | aj)
        found = None
        for g in sorted(aj):
            gain = vi.value(ai | {g}) - own
            loss = union - vi.value((ai | aj) - {g})
            if (own + y * gain) * wj >= (union - own - x * loss) * wi:
                found = g
                break
        if found is None:
            results[(i, j)] = f"marginal envy of agent {i} toward A_{j} survives every single good"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("WMEF", x, y, results)


def check_wwmef1(allocation: Allocation, instance: Instance) -> FairnessReport:
    """Weak marginal envy-freeness up to one good: pair (i, j) holds when A_j
    is empty or some g in A_j satisfies either
    v_i(A_i)/w_i >= (v_i(A_i + A_j - g) - v_i(A_i))/w_j or
    v_i(A_i + g)/w_i >= (v_i(A_i + A_j) - v_i(A_i))/w_j."""
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        wi, wj = instance.weight(i), instance.weight(j)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        if not aj:
            results[(i, j)] = Witness("empty")
            continue
        own = vi.value(ai)
        union = vi.value(ai | aj)
        found = None
        for g in sorted(aj):
            drop_one = vi.value((ai | aj) - {g})
            if own * wj >= (drop_one - own) * wi:
                found = g
                break
            if vi.value(ai | {g}) * wj >= (union - own) * wi:
                found = g
                break
        if found is None:
            results[(i, j)] = f"neither removal nor copying of one good helps agent {i} against A_{j}"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("WWMEF1", None, None, results)


def check_ef1(allocation: Allocation, instance: Instance) -> FairnessReport:
    """Classic envy-freeness up to one good. Weights are ignored; the report
    flags the instance when they are unequal."""
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        if not aj:
            results[(i, j)] = Witness("empty")
            continue
        own = vi.value(ai)
        found = None
        for g in sorted(aj):
            if own >= vi.value(aj - {g}):
                found = g
                break
        if found is None:
            results[(i, j)] = f"agent {i} envies A_{j} even after removing any single good"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("EF1", None, None, results, weights_ignored=not instance.equal_weights)


def check_mef1(allocation: Allocation, instance: Instance) -> FairnessReport:
    """Marginal envy-freeness up to one good (unweighted)."""
    results = {}
    for i, j in _pairs(instance):
        vi = instance.valuation(i)
        ai, aj = allocation.bundle(i), allocation.bundle(j)
        if not aj:
            results[(i, j)] = Witness("empty")
            continue
        own = vi.value(ai)
        found = None
        for g in sorted(aj):
            if own >= vi.value((ai | aj) - {g}) - own:
                found = g
                break
        if found is None:
            results[(i, j)] = f"marginal envy of agent {i} toward A_{j} survives every single good"
        else:
            results[(i, j)] = Witness("good", found)
    return _assemble("MEF1", None, None, results, weights_ignored=not instance.equal_weights)


CHECKERS = {
    "WEF": check_wef,
    "TWEF": check_twef,
    "WMEF": check_wmef,
    "WWMEF1": check_wwmef1,
    "EF1": check_ef1,
    "MEF1": check_mef1,
}


def check_notion(allocation: Allocation, instance: Instance, params: NotionParams) -> FairnessReport:
    if params.notion in ("WEF", "TWEF", "WMEF"):
        return CHECKERS[params.notion](allocation, instance, params.x, params.y)
    return CHECKERS[params.notion](allocation, instance)


# ---------------------------------------------------------------------------
# Pareto optimality


@dataclass(frozen=True)
class PoReport:
    po: bool
    dominator: Optional[Allocation]
    mode: str  # "exhaustive" | "sampled"


def check_po(
    allocation: Allocation,
    instance: Instance,
    max_states: int = PO_EXHAUSTIVE_CAP,
    mode: str = "exhaustive",
    seed: int = 0,
) -> PoReport:
    """Search for a Pareto-dominating allocation. A dominator exists among
    complete allocations whenever one exists at all (valuations are monotone),
    so the scan runs over the n^m complete assignments. Above the state cap,
    mode "sampled" spot-checks random assignments and the report says so.
    """
    n, m = instance.n, instance.m
    target = [instance.valuation(i).value(allocation.bundle(i)) for i in instance.agents()]
    states = n**m
    exhaustive = states <= max_states
    if not exhaustive and mode != "sampled":
        raise ValueError(f"{states} states exceed the exhaustive cap {max_states}; use sampled mode")

    vals = list(instance.valuations)

    def dominates(bundles: list[set[int]]) -> bool:
        strict = False
        for k in range(n):
            u = vals[k].value(frozenset(bundles[k]))
            if u < target[k]:
                return False
            if u > target[k]:
                strict = True
        return strict

    if exhaustive:
        bundles: list[set[int]] = [set() for _ in range(n)]
        found: Optional[Allocation] = None

        def walk(good: int) -> bool:
            nonlocal found
            if good > m:
                if dominates(bundles):
                    found = Allocation(tuple(frozenset(b) for b in bundles))
                    return True
                return False
            for k in range(n):
                bundles[k].add(good)
                if walk(good + 1):
                    return True
                bundles[k].remove(good)
            return False

        walk(1)
        return PoReport(po=found is None, dominator=found, mode="exhaustive")

    rng = random.Random(seed)
    for _ in range(min(max_states, PO_SAMPLE_TRIALS)):
        bundles = [set() for _ in range(n)]
        for g in range(1, m + 1):
            bundles[rng.randrange(n)].add(g)
        if dominates(bundles):
            return PoReport(po=False, dominator=Allocation(tuple(frozenset(b) for b in bundles)), mode="sampled")
    return PoReport(po=True, dominator=None, mode="sampled")


# ---------------------------------------------------------------------------
# Harmonic numbers


def harmonic(k: int) -> Fraction:
    """H_k = 1 + 1/2 + ... + 1/k, exactly."""
    if k < 0:
        raise ValueError("harmonic numbers need k >= 0")
    return sum((Fraction(1, j) for j in range(1, k + 1)), ZERO)


def modified_harmonic(k: int, x):
    """Shifted harmonic number: sum of 1/(j - x) for j = 1..k when x < 1
    (0 for k = 0). At x = 1 the shift degenerates: 0 for k = 1, H_{k-1} for
    k >= 2, and minus infinity for k = 0 (ordered below every rational)."""
    if k < 0:
        raise ValueError("modified harmonic numbers need k >= 0")
    x = _check_unit_interval("x", x)
    if x == 1:
        if k == 0:
            return NEG_INF
        return harmonic(k - 1)
    return sum((Fraction(1, 1) / (j - x) for j in range(1, k + 1)), ZERO)


class HarmonicEstimate(NamedTuple):
    value: float
    error_bound: float


def extended_harmonic(z, tol=DEFAULT_QUAD_TOL) -> HarmonicEstimate:
    """Real-argument harmonic number H_z = integral over [0,1] of
    (1 - t^z) / (1 - t) dt, with the integrand extended continuously to the
    value z at t = 1.

    Expanding 1/(1 - t) geometrically and integrating term by term turns the
    integral into the series sum_{k>=1} z / (k (k + z)); the first K terms are
    summed exactly in floating point (math.fsum) and the tail is bracketed by
    the integral test, giving a guaranteed absolute error bound <= tol.
    """
    z = Fraction(z)
    if z < 0:
        raise ValueError("extended harmonic numbers need z >= 0")
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if tol < Fraction(1, 10**11):
        raise ValueError("tolerances below 1e-11 exceed float64 resolution")
    if z == 0:
        return HarmonicEstimate(0.0, 0.0)
    zf = float(z)
    K = max(10, math.isqrt(math.ceil(z / tol)) + 1)
    head = math.fsum(zf / (k * (k + zf)) for k in range(1, K + 1))
    tail_lo = math.log1p(zf / (K + 1))
    tail_hi = math.log1p(zf / K)
    value = head + (tail_lo + tail_hi) / 2
    # tail bracket plus a cushion for float rounding in head and input
    bound = (tail_hi - tail_lo) / 2 + 1e-12
    return HarmonicEstimate(value, bound)


# ---------------------------------------------------------------------------
# Welfare objectives


OBJECTIVES = ("utilitarian", "wnw", "whw", "hw", "hw-extended")


@dataclass(frozen=True)
class LogSum:
    """Sum of weight * ln(utility) terms over agents with positive utility.

    Two log-sums compare exactly: scale all weights by a common denominator L
    so the exponents become integers, then compare the rational products
    prod(u ** (w * L)) on each side. A float shortcut handles comparisons with
    a gap far above float error.
    """

    terms: tuple[tuple[Fraction, Fraction], ...]  # (weight, utility > 0)

    def as_float(self) -> float:
        return math.fsum(float(w) * math.log(u) for w, u in self.terms)

    def _cmp(self, other: "LogSum") -> int:
        if self.terms == other.terms:
            return 0
        a, b = self.as_float(), other.as_float()
        if abs(a - b) > 1e-9 * (1.0 + abs(a) + abs(b)):
            return -1 if a < b else 1
        scale = math.lcm(
            *(w.denominator for w, _ in self.terms + other.terms),
        ) if (self.terms or other.terms) else 1
        left = math.prod((u ** int(w * scale) for w, u in self.terms), start=Fraction(1))
        right = math.prod((u ** int(w * scale) for w, u in other.terms), start=Fraction(1))
        if left == right:
            return 0
        return -1 if left < right else 1

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        return isinstance(other, LogSum) and self._cmp(other) == 0

    def __hash__(self):
        return hash(self.terms)


@dataclass(frozen=True)
class Approx:
    """Float score with a rigorous absolute error bound; values whose
    intervals overlap compare equal."""

    value: float
    bound: float

    def _cmp(self, other: "Approx") -> int:
        if abs(self.value - other.value) <= self.bound + other.bound:
            return 0
        return -1 if self.value < other.value else 1

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        return isinstance(other, Approx) and self._cmp(other) == 0

    def __hash__(self):
        return hash(round(self.value, 6))


@dataclass(frozen=True)
class WelfareValue:
    """Welfare score tagged by objective; comparisons across objectives (or
    across different x for the shifted-harmonic objective) are rejected.

    key shapes:
      utilitarian, hw, whw with x < 1   Fraction
      whw with x = 1, wnw               (positive-agent count, Fraction | LogSum)
      hw-extended                       Approx
    """

    objective: str
    key: object
    x: Optional[Fraction] = None

    def _guard(self, other: "WelfareValue"):
        if not isinstance(other, WelfareValue):
            raise TypeError(f"cannot compare WelfareValue with {type(other).__name__}")
        if self.objective != other.objective or self.x != other.x:
            raise ValueError(
                f"cannot compare welfare under {self.objective}/{self.x} with {other.objective}/{other.x}"
            )

    def __lt__(self, other):
        self._guard(other)
        return self.key < other.key

    def __le__(self, other):
        self._guard(other)
        return self.key <= other.key

    def __gt__(self, other):
        self._guard(other)
        return self.key > other.key

    def __ge__(self, other):
        self._guard(other)
        return self.key >= other.key

    def __eq__(self, other):
        if not isinstance(other, WelfareValue):
            return NotImplemented
        self._guard(other)
        return self.key == other.key

    def __hash__(self):
        return hash((self.objective, self.x))

    def as_float(self):
        if isinstance(self.key, Fraction):
            return float(self.key)
        if isinstance(self.key, Approx):
            return self.key.value
        count, score = self.key
        return [count, score.as_float() if isinstance(score, LogSum) else float(score)]

    def to_json(self) -> dict:
        doc = {"objective": self.objective, "value": self.as_float()}
        if self.x is not None:
            doc["x"] = format_rational(self.x)
        if isinstance(self.key, Fraction):
            doc["exact"] = format_rational(self.key)
        return doc


def _utilities(allocation: Allocation, instance: Instance) -> list[Fraction]:
    return [instance.valuation(i).value(allocation.bundle(i)) for i in instance.agents()]


def _require_additive(instance: Instance, objective: str, integer_values: bool):
    from .valuations import Additive

    for i, v in enumerate(instance.valuations, start=1):
        if not isinstance(v, Additive):
            raise ValueError(f"{objective} needs additive valuations; agent {i} has kind {v.kind}")
        if integer_values and any(val.denominator != 1 for val in v.values):
            raise ValueError(f"{objective} needs integer per-good values; agent {i} violates this")


def welfare(allocation: Allocation, instance: Instance, objective: str, x=None, tol=DEFAULT_QUAD_TOL) -> WelfareValue:
    """Score an allocation under one of the supported objectives.

    utilitarian  sum of utilities (exact rational)
    wnw          weighted Nash welfare as the lexicographic pair
                 (#agents with positive utility, sum of w_i * ln u_i over them)
    whw          weighted shifted-harmonic welfare for parameter x in [0, 1];
                 needs integer utilities; x = 1 uses the analogous pair
    hw           unweighted harmonic welfare (additive integer values only)
    hw-extended  harmonic welfare through the real-argument extension
                 (additive values; quadrature tolerance tol per agent)
    """
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}; choose from {OBJECTIVES}")
    utils = _utilities(allocation, instance)
    if objective == "utilitarian":
        return WelfareValue("utilitarian", sum(utils, ZERO))
    if objective == "wnw":
        terms = tuple(
            (instance.weight(i), u) for i, u in zip(instance.agents(), utils) if u > 0
        )
        return WelfareValue("wnw", (len(terms), LogSum(terms)))
    if objective == "whw":
        if x is None:
            raise ValueError("objective whw needs a parameter x")
        x = _check_unit_interval("x", x)
        for i, u in zip(instance.agents(), utils):
            if u.denominator != 1 or u < 0:
                raise ValueError(f"whw needs non-negative integer utilities; agent {i} has {u}")
        if x < 1:
            score = sum(
                (instance.weight(i) * modified_harmonic(int(u), x) for i, u in zip(instance.agents(), utils)),
                ZERO,
            )
            return WelfareValue("whw", score, x=x)
        positive = [(i, int(u)) for i, u in zip(instance.agents(), utils) if u > 0]
        score = sum((instance.weight(i) * modified_harmonic(u, x) for i, u in positive), ZERO)
        return WelfareValue("whw", (len(positive), score), x=x)
    if objective == "hw":
        _require_additive(instance, "hw", integer_values=True)
        score = sum((harmonic(int(u)) for u in utils), ZERO)
        return WelfareValue("hw", score)
    # hw-extended
    _require_additive(instance, "hw-extended", integer_values=False)
    total = 0.0
    bound = 0.0
    for u in utils:
        est = extended_harmonic(u, tol)
        total += est.value
        bound += est.error_bound + 1e-15
    return WelfareValue("hw-extended", Approx(total, bound))
