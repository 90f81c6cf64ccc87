"""Valuation oracles: bundle values, marginal gains/losses, validity checks,
and cleaning of allocations.

Bundles are frozensets of 1-based good indices. All values are exact
`fractions.Fraction`s; no float ever enters a comparison. Every valuation is
expected to be normalized (empty bundle worth 0), monotone and submodular;
`validate` confirms this, structurally for the constructive kinds and by
enumeration (or seeded sampling) for table kinds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Mapping, Optional

__all__ = [
    "Additive",
    "BinaryAdditive",
    "Bundle",
    "MatroidRankTable",
    "PartitionMatroid",
    "Table",
    "TruncatedAdditive",
    "ValidationFailure",
    "ValidationReport",
    "Valuation",
    "clean",
    "evaluate",
    "is_clean",
    "is_matroid_rank",
    "marginal_gain",
    "marginal_loss",
    "validate",
]

if TYPE_CHECKING:
    from .instances import Allocation, Instance

Bundle = frozenset

ZERO = Fraction(0)
ONE = Fraction(1)

# local submodularity scan costs about m^2 * 2^m lookups
EXHAUSTIVE_CHECK_CAP = 12
TABLE_GOODS_CAP = 20
SAMPLED_CHECK_TRIALS = 20_000


def as_bundle(goods: Iterable[int]) -> Bundle:
    return frozenset(goods)


@dataclass(frozen=True)
class Valuation:
    """Base class for all valuation kinds. `m` is the number of goods."""

    m: int

    kind = "abstract"

    def value(self, bundle: Bundle) -> Fraction:
        raise NotImplementedError

    def payload_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Additive(Valuation):
    """v(S) = sum of per-good values."""

    values: tuple[Fraction, ...] = ()

    kind = "additive"

    def __post_init__(self):
        if len(self.values) != self.m:
            raise ValueError(f"expected {self.m} per-good values, got {len(self.values)}")

    def value(self, bundle: Bundle) -> Fraction:
        return sum((self.values[g - 1] for g in bundle), ZERO)

    def payload_json(self) -> dict:
        return {"values": [_rational_json(v) for v in self.values]}


@dataclass(frozen=True)
class BinaryAdditive(Additive):
    """Additive with per-good values restricted to {0, 1}."""

    kind = "binary-additive"


@dataclass(frozen=True)
class TruncatedAdditive(Valuation):
    """v(S) = min(cap, sum of per-good values)."""

    values: tuple[Fraction, ...] = ()
    cap: Fraction = ZERO

    kind = "truncated-additive"

    def __post_init__(self):
        if len(self.values) != self.m:
            raise ValueError(f"expected {self.m} per-good values, got {len(self.values)}")

    def value(self, bundle: Bundle) -> Fraction:
        return min(self.cap, sum((self.values[g - 1] for g in bundle), ZERO))

    def payload_json(self) -> dict:
        return {"values": [_rational_json(v) for v in self.values], "cap": _rational_json(self.cap)}


@dataclass(frozen=True)
class PartitionMatroid(Valuation):
    """v(S) = sum over categories c of min(cap_c, |S intersect c|).

    Categories must be pairwise disjoint subsets of the goods; caps are
    non-negative integers. This is always a matroid-rank valuation.
    """

    categories: tuple[Bundle, ...] = ()
    caps: tuple[int, ...] = ()

    kind = "partition-matroid"

    def __post_init__(self):
        if len(self.categories) != len(self.caps):
            raise ValueError("categories and caps must have the same length")
        seen: set[int] = set()
        for cat in self.categories:
            for g in cat:
                if not (1 <= g <= self.m):
                    raise ValueError(f"category good {g} outside 1..{self.m}")
                if g in seen:
                    raise ValueError(f"good {g} appears in more than one category")
                seen.add(g)
        for cap in self.caps:
            if not isinstance(cap, int) or cap < 0:
                raise ValueError(f"caps must be non-negative integers, got {cap!r}")

    def value(self, bundle: Bundle) -> Fraction:
        total = 0
        for cat, cap in zip(self.categories, self.caps):
            total += min(cap, len(bundle & cat))
        return Fraction(total)

    def payload_json(self) -> dict:
        return {
            "categories": [sorted(cat) for cat in self.categories],
            "caps": list(self.caps),
        }


@dataclass(frozen=True, eq=True)
class Table(Valuation):
    """Explicit map from every non-empty bundle to its value; v(empty) = 0."""

    table: Mapping[Bundle, Fraction] = field(default_factory=dict)

    kind = "explicit-table"

    def __post_init__(self):
        if self.m > TABLE_GOODS_CAP:
            raise ValueError(f"table valuations support at most {TABLE_GOODS_CAP} goods")
        expected = (1 << self.m) - 1
        if len(self.table) != expected:
            raise ValueError(
                f"table must list every non-empty bundle ({expected} entries), got {len(self.table)}"
            )
        for b in self.table:
            for g in b:
                if not (1 <= g <= self.m):
                    raise ValueError(f"table bundle good {g} outside 1..{self.m}")

    def value(self, bundle: Bundle) -> Fraction:
        if not bundle:
            return ZERO
        return self.table[bundle]

    def payload_json(self) -> dict:
        return {
            "table": {
                ",".join(str(g) for g in sorted(b)): _rational_json(v)
                for b, v in sorted(self.table.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            }
        }


@dataclass(frozen=True, eq=True)
class MatroidRankTable(Table):
    """Explicit table declared to have all marginal gains in {0, 1}."""

    kind = "matroid-rank-table"


def _rational_json(v: Fraction):
    return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _check_goods(v: Valuation, bundle: Bundle) -> None:
    for g in bundle:
        if not isinstance(g, int) or not (1 <= g <= v.m):
            raise ValueError(f"unknown good identifier {g!r} (goods are 1..{v.m})")


def evaluate(v: Valuation, bundle: Iterable[int]) -> Fraction:
    """Value of a bundle. Raises ValueError on unknown good identifiers."""
    b = as_bundle(bundle)
    _check_goods(v, b)
    return v.value(b)


def marginal_gain(v: Valuation, bundle: Iterable[int], g: int) -> Fraction:
    """v(S + g) - v(S) for g not in S."""
    b = as_bundle(bundle)
    _check_goods(v, b | {g})
    if g in b:
        raise ValueError(f"good {g} already in bundle")
    return v.value(b | {g}) - v.value(b)


def marginal_loss(v: Valuation, bundle: Iterable[int], g: int) -> Fraction:
    """v(S) - v(S - g) for g in S."""
    b = as_bundle(bundle)
    _check_goods(v, b)
    if g not in b:
        raise ValueError(f"good {g} not in bundle")
    return v.value(b) - v.value(b - {g})


@dataclass(frozen=True)
class ValidationFailure:
    prop: str  # "normalization" | "monotonicity" | "submodularity" | "binary-marginal"
    subset: Bundle
    superset: Optional[Bundle]
    good: Optional[int]

    def __str__(self) -> str:
        where = f"S={sorted(self.subset)}"
        if self.superset is not None:
            where += f", T={sorted(self.superset)}"
        if self.good is not None:
            where += f", g={self.good}"
        return f"{self.prop} violated at ({where})"


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of `validate`.

    mode is "structural" when validity follows from the payload shape,
    "exhaustive" when every bundle/good combination was enumerated, and
    "sampled" when only randomized spot checks ran (partial coverage).
    matroid_rank reports whether all observed marginal gains were in {0, 1}.
    """

    valid: bool
    mode: str
    matroid_rank: bool
    failures: tuple[ValidationFailure, ...] = ()


def validate(v: Valuation, m: Optional[int] = None, seed: int = 0) -> ValidationReport:
    """Check normalization, monotonicity, submodularity and, for kinds that
    declare it, binary marginal gains. Table kinds with more than
    EXHAUSTIVE_CHECK_CAP goods get seeded randomized checks instead of full
    enumeration.
    """
    if m is not None and m != v.m:
        raise ValueError(f"valuation is over {v.m} goods, not {m}")
    if isinstance(v, (Additive, TruncatedAdditive)):
        return _validate_structural_additive(v)
    if isinstance(v, PartitionMatroid):
        # disjointness and integer caps are enforced at construction
        return ValidationReport(valid=True, mode="structural", matroid_rank=True)
    if isinstance(v, Table):
        return _validate_table(v, seed)
    raise TypeError(f"cannot validate valuation of type {type(v).__name__}")


def _validate_structural_additive(v) -> ValidationReport:
    failures = []
    binary = True
    for g, val in enumerate(v.values, start=1):
        if val < 0:
            # a negative per-good value breaks monotonicity at the empty bundle
            failures.append(ValidationFailure("monotonicity", frozenset(), frozenset({g}), g))
            break
        if val not in (0, 1):
            binary = False
    cap_ok = True
    if isinstance(v, TruncatedAdditive):
        if v.cap < 0:
            failures.append(ValidationFailure("normalization", frozenset(), None, None))
        cap_ok = v.cap.denominator == 1 and v.cap >= 0
    matroid = binary and cap_ok
    if not failures and v.kind == "binary-additive" and not binary:
        bad = next(g for g, val in enumerate(v.values, start=1) if val not in (0, 1))
        failures.append(ValidationFailure("binary-marginal", frozenset(), None, bad))
    return ValidationReport(
        valid=not failures,
        mode="structural",
        matroid_rank=matroid and not failures,
        failures=tuple(failures),
    )


def _validate_table(v: Table, seed: int) -> ValidationReport:
    m = v.m
    declared_binary = v.kind == "matroid-rank-table"
    if m <= EXHAUSTIVE_CHECK_CAP:
        return _validate_table_exhaustive(v, declared_binary)
    return _validate_table_sampled(v, declared_binary, seed)


def _validate_table_exhaustive(v: Table, declared_binary: bool) -> ValidationReport:
    m = v.m
    bundles = [frozenset(g for g in range(1, m + 1) if mask >> (g - 1) & 1) for mask in range(1 << m)]
    vals = [v.value(b) for b in bundles]
    if vals[0] != 0:
        fail = ValidationFailure("normalization", frozenset(), None, None)
        return ValidationReport(False, "exhaustive", False, (fail,))
    binary = True
    # single pass: for each S and g not in S check the gain, then compare with
    # the gain after first adding any h (local form of submodularity)
    for mask in range(1 << m):
        for g in range(1, m + 1):
            gbit = 1 << (g - 1)
            if mask & gbit:
                continue
            gain = vals[mask | gbit] - vals[mask]
            if gain < 0:
                fail = ValidationFailure("monotonicity", bundles[mask], bundles[mask | gbit], g)
                return ValidationReport(False, "exhaustive", False, (fail,))
            if gain not in (0, 1):
                binary = False
            for h in range(1, m + 1):
                hbit = 1 << (h - 1)
                if h == g or mask & hbit:
                    continue
                bigger = mask | hbit
                if vals[bigger | gbit] - vals[bigger] > gain:
                    fail = ValidationFailure("submodularity", bundles[mask], bundles[bigger], g)
                    return ValidationReport(False, "exhaustive", False, (fail,))
    failures: tuple[ValidationFailure, ...] = ()
    valid = True
    if declared_binary and not binary:
        failures = (ValidationFailure("binary-marginal", frozenset(), None, None),)
        valid = False
    return ValidationReport(valid, "exhaustive", binary, failures)


def _validate_table_sampled(v: Table, declared_binary: bool, seed: int) -> ValidationReport:
    m = v.m
    rng = random.Random(seed)
    if v.value(frozenset()) != 0:
        fail = ValidationFailure("normalization", frozenset(), None, None)
        return ValidationReport(False, "sampled", False, (fail,))
    binary = True
    for _ in range(SAMPLED_CHECK_TRIALS):
        s = frozenset(g for g in range(1, m + 1) if rng.random() < 0.5)
        outside = [g for g in range(1, m + 1) if g not in s]
        if not outside:
            continue
        g = rng.choice(outside)
        gain = v.value(s | {g}) - v.value(s)
        if gain < 0:
            fail = ValidationFailure("monotonicity", s, s | {g}, g)
            return ValidationReport(False, "sampled", False, (fail,))
        if gain not in (0, 1):
            binary = False
        rest = [h for h in outside if h != g]
        if rest:
            h = rng.choice(rest)
            bigger = s | {h}
            if v.value(bigger | {g}) - v.value(bigger) > gain:
                fail = ValidationFailure("submodularity", s, bigger, g)
                return ValidationReport(False, "sampled", False, (fail,))
    failures: tuple[ValidationFailure, ...] = ()
    valid = True
    if declared_binary and not binary:
        failures = (ValidationFailure("binary-marginal", frozenset(), None, None),)
        valid = False
    return ValidationReport(valid, "sampled", binary, failures)


def is_matroid_rank(v: Valuation) -> bool:
    """Whether the valuation provably has all marginal gains in {0, 1}.

    Constructive kinds are decided from their payload; table kinds are decided
    by the same scan `validate` uses.
    """
    if isinstance(v, PartitionMatroid):
        return True
    if isinstance(v, TruncatedAdditive):
        return all(val in (0, 1) for val in v.values) and v.cap.denominator == 1 and v.cap >= 0
    if isinstance(v, Additive):
        return all(val in (0, 1) for val in v.values)
    if isinstance(v, Table):
        report = validate(v)
        return report.valid and report.matroid_rank
    raise TypeError(f"unknown valuation type {type(v).__name__}")


def is_clean(allocation: "Allocation", instance: "Instance") -> bool:
    """True iff every owned good has strictly positive marginal loss."""
    for i in range(1, instance.n + 1):
        v = instance.valuation(i)
        bundle = allocation.bundle(i)
        for g in bundle:
            if v.value(bundle) - v.value(bundle - {g}) == 0:
                return False
    return True


def clean(allocation: "Allocation", instance: "Instance") -> "Allocation":
    """Drop goods that contribute nothing to their owner, leaving utilities
    unchanged. Goods are removed in ascending index order, rescanning after
    each removal, so the result is deterministic. Idempotent.
    """
    from .instances import Allocation

    new_bundles = []
    for i in range(1, instance.n + 1):
        v = instance.valuation(i)
        goods = set(allocation.bundle(i))
        removed = True
        while removed:
            removed = False
            for g in sorted(goods):
                if v.value(frozenset(goods)) - v.value(frozenset(goods - {g})) == 0:
                    goods.remove(g)
                    removed = True
                    break
        new_bundles.append(frozenset(goods))
    return Allocation(tuple(new_bundles))
