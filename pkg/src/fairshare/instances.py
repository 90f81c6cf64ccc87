"""Instance and allocation data model, JSON serialization, reference
fixtures, and seeded random instance generators.

Agents and goods are 1-based throughout, matching the reports and traces
produced elsewhere in the package. Weights are exact positive rationals and
serialize as "p/q" strings.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .valuations import (
    Additive,
    BinaryAdditive,
    Bundle,
    MatroidRankTable,
    PartitionMatroid,
    Table,
    TruncatedAdditive,
    Valuation,
    validate,
)


class SchemaError(ValueError):
    """Malformed instance or allocation JSON."""


def parse_rational(raw) -> Fraction:
    """Exact rational from an int, "p/q" string, or decimal string."""
    if isinstance(raw, bool):
        raise SchemaError(f"expected a rational, got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"cannot parse rational {raw!r}") from exc
    if isinstance(raw, float):
        raise SchemaError(f"floats are not accepted ({raw!r}); use a 'p/q' or decimal string")
    raise SchemaError(f"expected a rational, got {raw!r}")


def format_rational(v: Fraction):
    return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class Allocation:
    """Pairwise-disjoint bundles, one per agent. May be incomplete."""

    bundles: tuple[Bundle, ...]

    def __post_init__(self):
        seen: set[int] = set()
        for b in self.bundles:
            for g in b:
                if g in seen:
                    raise ValueError(f"good {g} assigned to more than one agent")
                seen.add(g)

    @classmethod
    def from_lists(cls, lists: Iterable[Iterable[int]]) -> "Allocation":
        return cls(tuple(frozenset(b) for b in lists))

    @classmethod
    def empty(cls, n: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.bundles)

    def bundle(self, agent: int) -> Bundle:
        return self.bundles[agent - 1]

    def assigned(self) -> Bundle:
        out: set[int] = set()
        for b in self.bundles:
            out |= b
        return frozenset(out)

    def is_complete(self, m: int) -> bool:
        return len(self.assigned()) == m

    def to_json(self) -> dict:
        return {"bundles": [sorted(b) for b in self.bundles]}

    @classmethod
    def from_json(cls, data: dict) -> "Allocation":
        if not isinstance(data, dict) or "bundles" not in data:
            raise SchemaError("allocation JSON must be an object with a 'bundles' key")
        return cls.from_lists(data["bundles"])


@dataclass(frozen=True)
class Instance:
    """n agents with positive rational weights and one valuation each, over
    goods 1..m."""

    m: int
    weights: tuple[Fraction, ...]
    valuations: tuple[Valuation, ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("an instance needs at least one agent")
        if self.m < 0:
            raise ValueError("good count cannot be negative")
        if len(self.valuations) != self.n:
            raise ValueError("one valuation per agent required")
        for w in self.weights:
            if w <= 0:
                raise ValueError(f"non-positive weight {w}")
        for v in self.valuations:
            if v.m != self.m:
                raise ValueError(f"valuation over {v.m} goods in an instance with {self.m}")

    @property
    def n(self) -> int:
        return len(self.weights)

    def weight(self, agent: int) -> Fraction:
        return self.weights[agent - 1]

    def valuation(self, agent: int) -> Valuation:
        return self.valuations[agent - 1]

    @property
    def equal_weights(self) -> bool:
        return len(set(self.weights)) == 1

    def agents(self) -> range:
        return range(1, self.n + 1)

    def goods(self) -> range:
        return range(1, self.m + 1)


# ---------------------------------------------------------------------------
# JSON serialization


_VALUATION_KINDS = {
    "additive": Additive,
    "binary-additive": BinaryAdditive,
    "truncated-additive": TruncatedAdditive,
    "partition-matroid": PartitionMatroid,
    "explicit-table": Table,
    "matroid-rank-table": MatroidRankTable,
}


def _valuation_from_json(data: dict, m: int) -> Valuation:
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError("valuation JSON must be an object with a 'kind' key")
    kind = data["kind"]
    if kind not in _VALUATION_KINDS:
        raise SchemaError(f"unknown valuation kind {kind!r}")
    try:
        if kind in ("additive", "binary-additive"):
            values = tuple(parse_rational(x) for x in data["values"])
            return _VALUATION_KINDS[kind](m=m, values=values)
        if kind == "truncated-additive":
            values = tuple(parse_rational(x) for x in data["values"])
            return TruncatedAdditive(m=m, values=values, cap=parse_rational(data["cap"]))
        if kind == "partition-matroid":
            cats = tuple(frozenset(int(g) for g in cat) for cat in data["categories"])
            caps = tuple(int(c) for c in data["caps"])
            return PartitionMatroid(m=m, categories=cats, caps=caps)
        # table kinds
        table: dict[Bundle, Fraction] = {}
        for key, raw in data["table"].items():
            if key == "":
                if parse_rational(raw) != 0:
                    raise SchemaError("empty bundle must have value 0")
                continue
            bundle = frozenset(int(tok) for tok in key.split(","))
            table[bundle] = parse_rational(raw)
        return _VALUATION_KINDS[kind](m=m, table=table)
    except KeyError as exc:
        raise SchemaError(f"valuation of kind {kind!r} is missing field {exc}") from exc
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc


def _valuation_to_json(v: Valuation) -> dict:
    return {"kind": v.kind, **v.payload_json()}


def saves(instance: Instance) -> str:
    """Instance as canonical JSON text (deterministic byte-for-byte)."""
    doc = {
        "goods": instance.m,
        "agents": [
            {"weight": str(w), "valuation": _valuation_to_json(v)}
            for w, v in zip(instance.weights, instance.valuations)
        ],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def save(instance: Instance, path) -> None:
    Path(path).write_text(saves(instance))


def loads(text: str, check: bool = True) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "goods" not in doc or "agents" not in doc:
        raise SchemaError("instance JSON needs 'goods' and 'agents' keys")
    m = doc["goods"]
    if not isinstance(m, int) or m < 0:
        raise SchemaError(f"'goods' must be a non-negative integer, got {m!r}")
    agents = doc["agents"]
    if not isinstance(agents, list) or not agents:
        raise SchemaError("'agents' must be a non-empty list")
    weights = []
    vals = []
    for entry in agents:
        if not isinstance(entry, dict) or "weight" not in entry or "valuation" not in entry:
            raise SchemaError("each agent needs 'weight' and 'valuation'")
        w = parse_rational(entry["weight"])
        if w <= 0:
            raise SchemaError(f"non-positive weight {w}")
        weights.append(w)
        vals.append(_valuation_from_json(entry["valuation"], m))
    try:
        instance = Instance(m=m, weights=tuple(weights), valuations=tuple(vals))
    except ValueError as exc:
        raise SchemaError(str(exc)) from exc
    if check:
        for i, v in enumerate(instance.valuations, start=1):
            report = validate(v)
            if not report.valid:
                raise SchemaError(f"agent {i} valuation invalid: {report.failures[0]}")
    return instance


def load(source, check: bool = True) -> Instance:
    """Load an instance from a file path or from raw JSON text."""
    if isinstance(source, Path):
        return loads(source.read_text(), check=check)
    text = source.lstrip()
    if text.startswith("{"):
        return loads(source, check=check)
    return loads(Path(source).read_text(), check=check)


# ---------------------------------------------------------------------------
# Fixtures


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: Instance
    allocation: Optional[Allocation]


FIXTURE_NAMES = ("example1", "mwhw-nonclean", "roundrobin-ef1", "extended-harmonic")


def fixture(name: str, m: Optional[int] = None) -> Fixture:
    """Reference instances used across the test and benchmark suites.

    example1     two agents with weights (1, 2); agent 1 values every good at
                 1, agent 2 values every non-empty bundle at 1. Accepts an
                 optional good count m >= 6 (default 6).
    mwhw-nonclean  weights (1, 2), m = 6; agent 1 only values g1, agent 2 has
                 a partition-matroid valuation capped at 1 on {g1} and 3 on
                 the rest. Ships with the distinguished non-clean allocation
                 ({g1,g2,g3}, {g4,g5,g6}).
    roundrobin-ef1  equal weights, m = 8; ships with the allocation that
                 alternating picks produce, A1 = {g2,g4,g6,g8}.
    extended-harmonic  equal weights, m = 3, additive values (0, 4, 4) and
                 (19/10, 2, 2).
    """
    if name == "example1":
        goods = 6 if m is None else m
        if goods < 6:
            raise ValueError("example1 needs at least 6 goods")
        inst = Instance(
            m=goods,
            weights=(Fraction(1), Fraction(2)),
            valuations=(
                Additive(m=goods, values=tuple(Fraction(1) for _ in range(goods))),
                TruncatedAdditive(
                    m=goods, values=tuple(Fraction(1) for _ in range(goods)), cap=Fraction(1)
                ),
            ),
        )
        return Fixture(name, inst, None)
    if m is not None:
        raise ValueError(f"fixture {name!r} does not take a good count")
    if name == "mwhw-nonclean":
        inst = Instance(
            m=6,
            weights=(Fraction(1), Fraction(2)),
            valuations=(
                Additive(m=6, values=(Fraction(1),) + (Fraction(0),) * 5),
                PartitionMatroid(
                    m=6,
                    categories=(frozenset({1}), frozenset({2, 3, 4, 5, 6})),
                    caps=(1, 3),
                ),
            ),
        )
        ref = Allocation.from_lists([[1, 2, 3], [4, 5, 6]])
        return Fixture(name, inst, ref)
    if name == "roundrobin-ef1":
        inst = Instance(
            m=8,
            weights=(Fraction(1), Fraction(1)),
            valuations=(
                Additive(
                    m=8,
                    values=tuple(Fraction(1) if g in (4, 8) else Fraction(0) for g in range(1, 9)),
                ),
                PartitionMatroid(
                    m=8,
                    categories=(
                        frozenset({4}),
                        frozenset({8}),
                        frozenset({1, 2, 3}),
                        frozenset({5, 6, 7}),
                    ),
                    caps=(1, 1, 1, 1),
                ),
            ),
        )
        ref = Allocation.from_lists([[2, 4, 6, 8], [1, 3, 5, 7]])
        return Fixture(name, inst, ref)
    if name == "extended-harmonic":
        inst = Instance(
            m=3,
            weights=(Fraction(1), Fraction(1)),
            valuations=(
                Additive(m=3, values=(Fraction(0), Fraction(4), Fraction(4))),
                Additive(m=3, values=(Fraction(19, 10), Fraction(2), Fraction(2))),
            ),
        )
        return Fixture(name, inst, None)
    raise ValueError(f"unknown fixture {name!r}; choose from {FIXTURE_NAMES}")


# ---------------------------------------------------------------------------
# Random generators


GENERATOR_CLASSES = (
    "additive-integer",
    "binary-additive",
    "matroid-rank-random",
    "submodular-table-random",
)

TABLE_CLASS_GOODS_CAP = 10


def generate(cls: str, n: int, m: int, seed: int, params: Optional[dict] = None) -> Instance:
    """Seeded random instance of one of the generator classes.

    params:
      weights  "random" (integers 1..4, default) or "equal" (all 1)
      vmax     per-good value cap for additive-integer (default 5)
    """
    if cls not in GENERATOR_CLASSES:
        raise ValueError(f"unknown instance class {cls!r}; choose from {GENERATOR_CLASSES}")
    if cls == "submodular-table-random" and m > TABLE_CLASS_GOODS_CAP:
        raise ValueError(f"table class supports at most {TABLE_CLASS_GOODS_CAP} goods, got {m}")
    params = params or {}
    rng = random.Random(seed)
    weights_mode = params.get("weights", "random")
    if weights_mode == "equal":
        weights = tuple(Fraction(1) for _ in range(n))
    elif weights_mode == "random":
        weights = tuple(Fraction(rng.randint(1, 4)) for _ in range(n))
    else:
        raise ValueError(f"unknown weights mode {weights_mode!r}")
    vals = tuple(_generate_valuation(cls, m, rng, params) for _ in range(n))
    return Instance(m=m, weights=weights, valuations=vals)


def _generate_valuation(cls: str, m: int, rng: random.Random, params: dict) -> Valuation:
    if cls == "additive-integer":
        vmax = params.get("vmax", 5)
        return Additive(m=m, values=tuple(Fraction(rng.randint(0, vmax)) for _ in range(m)))
    if cls == "binary-additive":
        return BinaryAdditive(m=m, values=tuple(Fraction(rng.randint(0, 1)) for _ in range(m)))
    if cls == "matroid-rank-random":
        if m > 0 and rng.random() < 0.5:
            k = rng.randint(1, min(m, 4))
            groups: list[set[int]] = [set() for _ in range(k)]
            for g in range(1, m + 1):
                groups[rng.randrange(k)].add(g)
            cats = tuple(frozenset(grp) for grp in groups if grp)
            caps = tuple(rng.randint(0, len(cat)) for cat in cats)
            return PartitionMatroid(m=m, categories=cats, caps=caps)
        values = tuple(Fraction(rng.randint(0, 1)) for _ in range(m))
        return TruncatedAdditive(m=m, values=values, cap=Fraction(rng.randint(0, m)))
    # submodular-table-random: coverage function, submodular by construction
    universe = m + rng.randint(0, 3)
    element_weights = [rng.randint(1, 3) for _ in range(universe)]
    covers = []
    for _ in range(m):
        covers.append({e for e in range(universe) if rng.random() < 0.4})
    table: dict[Bundle, Fraction] = {}
    for mask in range(1, 1 << m):
        covered: set[int] = set()
        for g in range(1, m + 1):
            if mask >> (g - 1) & 1:
                covered |= covers[g - 1]
        bundle = frozenset(g for g in range(1, m + 1) if mask >> (g - 1) & 1)
        table[bundle] = Fraction(sum(element_weights[e] for e in covered))
    return Table(m=m, table=table)
