"""Weighted fair allocation of indivisible goods under submodular and
matroid-rank valuations: constructive rules, fairness predicates, welfare
objectives, and exact brute-force oracles."""

from .instances import Allocation, Fixture, Instance, fixture, generate, load, loads, save, saves
from .fairness import (
    FairnessReport,
    NotionParams,
    WelfareValue,
    check_ef1,
    check_mef1,
    check_notion,
    check_po,
    check_twef,
    check_wef,
    check_wmef,
    check_wwmef1,
    extended_harmonic,
    harmonic,
    modified_harmonic,
    welfare,
)
from .oracle import SearchBudget, enumerate_allocations, exact_optimum, notion_exists, optimum_value
from .rules import max_clean_utilitarian, mwhw_gain, picking_sequence, transfer_algorithm
from .valuations import clean, evaluate, is_clean, is_matroid_rank, marginal_gain, marginal_loss, validate

__all__ = [
    "Allocation",
    "FairnessReport",
    "Fixture",
    "Instance",
    "NotionParams",
    "SearchBudget",
    "WelfareValue",
    "check_ef1",
    "check_mef1",
    "check_notion",
    "check_po",
    "check_twef",
    "check_wef",
    "check_wmef",
    "check_wwmef1",
    "clean",
    "enumerate_allocations",
    "evaluate",
    "exact_optimum",
    "extended_harmonic",
    "fixture",
    "generate",
    "harmonic",
    "is_clean",
    "is_matroid_rank",
    "load",
    "loads",
    "marginal_gain",
    "marginal_loss",
    "max_clean_utilitarian",
    "modified_harmonic",
    "mwhw_gain",
    "notion_exists",
    "optimum_value",
    "picking_sequence",
    "save",
    "saves",
    "transfer_algorithm",
    "validate",
    "welfare",
]

__version__ = "0.1.0"
