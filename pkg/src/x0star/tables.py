"""Bundled reference tables from the published classification.

Each table ships as a JSON file under ``data/golden``.  A table may carry a
``known_discrepancies`` list: entries whose ``key`` identifies a spot where
the printed reference row is known not to match a recomputation (the
recomputed value wins; the mismatch is reported, never hidden).
"""

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load_table(name: str) -> dict:
    path = resources.files("x0star").joinpath("data", "golden", f"{name}.json")
    return json.loads(path.read_text())


def table_names() -> list:
    root = resources.files("x0star").joinpath("data", "golden")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def known_discrepancy_keys(name: str) -> set:
    return {entry["key"] for entry in load_table(name).get("known_discrepancies", ())}


def hyperelliptic_genus2_levels() -> frozenset:
    return frozenset(load_table("thm1")["hyperelliptic_genus2"])


def bielliptic_genus(N: int):
    """Quotient-curve genus for bielliptic X0*(N), or None if not bielliptic."""
    for g, levels in load_table("thm1")["bielliptic_by_genus"].items():
        if N in levels:
            return int(g)
    return None


def prop4_lists() -> dict:
    t = load_table("prop4_delta")
    return {
        -1: list(t["delta_minus1"]),
        0: list(t["delta_0"]),
        1: list(t["delta_plus1"]),
        2: list(t["delta_plus2"]),
    }
