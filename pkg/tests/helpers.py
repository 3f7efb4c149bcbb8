"""Shared test utilities: result-set comparison and the random corpus."""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from fuim import (
    FuzzyItemset,
    GeneratorSpec,
    MiningResult,
    default_membership_function,
    fuzzify_database,
    generate_database,
    oracle_mine,
)

REL_TOL = 1e-9

CORPUS_SIZE = 200


def close(a: float, b: float, tol: float = REL_TOL) -> bool:
    return abs(a - b) <= max(tol * max(abs(a), abs(b)), 1e-12)


def itemset_key(itemset: FuzzyItemset) -> frozenset:
    """Order-insensitive identity, comparable across processing orders."""
    return frozenset(itemset.members)


def result_map(result: MiningResult) -> dict[frozenset, float]:
    return {itemset_key(s): v for s, v in result.hfuis}


def maps_equal(a: dict, b: dict, tol: float = REL_TOL) -> bool:
    return a.keys() == b.keys() and all(close(a[k], b[k], tol) for k in a)


def describe_diff(a: dict, b: dict) -> str:
    only_a = list(a.keys() - b.keys())[:3]
    only_b = list(b.keys() - a.keys())[:3]
    off = [k for k in a.keys() & b.keys() if not close(a[k], b[k])][:3]
    return f"only_first={only_a} only_second={only_b} value_mismatch={off}"


def corpus_spec(i: int) -> GeneratorSpec:
    """Fixed-seed corpus entry: 5-8 items, 10-30 transactions, quantities 1-6."""
    return GeneratorSpec(
        items=5 + i % 4,
        transactions=10 + (i * 7) % 21,
        avg_length=4,
        qty_low=1,
        qty_high=6,
        seed=20_000 + i,
    )


@dataclass
class CorpusEntry:
    db: object
    fdb: object
    all_itemsets: dict[frozenset, float]  # every positive-support itemset -> utility
    oracle_result: MiningResult  # the gamma=0 enumeration, members in ascending order
    gammas: list[float]  # five quantiles of the 1-item upper bounds


def build_corpus(size: int = CORPUS_SIZE) -> list[CorpusEntry]:
    mf = default_membership_function()
    entries = []
    for i in range(size):
        db = generate_database(corpus_spec(i))
        fdb = fuzzify_database(db, mf)
        full = oracle_mine(db, mf, 0.0)
        gammas = statistics.quantiles(sorted(fdb.fuub_base.values()), n=6)
        entries.append(
            CorpusEntry(
                db=db,
                fdb=fdb,
                all_itemsets=result_map(full),
                oracle_result=full,
                gammas=gammas,
            )
        )
    return entries
