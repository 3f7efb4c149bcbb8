"""Reference miners used to pin down ground truth.

Two independent implementations of the same problem:

* oracle_mine: exhaustive enumeration of every positive-support fuzzy
  itemset with its utility computed straight from the definitions. No
  bounds, no fuzzy lists; the only skipping is of zero-support branches.
  This is the ground truth the fast miner is tested against.

* tpfu_mine: a two-phase level-wise miner. Phase one generates candidates
  level by level, keeping those whose upper bound reaches gamma; phase two
  rescans to compute exact utilities. Kept for candidate-count and runtime
  comparisons against the fuzzy-list search.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .core import (
    FuzzyItem,
    FuzzyItemset,
    QuantitativeDatabase,
    ResourceLimitExceeded,
)
from .fuzzifier import FuzzifiedDatabase, MembershipFunction, fuzzify_database
from .miner import MiningResult, RunStats, compute_order

# deterministic per-candidate footprint for the memory estimate
CANDIDATE_FOOTPRINT_BYTES = 48
SUPPORT_ROW_FOOTPRINT_BYTES = 24


@dataclass
class OracleConfig:
    max_items: int = 12
    max_pattern_length: Optional[int] = None

    def __post_init__(self):
        if self.max_items < 1:
            raise ValueError("max_items must be positive")
        if self.max_pattern_length is not None and self.max_pattern_length < 1:
            raise ValueError("max_pattern_length must be positive")


def oracle_mine(
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    gamma: float,
    cfg: OracleConfig | None = None,
) -> MiningResult:
    """Enumerate every fuzzy itemset with positive support and report those
    whose total fuzzy utility reaches gamma.

    Exponential in the number of distinct base items; refuses databases
    beyond cfg.max_items.
    """
    if cfg is None:
        cfg = OracleConfig()
    t0 = time.perf_counter()
    fdb = fuzzify_database(db, mf)
    appearing = [i for i in range(db.item_count) if i in fdb.base_tids]
    if len(appearing) > cfg.max_items:
        raise ResourceLimitExceeded(
            f"database has {len(appearing)} distinct items; the exhaustive oracle "
            f"is capped at {cfg.max_items} (raise OracleConfig.max_items only for "
            f"small experiments: cost grows as (regions+1)^items)",
            count=len(appearing),
        )
    order = compute_order(db, mf, fdb=fdb)
    base_seq = [b for b in order.base_sequence if b in fdb.base_tids]
    region_count = len(mf.regions)

    stats = RunStats()
    results: list[tuple[FuzzyItemset, float]] = []
    crisp = fdb.crisp
    occurrences = fdb.occurrences
    live = 0
    peak = 0

    # support rows: (tid, min membership so far, crisp utility so far),
    # kept in ascending tid order throughout
    def extend(start: int, members: tuple[FuzzyItem, ...], support):
        nonlocal live, peak
        for bi in range(start, len(base_seq)):
            b = base_seq[bi]
            for r in range(region_count):
                occ = occurrences.get((b, r))
                if not occ:
                    continue
                if support is None:
                    new_support = [(tid, f, crisp[(tid, b)]) for tid, f in occ.items()]
                else:
                    new_support = []
                    for tid, f0, c0 in support:
                        f = occ.get(tid)
                        if f is not None:
                            new_support.append(
                                (tid, f0 if f0 < f else f, c0 + crisp[(tid, b)])
                            )
                if not new_support:
                    continue
                stats.visited_nodes += 1
                fu = 0.0
                for _, f, c in new_support:
                    fu += f * c
                new_members = members + (FuzzyItem(b, r),)
                if fu >= gamma:
                    results.append((FuzzyItemset(new_members), fu))
                if cfg.max_pattern_length is None or len(new_members) < cfg.max_pattern_length:
                    live += len(new_support)
                    if live > peak:
                        peak = live
                    extend(bi + 1, new_members, new_support)
                    live -= len(new_support)

    extend(0, (), None)
    results.sort(key=lambda kv: (-kv[1], order.itemset_key(kv[0])))
    stats.peak_memory_estimate = peak * SUPPORT_ROW_FOOTPRINT_BYTES
    stats.wall_time = time.perf_counter() - t0
    return MiningResult(hfuis=results, stats=stats)


def tpfu_mine(
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    gamma: float,
    *,
    candidate_cap: Optional[int] = None,
) -> MiningResult:
    """Two-phase level-wise mining.

    Phase 1 joins surviving (k-1)-level itemsets on shared prefixes under
    the global order, drops candidates with a non-surviving (k-1)-subset,
    and keeps those whose upper bound reaches gamma. Phase 2 rescans the
    database to compute exact utilities of all survivors.

    stats.constructed_lists counts phase-1 candidates (the itemsets whose
    upper bound was evaluated). When candidate_cap is given, the run aborts
    with ResourceLimitExceeded once more candidates than that have been
    generated; the exception carries the count so far.
    """
    t0 = time.perf_counter()
    fdb = fuzzify_database(db, mf)
    order = compute_order(db, mf, fdb=fdb)
    occurrences = fdb.occurrences
    crisp = fdb.crisp

    level1 = [
        (fi,) for fi in order.fuzzy_sequence if (fi.item, fi.region) in occurrences
    ]
    candidates_total = len(level1)
    if candidate_cap is not None and candidates_total > candidate_cap:
        raise ResourceLimitExceeded(
            f"candidate cap {candidate_cap} exceeded at level 1", count=candidates_total
        )

    fuub_cache: dict[frozenset, float] = {}

    def fuub_of(members: tuple[FuzzyItem, ...]) -> float:
        key = frozenset(m.item for m in members)
        got = fuub_cache.get(key)
        if got is None:
            got = fdb.fuub_of_bases(key)
            fuub_cache[key] = got
        return got

    current = [c for c in level1 if fuub_of(c) >= gamma]
    survivors: list[tuple[FuzzyItem, ...]] = list(current)
    peak_candidates = len(level1) + len(current)
    level = 1

    while current:
        current_set = set(current)
        generated: list[tuple[FuzzyItem, ...]] = []
        # group consecutive runs sharing the (k-1)-prefix; current is in
        # lexicographic rank order by construction
        start = 0
        while start < len(current):
            prefix = current[start][:-1]
            end = start
            while end < len(current) and current[end][:-1] == prefix:
                end += 1
            group = current[start:end]
            for ai in range(len(group)):
                a = group[ai]
                for bi in range(ai + 1, len(group)):
                    b = group[bi]
                    if a[-1].item == b[-1].item:
                        continue
                    cand = a + (b[-1],)
                    if level >= 2:
                        # downward closure: every (k-1)-subset must have survived
                        if any(
                            cand[:i] + cand[i + 1 :] not in current_set
                            for i in range(len(cand) - 2)
                        ):
                            continue
                    candidates_total += 1
                    if candidate_cap is not None and candidates_total > candidate_cap:
                        raise ResourceLimitExceeded(
                            f"candidate cap {candidate_cap} exceeded at level {level + 1}",
                            count=candidates_total,
                        )
                    generated.append(cand)
            start = end
        current = [c for c in generated if fuub_of(c) >= gamma]
        survivors.extend(current)
        peak_candidates = max(peak_candidates, len(generated) + len(current))
        level += 1

    # phase 2: exact utilities by rescanning occurrence tables
    results: list[tuple[FuzzyItemset, float]] = []
    for cand in survivors:
        occs = [occurrences[(m.item, m.region)] for m in cand]
        first, rest = occs[0], occs[1:]
        fu = 0.0
        support = 0
        for tid, f in first.items():
            min_f = f
            ok = True
            for o in rest:
                g = o.get(tid)
                if g is None:
                    ok = False
                    break
                if g < min_f:
                    min_f = g
            if not ok:
                continue
            c = 0.0
            for m in cand:
                c += crisp[(tid, m.item)]
            fu += min_f * c
            support += 1
        if support > 0 and fu >= gamma:
            results.append((FuzzyItemset(cand), fu))

    results.sort(key=lambda kv: (-kv[1], order.itemset_key(kv[0])))
    stats = RunStats(
        visited_nodes=candidates_total,
        constructed_lists=candidates_total,
        peak_memory_estimate=peak_candidates * CANDIDATE_FOOTPRINT_BYTES,
        wall_time=time.perf_counter() - t0,
    )
    return MiningResult(hfuis=results, stats=stats)
