"""Depth-first fuzzy-list search over the set-enumeration tree.

Base items are processed in ascending upper-bound order (descending is
available for the order study). Three independent pruning rules:

* upper-bound filter: 1-items whose fuub misses gamma never get a list
* remaining bound:    a node is not extended when sumIfu + sumRfu < gamma
* expended bound:     before joining lists X and Y, sum ifu + rfu of X
                      over the tids shared with Y; below gamma the joined
                      subtree is dead and the join is skipped

Disabling rules never changes the mined set, only the work done; results
are emitted from exact sumIfu values alone.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import FuzzyItem, FuzzyItemset, QuantitativeDatabase, ValidationError
from .fuzzifier import FuzzifiedDatabase, MembershipFunction, fuzzify_database
from .fuzzylist import ELEMENT_FOOTPRINT_BYTES, FuzzyList, build_initial_lists, join

ASCENDING = "ascending"
DESCENDING = "descending"


@dataclass(frozen=True)
class ItemOrder:
    """Global processing order: base items by upper bound, ties by id,
    regions of one base kept adjacent in region-index order."""

    base_sequence: tuple[int, ...]
    fuzzy_sequence: tuple[FuzzyItem, ...]
    descending: bool = False
    _base_rank: dict[int, int] = field(repr=False, default_factory=dict)
    _fuzzy_rank: dict[FuzzyItem, int] = field(repr=False, default_factory=dict)

    @staticmethod
    def from_sequences(bases: list[int], region_count: int, descending: bool = False) -> "ItemOrder":
        fuzzy = tuple(FuzzyItem(b, r) for b in bases for r in range(region_count))
        return ItemOrder(
            base_sequence=tuple(bases),
            fuzzy_sequence=fuzzy,
            descending=descending,
            _base_rank={b: i for i, b in enumerate(bases)},
            _fuzzy_rank={fi: i for i, fi in enumerate(fuzzy)},
        )

    def base_rank_of(self, item: int) -> int:
        return self._base_rank[item]

    def rank_of(self, fi: FuzzyItem) -> int:
        return self._fuzzy_rank[fi]

    def sort_members(self, members) -> tuple[FuzzyItem, ...]:
        return tuple(sorted(members, key=self.rank_of))

    def itemset_key(self, itemset: FuzzyItemset) -> tuple[int, ...]:
        return tuple(self._fuzzy_rank[m] for m in itemset.members)


def compute_order(
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    descending: bool = False,
    *,
    fdb: FuzzifiedDatabase | None = None,
) -> ItemOrder:
    """Ascending upper-bound order over base items (id breaks ties); the
    descending variant is the exact reverse at the base-item level."""
    if fdb is None:
        fdb = fuzzify_database(db, mf)
    bases = sorted(range(db.item_count), key=lambda i: (fdb.fuub_base.get(i, 0.0), i))
    if descending:
        bases = list(reversed(bases))
    return ItemOrder.from_sequences(bases, len(mf.regions), descending)


@dataclass
class MinerConfig:
    """Search toggles; gamma is the resolved absolute threshold."""

    gamma: float
    order: str = ASCENDING
    prune_fuub: bool = True
    prune_remaining: bool = True
    prune_expended: bool = True
    max_pattern_length: Optional[int] = None
    allow_exhaustive: bool = False

    def validate(self) -> None:
        if self.gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {self.gamma}")
        if self.order not in (ASCENDING, DESCENDING):
            raise ValidationError(f"order must be {ASCENDING!r} or {DESCENDING!r}")
        if not self.prune_fuub and not self.allow_exhaustive:
            raise ValidationError(
                "disabling the upper-bound filter requires allow_exhaustive=True"
            )
        if self.max_pattern_length is not None and self.max_pattern_length < 1:
            raise ValidationError("max_pattern_length must be >= 1")


# ablation presets: 1 = filter only, 2 = + remaining, 3 = + expended
VARIANTS = ("FUIM", "FUIM1", "FUIM2", "FUIM3")


def variant_config(name: str, gamma: float, order: str = ASCENDING) -> MinerConfig:
    name = name.upper()
    if name == "FUIM":
        return MinerConfig(gamma=gamma, order=order)
    if name == "FUIM1":
        return MinerConfig(gamma=gamma, order=order, prune_remaining=False, prune_expended=False)
    if name == "FUIM2":
        return MinerConfig(gamma=gamma, order=order, prune_expended=False)
    if name == "FUIM3":
        return MinerConfig(gamma=gamma, order=order, prune_remaining=False)
    raise ValidationError(f"unknown miner variant {name!r}")


@dataclass
class RunStats:
    visited_nodes: int = 0
    constructed_lists: int = 0
    pruned_by_remaining: int = 0
    pruned_by_expended: int = 0
    wall_time: float = 0.0
    peak_memory_estimate: int = 0

    def as_dict(self) -> dict:
        return {
            "visitedNodes": self.visited_nodes,
            "constructedLists": self.constructed_lists,
            "prunedByRemaining": self.pruned_by_remaining,
            "prunedByExpended": self.pruned_by_expended,
            "wallTime": self.wall_time,
            "peakMemoryEstimate": self.peak_memory_estimate,
        }


@dataclass
class MiningResult:
    hfuis: list[tuple[FuzzyItemset, float]]
    stats: RunStats


def expended_check(list_x: FuzzyList, list_y: FuzzyList, gamma: float) -> bool:
    """True when the subtree rooted at the join of X and Y is provably dead:
    the ifu + rfu mass of X restricted to tids Y also supports stays below
    gamma. Same merge pass a join would do, so a skipped join costs no more
    than performing it."""
    present = 0.0
    ex, ty = list_x.elements, list_y.tids
    i = j = 0
    while i < len(ex) and j < len(ty):
        tid = ex[i].tid
        if tid == ty[j]:
            e = ex[i]
            present += e.min_membership * e.crisp_util + e.rfu
            i += 1
            j += 1
        elif tid < ty[j]:
            i += 1
        else:
            j += 1
    return present < gamma


@dataclass
class MiningAccumulator:
    """Mutable search state threaded through the recursion."""

    cfg: MinerConfig
    stats: RunStats
    results: list[tuple[FuzzyItemset, float]] = field(default_factory=list)
    live_elements: int = 0
    peak_elements: int = 0
    node_hook: Optional[Callable[[FuzzyItemset, float, float], None]] = None

    def bump(self, count: int) -> None:
        self.live_elements += count
        if self.live_elements > self.peak_elements:
            self.peak_elements = self.live_elements


def miner_step(list_p: FuzzyList | None, lists: list[FuzzyList], cfg: MinerConfig, acc: MiningAccumulator) -> None:
    """Process one set of sibling lists (all extending the same prefix)."""
    gamma = cfg.gamma
    for i, lx in enumerate(lists):
        acc.stats.visited_nodes += 1
        if acc.node_hook is not None:
            acc.node_hook(lx.itemset, lx.sum_ifu, lx.sum_rfu)
        if lx.sum_ifu >= gamma:
            acc.results.append((lx.itemset, lx.sum_ifu))
        if cfg.max_pattern_length is not None and len(lx.itemset) >= cfg.max_pattern_length:
            continue
        if cfg.prune_remaining and lx.sum_ifu + lx.sum_rfu < gamma:
            acc.stats.pruned_by_remaining += 1
            continue
        extensions: list[FuzzyList] = []
        last_base = lx.itemset.members[-1].item
        for ly in lists[i + 1 :]:
            if ly.itemset.members[-1].item == last_base:
                continue  # two regions of one base never combine
            if cfg.prune_expended and expended_check(lx, ly, gamma):
                acc.stats.pruned_by_expended += 1
                continue
            joined = join(list_p, lx, ly)
            if joined.elements:
                acc.stats.constructed_lists += 1
                extensions.append(joined)
        if extensions:
            added = sum(len(l.elements) for l in extensions)
            acc.bump(added)
            miner_step(lx, extensions, cfg, acc)
            acc.live_elements -= added


def mine(
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    cfg: MinerConfig,
    *,
    node_hook: Optional[Callable[[FuzzyItemset, float, float], None]] = None,
    fdb: FuzzifiedDatabase | None = None,
) -> MiningResult:
    """Mine the complete set of itemsets whose total fuzzy utility reaches
    cfg.gamma. Deterministic: results sorted by (utility desc, itemset)."""
    cfg.validate()
    t0 = time.perf_counter()
    if fdb is None:
        fdb = fuzzify_database(db, mf)
    order = compute_order(db, mf, descending=(cfg.order == DESCENDING), fdb=fdb)
    filter_gamma = cfg.gamma if cfg.prune_fuub else 0.0
    lists1 = build_initial_lists(db, mf, order, filter_gamma, fdb=fdb)

    stats = RunStats()
    acc = MiningAccumulator(cfg=cfg, stats=stats, node_hook=node_hook)
    acc.bump(sum(len(l.elements) for l in lists1))
    miner_step(None, lists1, cfg, acc)

    acc.results.sort(key=lambda kv: (-kv[1], order.itemset_key(kv[0])))
    stats.peak_memory_estimate = acc.peak_elements * ELEMENT_FOOTPRINT_BYTES
    stats.wall_time = time.perf_counter() - t0
    return MiningResult(hfuis=acc.results, stats=stats)
