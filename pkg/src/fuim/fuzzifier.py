"""Membership functions and fuzzy-utility quantities.

A membership function is an ordered list of named regions, each a
piecewise-linear map quantity -> [0, 1] (clamped to the first/last
breakpoint value outside its range). On top of it this module defines the
per-transaction quantities used everywhere else:

* region utility    f * q * eu          (one region of one item)
* itemset utility   min(f) * sum(q*eu)  (min over member memberships)
* mfu               max region utility of an item in a transaction
* mtfu              sum of mfu over a transaction's items
* fuub              sum of mtfu over transactions containing an itemset's
                    base items; an anti-monotone upper bound on utility

Quantity 0 means "absent" and fuzzifies to nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    ContractViolation,
    FuzzyItem,
    FuzzyItemset,
    ParseError,
    QuantitativeDatabase,
    QuantitativeTransaction,
    RegionLabel,
    ValidationError,
)


@dataclass(frozen=True, slots=True)
class FuzzyRegion:
    """One named region: breakpoints (quantity, membership), quantities strictly increasing."""

    name: str
    breakpoints: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.breakpoints:
            raise ValidationError(f"region {self.name!r} has no breakpoints")
        qs = [q for q, _ in self.breakpoints]
        if any(b <= a for a, b in zip(qs, qs[1:])):
            raise ValidationError(f"region {self.name!r}: breakpoint quantities must strictly increase")
        if any(not 0.0 <= m <= 1.0 for _, m in self.breakpoints):
            raise ValidationError(f"region {self.name!r}: memberships must lie in [0, 1]")

    def evaluate(self, q: float) -> float:
        bps = self.breakpoints
        if q <= bps[0][0]:
            return bps[0][1]
        if q >= bps[-1][0]:
            return bps[-1][1]
        for (q1, m1), (q2, m2) in zip(bps, bps[1:]):
            if q1 <= q <= q2:
                return m1 + (q - q1) * (m2 - m1) / (q2 - q1)
        raise AssertionError("unreachable: q inside breakpoint range")


@dataclass(frozen=True)
class MembershipFunction:
    """An ordered list of fuzzy regions shared by all items."""

    regions: tuple[FuzzyRegion, ...]

    def __post_init__(self):
        if not self.regions:
            raise ValidationError("membership function needs at least one region")
        names = [r.name for r in self.regions]
        if len(set(names)) != len(names):
            raise ValidationError(f"region names must be unique, got {names}")

    @property
    def labels(self) -> tuple[RegionLabel, ...]:
        return tuple(RegionLabel(r.name, i) for i, r in enumerate(self.regions))

    def region_index(self, name: str) -> int:
        for i, r in enumerate(self.regions):
            if r.name == name:
                return i
        raise ValidationError(f"unknown region {name!r}")

    def max_quantity(self) -> float:
        return max(r.breakpoints[-1][0] for r in self.regions)

    def fuzzify(self, q: float) -> list[tuple[int, float]]:
        """Sparse evaluation: (region index, membership) pairs with membership > 0."""
        if q == 0:
            return []
        out = []
        for i, r in enumerate(self.regions):
            f = r.evaluate(q)
            if f > 0.0:
                out.append((i, f))
        return out


def default_membership_function() -> MembershipFunction:
    """Three regions over quantities 1..6: Low falls, Middle peaks at 3.5, High rises."""
    return MembershipFunction(
        regions=(
            FuzzyRegion("Low", ((1.0, 1.0), (6.0, 0.0))),
            FuzzyRegion("Middle", ((1.0, 0.0), (3.5, 1.0), (6.0, 0.0))),
            FuzzyRegion("High", ((3.5, 0.0), (6.0, 1.0))),
        )
    )


def parse_membership_function(text: str, path: str | None = None) -> MembershipFunction:
    """Parse region blocks of the form ``name: (q,mu) (q,mu) ...``, one per line."""
    import re

    pair = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")
    regions: list[FuzzyRegion] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected 'name: (q,mu) ...'", path, line_no)
        name = name.strip()
        if not name:
            raise ParseError("empty region name", path, line_no)
        pairs = pair.findall(body)
        leftovers = pair.sub("", body).strip()
        if not pairs or leftovers:
            raise ParseError(f"malformed breakpoint list {body.strip()!r}", path, line_no)
        try:
            bps = tuple((float(q), float(m)) for q, m in pairs)
        except ValueError:
            raise ParseError(f"non-numeric breakpoint in {body.strip()!r}", path, line_no) from None
        try:
            regions.append(FuzzyRegion(name, bps))
        except ValidationError as exc:
            raise ParseError(str(exc), path, line_no) from None
    try:
        return MembershipFunction(tuple(regions))
    except ValidationError as exc:
        raise ParseError(str(exc), path) from None


def serialize_membership_function(mf: MembershipFunction) -> str:
    lines = []
    for r in mf.regions:
        bps = " ".join(f"({q!r},{m!r})" for q, m in r.breakpoints)
        lines.append(f"{r.name}: {bps}")
    return "\n".join(lines) + "\n"


def load_membership_function(path: str) -> MembershipFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_membership_function(fh.read(), path)


def fuzzify(q: float, mf: MembershipFunction) -> list[tuple[RegionLabel, float]]:
    """Fuzzify one quantity; only regions with positive membership are returned."""
    if q < 0:
        raise ValidationError(f"quantity must be >= 0, got {q}")
    labels = mf.labels
    return [(labels[i], f) for i, f in mf.fuzzify(q)]


def region_fuzzy_utility(
    item: int,
    region: int,
    t: QuantitativeTransaction,
    db: QuantitativeDatabase,
    mf: MembershipFunction,
) -> float:
    """Utility of one region of one item in one transaction: f * q * eu."""
    q = t.quantity(item)
    if q == 0:
        raise ContractViolation(f"item {item} does not occur in transaction {t.tid}")
    f = mf.regions[region].evaluate(q)
    return f * q * db.external_utility[item]


def itemset_fuzzy_utility_in_tx(
    itemset: FuzzyItemset,
    t: QuantitativeTransaction,
    db: QuantitativeDatabase,
    mf: MembershipFunction,
) -> float:
    """min member membership times the itemset's crisp utility; 0 when the itemset
    does not fuzzily occur in the transaction."""
    min_f = None
    crisp = 0.0
    for m in itemset.members:
        q = t.quantity(m.item)
        if q == 0:
            return 0.0
        f = mf.regions[m.region].evaluate(q)
        if f <= 0.0:
            return 0.0
        if min_f is None or f < min_f:
            min_f = f
        crisp += q * db.external_utility[m.item]
    if min_f is None:
        return 0.0
    return min_f * crisp


def total_fuzzy_utility(
    itemset: FuzzyItemset, db: QuantitativeDatabase, mf: MembershipFunction
) -> float:
    """Sum of per-transaction fuzzy utilities over the whole database."""
    return sum(itemset_fuzzy_utility_in_tx(itemset, t, db, mf) for t in db.transactions)


def max_fuzzy_utility(
    item: int, t: QuantitativeTransaction, db: QuantitativeDatabase, mf: MembershipFunction
) -> float:
    """mfu: the largest region utility of an item in a transaction."""
    q = t.quantity(item)
    if q == 0:
        raise ContractViolation(f"item {item} does not occur in transaction {t.tid}")
    crisp = q * db.external_utility[item]
    return max((f * crisp for _, f in mf.fuzzify(q)), default=0.0)


def max_transaction_fuzzy_utility(
    t: QuantitativeTransaction, db: QuantitativeDatabase, mf: MembershipFunction
) -> float:
    """mtfu: sum of mfu over the transaction's items (0 for an empty transaction)."""
    return sum(max_fuzzy_utility(i, t, db, mf) for i, _ in t.entries)


def fuub(
    x: FuzzyItemset | int | Iterable[int],
    db: QuantitativeDatabase,
    mf: MembershipFunction,
) -> float:
    """Fuzzy-utility upper bound: sum of mtfu over transactions containing
    every base item of x. Containment is region-agnostic."""
    if isinstance(x, FuzzyItemset):
        bases: Sequence[int] = x.bases()
    elif isinstance(x, int):
        bases = (x,)
    else:
        bases = tuple(x)
    total = 0.0
    for t in db.transactions:
        if all(b in t for b in bases):
            total += max_transaction_fuzzy_utility(t, db, mf)
    return total


class FuzzifiedDatabase:
    """Database-wide fuzzification cache shared by the miners.

    Everything here is a direct tabulation of the per-transaction
    definitions above; no search-time bounds are precomputed. Tids are the
    real transaction ids.
    """

    __slots__ = (
        "db",
        "mf",
        "memberships",
        "crisp",
        "mfu",
        "mtfu",
        "base_tids",
        "occurrences",
        "fuub_base",
    )

    def __init__(self, db: QuantitativeDatabase, mf: MembershipFunction):
        self.db = db
        self.mf = mf
        # q -> sparse memberships, memoized; quantities repeat heavily
        fuzz_cache: dict[int, list[tuple[int, float]]] = {}

        def fuzz(q: int) -> list[tuple[int, float]]:
            got = fuzz_cache.get(q)
            if got is None:
                got = mf.fuzzify(q)
                fuzz_cache[q] = got
            return got

        # per (tid, item)
        self.memberships: dict[tuple[int, int], list[tuple[int, float]]] = {}
        self.crisp: dict[tuple[int, int], float] = {}
        self.mfu: dict[tuple[int, int], float] = {}
        # per tid
        self.mtfu: dict[int, float] = {}
        # per base item / fuzzy item
        self.base_tids: dict[int, list[int]] = {}
        self.occurrences: dict[tuple[int, int], dict[int, float]] = {}

        eu = db.external_utility
        for t in db.transactions:
            tid = t.tid
            tx_mtfu = 0.0
            for item, q in t.entries:
                ms = fuzz(q)
                crisp = q * eu[item]
                best = 0.0
                for region, f in ms:
                    v = f * crisp
                    if v > best:
                        best = v
                    self.occurrences.setdefault((item, region), {})[tid] = f
                self.memberships[(tid, item)] = ms
                self.crisp[(tid, item)] = crisp
                self.mfu[(tid, item)] = best
                tx_mtfu += best
                self.base_tids.setdefault(item, []).append(tid)
            self.mtfu[tid] = tx_mtfu

        self.fuub_base: dict[int, float] = {
            item: sum(self.mtfu[tid] for tid in tids) for item, tids in self.base_tids.items()
        }

    def fuub_of_bases(self, bases: Iterable[int]) -> float:
        """Region-agnostic upper bound for an arbitrary base-item set."""
        it = iter(bases)
        try:
            first = next(it)
        except StopIteration:
            return sum(self.mtfu.values())
        common = set(self.base_tids.get(first, ()))
        for b in it:
            common &= set(self.base_tids.get(b, ()))
            if not common:
                return 0.0
        return sum(self.mtfu[tid] for tid in common)


def fuzzify_database(db: QuantitativeDatabase, mf: MembershipFunction) -> FuzzifiedDatabase:
    return FuzzifiedDatabase(db, mf)
