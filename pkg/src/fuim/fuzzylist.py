"""The fuzzy-list structure: one compact row per supporting transaction.

Each row keeps (tid, min membership, crisp utility, remaining utility).
The min membership and crisp utility are stored separately instead of
their product because the product is not additive across joins: the min
operator over memberships breaks the subtraction trick that utility-list
joins normally use. With the two factors kept apart, a join is exact by
construction (min for memberships, inclusion-exclusion for crisp sums)
and the derived value min_membership * crisp_util is always the true
fuzzy utility of the owning itemset in that transaction.

The remaining utility of a row is the sum of mfu over the items ranked
strictly after the itemset's last member in that transaction.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import ContractViolation, FuzzyItem, FuzzyItemset, QuantitativeDatabase
from .fuzzifier import FuzzifiedDatabase, MembershipFunction, fuzzify_database

# fixed per-row footprint used for the deterministic memory estimate:
# tid + three doubles
ELEMENT_FOOTPRINT_BYTES = 32


@dataclass(frozen=True, slots=True)
class FuzzyListElement:
    tid: int
    min_membership: float
    crisp_util: float
    rfu: float

    @property
    def ifu(self) -> float:
        return self.min_membership * self.crisp_util


@dataclass(frozen=True, slots=True)
class FuzzyList:
    itemset: FuzzyItemset
    elements: tuple[FuzzyListElement, ...]
    tids: tuple[int, ...]
    sum_ifu: float
    sum_rfu: float

    @staticmethod
    def from_elements(itemset: FuzzyItemset, elements: Sequence[FuzzyListElement]) -> "FuzzyList":
        elements = tuple(elements)
        tids = tuple(e.tid for e in elements)
        if any(b <= a for a, b in zip(tids, tids[1:])):
            raise ContractViolation(f"fuzzy-list tids must strictly increase, got {tids}")
        return FuzzyList(
            itemset=itemset,
            elements=elements,
            tids=tids,
            sum_ifu=sum(e.ifu for e in elements),
            sum_rfu=sum(e.rfu for e in elements),
        )

    def element_at(self, tid: int) -> FuzzyListElement:
        i = bisect_left(self.tids, tid)
        if i == len(self.tids) or self.tids[i] != tid:
            raise ContractViolation(f"tid {tid} not present in list of {self.itemset}")
        return self.elements[i]

    def dump(self, db: Optional[QuantitativeDatabase] = None, mf: Optional[MembershipFunction] = None) -> str:
        """Row-per-transaction text rendering for eyeballing and diffing."""
        if db is not None and mf is not None:
            name = ",".join(f"{db.labels[m.item]}.{mf.regions[m.region].name}" for m in self.itemset)
        else:
            name = ",".join(f"{m.item}.{m.region}" for m in self.itemset)
        lines = [f"[{name}] sumIfu={self.sum_ifu!r} sumRfu={self.sum_rfu!r}"]
        for e in self.elements:
            lines.append(
                f"  tid={e.tid} membership={e.min_membership!r} crisp={e.crisp_util!r} "
                f"ifu={e.ifu!r} rfu={e.rfu!r}"
            )
        return "\n".join(lines) + "\n"


def build_initial_lists(
    db: QuantitativeDatabase,
    mf: MembershipFunction,
    order,
    gamma: float,
    *,
    fdb: FuzzifiedDatabase | None = None,
) -> list[FuzzyList]:
    """One list per promising fuzzy 1-item, in processing order.

    A base item is promising when its upper bound reaches gamma; each of
    its regions with positive membership somewhere yields one list. Row
    remaining-utilities sum mfu over later-ranked items of the same
    transaction (all items, promising or not: the bound must cover every
    possible extension).
    """
    if fdb is None:
        fdb = fuzzify_database(db, mf)
    surviving = {item for item, ub in fdb.fuub_base.items() if ub >= gamma}

    rows: dict[FuzzyItem, list[FuzzyListElement]] = {}
    for t in db.transactions:
        tid = t.tid
        present = sorted(t.items(), key=order.base_rank_of)
        # suffix sums of mfu along the processing order
        rfu_after: dict[int, float] = {}
        acc = 0.0
        for item in reversed(present):
            rfu_after[item] = acc
            acc += fdb.mfu[(tid, item)]
        for item in present:
            if item not in surviving:
                continue
            crisp = fdb.crisp[(tid, item)]
            rfu = rfu_after[item]
            for region, f in fdb.memberships[(tid, item)]:
                rows.setdefault(FuzzyItem(item, region), []).append(
                    FuzzyListElement(tid=tid, min_membership=f, crisp_util=crisp, rfu=rfu)
                )

    out: list[FuzzyList] = []
    for fi in order.fuzzy_sequence:
        if fi in rows:
            out.append(FuzzyList.from_elements(FuzzyItemset((fi,)), rows[fi]))
    return out


def join(list_p: FuzzyList | None, list_px: FuzzyList, list_py: FuzzyList) -> FuzzyList:
    """Join two lists sharing the prefix P into the list of Px + y.

    Two-pointer merge over the inputs; the prefix row for a shared tid is
    found by binary search. Per shared tid: membership = min of the two,
    crisp = crisp(Px) + crisp(Py) - crisp(P), remaining = Py's remaining
    (Py ranks later, so its remaining is the smaller one).
    """
    px_members = list_px.itemset.members
    py_members = list_py.itemset.members
    if px_members[:-1] != py_members[:-1]:
        raise ContractViolation(
            f"join requires a shared prefix, got {list_px.itemset} and {list_py.itemset}"
        )
    if list_p is None:
        if len(px_members) != 1:
            raise ContractViolation("missing prefix list for a k>1 join")
    elif list_p.itemset.members != px_members[:-1]:
        raise ContractViolation(
            f"prefix list {list_p.itemset} does not match {list_px.itemset}"
        )
    if px_members[-1] == py_members[-1]:
        raise ContractViolation("join operands must extend the prefix with distinct items")

    result = FuzzyItemset(px_members + (py_members[-1],))
    ex, ey = list_px.elements, list_py.elements
    out: list[FuzzyListElement] = []
    i = j = 0
    while i < len(ex) and j < len(ey):
        a, b = ex[i], ey[j]
        if a.tid == b.tid:
            crisp = a.crisp_util + b.crisp_util
            if list_p is not None:
                crisp -= list_p.element_at(a.tid).crisp_util
            out.append(
                FuzzyListElement(
                    tid=a.tid,
                    min_membership=min(a.min_membership, b.min_membership),
                    crisp_util=crisp,
                    rfu=b.rfu,
                )
            )
            i += 1
            j += 1
        elif a.tid < b.tid:
            i += 1
        else:
            j += 1
    return FuzzyList.from_elements(result, out)
