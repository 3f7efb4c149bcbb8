"""Shared domain types for quantitative transaction databases.

Items are referenced internally by dense integer ids (0..m-1, assigned in
first-appearance order); the id <-> label mapping lives on the database so
files round-trip. Quantities are positive integers, external utilities
positive reals. All types are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class FuimError(Exception):
    """Base class for errors raised by this package."""


class ParseError(FuimError):
    """A source file does not conform to its expected grammar."""

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        self.path = path
        self.line_no = line_no
        where = ""
        if path is not None:
            where = f"{path}:"
        if line_no is not None:
            where += f"{line_no}: "
        elif path is not None:
            where += " "
        super().__init__(where + message)


class ValidationError(FuimError):
    """Inputs are well-formed but violate a domain invariant."""


class ContractViolation(FuimError):
    """An internal operation was called outside its precondition."""


class ResourceLimitExceeded(FuimError):
    """A run was aborted because it exceeded a configured resource cap."""

    def __init__(self, message: str, count: int | None = None):
        self.count = count
        super().__init__(message)


@dataclass(frozen=True, slots=True)
class RegionLabel:
    """A named fuzzy region and its position in the region list."""

    name: str
    index: int


@dataclass(frozen=True, slots=True)
class FuzzyItem:
    """A (base item, fuzzy region) pair; both fields are dense indices."""

    item: int
    region: int


@dataclass(frozen=True, slots=True)
class FuzzyItemset:
    """An ordered tuple of fuzzy items with pairwise-distinct base items.

    Member order is the caller's processing order; two itemsets compare
    equal only when members and order match, so all producers in this
    package emit members sorted under the same global order.
    """

    members: tuple[FuzzyItem, ...]

    def __post_init__(self):
        bases = [m.item for m in self.members]
        if len(set(bases)) != len(bases):
            raise ValidationError(f"itemset repeats a base item: {self.members}")

    def bases(self) -> tuple[int, ...]:
        return tuple(m.item for m in self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True, slots=True)
class QuantitativeTransaction:
    """One transaction: unique tid plus item -> quantity entries.

    Entries are stored in ascending item-id order; quantities are >= 1
    (absent items are simply not stored).
    """

    tid: int
    entries: tuple[tuple[int, int], ...]

    def items(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def quantity(self, item: int) -> int:
        for i, q in self.entries:
            if i == item:
                return q
        return 0

    def __contains__(self, item: int) -> bool:
        return any(i == item for i, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class QuantitativeDatabase:
    """An ordered list of transactions plus the external-utility table."""

    labels: tuple[str, ...]
    transactions: tuple[QuantitativeTransaction, ...]
    external_utility: tuple[float, ...]
    label_to_id: dict[str, int] = field(repr=False)

    @property
    def item_count(self) -> int:
        return len(self.labels)

    def transaction_crisp_utility(self, t: QuantitativeTransaction) -> float:
        return sum(q * self.external_utility[i] for i, q in t.entries)

    def total_crisp_utility(self) -> float:
        return sum(self.transaction_crisp_utility(t) for t in self.transactions)


@dataclass(frozen=True, slots=True)
class Threshold:
    """Minimum-utility threshold, absolute or as a rate of total utility."""

    gamma: float
    is_rate: bool = False

    def __post_init__(self):
        if self.is_rate and not 0.0 <= self.gamma <= 1.0:
            raise ValidationError(f"threshold rate must lie in [0, 1], got {self.gamma}")
        if not self.is_rate and self.gamma < 0.0:
            raise ValidationError(f"absolute threshold must be >= 0, got {self.gamma}")


def resolve_threshold(t: Threshold, db: QuantitativeDatabase) -> float:
    """Turn a threshold into an absolute value against this database."""
    if t.is_rate:
        return t.gamma * db.total_crisp_utility()
    return t.gamma


_LABEL_FORBIDDEN = set(":,=# \t")


def _check_label(label: str, path: str | None, line_no: int | None) -> str:
    if not label or any(c in _LABEL_FORBIDDEN for c in label):
        raise ParseError(f"invalid item label {label!r}", path, line_no)
    return label


def build_database(
    transactions: Iterable[tuple[int, Sequence[tuple[str, int]]]],
    utilities: dict[str, float],
) -> QuantitativeDatabase:
    """Assemble a database from (tid, [(label, qty), ...]) rows and a utility table.

    Ids are assigned densely in first-appearance order over the transaction
    stream, then over leftover utility-only labels. Raises ValidationError
    on duplicate items per transaction, non-increasing tids, non-positive
    quantities or utilities, or items without an external utility.
    """
    labels: list[str] = []
    label_to_id: dict[str, int] = {}

    def intern(label: str) -> int:
        if label not in label_to_id:
            label_to_id[label] = len(labels)
            labels.append(label)
        return label_to_id[label]

    txs: list[QuantitativeTransaction] = []
    last_tid = None
    for tid, entries in transactions:
        if tid < 0:
            raise ValidationError(f"tid must be non-negative, got {tid}")
        if last_tid is not None and tid <= last_tid:
            raise ValidationError(f"tids must be strictly increasing, got {tid} after {last_tid}")
        last_tid = tid
        seen: set[str] = set()
        row: list[tuple[int, int]] = []
        for label, qty in entries:
            if label in seen:
                raise ValidationError(f"transaction {tid} repeats item {label!r}")
            seen.add(label)
            if qty < 1:
                raise ValidationError(f"transaction {tid}: quantity for {label!r} must be >= 1, got {qty}")
            if label not in utilities:
                raise ValidationError(f"item {label!r} has no external utility")
            row.append((intern(label), qty))
        row.sort()
        txs.append(QuantitativeTransaction(tid=tid, entries=tuple(row)))

    for label in utilities:
        intern(label)

    eu = [0.0] * len(labels)
    for label, value in utilities.items():
        if value <= 0:
            raise ValidationError(f"external utility of {label!r} must be > 0, got {value}")
        eu[label_to_id[label]] = float(value)

    return QuantitativeDatabase(
        labels=tuple(labels),
        transactions=tuple(txs),
        external_utility=tuple(eu),
        label_to_id=dict(label_to_id),
    )


def parse_transactions(text: str, path: str | None = None) -> list[tuple[int, list[tuple[str, int]]]]:
    """Parse transaction lines of the form ``tid:item=qty,item=qty,...``."""
    rows: list[tuple[int, list[tuple[str, int]]]] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, sep, body = line.partition(":")
        if not sep:
            raise ParseError("expected 'tid:item=qty,...'", path, line_no)
        try:
            tid = int(head.strip())
        except ValueError:
            raise ParseError(f"invalid tid {head.strip()!r}", path, line_no) from None
        entries: list[tuple[str, int]] = []
        body = body.strip()
        if body:
            for part in body.split(","):
                label, sep2, qty_s = part.strip().partition("=")
                if not sep2:
                    raise ParseError(f"expected 'item=qty', got {part.strip()!r}", path, line_no)
                label = _check_label(label.strip(), path, line_no)
                try:
                    qty = int(qty_s.strip())
                except ValueError:
                    raise ParseError(f"invalid quantity {qty_s.strip()!r}", path, line_no) from None
                entries.append((label, qty))
        rows.append((tid, entries))
    return rows


def parse_utilities(text: str, path: str | None = None) -> dict[str, float]:
    """Parse external-utility lines of the form ``item value``."""
    table: dict[str, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'item value'", path, line_no)
        label = _check_label(parts[0], path, line_no)
        try:
            value = float(parts[1])
        except ValueError:
            raise ParseError(f"invalid utility {parts[1]!r}", path, line_no) from None
        if label in table:
            raise ParseError(f"duplicate utility entry for {label!r}", path, line_no)
        table[label] = value
    return table


def load_database(transactions_path: str, utility_path: str) -> QuantitativeDatabase:
    """Load a database from a transaction file and an external-utility file."""
    with open(transactions_path, "r", encoding="utf-8") as fh:
        rows = parse_transactions(fh.read(), transactions_path)
    with open(utility_path, "r", encoding="utf-8") as fh:
        utilities = parse_utilities(fh.read(), utility_path)
    return build_database(rows, utilities)


def serialize_transactions(db: QuantitativeDatabase) -> str:
    lines = []
    for t in db.transactions:
        body = ",".join(f"{db.labels[i]}={q}" for i, q in t.entries)
        lines.append(f"{t.tid}:{body}")
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_utilities(db: QuantitativeDatabase) -> str:
    lines = [f"{label} {db.external_utility[i]!r}" for i, label in enumerate(db.labels)]
    return "\n".join(lines) + ("\n" if lines else "")
