"""Synthetic quantitative-database generation.

External utilities are drawn log-normally and clamped to [1, 10000];
quantities are uniform over a configurable range. Item popularity is
uniform by default; the zipf mode gives the long-tail item frequencies
typical of retail-style benchmarks. Output is a pure function of the
seed.
"""

from __future__ import annotations

import random
from bisect import bisect_left
from dataclasses import dataclass

from .core import QuantitativeDatabase, ValidationError, build_database


@dataclass(frozen=True)
class GeneratorSpec:
    items: int
    transactions: int
    avg_length: float
    qty_low: int = 1
    qty_high: int = 6
    seed: int = 0
    utility_mu: float = 5.0
    utility_sigma: float = 1.2
    popularity: str = "uniform"  # or "zipf"
    zipf_exponent: float = 1.0

    def validate(self, max_quantity: float | None = None) -> None:
        if self.items < 1 or self.transactions < 0:
            raise ValidationError("items must be >= 1 and transactions >= 0")
        if self.avg_length < 1:
            raise ValidationError("avg_length must be >= 1")
        if self.qty_low < 1 or self.qty_high < self.qty_low:
            raise ValidationError(
                f"quantity range [{self.qty_low}, {self.qty_high}] is invalid"
            )
        if max_quantity is not None and self.qty_high > max_quantity:
            raise ValidationError(
                f"quantity range reaches {self.qty_high} but the membership "
                f"function is only defined up to {max_quantity}"
            )
        if self.popularity not in ("uniform", "zipf"):
            raise ValidationError(f"unknown popularity model {self.popularity!r}")


def draw_utility(rng: random.Random, mu: float, sigma: float) -> float:
    v = rng.lognormvariate(mu, sigma)
    return round(min(max(v, 1.0), 10000.0), 4)


def generate_database(spec: GeneratorSpec, max_quantity: float | None = None) -> QuantitativeDatabase:
    spec.validate(max_quantity)
    rng = random.Random(spec.seed)
    labels = [str(i + 1) for i in range(spec.items)]
    utilities = {label: draw_utility(rng, spec.utility_mu, spec.utility_sigma) for label in labels}

    avg = max(1, round(spec.avg_length))
    lo_len = max(1, avg // 2)
    hi_len = min(spec.items, avg + (avg - avg // 2))

    if spec.popularity == "zipf":
        cum = []
        acc = 0.0
        for i in range(spec.items):
            acc += 1.0 / (i + 1) ** spec.zipf_exponent
            cum.append(acc)

        def pick(length: int) -> list[int]:
            chosen: set[int] = set()
            while len(chosen) < length:
                chosen.add(bisect_left(cum, rng.random() * cum[-1]))
            return sorted(chosen)

    else:

        def pick(length: int) -> list[int]:
            return sorted(rng.sample(range(spec.items), length))

    rows = []
    for tid in range(1, spec.transactions + 1):
        length = rng.randint(lo_len, hi_len)
        entries = [(labels[i], rng.randint(spec.qty_low, spec.qty_high)) for i in pick(length)]
        rows.append((tid, entries))
    return build_database(rows, utilities)
