"""Explicit single-parameter environments and outcome records.

An environment lists every feasible winner set outright, which keeps all
benchmark computations exact and brute-forceable at desk scale.  Agents are
0-based; the empty set is always feasible (it is inserted if missing).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, InvariantError

__all__ = [
    "GenericEnvironment",
    "DeterministicOutcome",
    "CoreCheckResult",
    "BenchmarkReport",
    "CHAIN_TOL",
]

# tolerance for the benchmark dominance chain mv >= core >= vcg >= 0
CHAIN_TOL = 1e-9


def _canonical_family(feasible: Iterable[Iterable[int]], n: int) -> tuple[tuple[int, ...], ...]:
    seen = set()
    for raw in feasible:
        subset = tuple(sorted(set(int(i) for i in raw)))
        if subset and (subset[0] < 0 or subset[-1] >= n):
            raise InputError(f"feasible set {subset} out of range for n={n}")
        seen.add(subset)
    seen.add(())
    return tuple(sorted(seen))


@dataclass(frozen=True)
class GenericEnvironment:
    """Agents with values plus an explicit family of feasible winner sets."""

    values: tuple[float, ...]
    feasible: tuple[tuple[int, ...], ...]
    downward_closed: bool = False

    def __init__(
        self,
        values: Sequence[float],
        feasible: Iterable[Iterable[int]],
        downward_closed: bool = False,
    ):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise InputError("environment needs at least one agent")
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise InputError("agent values must be finite and non-negative")
        family = _canonical_family(feasible, len(vals))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "feasible", family)
        object.__setattr__(self, "downward_closed", bool(downward_closed))
        if downward_closed:
            members = set(family)
            for subset in family:
                for drop in subset:
                    if tuple(i for i in subset if i != drop) not in members:
                        raise InputError(
                            f"flagged downward-closed but {subset} minus {drop} is infeasible"
                        )

    @property
    def n(self) -> int:
        return len(self.values)

    def welfare(self, subset: Iterable[int]) -> float:
        return float(sum(self.values[i] for i in subset))

    def max_welfare_set(self) -> tuple[int, ...]:
        """Welfare-maximizing feasible set; ties go to the lexicographically smallest."""
        return min(self.feasible, key=lambda s: (-self.welfare(s), s))

    # -- constructors for common families ---------------------------------------

    @classmethod
    def multi_unit(cls, values: Sequence[float], k: int) -> "GenericEnvironment":
        """k identical units, unit demand: every subset of size <= k is feasible."""
        n = len(values)
        if not 1 <= k:
            raise InputError("k must be >= 1")
        family = [
            comb
            for size in range(0, min(k, n) + 1)
            for comb in itertools.combinations(range(n), size)
        ]
        return cls(values, family, downward_closed=True)

    @classmethod
    def digital_goods(cls, values: Sequence[float]) -> "GenericEnvironment":
        n = len(values)
        family = [
            comb for size in range(n + 1) for comb in itertools.combinations(range(n), size)
        ]
        return cls(values, family, downward_closed=True)

    # -- wire format --------------------------------------------------------------

    def to_dict(self) -> dict:
        return {"values": list(self.values), "feasible": [list(s) for s in self.feasible]}

    @classmethod
    def from_dict(cls, data: dict) -> "GenericEnvironment":
        if not isinstance(data, dict):
            raise InputError("environment JSON must be an object")
        for key in ("values", "feasible"):
            if key not in data:
                raise InputError(f"environment JSON missing field {key!r}")
        return cls(data["values"], data["feasible"], bool(data.get("downward_closed", False)))


@dataclass(frozen=True)
class DeterministicOutcome:
    """A realized winner set together with per-winner payments."""

    winners: frozenset[int]
    payments: dict[int, float]

    def __init__(self, winners: Iterable[int], payments: Mapping[int, float]):
        wset = frozenset(int(i) for i in winners)
        pay = {int(i): float(p) for i, p in payments.items()}
        if not set(pay) <= wset:
            raise InputError(f"payments for non-winners: {sorted(set(pay) - wset)}")
        for i in wset:
            pay.setdefault(i, 0.0)
        object.__setattr__(self, "winners", wset)
        object.__setattr__(self, "payments", pay)

    @property
    def revenue(self) -> float:
        return float(sum(self.payments.values()))

    # Uniform harness view: a deterministic outcome is the degenerate lottery.
    @property
    def win_probability(self) -> dict[int, float]:
        return {i: 1.0 for i in self.winners}

    @property
    def expected_payments(self) -> dict[int, float]:
        return dict(self.payments)

    @property
    def expected_revenue(self) -> float:
        return self.revenue


@dataclass(frozen=True)
class CoreCheckResult:
    """Outcome of a core-membership check.

    When the outcome is blocked, ``blocking_coalition`` holds a feasible set S
    maximizing the profitability margin v(S minus X) - p(X minus S); a winner
    paying above value is reported as the singleton coalition of that winner.
    """

    is_core: bool
    blocking_coalition: tuple[int, ...] | None = None
    margin: float = 0.0

    def __post_init__(self):
        if not self.is_core and self.blocking_coalition is None:
            raise InvariantError("blocked outcome must carry a blocking coalition")

    def to_dict(self) -> dict:
        return {
            "isCore": self.is_core,
            "blockingCoalition": list(self.blocking_coalition)
            if self.blocking_coalition is not None
            else None,
            "margin": self.margin,
        }


@dataclass(frozen=True)
class BenchmarkReport:
    """The three revenue benchmarks for one instance.

    Construction asserts the dominance chain mv >= core >= vcg >= 0; a
    violation beyond tolerance means a bug upstream, not bad input.
    """

    core_revenue: float
    vcg_revenue: float
    mv_revenue: float
    notes: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        chain = (self.mv_revenue, self.core_revenue, self.vcg_revenue, 0.0)
        for hi, lo, names in zip(
            chain, chain[1:], (("mvRev", "coreRev"), ("coreRev", "vcgRev"), ("vcgRev", "0"))
        ):
            if hi < lo - CHAIN_TOL:
                raise InvariantError(
                    f"benchmark chain violated: {names[0]}={hi!r} < {names[1]}={lo!r}"
                )

    def to_dict(self) -> dict:
        return {
            "coreRev": self.core_revenue,
            "vcgRev": self.vcg_revenue,
            "mvRev": self.mv_revenue,
            "notes": dict(self.notes),
        }
