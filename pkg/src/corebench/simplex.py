"""Small dense simplex over exact rationals.

The minimum-revenue point of the core polytope is found by LP.  Instances are
desk-scale (a dozen agents, at most a few thousand feasible sets) but the
result feeds equality assertions, so everything is done in exact rational
arithmetic: floats are converted to the rationals they already are, and the
optimum is rounded to float exactly once on the way out.

The core LP is solved through its dual, which has one constraint per agent
(plus one for the auctioneer) and one variable per feasible set, so the
tableau stays shallow no matter how many sets the environment lists.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvariantError

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    _Q = Fraction

__all__ = ["to_rational", "solve_max", "min_core_revenue"]

# Dantzig pivoting is fast in practice; Bland kicks in as the anti-cycling
# safeguard once an iteration budget is burned.
_BLAND_AFTER = 256


def to_rational(x) -> object:
    """Exact rational from an int or float (binary expansion, no rounding)."""
    if isinstance(x, float):
        return _Q(Fraction(x))
    return _Q(x)


def solve_max(
    objective: Sequence, rows: Sequence[Sequence], rhs: Sequence
) -> tuple[object, list]:
    """Maximize c.x subject to A x <= b, x >= 0, with b >= 0 entrywise.

    All entries must be rationals from :func:`to_rational`.  Returns the
    optimal value and one optimal x.  Raises if the LP is unbounded, which for
    the callers in this package signals a broken invariant rather than bad
    input.
    """
    zero = _Q(0)
    one = _Q(1)
    m = len(rows)
    nv = len(objective)
    if any(b < zero for b in rhs):
        raise InvariantError("solve_max requires a non-negative right-hand side")

    ncols = nv + m
    tableau = []
    for i, row in enumerate(rows):
        line = list(row) + [zero] * m + [rhs[i]]
        line[nv + i] = one
        tableau.append(line)
    cost = list(objective) + [zero] * m
    value = zero
    basis = [nv + i for i in range(m)]

    iteration = 0
    while True:
        iteration += 1
        bland = iteration > _BLAND_AFTER
        enter = -1
        best = zero
        for j in range(ncols):
            cj = cost[j]
            if cj > zero:
                if bland:
                    enter = j
                    break
                if cj > best:
                    best = cj
                    enter = j
        if enter < 0:
            break  # optimal

        leave = -1
        best_ratio = None
        for i in range(m):
            coef = tableau[i][enter]
            if coef > zero:
                ratio = tableau[i][ncols] / coef
                if (
                    best_ratio is None
                    or ratio < best_ratio
                    or (ratio == best_ratio and basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            raise InvariantError("LP is unbounded; the model construction is broken")

        pivot_row = tableau[leave]
        pivot = pivot_row[enter]
        if pivot != one:
            inv = one / pivot
            tableau[leave] = pivot_row = [e * inv for e in pivot_row]
        for i in range(m):
            if i == leave:
                continue
            factor = tableau[i][enter]
            if factor != zero:
                row_i = tableau[i]
                tableau[i] = [a - factor * b for a, b in zip(row_i, pivot_row)]
        factor = cost[enter]
        value += factor * pivot_row[ncols]
        cost = [a - factor * b for a, b in zip(cost, pivot_row)]
        basis[leave] = enter

    x = [zero] * nv
    for i, var in enumerate(basis):
        if var < nv:
            x[var] = tableau[i][ncols]
    return value, x


def min_core_revenue(values: Sequence[float], feasible: Iterable[tuple[int, ...]]) -> object:
    """Exact minimum auctioneer revenue over the core of (values, feasible).

    Solves  min u0  s.t.  u >= 0,  sum(u) = best welfare,  and for every
    feasible X:  u0 + sum(u_i, i in X) >= value(X).  (Coalitions that are not
    feasible sets are covered by these constraints plus non-negativity.)
    Returned as a rational; the core is never empty, so a solver failure is an
    invariant error.
    """
    vals = [to_rational(v) for v in values]
    sets = list(feasible)
    set_values = [sum((vals[i] for i in subset), _Q(0)) for subset in sets]
    best = max(set_values, default=_Q(0))
    if best < 0:
        raise InvariantError("negative welfare on non-negative values")

    n = len(vals)
    zero, one = _Q(0), _Q(1)
    # Dual variables: one per feasible set, plus one for the budget row.
    objective = list(set_values) + [-best]
    rows = []
    for agent in range(-1, n):  # -1 is the auctioneer column of the primal
        row = [
            one if (agent < 0 or agent in subset) else zero for subset in sets
        ]
        row.append(-one)
        rows.append(row)
    rhs = [one] + [zero] * n
    value, _ = solve_max(objective, rows, rhs)
    return value
