"""Revenue benchmarks: minimum core revenue, VCG, and the Micali-Valiant bound.

Two routes compute the core benchmark.  ``core_revenue_text_image`` is the
closed form for the k-slot text/image setting; ``core_revenue_exact`` is the
LP ground truth for any explicit environment and is what the closed form is
tested against.  Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import itertools
import math

from .environments import BenchmarkReport, CoreCheckResult, DeterministicOutcome, GenericEnvironment
from .errors import CapExceededError, InputError, InvariantError
from .profiles import TextImageProfile
from . import simplex

__all__ = [
    "DEFAULT_CAP",
    "harmonic_number",
    "max_uniform_text_revenue",
    "core_revenue_text_image",
    "text_image_environment",
    "core_revenue_exact",
    "vcg_outcome",
    "mv_benchmark",
    "is_core_outcome",
    "benchmark_report",
]

# Environments above this many agents are refused by the exact/brute-force
# routes (2^n coalition reasoning stops being desk-scale).
DEFAULT_CAP = 14


def _check_cap(n: int, cap: int | None, what: str) -> None:
    limit = DEFAULT_CAP if cap is None else int(cap)
    if n > limit:
        raise CapExceededError(f"{what}: {n} agents exceeds enumeration cap {limit}")


def harmonic_number(k: int) -> float:
    """k-th harmonic partial sum 1 + 1/2 + ... + 1/k."""
    if k < 1:
        raise InputError(f"harmonic_number needs k >= 1, got {k}")
    return float(sum(1.0 / j for j in range(1, k + 1)))


def max_uniform_text_revenue(profile: TextImageProfile) -> float:
    """Best revenue a single uniform price extracts from the text side.

    Equals max over j <= k of j times the j-th highest text value; this is
    within a harmonic factor of the total value of the top k text ads.
    """
    best = 0.0
    for j in range(1, profile.k + 1):
        if j > profile.n_texts:
            break
        best = max(best, j * profile.text_at(j - 1))
    return best


def core_revenue_text_image(profile: TextImageProfile) -> float:
    """Minimum core revenue of a text/image profile, in closed form.

    When the top k text ads are jointly worth at least the best image, a core
    outcome sells to them and must fend off both the best image and the first
    excluded text: revenue max(k * v_text[k+1], v_image[1]).  Otherwise the
    best image wins and must cover the runner-up image and the text block:
    max(v_image[2], sum of top k text values).  Ties go to the text branch;
    both branches agree there.
    """
    top = profile.top_text_sum()
    best_image = profile.image_at(0)
    if top >= best_image:
        return max(profile.k * profile.text_at(profile.k), best_image)
    return max(profile.image_at(1), top)


def text_image_environment(
    profile: TextImageProfile, cap: int | None = None
) -> GenericEnvironment:
    """Explicit environment for a profile: text subsets of size <= k, single images.

    Uses the profile's ads as given (no zero-value padding); agent ids match
    the profile's global ids, texts first.
    """
    _check_cap(profile.n_agents, cap, "text_image_environment")
    n_texts = profile.n_texts
    values = list(profile.input_texts()) + list(profile.input_images())
    family: list[tuple[int, ...]] = []
    for size in range(0, min(profile.k, n_texts) + 1):
        family.extend(itertools.combinations(range(n_texts), size))
    family.extend((n_texts + j,) for j in range(profile.n_images))
    return GenericEnvironment(values, family, downward_closed=True)


def core_revenue_exact(env: GenericEnvironment, cap: int | None = None) -> float:
    """Minimum auctioneer revenue over the core, by exact rational LP."""
    _check_cap(env.n, cap, "core_revenue_exact")
    return float(simplex.min_core_revenue(env.values, env.feasible))


def vcg_outcome(env: GenericEnvironment, cap: int | None = None) -> DeterministicOutcome:
    """Efficient winner set with externality payments.

    Winner i pays v(best set without i) - v(best set) + v_i.  Payments can be
    negative only if the environment is not downward-closed.
    """
    _check_cap(env.n, cap, "vcg_outcome")
    star = env.max_welfare_set()
    star_welfare = env.welfare(star)
    payments = {}
    for i in star:
        without = max((env.welfare(s) for s in env.feasible if i not in s), default=0.0)
        payments[i] = without - star_welfare + env.values[i]
    return DeterministicOutcome(star, payments)


def mv_benchmark(env: GenericEnvironment, cap: int | None = None) -> float:
    """Best feasible welfare once the single highest-value agent is excluded."""
    _check_cap(env.n, cap, "mv_benchmark")
    top_agent = max(range(env.n), key=lambda i: (env.values[i], -i))
    return max((env.welfare(s) for s in env.feasible if top_agent not in s), default=0.0)


def is_core_outcome(
    env: GenericEnvironment,
    outcome: DeterministicOutcome,
    tol: float = 1e-9,
    cap: int | None = None,
) -> CoreCheckResult:
    """Check the no-blocking conditions directly.

    An outcome (X, p) is in the core iff every winner pays at most its value
    and for every feasible S, v(S minus X) <= p(X minus S).  The worst
    violating S is reported with its margin.
    """
    _check_cap(env.n, cap, "is_core_outcome")
    if tuple(sorted(outcome.winners)) not in env.feasible:
        raise InputError(f"outcome winners {sorted(outcome.winners)} are not a feasible set")

    for i in sorted(outcome.winners):
        overpay = outcome.payments[i] - env.values[i]
        if overpay > tol:
            return CoreCheckResult(False, (i,), overpay)

    winners = outcome.winners
    worst_margin = -math.inf
    worst_set: tuple[int, ...] = ()
    for s in env.feasible:
        inside = set(s)
        gain = env.welfare(i for i in s if i not in winners)
        kept = sum(outcome.payments[i] for i in winners if i not in inside)
        margin = gain - kept
        if margin > worst_margin:
            worst_margin = margin
            worst_set = s
    if worst_margin > tol:
        return CoreCheckResult(False, worst_set, worst_margin)

    # Blocked-free plus individual rationality forces efficiency; a miss here
    # is a bug, not a property of the instance.
    best = env.welfare(env.max_welfare_set())
    if env.welfare(winners) < best - max(tol, 1e-7):
        raise InvariantError(
            "core conditions passed for an inefficient outcome; check the environment"
        )
    return CoreCheckResult(True, None, max(worst_margin, 0.0))


def benchmark_report(
    source: TextImageProfile | GenericEnvironment,
    use_oracle: bool = False,
    cap: int | None = None,
) -> BenchmarkReport:
    """CoreRev / VcgRev / MV for a profile or an explicit environment.

    Profiles use the closed-form core revenue unless ``use_oracle`` forces the
    LP route (through the explicit-environment encoding, which is also how VCG
    and MV are always computed).
    """
    if isinstance(source, TextImageProfile):
        env = text_image_environment(source, cap=cap)
        if use_oracle:
            core = core_revenue_exact(env, cap=cap)
            core_note = "lp-oracle"
        else:
            core = core_revenue_text_image(source)
            core_note = "closed-form"
    elif isinstance(source, GenericEnvironment):
        env = source
        core = core_revenue_exact(env, cap=cap)
        core_note = "lp-oracle"
    else:
        raise InputError(f"cannot benchmark a {type(source).__name__}")
    vcg = vcg_outcome(env, cap=cap)
    mv = mv_benchmark(env, cap=cap)
    notes = {"coreRev": core_note, "vcgRev": "brute-force", "mvRev": "brute-force"}
    return BenchmarkReport(core, vcg.revenue, mv, notes)
