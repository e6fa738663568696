"""Property-testing harness: monotonicity, truthfulness, anonymity, ratios.

Mechanism handles expose ``name`` and ``run(profile) -> outcome``; both
deterministic and randomized outcomes present ``win_probability`` and
``expected_payments`` maps, so one harness drives both kinds (a deterministic
mechanism is just an indicator-valued lottery).  A few deliberately broken toy
mechanisms are included as sensitivity controls for the checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .benchmarks import core_revenue_text_image
from .environments import DeterministicOutcome
from .errors import InputError, MonotonicityError
from .mechanisms import RandomizedOutcome, deterministic_auction, randomized_auction
from .profiles import TextImageProfile

__all__ = [
    "ICViolation",
    "RatioRecord",
    "DeterministicAuction",
    "RandomizedAuction",
    "FirstPriceAuction",
    "WindowAuction",
    "PositionalAuction",
    "PostedZeroAuction",
    "MECHANISMS",
    "get_mechanism",
    "win_probability_of",
    "critical_value",
    "check_monotone",
    "find_ic_violations",
    "check_anonymity",
    "competitive_ratio",
    "random_profiles",
    "deviation_grid",
    "verification_suite",
]

Outcome = DeterministicOutcome | RandomizedOutcome


def win_probability_of(outcome: Outcome, agent: int) -> float:
    return outcome.win_probability.get(agent, 0.0)


def _expected_payment_of(outcome: Outcome, agent: int) -> float:
    return outcome.expected_payments.get(agent, 0.0)


# -- mechanism handles ---------------------------------------------------------------


class DeterministicAuction:
    name = "det"

    def run(self, profile: TextImageProfile) -> DeterministicOutcome:
        return deterministic_auction(profile)


class RandomizedAuction:
    name = "rand"

    def run(self, profile: TextImageProfile) -> RandomizedOutcome:
        return randomized_auction(profile)


class FirstPriceAuction:
    """Control: highest-value ad wins and pays its own bid (not truthful)."""

    name = "first-price-toy"

    def run(self, profile: TextImageProfile) -> DeterministicOutcome:
        best_text = profile.text_at(0)
        best_image = profile.image_at(0)
        if best_text == 0.0 and best_image == 0.0:
            return DeterministicOutcome((), {})
        if best_text >= best_image:
            agent, bid = profile.text_agent(0), best_text
        else:
            agent, bid = profile.image_agent(0), best_image
        return DeterministicOutcome((agent,), {agent: bid})


class WindowAuction:
    """Control with a non-monotone allocation: first text wins iff its bid is in [lo, hi]."""

    name = "window-toy"

    def __init__(self, lo: float = 1.0, hi: float = 2.0):
        self.lo = lo
        self.hi = hi

    def run(self, profile: TextImageProfile) -> DeterministicOutcome:
        if profile.n_texts == 0:
            return DeterministicOutcome((), {})
        bid = float(profile.input_texts()[0])
        if self.lo <= bid <= self.hi:
            return DeterministicOutcome((0,), {0: self.lo})
        return DeterministicOutcome((), {})


class PositionalAuction:
    """Control that keys on identity: the first-listed text always wins (not anonymous)."""

    name = "positional-toy"

    def run(self, profile: TextImageProfile) -> DeterministicOutcome:
        if profile.n_texts == 0:
            return DeterministicOutcome((), {})
        value = float(profile.input_texts()[0])
        if value <= 0.0:
            return DeterministicOutcome((), {})
        return DeterministicOutcome((0,), {0: value / 2.0})


class PostedZeroAuction:
    """Control with zero revenue: gives the top text block away for free."""

    name = "posted-zero"

    def run(self, profile: TextImageProfile) -> DeterministicOutcome:
        count = min(profile.k, profile.n_texts)
        winners = [
            profile.text_agent(r) for r in range(count) if profile.text_values[r] > 0.0
        ]
        return DeterministicOutcome(winners, {w: 0.0 for w in winners})


MECHANISMS = {
    handle.name: handle
    for handle in (
        DeterministicAuction(),
        RandomizedAuction(),
        FirstPriceAuction(),
        WindowAuction(),
        PositionalAuction(),
        PostedZeroAuction(),
    )
}


def get_mechanism(name: str):
    try:
        return MECHANISMS[name]
    except KeyError:
        raise InputError(
            f"unknown mechanism {name!r}; choose from {sorted(MECHANISMS)}"
        ) from None


# -- records ----------------------------------------------------------------------------


@dataclass(frozen=True)
class ICViolation:
    """A profitable misreport: deviating to ``deviation`` gains ``utility_gain``."""

    agent: int
    true_value: float
    deviation: float
    utility_gain: float

    def to_dict(self) -> dict:
        return {
            "agent": self.agent,
            "trueValue": self.true_value,
            "deviation": self.deviation,
            "utilityGain": self.utility_gain,
        }


@dataclass(frozen=True)
class RatioRecord:
    """Core revenue vs. (expected) mechanism revenue for one profile.

    ratio is core/revenue; 1.0 when the core benchmark is zero, +inf when the
    benchmark is positive but the mechanism earns nothing.
    """

    core_revenue: float
    mechanism_revenue: float
    ratio: float
    profile: TextImageProfile | None = None

    def to_dict(self) -> dict:
        return {
            "coreRev": self.core_revenue,
            "revenue": self.mechanism_revenue,
            "ratio": self.ratio,
        }


# -- checks ------------------------------------------------------------------------------


def critical_value(
    mechanism, profile: TextImageProfile, agent: int, hi: float, precision: float = 1e-7
) -> float:
    """Infimum winning bid of ``agent`` on [0, hi], by bisection.

    Requires the agent to win at ``hi``.  If the agent wins at 0, a coarse
    scan still probes for a non-monotone pocket (win low, lose high) before
    the answer 0 is returned.
    """

    def wins(bid: float) -> bool:
        outcome = mechanism.run(profile.with_agent_value(agent, bid))
        return win_probability_of(outcome, agent) >= 0.5

    if hi <= 0:
        raise InputError(f"bisection needs hi > 0, got {hi}")
    if not wins(hi):
        raise InputError(f"agent {agent} does not win at bid {hi}; no critical value below")
    if wins(0.0):
        for probe in np.linspace(0.0, hi, 9)[1:-1]:
            if not wins(float(probe)):
                raise MonotonicityError(
                    f"agent {agent} wins at 0 but loses at {probe}; allocation not monotone"
                )
        return 0.0
    lo, up = 0.0, hi
    while up - lo > precision:
        mid = 0.5 * (lo + up)
        if wins(mid):
            up = mid
        else:
            lo = mid
    return 0.5 * (lo + up)


def check_monotone(
    mechanism,
    profile: TextImageProfile,
    agent: int,
    grid: Sequence[float],
    tol: float = 1e-9,
) -> bool:
    """True iff the agent's win probability is non-decreasing along the bid grid."""
    bids = [float(b) for b in grid]
    if any(b2 < b1 for b1, b2 in zip(bids, bids[1:])):
        raise InputError("bid grid must be sorted ascending")
    last = -math.inf
    for bid in bids:
        prob = win_probability_of(mechanism.run(profile.with_agent_value(agent, bid)), agent)
        if prob < last - tol:
            return False
        last = prob
    return True


def deviation_grid(profile: TextImageProfile, points: int = 32) -> np.ndarray:
    """Default misreport grid covering [0, 2 * max reported value]."""
    top = max(profile.text_at(0), profile.image_at(0), 1.0)
    return np.linspace(0.0, 2.0 * top, points)


def find_ic_violations(
    mechanism,
    profile: TextImageProfile,
    deviations: Sequence[float] | None = None,
    agents: Iterable[int] | None = None,
    tol: float = 1e-7,
) -> list[ICViolation]:
    """Brute-force truthfulness check in expectation.

    For every agent and misreport, compares truthful expected utility
    v*x - p against the deviating one; returns all gains above tolerance.
    """
    devs = deviation_grid(profile) if deviations is None else [float(d) for d in deviations]
    truthful = mechanism.run(profile)
    violations = []
    for agent in agents if agents is not None else range(profile.n_agents):
        value = profile.agent_value(agent)
        base = value * win_probability_of(truthful, agent) - _expected_payment_of(
            truthful, agent
        )
        for dev in devs:
            outcome = mechanism.run(profile.with_agent_value(agent, dev))
            utility = value * win_probability_of(outcome, agent) - _expected_payment_of(
                outcome, agent
            )
            if utility - base > tol:
                violations.append(ICViolation(agent, value, float(dev), utility - base))
    return violations


def _winner_signature(outcome: Outcome, profile: TextImageProfile) -> list[tuple]:
    rows = []
    for agent, prob in outcome.win_probability.items():
        if prob > 0.0:
            rows.append(
                (
                    profile.is_image_agent(agent),
                    profile.agent_value(agent),
                    prob,
                    _expected_payment_of(outcome, agent),
                )
            )
    return sorted(rows)


def check_anonymity(
    mechanism, profile: TextImageProfile, permutation_seed: int, tol: float = 1e-9
) -> bool:
    """Relabel bidders within their type class and compare winner signatures.

    The comparison is by multiset of (type, value, win probability, payment),
    so canonical tie-breaking by input position does not register as a
    violation, while any dependence on identity itself does.
    """
    rng = np.random.default_rng(permutation_seed)
    texts = profile.input_texts()[rng.permutation(profile.n_texts)]
    images = profile.input_images()[rng.permutation(profile.n_images)]
    permuted = TextImageProfile(profile.k, texts, images)
    ours = _winner_signature(mechanism.run(profile), profile)
    theirs = _winner_signature(mechanism.run(permuted), permuted)
    if len(ours) != len(theirs):
        return False
    for a, b in zip(ours, theirs):
        if a[0] != b[0] or any(abs(x - y) > tol for x, y in zip(a[1:], b[1:])):
            return False
    return True


def competitive_ratio(mechanism, profile: TextImageProfile) -> RatioRecord:
    """Core benchmark over (expected) revenue for one profile."""
    core = core_revenue_text_image(profile)
    revenue = mechanism.run(profile).expected_revenue
    if core <= 0.0:
        ratio = 1.0
    elif revenue <= 0.0:
        ratio = math.inf
    else:
        ratio = core / revenue
    return RatioRecord(core, revenue, ratio, profile)


# -- random instances -----------------------------------------------------------------


def random_profiles(
    seed: int, count: int, max_k: int = 8, allow_degenerate: bool = True
) -> Iterator[TextImageProfile]:
    """Seeded stream of small random profiles covering both mechanism branches.

    Image values are drawn on three scales (text-dominated, boundary, and
    image-dominated) so image wins and text wins both occur often.
    """
    rng = np.random.default_rng(seed)
    for index in range(count):
        k = int(rng.integers(1, max_k + 1))
        n_texts = int(rng.integers(1, k + 4))
        n_images = int(rng.integers(1, 4))
        texts = rng.uniform(0.0, 2.0, n_texts)
        if allow_degenerate and index % 23 == 7:
            texts[:] = 0.0
        scale = (0.6, 1.2 * math.sqrt(1.0 + math.log(k)), 3.0 * k)[index % 3]
        images = rng.uniform(0.0, scale, n_images)
        yield TextImageProfile(k, texts, images)


def verification_suite(mechanism, trials: int, seed: int) -> dict:
    """Run the full battery over seeded random profiles; used by the CLI.

    Returns a JSON-ready report; ``clean`` is False iff anything failed.
    Critical-value agreement with charged payments is checked only for
    deterministic outcomes (the notion is per-realization).
    """
    ic: list[dict] = []
    non_monotone: list[dict] = []
    non_anonymous: list[int] = []
    critical_mismatch: list[dict] = []
    for index, profile in enumerate(random_profiles(seed, trials)):
        grid = deviation_grid(profile, 16)
        for agent in range(profile.n_agents):
            if not check_monotone(mechanism, profile, agent, grid):
                non_monotone.append({"profile": index, "agent": agent})
        for violation in find_ic_violations(mechanism, profile):
            entry = violation.to_dict()
            entry["profile"] = index
            ic.append(entry)
        if not check_anonymity(mechanism, profile, permutation_seed=seed + index):
            non_anonymous.append(index)
        outcome = mechanism.run(profile)
        if isinstance(outcome, DeterministicOutcome):
            hi = 4.0 * max(profile.text_at(0), profile.image_at(0), 1.0)
            for agent in sorted(outcome.winners):
                try:
                    crit = critical_value(mechanism, profile, agent, hi)
                except (MonotonicityError, InputError):
                    # wins at its own bid but not at hi: non-monotone allocation
                    non_monotone.append({"profile": index, "agent": agent})
                    continue
                if abs(crit - outcome.payments[agent]) > 1e-6:
                    critical_mismatch.append(
                        {
                            "profile": index,
                            "agent": agent,
                            "payment": outcome.payments[agent],
                            "criticalValue": crit,
                        }
                    )
    clean = not (ic or non_monotone or non_anonymous or critical_mismatch)
    return {
        "mechanism": mechanism.name,
        "trials": trials,
        "seed": seed,
        "icViolations": ic,
        "nonMonotone": non_monotone,
        "nonAnonymous": non_anonymous,
        "criticalValueMismatches": critical_mismatch,
        "clean": clean,
    }
