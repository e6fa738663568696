"""Truthful auctions for the k-slot text/image setting.

Both mechanisms decide between the text side and the image side by comparing
the best image value against the best uniform-price text revenue ``phi``:

* ``deterministic_auction`` tilts the comparison toward the text side by a
  factor ``max(1, sqrt(ln k))`` and charges critical values.
* ``randomized_auction`` sells to a text block outright when the best image
  is at most ``2 * phi``; otherwise it shows the best image with probability
  ``ln(v/phi) / max(1, ln ln k)`` (capped where the ratio hits ``ln k``) and
  charges the Myerson integral of that allocation curve.

Small k degrade gracefully: the scale factors are clamped at 1 and the
lottery probability is clamped into [0, 1], which leaves the formulas
untouched for k >= 16.

Payments never exceed values (also per realization of the lottery), and no
outcome ever mixes text and image winners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .benchmarks import max_uniform_text_revenue
from .environments import DeterministicOutcome
from .errors import InputError, MonotonicityError
from .profiles import TextImageProfile

__all__ = [
    "RandomizedOutcome",
    "LotteryRealization",
    "sqrt_log_scale",
    "loglog_scale",
    "deterministic_auction",
    "randomized_auction",
    "image_win_probability",
    "image_expected_payment",
    "realize_lottery",
    "myerson_payment",
    "outcome_to_dict",
    "realization_to_dict",
]


def sqrt_log_scale(k: int) -> float:
    """Text-side boost of the deterministic rule: max(1, sqrt(ln k))."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    return max(1.0, math.sqrt(math.log(k)))


def loglog_scale(k: int) -> float:
    """Lottery normalizer: max(1, ln ln k); the max keeps tiny k well-defined."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if k < 3:
        return 1.0
    return max(1.0, math.log(math.log(k)))


@dataclass(frozen=True)
class RandomizedOutcome:
    """Allocation distribution and expected payments of the randomized rule.

    ``kind`` is "text" (a deterministic block of text winners), "image" (the
    best image wins with probability ``lottery_q``), or "none".
    """

    kind: str
    win_probability: dict[int, float]
    expected_payments: dict[int, float]
    lottery_q: float

    def __post_init__(self):
        if self.kind not in ("text", "image", "none"):
            raise InputError(f"unknown outcome kind {self.kind!r}")
        for agent, p in self.win_probability.items():
            if not 0.0 <= p <= 1.0:
                raise InputError(f"win probability of agent {agent} out of [0,1]: {p}")

    @property
    def expected_revenue(self) -> float:
        return float(sum(self.expected_payments.values()))


@dataclass(frozen=True)
class LotteryRealization:
    """One seeded draw of a randomized outcome."""

    seed: int
    winners: frozenset[int]
    payments: dict[int, float]

    @property
    def revenue(self) -> float:
        return float(sum(self.payments.values()))


def _largest_affordable_block(profile: TextImageProfile, threshold: float) -> int:
    """Largest j <= k whose j-th text value still supports j * value >= threshold."""
    if threshold <= 0.0:
        return profile.k
    m = min(profile.k, profile.n_texts)
    if m == 0:
        return 0
    products = np.arange(1, m + 1) * profile.text_values[:m]
    # one-ulp slack: callers only ask for thresholds at most the maximum product
    hits = np.nonzero(products >= threshold * (1.0 - 1e-12))[0]
    return int(hits[-1]) + 1 if hits.size else 0


def _positive_text_block(profile: TextImageProfile, j: int) -> list[int]:
    j = min(j, profile.n_texts)
    count = int(np.count_nonzero(profile.text_values[:j] > 0.0))
    return [profile.text_agent(r) for r in range(count)]


def deterministic_auction(profile: TextImageProfile) -> DeterministicOutcome:
    """Deterministic rule: image wins only if worth ``phi * sqrt_log_scale(k)``.

    Otherwise the largest text block j with j * v_j >= v_image / scale wins.
    Winners pay critical values: the image pays
    max(second image, phi * scale); each text pays
    max(v_text[k+1], v_image / (j * scale)).
    """
    phi = max_uniform_text_revenue(profile)
    scale = sqrt_log_scale(profile.k)
    best_image = profile.image_at(0)
    if phi == 0.0 and best_image == 0.0:
        return DeterministicOutcome((), {})
    if best_image >= phi * scale:
        agent = profile.image_agent(0)
        return DeterministicOutcome((agent,), {agent: max(profile.image_at(1), phi * scale)})
    j = _largest_affordable_block(profile, best_image / scale)
    pay = max(profile.text_at(profile.k), best_image / (j * scale))
    winners = _positive_text_block(profile, j)
    return DeterministicOutcome(winners, {w: pay for w in winners})


# -- the image lottery -----------------------------------------------------------


def image_win_probability(bid: float, phi: float, k: int) -> float:
    """Probability the best image is shown when it is worth ``bid``.

    Zero up to 2 * phi, then ln(bid/phi) / loglog_scale(k), rising until the
    ratio reaches ln k and constant beyond, clamped into [0, 1].  With no text
    competition (phi = 0) the image is always shown.
    """
    if bid <= 0.0:
        return 0.0
    if phi == 0.0:
        return 1.0
    ratio = bid / phi
    if ratio <= 2.0:
        return 0.0
    effective = min(ratio, math.log(k))
    if effective <= 1.0:
        return 0.0
    return min(1.0, math.log(effective) / loglog_scale(k))


def _lottery_area(bid: float, phi: float, k: int) -> float:
    """Integral of the image allocation curve from 2*phi up to ``bid``."""
    lo = 2.0 * phi
    if bid <= lo:
        return 0.0
    log_k = math.log(k)
    scale = loglog_scale(k)
    saturation = max(log_k * phi, lo)
    area = 0.0
    rising_top = min(bid, saturation)
    if rising_top > lo:
        area += (
            (rising_top * math.log(rising_top / phi) - rising_top)
            - (lo * math.log(2.0) - lo)
        ) / scale
    if bid > saturation:
        flat = image_win_probability(bid, phi, k)
        area += flat * (bid - saturation)
    return area


def image_expected_payment(bid: float, phi: float, k: int, second_image: float = 0.0) -> float:
    """Myerson payment of the winning image under the lottery rule.

    The winner's own allocation curve vanishes below max(2*phi, second_image)
    (below that it either loses to the text side or is no longer the best
    image), so the payment is bid*q minus the curve area above that point.
    With second_image <= 2*phi this reduces to
    (bid + 2*phi*ln 2 - 2*phi) / loglog_scale(k) in the rising region and to
    (ln(k)*phi + 2*phi*ln 2 - 2*phi) / loglog_scale(k) past saturation.
    """
    if phi == 0.0:
        return min(second_image, bid)
    q = image_win_probability(bid, phi, k)
    if q <= 0.0:
        return 0.0
    start = max(2.0 * phi, min(second_image, bid))
    area = _lottery_area(bid, phi, k) - _lottery_area(start, phi, k)
    return bid * q - area


def randomized_auction(profile: TextImageProfile) -> RandomizedOutcome:
    """Randomized rule: text block for image values up to 2*phi, else lottery.

    Text case: largest j with j * v_j >= v_image / 2 wins outright, each
    paying max(v_text[k+1], v_image / (2j)).  Lottery case: the best image
    wins with ``image_win_probability`` and pays its Myerson integral in
    expectation.  All-zero profiles allocate nothing.
    """
    phi = max_uniform_text_revenue(profile)
    best_image = profile.image_at(0)
    if phi == 0.0 and best_image == 0.0:
        return RandomizedOutcome("none", {}, {}, 0.0)
    if phi == 0.0:
        # No text competition at all: show the best image, charge the runner-up.
        agent = profile.image_agent(0)
        return RandomizedOutcome(
            "image", {agent: 1.0}, {agent: profile.image_at(1)}, 1.0
        )
    if best_image / phi <= 2.0:
        j = _largest_affordable_block(profile, best_image / 2.0)
        pay = max(profile.text_at(profile.k), best_image / (2.0 * j))
        winners = _positive_text_block(profile, j)
        return RandomizedOutcome(
            "text", {w: 1.0 for w in winners}, {w: pay for w in winners}, 1.0
        )
    q = image_win_probability(best_image, phi, profile.k)
    if q <= 0.0:
        # Only reachable for k <= 2, where the lottery probability clamps to 0.
        return RandomizedOutcome("none", {}, {}, 0.0)
    agent = profile.image_agent(0)
    pay = image_expected_payment(best_image, phi, profile.k, profile.image_at(1))
    return RandomizedOutcome("image", {agent: q}, {agent: pay}, q)


def realize_lottery(outcome: RandomizedOutcome, seed: int) -> LotteryRealization:
    """Draw one allocation from a randomized outcome.

    The image lottery charges the conditional price expected/q when it
    allocates, so realized payments average to the expected payment and never
    exceed the winner's value.  Text outcomes are deterministic.
    """
    if outcome.kind == "image":
        (agent,) = outcome.win_probability
        q = outcome.lottery_q
        draw = np.random.default_rng(seed).random()
        if draw < q:
            price = outcome.expected_payments[agent] / q
            return LotteryRealization(seed, frozenset((agent,)), {agent: price})
        return LotteryRealization(seed, frozenset(), {})
    winners = frozenset(outcome.win_probability)
    return LotteryRealization(seed, winners, dict(outcome.expected_payments))


def myerson_payment(
    alloc_curve: Callable[[float], float],
    value: float,
    lower_support: float = 0.0,
    samples: int = 257,
) -> float:
    """Truthful payment value*x(value) - integral of x from lower_support to value.

    The curve is sampled on [0, value] first and must be monotone
    non-decreasing (tolerance 1e-9); the sampled change points are handed to
    the quadrature as break points so step curves integrate cleanly.
    """
    if value < 0:
        raise InputError(f"value must be >= 0, got {value}")
    at_value = float(alloc_curve(value))
    if value == 0.0:
        return 0.0
    xs = np.linspace(0.0, value, samples)
    ys = np.array([float(alloc_curve(x)) for x in xs])
    drops = np.diff(ys)
    if drops.size and drops.min() < -1e-9:
        at = int(np.argmin(drops))
        raise MonotonicityError(
            f"allocation curve decreases near {xs[at + 1]:.6g} "
            f"({ys[at]:.6g} -> {ys[at + 1]:.6g})"
        )
    lo = max(0.0, float(lower_support))
    if value <= lo:
        return value * at_value
    moved = np.nonzero(np.abs(drops) > 0.0)[0]
    points = [x for x in xs[moved] if lo < x < value] or None
    integral, _ = quad(
        alloc_curve,
        lo,
        value,
        points=points,
        limit=max(200, (len(points) if points else 0) + 50),
    )
    return value * at_value - integral


# -- wire format ------------------------------------------------------------------


def outcome_to_dict(
    outcome: DeterministicOutcome | RandomizedOutcome, profile: TextImageProfile
) -> dict:
    """JSON view of an outcome: kind, winners, payments (+ lottery fields)."""
    if isinstance(outcome, RandomizedOutcome):
        winners = sorted(outcome.win_probability)
        data = {
            "kind": outcome.kind,
            "winners": winners,
            "payments": {str(a): outcome.expected_payments[a] for a in winners},
        }
        if outcome.kind == "image":
            data["winProb"] = outcome.lottery_q
            data["expectedPayment"] = outcome.expected_revenue
        return data
    winners = sorted(outcome.winners)
    if not winners:
        kind = "none"
    elif all(profile.is_image_agent(a) for a in winners):
        kind = "image"
    else:
        kind = "text"
    return {
        "kind": kind,
        "winners": winners,
        "payments": {str(a): outcome.payments[a] for a in winners},
    }


def realization_to_dict(realization: LotteryRealization) -> dict:
    winners = sorted(realization.winners)
    return {
        "seed": realization.seed,
        "winners": winners,
        "payments": {str(a): realization.payments[a] for a in winners},
    }
