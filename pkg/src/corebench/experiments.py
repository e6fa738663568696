"""Seeded Monte-Carlo experiments on the adversarial value distribution.

The distribution draws k text values i.i.d. uniform from {1, 1/2, ..., 1/k}
and one image value uniform from {H/1, ..., H/H} with H = ceil(H_k).  Under
it, any truthful mechanism earns O(1) in expectation while the core benchmark
grows like ln ln k, and pinning the image at H_k/2 shows that mechanisms which
only ever allocate inside the efficient set are stuck an ln(k) factor below
the benchmark.

Every draw derives its own generator from (seed, substream, draw index), so
estimates are bit-reproducible and independent of evaluation order.  Large-k
estimators recompute the closed-form revenues from the raw draws instead of
building profile objects; the equivalence of the two routes is pinned by
tests.
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .benchmarks import harmonic_number
from .errors import InputError
from .mechanisms import image_expected_payment, sqrt_log_scale
from .profiles import TextImageProfile
from .verification import competitive_ratio

__all__ = [
    "LowerBoundConfig",
    "SweepResult",
    "HardnessResult",
    "sample_lower_bound_profile",
    "estimate_expected_core_revenue",
    "estimate_mechanism_revenue",
    "efficient_subset_hardness",
    "adversarial_profiles",
    "ratio_sweep",
    "CSV_HEADER",
    "write_sweep_csv",
    "write_sidecar",
]

_SUBSTREAM_LOWER_BOUND = 0
_SUBSTREAM_HARDNESS = 1


@dataclass(frozen=True)
class LowerBoundConfig:
    """Shape of one Monte-Carlo run against the adversarial distribution."""

    k: int
    samples: int
    seed: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.samples < 1:
            raise InputError(f"samples must be >= 1, got {self.samples}")
        if self.seed < 0:
            raise InputError(f"seed must be >= 0, got {self.seed}")

    @property
    def image_support_size(self) -> int:
        """H = ceil(H_k); the image value is uniform on {H/1, ..., H/H}."""
        return math.ceil(harmonic_number(self.k))


@dataclass(frozen=True)
class SweepResult:
    """Per-k summary row of a Monte-Carlo or ratio sweep."""

    k: int
    samples: int
    mean_core_revenue: float
    se_core_revenue: float
    mean_revenue: float
    se_revenue: float
    worst_ratio: float

    def to_csv_row(self) -> list[str]:
        return [str(self.k), str(self.samples)] + [
            repr(float(v))
            for v in (
                self.mean_core_revenue,
                self.se_core_revenue,
                self.mean_revenue,
                self.se_revenue,
                self.worst_ratio,
            )
        ]


CSV_HEADER = [
    "k",
    "samples",
    "mean_corerev",
    "se_corerev",
    "mean_revenue",
    "se_revenue",
    "worst_ratio",
]


def _standard_error(values: np.ndarray) -> float:
    if values.size < 2:
        return 0.0
    return float(values.std(ddof=1) / math.sqrt(values.size))


def _draw_lower_bound(config: LowerBoundConfig, draw_index: int) -> tuple[np.ndarray, float]:
    rng = np.random.default_rng([config.seed, _SUBSTREAM_LOWER_BOUND, draw_index])
    texts = 1.0 / rng.integers(1, config.k + 1, size=config.k)
    h = config.image_support_size
    image = h / float(rng.integers(1, h + 1))
    return texts, image


def sample_lower_bound_profile(config: LowerBoundConfig, draw_index: int) -> TextImageProfile:
    """Profile for one draw; identical (seed, draw_index) gives an identical profile."""
    texts, image = _draw_lower_bound(config, draw_index)
    return TextImageProfile(config.k, texts, [image])


def _core_revenue_from_draw(text_sum: float, top_block: float, image: float) -> float:
    # closed form with no (k+1)-th text and no second image
    if text_sum >= image:
        return max(top_block, image)
    return text_sum


def _det_revenue_from_draw(phi: float, image: float, k: int) -> float:
    scale = sqrt_log_scale(k)
    if image >= phi * scale:
        return phi * scale
    return image / scale


def _rand_revenue_from_draw(phi: float, image: float, k: int) -> float:
    if image <= 2.0 * phi:
        return image / 2.0
    return image_expected_payment(image, phi, k)


def estimate_expected_core_revenue(config: LowerBoundConfig) -> SweepResult:
    """Monte-Carlo mean of the core benchmark under the adversarial distribution."""
    core = np.empty(config.samples)
    for i in range(config.samples):
        texts, image = _draw_lower_bound(config, i)
        core[i] = _core_revenue_from_draw(float(texts.sum()), 0.0, image)
    return SweepResult(
        config.k,
        config.samples,
        float(core.mean()),
        _standard_error(core),
        math.nan,
        math.nan,
        math.nan,
    )


def estimate_mechanism_revenue(mechanism, config: LowerBoundConfig) -> SweepResult:
    """Monte-Carlo mean revenue of a mechanism under the adversarial distribution.

    The two built-in auctions take a closed-form fast path on the raw draws;
    any other handle is run on the materialized profile.
    """
    fast: Callable[[float, float, int], float] | None = {
        "det": _det_revenue_from_draw,
        "rand": _rand_revenue_from_draw,
    }.get(getattr(mechanism, "name", ""))
    core = np.empty(config.samples)
    revenue = np.empty(config.samples)
    worst = 1.0
    ranks = np.arange(1, config.k + 1, dtype=float)
    for i in range(config.samples):
        texts, image = _draw_lower_bound(config, i)
        core[i] = _core_revenue_from_draw(float(texts.sum()), 0.0, image)
        if fast is not None:
            phi = float((np.sort(texts)[::-1] * ranks).max())
            revenue[i] = fast(phi, image, config.k)
        else:
            revenue[i] = mechanism.run(TextImageProfile(config.k, texts, [image])).expected_revenue
        if revenue[i] > 0.0 and core[i] > 0.0:
            worst = max(worst, float(core[i] / revenue[i]))
        elif core[i] > 0.0:
            worst = math.inf
    return SweepResult(
        config.k,
        config.samples,
        float(core.mean()),
        _standard_error(core),
        float(revenue.mean()),
        _standard_error(revenue),
        worst,
    )


@dataclass(frozen=True)
class HardnessResult:
    """Outcome of the fixed-image construction against efficient-subset mechanisms.

    k+1 text values are drawn so the (k+1)-th price is positive; the baseline
    sells the top k texts at that price (a mechanism that only allocates
    efficient winners).  The image is pinned at H_k / 2.
    """

    k: int
    samples: int
    image_value: float
    image_efficient_frequency: float
    mean_core_revenue: float
    se_core_revenue: float
    mean_baseline_revenue: float
    se_baseline_revenue: float

    @property
    def core_to_baseline_ratio(self) -> float:
        if self.mean_baseline_revenue <= 0.0:
            return math.inf
        return self.mean_core_revenue / self.mean_baseline_revenue

    def as_sweep_result(self) -> SweepResult:
        return SweepResult(
            self.k,
            self.samples,
            self.mean_core_revenue,
            self.se_core_revenue,
            self.mean_baseline_revenue,
            self.se_baseline_revenue,
            self.core_to_baseline_ratio,
        )

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["coreToBaselineRatio"] = self.core_to_baseline_ratio
        return data


def efficient_subset_hardness(k: int, samples: int, seed: int) -> HardnessResult:
    """Estimate how rarely the image is efficient and what that costs the baseline."""
    if k < 2:
        raise InputError(f"hardness construction needs k >= 2, got {k}")
    if samples < 1 or seed < 0:
        raise InputError("samples must be >= 1 and seed >= 0")
    image = harmonic_number(k) / 2.0
    core = np.empty(samples)
    baseline = np.empty(samples)
    efficient = 0
    for i in range(samples):
        rng = np.random.default_rng([seed, _SUBSTREAM_HARDNESS, i])
        texts = 1.0 / rng.integers(1, k + 1, size=k + 1)
        lowest = float(texts.min())
        top_sum = float(texts.sum()) - lowest
        if image > top_sum:
            efficient += 1
        core[i] = _core_revenue_from_draw(top_sum, k * lowest, image)
        baseline[i] = k * lowest
    return HardnessResult(
        k,
        samples,
        image,
        efficient / samples,
        float(core.mean()),
        _standard_error(core),
        float(baseline.mean()),
        _standard_error(baseline),
    )


def adversarial_profiles(k: int, samples: int, seed: int) -> list[TextImageProfile]:
    """Profiles built to stress the competitive-ratio bounds at a given k.

    Text sides alternate between a harmonic tail 1/i on k ads, the same tail
    on k+1 ads (non-zero (k+1)-th price), and a flat block; image values sweep
    a geometric grid that straddles every decision boundary of both
    mechanisms (2*phi, phi*sqrt(ln k), phi*ln k, the top text block sum),
    including points one part in a thousand on each side.
    """
    if samples < 1:
        raise InputError("samples must be >= 1")
    rng = np.random.default_rng([seed, k])
    texts_variants = [
        1.0 / np.arange(1.0, k + 1.0),
        1.0 / np.arange(1.0, k + 2.0),
        np.full(k, 0.8),
    ]
    profiles: list[TextImageProfile] = []
    per_variant = max(1, samples // len(texts_variants))
    for texts in texts_variants:
        block = float(texts[: k].sum())
        phi = float((np.arange(1, min(k, texts.size) + 1) * texts[: k]).max())
        anchors = {
            2.0 * phi,
            phi * sqrt_log_scale(k),
            phi * math.log(k) if k > 1 else phi,
            block,
        }
        images = {0.0, phi * 0.25}
        for anchor in anchors:
            for tilt in (0.97, 0.999, 1.0, 1.001, 1.03):
                images.add(anchor * tilt)
        grid_len = max(4, per_variant - len(images) - 2)
        lo, hi = 0.05 * phi, 3.0 * max(block, phi)
        images.update(np.geomspace(lo, hi, grid_len))
        images.add(float(rng.uniform(lo, hi)))
        images.add(float(rng.uniform(2.0 * phi, 2.2 * phi)))
        for v in sorted(images):
            profiles.append(TextImageProfile(k, texts, [v]))
            if len(profiles) % 5 == 0:
                # occasionally add a serious runner-up image
                profiles.append(TextImageProfile(k, texts, [v, 0.7 * v]))
    return profiles


def ratio_sweep(
    mechanism,
    k_list: Sequence[int],
    profile_generator: Callable[[int, int, int], Iterable[TextImageProfile]] | None = None,
    samples: int = 120,
    seed: int = 0,
) -> list[SweepResult]:
    """Worst and mean core/revenue ratio per k over generated profiles."""
    if not k_list:
        return []
    generator = adversarial_profiles if profile_generator is None else profile_generator
    results = []
    for k in k_list:
        records = [
            competitive_ratio(mechanism, profile) for profile in generator(k, samples, seed)
        ]
        if not records:
            continue
        core = np.array([r.core_revenue for r in records])
        revenue = np.array([r.mechanism_revenue for r in records])
        worst = max(r.ratio for r in records)
        results.append(
            SweepResult(
                k,
                len(records),
                float(core.mean()),
                _standard_error(core),
                float(revenue.mean()),
                _standard_error(revenue),
                worst,
            )
        )
    return results


def write_sweep_csv(path, results: Iterable[SweepResult]) -> None:
    lines = [",".join(CSV_HEADER)]
    lines.extend(",".join(r.to_csv_row()) for r in results)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sidecar(path, payload: dict) -> None:
    """JSON provenance next to a CSV; the timestamp lives only here."""
    body = dict(payload)
    body["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    with open(path, "w") as fh:
        json.dump(body, fh, indent=2, sort_keys=True)
        fh.write("\n")
