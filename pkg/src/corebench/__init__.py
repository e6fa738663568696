"""Core-competitive auctions for the k-slot text/image ad setting.

Benchmarks (minimum core revenue, VCG, Micali-Valiant), two truthful
mechanisms with closed-form payments, a property-testing harness, and seeded
Monte-Carlo experiments.
"""

from .benchmarks import (
    DEFAULT_CAP,
    benchmark_report,
    core_revenue_exact,
    core_revenue_text_image,
    harmonic_number,
    is_core_outcome,
    max_uniform_text_revenue,
    mv_benchmark,
    text_image_environment,
    vcg_outcome,
)
from .environments import (
    BenchmarkReport,
    CoreCheckResult,
    DeterministicOutcome,
    GenericEnvironment,
)
from .errors import (
    CapExceededError,
    CoreBenchError,
    InputError,
    InvariantError,
    MonotonicityError,
)
from .experiments import (
    HardnessResult,
    LowerBoundConfig,
    SweepResult,
    adversarial_profiles,
    efficient_subset_hardness,
    estimate_expected_core_revenue,
    estimate_mechanism_revenue,
    ratio_sweep,
    sample_lower_bound_profile,
)
from .mechanisms import (
    LotteryRealization,
    RandomizedOutcome,
    deterministic_auction,
    image_expected_payment,
    image_win_probability,
    loglog_scale,
    myerson_payment,
    randomized_auction,
    realize_lottery,
    sqrt_log_scale,
)
from .profiles import TextImageProfile
from .verification import (
    ICViolation,
    MECHANISMS,
    RatioRecord,
    check_anonymity,
    check_monotone,
    competitive_ratio,
    critical_value,
    find_ic_violations,
    get_mechanism,
    random_profiles,
    verification_suite,
)

__version__ = "0.1.0"
