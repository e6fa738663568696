import math

import numpy as np
import pytest

from corebench import (
    InputError,
    MonotonicityError,
    TextImageProfile,
    check_anonymity,
    check_monotone,
    competitive_ratio,
    critical_value,
    find_ic_violations,
    get_mechanism,
    random_profiles,
    verification_suite,
)
from corebench.verification import (
    DeterministicAuction,
    FirstPriceAuction,
    PositionalAuction,
    PostedZeroAuction,
    RandomizedAuction,
    WindowAuction,
    deviation_grid,
)

DET = DeterministicAuction()
RAND = RandomizedAuction()


# -- critical value bisection ---------------------------------------------------------


def test_critical_value_two_slot_story_text():
    # texts win at price 1/2: the infimum winning text bid is 1/2
    profile = TextImageProfile(2, [1.0, 1.0], [1.0])
    assert critical_value(DET, profile, 0, hi=4.0) == pytest.approx(0.5, abs=1e-6)


def test_critical_value_matches_closed_form_text_branch():
    profile = TextImageProfile(4, [1, 0.5, 1 / 3, 0.25], [1.0])
    crit = critical_value(DET, profile, 0, hi=6.0)
    assert crit == pytest.approx(1.0 / (4.0 * math.sqrt(math.log(4))), abs=1e-6)


def test_critical_value_image_branch():
    profile = TextImageProfile(4, [0.3, 0.2, 0.1], [9.0, 1.2])
    agent = profile.image_agent(0)
    assert critical_value(DET, profile, agent, hi=20.0) == pytest.approx(1.2, abs=1e-6)


def test_critical_value_second_price_toy():
    profile = TextImageProfile(1, [5.0, 3.0], [])
    # the first-price toy allocates to the highest bid, so its critical value
    # is the runner-up even though it charges the bid itself
    assert critical_value(FirstPriceAuction(), profile, 0, hi=9.0) == pytest.approx(
        3.0, abs=1e-6
    )


def test_critical_value_requires_winning_at_hi():
    profile = TextImageProfile(2, [1.0, 1.0], [1.0])
    with pytest.raises(InputError):
        critical_value(WindowAuction(), profile, 0, hi=9.0)


def test_critical_value_detects_win_low_lose_high():
    from corebench import DeterministicOutcome

    class PocketAuction:
        # wins everywhere except a pocket in the middle of the bid range
        name = "pocket-toy"

        def run(self, profile):
            bid = float(profile.input_texts()[0])
            if 1.0 < bid < 2.0:
                return DeterministicOutcome((), {})
            return DeterministicOutcome((0,), {0: 0.0})

    profile = TextImageProfile(2, [0.5, 0.2], [0.1])
    with pytest.raises(MonotonicityError):
        critical_value(PocketAuction(), profile, 0, hi=4.0)


# -- monotonicity ----------------------------------------------------------------------


def test_mechanisms_monotone_on_random_profiles():
    for profile in random_profiles(seed=2, count=40):
        grid = deviation_grid(profile, 12)
        for mech in (DET, RAND):
            for agent in range(profile.n_agents):
                assert check_monotone(mech, profile, agent, grid)


def test_window_toy_not_monotone():
    profile = TextImageProfile(2, [1.5, 0.2], [0.1])
    assert not check_monotone(WindowAuction(), profile, 0, np.linspace(0, 4, 33))


def test_constant_allocation_is_monotone():
    profile = TextImageProfile(2, [1.5, 0.2], [0.1])
    assert check_monotone(PostedZeroAuction(), profile, 0, np.linspace(0, 4, 17))


def test_monotone_rejects_unsorted_grid():
    profile = TextImageProfile(2, [1.5, 0.2], [0.1])
    with pytest.raises(InputError):
        check_monotone(DET, profile, 0, [1.0, 0.5])


# -- incentive compatibility -------------------------------------------------------------


def test_auctions_have_no_ic_violations():
    for index, profile in enumerate(random_profiles(seed=4, count=60)):
        for mech in (DET, RAND):
            assert find_ic_violations(mech, profile) == [], (index, mech.name)


def test_first_price_toy_is_caught():
    violations = []
    for profile in random_profiles(seed=5, count=20):
        violations.extend(find_ic_violations(FirstPriceAuction(), profile))
    assert violations
    v = violations[0]
    assert v.utility_gain > 0
    assert set(v.to_dict()) == {"agent", "trueValue", "deviation", "utilityGain"}


def test_ic_uses_expected_payments_for_lottery():
    profile = TextImageProfile(16, [1.0 / i for i in range(1, 17)], [2.5, 2.4])
    assert find_ic_violations(RAND, profile) == []


# -- anonymity ----------------------------------------------------------------------------


def test_auctions_anonymous():
    for index, profile in enumerate(random_profiles(seed=6, count=30)):
        assert check_anonymity(DET, profile, permutation_seed=index)
        assert check_anonymity(RAND, profile, permutation_seed=index)


def test_identity_permutation_trivially_passes():
    profile = TextImageProfile(2, [1.0, 2.0], [0.5])
    rng_seed = 12  # whatever the permutation, comparing a profile to itself holds
    assert check_anonymity(DET, profile, rng_seed)


def test_positional_toy_fails_anonymity():
    profile = TextImageProfile(2, [1.0, 2.0], [0.5])
    failed = any(not check_anonymity(PositionalAuction(), profile, s) for s in range(8))
    assert failed


# -- competitive ratio ---------------------------------------------------------------------


def test_ratio_deterministic_harmonic_example():
    record = competitive_ratio(DET, TextImageProfile(4, [1, 0.5, 1 / 3, 0.25], [1.0]))
    assert record.core_revenue == 1.0
    assert record.mechanism_revenue == pytest.approx(1.0 / math.sqrt(math.log(4)), abs=1e-12)
    assert record.ratio == pytest.approx(math.sqrt(math.log(4)), abs=1e-9)
    assert record.ratio <= 2.0 * math.sqrt(math.log(4))


def test_ratio_zero_benchmark_convention():
    record = competitive_ratio(DET, TextImageProfile(2, [0.0], [0.0]))
    assert record.core_revenue == 0.0
    assert record.ratio == 1.0


def test_ratio_infinite_when_revenue_zero():
    record = competitive_ratio(PostedZeroAuction(), TextImageProfile(2, [1.0, 1.0], [1.0]))
    assert record.core_revenue == 1.0
    assert math.isinf(record.ratio)


def test_ratio_randomized_lottery_example():
    record = competitive_ratio(RAND, TextImageProfile(16, [1.0 / i for i in range(1, 17)], [2.5]))
    assert record.core_revenue == 2.5
    assert record.ratio <= 1.36
    assert record.ratio <= max(2.0, 1.43 * math.log(math.log(16)))


def test_ratio_record_wire_format():
    record = competitive_ratio(DET, TextImageProfile(2, [1.0, 1.0], [1.0]))
    assert set(record.to_dict()) == {"coreRev", "revenue", "ratio"}


# -- the CLI-facing suite ---------------------------------------------------------------------


def test_suite_clean_for_both_auctions():
    report = verification_suite(DET, trials=25, seed=1)
    assert report["clean"], report
    report = verification_suite(RAND, trials=25, seed=1)
    assert report["clean"], report


def test_suite_flags_first_price():
    report = verification_suite(FirstPriceAuction(), trials=10, seed=1)
    assert not report["clean"]
    assert report["icViolations"]


def test_suite_flags_window_toy():
    report = verification_suite(WindowAuction(), trials=12, seed=1)
    assert not report["clean"]
    assert report["nonMonotone"]


def test_get_mechanism_rejects_unknown():
    with pytest.raises(InputError):
        get_mechanism("nope")
