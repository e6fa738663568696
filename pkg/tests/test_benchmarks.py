import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corebench import (
    BenchmarkReport,
    CapExceededError,
    DeterministicOutcome,
    GenericEnvironment,
    InputError,
    InvariantError,
    TextImageProfile,
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
from conftest import random_downward_closed_env, random_small_profile


# -- harmonic ----------------------------------------------------------------------


def test_harmonic_small_values():
    assert harmonic_number(1) == 1.0
    assert harmonic_number(2) == 1.5
    assert harmonic_number(4) == pytest.approx(25.0 / 12.0, abs=1e-12)


def test_harmonic_rejects_zero():
    with pytest.raises(InputError):
        harmonic_number(0)


# -- best uniform text revenue ------------------------------------------------------


def test_uniform_text_revenue_examples():
    assert max_uniform_text_revenue(TextImageProfile(4, [1, 0.5, 1 / 3, 0.25], [])) == 1.0
    assert max_uniform_text_revenue(TextImageProfile(3, [0, 0, 0], [])) == 0.0
    # enumerate j*v_j = 5, 6, 3 -> 6
    assert max_uniform_text_revenue(TextImageProfile(3, [5, 3, 1], [])) == 6.0
    # only the first k texts count
    assert max_uniform_text_revenue(TextImageProfile(1, [5, 3, 1], [])) == 5.0


@settings(max_examples=60)
@given(
    st.integers(1, 8),
    st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=10),
)
def test_uniform_price_within_harmonic_factor_of_block(k, texts):
    profile = TextImageProfile(k, texts, [])
    phi = max_uniform_text_revenue(profile)
    assert phi >= profile.top_text_sum() / harmonic_number(k) - 1e-9


# -- core revenue closed form -------------------------------------------------------


def test_core_revenue_closed_form_examples():
    assert core_revenue_text_image(TextImageProfile(2, [1, 1], [1])) == 1.0
    h4 = harmonic_number(4)
    assert core_revenue_text_image(
        TextImageProfile(4, [1, 0.5, 1 / 3, 0.25], [h4])
    ) == pytest.approx(h4, abs=1e-12)
    # image side: second image price beats the empty text block
    assert core_revenue_text_image(TextImageProfile(2, [0, 0, 0], [5, 3])) == 3.0


def test_core_revenue_boundary_takes_text_branch():
    # both branches agree when the text block exactly matches the image
    p = TextImageProfile(2, [1.5, 0.5], [2.0])
    assert core_revenue_text_image(p) == 2.0
    assert max(p.image_at(1), p.top_text_sum()) == 2.0


def test_core_revenue_uses_k_plus_one_text_price():
    # texts (5,4,3), k=2: block 9 >= image 1 -> max(2*3, 1) = 6
    assert core_revenue_text_image(TextImageProfile(2, [5, 4, 3], [1])) == 6.0


# -- LP oracle -----------------------------------------------------------------------


def test_core_revenue_exact_am(am_env):
    assert core_revenue_exact(am_env) == 1.0  # exact, not approximate


def test_core_revenue_exact_multi_unit():
    env = GenericEnvironment.multi_unit([5, 4, 3, 1], 2)
    assert core_revenue_exact(env) == pytest.approx(6.0, abs=1e-12)


def test_core_revenue_exact_nothing_allocatable():
    assert core_revenue_exact(GenericEnvironment([3.0], [()])) == 0.0


def test_core_revenue_exact_cap():
    env = GenericEnvironment([1.0] * 15, [()])
    with pytest.raises(CapExceededError):
        core_revenue_exact(env)
    assert core_revenue_exact(env, cap=15) == 0.0


# -- VCG -----------------------------------------------------------------------------


def test_vcg_am_charges_zero(am_env):
    out = vcg_outcome(am_env)
    assert sorted(out.winners) == [0, 1]
    assert out.revenue == 0.0


def test_vcg_multi_unit_k_plus_one_price():
    out = vcg_outcome(GenericEnvironment.multi_unit([5, 4, 3, 1], 2))
    assert sorted(out.winners) == [0, 1]
    assert out.payments == {0: 3.0, 1: 3.0}


def test_vcg_single_agent_pays_nothing():
    out = vcg_outcome(GenericEnvironment([7.0], [(), (0,)]))
    assert sorted(out.winners) == [0]
    assert out.revenue == 0.0


def test_vcg_tie_breaks_to_lexicographically_smallest():
    env = GenericEnvironment([1.0, 1.0], [(), (0,), (1,)])
    assert sorted(vcg_outcome(env).winners) == [0]


# -- MV benchmark --------------------------------------------------------------------


def test_mv_digital_goods():
    env = GenericEnvironment.digital_goods([3, 2, 1])
    assert mv_benchmark(env) == 3.0  # everything except the top agent


def test_mv_single_agent():
    assert mv_benchmark(GenericEnvironment([7.0], [(), (0,)])) == 0.0


def test_mv_am_instance(am_env):
    # best feasible set avoiding the (tie-broken lowest-index) top agent
    assert mv_benchmark(am_env) == 1.0


# -- core membership -----------------------------------------------------------------


def test_vcg_outcome_blocked_on_am(am_env):
    result = is_core_outcome(am_env, DeterministicOutcome((0, 1), {0: 0.0, 1: 0.0}))
    assert not result.is_core
    assert result.blocking_coalition == (2,)
    assert result.margin == pytest.approx(1.0, abs=1e-12)


def test_half_half_is_core_on_am(am_env):
    result = is_core_outcome(am_env, DeterministicOutcome((0, 1), {0: 0.5, 1: 0.5}))
    assert result.is_core


def test_empty_outcome_core_when_values_zero():
    env = GenericEnvironment([0.0, 0.0], [(), (0,), (1,)])
    assert is_core_outcome(env, DeterministicOutcome((), {})).is_core


def test_overpaying_winner_is_blocked(am_env):
    result = is_core_outcome(am_env, DeterministicOutcome((0, 1), {0: 1.5, 1: 0.5}))
    assert not result.is_core
    assert result.blocking_coalition == (0,)


def test_infeasible_outcome_rejected(am_env):
    with pytest.raises(InputError):
        is_core_outcome(am_env, DeterministicOutcome((1, 2), {}))


def test_core_implies_efficiency_on_random_instances():
    rng = np.random.default_rng(5)
    checked = 0
    for _ in range(60):
        env = random_downward_closed_env(rng)
        best = env.max_welfare_set()
        outcome = DeterministicOutcome(best, {i: env.values[i] for i in best})
        result = is_core_outcome(env, outcome)  # seller-takes-all is always core
        assert result.is_core
        checked += 1
    assert checked == 60


# -- profile -> explicit environment ---------------------------------------------------


def test_environment_encoding_counts():
    env = text_image_environment(TextImageProfile(2, [1.0, 1.0], [1.0]))
    assert len(env.feasible) == 5
    env = text_image_environment(TextImageProfile(1, [1.0], [1.0]))
    assert set(env.feasible) == {(), (0,), (1,)}
    env = text_image_environment(TextImageProfile(2, [1.0, 1.0, 1.0], []))
    assert len(env.feasible) == 7


def test_environment_encoding_respects_cap():
    profile = TextImageProfile(2, [1.0] * 14, [1.0])
    with pytest.raises(CapExceededError):
        text_image_environment(profile)
    assert text_image_environment(profile, cap=15).n == 15


def test_closed_form_matches_oracle_on_random_profiles():
    rng = np.random.default_rng(42)
    for _ in range(60):
        profile = random_small_profile(rng)
        closed = core_revenue_text_image(profile)
        oracle = core_revenue_exact(text_image_environment(profile))
        assert closed == pytest.approx(oracle, abs=1e-9)


# -- benchmark chain -------------------------------------------------------------------


def test_chain_on_random_environments():
    rng = np.random.default_rng(9)
    for _ in range(40):
        env = random_downward_closed_env(rng)
        report = benchmark_report(env)  # constructor asserts mv >= core >= vcg >= 0
        assert report.mv_revenue >= report.core_revenue - 1e-9
        assert report.core_revenue >= report.vcg_revenue - 1e-9
        assert report.vcg_revenue >= -1e-9


def test_benchmark_report_wire_format(am_env):
    report = benchmark_report(am_env)
    data = report.to_dict()
    assert data["coreRev"] == 1.0
    assert data["vcgRev"] == 0.0
    assert data["mvRev"] == 1.0
    assert data["notes"]["coreRev"] == "lp-oracle"


def test_benchmark_report_profile_routes():
    profile = TextImageProfile(2, [1.0, 1.0], [1.0])
    closed = benchmark_report(profile)
    oracle = benchmark_report(profile, use_oracle=True)
    assert closed.notes["coreRev"] == "closed-form"
    assert oracle.notes["coreRev"] == "lp-oracle"
    assert closed.core_revenue == pytest.approx(oracle.core_revenue, abs=1e-12)


def test_benchmark_report_rejects_broken_chain():
    with pytest.raises(InvariantError):
        BenchmarkReport(core_revenue=2.0, vcg_revenue=0.0, mv_revenue=1.0)


# -- environment type ------------------------------------------------------------------


def test_environment_validation():
    with pytest.raises(InputError):
        GenericEnvironment([1.0], [(0, 1)])  # index out of range
    with pytest.raises(InputError):
        GenericEnvironment([1.0, 1.0], [(0, 1)], downward_closed=True)  # not closed
    env = GenericEnvironment([1.0], [(0,)])
    assert () in env.feasible  # empty set always present


def test_environment_json_round_trip(am_env):
    clone = GenericEnvironment.from_dict(am_env.to_dict())
    assert clone == am_env
