import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dualdcc import analysis
from dualdcc.core import DccParams, DomainError
from dualdcc.engine import run
from dualdcc.metrics import jain_index, merge_metrics, time_below_target, time_to_band
from dualdcc.scenarios import GroupSpec, ScenarioSpec, cold_start_scenario, merge_scenario

P = DccParams()

positive = st.floats(1e-6, 1.0, allow_nan=False)


def test_jain_examples():
    assert jain_index([0.01] * 4) == 1.0
    assert jain_index([1.0, 1.0, 2.0]) == pytest.approx(16 / 18)
    assert jain_index([0.003, 0.003, 0.006]) == pytest.approx(16 / 18)


@pytest.mark.parametrize("bad", [[], [0.0, 1.0], [-0.1, 0.2]])
def test_jain_domain(bad):
    with pytest.raises(DomainError):
        jain_index(bad)


@settings(max_examples=1000)
@given(st.lists(positive, min_size=1, max_size=50), st.floats(1e-3, 1e3))
def test_jain_scale_invariant(values, c):
    assert jain_index([c * v for v in values]) == pytest.approx(jain_index(values), rel=1e-9)


@settings(max_examples=500)
@given(st.lists(positive, min_size=1, max_size=50))
def test_jain_bounds(values):
    j = jain_index(values)
    assert 1 / len(values) - 1e-12 <= j <= 1.0
    if len(set(values)) == 1:
        assert j == 1.0


def test_jain_approaches_lower_bound_with_one_dominant_station():
    assert jain_index([1.0] + [1e-9] * 9) == pytest.approx(0.1, rel=1e-6)


def test_time_below_target_examples():
    cold = run(cold_start_scenario(300))
    assert time_below_target(cold) == pytest.approx(12.2)
    assert time_below_target(cold, signal="raw") == pytest.approx(11.8)

    low = run(ScenarioSpec((GroupSpec(10, 0.01),), duration=5.0))
    assert time_below_target(low, signal="raw") == 0.0
    assert time_below_target(low) == pytest.approx(0.2)  # first smoothed value exists at 0.2 s

    overload = run(cold_start_scenario(1200, duration=60.0))
    assert time_below_target(overload) is None
    assert time_below_target(overload, signal="raw") is None


def test_time_below_target_from_offset():
    series = run(merge_scenario(25, 300, merge_time=30.0, duration=45.0))
    t = time_below_target(series, from_t=30.0, signal="raw")
    assert t is not None and t >= 0
    assert time_below_target(series, from_t=30.0) is not None


def test_time_below_target_bad_signal():
    with pytest.raises(DomainError):
        time_below_target(run(cold_start_scenario(5), duration=1.0), signal="mean")


def test_time_to_band_examples():
    big = run(merge_scenario(25, 1100))
    center = analysis.classify_convergence(1125, P).delta_conv
    assert center == P.delta_min
    assert time_to_band(big, 1, center, 0.1) == 0.0

    at_center = analysis.conv_value(300, P)
    flat = run(ScenarioSpec((GroupSpec(300, at_center),), duration=3.0))
    assert time_to_band(flat, 0, at_center, 0.1) == 0.0

    dual = run(merge_scenario(25, 300, algorithm="dual"))
    center = analysis.classify_convergence(325, P).delta_conv
    assert time_to_band(dual, 1, center, 0.1) == pytest.approx(3.8)


def test_time_to_band_whole_range_is_zero():
    series = run(merge_scenario(25, 500))
    assert time_to_band(series, 1, P.delta_max, band=1.0) == 0.0
    assert time_to_band(series, 0, P.delta_max, band=1.0) == 0.0


def test_time_to_band_requires_dwell():
    # the 300-group starts within 10% of the merged value but leaves it again
    series = run(merge_scenario(25, 300))
    center = analysis.classify_convergence(325, P).delta_conv
    assert time_to_band(series, 1, center, 0.1, dwell=0.0) == 0.0
    assert time_to_band(series, 1, center, 0.1) == pytest.approx(22.2)


def test_time_to_band_errors():
    series = run(merge_scenario(25, 100), duration=1.0)
    with pytest.raises(DomainError):
        time_to_band(series, 2, 0.001)
    with pytest.raises(DomainError):
        time_to_band(series, 0, 0.001, band=0.0)


def test_time_to_band_not_reached():
    series = run(merge_scenario(25, 100), duration=2.0)
    assert time_to_band(series, 1, 0.02, 0.01) is None


def test_merge_metrics_etsi_100():
    m = merge_metrics(run(merge_scenario(25, 100)))
    assert m.jain_at == pytest.approx(0.846, abs=1e-3)
    assert m.t_conv == pytest.approx(19.4)
    assert m.t_below_target == pytest.approx(2.4)


def test_rate_ratio_ten_seconds_after_merge():
    # the larger group's share relative to the smaller group's, 10 s after the merge
    etsi = run(merge_scenario(25, 100)).at(10.0).groups
    dual = run(merge_scenario(25, 100, algorithm="dual")).at(10.0).groups
    assert etsi[1].mean / etsi[0].mean == pytest.approx(0.42, abs=0.005)
    assert dual[1].mean / dual[0].mean == pytest.approx(0.91, abs=0.005)
