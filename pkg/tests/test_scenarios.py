import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dualdcc.analysis import conv_value
from dualdcc.core import ConfigError, DccParams, DualAlphaParams
from dualdcc.engine import run
from dualdcc.scenarios import (
    CONVERGED,
    GroupSpec,
    ScenarioSpec,
    builtin,
    cold_start_scenario,
    designated_group,
    dump,
    from_dict,
    load,
    merge_scenario,
    resolve,
    to_dict,
)

P = DccParams()


def test_cold_start_examples():
    s = cold_start_scenario(300)
    assert s.groups == (GroupSpec(300, 0.03, 0.0),)
    one = cold_start_scenario(1)
    assert one.groups[0].count == 1
    assert run(one, duration=60.0).records[-1].groups[0].mean == P.delta_max
    assert cold_start_scenario(1100).groups[0].count == 1100


def test_merge_examples():
    s = resolve(merge_scenario(25, 100))
    assert s.groups[0].count == 25 and s.groups[1].count == 100
    assert round(s.groups[0].initial_delta, 4) == 0.0177
    # 0.0012 * 0.68 / (0.016 + 100 * 0.0012) = 0.000816 / 0.136
    assert s.groups[1].initial_delta == pytest.approx(0.006, rel=1e-12)
    s = resolve(merge_scenario(25, 1100))
    assert s.groups[1].initial_delta == pytest.approx(0.000611, rel=1e-3)


def test_equal_merge_is_fair_throughout():
    series = run(merge_scenario(40, 40))
    assert all(r.jain == 1.0 for r in series.records)


def test_merge_time_moves_small_group():
    s = merge_scenario(25, 300, merge_time=30.0)
    assert s.groups[0].join_time == 30.0 and s.groups[1].join_time == 0.0
    assert s.merge_time == 30.0
    assert merge_scenario(25, 300).merge_time == 0.0


def test_designated_group():
    assert designated_group(merge_scenario(25, 300)) == 1
    assert designated_group(merge_scenario(300, 25)) == 0
    assert designated_group(merge_scenario(40, 40)) == 0


def test_resolve_clamps_and_warns():
    spec = ScenarioSpec((GroupSpec(1, CONVERGED),))
    with pytest.warns(UserWarning, match="clamped"):
        r = resolve(spec)
    assert r.groups[0].initial_delta == P.delta_max
    with pytest.warns(UserWarning):
        r = resolve(ScenarioSpec((GroupSpec(1500, CONVERGED),)))
    assert r.groups[0].initial_delta == P.delta_min


def test_resolve_rejects_explicit_out_of_bounds():
    with pytest.raises(ConfigError):
        resolve(ScenarioSpec((GroupSpec(3, 0.05),)))


def test_resolve_uses_overridden_params():
    spec = ScenarioSpec((GroupSpec(25, CONVERGED),), params={"alpha": 0.1})
    assert resolve(spec).groups[0].initial_delta == pytest.approx(conv_value(25, P.with_alpha(0.1)))


@pytest.mark.filterwarnings("ignore:group")
@given(st.lists(st.integers(2, 1100), min_size=1, max_size=4))
def test_resolve_idempotent(counts):
    spec = ScenarioSpec(tuple(GroupSpec(c, CONVERGED) for c in counts))
    once = resolve(spec)
    assert resolve(once) == once


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(groups=(GroupSpec(0, 0.01),)),
        dict(groups=(GroupSpec(2.5, 0.01),)),
        dict(groups=(GroupSpec(True, 0.01),)),
        dict(groups=(GroupSpec(2, "max"),)),
        dict(groups=(GroupSpec(2, 0.01, -1.0),)),
        dict(groups=(GroupSpec(2, 0.01),), duration=0),
        dict(groups=(GroupSpec(2, 0.01),), algorithm="limeric"),
        dict(groups=(GroupSpec(2, 0.01),), params={"gamma": 1.0}),
        dict(groups=(GroupSpec(2, 0.01),), params={"alpha": 2.0}),
        dict(groups=(GroupSpec(2, 0.01),), params={"alpha_high": 0.01}),
    ],
)
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        ScenarioSpec(**kwargs)


def test_params_split_between_dcc_and_dual():
    spec = ScenarioSpec((GroupSpec(2, 0.01),), algorithm="dual", params={"beta": 0.002, "th": 0.0})
    assert spec.dcc_params() == DccParams(beta=0.002)
    assert spec.variant() == DualAlphaParams(th=0.0)


def test_json_round_trip(tmp_path):
    spec = merge_scenario(25, 300, merge_time=30.0, algorithm="dual")
    path = tmp_path / "s.json"
    dump(spec, path)
    assert load(path) == spec
    doc = json.loads(path.read_text())
    assert doc["groups"][0] == {"count": 25, "initial_delta": "converged", "join_time": 30.0}


@pytest.mark.parametrize(
    "doc",
    [
        {"groups": [{"count": 3, "initial_delta": 0.01}], "colour": "red"},
        {"groups": [{"count": 3, "initial_delta": 0.01, "speed": 3}]},
        {"groups": [{"count": 3.0, "initial_delta": 0.01}]},
        {"groups": [{"initial_delta": 0.01}]},
        {"groups": "none"},
        {"groups": [{"count": 3, "initial_delta": 0.01}], "params": [1]},
        [],
    ],
)
def test_json_rejects(doc):
    with pytest.raises(ConfigError):
        from_dict(doc)


def test_load_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ConfigError):
        load(path)


def test_defaults_in_file_format():
    spec = from_dict({"groups": [{"count": 3, "initial_delta": 0.01}]})
    assert spec.duration == 40.0 and spec.algorithm == "etsi" and spec.groups[0].join_time == 0.0
    assert to_dict(spec)["params"] == {}


def test_builtins():
    assert builtin("cold300") == cold_start_scenario(300)
    assert builtin("merge25x100") == merge_scenario(25, 100)
    with pytest.raises(ConfigError):
        builtin("warm300")
