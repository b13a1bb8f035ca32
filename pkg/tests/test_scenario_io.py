import json

import pytest
from hypothesis import given, settings, strategies as st

from drgame.errors import ScenarioError
from drgame.presets import BUILTINS, builtin_scenario
from drgame.scenario_io import load_scenario, save_scenario, scenario_from_dict, scenario_to_dict
from scenarios import TWO_PROGRAMS, make_scenario


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_preset_round_trip(name):
    s = builtin_scenario(name)
    text = save_scenario(s)
    again = load_scenario(text)
    assert again == s
    assert save_scenario(again) == text


def test_save_is_canonical(tmp_path):
    s = make_scenario(TWO_PROGRAMS, grid=(("off-peak", 1.0), ("peak", 0.5)))
    path = tmp_path / "s.json"
    path.write_text(save_scenario(s))
    assert load_scenario(path) == s
    assert load_scenario(str(path)) == s
    assert save_scenario(load_scenario(path)) == path.read_text()


def test_published_parameters_survive():
    doc = json.loads(save_scenario(builtin_scenario("ieee34-s1")))
    business = next(p for p in doc["programs"] if p["id"] == "business")
    assert [e["willingness"] for e in business["eus"]] == [0.03, 0.05, 0.08, 0.1, 0.12, 0.15, 0.17]
    assert doc["utility"]["c1"] == -1088.2 and doc["utility"]["c2"] == 0.2024
    assert "NaN" not in save_scenario(builtin_scenario("ieee69-s2"))


def test_ieee69_layout():
    s = builtin_scenario("ieee69-s1")
    assert s.eu("50").base_load[0] == 384.7
    ids = {e.id for e in s.eus}
    assert not ids & {"30", "31", "32", "38", "42", "44", "47"}
    assert len(ids) == 16


@pytest.mark.parametrize("feeder, changed", [("ieee34", {"18", "30"}), ("ieee69", {"34", "36", "50"})])
def test_pairs_differ_only_in_willingness(feeder, changed):
    s1, s2 = builtin_scenario(f"{feeder}-s1"), builtin_scenario(f"{feeder}-s2")
    assert s1.programs == s2.programs
    assert s1.utility == s2.utility and s1.algorithm == s2.algorithm
    diff = {a.id for a, b in zip(s1.eus, s2.eus) if a != b}
    assert diff == changed
    for a, b in zip(s1.eus, s2.eus):
        assert a.base_load == b.base_load


def _doc():
    return scenario_to_dict(make_scenario(TWO_PROGRAMS))


def test_missing_key_named():
    doc = _doc()
    del doc["programs"][1]["retail_rate"]
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(doc)
    assert any("'retail_rate'" in i and "p2" in i for i in info.value.issues)


def test_all_schema_issues_collected():
    doc = _doc()
    doc["schema_version"] = 7
    doc["extra"] = 1
    doc["programs"][0]["eus"][0]["willingness"] = "high"
    doc["time_grid"][0]["label"] = "noon"
    with pytest.raises(ScenarioError) as info:
        scenario_from_dict(doc)
    text = "\n".join(info.value.issues)
    assert len(info.value.issues) >= 4
    for fragment in ("schema_version", "'extra'", "willingness", "noon"):
        assert fragment in text
    assert "schema_version" in str(info.value)


def test_syntax_error_position():
    with pytest.raises(ScenarioError) as info:
        load_scenario('{\n  "name": "x",\n  oops\n}')
    assert "line 3" in str(info.value)


@pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity"])
def test_nonfinite_tokens_rejected(token):
    text = save_scenario(make_scenario(TWO_PROGRAMS)).replace('"willingness": 0.1', f'"willingness": {token}', 1)
    with pytest.raises(ScenarioError):
        load_scenario(text)


def test_domain_issues_reported_on_load():
    s = builtin_scenario("ieee34-s1").replace_willingness({"20": 1.3})
    text = save_scenario(s)
    with pytest.raises(ScenarioError) as info:
        load_scenario(text)
    assert any("EU 20" in i for i in info.value.issues)
    assert load_scenario(text, validate=False).eu("20").willingness == 1.3


def test_unreadable_and_unknown_builtin(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")
    with pytest.raises(ScenarioError):
        load_scenario("builtin:nowhere")


def test_save_rejects_nan():
    s = make_scenario(TWO_PROGRAMS).replace_willingness({"a": float("nan")})
    with pytest.raises(ValueError):
        save_scenario(s)


finite = st.floats(0.0, 1e6, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(finite, st.floats(0.0, 1.0), finite, st.floats(1e-6, 24.0))
def test_round_trip_property(base, alpha, rate, hours):
    s = make_scenario(
        {"p1": [("x", base, alpha)]}, rates={"p1": (rate,)}, grid=(("super-off-peak", hours),)
    )
    assert load_scenario(save_scenario(s), validate=False) == s
