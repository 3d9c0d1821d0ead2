import json
import os
import pathlib

import pytest

import energy_concierge as ec

FIXTURES = pathlib.Path(os.environ.get("EC_FIXTURES_DIR", pathlib.Path(__file__).resolve().parents[2] / "fixtures"))


def fixture_json(rel):
    return json.loads((FIXTURES / rel).read_text())


def test_schemas_cover_six_kinds():
    kinds = [s["kind"] for s in ec.schemas()]
    assert kinds == ["ev_charging", "hvac", "battery_dispatch", "pv_sizing", "heat_pump", "battery_sizing"]


def test_pv_direct_solve():
    out = ec.solve("pv_sizing", fixture_json("params/pv.json"))
    assert out["status"] == "optimal"
    report = {r["key"]: r["value"] for r in out["report"]}
    assert report["panel_area"] == pytest.approx(300.0, abs=1e-6)
    assert report["annual_savings"] == pytest.approx(405.6, abs=1e-6)


def test_ev_solution_matches_oracle():
    params = ec.reference_params("ev_charging")
    out = ec.solve("ev_charging", params)
    assert out["objective"] == pytest.approx(4.2, abs=1e-6)
    assert ec.oracle("ev_charging", params)["objective"] == pytest.approx(4.2, abs=1e-9)
    assert out["variables"][0]["values"][:4] == pytest.approx([0, 0, 0, 0], abs=1e-9)


def test_golden_document_round_trip():
    params = ec.reference_params("hvac")
    doc = ec.golden_document("hvac", params)
    assert ec.format_document(doc) == ec.format_document(ec.format_document(doc))
    assert ec.solve_document(doc)["objective"] == pytest.approx(9.6, abs=1e-9)
    assert ec.compile(doc)["variables"]


def test_dsl_errors_carry_category_and_span():
    text = (FIXTURES / "dsl" / "broken_syntax.ecdsl").read_text()
    with pytest.raises(ec.EcError) as info:
        ec.compile(text)
    code, _message, category, line, column = info.value.args
    assert (code, category, line, column) == ("UnexpectedToken", "Syntactic", 4, 1)


def test_validation_error_is_raised():
    params = fixture_json("params/batsize.json")
    params["efficiency"] = 1.3
    with pytest.raises(ec.EcError) as info:
        ec.solve("battery_sizing", params)
    assert info.value.args[0] == "ValidationFailed"
    with pytest.raises(ec.EcError):
        ec.solve("toaster", {})


def test_estimators():
    for p in (0.8, 0.25, 0.38, 0.53, 0.83):
        assert ec.estimate_p(ec.expected_generations(p)) == pytest.approx(p, abs=1e-6)
    assert ec.estimate_q([1, 0, 0, 0, 0]) == 1.0
    assert ec.optimality_gap(4.62, 4.2) == pytest.approx(0.1)
    assert ec.improvement_over_baseline(1.3, 1.0) == pytest.approx(0.3)
    assert ec.battery_sizing_closed_form(10.0, 0.25, 2.0, 30.0, 10.0, 0.95) == pytest.approx(8.66875, abs=1e-9)


def test_scripted_conversation():
    script = fixture_json("scripts/ev_chat.json")
    conv = ec.Conversation(script)
    for turn in script["user"][:2]:
        reply = conv.send(turn)
    assert conv.phase == "done"
    assert "$4.20" in reply
    session = conv.session(canonical=True)
    assert session["phase"] == "done"


def test_benchmark_golden():
    csv, records, estimates = ec.run_benchmark(str(FIXTURES / "scripts" / "golden.json"), ["ev_charging"], n=3)
    assert csv.splitlines()[1].startswith("ev_charging,3,1.0000,1.0000")
    assert len(records) == 3
    assert estimates["p_hat"] == 1.0
