import math
import os
from pathlib import Path

import numpy as np
import pytest

import asynet

SCENARIOS = Path(os.environ.get("ASYNET_SCENARIOS", Path(__file__).resolve().parents[2] / "scenarios"))


def test_models_listed():
    names = {m["name"] for m in asynet.list_models()}
    assert {"trains", "powergrid", "blinking_pair"} <= names


def test_trains_arrive_at_three():
    out = asynet.run_model("trains")
    assert out["status"] == "reached_termination"
    assert out["final_state"]["t"] == pytest.approx(3.0, abs=1e-6)
    assert out["x"].shape == (len(out["t"]), 2)
    assert out["labels"] == ["T1", "T2"]
    first = out["events"][:2]
    assert [e["to"] for e in first] == ["beta", "empty"]
    assert [e["t"] for e in first] == pytest.approx([1.0, 2.0], abs=1e-9)


def test_params_override_schedule():
    out = asynet.run_model("trains", {"S": 0.5, "S1": 2.0, "S2": 0.2})
    assert out["final_state"]["t"] == pytest.approx(4.0, abs=1e-6)


def test_unknown_param_raises():
    with pytest.raises(ValueError, match="undeclared parameter"):
        asynet.run_model("trains", {"nope": 1.0})


def test_zeno_reported():
    out = asynet.run_model("zeno_spiral", t_max=20)
    assert out["error"] == "ZenoDetected"
    assert 9.9 < out["final_state"]["t"] < 10.0


def test_scenario_files_round_trip():
    files = sorted(SCENARIOS.glob("*.json"))
    assert files
    for f in files:
        s = asynet.load_scenario(str(f))
        again = asynet.parse_scenario(s.to_json())
        assert again.to_json() == s.to_json()


def test_stochastic_seeded():
    s = asynet.load_scenario(str(SCENARIOS / "blinking_stochastic.json"))
    a, b = s.run(seed=5), s.run(seed=5)
    assert np.array_equal(a["x"], b["x"])
    assert len(a["events"]) == len(b["events"])


def test_checks_and_decomposition():
    rep = asynet.check("trains", samples=500)
    assert rep["problems"] == []
    assert all(not v for v in rep["admissibility"].values())
    assert rep["regular"]
    dec = asynet.decompose("trains_product", samples=500)
    assert dec["decomposed"]
    assert len(dec["partition"]) == 2


def test_filippov_agreement():
    res = asynet.compare_filippov(x1=-0.5, x2=0.6)
    assert res["pass"]
    assert res["sup_deviation"] < 1e-6


def test_powergrid_decay():
    out = asynet.run_model("powergrid", t_max=30)
    theta1, omega1, theta2, omega2 = out["x"][-1]
    assert abs(omega1) < 1e-5 and abs(omega2) < 1e-5
    # locked angle difference solves sin(d) = P / k
    assert math.sin(theta1 - theta2) == pytest.approx(0.5, abs=1e-5)
    assert out["events"] == []
