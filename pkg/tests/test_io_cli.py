import json
import math

import numpy as np
import pytest

from hilbertkit import io as hio
from hilbertkit.bodies import box, regular_polygon, unit_ball
from hilbertkit.cli import EXIT_COMPUTE, EXIT_CONFIG, EXIT_OK, EXIT_PROBE, RunConfig, run
from hilbertkit.errors import BadSpec, ConfigError
from hilbertkit.metric import hilbert_distance
from hilbertkit.omegaf import StepFunctionSpec


@pytest.mark.parametrize("body", [unit_ball(2), box([1.0, 2.0]), regular_polygon(5)], ids=["disk", "box", "pentagon"])
def test_body_roundtrip(body):
    d = json.loads(hio.dumps(hio.body_to_dict(body)))
    b2 = hio.body_from_dict(d)
    x, y = np.array([0.1, 0.2]), np.array([-0.3, 0.1])
    assert hilbert_distance(b2, x, y) == hilbert_distance(body, x, y)


def test_body_errors():
    with pytest.raises(ConfigError):
        hio.body_from_dict({"builtin": "nope"})
    with pytest.raises(ConfigError):
        hio.body_from_dict({"kind": "ellipsoid", "chart": [0, 0, 1], "center": [0, 0], "shape": [[1, 0], [0, 1]],
                            "extra": 1})
    with pytest.raises(ConfigError):
        hio.body_from_dict({"schema": "other/9", "kind": "hull", "chart": [0, 0, 1], "points": []})


def test_spec_unknown_keys():
    with pytest.raises(BadSpec):
        StepFunctionSpec.from_dict({"values": [1.0], "colour": "red"})


def test_json_infinity_and_floats():
    text = hio.dumps({"a": math.inf, "b": 0.1, "c": np.float64(1 / 3)})
    d = json.loads(text)
    assert d["a"] == "inf" and d["b"] == 0.1 and d["c"] == 1 / 3


def test_csv_header_and_readback():
    text = hio.csv_text(["x0", "x1"], [[0.1, 2.0], [math.inf, -1.5]], {"command": "t"})
    assert text.startswith("# config: ")
    P = hio.read_csv_points(text)
    assert P.shape == (2, 2) and math.isinf(P[1, 0])


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("distance", {"bogus": 1})
    with pytest.raises(ConfigError):
        RunConfig("verify-facts", {"tol": -1.0})
    with pytest.raises(ConfigError):
        RunConfig("nope")


def test_distance_command(capsys):
    assert run(["distance"]) == EXIT_OK
    assert float(capsys.readouterr().out) == pytest.approx(0.5 * math.log(3), rel=1e-15)


def test_exit_codes(tmp_path):
    assert run(["distance", "--x", "2,0"]) == EXIT_COMPUTE
    assert run(["distance", "--bogus", "1"]) == EXIT_CONFIG
    assert run(["distance", "--body", "no-such-body"]) == EXIT_CONFIG
    bad = tmp_path / "cfg.json"
    bad.write_text(json.dumps({"command": "distance", "params": {"whatever": 1}}))
    assert run(["distance", "--config", str(bad)]) == EXIT_CONFIG
    assert run(["grain-probe", "--spec", "jump"]) == EXIT_OK


def test_config_file_and_artifact(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "distance", "params": {"body": "square", "y": [0.5, 0.0]}}))
    out = tmp_path / "d.json"
    assert run(["distance", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["config"]["params"]["body"] == "square"
    assert doc["result"]["distance"] == pytest.approx(0.5 * math.log(3))


def test_verify_facts_exit_codes():
    assert run(["verify-facts", "--configs", "3", "--samples", "32"]) == EXIT_PROBE
    assert run(["verify-facts", "--configs", "3", "--samples", "32", "--mu-rule", "sharp"]) == EXIT_OK


def test_limitset_csv(tmp_path):
    out = tmp_path / "l.csv"
    svg = tmp_path / "l.svg"
    assert run(["limitset", "--out", str(out), "--svg", str(svg)]) == EXIT_OK
    P = hio.read_csv_points(out.read_text())
    assert P.shape == (3, 3)
    assert svg.read_text().startswith("<svg")
