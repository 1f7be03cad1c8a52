import csv
import io
import json
from importlib import resources

import jsonschema
import numpy as np
import pytest

from oam_metrology.cli import main
from oam_metrology.propagation import count_maxima


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_fringe_default_two_photon(capsys):
    code, out, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1")
    assert code == 0
    data = rows(out)
    assert len(data) == 361
    theta = np.array([float(r["theta_rad"]) for r in data])
    norm = np.array([float(r["normalized"]) for r in data])
    assert count_maxima(theta[:-1], norm[:-1]) == 2
    np.testing.assert_allclose(norm, np.cos(2 * theta) ** 2, atol=1e-11)


def test_fringe_four_photon_l2(capsys):
    code, out, _ = run(capsys, "fringe", "--scheme", "four_photon", "--l", "2", "--theta", "0:3.141592653589793:721")
    assert code == 0
    data = rows(out)
    theta = np.array([float(r["theta_rad"]) for r in data])[:-1]
    raw = np.array([float(r["raw"]) for r in data])[:-1]
    assert count_maxima(theta, raw) == 8
    assert raw.max() == pytest.approx(0.09375, abs=1e-11)


def test_fringe_json_and_pattern(capsys):
    code, out, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--pattern", "a-:1,b+:1",
                       "--theta", "0:1:5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["pattern"] == "a-:1,b+:1"
    assert doc["samples"][0]["raw"] == pytest.approx(0.5)


@pytest.mark.parametrize("grid", ["0:0:1", "1:0:10", "0:1", "a:b:c", "0:1:1"])
def test_invalid_grid_exits_2(capsys, grid):
    code, _, err = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--theta", grid)
    assert code == 2
    assert "error" in err


def test_degrees(capsys):
    _, rad, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--theta", "0:3.141592653589793:7")
    _, deg, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--theta", "0:180:7", "--degrees")
    a = np.array([[float(v) for v in r.values()] for r in rows(rad)])
    b = np.array([[float(v) for v in r.values()] for r in rows(deg)])
    np.testing.assert_allclose(a, b, atol=1e-11)


def test_csv_output_is_deterministic(capsys):
    args = ("fringe", "--scheme", "four_photon", "--l", "3", "--seed", "7")
    first = run(capsys, *args)[1]
    second = run(capsys, *args)[1]
    assert first == second
    assert first.encode() == second.encode()


@pytest.mark.parametrize("scheme,l,expected", [("two_photon", 1, 0.25), ("two_photon", 2, 0.125),
                                               ("four_photon", 1, 0.125), ("four_photon", 3, 1 / 24)])
def test_sensitivity_schemes(capsys, scheme, l, expected):
    code, out, _ = run(capsys, "sensitivity", "--scheme", scheme, "--l", str(l))
    doc = json.loads(out)
    assert code == 0
    assert doc["min_delta_theta"] == pytest.approx(expected, abs=1e-6)
    assert doc["status"] == "ok"


def test_sensitivity_ideal_noon_validates(capsys):
    code, out, _ = run(capsys, "sensitivity", "--scheme", "ideal_noon", "--n", "10", "--l", "5")
    doc = json.loads(out)
    assert code == 0
    assert doc["min_delta_theta"] == pytest.approx(0.01, abs=1e-6)
    schema = json.loads(resources.files("oam_metrology").joinpath("schemas/sensitivity_report.schema.json").read_text())
    jsonschema.validate(doc, schema)


def test_sensitivity_csv(capsys):
    code, out, _ = run(capsys, "sensitivity", "--scheme", "two_photon", "--l", "1", "--theta", "0:1.5:31",
                       "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("theta_rad,fringe")


def test_l0_warns_and_exits_zero(capsys):
    code, out, err = run(capsys, "fringe", "--scheme", "two_photon", "--l", "0", "--theta", "0:1:5")
    assert code == 0
    assert "insensitive configuration" in err
    vals = {r["raw"] for r in rows(out)}
    assert len(vals) == 1
    code, out, err = run(capsys, "sensitivity", "--scheme", "two_photon", "--l", "0")
    assert code == 0
    assert json.loads(out)["status"] == "insensitive configuration"


def test_dist_file(capsys, tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"weights": {"1": 0.6, "2": 0.4}}))
    code, out, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--dist", str(path),
                       "--theta", "0:1:11")
    assert code == 0
    raw = np.array([float(r["raw"]) for r in rows(out)])
    path.write_text(json.dumps({"weights": {"1": 1.0}}))
    _, pure, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--dist", str(path),
                     "--theta", "0:1:11")
    np.testing.assert_allclose(raw, 0.6 * np.array([float(r["raw"]) for r in rows(pure)]), atol=1e-11)


def test_bad_dist_exits_2(capsys, tmp_path):
    path = tmp_path / "dist.json"
    path.write_text(json.dumps({"weights": {"1": 0.6}}))
    code, _, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--dist", str(path))
    assert code == 2


def test_output_dir_env(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("OAM_METROLOGY_OUTPUT_DIR", str(tmp_path))
    code, out, _ = run(capsys, "fringe", "--scheme", "two_photon", "--l", "1", "--theta", "0:1:3",
                       "-o", "sub/f.csv")
    assert code == 0 and out == ""
    assert (tmp_path / "sub" / "f.csv").read_text().startswith("theta_rad,raw,normalized")


def test_verify_default_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "max deviation" in out
    assert out.count("[ok]") == 6


def test_verify_perturbed_fails(capsys):
    code, _, err = run(capsys, "verify", "--scheme", "two_photon", "--l", "1", "--perturb", "1e-3")
    assert code == 1
    assert "offending theta" in err


def test_verify_ideal_noon_and_cap(capsys):
    assert run(capsys, "verify", "--scheme", "ideal_noon", "--n", "6", "--l", "1", "--theta", "0:3:9")[0] == 0
    code, _, err = run(capsys, "verify", "--scheme", "ideal_noon", "--n", "8", "--l", "1")
    assert code == 2
    assert "cap" in err


def test_verify_random_samples_seeded(capsys):
    a = run(capsys, "verify", "--scheme", "two_photon", "--l", "2", "--random-samples", "5", "--seed", "3")
    b = run(capsys, "verify", "--scheme", "two_photon", "--l", "2", "--random-samples", "5", "--seed", "3")
    assert a == b and a[0] == 0
