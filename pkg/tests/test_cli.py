import json
import subprocess
import sys

import pytest

from gsv import __version__
from gsv.cli import EXIT_BUDGET, EXIT_FAILED, EXIT_OK, EXIT_USAGE, main
from gsv.repthy import base_point
from gsv.variety import GSVSpec, Point


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_canonical_r1_s2(capsys):
    code, doc = run_json(capsys, "canonical", "--r", "1", "--s", "2")
    assert code == EXIT_OK
    assert doc["verdict"] == "OK" and doc["toolVersion"] == __version__
    assert doc["command"] == "canonical" and doc["spec"] == {"r": 1, "s": 2}
    pairs = doc["payload"]["pairs"]
    assert len(pairs) == 1 and pairs[0]["gluing"] == -1
    assert doc["payload"]["verdict"] == "CANONICAL_TRIVIAL"
    assert doc["payload"]["numericCrossCheck"]["ok"]
    assert doc["elapsedMs"] is None


def test_canonical_r2_s3(capsys):
    code, doc = run_json(capsys, "canonical", "--r", "2", "--s", "3")
    assert code == EXIT_OK and len(doc["payload"]["pairs"]) == 3


def test_canonical_adjacent_scope(capsys):
    code, doc = run_json(capsys, "canonical", "--r", "2", "--s", "4", "--pairs", "adjacent")
    assert code == EXIT_OK and len(doc["payload"]["pairs"]) == 12


@pytest.mark.parametrize("argv", [
    ["canonical", "--r", "3", "--s", "2"],
    ["canonical", "--r", "0", "--s", "2"],
    ["canonical", "--pairs", "some"],
    ["weights", "--samples", "0"],
    ["frobnicate"],
    [],
    ["orbit", "--r", "1", "--s", "2"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert out == "" and "usage error" in err


def test_size_budget(capsys):
    code, doc = run_json(capsys, "canonical", "--r", "3", "--s", "6")
    assert code == EXIT_BUDGET and doc["verdict"] == "BUDGET_EXCEEDED"
    assert "20 charts" in doc["payload"]["reason"]


def test_time_budget_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("GSV_TIME_BUDGET", "1")
    code, doc = run_json(capsys, "canonical", "--r", "3", "--s", "5")
    assert code == EXIT_BUDGET and "time budget" in doc["payload"]["reason"]
    monkeypatch.setenv("GSV_TIME_BUDGET", "soon")
    assert run(capsys, "weights")[0] == EXIT_USAGE


@pytest.mark.parametrize("r, s, count", [(1, 2, 3), (4, 6, 32), (3, 5, 21)])
def test_weights(capsys, r, s, count):
    code, doc = run_json(capsys, "weights", "--r", str(r), "--s", str(s))
    p = doc["payload"]
    assert code == EXIT_OK
    assert p["tangentWeightCount"] == count
    assert p["canonicalWeight"] == [0] * s
    assert p["pairing"] == "RECIPROCAL_PAIRS_OK" and p["verdict"] == "THEOREM1_OK"
    assert sum(w["multiplicity"] for w in p["weights"]) == count


def test_weights_output_is_stable(capsys):
    assert run(capsys, "weights", "--r", "2", "--s", "5", "--json") == run(capsys, "weights", "--r", "2", "--s", "5", "--json")


def write_point(tmp_path, p, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(p.to_json()))
    return str(path)


def test_orbit_worked_example(capsys, tmp_path):
    f = write_point(tmp_path, Point([[2, 3]], [["1/2"], [0]]))
    code, doc = run_json(capsys, "orbit", "--r", "1", "--s", "2", "--point", f)
    p = doc["payload"]
    assert code == EXIT_OK and p["onVariety"] and p["roundTrip"]
    assert p["witness"]["B"] == [["1/2", "3/1"], ["0/1", "-2/1"]]
    assert p["jacobianRank"] == 1 and p["dimension"] == 3


def test_orbit_base_point(capsys, tmp_path):
    f = write_point(tmp_path, base_point(GSVSpec(2, 3)))
    code, doc = run_json(capsys, "orbit", "--r", "2", "--s", "3", "--point", f)
    w = doc["payload"]["witness"]
    assert code == EXIT_OK and w["A"] == [["1/1", "0/1"], ["0/1", "1/1"]]


def test_orbit_off_variety(capsys, tmp_path):
    f = write_point(tmp_path, Point([[1, 0]], [[0], [0]]))
    code, doc = run_json(capsys, "orbit", "--r", "1", "--s", "2", "--point", f)
    assert code == EXIT_FAILED and doc["verdict"] == "FAILED"
    assert doc["payload"]["violatedEntry"] == [1, 1]
    assert doc["payload"]["residual"] == "-1/1"


def test_orbit_bad_files(capsys, tmp_path):
    f = write_point(tmp_path, base_point(GSVSpec(1, 3)))
    assert run(capsys, "orbit", "--r", "1", "--s", "2", "--point", f)[0] == EXIT_USAGE
    assert run(capsys, "orbit", "--r", "1", "--s", "2", "--point", str(tmp_path / "missing.json"))[0] == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "orbit", "--r", "1", "--s", "2", "--point", str(bad))[0] == EXIT_USAGE


def test_atlas(capsys):
    code, doc = run_json(capsys, "atlas", "--r", "1", "--s", "2")
    charts = doc["payload"]["charts"]
    assert code == EXIT_OK and len(charts) == 2
    assert charts[0]["freeCoords"] == ["x1_1", "x1_2", "y2_1"]
    assert charts[0]["solved"] == [
        {"variable": "y1_1", "numerator": "-x1_2*y2_1 + 1", "denominator": [{"I": [1], "power": 1}]}
    ]


def test_sweep(capsys, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    code, text, _ = run(capsys, "sweep", "--s", "3", "--seed", "5", "--json", "--out", str(out1))
    assert code == EXIT_OK
    run(capsys, "sweep", "--s", "3", "--seed", "5", "--json", "--out", str(out2))
    assert out1.read_bytes() == out2.read_bytes() == text.encode()
    doc = json.loads(text)
    assert doc["spec"] == {"maxS": 3}
    assert [(e["spec"]["r"], e["spec"]["s"]) for e in doc["payload"]["results"]] == [
        (1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 3)
    ]
    assert all(e["ok"] for e in doc["payload"]["results"])
    assert len(doc["paperErrata"]) == 2


def test_text_output_and_timing(capsys):
    code, out, _ = run(capsys, "canonical", "--r", "1", "--s", "2", "--timing")
    assert code == EXIT_OK
    assert out.startswith("gsv canonical")
    assert "sigma_[2] = -1 * sigma_[1]" in out and "elapsed:" in out
    with pytest.raises(json.JSONDecodeError):
        json.loads(out)


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gsv.cli", "weights", "--r", "1", "--s", "2", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["tangentWeightCount"] == 3
