"""End-to-end tests of the command-line interface."""

import json
import math

from tanatlas.cli import main


def test_render_dynamic_outputs(tmp_path):
    out = tmp_path / "dyn.ppm"
    data = tmp_path / "dyn.csv"
    rc = main(["render-dynamic", "--p", "3", "--q", "2", "--lambda", "1.4142,1.4142",
               "--window=-2,2,-2,2", "--res", "48x32", "--max-iter", "300",
               "--out", str(out), "--data", str(data)])
    assert rc == 0
    blob = out.read_bytes()
    assert blob.startswith(b"P6\n48 32\n255\n")
    assert len(blob) == len(b"P6\n48 32\n255\n") + 48 * 32 * 3
    lines = data.read_text().splitlines()
    assert lines[0] == "ix,iy,re,im,class,aux1,aux2"
    assert len(lines) == 1 + 48 * 32


def test_render_param_summary(capsys):
    rc = main(["render-param", "--p", "3", "--q", "2", "--res", "32x32",
               "--max-iter", "200"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["kind"] == "param"
    assert doc["cells"] == 32 * 32
    assert "capture" in doc["classes"]


def test_census_jsonl(tmp_path):
    data = tmp_path / "census.jsonl"
    rc = main(["census", "--p", "3", "--q", "2", "--res", "48x48",
               "--max-iter", "300", "--data", str(data)])
    assert rc == 0
    entries = [json.loads(line) for line in data.read_text().splitlines()]
    assert entries and all("size_cells" in e for e in entries)


def test_trace_ray_param(capsys):
    rc = main(["trace-ray", "--space", "param", "--p", "1", "--q", "2",
               "--theta", "0", "--seed", "0.3,0", "--steps", "40"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["landing"][0] - (math.pi / 4) ** 0.5) < 1e-3
    assert doc["max_residual"] < 1e-9


def test_trace_ray_dynamic(tmp_path):
    data = tmp_path / "ray.json"
    rc = main(["trace-ray", "--space", "dynamic", "--p", "1", "--q", "2",
               "--lambda", "0.4,0.1", "--theta", "0.25", "--smin", "0.01",
               "--steps", "30", "--send", "0.15", "--data", str(data)])
    assert rc == 0
    doc = json.loads(data.read_text())
    assert len(doc["points"]) > 10


def test_find_center(capsys):
    rc = main(["find", "--kind", "center", "--p", "2", "--q", "2", "--n", "1",
               "--seed", "1.7,0"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["lambda"][0] - math.sqrt(math.pi)) < 1e-9


def test_find_misiurewicz(capsys):
    rc = main(["find", "--kind", "misiurewicz", "--p", "1", "--q", "2"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["certificate"]["multiplier"][0] - math.pi) < 1e-10


def test_find_parabolic(capsys):
    rc = main(["find", "--kind", "parabolic", "--p", "3", "--q", "2"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda"][0] >= 1.0


def test_find_virtual(capsys):
    rc = main(["find", "--kind", "virtual", "--p", "2", "--q", "2", "--n", "2",
               "--k", "0", "--j", "0"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["lambda"][0] + math.sqrt(math.pi / 2)) < 1e-12


def test_symbol_roundtrip(capsys):
    rc = main(["symbol", "--p", "1", "--q", "2", "--lambda", "0.2427,0.1764",
               "--itinerary", "0,0,0;1,1,0"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    z = complex(*doc["prepole"])
    rc = main(["symbol", "--p", "1", "--q", "2", "--lambda", "0.2427,0.1764",
               "--point", f"{z.real},{z.imag}", "--depth", "2"])
    assert rc == 0
    doc2 = json.loads(capsys.readouterr().out)
    assert doc2["itinerary"] == [[0, 0, 0], [1, 1, 0]]


def test_verify_suite_pass(capsys):
    rc = main(["verify", "--suite", "misiurewicz"])
    assert rc == 0
    assert "[PASS] misiurewicz" in capsys.readouterr().out


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nope"]) == 2


def test_invalid_config_exit_code():
    assert main(["render-param", "--p", "1", "--q", "1", "--res", "32x32"]) == 2
    assert main(["render-dynamic", "--p", "1", "--q", "2", "--lambda", "0,0",
                 "--res", "32x32"]) == 2


def test_symbol_requires_input():
    assert main(["symbol", "--p", "1", "--q", "2", "--lambda", "0.3,0"]) == 2
