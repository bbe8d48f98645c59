import csv
import json
import math

import jsonschema
import pytest

from fbannulus import cli
from fbannulus.config import OUTPUT_ENV, Config, ConfigError

R0 = 2.171622980887502


@pytest.fixture
def out(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path))
    return tmp_path


def manifest(out, cmd):
    return json.loads((out / f"manifest_{cmd}.json").read_text())


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_constants(out, schema):
    assert cli.main(["constants"]) == 0
    data = json.loads((out / "constants.json").read_text())
    jsonschema.validate(data, schema("constants"))
    assert data["t0"] == pytest.approx(1.1996786, abs=1e-7)
    assert data["flags"]["r0_gt_t0"] and data["flags"]["margin_positive"]
    jsonschema.validate(manifest(out, "constants"), schema("manifest"))


def test_catenoid_at_zero(out, schema):
    assert cli.main(["catenoid", "--t", "0"]) == 0
    data = json.loads((out / "catenoid_p0_0000.json").read_text())
    jsonschema.validate(data, schema("catenoid"))
    assert data["a"] == pytest.approx(R0, abs=1e-8)
    assert abs(data["b"]) < 1e-8


def test_catenoid_is_deterministic(out):
    digests = []
    for _ in range(2):
        assert cli.main(["catenoid", "--t", "0.2"]) == 0
        digests.append(manifest(out, "catenoid")["digest"])
    assert digests[0] == digests[1]


def test_catenoid_csv(out):
    assert cli.main(["catenoid", "--t", "0.1", "--format", "csv", "--out", str(out / "c.csv")]) == 0
    rows = read_csv(out / "c.csv")
    assert len(rows) == 1 and float(rows[0]["t"]) == 0.1
    prof = read_csv(out / "c_profile.csv")
    assert list(prof[0]) == ["s", "rho", "drho"] and len(prof) > 50
    assert (out / "c.csv").read_bytes().count(b"\r\n") == 2


def test_catenoid_outside_range(out, capsys):
    assert cli.main(["catenoid", "--t", "0.9"]) == cli.EXIT_NONCONVERGENCE
    diag = json.loads(capsys.readouterr().err)
    assert diag["t"] == 0.9 and diag["error"]


def test_sweep(out):
    assert cli.main(["sweep", "--t-min", "0", "--t-max", "0.3", "--steps", "7"]) == 0
    rows = read_csv(out / "sweep.csv")
    assert len(rows) == 7
    assert float(rows[0]["a"]) == pytest.approx(R0, abs=1e-8)
    assert all(r["ok"] == "1" for r in rows)


def test_sweep_symmetric(out):
    assert cli.main(["sweep", "--t-min", "-0.2", "--t-max", "0.2", "--steps", "5"]) == 0
    a = [float(r["a"]) for r in read_csv(out / "sweep.csv")]
    assert a == pytest.approx(a[::-1], abs=1e-10)


def test_sweep_flags_failed_rows(out):
    assert cli.main(["sweep", "--t-min", "0.3", "--t-max", "0.9", "--steps", "2"]) == cli.EXIT_NONCONVERGENCE
    rows = read_csv(out / "sweep.csv")
    assert rows[0]["ok"] == "1" and rows[1]["ok"] == "0" and rows[1]["error"]


@pytest.mark.parametrize("argv", [["sweep", "--t-min", "0.3", "--t-max", "0.1"], ["sweep", "--steps", "0"]])
def test_empty_sweep_is_usage_error(out, argv):
    assert cli.main(argv) == cli.EXIT_USAGE


def test_spectrum_and_degree(out, schema):
    assert cli.main(["spectrum", "--surface", "catenoid"]) == 0
    rep = json.loads((out / "spectrum_catenoid.json").read_text())
    jsonschema.validate(rep, schema("spectrum"))
    assert rep["nullity"] == 2
    assert len(read_csv(out / "spectrum_catenoid_refinement.csv")) == 3
    assert cli.main(["degree", "--topology", "annulus"]) == 0
    led = json.loads((out / "degree_annulus.json").read_text())
    jsonschema.validate(led, schema("degree"))
    assert led["abs_total"] == 2


def test_degree_inline(out):
    assert cli.main(["degree", "--topology", "disk"]) == 0
    assert abs(json.loads((out / "degree_disk.json").read_text())["total"]) == 2
    assert cli.main(["degree", "--topology", "other"]) == 0
    assert json.loads((out / "degree_other.json").read_text())["total"] == 0


def test_degree_refuses_inconclusive_report(out):
    (out / "spectrum_disk.json").write_text(json.dumps({"inconclusive": True, "index": 1}))
    assert cli.main(["degree", "--topology", "disk"]) == cli.EXIT_INCONCLUSIVE


def test_verify_fast_and_mutation(out, schema, capsys):
    assert cli.main(["verify", "--suite", "fast"]) == 0
    data = json.loads((out / "verify_fast.json").read_text())
    jsonschema.validate(data, schema("verify"))
    assert data["passed"]
    capsys.readouterr()
    assert cli.main(["verify", "--suite", "fast", "--inject-t0-offset", "1e-3"]) == cli.EXIT_FAIL
    assert "FAIL constants" in capsys.readouterr().out


def test_usage_errors(out):
    assert cli.main([]) == cli.EXIT_USAGE
    assert cli.main(["spectrum", "--surface", "torus"]) == cli.EXIT_USAGE


def test_config_file(out, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sweep_t_max": 0.1, "sweep_steps": 3}))
    assert cli.main(["--config", str(cfg), "sweep"]) == 0
    assert len(read_csv(out / "sweep.csv")) == 3
    assert manifest(out, "sweep")["params"]["config"]["sweep_steps"] == 3
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["--config", str(cfg), "constants"]) == cli.EXIT_USAGE


def test_config_validation(monkeypatch):
    monkeypatch.delenv(OUTPUT_ENV, raising=False)
    assert Config.load().output_dir == "results"
    for bad in ({"zero_tol": 0.0}, {"spectrum_levels": (257, 300)}, {"spectrum_levels": (257,)}, {"morse_trials": 0}):
        with pytest.raises(ConfigError):
            Config(**bad)
    monkeypatch.setenv(OUTPUT_ENV, "elsewhere")
    assert Config.load().output_dir == "elsewhere"


def test_json_has_no_nan(out):
    path = cli.write_json(out / "x.json", {"a": math.nan, "b": [1.0, math.inf]})
    assert json.loads(path.read_text()) == {"a": None, "b": [1.0, None]}
