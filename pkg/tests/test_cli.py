import json
import math

import jsonschema
import pytest

from fuzzydynsym.cli import CACHE_ENV, EXIT_FAIL, EXIT_IO, EXIT_OK, EXIT_USAGE, main, report_schema
from fuzzydynsym.config import ConfigError, RunConfig


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def _strip_timing(text):
    rep = json.loads(text)
    rep.pop("timing")
    return rep


# ---------------------------------------------------------------------------
# verify


def test_verify_suite_passes(capsys):
    code, rep = run_json(capsys, "verify")
    assert code == EXIT_OK
    assert rep["status"] == "pass"
    assert len(rep["checks"]) == 46
    assert all(c["status"] == "pass" for c in rep["checks"])


def test_verify_user_expression(capsys):
    code, rep = run_json(capsys, "verify", "--expr", "comm(x(1),x(2)) == 2*i*lam*x(3)")
    assert code == EXIT_OK
    assert rep["checks"][-1]["tag"] == "user"
    assert rep["checks"][-1]["status"] == "pass"


def test_verify_false_expression_exits_one(capsys):
    code, rep = run_json(capsys, "verify", "comm(x(1),x(2)) == 0")
    assert code == EXIT_FAIL
    assert rep["status"] == "fail"
    assert rep["exit_code"] == EXIT_FAIL


def test_verify_unparsable_expression_is_usage_error(capsys):
    assert main(["verify", "--expr", "__import__('os') == 0"]) == EXIT_USAGE


def test_verify_csv_format(capsys):
    code, out = run(capsys, "verify", "--format", "csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "name,tag,status,difference"
    assert len(lines) == 47


def test_reruns_are_byte_identical_apart_from_timing(capsys):
    _, first = run(capsys, "verify")
    _, second = run(capsys, "verify")
    assert _strip_timing(first) == _strip_timing(second)
    assert json.loads(first)["stability_hash"] == json.loads(second)["stability_hash"]


# ---------------------------------------------------------------------------
# spectrum and cache


def test_spectrum_small_run(capsys, tmp_path):
    code, rep = run_json(capsys, "spectrum", "--lambda", "0.5", "--nmax", "12", "--cache-dir", str(tmp_path))
    assert code in (EXIT_OK, EXIT_FAIL)
    levels = rep["data"]["n_max=12"]["clusters"]
    assert levels[0]["energy"] == pytest.approx(-0.47193214, abs=1e-7)
    assert levels[0]["n"] == 1
    assert rep["timing"]["cache"] == "write"


def test_spectrum_free_particle_has_no_bound_states(capsys):
    code, rep = run_json(capsys, "spectrum", "--q", "0", "--nmax", "8")
    assert code == EXIT_OK
    assert all(e >= -1e-10 for e in rep["data"]["n_max=8"]["eigenvalues"])


def test_cache_hit_is_bit_exact(capsys, tmp_path, monkeypatch):
    args = ["spectrum", "--nmax", "10"]
    _, cold = run(capsys, *args, "--cache-dir", str(tmp_path))
    _, warm = run(capsys, *args, "--cache-dir", str(tmp_path))
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    _, env = run(capsys, *args)
    assert json.loads(cold)["timing"]["cache"] == "write"
    assert json.loads(warm)["timing"]["cache"] == "hit"
    assert json.loads(env)["timing"]["cache"] == "hit"
    assert _strip_timing(cold) == _strip_timing(warm) == _strip_timing(env)
    assert len(list(tmp_path.iterdir())) == 1


def test_flag_overrides_environment_cache(capsys, tmp_path, monkeypatch):
    env_dir, flag_dir = tmp_path / "env", tmp_path / "flag"
    env_dir.mkdir()
    monkeypatch.setenv(CACHE_ENV, str(env_dir))
    run(capsys, "spectrum", "--nmax", "6", "--cache-dir", str(flag_dir))
    assert list(env_dir.iterdir()) == []
    assert len(list(flag_dir.iterdir())) == 1


def test_corrupt_cache_exits_three(capsys, tmp_path):
    run(capsys, "spectrum", "--nmax", "6", "--cache-dir", str(tmp_path))
    (entry,) = tmp_path.iterdir()
    entry.write_bytes(entry.read_bytes()[:-16])
    assert main(["spectrum", "--nmax", "6", "--cache-dir", str(tmp_path)]) == EXIT_IO


def test_unwritable_cache_exits_three(capsys, tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    assert main(["spectrum", "--nmax", "6", "--cache-dir", str(blocker / "sub")]) == EXIT_IO


def test_invalid_nmax_is_usage_error(capsys):
    assert main(["spectrum", "--nmax", "1"]) == EXIT_USAGE


def test_output_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "-o", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["command"] == "verify"


# ---------------------------------------------------------------------------
# symmetry


def test_symmetry_small_run(capsys):
    code, rep = run_json(capsys, "symmetry", "--lambda", "0.5", "--nmax", "14")
    assert rep["command"] == "symmetry"
    conservation = [c for c in rep["checks"] if c["tag"] == "conservation"]
    assert len(conservation) == 3
    assert all(c["status"] == "pass" for c in conservation)
    assert code == (EXIT_FAIL if rep["status"] == "fail" else EXIT_OK)


# ---------------------------------------------------------------------------
# zwanziger


def test_zwanziger_levels(capsys):
    code, rep = run_json(capsys, "zwanziger", "levels", "--mu", "0.5", "--gamma", "1", "-k", "3")
    assert code == EXIT_OK
    rows = rep["data"]["levels"]["rows"]
    assert [r["n"] for r in rows] == ["3/2", "5/2", "7/2"]
    assert [r["degeneracy"] for r in rows] == [2, 6, 12]


def test_zwanziger_levels_csv(capsys):
    code, out = run(capsys, "zwanziger", "levels", "--mu", "0.5", "-k", "2", "--format", "csv")
    assert code == EXIT_OK
    assert len(out.strip().splitlines()) == 3


def test_zwanziger_oracle(capsys):
    code, rep = run_json(capsys, "zwanziger", "oracle", "--mu", "0.5", "--j", "0.5", "-k", "1", "--grid-points", "2000")
    assert code == EXIT_OK
    assert rep["data"]["oracle"]["exact"][0] == pytest.approx(-2 / 9, rel=1e-12)


def test_dirac_violation_is_usage_error(capsys):
    assert main(["zwanziger", "levels", "--mu", "0.3"]) == EXIT_USAGE


def test_zwanziger_fields(capsys, tmp_path):
    pts = tmp_path / "pts.csv"
    pts.write_text("x,y,z\n1,0,0\n0,2,0\n1,1,1\n")
    code, rep = run_json(capsys, "zwanziger", "fields", "--points", str(pts))
    assert code == EXIT_OK
    for x, y, z, *_, mag in rep["data"]["field"]:
        assert mag == pytest.approx(1 / (x * x + y * y + z * z), rel=1e-10)
    assert rep["data"]["flux_unit_sphere"] == pytest.approx(4 * math.pi, rel=1e-9)


def test_zwanziger_fields_needs_points(capsys):
    assert main(["zwanziger", "fields"]) == EXIT_USAGE


def test_zwanziger_fields_missing_file(capsys, tmp_path):
    assert main(["zwanziger", "fields", "--points", str(tmp_path / "none.csv")]) == EXIT_IO


def test_zwanziger_reduce(capsys):
    code, rep = run_json(capsys, "zwanziger", "reduce", "--e1", "1", "--g2", "0.5", "--m1", "1", "--m2", "1")
    red = rep["data"]["reduced"]
    assert red["m"] == pytest.approx(0.5)
    assert code == (EXIT_OK if rep["status"] == "pass" else EXIT_FAIL)


# ---------------------------------------------------------------------------
# schema and config


def test_schema_validates_reports(capsys):
    code, out = run(capsys, "schema")
    assert code == EXIT_OK
    schema = json.loads(out)
    assert schema == report_schema()
    _, rep = run_json(capsys, "verify")
    jsonschema.validate(rep, schema)
    del rep["status"]
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(rep, schema)


def test_config_round_trip_and_flag_override(capsys, tmp_path):
    cfg = RunConfig(lam=0.25, n_max=8, mu=1.5)
    assert RunConfig.loads(cfg.dumps()) == cfg
    path = tmp_path / "run.cfg"
    path.write_text(cfg.dumps())
    code, rep = run_json(capsys, "zwanziger", "levels", "--config", str(path), "-k", "1")
    assert code == EXIT_OK
    assert rep["config"]["mu"] == 1.5
    assert rep["config"]["lam"] == 0.25
    code, rep = run_json(capsys, "zwanziger", "levels", "--config", str(path), "--mu", "1", "-k", "1")
    assert rep["config"]["mu"] == 1.0


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError):
        RunConfig(n_max=1).validate()
    with pytest.raises(ConfigError):
        RunConfig.loads("no_such_key = 3\n")


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["nonsense"]) == EXIT_USAGE
