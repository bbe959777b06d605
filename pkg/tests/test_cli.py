import json

import pytest

from eisenstein_cli import EXIT_OK, EXIT_USAGE, main
from logger import RunLogger

CLASSICAL = {"lattice": [], "weight_twice": 8, "n_max": 3}


@pytest.fixture
def workspace(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return {
        "write": write,
        "log": str(tmp_path / "runs.jsonl"),
        "cache": str(tmp_path / "cache"),
        "dir": tmp_path,
    }


def run(workspace, *args):
    return main(["--log-file", workspace["log"], *args])


def test_compute_classical(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    assert run(workspace, "compute", "--config", config, "--cache", workspace["cache"]) == EXIT_OK
    captured = capsys.readouterr()
    document = json.loads(captured.out)
    assert document["metadata"]["mode_used"] == "exact"
    assert document["metadata"]["characters"] == ["1:[]"]
    table = document["tables"][0]
    assert table["constant_term"][0]["value"]["coeffs"] == ["2/1"]
    values = {record["n"]: record["value"]["coeffs"] for record in table["coefficients"]}
    assert values["1/1"] == ["480/1"]
    assert values["3/1"] == ["13440/1"]
    assert "untwisted" in document
    assert "Computing" in captured.err


def test_cache_hit_is_identical(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    run(workspace, "compute", "--config", config, "--cache", workspace["cache"])
    cold = capsys.readouterr().out
    run(workspace, "compute", "--config", config, "--cache", workspace["cache"])
    captured = capsys.readouterr()
    assert captured.out == cold
    assert "Cache hit" in captured.err
    entries = RunLogger(workspace["log"]).get_logs()
    assert [entry["cache_hit"] for entry in entries] == [False, True]
    assert entries[0]["config_hash"] == entries[1]["config_hash"]


def test_output_file_and_overrides(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    target = workspace["dir"] / "out.json"
    code = run(workspace, "compute", "--config", config, "--no-cache", "--nmax", "1", "--mode", "numeric",
               "--output", str(target))
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    document = json.loads(target.read_text())
    assert document["metadata"]["mode_used"] == "numeric"
    assert document["metadata"]["n_max"] == "1/1"


def test_non_isotropic_beta(workspace, capsys):
    config = workspace["write"]("bad.json", {"lattice": [[2]], "weight_twice": 7, "beta": [1]})
    assert run(workspace, "compute", "--config", config, "--cache", workspace["cache"]) == EXIT_USAGE
    assert "Q(beta) = 1/4" in capsys.readouterr().err
    assert RunLogger(workspace["log"]).get_logs()[-1]["status"] == "usage_error"


def test_missing_config(workspace, capsys):
    assert run(workspace, "compute", "--config", str(workspace["dir"] / "absent.json")) == EXIT_USAGE
    assert "not found" in capsys.readouterr().err


def test_unknown_suite(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    assert run(workspace, "verify", "--config", config, "--suite", "modular") == EXIT_USAGE
    assert "unknown suite" in capsys.readouterr().err


def test_usage_errors_exit_with_one(workspace, capsys):
    assert run(workspace) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        run(workspace, "compute")
    assert info.value.code == EXIT_USAGE


def test_verify_hecke(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    assert run(workspace, "verify", "--config", config, "--suite", "hecke") == EXIT_OK
    captured = capsys.readouterr()
    report = json.loads(captured.out)
    assert report["summary"]["failed"] == 0
    eigenvalues = [r["detail"]["eigenvalue"]["coeffs"] for r in report["results"] if "eigenvalue" in r["detail"]]
    assert ["9/1"] in eigenvalues and ["28/1"] in eigenvalues
    assert "VERIFY: hecke" in captured.err


def test_analytics(workspace, capsys):
    config = workspace["write"]("classical.json", CLASSICAL)
    run(workspace, "compute", "--config", config, "--cache", workspace["cache"])
    capsys.readouterr()
    report = workspace["dir"] / "report.json"
    assert run(workspace, "analytics", "--export", str(report)) == EXIT_OK
    out = capsys.readouterr().out
    assert "RUN ANALYTICS" in out
    assert json.loads(report.read_text())["commands"] == {"compute": 1}
