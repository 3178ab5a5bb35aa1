import json

import pandas as pd
import pytest

from app import ALLOWED_COMMANDS, build_parser, import_command_module, run
from tests.conftest import U_CAUSTIC, V_CAUSTIC
from utils.system.logger import LOGGER_NAME

SATELLITE_CONFIG = """\
# electron-positron pair, satellitary start
alpha = 0.3333333333333333
x0 = 0
y0 = 1
h = -1
lambda = -1
q1 = -1.04
q2 = 0.06
"""

THIRD = "0.3333333333333333"


@pytest.fixture
def satellite_config(tmp_path):
    path = tmp_path / "satellite.cfg"
    path.write_text(SATELLITE_CONFIG)
    return str(path)


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_every_command_is_registered():
    for command in ALLOWED_COMMANDS:
        module = import_command_module(command)
        assert callable(module.run)
    assert build_parser().prog == "pair-orbits"


def test_unknown_command_module():
    with pytest.raises(ImportError):
        import_command_module("animate")


def test_classify(capsys):
    assert run(["classify", "--alpha-a", "0.3333333333", "--h-a", "-1", "--lambda-a", "-1"]) == 0
    data = _stdout_json(capsys)
    assert data["labels"] == ["t_s1"]
    assert sorted(data["caustics"]) == pytest.approx([V_CAUSTIC, U_CAUSTIC], abs=1e-6)
    assert data["collision_possible"] is True


def test_classify_from_physical_constants(capsys, tmp_path):
    out = tmp_path / "report.json"
    code = run(["classify", "--alpha", "1", "--x0", "0", "--y0", "2", "--h", "8", "--lambda", "2", "--json", str(out)])
    assert code == 0
    data = _stdout_json(capsys)
    assert data["constants"]["h_a"] == pytest.approx(2.0)
    assert json.loads(out.read_text()) == data


def test_diagram_writes_files(capsys, tmp_path):
    svg, csv = tmp_path / "diagram.svg", tmp_path / "diagram.csv"
    code = run(
        [
            "diagram",
            "--alpha-a", THIRD,
            "--h-a", "-2:3:20",
            "--lambda-a", "-2:4:20",
            "--svg", str(svg),
            "--csv", str(csv),
        ]
    )
    assert code == 0
    assert svg.exists()
    assert len(pd.read_csv(csv)) == 400
    summary = _stdout_json(capsys)
    assert summary["cells"] == 400
    assert sum(summary["counts"].values()) == 400


def test_initcond_lists_four_branches(capsys, satellite_config):
    assert run(["initcond", "--config", satellite_config]) == 0
    records = _stdout_json(capsys)
    assert [r["branch"] for r in records] == [0, 1, 2, 3]
    assert {"qdot1", "qdot2", "residual_h", "residual_lambda", "x1", "vy2"} <= set(records[0])


def test_simulate_from_config(capsys, tmp_path, satellite_config):
    csv, svg = tmp_path / "traj.csv", tmp_path / "orbit.svg"
    code = run(
        [
            "simulate",
            "--config", satellite_config,
            "--branch", "0",
            "--t-max", "1",
            "--samples", "1000",
            "--csv", str(csv),
            "--svg", str(svg),
        ]
    )
    assert code == 0
    assert svg.exists()
    frame = pd.read_csv(csv)
    assert frame.columns[0] == "t" and len(frame) >= 2

    (summary,) = _stdout_json(capsys)
    assert summary["branch"] == 0
    assert summary["termination"] == "time_limit"
    for name, value in summary["max_drift"].items():
        assert value < 1e-8, name


def test_simulate_all_branches(capsys, tmp_path, satellite_config):
    csv = tmp_path / "traj.csv"
    code = run(
        ["simulate", "--config", satellite_config, "--branch", "all", "--t-min", "-0.1", "--t-max", "0.1", "--samples", "20", "--csv", str(csv)]
    )
    assert code == 0
    assert len(_stdout_json(capsys)) == 4
    for i in range(4):
        assert (tmp_path / f"traj_b{i}.csv").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--alpha-a", "nan", "--h-a", "-1", "--lambda-a", "-1"],
        ["classify", "--alpha", "-1", "--x0", "0", "--y0", "1", "--h", "-1", "--lambda", "-1"],
        ["classify", "--alpha", "1", "--x0", "0", "--y0", "0", "--h", "-1", "--lambda", "-1"],
        ["classify", "--alpha", "1", "--x0", "0", "--y0", "1"],
        ["diagram", "--alpha-a", THIRD, "--h-a", "0:1"],
        ["simulate", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1", "--q1", "-1.04", "--q2", "0.06",
         "--t-max", "-1"],
        ["simulate", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1", "--q1", "-1.04", "--q2", "0.06",
         "--t-max", "1", "--branch", "7"],
        ["animate"],
        [],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    assert run(argv) == 2


def test_validation_failure_creates_no_files(tmp_path, satellite_config):
    csv, svg = tmp_path / "traj.csv", tmp_path / "orbit.svg"
    code = run(["simulate", "--config", satellite_config, "--t-max", "1", "--t-min", "2", "--csv", str(csv), "--svg", str(svg)])
    assert code == 2
    assert not csv.exists() and not svg.exists()


def test_missing_output_directory(tmp_path):
    target = tmp_path / "missing" / "out.json"
    assert run(["classify", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1", "--json", str(target)]) == 2


def test_forbidden_caustics_exit_3(capsys, tmp_path):
    svg = tmp_path / "region.svg"
    code = run(["caustics", "--alpha-a", THIRD, "--h-a", "-3", "--lambda-a", "0", "--svg", str(svg)])
    assert code == 3
    assert "run failed" in capsys.readouterr().err
    assert not svg.exists()


def test_simulate_outside_region_exit_3(satellite_config):
    assert run(["simulate", "--config", satellite_config, "--q1", "2", "--q2", "2", "--t-max", "1"]) == 3


def test_caustics_with_plot(capsys, tmp_path):
    svg = tmp_path / "region.svg"
    assert run(["caustics", "--alpha-a", THIRD, "--h-a", "2", "--lambda-a", "0.5", "--svg", str(svg)]) == 0
    curves = _stdout_json(capsys)
    assert sorted(c["kind"] for c in curves) == ["ellipse", "hyperbola", "hyperbola"]
    assert svg.exists()


def test_xcheck_zero_horizon(capsys):
    argv = ["xcheck", "--alpha-a", THIRD, "--h-a", "1.6", "--lambda-a", "2.2", "--q1", "0.5", "--q2", "1", "--t-max", "0"]
    assert run(argv) == 0
    data = _stdout_json(capsys)
    assert data["max_du"] == 0.0 and data["max_dv"] == 0.0


def test_potential_plot(tmp_path):
    svg = tmp_path / "potential.svg"
    assert run(["potential", "--alpha-a", THIRD, "--svg", str(svg), "--extent", "2"]) == 0
    assert svg.exists()


def test_audit_log_records_each_run(capsys, tmp_path):
    audit = tmp_path / "audit.csv"
    run(["--audit-log", str(audit), "classify", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1"])
    run(["--audit-log", str(audit), "caustics", "--alpha-a", THIRD, "--h-a", "-3", "--lambda-a", "0"])
    frame = pd.read_csv(audit)
    assert list(frame["Command"]) == ["classify", "caustics"]
    assert list(frame["Status"]) == ["ok", "exit 3"]


def test_version_exits_cleanly(capsys):
    assert run(["--version"]) == 0
    assert "pair-orbits" in capsys.readouterr().out


def test_xcheck_planetary_orbit(capsys):
    argv = ["xcheck", "--alpha-a", THIRD, "--h-a", "1.6", "--lambda-a", "2.2", "--q1", "0.5", "--q2", "1", "--t-max", "10"]
    assert run(argv) == 0
    data = _stdout_json(capsys)
    assert data["max_du"] < 1e-5
    assert data["max_dv"] < 1e-5


def test_internal_error_is_logged_with_traceback(capsys, caplog, monkeypatch, tmp_path):
    import commands.classify

    def broken(args):
        raise TypeError("broken() takes 2 positional arguments but 3 were given")

    monkeypatch.setattr(commands.classify, "run", broken)
    audit = tmp_path / "audit.csv"

    code = run(["--audit-log", str(audit), "classify", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1"])
    assert code == 3
    assert "internal error" in capsys.readouterr().err

    records = [r for r in caplog.records if r.name == LOGGER_NAME and r.levelname == "ERROR"]
    assert len(records) == 1
    assert "error reference" in records[0].getMessage()
    assert "TypeError" in records[0].getMessage()
    assert records[0].exc_info is not None
    assert list(pd.read_csv(audit)["Status"]) == ["exit 3 (internal)"]


def test_unknown_log_level_from_environment_is_ignored(capsys, caplog, monkeypatch):
    monkeypatch.setenv("PAIR_ORBITS_LOG_LEVEL", "LOUD")
    assert run(["classify", "--alpha-a", THIRD, "--h-a", "-1", "--lambda-a", "-1"]) == 0
    assert any("Ignoring unknown log level" in r.getMessage() for r in caplog.records)
