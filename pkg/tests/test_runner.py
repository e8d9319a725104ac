import pytest

from qfridge.runner import main, parse_args
from qfridge.src.config import OUT_ENV
from qfridge.src.dynamics import cooling_shift
from qfridge.src.output import ResultRecord
from qfridge.src.types import ExperimentKind, UnitaryFamily

from .conftest import BASE


@pytest.fixture(autouse=True)
def no_out_env(monkeypatch):
    monkeypatch.delenv(OUT_ENV, raising=False)


def read_csv(path) -> list[list[str]]:
    raw = path.read_bytes()
    assert raw.endswith(b"\r\n")
    return [line.split(",") for line in raw.decode().split("\r\n")[:-1]]


def read_summary(root) -> ResultRecord:
    return ResultRecord.decode((root / "summary.json").read_bytes())


def test_spectrum(tmp_path):
    assert main(["spectrum", "-o", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert rows[0] == ["mode", "re", "im", "block"]
    assert len(rows) == 37
    assert float(rows[1][1]) == 0
    assert float(rows[2][1]) < 0
    assert rows[1][3] == "pop"
    assert len(read_csv(tmp_path / "biorthonormality.csv")) == 37

    record = read_summary(tmp_path)
    assert record.ok
    assert record.kind is ExperimentKind.SPECTRUM
    assert record.config.params == BASE
    assert record.scalars["census"] == "6 + 4x2 + 22 = 36"
    assert record.scalars["zero_modes"] == 1
    assert record.scalars["max_biorthonormality_residual"] < 1e-10
    assert record.tables == {"spectrum": "spectrum.csv", "biorthonormality": "biorthonormality.csv"}


def test_closed_system_fails(tmp_path):
    assert main(["spectrum", "-o", str(tmp_path), "--kappa", "0"]) == 1
    record = read_summary(tmp_path)
    assert not record.ok
    assert record.scalars["zero_modes"] > 1


def test_invalid_parameters_fail(tmp_path):
    assert main(["spectrum", "-o", str(tmp_path), "--g", "0.9"]) == 1
    assert not (tmp_path / "summary.json").exists()


def test_config_file_under_command_line(tmp_path):
    fp = tmp_path / "run.yaml"
    fp.write_text("E0: 0.8\nTh: 4.0\nfamilies: [local_both]\nstarts: 4\n")
    _, args = parse_args(["mpemba", "-c", str(fp), "--E0", "0.9"])
    assert args.E0 == 0.9
    assert args.Th == 4.0
    assert args.Tc == 1.0
    assert args.families == [UnitaryFamily.LOCAL_BOTH]
    assert args.starts == 4
    _, args = parse_args(["mpemba", "-c", str(fp), "-f", "global", "-f", "local-qubit"])
    assert args.families == [UnitaryFamily.GLOBAL, UnitaryFamily.LOCAL_QUBIT]


def test_bad_config_file(tmp_path):
    fp = tmp_path / "run.yaml"
    fp.write_text("E0: 0.8\ncolour: blue\n")
    assert main(["spectrum", "-c", str(fp), "-o", str(tmp_path)]) == 1


def test_out_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path))
    assert main(["spectrum"]) == 0
    assert (tmp_path / "summary.json").exists()


def test_steady_sweep_single_point(tmp_path):
    argv = ["steady-sweep", "-o", str(tmp_path)]
    argv += ["--axis1", "g:0.001:0.001:1", "--axis2", "kappa_hw:1e-4:1e-4:1"]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "steady_sweep.csv")
    assert rows[0] == ["param1", "param2", "delta_T", "T_s"]
    assert len(rows) == 2
    shift = cooling_shift(BASE)
    assert float(rows[1][2]) == pytest.approx(shift.delta_T, rel=1e-12)
    assert float(rows[1][3]) == pytest.approx(shift.T_s, rel=1e-12)
    record = read_summary(tmp_path)
    assert record.scalars["cooling_points"] == 1
    assert record.scalars["param2"] == "kappa_hw"


def test_steady_sweep_row_major(tmp_path):
    argv = ["steady-sweep", "-o", str(tmp_path)]
    argv += ["--axis1", "g:0.01:0.02:2", "--axis2", "kappa:1e-4:1e-3:2"]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "steady_sweep.csv")[1:]
    assert [(float(a), float(b)) for a, b, *_ in rows] == [
        (0.01, 1e-4),
        (0.01, 1e-3),
        (0.02, 1e-4),
        (0.02, 1e-3),
    ]
    assert all(r[2] for r in rows)


def test_overlapping_axes_rejected(tmp_path):
    argv = ["steady-sweep", "-o", str(tmp_path)]
    argv += ["--axis1", "kappa_h:1e-4:1e-3:2", "--axis2", "kappa_hw:1e-4:1e-3:2"]
    assert main(argv) == 1


def test_evolve_thermal(tmp_path):
    assert main(["evolve", "-o", str(tmp_path), "--grid-points", "60"]) == 0
    rows = read_csv(tmp_path / "trajectory_thermal.csv")
    assert rows[0] == ["t", "distance", "qubit_temperature"]
    assert len(rows) == 62
    assert float(rows[1][0]) == 0
    assert float(rows[1][2]) == pytest.approx(BASE.Tc)
    record = read_summary(tmp_path)
    assert record.scalars["thermal.t_ss"] > 0
    assert record.scalars["thermal.initial_distance"] == pytest.approx(float(rows[1][1]))


def test_mpemba_infeasible_family(tmp_path):
    argv = ["mpemba", "-o", str(tmp_path), "-f", "local-qubit"]
    argv += ["--starts", "1", "--max-evals", "60", "--grid-points", "80"]
    assert main(argv) == 0
    record = read_summary(tmp_path)
    assert record.ok
    assert record.scalars["local_qubit.feasible"] is False
    assert record.scalars["local_qubit.residual"] > 1e-6
    assert (tmp_path / "trajectory_thermal.csv").exists()
    assert not (tmp_path / "trajectory_local_qubit.csv").exists()


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        main(["-V"])
    assert e.value.code == 0
    assert "qfridge 0.1.0" in capsys.readouterr().out


def test_timing_sweep_infeasible_family(tmp_path):
    argv = ["timing-sweep", "-o", str(tmp_path), "-f", "local-qubit"]
    argv += ["--axis1", "g:0.001:0.001:1", "--axis2", "kappa:1e-4:1e-3:2"]
    argv += ["--starts", "1", "--max-evals", "60", "--grid-points", "80"]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "timing_sweep.csv")
    assert rows[0] == ["g", "kappa", "t_M", "t_ss", "feasible"]
    assert [r[2:] for r in rows[1:]] == [["", "", "false"]] * 2
    record = read_summary(tmp_path)
    assert record.scalars["feasible_points"] == 0
    assert record.scalars["family"] == "local_qubit"


@pytest.mark.slow
def test_mpemba_global_family(tmp_path):
    argv = ["mpemba", "-o", str(tmp_path), "-f", "global", "--observable", "temperature"]
    assert main(argv + ["--starts", "8"]) == 0
    record = read_summary(tmp_path)
    assert record.ok
    assert record.scalars["global.feasible"] is True
    assert record.scalars["global.verified"] is True
    assert record.scalars["global.failed_condition"] is None
    assert record.scalars["global.t_M"] > 0
    assert record.scalars["global.t_ss"] < record.scalars["t_ss_reference"]
    assert "global.t_M_temperature" in record.scalars
    assert record.scalars["fastest_family"] == "global"
    rows = read_csv(tmp_path / "trajectory_global.csv")
    assert rows[0] == ["t", "distance", "qubit_temperature"]
    thermal = read_csv(tmp_path / "trajectory_thermal.csv")
    assert len(rows) == len(thermal)
    assert float(rows[1][1]) > float(thermal[1][1])
    assert record.tables["trajectory_global"] == "trajectory_global.csv"


@pytest.mark.slow
def test_mpemba_local_qutrit_not_verified(tmp_path):
    assert main(["mpemba", "-o", str(tmp_path), "-f", "local-qutrit"]) == 0
    record = read_summary(tmp_path)
    assert record.scalars["local_qutrit.feasible"] is True
    assert record.scalars["local_qutrit.verified"] is False
    assert record.scalars["local_qutrit.failed_condition"] == "steady-state-time"
    assert record.scalars["fastest_family"] is None
    assert not (tmp_path / "trajectory_local_qutrit.csv").exists()


@pytest.mark.slow
def test_timing_sweep_global_family(tmp_path):
    argv = ["timing-sweep", "-o", str(tmp_path), "-f", "global", "--starts", "8"]
    argv += ["--axis1", "g:0.001:0.001:1", "--axis2", "kappa:1e-4:1e-4:1"]
    assert main(argv) == 0
    rows = read_csv(tmp_path / "timing_sweep.csv")
    assert len(rows) == 2
    _, _, t_M, t_ss, feasible = rows[1]
    assert feasible == "true"
    assert 0 < float(t_M) < float(t_ss)
    record = read_summary(tmp_path)
    assert record.scalars["feasible_points"] == 1
    assert record.scalars["crossing_points"] == 1
