import csv
import io

import numpy as np
import pytest

from rigidchart import cli
from rigidchart.config import ConfigError, RunConfig, Tolerances, loads
from rigidchart.dynamics import InertiaTensor, euler_rate

ASYM = """\
body.inertia.principal = [1.0, 2.0, 3.0]
initial.system = "n-omega"
initial.n = [0.0, 0.0, 0.0]
initial.momentum = [1.0, 1.0, 1.0]
run.t_end = {t_end}
run.dt_out = {dt_out}
"""


def write(tmp_path, text, name="run.toml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def column(header, rows, name):
    return np.array([float(r[header.index(name)]) for r in rows])


class TestConfig:
    def test_defaults_roundtrip(self):
        cfg = RunConfig()
        assert loads(cfg.dumps()) == cfg

    def test_custom_roundtrip(self):
        cfg = RunConfig(principal=None, matrix=[[2.0, 0.1, 0], [0.1, 2.0, 0], [0, 0, 1.5]],
                        initial_system="n-m", system="euler-poisson", t_end=3.5, project=True,
                        fixed_step=0.01, lane_omega={"n-m": [1.0, 2.0, 3.0]},
                        tolerances=Tolerances(oracle=1e-6))
        assert loads(cfg.dumps()) == cfg

    def test_values(self):
        cfg = loads(ASYM.format(t_end=2.0, dt_out=0.25) + "tolerances.jacobi = 1e-5\n")
        assert cfg.t_end == 2.0 and cfg.dt_out == 0.25
        assert cfg.tolerances.jacobi == 1e-5
        np.testing.assert_array_equal(cfg.inertia().moments, [1.0, 2.0, 3.0])

    @pytest.mark.parametrize("text, key, line", [
        ('run.t_end = 1.0\nrun.dt_out = -2\n', "run.dt_out", 2),
        ('run.system = "q-p"\n', "run.system", 1),
        ('initial.n = [1.0, 2.0]\n', "initial.n", 1),
        ('x = 1\nbody.inertia.principal = [1.0, 1.0, 5.0]\n', "x", 1),
        ('lie.order = 0\n', "lie.order", 1),
        ('body.inertia.principal = [1.0, 1.0, 5.0]\n', "body.inertia.principal", 1),
        ('\ntolerances.nope = 1.0\n', "tolerances.nope", 2),
    ])
    def test_diagnostics(self, text, key, line):
        with pytest.raises(ConfigError) as exc:
            loads(text)
        assert exc.value.key == key
        assert exc.value.line == line

    def test_syntax_error(self):
        with pytest.raises(ConfigError) as exc:
            loads("run.t_end = = 1\n")
        assert "line 1" in str(exc.value)


class TestSimulate:
    def test_spherical_energy(self, tmp_path):
        cfg = write(tmp_path, 'body.inertia.principal = [1.5, 1.5, 1.5]\n'
                              'initial.momentum = [0.3, -0.8, 1.1]\nrun.t_end = 10.0\n')
        out = str(tmp_path / "traj.csv")
        assert cli.main(["simulate", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        assert header[:2] == ["t", "system"] and header[-1] == "orthogonality"
        H = column(header, rows, "H")
        assert np.abs(H - H[0]).max() < 1e-10 * H[0]
        assert {r[1] for r in rows} == {"n-omega"}

    def test_euler_residual(self, tmp_path):
        h = 0.01
        cfg = write(tmp_path, ASYM.format(t_end=2.0, dt_out=h))
        out = str(tmp_path / "traj.csv")
        assert cli.main(["simulate", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        W = np.column_stack([column(header, rows, f"omega{i}") for i in (1, 2, 3)])
        I = InertiaTensor.from_principal([1.0, 2.0, 3.0])
        worst = 0.0
        for k in range(2, len(W) - 2):
            d = (W[k - 2] - 8 * W[k - 1] + 8 * W[k + 1] - W[k + 2]) / (12 * h)
            worst = max(worst, np.abs(d - euler_rate(W[k], I)).max())
        assert worst < 1e-8

    @pytest.mark.parametrize("system", ["n-pi", "n-m", "n-omega", "euler-poisson"])
    def test_rest(self, tmp_path, system):
        cfg = write(tmp_path, ASYM.format(t_end=1.0, dt_out=0.5).replace("[1.0, 1.0, 1.0]",
                                                                         "[0.0, 0.0, 0.0]"))
        out = str(tmp_path / "traj.csv")
        assert cli.main(["simulate", "--config", cfg, "--system", system, "--out", out]) == 0
        header, rows = read_csv(out)
        assert len(rows) == 3
        assert rows[0][2:] == rows[-1][2:]

    def test_deterministic_bytes(self, tmp_path):
        cfg = write(tmp_path, ASYM.format(t_end=3.0, dt_out=0.1))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for p in (a, b):
            assert cli.main(["simulate", "--config", cfg, "--system", "n-pi", "--out", str(p)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_stdout(self, tmp_path, capsys):
        cfg = write(tmp_path, ASYM.format(t_end=0.2, dt_out=0.1))
        assert cli.main(["simulate", "--config", cfg]) == 0
        rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
        assert len(rows) == 4
        assert len(rows[1][0]) > 0 and rows[1][0] == "0"

    def test_runtime_failure(self, tmp_path):
        cfg = write(tmp_path, ASYM.format(t_end=1e4, dt_out=1e3).replace(
            "[1.0, 1.0, 1.0]", "[50.0, 40.0, 30.0]") + "integrator.fixed_step = 1000.0\n")
        with np.errstate(all="ignore"):
            assert cli.main(["simulate", "--config", cfg, "--out", str(tmp_path / "x.csv")]) == 3

    def test_usage_errors(self, tmp_path, capsys):
        assert cli.main(["simulate"]) == 2
        assert cli.main(["simulate", "--config", str(tmp_path / "missing.toml")]) == 2
        bad = write(tmp_path, "run.t_end = \"soon\"\n")
        assert cli.main(["simulate", "--config", bad]) == 2
        assert "run.t_end" in capsys.readouterr().err
        assert cli.main(["simulate", "--config", bad, "--system", "quaternion"]) == 2


class TestVerify:
    def test_e3_contrast_passes(self, tmp_path):
        out = str(tmp_path / "report.csv")
        assert cli.main(["verify", "--suite", "e3-contrast", "--out", out]) == 0
        header, rows = read_csv(out)
        assert header == ["check", "point", "residual", "tolerance", "pass"]
        assert all(r[4] == "true" for r in rows)

    def test_identity_nm_many_samples(self, tmp_path):
        out = str(tmp_path / "report.csv")
        assert cli.main(["verify", "--suite", "identity-nm", "--samples", "1000", "--out", out]) == 0
        assert len(read_csv(out)[1]) == 1000

    def test_unknown_suite(self, capsys):
        assert cli.main(["verify", "--suite", "chart,bogus"]) == 2
        assert "bogus" in capsys.readouterr().err

    def test_seed_changes_points_only(self, tmp_path):
        a, b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        cli.main(["verify", "--suite", "identity-nm", "--seed", "1", "--out", a])
        cli.main(["verify", "--suite", "identity-nm", "--seed", "2", "--out", b])
        assert read_csv(a)[1][0][1] != read_csv(b)[1][0][1]

    def test_default_run_flags_only_identity_nomega(self, tmp_path, capsys):
        out = str(tmp_path / "report.csv")
        assert cli.main(["verify", "--out", out]) == 1
        failed = [line for line in capsys.readouterr().err.splitlines() if line.startswith("FAIL")]
        assert failed == ["FAIL identity-nomega"]


class TestCompare:
    @pytest.mark.parametrize("moments", ["[2.0, 2.0, 1.0]", "[1.0, 2.0, 3.0]"])
    def test_agreement(self, tmp_path, moments):
        cfg = write(tmp_path, f"body.inertia.principal = {moments}\nrun.t_end = 5.0\n")
        out = str(tmp_path / "cmp.csv")
        assert cli.main(["compare", "--config", cfg, "--out", out]) == 0
        header, rows = read_csv(out)
        div = [r for r in rows if r[0] == "divergence"]
        assert len(div) == 6 and all(r[-1] == "true" for r in div)

    def test_mismatched_lane(self, tmp_path):
        cfg = write(tmp_path, 'run.t_end = 5.0\ncompare.lane_omega."n-pi" = [1.0, 1.0, 1.05]\n')
        assert cli.main(["compare", "--config", cfg, "--out", str(tmp_path / "c.csv")]) == 1
