"""Tests for the bsns command-line interface."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
import yaml

from bsns.cli import EXIT_INVALID, EXIT_NONCONVERGENCE, EXIT_NUMERICAL, EXIT_OK, build_parser, run
from bsns.exceptions import InvalidParameterError
from bsns.snapshot import read_snapshot

_SMALL = {"grid": {"Nz": 24, "Nx": 16}, "time": {"Nt": 8}}


def _write_config(tmp_path: Path, **overrides: dict) -> Path:
    document = {key: dict(value) for key, value in _SMALL.items()}
    for key, value in overrides.items():
        document.setdefault(key, {}).update(value)
    path = tmp_path / "run.yaml"
    path.write_text(yaml.safe_dump(document), encoding="utf-8")
    return path


class TestExponentCommands:
    """Tests for admissible and kernel-eval."""

    def test_admissible_solves_q(self, capsys: pytest.CaptureFixture[str]) -> None:
        """--r alone prints the admissible q."""
        assert run(["admissible", "--a", "0", "--d", "1", "--r", "3"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "q=3 r=3 m=inf status=admissible"

    def test_admissible_reports_partner_exponent(self, capsys: pytest.CaptureFixture[str]) -> None:
        """The anomalous regime also prints q_inf."""
        assert run(["admissible", "--a", "-0.5", "--d", "1", "--r", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "q=3 " in out
        assert "q_inf=4.8" in out

    def test_admissible_classifies_triple(self, capsys: pytest.CaptureFixture[str]) -> None:
        """--q classifies the given triple."""
        assert run(["admissible", "--a", "0", "--d", "1", "--r", "inf", "--q", "2"]) == EXIT_OK
        assert "status=endpoint" in capsys.readouterr().out
        assert run(["admissible", "--a", "0", "--d", "1", "--r", "3", "--q", "4"]) == EXIT_OK
        assert "status=inadmissible" in capsys.readouterr().out

    def test_admissible_outside_window_exits_invalid(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Parameter errors map to exit code 1."""
        assert run(["admissible", "--a", "0", "--d", "1", "--r", "1.5"]) == EXIT_INVALID
        assert capsys.readouterr().err.startswith("Error:")

    def test_kernel_eval(self, capsys: pytest.CaptureFixture[str]) -> None:
        """|S_0(1, 1, 1)| = cos(1/2)/sqrt(pi)."""
        assert run(["kernel-eval", "--a", "0", "--z", "1", "--zeta", "1", "--t", "1"]) == EXIT_OK
        fields = dict(item.split("=") for item in capsys.readouterr().out.split())
        assert float(fields["abs"]) == pytest.approx(math.cos(0.5) / math.sqrt(math.pi))

    def test_kernel_eval_at_time_zero_exits_invalid(self) -> None:
        """The kernel is singular at t = 0."""
        assert run(["kernel-eval", "--a", "0", "--z", "1", "--t", "0"]) == EXIT_INVALID

    def test_command_is_required(self) -> None:
        """Running without a subcommand is invalid input, not a numerical failure."""
        assert run([]) == EXIT_INVALID

    @pytest.mark.parametrize(
        "argv",
        [
            ["no-such-command"],
            ["admissible", "--a", "0", "--d", "1"],
            ["admissible", "--a", "zero", "--d", "1", "--r", "3"],
            ["kernel-eval", "--a", "0", "--z", "1", "--t", "1", "--bogus", "2"],
        ],
    )
    def test_usage_errors_exit_invalid(self, argv: list[str], capsys: pytest.CaptureFixture[str]) -> None:
        """Unknown commands, missing flags and bad values exit with 1."""
        assert run(argv) == EXIT_INVALID
        assert "Error:" in capsys.readouterr().err

    def test_parser_raises_invalid_parameter(self) -> None:
        """The parser raises instead of calling sys.exit."""
        with pytest.raises(InvalidParameterError):
            build_parser().parse_args(["admissible"])


class TestSolveCommands:
    """Tests for solve-linear and solve-nonlinear."""

    def test_solve_linear_writes_outputs(self, tmp_path: Path) -> None:
        """Snapshot, trace, mass table and manifest land in --out."""
        out = tmp_path / "out"
        assert run(["solve-linear", "-c", str(_write_config(tmp_path)), "-o", str(out)]) == EXIT_OK
        names = {p.name for p in out.iterdir()}
        assert {"solution.bsns", "solution.bsns.json", "solution.trace.bsns", "mass.csv", "manifest.json"} <= names

        manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
        assert "solution.bsns" in manifest["files"]
        assert manifest["config_sha256"] is not None
        assert read_snapshot(out / "solution.bsns").kind == "space_time"

    def test_zero_coupling_nonlinear_matches_linear(self, tmp_path: Path) -> None:
        """solve-nonlinear with mu = 0 writes the linear field."""
        config = str(_write_config(tmp_path))
        assert run(["solve-linear", "-c", config, "-o", str(tmp_path / "linear")]) == EXIT_OK
        assert run(["solve-nonlinear", "-c", config, "-o", str(tmp_path / "nonlinear")]) == EXIT_OK
        linear = read_snapshot(tmp_path / "linear" / "solution.bsns")
        nonlinear = read_snapshot(tmp_path / "nonlinear" / "solution.bsns")
        assert np.array_equal(linear.values, nonlinear.values)
        assert (tmp_path / "nonlinear" / "picard.csv").exists()

    def test_unknown_key_exits_invalid(self, tmp_path: Path) -> None:
        """A configuration with an unknown key exits with 1."""
        config = _write_config(tmp_path, grid={"Ny": 8})
        assert run(["solve-linear", "-c", str(config), "-o", str(tmp_path / "out")]) == EXIT_INVALID

    def test_nonconvergence_exit_code(self, tmp_path: Path) -> None:
        """An exhausted Picard budget exits with 3."""
        config = _write_config(tmp_path, mu={"re": 1.0}, solver={"max_iter": 1, "tol": 1e-15})
        assert run(["solve-nonlinear", "-c", str(config), "-o", str(tmp_path / "out")]) == EXIT_NONCONVERGENCE

    def test_divergence_exit_code(self, tmp_path: Path) -> None:
        """An iterate above the ceiling exits with 2."""
        config = _write_config(tmp_path, mu={"re": 1.0}, solver={"ceiling": 1e-6})
        assert run(["solve-nonlinear", "-c", str(config), "-o", str(tmp_path / "out")]) == EXIT_NUMERICAL


class TestVerifyCommands:
    """Tests for the verify-* commands."""

    def test_verify_dispersive(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """The fit table has one row per sample time."""
        out = tmp_path / "out"
        assert run(["verify-dispersive", "--a", "0", "--samples", "3", "-o", str(out)]) == EXIT_OK
        lines = (out / "dispersive.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "t,sup,envelope_ratio"
        assert len(lines) == 4
        assert "slope" in capsys.readouterr().out

    def test_verify_strichartz_is_reproducible(self, tmp_path: Path) -> None:
        """Two runs with one seed write identical tables."""
        config = str(_write_config(tmp_path))
        tables = []
        for name in ("first", "second"):
            out = tmp_path / name
            assert run(["verify-strichartz", "-c", config, "--ensemble", "2", "-o", str(out)]) == EXIT_OK
            tables.append((out / "strichartz_homogeneous.csv").read_bytes())
        assert tables[0] == tables[1]
        assert len(tables[0].decode("utf-8").splitlines()) == 3

    def test_verify_strichartz_rejects_inadmissible_exponents(self, tmp_path: Path) -> None:
        """--q and --r must form an admissible pair."""
        config = str(_write_config(tmp_path))
        argv = ["verify-strichartz", "-c", config, "--q", "4", "--r", "3", "-o", str(tmp_path / "out")]
        assert run(argv) == EXIT_INVALID

    def test_verify_restriction(self, tmp_path: Path) -> None:
        """The restriction table is written."""
        out = tmp_path / "out"
        argv = ["verify-restriction", "-c", str(_write_config(tmp_path)), "--ensemble", "2", "-o", str(out)]
        assert run(argv) == EXIT_OK
        assert (out / "restriction.csv").exists()

    def test_verify_mass(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        """A real coupling keeps the mass."""
        config = _write_config(
            tmp_path,
            grid={"Nz": 48, "Nx": 32},
            time={"Nt": 32},
            mu={"re": 1.0},
            data={"u0": {"type": "gaussian", "params": {"amplitude": 0.1}}},
        )
        out = tmp_path / "out"
        assert run(["verify-mass", "-c", str(config), "-o", str(out)]) == EXIT_OK
        assert (out / "mass_identity.csv").exists()
        drift = float(capsys.readouterr().out.split("relative mass drift:")[1].split()[0])
        assert drift <= 1e-3

    def test_verify_mass_rejects_forcing(self, tmp_path: Path) -> None:
        """The mass identity is only checked for unforced runs."""
        config = _write_config(tmp_path, mu={"re": 1.0}, data={"F": {"type": "gaussian"}})
        assert run(["verify-mass", "-c", str(config), "-o", str(tmp_path / "out")]) == EXIT_INVALID

    def test_verify_trace(self, tmp_path: Path) -> None:
        """Trace profiles are tabulated per member and depth."""
        config = _write_config(tmp_path, grid={"scheme": "gauss_jacobi", "Zmax": 4.0, "Nz": 48})
        out = tmp_path / "out"
        assert run(["verify-trace", "-c", str(config), "--ensemble", "1", "-o", str(out)]) == EXIT_OK
        lines = (out / "trace_profile.csv").read_text(encoding="utf-8").splitlines()
        assert lines[0] == "member,z,distance,trace_norm"
        assert len(lines) == 1 + 2 * 5
