"""Command-line surface: configs, formats, exit codes, output contracts."""

import contextlib
import io
import json
import math
from fractions import Fraction as F

import pytest

from supratoa.cli import main
from supratoa.kernel_solver import solve_kernel_harmonic
from supratoa.serialize import kernel_from_dict

COMMANDS = ["kernel", "classical-limit", "commutator", "weyl-compare", "grid", "toa"]


def invoke(args):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(args)
    return code, out.getvalue(), err.getvalue()


def write_config(tmp_path, text, name="run.conf"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


class TestEntryPoints:
    def test_help_exits_clean(self):
        code, out, _ = invoke(["--help"])
        assert code == 0
        assert "Usage" in out

    def test_bare_invocation_is_usage_error(self):
        code, out, err = invoke([])
        assert code == 1
        assert not out
        assert "Usage" in err

    def test_unknown_command(self):
        code, _, err = invoke(["frobnicate"])
        assert code == 1
        assert "frobnicate" in err

    @pytest.mark.parametrize("cmd", COMMANDS)
    def test_config_required(self, cmd):
        code, _, err = invoke([cmd])
        assert code == 1
        assert "--config" in err

    @pytest.mark.parametrize("cmd", COMMANDS)
    def test_seed_config_emits_parseable_text(self, cmd):
        code, out, _ = invoke([cmd, "--seed-config"])
        assert code == 0
        assert "potential" in out


class TestSeedConfigsReplay:
    @pytest.mark.parametrize("cmd", COMMANDS)
    def test_every_seed_config_runs_green(self, cmd, tmp_path):
        _, seed_text, _ = invoke([cmd, "--seed-config"])
        path = write_config(tmp_path, seed_text, name=f"{cmd}.conf")
        code, out, err = invoke([cmd, "--config", path])
        assert code == 0, f"{cmd} failed on its own seed config: {err or out}"
        assert out


class TestConfigErrors:
    def test_unknown_key(self, tmp_path):
        path = write_config(tmp_path, "potential = free\nwibble = 3\n")
        code, _, err = invoke(["kernel", "--config", path])
        assert code == 1
        assert "wibble" in err

    def test_bad_rational_names_key(self, tmp_path):
        path = write_config(tmp_path, "potential = free\nmu = nope\n")
        code, _, err = invoke(["kernel", "--config", path])
        assert code == 1
        assert "mu" in err

    def test_bad_potential_token(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1/0\n")
        code, _, err = invoke(["kernel", "--config", path])
        assert code == 1
        assert "potential" in err

    def test_missing_file(self):
        code, _, err = invoke(["kernel", "--config", "/nonexistent/nowhere.conf"])
        assert code == 1
        assert err

    def test_json_grid_rejected(self, tmp_path):
        path = write_config(tmp_path, "grid_kind = kernel\npotential = free\nformat = json\n")
        code, _, err = invoke(["grid", "--config", path])
        assert code == 1
        assert "csv" in err


class TestKernelCommand:
    def test_free_table_is_single_seed_entry(self, tmp_path):
        path = write_config(tmp_path, "potential = free\njmax = 6\n")
        code, out, _ = invoke(["kernel", "--config", path])
        assert code == 0
        data = json.loads(out)
        assert data["entries"] == [{"m": 1, "j": 0, "s": 0, "coeff": "1/4"}]

    def test_harmonic_table_round_trips_to_solver_output(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1/2\nmu = 1\njmax = 6\n")
        code, out, _ = invoke(["kernel", "--config", path])
        assert code == 0
        assert kernel_from_dict(json.loads(out)) == solve_kernel_harmonic(1, 6)

    def test_csv_format(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1/2\njmax = 4\nformat = csv\n")
        code, out, _ = invoke(["kernel", "--config", path])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "m,j,s,coeff"
        assert len(lines) == 1 + len(solve_kernel_harmonic(1, 4).A)

    def test_format_flag_overrides_config(self, tmp_path):
        path = write_config(tmp_path, "potential = free\nformat = json\n")
        code, out, _ = invoke(["kernel", "--config", path, "--format", "csv"])
        assert code == 0
        assert out.splitlines()[0] == "m,j,s,coeff"

    def test_out_writes_file(self, tmp_path):
        conf = write_config(tmp_path, "potential = 2:1/2\njmax = 3\n")
        target = tmp_path / "kernel.json"
        code, out, _ = invoke(["kernel", "--config", conf, "--out", str(target)])
        assert code == 0
        assert not out.strip()
        assert kernel_from_dict(json.loads(target.read_text())) == solve_kernel_harmonic(1, 3)


class TestClassicalLimitCommand:
    def test_harmonic_matches_with_empty_residual(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1/2\njmax = 6\nkmax = 6\n")
        code, out, _ = invoke(["classical-limit", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["all_match"] is True
        assert data["linear_system"] is True
        assert data["hbar2_residual"] == []
        assert all(row["equal"] for row in data["terms"])

    def test_quartic_matches_with_obstruction(self, tmp_path):
        path = write_config(tmp_path, "potential = 4:1\njmax = 6\nkmax = 6\n")
        code, out, _ = invoke(["classical-limit", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["all_match"] is True
        assert data["linear_system"] is False
        assert data["hbar2_residual"]  # nonlinear systems keep hbar^2 terms

    def test_shifted_arrival_point(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1\nmu = 1\nx = 1/2\njmax = 6\nkmax = 6\n")
        code, out, _ = invoke(["classical-limit", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["all_match"] is True


class TestWeylCompareCommand:
    def test_quartic_obstruction_note(self, tmp_path):
        path = write_config(tmp_path, "potential = 4:1\nkmax = 6\n")
        code, out, _ = invoke(["weyl-compare", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["weyl_equals_classical"] is True
        assert data["full_minus_weyl_nonzero"] is True
        assert "obstruction" in data.get("note", "")

    def test_harmonic_has_no_obstruction(self, tmp_path):
        path = write_config(tmp_path, "potential = 2:1/2\nkmax = 6\n")
        code, out, _ = invoke(["weyl-compare", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["weyl_equals_classical"] is True
        assert data["linear_system"] is True
        assert data["full_minus_weyl_nonzero"] is False
        assert "note" not in data


class TestGridCommand:
    def test_kernel_grid_row_count(self, tmp_path):
        path = write_config(
            tmp_path,
            "grid_kind = kernel\npotential = 2:1/2\njmax = 4\n"
            "qmin = -1\nqmax = 1\nnq = 5\nqpmin = -1\nqpmax = 1\nnqp = 4\nformat = csv\n",
        )
        code, out, _ = invoke(["grid", "--config", path])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,qp,re,im"
        assert len(lines) == 1 + 5 * 4

    def test_dense_kernel_grid_row_count(self, tmp_path):
        path = write_config(
            tmp_path,
            "grid_kind = kernel\npotential = 2:1/2\njmax = 6\n"
            "qmin = -1\nqmax = 1\nnq = 50\nqpmin = -1\nqpmax = 1\nnqp = 50\nformat = csv\n",
        )
        code, out, _ = invoke(["grid", "--config", path])
        assert code == 0
        assert len(out.strip().splitlines()) == 1 + 2500

    def test_toa_grid_values_are_finite_in_region(self, tmp_path):
        path = write_config(
            tmp_path,
            "grid_kind = toa\npotential = 2:1/2\nkmax = 10\n"
            "qmin = 0.1\nqmax = 0.3\nnq = 3\npmin = 1\npmax = 2\nnp = 3\nformat = csv\n",
        )
        code, out, _ = invoke(["grid", "--config", path])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "q,p,toa"
        assert len(lines) == 10
        for line in lines[1:]:
            toa = float(line.split(",")[2])
            assert math.isfinite(toa)
            assert toa < 0  # forward motion toward a later arrival at x = 0


class TestToaCommand:
    def test_report_fields_and_consistency(self, tmp_path):
        path = write_config(
            tmp_path, "potential = 2:1/2\nq = 1/5\np = 1\nkmax = 12\nquad_abs_tol = 1e-11\n"
        )
        code, out, _ = invoke(["toa", "--config", path])
        data = json.loads(out)
        assert code == 0
        assert data["converges"] is True
        assert data["convergence_ratio"] == pytest.approx(0.02, abs=1e-12)
        assert data["quadrature_value"] == pytest.approx(-math.atan(0.2), abs=1e-10)
        assert abs(data["difference"]) <= data["tail_bound"] + 1e-9
        assert data["verified"] is True

    def test_forbidden_point_exits_two(self, tmp_path):
        path = write_config(tmp_path, "potential = 1:1\nq = 0\np = 1\nx = 3\n")
        code, _, err = invoke(["toa", "--config", path])
        assert code == 2
        assert "verification failure" in err

    def test_divergent_point_reported_but_not_verified(self, tmp_path):
        # accessible point outside the convergence region: quadrature is
        # fine, the series is meaningless, and exit 0 must not claim it
        path = write_config(tmp_path, "potential = 1:1\nq = 3\np = 1\nkmax = 6\n")
        code, out, _ = invoke(["toa", "--config", path])
        data = json.loads(out)
        assert code == 2
        assert data["converges"] is False
        assert data["verified"] is False
        assert data["tail_bound"] is None  # divergent tail must not leak bare Infinity
        assert math.isfinite(data["quadrature_value"])
