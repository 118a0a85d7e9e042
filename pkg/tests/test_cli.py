import json
import math

import pytest

import ptcircle.secular
from ptcircle.cli import main
from ptcircle.spectrum import SpectrumRequest, scan_roots


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def csv_rows(out: str) -> tuple[list[str], list[list[str]]]:
    lines = [ln for ln in out.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


class TestSpectrumCommand:
    def test_hermitian_energies(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--Z", "0", "--smax", "10")
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["n", "branch", "s", "t", "E", "residual"]
        energies = sorted({round(float(r[4]), 6) for r in rows})
        assert energies == pytest.approx([math.pi**2, 4 * math.pi**2, 9 * math.pi**2], abs=1e-5)

    def test_doublet_row_count(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--Z", "0.1", "--smax", "7")
        assert code == 0
        _, rows = csv_rows(out)
        assert len(rows) == 5

    def test_negative_coupling_is_usage_error(self, capsys):
        code, out, err = run_cli(capsys, "spectrum", "--Z", "-1", "--smax", "10")
        assert code == 64
        assert "usage error" in err
        assert out == ""

    def test_schema_comments(self, capsys):
        _, out, _ = run_cli(capsys, "spectrum", "--Z", "0.5", "--smax", "4")
        lines = out.splitlines()
        assert lines[0] == "n,branch,s,t,E,residual"
        assert "# schema_version=1" in lines
        assert "# input.Z=0.5" in lines

    def test_json_format(self, capsys):
        code, out, _ = run_cli(capsys, "spectrum", "--Z", "0.5", "--smax", "4",
                               "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema_version"] == "1"
        assert payload["command"] == "spectrum"
        assert payload["inputs"] == {"Z": 0.5, "smax": 4.0}
        assert payload["columns"][0] == "n"
        assert len(payload["rows"]) == 3

    def test_determinism(self, capsys):
        _, out1, _ = run_cli(capsys, "spectrum", "--Z", "2", "--smax", "9")
        _, out2, _ = run_cli(capsys, "spectrum", "--Z", "2", "--smax", "9")
        assert out1 == out2

    def test_meta_opt_in(self, capsys):
        _, plain, _ = run_cli(capsys, "spectrum", "--Z", "1", "--smax", "4")
        _, with_meta, _ = run_cli(capsys, "spectrum", "--Z", "1", "--smax", "4", "--meta")
        assert "# meta.package=ptcircle" not in plain
        assert "# meta.package=ptcircle" in with_meta

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "spec.csv"
        code, out, _ = run_cli(capsys, "spectrum", "--Z", "1", "--smax", "4",
                               "--out", str(path))
        assert code == 0
        assert out == ""
        content = path.read_text()
        assert content.startswith("n,branch,")
        assert content.endswith("\n")


class TestCriticalCommand:
    def test_count_one(self, capsys):
        code, out, _ = run_cli(capsys, "critical", "--count", "1")
        assert code == 0
        _, rows = csv_rows(out)
        assert len(rows) == 1
        assert float(rows[0][1]) == pytest.approx(5.5423095, abs=1e-6)

    def test_count_five_pinned_intervals(self, capsys):
        code, out, _ = run_cli(capsys, "critical", "--count", "5")
        assert code == 0
        _, rows = csv_rows(out)
        zs = [float(r[1]) for r in rows]
        assert 5.542309 < zs[0] < 5.542310
        assert 17.90123 < zs[1] < 17.90124
        assert abs(zs[2] - 33.54495) < 1e-3
        assert 51.20617 - 1e-4 < zs[3] < 51.20618 + 1e-4
        assert 70.3093 < zs[4] < 70.3095

    def test_invalid_count(self, capsys):
        code, _, err = run_cli(capsys, "critical", "--count", "0")
        assert code == 64
        assert "usage error" in err


class TestBrokenCommand:
    def test_pair_zero_golden(self, capsys):
        code, out, _ = run_cli(capsys, "broken", "--Z", "6", "--pair", "0")
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["Z", "alpha", "beta", "K", "ReE", "eps"]
        row = rows[0]
        assert float(row[1]) == pytest.approx(0.358129, abs=1e-5)
        assert float(row[2]) == pytest.approx(0.622216, abs=1e-5)
        assert float(row[4]) == pytest.approx(5.062183, rel=1e-4)

    def test_pair_one_golden(self, capsys):
        code, out, _ = run_cli(capsys, "broken", "--Z", "17.95", "--pair", "1")
        assert code == 0
        _, rows = csv_rows(out)
        assert float(rows[0][1]) == pytest.approx(0.308679, abs=1e-5)
        assert float(rows[0][2]) == pytest.approx(0.344308, abs=1e-5)
        assert float(rows[0][4]) == pytest.approx(25.61228, rel=1e-4)

    def test_below_fold_exits_2(self, capsys):
        code, out, err = run_cli(capsys, "broken", "--Z", "5", "--pair", "0")
        assert code == 2
        assert "spectrum" in err  # directs the user to the real-spectrum command


class TestTable1Command:
    def test_full_table_reproduces(self, capsys):
        code, out, _ = run_cli(capsys, "table1")
        assert code == 0
        header, rows = csv_rows(out)
        assert len(rows) == 13
        flag_col = header.index("flag")
        role_col = header.index("role")
        for row in rows:
            if row[role_col] == "pinned":
                assert row[flag_col] == "ok"

    def test_fold_row_alpha_beta_equal(self, capsys):
        _, out, _ = run_cli(capsys, "table1")
        header, rows = csv_rows(out)
        first = rows[0]
        assert float(first[0]) == 5.542309
        assert float(first[header.index("alpha")]) == float(first[header.index("beta")])
        assert float(first[header.index("d_alpha")]) == pytest.approx(0.0, abs=1e-5)


class TestFigCommand:
    def test_fig1_positive_tail(self, capsys):
        code, out, _ = run_cli(capsys, "fig", "--which", "1")
        assert code == 0
        header, rows = csv_rows(out)
        assert header == ["t", "value"]
        assert len(rows) == 1000
        for r in rows:
            if float(r[0]) >= 2.0:
                assert float(r[1]) > 0.0

    def test_fig1_oscillates_near_origin(self, capsys):
        _, out, _ = run_cli(capsys, "fig", "--which", "1")
        _, rows = csv_rows(out)
        small_t_vals = [float(r[1]) for r in rows if float(r[0]) < 1.5]
        assert min(small_t_vals) < 0.0 < max(small_t_vals)

    def test_fig2_single_cell(self, capsys):
        code, out, _ = run_cli(capsys, "fig", "--which", "2", "--nt", "1", "--nz", "1",
                               "--t-min", "1", "--t-max", "2", "--z-min", "4", "--z-max", "6")
        assert code == 0
        _, rows = csv_rows(out)
        assert len(rows) == 1
        t, Z, sign = float(rows[0][0]), float(rows[0][1]), int(rows[0][2])
        assert (t, Z) == (1.5, 5.0)
        assert sign in (-1, 0, 1)

    def test_fig2_sign_changes_match_spectrum(self, capsys):
        # single row at Z = 5; window t in (0.5, 3) maps to s in (5/6, 5)
        code, out, _ = run_cli(capsys, "fig", "--which", "2", "--nt", "2000", "--nz", "1",
                               "--t-min", "0.5", "--t-max", "3",
                               "--z-min", "4.95", "--z-max", "5.05")
        assert code == 0
        _, rows = csv_rows(out)
        signs = [int(r[2]) for r in rows]
        flips = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
        pts = scan_roots(SpectrumRequest(Z=5.0, s_max=5.0))
        in_window = [p for p in pts if 0.5 <= p.params.t <= 3.0]
        assert flips == len(in_window)

    def test_fig2_grid_guard(self, capsys):
        code, _, err = run_cli(capsys, "fig", "--which", "2", "--nt", "5000", "--nz", "10")
        assert code == 64
        assert "usage error" in err


class TestCrossCommandConsistency:
    def test_broken_just_above_fold_agrees_with_critical(self, capsys):
        _, out_c, _ = run_cli(capsys, "critical", "--count", "1")
        _, rows_c = csv_rows(out_c)
        z0 = float(rows_c[0][1])
        e_merge = float(rows_c[0][3])
        code, out_b, _ = run_cli(capsys, "broken", "--Z", repr(z0 + 1e-5), "--pair", "0")
        assert code == 0
        _, rows_b = csv_rows(out_b)
        ree = float(rows_b[0][4])
        assert abs(ree - e_merge) / e_merge <= 1e-4


class TestVerifyCommand:
    def test_quick_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--level", "quick")
        assert code == 0
        assert "FAIL" not in out
        assert "PASS factorization-identity" in out

    def test_injected_sign_bug_trips_identity(self, capsys, monkeypatch):
        real = ptcircle.secular.secular_factor

        def buggy(params, branch):
            value = real(params, branch)
            return -value if branch is ptcircle.secular.SecularBranch.FACTOR_PLUS else value

        monkeypatch.setattr(ptcircle.secular, "secular_factor", buggy)
        code, out, _ = run_cli(capsys, "verify", "--level", "full")
        assert code == 1
        assert "FAIL factorization-identity" in out


class TestUsageErrors:
    def test_unknown_command(self, capsys):
        code, _, err = run_cli(capsys, "nonsense")
        assert code == 64

    def test_missing_required_flag(self, capsys):
        code, _, err = run_cli(capsys, "spectrum", "--Z", "1")
        assert code == 64
