import json
import math
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bmom.cli import main
from bmom.densities import LaplaceDist, ScaledExponentialDist
from bmom.errors import DataError, DomainError
from bmom.report import SCHEMA_VERSION, emit_density_grid, load_csv, render_report

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"
FIXTURE = DATA / "fixture.csv"
THREE = DATA / "three.csv"

# command lines whose JSON output is frozen under tests/golden
GOLDEN_RUNS = {
    "mean_three.json": ["mean", "--data", str(THREE), "--y", "y"],
    "regress_fixture.json": ["regress", "--data", str(FIXTURE), "--y", "y", "--x", "x", "--intercept",
                             "--xf", "1,3", "--ell", "1,1"],
    "errors_fixture.json": ["errors", "--data", str(FIXTURE), "--y", "y", "--x", "x", "--intercept"],
    "sample_fixture.json": ["sample", "--data", str(FIXTURE), "--y", "y", "--x", "x", "--intercept",
                            "--xf", "1,3", "--seed", "7", "--draws", "2000"],
}


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


class TestLoadCsv:
    def test_fixture(self):
        cols = load_csv(FIXTURE, "y", ["x"])
        assert cols == {"y": [1.0, 2.0, 4.0], "x": [0.0, 1.0, 2.0]}

    def test_unknown_column(self):
        with pytest.raises(DataError, match="unknown column"):
            load_csv(FIXTURE, "y", ["z"])

    def test_na_cell(self, tmp_path):
        p = write(tmp_path, "na.csv", "y,x\n1,NA\n2,1\n")
        with pytest.raises(DataError, match=r"row 2, column 'x'"):
            load_csv(p, "y", ["x"])

    def test_empty_cell(self, tmp_path):
        p = write(tmp_path, "e.csv", "y,x\n1,0\n,1\n")
        with pytest.raises(DataError, match=r"row 3, column 'y'"):
            load_csv(p, "y", ["x"])

    def test_ragged(self, tmp_path):
        p = write(tmp_path, "r.csv", "y,x\n1,0\n2\n")
        with pytest.raises(DataError, match="row 3"):
            load_csv(p, "y", ["x"])

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_csv(tmp_path / "nope.csv", "y")

    def test_unselected_columns_ignored(self, tmp_path):
        p = write(tmp_path, "u.csv", "y,note,x\n1,abc,0\n2,,1\n\n")
        assert load_csv(p, "y", ["x"]) == {"y": [1.0, 2.0], "x": [0.0, 1.0]}


class TestRenderReport:
    def test_json_round_trip(self, capsys):
        _, out, _ = run(GOLDEN_RUNS["regress_fixture.json"], capsys)
        report = json.loads(out)
        assert render_report(report).decode() == out
        assert report["schema_version"] == SCHEMA_VERSION

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            render_report({"a": [1.0, math.inf]})

    def test_text(self, capsys):
        code, out, _ = run(["mean", "--data", THREE, "--y", "y", "--format", "text"], capsys)
        assert code == 0
        assert "posterior mean of theta (ybar): 2" in out
        assert "laplace/normal width ratio=1.08" in out


class TestCommands:
    def test_mean(self, capsys):
        code, out, _ = run(["mean", "--data", THREE, "--y", "y", "--level", "0.95"], capsys)
        r = json.loads(out)
        assert code == 0 and r["moments"]["ybar"] == 2.0 and r["moments"]["s2"] == 1.0
        lap = next(iv for iv in r["intervals"] if iv["target"] == "theta" and iv["method"] == "laplace")
        half = math.log(20) / math.sqrt(6)
        assert (lap["lower"], lap["upper"]) == pytest.approx((2 - half, 2 + half), rel=1e-14)

    def test_regress_prediction(self, capsys):
        _, out, _ = run(GOLDEN_RUNS["regress_fixture.json"], capsys)
        p = json.loads(out)["prediction"]
        assert p["y_hat_f"] == pytest.approx(16 / 3, abs=1e-12)
        assert p["s_e2"] == pytest.approx(5 / 9, abs=1e-12)

    def test_compare_ratio(self, capsys):
        _, out, _ = run(["compare", "--data", THREE, "--y", "y"], capsys)
        t = json.loads(out)["comparison"]["targets"][0]
        assert t["width_ratio"]["laplace_normal"] == pytest.approx(1.081, abs=1e-3)

    def test_errors(self, capsys):
        _, out, _ = run(GOLDEN_RUNS["errors_fixture.json"], capsys)
        errs = json.loads(out)["realized_errors"]
        assert errs[1]["conditional_variance"] == pytest.approx(1 / 18, abs=1e-12)
        assert errs[1]["laplace_scale"] == pytest.approx(1 / 6, abs=1e-12)

    def test_ar(self, tmp_path, capsys):
        p = write(tmp_path, "s.csv", "y\n" + "\n".join(str(v) for v in [1.0, 2.1, 2.9, 4.2, 4.8, 6.3, 6.9]) + "\n")
        _, out, _ = run(["ar", "--data", p, "--y", "y", "--lags", "1"], capsys)
        r = json.loads(out)
        assert r["model"] == "ar" and r["data"]["k"] == 2
        assert [c["name"] for c in r["moments"]["coefficients"]] == ["const", "lag1"]

    def test_prior(self, capsys):
        code, out, _ = run(["regress", "--data", FIXTURE, "--y", "y", "--x", "x", "--intercept",
                            "--prior-data", FIXTURE, "--prior-y", "y"], capsys)
        r = json.loads(out)
        assert code == 0 and r["moments"]["s2"] == pytest.approx(1 / 12, abs=1e-12)
        assert r["prior"]["n_c"] == 3

    def test_sample_draws_out(self, tmp_path, capsys):
        dest = tmp_path / "draws.csv"
        code, out, _ = run(["sample", "--data", FIXTURE, "--y", "y", "--x", "x", "--intercept",
                            "--seed", "3", "--draws", "50", "--draws-out", dest], capsys)
        assert code == 0 and json.loads(out)["seed"] == 3
        lines = dest.read_text().splitlines()
        assert lines[0] == "sigma2,beta_1,beta_2" and len(lines) == 51

    def test_seed_from_env(self, monkeypatch, capsys):
        monkeypatch.setenv("BMOM_SEED", "3")
        _, a, _ = run(["sample", "--data", FIXTURE, "--y", "y", "--x", "x", "--draws", "50"], capsys)
        _, b, _ = run(["sample", "--data", FIXTURE, "--y", "y", "--x", "x", "--draws", "50", "--seed", "3"], capsys)
        assert a == b

    def test_density(self, capsys):
        code, out, _ = run(["density", "--data", THREE, "--y", "y", "--grid", "11"], capsys)
        lines = out.splitlines()
        assert code == 0 and lines[0] == "x\tpdf" and len(lines) == 12

    def test_density_targets(self, capsys):
        base = ["density", "--data", FIXTURE, "--y", "y", "--x", "x", "--intercept", "--grid", "5"]
        for extra in (["--target", "sigma2"], ["--target", "beta:x"], ["--target", "y_f", "--xf", "1,3"],
                      ["--target", "ell", "--ell", "1,1"], ["--target", "error:1", "--conditional"]):
            code, out, _ = run(base + extra, capsys)
            assert code == 0 and len(out.splitlines()) == 6


class TestMeanRegressEquivalence:
    def test_field_for_field(self, tmp_path, capsys):
        p = write(tmp_path, "v.csv", "y\n0.3\n1.9\n2.2\n4.0\n1.1\n3.3\n2.8\n")
        _, a, _ = run(["mean", "--data", p, "--y", "y"], capsys)
        _, b, _ = run(["regress", "--data", p, "--y", "y", "--intercept"], capsys)
        m, r = json.loads(a), json.loads(b)
        assert r["moments"]["coefficients"][0]["estimate"] == pytest.approx(m["moments"]["ybar"], abs=1e-12)
        for key in ("s2", "dof"):
            assert r["moments"][key] == pytest.approx(m["moments"][key], abs=1e-12)
        np.testing.assert_allclose(r["moments"]["residuals"], m["moments"]["residuals"], atol=1e-12)
        assert r["prediction"]["s_e2"] == pytest.approx((1 + 1 / 7) * m["moments"]["s2"], abs=1e-12)
        ivm = [(iv["method"], iv["lower"], iv["upper"]) for iv in m["intervals"]]
        ivr = [(iv["method"], iv["lower"], iv["upper"]) for iv in r["intervals"]]
        assert [t[0] for t in ivm] == [t[0] for t in ivr]
        np.testing.assert_allclose([t[1:] for t in ivm], [t[1:] for t in ivr], atol=1e-12)
        cm, cr = m["comparison"], r["comparison"]
        assert cm["nu"] == cr["nu"] and cm["excess_kurtosis"] == cr["excess_kurtosis"]
        assert cr["targets"][0]["width_ratio"]["laplace_normal"] == pytest.approx(
            cm["targets"][0]["width_ratio"]["laplace_normal"], abs=1e-12)


class TestExitCodes:
    def test_unknown_column(self, capsys):
        code, out, err = run(["regress", "--data", FIXTURE, "--y", "y", "--x", "nope"], capsys)
        assert code == 1 and out == ""
        assert err.startswith("bmom: error: data: ") and err.count("\n") == 1

    def test_zero_variance(self, tmp_path, capsys):
        p = write(tmp_path, "c.csv", "y\n5\n5\n5\n")
        code, _, err = run(["mean", "--data", p, "--y", "y"], capsys)
        assert code == 1 and "zero-variance" in err

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["mean", "--data", str(THREE)])
        assert exc.value.code == 2

    def test_usage_semantic(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["predict", "--data", str(FIXTURE), "--y", "y", "--x", "x"])
        assert exc.value.code == 2

    def test_nothing_written_on_error(self, tmp_path, capsys):
        dest = tmp_path / "out.json"
        code, _, _ = run(["regress", "--data", FIXTURE, "--y", "y", "--x", "nope", "--out", dest], capsys)
        assert code == 1 and not dest.exists()
        with pytest.raises(SystemExit):
            main(["sample", "--data", str(FIXTURE), "--y", "y", "--draws", "5", "--out", str(dest)])
        assert list(tmp_path.iterdir()) == []

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "out.json"
        code, out, _ = run(GOLDEN_RUNS["regress_fixture.json"] + ["--out", dest], capsys)
        assert code == 0 and out == "" and json.loads(dest.read_text())["data"]["n"] == 3

    @pytest.mark.skipif(shutil.which("bmom") is None, reason="console script not installed")
    def test_console_script(self):
        res = subprocess.run(["bmom", "mean", "--data", str(THREE)], capture_output=True, text=True)
        assert res.returncode == 2
        res = subprocess.run([sys.executable, "-m", "bmom.cli", "mean", "--data", str(THREE), "--y", "y"],
                             capture_output=True, text=True)
        assert res.returncode == 0 and json.loads(res.stdout)["moments"]["ybar"] == 2.0


class TestGolden:
    @pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
    def test_matches_frozen_bytes(self, name, capsys):
        code, out, _ = run(GOLDEN_RUNS[name], capsys)
        assert code == 0
        expected = (GOLDEN / name).read_text(encoding="utf-8")
        # paths are not part of the report, so the bytes do not depend on the checkout location
        assert out == expected

    @pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
    def test_repeatable(self, name, capsys):
        _, a, _ = run(GOLDEN_RUNS[name], capsys)
        _, b, _ = run(GOLDEN_RUNS[name], capsys)
        assert a == b


class TestDensityGrid:
    def test_laplace_peak(self):
        g = emit_density_grid(LaplaceDist(0.0, 1 / math.sqrt(2)))
        assert g.x.size == 401 and g.pdf[200] == pytest.approx(1 / math.sqrt(2), rel=1e-15)
        assert g.x[200] == pytest.approx(0.0, abs=1e-15)
        assert (g.x[0], g.x[-1]) == pytest.approx((-6.0, 6.0), rel=1e-15)

    def test_trapezoid(self):
        g = emit_density_grid(LaplaceDist(1.5, 0.4))
        area = float(np.sum(0.5 * (g.pdf[1:] + g.pdf[:-1]) * np.diff(g.x)))
        assert area == pytest.approx(1.0, abs=1e-3)

    def test_two_points(self):
        g = emit_density_grid(LaplaceDist(0.0, 1.0), points=2)
        assert g.to_tsv().splitlines() == ["x\tpdf", f"{-6 * math.sqrt(2)!r}\t{float(g.pdf[0])!r}",
                                           f"{6 * math.sqrt(2)!r}\t{float(g.pdf[1])!r}"]

    def test_exponential_clipped(self):
        g = emit_density_grid(ScaledExponentialDist(2.0))
        assert g.x[0] == 0.0 and np.all(np.diff(g.x) > 0) and np.all(g.pdf >= 0)

    def test_invalid(self):
        with pytest.raises(DomainError):
            emit_density_grid(LaplaceDist(0.0, 1.0), points=1)
        with pytest.raises(DomainError):
            emit_density_grid(LaplaceDist(0.0, 1.0), range_=(1.0, 1.0))


class TestZeroLeverage:
    def test_error_at_origin_without_intercept(self, capsys):
        # through the origin, the row at x = 0 has zero leverage and a point-mass realized error
        code, _, err = run(["errors", "--data", FIXTURE, "--y", "y", "--x", "x"], capsys)
        assert code == 1 and "degenerate-spread" in err
