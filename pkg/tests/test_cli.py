"""Front end behavior: flags, config merging, files, exit codes."""

import json
import math
import subprocess
import sys

import pytest

from affsurf.cli import UsageError, main, make_config, run
from affsurf.pointcloud import read_points


class TestConfig:
    def test_verify_defaults(self):
        c = make_config("verify")
        assert c.k == (2.0, 5.0, 1000.0)
        assert c.density == 250.0
        assert c.format == "svg"
        assert c.theta_max == pytest.approx(8 * math.pi)

    def test_k_comma_and_list_forms_agree(self):
        assert make_config("solve", k="2,5").k == make_config("solve", k=["2", "5"]).k

    def test_k_sorted_and_deduplicated(self):
        assert make_config("solve", k="5,2,2").k == (2.0, 5.0)

    def test_geometric_grid_spec(self):
        c = make_config("sweep", k_grid="1e1:1e4:4")
        assert c.k_grid == (10.0, 100.0, 1000.0, 10000.0)

    def test_comma_grid_spec(self):
        assert make_config("hausdorff", k_grid="100,10,1000").k_grid == (10.0, 100.0, 1000.0)

    def test_default_grids_differ_by_command(self):
        assert make_config("hausdorff").k_grid[0] == 100.0
        assert make_config("sweep").k_grid[0] == 10.0

    def test_render_accepts_inf(self):
        assert math.isinf(make_config("render", k="inf").k[-1])

    def test_solve_rejects_inf(self):
        with pytest.raises(UsageError):
            make_config("solve", k="inf")

    def test_requires_aspects_where_needed(self):
        with pytest.raises(UsageError):
            make_config("solve")
        with pytest.raises(UsageError):
            make_config("render")

    def test_rejects_small_aspects(self):
        with pytest.raises(UsageError):
            make_config("solve", k="0.5")

    def test_rejects_bad_tolerances(self):
        with pytest.raises(UsageError):
            make_config("verify", tol_solver=0.0)
        with pytest.raises(UsageError):
            make_config("verify", tol_quad=-1e-9)

    def test_rejects_bad_format_and_seed(self):
        with pytest.raises(UsageError):
            make_config("render", k="2", format="png")
        with pytest.raises(UsageError):
            make_config("verify", seed=-1)

    def test_rejects_short_extrapolation_grid(self):
        with pytest.raises(UsageError):
            make_config("sweep", k_grid="10,100")

    def test_rejects_unknown_setting(self):
        with pytest.raises(UsageError):
            make_config("verify", colour="red")


class TestReports:
    def test_solve_report_shape(self, tmp_path):
        out = tmp_path / "s.json"
        report = run(make_config("solve", k="1", out=str(out)))
        assert report.status == "pass"
        on_disk = json.loads(out.read_text())
        assert on_disk["results"]["residual"] < 1e-10
        assert on_disk["results"]["solves"][0]["z1"] == [1.0, 1.0]
        assert on_disk["manifest"] == ["s.json"]
        assert on_disk["config_sha256"] == report.config_sha256

    def test_json_out_prefixes_artifacts(self, tmp_path):
        out = tmp_path / "runA.json"
        report = run(make_config("sweep", k_grid="1e1:1e3:3", out=str(out)))
        assert report.status == "pass"
        assert set(report.manifest) == {"runA.json", "runA.sweep.txt"}
        assert (tmp_path / "runA.sweep.txt").exists()

    def test_manifest_lists_every_file(self, tmp_path):
        run(make_config("render", k="1", density=40, out=str(tmp_path / "r")))
        on_disk = sorted(p.name for p in (tmp_path / "r").iterdir())
        report = json.loads((tmp_path / "r" / "report.json").read_text())
        assert on_disk == report["manifest"]

    def test_reruns_byte_identical(self, tmp_path):
        config = make_config("verify", k="2", density=50, out=str(tmp_path / "v"))
        run(config)
        first = (tmp_path / "v" / "report.json").read_bytes()
        run(config)
        assert (tmp_path / "v" / "report.json").read_bytes() == first

    def test_verdicts_stable_across_seeds(self, tmp_path):
        # the sampled checks must not be seed-lucky, and the seed is part
        # of the configuration identity
        a = run(make_config("verify", k="2", density=50, seed=1, out=str(tmp_path / "a")))
        b = run(make_config("verify", k="2", density=50, seed=9, out=str(tmp_path / "b")))
        assert a.status == b.status == "pass"
        assert a.config_sha256 != b.config_sha256

    def test_numerical_failure_is_reported_not_raised(self, tmp_path):
        config = make_config(
            "solve", k="7", tol_solver=1e-15, tol_quad=1e-3, out=str(tmp_path / "f")
        )
        report = run(config)
        assert report.status == "error"
        assert report.steps[-1]["status"] == "error"
        assert "residual" in report.steps[-1]["detail"]["message"]
        # the report still lands on disk for inspection
        assert (tmp_path / "f" / "report.json").exists()


class TestExitCodes:
    def test_pass_is_zero(self, tmp_path):
        assert main(["solve", "--k", "1", "--out", str(tmp_path / "ok")]) == 0

    def test_usage_is_two(self, tmp_path):
        assert main(["solve", "--out", str(tmp_path / "u")]) == 2
        assert main(["solve", "--k", "0.2", "--out", str(tmp_path / "u")]) == 2
        assert main(["solve", "--k", "2", "--config", str(tmp_path / "no.json")]) == 2

    def test_unknown_flag_is_two(self, tmp_path):
        assert main(["solve", "--k", "2", "--frobnicate"]) == 2

    def test_check_failure_is_one(self, tmp_path):
        # short grid stops well above the acceptance threshold
        code = main(
            ["hausdorff", "--k-grid", "1e2:1e3:2", "--density", "60",
             "--out", str(tmp_path / "h")]
        )
        assert code == 1
        report = json.loads((tmp_path / "h" / "report.json").read_text())
        assert report["status"] == "fail"
        assert report["results"]["verdict"] == "fail"

    def test_numerical_failure_is_three(self, tmp_path):
        code = main(
            ["solve", "--k", "7", "--tol-solver", "1e-15", "--tol-quad", "1e-3",
             "--out", str(tmp_path / "n")]
        )
        assert code == 3

    def test_verify_prints_one_line_per_check(self, tmp_path, capsys):
        code = main(["verify", "--k", "2", "--density", "50", "--out", str(tmp_path / "v")])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        checks = [ln for ln in lines if ln.startswith("PASS ") and "report" not in ln]
        assert len(checks) == 7
        assert "PASS square-identity" in checks

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "affsurf", "solve", "--k", "1",
             "--out", str(tmp_path / "m.json")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "PASS solve" in proc.stdout


class TestArtifacts:
    def test_square_figure_structure(self, tmp_path):
        run(make_config("render", k="1", density=40, out=str(tmp_path / "r")))
        doc = (tmp_path / "r" / "figure.svg").read_text()
        assert doc.count("<path") == 8
        assert doc.count("<circle") == 4
        assert "viewBox=" in doc

    def test_cloud_files_round_trip(self, tmp_path):
        run(make_config("render", k="1", density=40, format="txt", out=str(tmp_path / "c")))
        cloud = read_points(tmp_path / "c" / "cloud_k1.txt")
        assert cloud.k == 1.0
        assert cloud.source == "rectangle-boundary"
        assert cloud.density == 40.0
        # identity member: everything on the unit square boundary
        dev = abs(
            (abs(cloud.points.real) >= abs(cloud.points.imag)) * abs(cloud.points.real)
            + (abs(cloud.points.real) < abs(cloud.points.imag)) * abs(cloud.points.imag)
            - 1.0
        ).max()
        assert dev < 1e-9

    def test_config_file_layer(self, tmp_path):
        cfg = tmp_path / "conf.json"
        cfg.write_text(json.dumps({"k": [5], "density": 40, "seed": 11}))
        out = tmp_path / "cf"
        assert main(["solve", "--config", str(cfg), "--k", "1", "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        # flag beats file, file beats default
        assert report["config"]["k"] == ["1"]
        assert report["config"]["density"] == 40.0
        assert report["config"]["seed"] == 11
