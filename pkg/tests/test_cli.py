"""End-to-end checks of the command line against the library."""
import json

import numpy as np
import pytest
from click.testing import CliRunner

from bcnflab.cli import SWEEP_HEADER, TRACE_HEADER, classification_record, main
from bcnflab.core import Params, apply
from bcnflab.geometry import points_to_segments_distance
from bcnflab.manifolds import grow_manifold
from bcnflab.paramspace import classify_region, region_code

POINT_A = ["--tau-l", "1.5", "--delta-l", "0.2", "--tau-r", "-2.0", "--delta-r", "0.5"]


@pytest.fixture()
def runner():
    return CliRunner()


class TestClassify:
    def test_matches_library(self, runner):
        res = runner.invoke(main, ["classify", *POINT_A])
        assert res.exit_code == 0, res.output
        rec = json.loads(res.output)
        cls = classify_region(Params(1.5, 0.2, -2.0, 0.5))
        assert rec["region_code"] == region_code(cls)
        assert rec["rn_index"] == cls.rn_index
        assert rec["in_Phi"] and rec["in_Phi_BYG"]
        assert rec["phi"] == pytest.approx(0.42958405421207724, rel=1e-15)
        assert rec["thm2_applies"] is True

    def test_outside_point_has_null_fields(self, runner, tmp_path):
        out = tmp_path / "c.json"
        res = runner.invoke(
            main,
            ["classify", "--tau-l", "1.0", "--delta-l", "0.2",
             "--tau-r", "-2.0", "--delta-r", "0.5", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        rec = json.loads(out.read_text())
        assert rec["in_Phi"] is False
        assert rec["J1"] is None and rec["thm1_applies"] is False

    def test_missing_flag_fails(self, runner):
        res = runner.invoke(main, ["classify", "--tau-l", "1.5"])
        assert res.exit_code != 0


class TestSweep:
    GRID = [
        "--delta-l", "0.2", "--delta-r", "0.5",
        "--tau-l-min", "1.4", "--tau-l-max", "1.6", "--tau-l-steps", "2",
        "--tau-r-min", "-2.1", "--tau-r-max", "-1.9", "--tau-r-steps", "3",
    ]

    def test_header_shape_and_order(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        res = runner.invoke(main, ["sweep", *self.GRID, "--jobs", "1", "--out", str(out)])
        assert res.exit_code == 0, res.output
        lines = out.read_text().splitlines()
        assert lines[0] == SWEEP_HEADER
        assert SWEEP_HEADER == (
            "tau_L,tau_R,region_code,rn_index,phi,phi_g,J1,J2,sum_stable,thm1,thm2"
        )
        assert len(lines) == 1 + 2 * 3
        tl = [float(l.split(",")[0]) for l in lines[1:]]
        tr = [float(l.split(",")[1]) for l in lines[1:]]
        assert tl == [1.4, 1.4, 1.4, 1.6, 1.6, 1.6]
        assert tr == pytest.approx([-2.1, -2.0, -1.9] * 2)

    def test_rows_match_classifier(self, runner, tmp_path):
        out = tmp_path / "s.csv"
        runner.invoke(main, ["sweep", *self.GRID, "--jobs", "1", "--out", str(out)])
        row = out.read_text().splitlines()[4].split(",")
        p = Params(float(row[0]), 0.2, float(row[1]), 0.5)
        rec = classification_record(p)
        assert row[2] == rec["region_code"]
        assert int(row[3]) == rec["rn_index"]
        assert float(row[4]) == pytest.approx(rec["phi"], rel=1e-15)
        assert row[9] == ("true" if rec["thm1_applies"] else "false")

    def test_jobs_do_not_change_bytes(self, runner, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        runner.invoke(main, ["sweep", *self.GRID, "--jobs", "1", "--out", str(a)])
        runner.invoke(main, ["sweep", *self.GRID, "--jobs", "2", "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_bad_grid_is_rejected(self, runner, tmp_path):
        bad = list(self.GRID)
        bad[bad.index("--tau-l-steps") + 1] = "0"
        res = runner.invoke(main, ["sweep", *bad, "--out", str(tmp_path / "x.csv")])
        assert res.exit_code != 0
        assert "steps" in res.output


class TestConfigFile:
    def test_file_supplies_defaults_and_flags_override(self, runner, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# reference point\n"
            "tau-l = 1.5\n"
            "delta-l = 0.2\n"
            "tau-r = -2.0\n"
            "delta-r = 0.5\n"
        )
        res = runner.invoke(main, ["classify", "--config", str(cfg)])
        assert res.exit_code == 0, res.output
        assert json.loads(res.output)["params"]["tau_L"] == 1.5

        res2 = runner.invoke(
            main, ["classify", "--config", str(cfg), "--tau-l", "1.6"]
        )
        rec2 = json.loads(res2.output)
        assert rec2["params"]["tau_L"] == 1.6
        assert rec2["params"]["tau_R"] == -2.0

    def test_malformed_line_names_location(self, runner, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("tau-l = 1.5\nnonsense\n")
        res = runner.invoke(main, ["classify", "--config", str(cfg)])
        assert res.exit_code != 0
        assert "bad.cfg:2" in res.output


class TestPortrait:
    def test_bundle_keys_and_chain_consistency(self, runner, tmp_path):
        out = tmp_path / "p.json"
        res = runner.invoke(
            main,
            ["portrait", *POINT_A, "--samples", "2000", "--transient", "200",
             "--stable-depth", "6", "--unstable-depth", "8", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        bundle = json.loads(out.read_text())
        assert sorted(bundle) == sorted(
            ["params", "fixed_points", "special_points", "omega", "f_omega",
             "manifolds", "attractor", "cycles"]
        )
        p = Params(**bundle["params"])
        assert p == Params(1.5, 0.2, -2.0, 0.5)

        # a chain one level shallower must map onto the serialised chain
        chain = next(
            m for m in bundle["manifolds"] if m["kind"] == "unstable" and m["base"] == "X"
        )
        assert chain["depth"] == 8
        v = np.array(chain["vertices"])
        prev = grow_manifold(p, "unstable", "X", 7).polyline.vertices
        imgs = np.array([apply(p, q) for q in prev])
        d = points_to_segments_distance(imgs, v[:-1], v[1:])
        assert d.max() < 1e-9

    def test_no_attractor_flag(self, runner, tmp_path):
        out = tmp_path / "p.json"
        res = runner.invoke(
            main, ["portrait", *POINT_A, "--no-attractor", "--stable-depth", "2",
                   "--unstable-depth", "2", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        assert json.loads(out.read_text())["attractor"] is None

    def test_cycles_serialised_with_stable_chains(self, runner, tmp_path):
        out = tmp_path / "p.json"
        res = runner.invoke(
            main,
            ["portrait", "--tau-l", "1.3", "--delta-l", "0.2",
             "--tau-r", "-1.7", "--delta-r", "0.5",
             "--no-attractor", "--stable-depth", "2", "--unstable-depth", "2",
             "--cycle", "LRR", "--cycle-stable-depth", "4", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        cyc = json.loads(out.read_text())["cycles"][0]
        assert cyc["word"] == "LRR"
        assert cyc["saddle"] is True
        assert len(cyc["points"]) == 3
        assert len(cyc["multipliers"][0]) == 2
        assert len(cyc["stable_chains"]) == 3
        assert {c["branch"] for c in cyc["stable_chains"]} == {"0", "1", "2"}

    def test_error_names_stage_and_inequality(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["portrait", "--tau-l", "1.0", "--delta-l", "0.2",
             "--tau-r", "-2.0", "--delta-r", "0.5",
             "--out", str(tmp_path / "p.json")],
        )
        assert res.exit_code != 0
        assert "portrait stage" in res.output
        assert "tau_L > delta_L + 1" in res.output


class TestHtTrace:
    SLICE = ["--delta-l", "0.2", "--delta-r", "0.5"]

    def test_header_only_for_empty_grid(self, runner, tmp_path):
        out = tmp_path / "t.csv"
        res = runner.invoke(
            main,
            ["ht-trace", *self.SLICE, "--tau-l-min", "1.3", "--tau-l-max", "1.3",
             "--tau-l-steps", "0", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        assert out.read_text() == TRACE_HEADER + "\n"
        assert TRACE_HEADER == "tau_L,tau_R_star,residual,iterations,depth"

    def test_light_row(self, runner, tmp_path):
        out = tmp_path / "t.csv"
        res = runner.invoke(
            main,
            ["ht-trace", *self.SLICE, "--tau-l-min", "1.3", "--tau-l-max", "1.3",
             "--tau-l-steps", "1", "--scan-points", "5", "--bisect-tol", "5e-2",
             "--depth-forward", "8", "--depth-backward", "4",
             "--jobs", "1", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        lines = out.read_text().splitlines()
        assert len(lines) == 2
        row = lines[1].split(",")
        assert float(row[0]) == 1.3
        assert float(row[1]) == pytest.approx(-1.733, abs=5e-2)
        assert int(row[4]) == 4

    def test_unbracketed_row_has_empty_fields(self, runner, tmp_path):
        out = tmp_path / "t.csv"
        res = runner.invoke(
            main,
            ["ht-trace", *self.SLICE, "--tau-l-min", "1.1", "--tau-l-max", "1.1",
             "--tau-l-steps", "1", "--scan-points", "3", "--bisect-tol", "0.2",
             "--depth-forward", "8", "--depth-backward", "4", "--out", str(out)],
        )
        assert res.exit_code == 0, res.output
        row = out.read_text().splitlines()[1].split(",")
        assert row[1] == "" and row[2] == ""


class TestVerify:
    def test_passes_quickly(self, runner):
        res = runner.invoke(main, ["verify", "--random-n", "20"])
        assert res.exit_code == 0, res.output
        assert "checks passed" in res.output

    def test_corrupt_tolerances_fail(self, runner):
        res = runner.invoke(main, ["verify", "--random-n", "5", "--corrupt-tolerances"])
        assert res.exit_code == 1

    def test_partial_point_rejected(self, runner):
        res = runner.invoke(main, ["verify", "--tau-l", "1.5", "--random-n", "5"])
        assert res.exit_code != 0


class TestCycleCommand:
    def test_reports_cycle(self, runner):
        res = runner.invoke(
            main,
            ["cycle", "--tau-l", "1.3", "--delta-l", "0.2",
             "--tau-r", "-1.7", "--delta-r", "0.5", "--word", "LRR"],
        )
        assert res.exit_code == 0, res.output
        rec = json.loads(res.output)
        assert rec["word"] == "LRR" and rec["saddle"] is True

    def test_impossible_word_fails(self, runner):
        res = runner.invoke(
            main,
            ["cycle", "--tau-l", "1.3", "--delta-l", "0.2",
             "--tau-r", "-1.7", "--delta-r", "0.5", "--word", "LLRR"],
        )
        assert res.exit_code == 1
