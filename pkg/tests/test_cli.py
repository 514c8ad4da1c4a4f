import csv
import json
from pathlib import Path

import numpy as np
import pytest

import rankcred as rc
from rankcred.cli import run_command
from rankcred.fileio import emit_dataset
from rankcred.rankdist import DS_TOL

from conftest import make_dataset

DATA_CSV = """id,y,d,gold
a,0.40,0.004,0.35
b,0.35,0.005,0.33
c,0.30,0.004,0.31
d,0.25,0.005,0.28
e,0.20,0.004,0.24
"""


@pytest.fixture
def data_path(tmp_path):
    p = tmp_path / "data.csv"
    p.write_text(DATA_CSV)
    return p


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.reader(f))


class TestFileio:
    def test_round_trip(self):
        ds = rc.parse_dataset(DATA_CSV)
        assert rc.parse_dataset(emit_dataset(ds)) == ds

    def test_round_trip_with_covariates(self):
        ds = make_dataset([0.1, 0.2, 0.3], [0.01, 0.02, 0.01], x=[(1.0,), (2.0,), (3.0,)])
        assert rc.parse_dataset(emit_dataset(ds)) == ds

    def test_path_and_text_both_work(self, data_path):
        assert rc.parse_dataset(data_path) == rc.parse_dataset(DATA_CSV)
        assert rc.parse_dataset(str(data_path)) == rc.parse_dataset(DATA_CSV)

    def test_column_order_free(self):
        reordered = "d,gold,y,id\n0.004,0.35,0.40,a\n0.005,0.33,0.35,b\n"
        ds = rc.parse_dataset(reordered)
        assert ds.ids == ["a", "b"]
        assert ds.y[0] == 0.40

    def test_missing_column_message(self):
        with pytest.raises(rc.DomainError, match="missing required column 'd'"):
            rc.parse_dataset("id,y\na,0.1\n")

    def test_bad_value_names_row_and_column(self):
        with pytest.raises(rc.DomainError, match="row 3, column 'y'"):
            rc.parse_dataset("id,y,d\na,0.1,0.01\nb,oops,0.01\n")

    def test_nonconsecutive_covariates(self):
        with pytest.raises(rc.DomainError, match="consecutive"):
            rc.parse_dataset("id,y,d,x2\na,0.1,0.01,1.0\nb,0.2,0.01,2.0\n")

    def test_nonpositive_d(self):
        with pytest.raises(rc.DomainError, match="must be > 0"):
            rc.parse_dataset("id,y,d\na,0.1,0.0\nb,0.2,0.01\n")

    def test_bundled_baseball(self, baseball):
        assert baseball.m == 18
        assert baseball.has_gold
        assert baseball.y[0] == pytest.approx(0.400)
        assert np.allclose(baseball.d, baseball.y * (1 - baseball.y) / 45, atol=5e-13)


class TestKwwCommand:
    def test_artifacts(self, data_path, tmp_path):
        out = tmp_path / "out"
        code = run_command(["kww", str(data_path), "--alpha", "0.1", "--out", str(out)])
        assert code == 0
        rows = read_csv(out / "kww_ranksets.csv")
        assert rows[0] == ["id", "L", "U", "rank_lo", "rank_hi", "eps_kww"]
        assert len(rows) == 6
        ks = rc.rank_confidence_set(rc.parse_dataset(DATA_CSV), 0.1)
        for i, row in enumerate(rows[1:]):
            assert int(row[3]) == ks.rank_lo[i]
            assert int(row[4]) == ks.rank_hi[i]
            assert float(row[1]) == pytest.approx(ks.intervals[i, 0], abs=1e-12)
            assert float(row[5]) >= 0.0  # gold column present -> eps filled

    def test_no_gold_leaves_eps_blank(self, tmp_path):
        p = tmp_path / "ng.csv"
        p.write_text("id,y,d\na,0.1,0.01\nb,0.2,0.01\n")
        out = tmp_path / "out"
        assert run_command(["kww", str(p), "--out", str(out)]) == 0
        rows = read_csv(out / "kww_ranksets.csv")
        assert rows[1][5] == ""


class TestFitCommand:
    def run_fit(self, data_path, out, *extra):
        args = [
            "fit", str(data_path), "--samples", "2000", "--burnin", "300",
            "--seed", "3", "--out", str(out), *extra,
        ]
        return run_command(args)

    def test_ub_cartesian_artifacts(self, data_path, tmp_path):
        out = tmp_path / "out"
        assert self.run_fit(data_path, out, "--model", "ub") == 0
        matrix = read_csv(out / "rank_matrix.csv")
        assert matrix[0] == ["rank", "a", "b", "c", "d", "e"]
        probs = np.array([[float(v) for v in row[1:]] for row in matrix[1:]])
        # doubly stochastic survives the 12-significant-digit serialization
        assert np.allclose(probs.sum(axis=0), 1.0, atol=1e-9)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

        summary = read_csv(out / "rank_summary.csv")
        assert summary[0] == [
            "id", "y", "observed_rank", "expected_rank", "rank_q05",
            "rank_q50", "rank_q95", "gold_rank", "exp_abs_dev",
        ]
        exp_ranks = [float(r[3]) for r in summary[1:]]
        assert sum(exp_ranks) == pytest.approx(15.0, abs=1e-6)
        for r in summary[1:]:
            assert 1 <= int(r[4]) <= int(r[5]) <= int(r[6]) <= 5

        size = json.loads((out / "size_report.json").read_text())
        assert size["geometry"] == "cartesian"
        assert size["volume"] > 0
        assert len(size["per_side_lengths"]) == 5

        post = json.loads((out / "posterior_summary.json").read_text())
        assert post["model"] == "UB"
        assert "a_mean" not in post
        assert post["tese_direct"] == pytest.approx(
            rc.tese([0.40, 0.35, 0.30, 0.25, 0.20], [0.35, 0.33, 0.31, 0.28, 0.24]),
            rel=1e-9,
        )
        # Monte Carlo mean of the UB draws, centered on y_a
        assert post["mean"]["a"] == pytest.approx(0.40, abs=0.01)

    def test_hb_elliptical_artifacts(self, data_path, tmp_path):
        out = tmp_path / "out"
        assert self.run_fit(data_path, out, "--model", "hb", "--set", "elliptical", "--weights", "mahal") == 0
        size = json.loads((out / "size_report.json").read_text())
        assert size["geometry"] == "elliptical"
        assert size["cutoff"] > 0
        post = json.loads((out / "posterior_summary.json").read_text())
        assert post["model"] == "HB"
        assert post["a_mean"] > 0
        assert post["a_median"] > 0
        # shrinkage: HB means are pulled toward the common level
        means = [post["mean"][k] for k in ("a", "b", "c", "d", "e")]
        assert np.std(means) < np.std([0.40, 0.35, 0.30, 0.25, 0.20])

    def test_reruns_byte_identical(self, data_path, tmp_path):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        self.run_fit(data_path, out1, "--model", "hb")
        self.run_fit(data_path, out2, "--model", "hb")
        for name in ("rank_matrix.csv", "rank_summary.csv", "size_report.json", "posterior_summary.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()

    def test_plot_data(self, data_path, tmp_path):
        out = tmp_path / "out"
        assert self.run_fit(data_path, out, "--model", "ub", "--plot-data") == 0
        rows = read_csv(out / "plot_data.csv")
        assert rows[0] == ["kind", "id", "rank", "value"]
        kinds = {r[0] for r in rows[1:]}
        assert kinds == {"kww_range", "observed_rank", "credible_cell", "gold_rank"}
        cells = [r for r in rows[1:] if r[0] == "credible_cell"]
        assert all(0 < float(r[3]) <= 1 for r in cells)
        # per-entity credible masses serialize to 1
        for ident in ("a", "b", "c", "d", "e"):
            mass = sum(float(r[3]) for r in cells if r[1] == ident)
            assert mass == pytest.approx(1.0, abs=1e-9)


class TestSimulateCommand:
    def test_simulate(self, tmp_path):
        cfg = {
            "m": 5,
            "a_grid": [0.01],
            "beta1_grid": [0.0],
            "d": [0.01] * 5,
            "n_reps": 1,
            "seed": 2,
            "samples": 200,
            "burnin": 50,
        }
        cfg_path = tmp_path / "sim.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "results.csv"
        assert run_command(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        rows = read_csv(out)
        assert rows[0] == [
            "a", "beta1", "method", "geometry", "weighting",
            "avg_exp_abs_dev", "vol_mth_root", "avg_length", "n_reps",
        ]
        assert len(rows) == 1 + 9
        methods = {r[2] for r in rows[1:]}
        assert methods == {"KWW", "UB", "HB"}

    def test_bad_config_key(self, tmp_path):
        cfg_path = tmp_path / "sim.json"
        cfg_path.write_text(json.dumps({"bogus": 1}))
        assert run_command(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "r.csv")]) == 1

    def test_malformed_json(self, tmp_path):
        cfg_path = tmp_path / "sim.json"
        cfg_path.write_text("{not json")
        assert run_command(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "r.csv")]) == 1


class TestExitCodes:
    def test_usage_error(self):
        assert run_command(["fit"]) == 2
        assert run_command(["frobnicate"]) == 2

    def test_missing_file(self, tmp_path):
        assert run_command(["kww", str(tmp_path / "nope.csv")]) == 1

    def test_domain_error(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("id,y,d\na,0.1,-1\n")
        assert run_command(["kww", str(p)]) == 1
