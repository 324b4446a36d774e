import csv
import json

import numpy as np
import pytest

from speclab.cli import main
from speclab.config import load_config
from speclab.errors import ConfigError
from speclab.runner import LOSS_COLUMNS, TRAJECTORY_COLUMNS, run_seed
from speclab.verify import verify_dynamics

GOOD_CONFIG = """\
[experiment]
name = demo
model = linear
provider = population
steps = 50
seeds = 0,1

[data]
k = 3
d = 3
mu = 1.0
sigma2 = 0.125
priors = 0.5,0.3,0.2

[optimizer.gd]
rule = gd
eta = 0.01

[optimizer.spec]
rule = specgd
eta = 0.01
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "demo.ini"
    path.write_text(GOOD_CONFIG)
    return str(path)


class TestConfig:
    def test_round_trip(self, config_path):
        cfg = load_config(config_path)
        assert cfg.name == "demo"
        assert cfg.optimizer_labels == ["gd", "spec"]
        assert [o.rule for o in cfg.optimizers] == ["gd", "specgd"]
        assert cfg.seeds == [0, 1]
        np.testing.assert_allclose(cfg.data.priors, [0.5, 0.3, 0.2])

    @pytest.mark.parametrize(
        "mangle",
        [
            lambda s: s.replace("rule = gd", "rule = newton"),
            lambda s: s.replace("eta = 0.01", "eta = fast"),
            lambda s: s.replace("priors = 0.5,0.3,0.2", "priors = 0.5,0.3"),
            lambda s: s.replace("[data]", "[dat]"),
            lambda s: s.replace("k = 3", "k = 3\nd = 2"),
        ],
    )
    def test_malformed_configs_rejected(self, tmp_path, mangle):
        path = tmp_path / "bad.ini"
        path.write_text(mangle(GOOD_CONFIG))
        with pytest.raises(ConfigError):
            load_config(str(path))

    def test_missing_file(self):
        with pytest.raises(ConfigError):
            load_config("/nonexistent/nowhere.ini")

    def test_zipf_scheme(self, tmp_path):
        text = GOOD_CONFIG.replace("priors = 0.5,0.3,0.2", "scheme = zipf")
        path = tmp_path / "zipf.ini"
        path.write_text(text)
        cfg = load_config(str(path))
        assert cfg.data.priors[0] == pytest.approx(6 / 11)


class TestRunSeed:
    def test_deterministic_and_distinct(self):
        class Named:
            name = "demo"
        assert run_seed(Named, 0, "gd") == run_seed(Named, 0, "gd")
        assert run_seed(Named, 0, "gd") != run_seed(Named, 1, "gd")
        assert run_seed(Named, 0, "gd") != run_seed(Named, 0, "spec")


class TestCli:
    def test_spectra(self, config_path, capsys):
        assert main(["spectra", "--config", config_path]) == 0
        out = capsys.readouterr().out
        assert "0.800000" in out

    def test_simulate_writes_stable_schemas(self, config_path, tmp_path, capsys):
        out_dir = tmp_path / "out"
        assert main(["simulate", "--config", config_path, "--out", str(out_dir)]) == 0
        with open(out_dir / "trajectory.csv") as f:
            rows = list(csv.DictReader(f))
        assert tuple(rows[0].keys()) == TRAJECTORY_COLUMNS
        assert {r["algo"] for r in rows} == {"gd", "specgd"}
        with open(out_dir / "losses.csv") as f:
            loss_rows = list(csv.DictReader(f))
        assert tuple(loss_rows[0].keys()) == LOSS_COLUMNS
        manifests = sorted(out_dir.glob("*.manifest.json"))
        assert len(manifests) == 4  # 2 optimizers x 2 seeds
        meta = json.loads(manifests[0].read_text())
        assert meta["tool_version"]
        assert meta["config"]["name"] == "demo"

    def test_seeds_flag_overrides_config(self, config_path, tmp_path):
        out_dir = tmp_path / "out"
        assert main(
            ["simulate", "--config", config_path, "--out", str(out_dir), "--seeds", "5"]
        ) == 0
        assert len(list(out_dir.glob("*.manifest.json"))) == 2

    def test_closed_form_t_grid(self, config_path, tmp_path):
        out_dir = tmp_path / "cf"
        assert main(
            [
                "closed-form",
                "--config", config_path,
                "--out", str(out_dir),
                "--algos", "gf,specgf",
                "--t-grid", "0:1:11",
            ]
        ) == 0
        with open(out_dir / "trajectory.csv") as f:
            rows = list(csv.DictReader(f))
        times = sorted({float(r["step_or_time"]) for r in rows})
        assert times == pytest.approx(list(np.linspace(0, 1, 11)))

    def test_bad_t_grid_is_config_error(self, config_path, tmp_path):
        code = main(
            [
                "closed-form",
                "--config", config_path,
                "--out", str(tmp_path / "x"),
                "--algos", "gf",
                "--t-grid", "backwards",
            ]
        )
        assert code == 2

    def test_report(self, config_path, tmp_path, capsys):
        out_dir = tmp_path / "out"
        main(["simulate", "--config", config_path, "--out", str(out_dir)])
        capsys.readouterr()
        assert main(["report", "--losses", str(out_dir / "losses.csv")]) == 0
        out = capsys.readouterr().out
        assert "balanced" in out and "demo-gd-s0" in out

    def test_missing_config_exits_2(self, tmp_path):
        assert main(["spectra", "--config", str(tmp_path / "none.ini")]) == 2

    def test_malformed_config_exits_2(self, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text(GOOD_CONFIG.replace("eta = 0.01", "eta = fast"))
        assert main(["spectra", "--config", str(path)]) == 2

    def test_verify_suite_runs(self, capsys):
        assert main(["verify", "--suite", "reductions"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out and "FAIL" not in out

    def test_verify_theorems_exports_gap_csv(self, tmp_path, capsys):
        assert main(["verify", "--suite", "theorems", "--out", str(tmp_path)]) == 0
        with open(tmp_path / "gaps.csv") as f:
            rows = list(csv.DictReader(f))
        assert tuple(rows[0].keys()) == ("theorem", "step_or_time", "gap", "bound")
        assert {r["theorem"] for r in rows} == {
            "B1_minority", "B1_balanced", "B4_minority", "B4_balanced"
        }
        assert all(float(r["gap"]) >= float(r["bound"]) for r in rows)

    def test_thread_count_env(self, config_path, tmp_path, monkeypatch):
        monkeypatch.setenv("SPECLAB_THREADS", "1")
        out_dir = tmp_path / "single"
        assert main(["simulate", "--config", config_path, "--out", str(out_dir)]) == 0
        assert (out_dir / "trajectory.csv").exists()


class TestCorruptedOracleFixture:
    # The dynamics suite must actually be able to fail: flipping the sign of
    # the reference formula has to produce FAIL lines, or the PASS lines
    # would be vacuous.
    def test_sign_flip_detected(self):
        checks = verify_dynamics(corrupt_gd_sign=True)
        assert any(not c.passed for c in checks)

    def test_uncorrupted_passes(self):
        checks = verify_dynamics()
        assert all(c.passed for c in checks)
