"""Tests for the witness-lab command line.

Test data loaded from: data/fixtures/configs/
"""

from __future__ import annotations

import csv
import json

import pytest

from conftest import CONFIGS_DIR


def _run(*argv: str) -> int:
    from witness_lab.cli import main

    return main(list(argv))


class TestRun:
    def test_gap_config(self, tmp_path):
        code = _run("run", str(CONFIGS_DIR / "gap.json"), "--out", str(tmp_path))
        assert code == 0
        report = json.loads((tmp_path / "perron_report.json").read_text())
        assert report["experiment"] == "gap"
        assert report["seed"] == 11
        assert report["passed"] is True
        with open(tmp_path / "perron.csv") as f:
            lines = f.read().splitlines()
        assert lines[0].startswith("# ")
        rows = list(csv.DictReader(lines[1:]))
        assert len(rows) == 5
        assert sorted(p.name for p in tmp_path.iterdir()) == ["perron.csv", "perron_report.json"]

    @pytest.mark.parametrize("name", ["gap_explicit", "qpe_file", "oracle"])
    def test_other_configs(self, name, tmp_path):
        assert _run("run", str(CONFIGS_DIR / f"{name}.json"), "--out", str(tmp_path)) == 0
        assert list(tmp_path.glob("*_report.json"))

    def test_seed_override(self, tmp_path):
        _run("run", str(CONFIGS_DIR / "gap.json"), "--out", str(tmp_path), "--seed", "5")
        assert json.loads((tmp_path / "perron_report.json").read_text())["seed"] == 5

    def test_env_out_dir(self, tmp_path, monkeypatch):
        from witness_lab.cli import OUT_ENV

        monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
        assert _run("run", str(CONFIGS_DIR / "gap.json")) == 0
        assert (tmp_path / "env" / "perron_report.json").exists()

    def test_self_check_with_config(self, tmp_path):
        assert _run("run", str(CONFIGS_DIR / "gap.json"), "--self-check", "--out", str(tmp_path)) == 0
        assert (tmp_path / "self_check" / "gap" / "perron_report.json").exists()


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        for name in ("a", "b"):
            _run("run", str(CONFIGS_DIR / "gap.json"), "--out", str(tmp_path / name))
        for file in ("perron_report.json", "perron.csv"):
            assert (tmp_path / "a" / file).read_bytes() == (tmp_path / "b" / file).read_bytes()

    def test_workers_do_not_change_output(self, tmp_path):
        _run("run", str(CONFIGS_DIR / "gap.json"), "--out", str(tmp_path / "one"), "--workers", "1")
        _run("run", str(CONFIGS_DIR / "gap.json"), "--out", str(tmp_path / "three"), "--workers", "3")
        for file in ("perron_report.json", "perron.csv"):
            assert (tmp_path / "one" / file).read_bytes() == (tmp_path / "three" / file).read_bytes()


class TestErrors:
    @pytest.mark.parametrize(
        "config",
        ["invalid_f_zero.json", "not_json.json", "absent.json"],
        ids=["invalid", "not_json", "missing"],
    )
    def test_config_errors(self, config, tmp_path, capsys):
        assert _run("run", str(CONFIGS_DIR / config), "--out", str(tmp_path)) == 1
        assert "witness-lab: error" in capsys.readouterr().err

    def test_config_required_without_self_check(self, capsys):
        assert _run("run") == 1
        assert "config file is required" in capsys.readouterr().err

    def test_negative_seed(self, tmp_path, capsys):
        assert _run("run", str(CONFIGS_DIR / "gap.json"), "--seed", "-1", "--out", str(tmp_path)) == 1
        assert "--seed" in capsys.readouterr().err

    def test_bad_workers(self, tmp_path):
        assert _run("run", str(CONFIGS_DIR / "gap.json"), "--workers", "0", "--out", str(tmp_path)) == 1

    def test_violation_exit_code(self, tmp_path, capsys):
        path = tmp_path / "loud.json"
        path.write_text(
            json.dumps(
                {"experiment": "gaussnorm", "seed": 1, "gaussnorm": {"D_values": [8], "variance": 1000.0}}
            )
        )
        assert _run("run", str(path), "--out", str(tmp_path / "out")) == 2
        assert "iidgauss.norm_bound violated" in capsys.readouterr().err
        report = json.loads((tmp_path / "out" / "gaussnorm_report.json").read_text())
        assert report["passed"] is False
        assert report["violations"]
