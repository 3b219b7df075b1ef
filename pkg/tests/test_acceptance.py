"""Full-size acceptance runs of every experiment.

These use the experiment defaults and take minutes; deselect with -m "not slow".
"""

from __future__ import annotations

import pytest

from witness_lab.config import EXPERIMENTS

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("name", EXPERIMENTS)
def test_default_run_passes(name):
    from witness_lab.experiments import run_experiment
    from witness_lab.loaders import default_config

    result = run_experiment(default_config(name, 0))
    assert result.ledger.checked > 0
    assert result.ledger.passed, [v.to_dict() for v in result.ledger.violations]


@pytest.mark.parametrize("name", ["concentration", "effectiveop"])
def test_statistical_self_check(name):
    """The sampled experiments also pass at self-check sizes."""
    from witness_lab.experiments import run_experiment
    from witness_lab.loaders import default_config

    result = run_experiment(default_config(name, 0, self_check=True))
    assert result.exit_code == 0, [v.to_dict() for v in result.ledger.violations]


def test_concentration_median_shrinks():
    from witness_lab.experiments import run_experiment
    from witness_lab.loaders import default_config

    result = run_experiment(default_config("concentration", 0))
    medians = [row["median"] for row in result.rows]
    assert medians == sorted(medians, reverse=True)


def test_self_check_cli(tmp_path):
    from witness_lab.cli import main

    assert main(["run", "--self-check", "--out", str(tmp_path)]) == 0
    for name in EXPERIMENTS:
        assert list((tmp_path / "self_check" / name).glob("*_report.json"))
