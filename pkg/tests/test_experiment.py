import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from umbrella import ExperimentConfig, InvalidInput, InvalidParams, run_genericity_experiment
from umbrella.experiment import sample_centers, thread_count, trial_rng


def test_zero_trials():
    rep = run_genericity_experiment(ExperimentConfig(trials=0))
    assert rep.histogram == {}
    assert (rep.crosscap_pass, rep.oracle_agree, rep.degenerate_trials, rep.failed_trials) == (0, 0, 0, 0)


def test_small_ell3_run():
    rep = run_genericity_experiment(ExperimentConfig(ell=3, trials=40, seed=42))
    assert rep.histogram == {1: 40}
    assert rep.crosscap_pass == 40 and rep.lemma3_pass == 40


def test_small_ell5_run():
    rep = run_genericity_experiment(ExperimentConfig(ell=5, trials=40, seed=42))
    assert rep.histogram == {0: 40} and rep.crosscap_pass == 0


def test_oracle_every_k():
    rep = run_genericity_experiment(ExperimentConfig(ell=3, trials=6, seed=1, oracle_every=3))
    assert rep.oracle_runs == 2 and rep.oracle_agree == 2


@pytest.mark.parametrize("kwargs,exc", [
    ({"ell": 2}, InvalidInput),
    ({"trials": -1}, InvalidInput),
    ({"a": 2, "b": 1}, InvalidParams),
    ({"form": "bogus"}, InvalidParams),
    ({"box": (0, 0, 0, 1)}, InvalidInput),
    ({"seed": -1}, InvalidInput),
])
def test_config_validation(kwargs, exc):
    with pytest.raises(exc):
        ExperimentConfig(**kwargs)


def test_streams_are_per_trial():
    a = trial_rng(42, 7).random(4)
    assert np.array_equal(a, trial_rng(42, 7).random(4))
    assert not np.array_equal(a, trial_rng(42, 8).random(4))
    assert not np.array_equal(a, trial_rng(43, 7).random(4))


def test_centers_inside_box():
    cfg = ExperimentConfig(ell=6, box=(-1, 3, 2, 4))
    for i in range(20):
        c = sample_centers(cfg, i)
        assert c.shape == (6, 2)
        assert np.all((c[:, 0] >= -1) & (c[:, 0] <= 2) & (c[:, 1] >= 3) & (c[:, 1] <= 4))


def test_deterministic_across_thread_counts(monkeypatch):
    cfg = ExperimentConfig(ell=3, trials=30, seed=5, keep_trials=True, oracle_every=10)
    one = json.dumps(run_genericity_experiment(cfg, threads=1).to_dict())
    four = json.dumps(run_genericity_experiment(cfg, threads=4).to_dict())
    assert one == four
    monkeypatch.setenv("UMBRELLA_THREADS", "2")
    assert json.dumps(run_genericity_experiment(cfg, threads=8).to_dict()) == one


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("UMBRELLA_THREADS", "3")
    assert thread_count(16) == 3
    monkeypatch.setenv("UMBRELLA_THREADS", "x")
    with pytest.raises(InvalidInput):
        thread_count()


@settings(max_examples=8)
@given(st.integers(3, 5), st.integers(0, 25), st.integers(0, 2 ** 63), st.sampled_from(
    ["ellipse_circle", "distance_squared", "lorentzian"]))
def test_histogram_conservation(ell, trials, seed, form):
    rep = run_genericity_experiment(ExperimentConfig(ell=ell, trials=trials, seed=seed, form=form))
    assert sum(rep.histogram.values()) == trials
    assert rep.crosscap_pass <= trials
    assert rep.clean_trials + rep.degenerate_trials == trials
    assert rep.clean_pass <= rep.clean_trials


def test_degenerate_trials_counted_separately():
    # a collapsed box puts every center on one horizontal line
    cfg = ExperimentConfig(ell=3, trials=5, seed=3, box=(-2, 0, 2, 1e-300))
    rep = run_genericity_experiment(cfg)
    assert rep.degenerate_trials == 5 and rep.clean_trials == 0 and rep.clean_pass == 0


def test_report_json_shape():
    d = run_genericity_experiment(ExperimentConfig(trials=3, keep_trials=True)).to_dict()
    assert d["seed"] == 42 and d["histogram"] == {"1": 3}
    assert len(d["trials"]) == 3 and d["trials"][0]["index"] == 0
    assert "trials" not in run_genericity_experiment(ExperimentConfig(trials=3)).to_dict()
