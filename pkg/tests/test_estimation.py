import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symrb.channels import average_fidelity_exact
from symrb.estimation import (PencilConfig, assemble_fidelity,
                              bootstrap_fidelity, build_hankel, check_period,
                              esprit_poles, esprit_poles_multichannel,
                              estimate_fidelity, find_period,
                              fit_amplitudes, period_subsample, principal_root,
                              state_lambdas)
from symrb.protocol import (ExperimentConfig, ExperimentDataset, GateSpec,
                            SequenceOutcome, build_scenario, oracle_series,
                            run_scenario)
from symrb.superop import ValidationError


def _signal(poles, amps, N):
    ls = np.arange(N)
    return sum(a * np.asarray(p, dtype=complex) ** ls
               for p, a in zip(poles, amps)).real


# ---------------------------------------------------------------------------
# pencil primitives

def test_build_hankel_shape_and_content():
    H = build_hankel(np.arange(10.0), 3)
    assert H.shape == (7, 4)
    assert H[2, 1] == 3.0
    assert H[6, 3] == 9.0
    with pytest.raises(ValidationError):
        build_hankel(np.arange(3.0), 3)


def test_esprit_exact_recovery():
    poles = [0.95, 0.7, 0.4]
    series = _signal(poles, [1.0, 0.5, 0.25], 40)
    H = build_hankel(series, 13)
    found = esprit_poles(H, PencilConfig(rank=3)).poles
    assert np.max(np.abs(np.sort(found.real)[::-1] - poles)) < 1e-10


def test_esprit_threshold_rank():
    series = _signal([0.9, 0.5], [1.0, 1.0], 30)
    found = esprit_poles(build_hankel(series, 10), PencilConfig()).poles
    assert len(found) == 2


def test_esprit_multichannel_shared_poles():
    poles = [0.93, 0.6]
    s1 = _signal(poles, [1.0, 0.3], 25)
    s2 = _signal(poles, [0.2, 0.8], 20)
    hankels = [build_hankel(s1, 8), build_hankel(s2, 3)]
    found = esprit_poles_multichannel(hankels, PencilConfig(rank=2)).poles
    assert np.max(np.abs(np.sort(found.real)[::-1] - poles)) < 1e-9


def test_fit_amplitudes_recovers():
    poles = np.array([0.9, 0.6])
    series = _signal(poles, [0.7, 0.2], 30)
    fit = fit_amplitudes(series, poles)
    assert np.max(np.abs(fit.amplitudes.real - [0.7, 0.2])) < 1e-10
    assert fit.residual < 1e-12
    with pytest.raises(ValidationError):
        fit_amplitudes(series, np.array([0.9, 0.9 + 1e-12]))


# ---------------------------------------------------------------------------
# period subsampling

def test_gate_period_is_8():
    evals = np.linalg.eigvals(GateSpec(("T",)).transfer().entries)
    assert not check_period(evals, 4)
    assert check_period(evals, 8)
    assert find_period(evals) == 8
    evals2 = np.linalg.eigvals(GateSpec(("T", "T")).transfer().entries)
    assert find_period(evals2) == 8


def test_period_subsample_partition():
    lengths = np.array([8, 16, 24, 12, 20, 28])
    values = np.arange(6.0)
    subs = period_subsample(lengths, values, 8)
    assert set(subs) == {0, 4}
    ks0, v0 = subs[0]
    assert list(ks0) == [1, 2, 3] and list(v0) == [0, 1, 2]
    ks4, v4 = subs[4]
    assert list(ks4) == [1, 2, 3] and list(v4) == [3, 4, 5]


def test_period_subsample_identity_for_tau_1():
    lengths = np.array([3, 1, 2])
    subs = period_subsample(lengths, np.array([30.0, 10.0, 20.0]), 1)
    ks, vals = subs[0]
    assert list(ks) == [1, 2, 3] and list(vals) == [10.0, 20.0, 30.0]


@given(st.floats(0.2, 1.0), st.sampled_from([2, 4, 8]))
@settings(max_examples=50, deadline=None)
def test_principal_root_roundtrip(lam, tau):
    assert principal_root(lam**tau, tau) == pytest.approx(lam, abs=1e-8)


def test_principal_root_complex_pair():
    lam = 0.97 * np.exp(0.01j)
    back = principal_root(lam**8, 8)
    assert abs(back - lam) < 1e-10


# ---------------------------------------------------------------------------
# slot pipeline on synthetic data

def _synthetic_dataset(scenario, lengths, K=1):
    """Dataset whose survivals are the exact sequence-averaged values."""
    records = []
    for state in scenario.states:
        series = oracle_series(scenario, list(lengths), state)
        for l, v in zip(lengths, series):
            for q in range(K):
                records.append(SequenceOutcome(int(l), q, state.state_id,
                                               state.state_id, float(v), 0, 0))
    return ExperimentDataset(scenario.config, records)


@pytest.mark.parametrize("example", ["single-T", "two-T"])
def test_noise_free_pipeline_is_exact(example):
    lengths = tuple(range(8, 801, 8))
    config = ExperimentConfig(example, 0.1, lengths, 1)
    sc = build_scenario(config)
    ds = _synthetic_dataset(sc, lengths)
    est = estimate_fidelity(ds, sc, 8, PencilConfig())
    exact = average_fidelity_exact(sc.twirled_noise())
    assert abs(est.fidelity - exact) < 1e-6


def test_injected_poles_recovered_to_1e8():
    """Series built directly from known poles bypasses the simulator."""
    sc = build_scenario(ExperimentConfig(
        "single-T", 0.1, tuple(range(8, 401, 8)), 1, state_ids=("zplus",)))
    state = sc.states[0]
    lengths = np.arange(8, 401, 8)
    target = 0.987654321
    series = 0.4 + 0.55 * (target ** 8) ** (lengths // 8 - 1)
    lams = state_lambdas(lengths, series, state, 8, PencilConfig())
    assert abs(lams["chi0.1"] - target) < 1e-8


def test_assemble_fidelity_checks_slots():
    sc = build_scenario(ExperimentConfig("single-T", 0.1, (8,), 1))
    with pytest.raises(ValidationError):
        assemble_fidelity({"chi0.0": 1.0}, sc.slots, 2)
    with pytest.raises(ValidationError):
        assemble_fidelity({"chi0.0": 1.0, "chi0.1": 1.0, "chi1.0": 1.0,
                           "chi3.0": 1.0, "bogus": 1.0}, sc.slots, 2)
    total, fid = assemble_fidelity(
        {"chi0.0": 1.0, "chi0.1": 1.0, "chi1.0": 1.0, "chi3.0": 1.0},
        sc.slots, 2)
    assert total == pytest.approx(4.0)
    assert fid == pytest.approx(1.0)


def test_estimate_on_simulated_data():
    lengths = tuple(range(8, 601, 8))
    sc = build_scenario(ExperimentConfig("single-T", 0.05, lengths, 60,
                                         seed=21))
    ds = run_scenario(sc)
    est = estimate_fidelity(ds, sc, 8, PencilConfig())
    exact = average_fidelity_exact(sc.twirled_noise())
    assert abs(est.fidelity - exact) < 2e-3


def test_max_length_restricts_data():
    lengths = tuple(range(8, 401, 8))
    sc = build_scenario(ExperimentConfig("single-T", 0.05, lengths, 30,
                                         seed=5))
    ds = run_scenario(sc)
    full = estimate_fidelity(ds, sc, 8, PencilConfig())
    short = estimate_fidelity(ds, sc, 8, PencilConfig(), max_length=200)
    assert full.fidelity != short.fidelity       # genuinely different data
    exact = average_fidelity_exact(sc.twirled_noise())
    assert abs(short.fidelity - exact) < 5e-3


# ---------------------------------------------------------------------------
# bootstrap

def test_bootstrap_interval_brackets_estimate():
    lengths = tuple(range(8, 601, 8))
    sc = build_scenario(ExperimentConfig("single-T", 0.05, lengths, 40,
                                         shots=0, seed=8))
    ds = run_scenario(sc)
    boot = bootstrap_fidelity(ds, sc, 8, PencilConfig(), B=40, seed=1)
    assert boot.samples == 40
    assert boot.ci_low <= boot.bootstrap_mean <= boot.ci_high
    exact = average_fidelity_exact(sc.twirled_noise())
    assert abs(boot.bootstrap_mean - exact) < 5e-3


def test_bootstrap_subset_validation():
    lengths = tuple(range(8, 201, 8))
    sc = build_scenario(ExperimentConfig("single-T", 0.05, lengths, 10))
    ds = run_scenario(sc)
    with pytest.raises(ValidationError):
        bootstrap_fidelity(ds, sc, 8, PencilConfig(), B=5, m=11)
    with pytest.raises(ValidationError):
        bootstrap_fidelity(ds, sc, 8, PencilConfig(), B=5, m=0)
