import math

import numpy as np
import pytest

from optomech_cov import oracle
from optomech_cov.errors import StepTooLargeError, UnstableDriftError
from optomech_cov.lyapunov import solve_lyapunov
from optomech_cov.oracle import (
    SdeConfig,
    compare_covariances,
    default_sde_config,
    integral_formula_check,
    integrate_ensemble,
    propagate_moments,
    step_covariance,
    trajectory_noise,
)

from conftest import random_stable_system


def test_ou_fixed_point_euler():
    a, d = -np.eye(8), 2 * np.eye(8)
    cfg = SdeConfig(dt=0.01, burn_in=5.0, horizon=20.0, n_trajectories=200, seed=1)
    est = integrate_ensemble(a, d, cfg)
    report = compare_covariances(np.eye(8), est)
    assert report["within_se"], report
    assert report["max_rel_diag_dev"] < 0.05
    np.testing.assert_array_equal(est.cov, est.cov.T)
    assert np.all(np.linalg.eigvalsh(est.cov) > 0)


def test_ou_fixed_point_exact():
    a, d = -np.eye(8), 2 * np.eye(8)
    cfg = default_sde_config(a, method="exact", n_trajectories=200, seed=2)
    est = integrate_ensemble(a, d, cfg)
    assert compare_covariances(np.eye(8), est)["passed"]


def test_zero_diffusion_decays():
    est = integrate_ensemble(-np.eye(4), np.zeros((4, 4)),
                             SdeConfig(dt=0.01, burn_in=1.0, horizon=5.0, n_trajectories=100))
    assert np.all(est.cov == 0)


def test_seeded_runs_are_bit_reproducible(monkeypatch):
    rng = np.random.default_rng(0)
    a, d = random_stable_system(rng, n=4)
    cfg = default_sde_config(a, method="euler", n_trajectories=120, seed=99)
    cfg = SdeConfig(cfg.dt, cfg.burn_in / 5, cfg.horizon / 5, 120, 99, "euler")
    first = integrate_ensemble(a, d, cfg)
    second = integrate_ensemble(a, d, cfg)
    np.testing.assert_array_equal(first.cov, second.cov)
    # different chunking must give the same per-trajectory streams
    monkeypatch.setattr(oracle, "CHUNK", 7)
    monkeypatch.setattr(oracle, "BLOCK", 33)
    third = integrate_ensemble(a, d, cfg)
    np.testing.assert_allclose(third.cov, first.cov, rtol=1e-12)
    other = integrate_ensemble(a, d, SdeConfig(cfg.dt, cfg.burn_in, cfg.horizon, 120, 100,
                                               "euler"))
    assert not np.array_equal(other.cov, first.cov)


def test_dt_halving_with_coupled_noise():
    a, d = np.array([[-1.0, 2.0], [-2.0, -1.0]]), np.diag([2.0, 0.5])
    n_traj, dt, n_coarse = 200, 0.01, 3000
    fine = np.stack([trajectory_noise(5, i, 2 * n_coarse, 2) for i in range(n_traj)], axis=1)
    coarse = (fine[0::2] + fine[1::2]) / math.sqrt(2)
    l = np.sqrt(d)

    def moments(step, noise, n_burn):
        per = propagate_moments(np.eye(2) + a * step, l * math.sqrt(step), noise, n_burn)
        return per.mean(axis=0), per.std(axis=0, ddof=1) / math.sqrt(n_traj)

    c_coarse, se = moments(dt, coarse, 500)
    c_fine, _ = moments(dt / 2, fine, 1000)
    assert np.all(np.abs(c_fine - c_coarse) < se)
    np.testing.assert_allclose(c_fine, solve_lyapunov(a, d), atol=5 * se.max())


def test_step_covariance_closed_form():
    phi, q = step_covariance(-np.eye(3), 2 * np.eye(3), 0.7)
    np.testing.assert_allclose(phi, math.exp(-0.7) * np.eye(3), rtol=1e-13)
    np.testing.assert_allclose(q, (1 - math.exp(-1.4)) * np.eye(3), rtol=1e-12)


def test_step_covariance_consistent_with_lyapunov():
    rng = np.random.default_rng(8)
    a, d = random_stable_system(rng)
    v = solve_lyapunov(a, d)
    phi, q = step_covariance(a, d, 0.3)
    # the stationary covariance is a fixed point of one exact transition
    np.testing.assert_allclose(phi @ v @ phi.T + q, v, rtol=1e-9, atol=1e-12)


def test_config_validation():
    a = -np.eye(2)
    with pytest.raises(StepTooLargeError):
        integrate_ensemble(a, np.eye(2), SdeConfig(dt=0.1, burn_in=1, horizon=1,
                                                   n_trajectories=100))
    with pytest.raises(ValueError):
        integrate_ensemble(a, np.eye(2), SdeConfig(dt=0.01, burn_in=1, horizon=1,
                                                   n_trajectories=10))
    with pytest.raises(UnstableDriftError):
        integrate_ensemble(np.eye(2), np.eye(2), SdeConfig(dt=0.01, burn_in=1, horizon=1,
                                                           n_trajectories=100))
    with pytest.raises(UnstableDriftError):
        integral_formula_check(np.eye(2), np.eye(2))


def test_euler_step_bounded_by_fast_rates():
    # a fast rotation forces a small Euler step even with slow damping
    a = np.array([[-1.0, 100.0], [-100.0, -1.0]])
    cfg = default_sde_config(a, method="euler")
    assert cfg.dt * 100 <= 0.01 * (1 + 1e-12)
    with pytest.raises(StepTooLargeError):
        integrate_ensemble(a, np.eye(2), SdeConfig(dt=0.001, burn_in=1, horizon=1,
                                                   n_trajectories=100))


def test_integral_formula():
    np.testing.assert_allclose(integral_formula_check(-np.eye(8), 2 * np.eye(8)), np.eye(8),
                               rtol=1e-6)
    rng = np.random.default_rng(9)
    for _ in range(10):
        a, d = random_stable_system(rng)
        v = solve_lyapunov(a, d)
        w = integral_formula_check(a, d)
        assert np.linalg.norm(w - v) / np.linalg.norm(v) <= 1e-6


def test_compare_flags_corruption():
    v = np.eye(3)
    est = oracle.EnsembleEstimate(cov=1.1 * v, stderr=np.full((3, 3), 0.01), n_trajectories=100,
                                  n_samples=10, method="euler")
    report = compare_covariances(v, est)
    assert not report["passed"] and not report["within_diag"]
