import numpy as np
import pytest

from optomech_cov.lyapunov import physicality_margin
from optomech_cov.model import swap_sides
from optomech_cov.sweep import axis, evaluate_point, grid_sw, sweep_detuning

from conftest import make_params

MEASURES = ("e_n_b1b2", "e_n_b1m", "e_n_b2m", "s_q1", "s_p1", "s_q2", "s_p2")


def test_axis():
    np.testing.assert_array_equal(axis(0, 1, 5), [0, 0.25, 0.5, 0.75, 1])
    for bad in ((0, 1, 1), (0, 1, 2.5), (0, np.inf, 3)):
        with pytest.raises(ValueError):
            axis(*bad)


def test_decoupled_sweep():
    p = make_params(xi=0.0, g0=1.0)
    res = sweep_detuning(p, -20, 20, 9)
    assert len(res.rows) == 9
    assert np.all(res.column("e_n_b1b2") == 0) and np.all(res.column("e_n_b1m") == 0)
    np.testing.assert_array_equal(res.axis_values(), np.linspace(-20, 20, 9))


def test_sweep_is_deterministic():
    p = make_params(xi_k=0.01, omega_sw_2_wr=0.2)
    a = sweep_detuning(p, 0, 60, 13)
    b = sweep_detuning(p, 0, 60, 13)
    for name in MEASURES + ("intensity", "delta_eff"):
        np.testing.assert_array_equal(a.column(name), b.column(name))


def test_continuation_through_bistable_window():
    p = make_params(eta_k=100.0, xi_k=0.05)
    res = sweep_detuning(p, 0, 150, 301)
    intensity = res.column("intensity")
    assert max(r.n_branches for r in res.rows) == 3
    assert all(r.stable for r in res.rows)
    # continuation tracks one branch: no jump beyond 10x the local slope
    steps = np.abs(np.diff(intensity))
    jumps = np.nonzero(steps > 10 * np.maximum(np.roll(steps, 1), np.roll(steps, -1)))[0]
    assert len(jumps) <= 1
    # upward continuation keeps the high branch where lowest would drop
    lowest = sweep_detuning(p, 0, 150, 301, policy="lowest")
    bistable = [i for i, r in enumerate(res.rows) if r.n_branches == 3]
    assert intensity[bistable[0]] > lowest.column("intensity")[bistable[0]]


def test_unstable_rows_keep_mean_fields():
    p = make_params()
    res = sweep_detuning(p, 5, 15, 3, stability_rel=1e-3)
    for row in res.rows:
        assert not row.stable and row.measures is None
        assert np.isfinite(row.intensity) and row.n_branches >= 1
    assert np.all(np.isnan(res.column("e_n_b1b2")))


def test_grid_shape_and_order():
    p = make_params()
    res = grid_sw(p, (0, 2, 3), (0.5, 1.5, 2))
    assert len(res.rows) == 6
    assert [r.axis for r in res.rows[:3]] == [(0.0, 0.5), (0.0, 1.5), (1.0, 0.5)]
    # points are independent of evaluation order
    rev = evaluate_point(p.with_changes(omega_sw_1=2 * p.omega_R, omega_sw_2=1.5 * p.omega_R))
    assert rev.measures.e_n_b1b2 == res.rows[-1].measures.e_n_b1b2


def test_grid_transpose_symmetry():
    p = make_params()
    g = grid_sw(p, (0, 3, 4), (0, 3, 4))
    z = {name: g.column(name).reshape(4, 4) for name in MEASURES}
    np.testing.assert_allclose(z["e_n_b1b2"], z["e_n_b1b2"].T, atol=1e-9)
    np.testing.assert_allclose(z["e_n_b1m"], z["e_n_b2m"].T, atol=1e-9)
    np.testing.assert_allclose(z["s_q1"], z["s_q2"].T, atol=1e-9)


def test_point_result_fields():
    res = evaluate_point(make_params())
    assert res.stable and res.error is None
    assert res.residual <= 1e-10
    assert physicality_margin(res.covariance) >= -1e-9


def test_point_swap_consistency():
    p = make_params(omega_sw_2_wr=2.5)
    a, b = evaluate_point(p), evaluate_point(swap_sides(p))
    assert a.measures.s_q1 == pytest.approx(b.measures.s_q2, abs=1e-9)
